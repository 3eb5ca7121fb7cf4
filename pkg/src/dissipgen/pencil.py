"""Skew pencils: a maximal operator, a core domain and a weighted inner product.

A :class:`SkewPencil` is the finite-dimensional stand-in for a pair
``A0 ⊂ A``: ``a_max`` plays the maximal operator and the columns of
``core`` span the domain of ``A0``. The boundary form
``b(u, v) = <Au, v> + <u, Av>`` is the Hermitian matrix
``T = M A + A^H M`` with ``b(u, v) = v^H T u``.
"""

from dataclasses import dataclass

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    HERMITIAN_TOL,
    as_matrix,
    hermitian_part,
    is_hermitian,
    operator_norm,
    orthonormalize,
    rank,
)
from .checks import Report, check
from .errors import NotHermitian, NotPositiveDefinite
from .serialization import decode_matrix, encode_matrix


def _frozen(a):
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class InnerSpace:
    """``C^dim`` with ``<u, v> = v^H M u`` for a Hermitian positive-definite ``M``."""

    dim: int
    weight: np.ndarray

    def __post_init__(self):
        W = as_matrix(self.weight, self.dim, self.dim)
        if not is_hermitian(W, HERMITIAN_TOL):
            raise NotHermitian("weight matrix is not Hermitian")
        if self.dim and np.linalg.eigvalsh(hermitian_part(W))[0] <= 0:
            raise NotPositiveDefinite("weight matrix is not positive definite")
        object.__setattr__(self, "weight", _frozen(W))

    @classmethod
    def euclidean(cls, n):
        return cls(n, np.eye(n))

    def inner(self, u, v):
        return complex(np.vdot(v, self.weight @ u))

    def norm(self, u):
        return float(np.sqrt(max(np.vdot(u, self.weight @ u).real, 0.0)))


@dataclass(frozen=True)
class SkewPencil:
    space: InnerSpace
    a_max: np.ndarray
    core: np.ndarray

    def __post_init__(self):
        n = self.space.dim
        object.__setattr__(self, "a_max", _frozen(as_matrix(self.a_max, n, n)))
        core = np.asarray(self.core, dtype=np.complex128)
        if core.size == 0:
            core = core.reshape(n, 0)
        object.__setattr__(self, "core", _frozen(as_matrix(core, n)))

    @property
    def n(self):
        return self.space.dim

    @property
    def weight(self):
        return self.space.weight

    @classmethod
    def from_arrays(cls, a_max, core=None, weight=None):
        a = as_matrix(a_max)
        n = a.shape[0]
        W = np.eye(n) if weight is None else weight
        c = np.zeros((n, 0)) if core is None else core
        return cls(InnerSpace(n, W), a, c)


def boundary_form(p):
    """``T = M A + A^H M``, Hermitian by construction."""
    MA = p.weight @ p.a_max
    return MA + MA.conj().T


def form_scale(p):
    """Reference size for the boundary form: ``max(|T|, |M A|)``.

    Thresholds on ``T`` are taken relative to this, so that a form which
    is zero up to round-off is treated as zero.
    """
    MA = p.weight @ p.a_max
    return max(operator_norm(MA + MA.conj().T), operator_norm(MA))


def graph_gram(p):
    """Gram matrix ``M + A^H M A`` of the graph inner product."""
    MA = p.weight @ p.a_max
    return hermitian_part(p.weight + MA.conj().T @ p.a_max)


def compress(p, Q):
    """``Q^H M A Q``: the operator seen in the coordinates of an ``M``-orthonormal ``Q``."""
    return Q.conj().T @ (p.weight @ (p.a_max @ Q))


def _scale(p):
    return max(1.0, operator_norm(p.weight) * operator_norm(p.a_max))


def pencil_invariants(p, tol=DEFAULT_TOL):
    """Check ``T core = 0`` and that ``core`` has full column rank."""
    T = boundary_form(p)
    k = p.core.shape[1]
    checks = [check("boundary_form_hermitian",
                    operator_norm(T - T.conj().T) / max(operator_norm(T), 1.0), HERMITIAN_TOL)]
    if k:
        Cn = p.core / np.linalg.norm(p.core, axis=0)
        checks.append(check("core_in_kernel_of_boundary_form",
                            operator_norm(T @ Cn) / _scale(p), tol))
        r = rank(p.core, tol)
        checks.append(check("core_full_column_rank", float(k - r), 0.0,
                            f"rank {r} of {k} columns"))
    return Report("pencil", tuple(checks), {"n": p.n, "core_dim": k})


def check_skew_symmetric(p, tol=DEFAULT_TOL, probes=16, seed=0):
    """Skew-symmetry of the restriction to ``span(core)``, three equivalent ways.

    (i) ``Re<A u, u> = 0`` on basis vectors and random combinations,
    (ii) both ``A`` and ``-A`` dissipative there,
    (iii) ``<A u, v> + <u, A v> = 0`` for all pairs, i.e. ``C^H T C = 0``.
    """
    k = p.core.shape[1]
    if k == 0:
        return Report("skew_symmetric", (check("vacuous", 0.0, tol, "core is {0}"),))
    Q = orthonormalize(p.core, p.weight, tol)
    T = boundary_form(p)
    TQ = Q.conj().T @ T @ Q
    scale = _scale(p)
    rng = np.random.default_rng(seed)
    C = rng.standard_normal((k, probes)) + 1j * rng.standard_normal((k, probes))
    C = np.hstack([np.eye(k), C / np.linalg.norm(C, axis=0)])
    B = compress(p, Q)
    re_form = np.abs(np.einsum("ij,ij->j", C.conj(), B @ C).real).max()
    h = np.linalg.eigvalsh(hermitian_part(B))
    pm = max(h[-1], -h[0])
    return Report("skew_symmetric", (
        check("re_form_vanishes", re_form / scale, tol),
        check("plus_minus_dissipative", pm / scale, tol),
        check("boundary_form_vanishes_on_core", operator_norm(TQ) / scale, tol),
    ))


def check_dissipative_on(p, S, tol=DEFAULT_TOL, samples=100, seed=0):
    """Is ``Re<A x, x> <= 0`` for every ``x`` in ``span(S)``?

    The verdict is the sign of the largest eigenvalue of the Hermitian
    part of the compressed operator. As an independent cross-check the
    resolvent inequality ``|x - tAx| >= |x|`` is probed on random
    vectors of the span for ``t`` in {0.1, 1, 10}, plus a witness vector
    (top eigenvector, small ``t``) whenever the verdict is negative.
    """
    Q = orthonormalize(S, p.weight, tol)
    s = Q.shape[1]
    if s == 0:
        lam = 0.0
        top = np.zeros(0)
    else:
        w, V = np.linalg.eigh(hermitian_part(compress(p, Q)))
        lam, top = float(w[-1]), V[:, -1]
    M, A = p.weight, p.a_max
    eps = np.finfo(float).eps
    rng = np.random.default_rng(seed)
    probes = []
    if s:
        C = rng.standard_normal((s, samples)) + 1j * rng.standard_normal((s, samples))
        for c in C.T:
            for t in (0.1, 1.0, 10.0):
                probes.append((Q @ c, t))
        x = Q @ top
        Ax = A @ x
        nAx = np.vdot(Ax, M @ Ax).real
        if lam > 0 and nAx > 0:
            probes.append((x, lam / nAx))
    violated = False
    worst = 0.0
    for x, t in probes:
        Ax = A @ x
        y = x - t * Ax
        lhs = np.vdot(y, M @ y).real
        rhs = np.vdot(x, M @ x).real
        nAx = np.vdot(Ax, M @ Ax).real
        slack = 64 * eps * (rhs + 2 * t * np.sqrt(rhs * nAx) + t * t * nAx) * operator_norm(M)
        deficit = rhs - lhs
        worst = max(worst, deficit / max(rhs, np.finfo(float).tiny))
        if deficit > slack:
            violated = True
    verdict = check("hermitian_part_nonpositive", lam, tol, f"lambda_max = {lam:.6g}")
    return Report("dissipative_on", (verdict,), {
        "lambda_max": lam,
        "dim": s,
        "norm_violation_found": violated,
        "consistent": violated != verdict.passed,
        "worst_relative_deficit": worst,
    })


def pencil_to_json(p):
    return {
        "dim": p.n,
        "weight": encode_matrix(p.weight),
        "a_max": encode_matrix(p.a_max),
        "core": encode_matrix(p.core),
    }


def pencil_from_json(d):
    if not isinstance(d, dict):
        raise ValueError("pencil document must be an object")
    extra = set(d) - {"dim", "weight", "a_max", "core"}
    if extra:
        raise ValueError(f"unknown pencil keys {sorted(extra)}")
    n = int(d["dim"])
    W = decode_matrix(d["weight"], n, n) if "weight" in d else np.eye(n)
    A = decode_matrix(d["a_max"], n, n)
    core = decode_matrix(d.get("core", {"rows": n, "cols": 0, "data": []}), n)
    return SkewPencil(InnerSpace(n, W), A, core)
