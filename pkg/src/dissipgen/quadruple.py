"""Boundary quadruples: construction, verification, isomorphisms, triples.

A quadruple over a pencil is a pair of matrices ``gm`` (p x n) and
``gp`` (q x n) with

* ``gp^H gp - gm^H gm = T`` (Green identity),
* ``[gm; gp]`` of full row rank ``p + q`` (joint surjectivity),
* ``gm``, ``gp`` of full row rank (individual surjectivity).

The boundary spaces are ``C^p`` and ``C^q`` with the standard inner
product; any weighting lives in the maps themselves.
"""

from dataclasses import dataclass

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    as_matrix,
    as_vector,
    containment_residual,
    _fix_phases,
    hermitian_geig,
    inverse_gram,
    null_space,
    operator_norm,
    orthonormalize,
    rank,
    row_space,
    subspace_distance,
)
from .checks import Report, check
from .errors import (
    DecompositionFails,
    DimensionMismatch,
    GreenIdentityViolated,
    NoTriple,
    SignatureMismatch,
    SurjectivityViolated,
)
from .pencil import InnerSpace, SkewPencil, boundary_form, form_scale, graph_gram
from .serialization import decode_matrix, encode_matrix

SQRT1_2 = np.sqrt(2.0) / 2.0
CONDITION_GUARD = 1e8
META_TAGS = ("form-spectral", "deficiency", "model-explicit", "triple", "user")


def _frozen(a):
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class BoundaryQuadruple:
    """Boundary maps ``gm``, ``gp`` over a pencil.

    Construction does not verify the quadruple axioms so that broken
    candidates can be reported on; see :func:`verify_quadruple`.
    """

    pencil: SkewPencil
    gm: np.ndarray
    gp: np.ndarray
    meta: str = "user"

    def __post_init__(self):
        n = self.pencil.n
        gm = np.asarray(self.gm, dtype=np.complex128)
        gp = np.asarray(self.gp, dtype=np.complex128)
        object.__setattr__(self, "gm", _frozen(as_matrix(gm.reshape(-1, n) if gm.size == 0 else gm, cols=n)))
        object.__setattr__(self, "gp", _frozen(as_matrix(gp.reshape(-1, n) if gp.size == 0 else gp, cols=n)))

    @property
    def p(self):
        return self.gm.shape[0]

    @property
    def q(self):
        return self.gp.shape[0]

    @property
    def stacked(self):
        return np.vstack([self.gm, self.gp])

    @property
    def signature(self):
        return np.concatenate([-np.ones(self.p), np.ones(self.q)])


def green_residual(q):
    """Relative residual of ``gp^H gp - gm^H gm = T``."""
    T = boundary_form(q.pencil)
    R = q.gp.conj().T @ q.gp - q.gm.conj().T @ q.gm - T
    nR = operator_norm(R)
    scale = form_scale(q.pencil)
    return nR / scale if scale > 0 else nR


def verify_quadruple(q, tol=DEFAULT_TOL, rank_tol=DEFAULT_TOL):
    """Report on the three quadruple axioms."""
    p_, q_ = q.p, q.q
    joint = rank(q.stacked, rank_tol) if p_ + q_ else 0
    rm = rank(q.gm, rank_tol) if p_ else 0
    rp = rank(q.gp, rank_tol) if q_ else 0
    checks = (
        check("green_identity", green_residual(q), tol),
        check("joint_surjectivity", float(p_ + q_ - joint), 0.0, f"rank {joint} of {p_ + q_}"),
        check("individual_surjectivity", float((p_ - rm) + (q_ - rp)), 0.0,
              f"rank(gm) = {rm} of {p_}, rank(gp) = {rp} of {q_}"),
    )
    return Report("quadruple", checks, {"p": p_, "q": q_, "meta": q.meta})


def quadruple_from_form(p, tol=DEFAULT_TOL):
    """Quadruple from the spectral split of the boundary form.

    The nonzero eigenpairs of ``T x = lam G x`` (``G`` the graph Gram
    matrix) give ``gp = sqrt(lam) x^H G`` for ``lam > 0`` and ``gm`` likewise
    for ``lam < 0``. Since those ``x`` lie in ``G^{-1} range(T)``, the problem
    is solved there: with ``T = U D U^H`` (eigenvalues ``|d| > tol max|d|``)
    and ``K = U^H G^{-1} U`` one needs ``D^{-1} y = (1/lam) K y``, and then
    ``x^H G = y^H U^H``. The Green identity reduces to ``Y lam Y^H = D``,
    which the small solve satisfies to round-off however badly ``G`` is
    conditioned.
    """
    T = boundary_form(p)
    n = p.n
    if n == 0 or not np.any(T):
        z = np.zeros((0, n), dtype=np.complex128)
        return BoundaryQuadruple(p, z, z, "form-spectral")
    d, U = np.linalg.eigh(T)
    keep = np.abs(d) > tol * form_scale(p)
    d, U = d[keep], U[:, keep]
    K = inverse_gram(graph_gram(p), U)
    spec = hermitian_geig(np.diag(1.0 / d), K)
    lam = 1.0 / spec.eigenvalues
    rows = spec.eigenvectors.conj().T @ U.conj().T
    pos = np.flatnonzero(lam > 0)
    neg = np.flatnonzero(lam < 0)
    # strongest modes first in both maps
    pos = pos[np.argsort(-lam[pos], kind="stable")]
    neg = neg[np.argsort(lam[neg], kind="stable")]
    gp = np.sqrt(lam[pos])[:, None] * rows[pos]
    gm = np.sqrt(-lam[neg])[:, None] * rows[neg]
    return BoundaryQuadruple(p, _fix_phases(gm.T).T, _fix_phases(gp.T).T, "form-spectral")


def deficiency_spaces(p, tol=DEFAULT_TOL):
    """``(ker T, ker(I - A), ker(I + A))`` as column bases."""
    n = p.n
    T = boundary_form(p)
    I = np.eye(n)
    return null_space(T, tol, form_scale(p)), null_space(I - p.a_max, tol), null_space(I + p.a_max, tol)


def quadruple_from_deficiency(p, tol=DEFAULT_TOL):
    """Quadruple from ``C^n = ker T ⊕ ker(I - A) ⊕ ker(I + A)``.

    ``gp`` / ``gm`` send a vector to sqrt(2) times its coordinates in an
    ``M``-orthonormal basis of ``ker(I - A)`` / ``ker(I + A)`` along the
    direct sum.
    """
    n = p.n
    K0, Kp, Km = deficiency_spaces(p, tol)
    k0, kp, km = K0.shape[1], Kp.shape[1], Km.shape[1]
    if k0 + kp + km != n:
        raise DecompositionFails(
            f"dim ker T + dim ker(I-A) + dim ker(I+A) = {k0}+{kp}+{km} != {n}")
    M = p.weight
    Bp = orthonormalize(Kp, M, tol) if kp else Kp
    Bm = orthonormalize(Km, M, tol) if km else Km
    E = np.hstack([K0, Bp, Bm])
    if n and np.linalg.cond(E) > CONDITION_GUARD:
        raise DecompositionFails("the three subspaces are not a numerically direct sum")
    Einv = np.linalg.inv(E) if n else E
    Pp = Bp @ Einv[k0:k0 + kp]
    Pm = Bm @ Einv[k0 + kp:]
    gp = np.sqrt(2.0) * (Bp.conj().T @ M @ Pp)
    gm = np.sqrt(2.0) * (Bm.conj().T @ M @ Pm)
    q = BoundaryQuadruple(p, gm, gp, "deficiency")
    rep = verify_quadruple(q, tol=1e-8)
    if not rep.passed:
        bad = ", ".join(c.name for c in rep.failures())
        raise DecompositionFails(f"deficiency maps fail post-hoc checks: {bad}")
    return q


def _random_unitary(rng, n):
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Qm, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Qm * (d / np.abs(d))


def synth_pencil(k0, kp, km, seed=0):
    """Pencil ``A = U diag(K, I_kp, -I_km) U^H`` with ``K`` random skew-Hermitian, ``M = I``.

    The core is ``U`` restricted to the first block, which is then exactly
    ``ker T``.
    """
    k0, kp, km = int(k0), int(kp), int(km)
    if min(k0, kp, km) < 0 or k0 + kp + km < 1:
        raise ValueError("need nonnegative block sizes with k0 + kp + km >= 1")
    rng = np.random.default_rng(seed)
    n = k0 + kp + km
    Z = rng.standard_normal((k0, k0)) + 1j * rng.standard_normal((k0, k0))
    K = 0.5 * (Z - Z.conj().T)
    D = np.zeros((n, n), dtype=np.complex128)
    D[:k0, :k0] = K
    D[k0:k0 + kp, k0:k0 + kp] = np.eye(kp)
    D[k0 + kp:, k0 + kp:] = -np.eye(km)
    U = _random_unitary(rng, n)
    A = U @ D @ U.conj().T
    return SkewPencil(InnerSpace.euclidean(n), A, U[:, :k0])


def closure_space(q, tol=DEFAULT_TOL):
    """Orthonormal basis of ``ker gm ∩ ker gp``: the domain of the closure of ``A0``."""
    return null_space(q.stacked, tol) if q.p + q.q else np.eye(q.pencil.n, dtype=np.complex128)


def closure_report(q, tol=DEFAULT_TOL):
    """Compare ``closure_space(q)`` with ``ker T`` and check it contains the core."""
    K = closure_space(q, tol)
    kerT = null_space(boundary_form(q.pencil), tol, form_scale(q.pencil))
    core = q.pencil.core
    return Report("closure", (
        check("equals_kernel_of_boundary_form", subspace_distance(K, kerT), 1e-7),
        check("contains_core", containment_residual(K, core) if core.shape[1] else 0.0, 1e-7),
    ), {"dim": K.shape[1], "core_dim": core.shape[1]})


def interpolate(q, xm, xp, tol=DEFAULT_TOL):
    """Minimum-norm ``w`` with ``gm w = xm`` and ``gp w = xp``."""
    xm = as_vector(xm, q.p)
    xp = as_vector(xp, q.q)
    n = q.pencil.n
    if q.p + q.q == 0:
        return np.zeros(n, dtype=np.complex128)
    S = q.stacked
    if rank(S, tol) < q.p + q.q:
        raise SurjectivityViolated("stacked boundary map is not surjective")
    rhs = np.concatenate([xm, xp])
    w, *_ = np.linalg.lstsq(S, rhs, rcond=None)
    res = np.linalg.norm(S @ w - rhs)
    scale = np.linalg.norm(xm) + np.linalg.norm(xp)
    if res > 1e-9 * max(scale, np.finfo(float).tiny) * max(1.0, np.linalg.cond(S)):
        raise SurjectivityViolated(f"interpolation residual {res:.3g} too large")
    return w


@dataclass(frozen=True)
class QuadrupleIso:
    """``psi`` with ``psi [gm; gp] = [gm~; gp~]`` and ``psi^H C~ psi = C``."""

    psi: np.ndarray
    residual: float


def quadruple_iso(q1, q2, tol=1e-8):
    """Certified isomorphism carrying the boundary data of ``q1`` to that of ``q2``."""
    if q1.pencil.n != q2.pencil.n:
        raise DimensionMismatch("quadruples live over pencils of different size")
    N = q1.p + q1.q
    if N != q2.p + q2.q:
        raise SignatureMismatch(f"boundary dimensions differ: {N} vs {q2.p + q2.q}")
    if N == 0:
        return QuadrupleIso(np.zeros((0, 0), dtype=np.complex128), 0.0)
    G1, G2 = q1.stacked, q2.stacked
    Z = row_space(G1)
    if Z.shape[1] != N:
        raise SurjectivityViolated("first quadruple is not jointly surjective")
    psi = (G2 @ Z) @ np.linalg.inv(G1 @ Z)
    C1 = np.diag(q1.signature)
    C2 = np.diag(q2.signature)
    scale = max(1.0, operator_norm(psi) ** 2)
    metric = operator_norm(psi.conj().T @ C2 @ psi - C1) / scale
    intertwine = operator_norm(psi @ G1 - G2) / max(operator_norm(G2), 1.0)
    residual = max(metric, intertwine)
    if residual > tol:
        raise SignatureMismatch(
            f"psi^H C~ psi = C fails (metric residual {metric:.3g}, "
            f"intertwining residual {intertwine:.3g})")
    return QuadrupleIso(psi, residual)


def to_triple(q):
    """``(G1, G2) = (sqrt2/2 (gp - gm), sqrt2/2 (gp + gm))``; needs ``p == q``."""
    if q.p != q.q:
        raise NoTriple(f"no boundary triple: dim H- = {q.p} != {q.q} = dim H+")
    return SQRT1_2 * (q.gp - q.gm), SQRT1_2 * (q.gp + q.gm)


def triple_form_residual(pencil, G1, G2):
    """Relative residual of ``G2^H G1 + G1^H G2 = T``."""
    T = boundary_form(pencil)
    R = G2.conj().T @ G1 + G1.conj().T @ G2 - T
    return operator_norm(R) / max(operator_norm(T), 1.0)


def from_triple(pencil, G1, G2, tol=DEFAULT_TOL):
    """Quadruple ``gm = sqrt2/2 (G2 - G1)``, ``gp = sqrt2/2 (G2 + G1)``."""
    n = pencil.n
    G1 = as_matrix(np.asarray(G1).reshape(-1, n), cols=n)
    G2 = as_matrix(np.asarray(G2).reshape(-1, n), cols=n)
    if G1.shape != G2.shape:
        raise DimensionMismatch("G1 and G2 must have the same shape")
    r = triple_form_residual(pencil, G1, G2)
    if r > tol:
        raise GreenIdentityViolated(f"G2^H G1 + G1^H G2 != T (residual {r:.3g})")
    return BoundaryQuadruple(pencil, SQRT1_2 * (G2 - G1), SQRT1_2 * (G2 + G1), "triple")


def quadruple_to_json(q, pencil_ref=None):
    from .pencil import pencil_to_json

    return {
        "pencil_ref": pencil_ref if pencil_ref is not None else pencil_to_json(q.pencil),
        "gm": encode_matrix(q.gm),
        "gp": encode_matrix(q.gp),
        "meta": q.meta,
    }


def quadruple_from_json(d, pencil):
    """Decode ``{pencil_ref, gm, gp, meta}``; ``pencil`` is the resolved reference."""
    extra = set(d) - {"pencil_ref", "gm", "gp", "meta"}
    if extra:
        raise ValueError(f"unknown quadruple keys {sorted(extra)}")
    n = pencil.n
    gm = decode_matrix(d["gm"], cols=n) if d["gm"] != [] else np.zeros((0, n))
    gp = decode_matrix(d["gp"], cols=n) if d["gp"] != [] else np.zeros((0, n))
    meta = d.get("meta", "user")
    if meta not in META_TAGS:
        raise ValueError(f"unknown quadruple meta tag {meta!r}")
    return BoundaryQuadruple(pencil, gm, gp, meta)
