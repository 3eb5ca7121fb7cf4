"""Extensions ``A_Phi`` parametrised by contractions ``Phi : C^p -> C^q``.

``D(A_Phi) = {w : Phi gm w = gp w}``. The extension is stored as an
``M``-orthonormal basis of that subspace together with the compressed
generator ``basis^H M A basis``; all evolution happens in those
coordinates.
"""

from dataclasses import dataclass

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    as_matrix,
    containment_residual,
    hermitian_part,
    null_space,
    operator_norm,
    orthonormalize,
    singular_values,
    subspace_distance,
)
from .checks import Report, check
from .errors import (
    CoreNotContained,
    DimensionMismatch,
    InvariantViolation,
    NotAContraction,
    NotDissipativeOnS,
)
from .pencil import check_dissipative_on, compress
from .serialization import encode_matrix

CONTRACTION_TOL = 1e-9

REGIME_BOTH_ZERO = "both-zero"
REGIME_GAMMA_PLUS_ZERO = "gamma-plus-zero"
REGIME_GAMMA_MINUS_ZERO = "gamma-minus-zero"
REGIME_GENERIC = "generic"


@dataclass(frozen=True)
class Contraction:
    """Boundary coupling ``phi`` (q x p) with ``sigma_max(phi) <= 1 + tol``.

    The isometry and unitary flags are derived from the singular values.
    """

    phi: np.ndarray
    tol: float = CONTRACTION_TOL
    checked: bool = True

    def __post_init__(self):
        phi = np.array(self.phi, dtype=np.complex128)
        if phi.ndim != 2:
            raise ValueError("phi must be a matrix")
        phi.setflags(write=False)
        object.__setattr__(self, "phi", phi)
        if self.checked and self.sigma_max > 1 + self.tol:
            raise NotAContraction(f"sigma_max(phi) = {self.sigma_max:.12g} > 1")

    @classmethod
    def unchecked(cls, phi):
        """Skip the norm test. Only for demonstrating what goes wrong without it."""
        return cls(as_matrix(phi), checked=False)

    @classmethod
    def zero(cls, q, p):
        return cls(np.zeros((q, p)))

    @property
    def shape(self):
        return self.phi.shape

    @property
    def singular_values(self):
        return singular_values(self.phi)

    @property
    def sigma_max(self):
        s = self.singular_values
        return float(s[0]) if s.size else 0.0

    @property
    def sigma_min(self):
        q, p = self.phi.shape
        if p == 0:
            return 1.0  # the map on {0} is vacuously isometric
        s = self.singular_values
        return float(s[-1]) if s.size == p else 0.0

    @property
    def is_isometry(self):
        q, p = self.phi.shape
        return p <= q and self.sigma_min >= 1 - self.tol

    @property
    def is_unitary(self):
        q, p = self.phi.shape
        return p == q and self.is_isometry


def regime_of(p, q):
    if p == 0 and q == 0:
        return REGIME_BOTH_ZERO
    if q == 0:
        return REGIME_GAMMA_PLUS_ZERO
    if p == 0:
        return REGIME_GAMMA_MINUS_ZERO
    return REGIME_GENERIC


@dataclass(frozen=True)
class Extension:
    quadruple: object
    phi: Contraction
    basis: np.ndarray
    gen: np.ndarray
    report: Report

    @property
    def s(self):
        return self.basis.shape[1]

    @property
    def pencil(self):
        return self.quadruple.pencil

    @property
    def lambda_max_herm(self):
        if self.s == 0:
            return 0.0
        return float(np.linalg.eigvalsh(hermitian_part(self.gen))[-1])

    @property
    def regime(self):
        return regime_of(self.quadruple.p, self.quadruple.q)

    def boundary_maps(self):
        """``(gp basis, gm basis)``: boundary values in extension coordinates."""
        return self.quadruple.gp @ self.basis, self.quadruple.gm @ self.basis

    def to_coords(self, u):
        """Coordinates of ``u`` in the basis and the ``M``-norm of what is left over."""
        M = self.pencil.weight
        c = self.basis.conj().T @ (M @ u)
        r = u - self.basis @ c
        return c, float(np.sqrt(max(np.vdot(r, M @ r).real, 0.0)))

    def to_json(self):
        return {
            "phi": encode_matrix(self.phi.phi),
            "s": self.s,
            "lambda_max_herm": self.lambda_max_herm,
            "unitary": is_unitary_generator(self, cross_check=False),
            "regime": self.regime,
        }


def _dissipativity_tol(gen, tol):
    return tol * max(1.0, operator_norm(gen))


def build_extension(q, phi, tol=DEFAULT_TOL, certify=True):
    """Extension ``A_Phi`` with certified invariants.

    With ``certify=False`` (and ``Contraction.unchecked``) nothing is
    enforced; the report still says what holds.
    """
    if not isinstance(phi, Contraction):
        phi = Contraction(phi)
    n = q.pencil.n
    if phi.shape != (q.q, q.p):
        raise DimensionMismatch(f"phi must be {q.q}x{q.p}, got {phi.shape[0]}x{phi.shape[1]}")
    if certify and phi.sigma_max > 1 + phi.tol:
        raise NotAContraction(f"sigma_max(phi) = {phi.sigma_max:.12g} > 1")
    M = q.pencil.weight
    C = phi.phi @ q.gm - q.gp
    K = null_space(C, tol) if q.q else np.eye(n, dtype=np.complex128)
    basis = orthonormalize(K, M, tol)
    gen = compress(q.pencil, basis)
    s = basis.shape[1]
    lam = float(np.linalg.eigvalsh(hermitian_part(gen))[-1]) if s else 0.0
    sig = singular_values(np.eye(s) - gen)
    core = q.pencil.core
    scale_c = max(operator_norm(q.gm), operator_norm(q.gp), 1.0)
    checks = (
        check("dimension", float(abs(s - (n - q.q))), 0.0, f"s = {s}, n - q = {n - q.q}"),
        check("boundary_condition", operator_norm(C @ basis) / scale_c, 1e-9),
        check("dissipative", lam, _dissipativity_tol(gen, tol), f"lambda_max = {lam:.6g}"),
        check("contains_core", containment_residual(basis, core, M) if core.shape[1] else 0.0, 1e-8),
        # for dissipative B, |(I - B)x| >= |x|, so sigma_min(I - B) >= 1 certifies invertibility
        check("resolvent_invertible", (1.0 - sig[-1]) if s else 0.0, 1e-9,
              f"sigma_min(I - gen) = {sig[-1] if s else 1.0:.6g}"),
    )
    report = Report("extension", checks, {"s": s, "lambda_max_herm": lam})
    if certify and not report.passed:
        bad = ", ".join(f"{c.name} ({c.residual:.3g})" for c in report.failures())
        raise InvariantViolation(f"extension invariants failed: {bad}")
    return Extension(q, phi, basis, gen, report)


def _orth_columns(S, tol):
    if S.shape[1] == 0:
        return S
    u, sv, _ = np.linalg.svd(S, full_matrices=False)
    if sv[0] == 0:
        return u[:, :0]
    return u[:, : int(np.count_nonzero(sv > tol * sv[0]))]


def recover_contraction(q, S, tol=DEFAULT_TOL):
    """The contraction whose extension contains ``span(S)``.

    ``Phi`` is defined on ``gm S`` by ``Phi(gm w) = gp w`` and extended by
    zero on the orthogonal complement of ``gm S``.
    """
    pencil = q.pencil
    S = _orth_columns(as_matrix(np.asarray(S).reshape(pencil.n, -1), pencil.n), tol)
    core = pencil.core
    if core.shape[1] and containment_residual(S, core, pencil.weight) > 1e-8:
        raise CoreNotContained("span(S) does not contain the core")
    if S.shape[1]:
        rep = check_dissipative_on(pencil, S, tol)
        B = compress(pencil, orthonormalize(S, pencil.weight, tol))
        if rep.extra["lambda_max"] > _dissipativity_tol(B, tol):
            raise NotDissipativeOnS(f"Re<Aw, w> > 0 on span(S): lambda_max = {rep.extra['lambda_max']:.6g}")
    Xm = q.gm @ S
    Xp = q.gp @ S
    if q.p == 0 or S.shape[1] == 0:
        return Contraction(np.zeros((q.q, q.p)))
    u, sv, vh = np.linalg.svd(Xm, full_matrices=False)
    cutoff = tol * max(operator_norm(q.gm), 1.0)
    r = int(np.count_nonzero(sv > cutoff))
    # pseudo-inverse on range(gm S), zero on its orthogonal complement
    pinv = (vh[:r].conj().T / sv[:r]) @ u[:, :r].conj().T
    phi = Xp @ pinv
    mismatch = operator_norm(phi @ Xm - Xp) / max(operator_norm(q.gp), 1.0)
    if mismatch > 1e-8:
        raise NotDissipativeOnS(f"gp w is not a function of gm w on span(S) (residual {mismatch:.3g})")
    return Contraction(phi)


def is_unitary_generator(e, tol=DEFAULT_TOL, cross_check=True):
    """True iff the compressed generator is skew-Hermitian."""
    g = e.gen
    skew = operator_norm(g + g.conj().T) <= tol * max(1.0, operator_norm(g))
    if skew and cross_check and e.quadruple.p == e.quadruple.q:
        phi = recover_contraction(e.quadruple, e.basis, tol)
        if not phi.is_unitary:
            raise InvariantViolation("skew generator but recovered phi is not unitary")
    return bool(skew)


def extension_equal(e1, e2, tol=1e-8):
    """Same domain (largest principal angle below ``tol``)?"""
    if e1.pencil is not e2.pencil and e1.pencil.n != e2.pencil.n:
        return False
    if e1.s != e2.s:
        return False
    return subspace_distance(e1.basis, e2.basis, e1.pencil.weight) <= tol


def enumerate_extremes(q, tol=DEFAULT_TOL):
    """Classify the quadruple into the degenerate regimes.

    Returns a dict with the regime label, ``p``, ``q``, whether a unitary
    ``Phi`` can exist, and for the degenerate regimes the unique
    m-dissipative extension together with a label for its domain.
    """
    p_, q_ = q.p, q.q
    regime = regime_of(p_, q_)
    out = {
        "regime": regime,
        "p": p_,
        "q": q_,
        "unitary_possible": p_ == q_,
        "unique_extension": None,
        "unique_domain": None,
    }
    if regime == REGIME_GENERIC:
        return out
    e = build_extension(q, Contraction.zero(q_, p_), tol)
    out["unique_extension"] = e
    out["unique_domain"] = "closure" if regime == REGIME_GAMMA_MINUS_ZERO else "maximal"
    return out


def sample_contraction(rng, q, p):
    """Complex Gaussian ``q x p`` matrix with singular values clipped to ``[0, 1]``."""
    Z = rng.standard_normal((q, p)) + 1j * rng.standard_normal((q, p))
    if Z.size == 0:
        return Contraction(Z)
    u, s, vh = np.linalg.svd(Z, full_matrices=False)
    return Contraction((u * np.clip(s, 0.0, 1.0)) @ vh)


def sample_unitary(rng, p):
    Z = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
    u, _, vh = np.linalg.svd(Z)
    return Contraction(u @ vh)
