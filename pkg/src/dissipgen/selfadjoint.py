"""Symmetric operators as skew pencils, and selfadjoint extensions.

A symmetric ``S`` becomes the skew pencil ``A = iS``. Unitary couplings
``Phi`` then give skew-Hermitian compressed generators, i.e. the
compression ``-i gen`` of ``S`` is Hermitian.

Orientation: couplings here map the minus boundary space to the plus
one, like everywhere else in the package. A coupling given the other
way round (plus to minus) is converted with :func:`phi_from_plus_to_minus`.
"""

from dataclasses import dataclass

import numpy as np

from .algebra import DEFAULT_TOL, as_matrix, hermitian_part, operator_norm
from .checks import Report, check
from .errors import DimensionMismatch, NotUnitary
from .extension import Contraction, build_extension
from .pencil import InnerSpace, SkewPencil
from .serialization import csv_text

HERMITIAN_CERT_TOL = 1e-9


@dataclass(frozen=True)
class SymmetricPencil:
    space: InnerSpace
    s_max: np.ndarray
    core: np.ndarray

    def __post_init__(self):
        n = self.space.dim
        object.__setattr__(self, "s_max", as_matrix(self.s_max, n, n))
        core = np.asarray(self.core, dtype=np.complex128)
        object.__setattr__(self, "core", as_matrix(core.reshape(n, -1) if core.size == 0 else core, n))

    @property
    def n(self):
        return self.space.dim

    @property
    def weight(self):
        return self.space.weight

    @classmethod
    def from_arrays(cls, s_max, core=None, weight=None):
        s = as_matrix(s_max)
        n = s.shape[0]
        return cls(InnerSpace(n, np.eye(n) if weight is None else weight), s,
                   np.zeros((n, 0)) if core is None else core)


def symmetric_boundary_form(sp):
    """``M S - S^H M``: the matrix of ``<Su, v> - <u, Sv>``."""
    MS = sp.weight @ sp.s_max
    return MS - MS.conj().T


def symmetry_residual(sp):
    """How far ``S`` is from symmetric on the core."""
    if sp.core.shape[1] == 0:
        return 0.0
    C = sp.core / np.linalg.norm(sp.core, axis=0)
    scale = max(1.0, operator_norm(sp.weight) * operator_norm(sp.s_max))
    return operator_norm(symmetric_boundary_form(sp) @ C) / scale


def to_skew(sp):
    """Skew pencil with ``a_max = i s_max``; same space and core."""
    return SkewPencil(sp.space, 1j * sp.s_max, sp.core)


def phi_from_plus_to_minus(phi_pm):
    """Convert a unitary coupling written plus-to-minus into our minus-to-plus form.

    ``Phi Gamma_+ = Gamma_-`` is the same condition as
    ``Phi^{-1} Gamma_- = Gamma_+`` and for unitary ``Phi`` the inverse is the
    adjoint.
    """
    c = Contraction(phi_pm)
    if not c.is_unitary:
        raise NotUnitary("only unitary couplings can be reoriented")
    return Contraction(c.phi.conj().T)


@dataclass(frozen=True)
class SelfadjointCertificate:
    hermitian_op: np.ndarray
    eigenvalues: np.ndarray
    report: Report


def selfadjoint_extension(q, phi, tol=DEFAULT_TOL):
    """Extension of ``iS`` for a unitary ``phi``, plus the Hermitian operator ``-i gen``.

    Eigenvalues are returned real, sorted descending.
    """
    if not isinstance(phi, Contraction):
        phi = Contraction(phi)
    if q.p != q.q:
        raise DimensionMismatch(f"selfadjoint extensions need p == q, got p={q.p}, q={q.q}")
    if phi.shape != (q.q, q.p):
        raise DimensionMismatch(f"phi must be {q.q}x{q.p}")
    if not phi.is_unitary:
        raise NotUnitary(f"phi is not unitary (sigma_min = {phi.sigma_min:.6g})")
    e = build_extension(q, phi, tol)
    That = -1j * e.gen
    herm_res = operator_norm(That - That.conj().T) / max(1.0, operator_norm(That))
    H = hermitian_part(That)
    lam = np.linalg.eigvalsh(H)[::-1] if H.size else np.zeros(0)
    ev = np.linalg.eigvals(That) if H.size else np.zeros(0, dtype=complex)
    radius = float(np.abs(ev).max()) if ev.size else 0.0
    imag = float(np.abs(ev.imag).max()) if ev.size else 0.0
    rep = Report("selfadjoint", (
        check("hermitian", herm_res, HERMITIAN_CERT_TOL),
        check("real_spectrum", imag, 1e-8 * max(radius, 1.0)),
    ), {"spectral_radius": radius})
    return e, SelfadjointCertificate(That, lam, rep)


def spectrum_csv(eigenvalues):
    rows = [[k, float(np.real(z)), float(np.imag(z))] for k, z in enumerate(eigenvalues)]
    return csv_text(["k", "re_lambda", "im_lambda"], rows)
