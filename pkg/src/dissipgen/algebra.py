"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``;
real input is embedded with zero imaginary part. Tolerances are always
passed explicitly; ``DEFAULT_TOL`` is only the default value of those
arguments.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import kernels
from .errors import (
    NotHermitian,
    NotPositiveDefinite,
    Overflow,
    RankDeficientBasis,
    SingularMatrix,
)

DEFAULT_TOL = 1e-9
HERMITIAN_TOL = 1e-10
EXP_NORM_CAP = 1e4


def as_matrix(x, rows=None, cols=None):
    """Return ``x`` as a finite 2-D complex array, optionally checking its shape."""
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim == 1:
        a = a.reshape(1, -1) if rows == 1 else a.reshape(-1, 1)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {a.shape}")
    if rows is not None and a.shape[0] != rows:
        raise ValueError(f"expected {rows} rows, got {a.shape[0]}")
    if cols is not None and a.shape[1] != cols:
        raise ValueError(f"expected {cols} columns, got {a.shape[1]}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def as_vector(x, size=None):
    v = np.asarray(x, dtype=np.complex128).reshape(-1)
    if size is not None and v.shape[0] != size:
        raise ValueError(f"expected vector of length {size}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def hermitian_part(B):
    return 0.5 * (B + B.conj().T)


def is_hermitian(T, tol=HERMITIAN_TOL):
    scale = np.linalg.norm(T)
    return np.linalg.norm(T - T.conj().T) <= tol * max(scale, np.finfo(float).tiny)


def operator_norm(M):
    """Largest singular value; 0 for empty matrices."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def singular_values(M):
    M = np.asarray(M)
    if M.size == 0:
        return np.zeros(0)
    return np.linalg.svd(M, compute_uv=False)


def rank(M, tol=DEFAULT_TOL):
    """Numerical rank: singular values above ``tol * sigma_max``."""
    s = singular_values(M)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def _fix_phases(X):
    # make the first entry of maximal modulus in each column real positive
    X = X.copy()
    for j in range(X.shape[1]):
        col = X[:, j]
        mags = np.abs(col)
        top = mags.max() if mags.size else 0.0
        if top == 0.0:
            continue
        i = int(np.argmax(mags >= top * (1 - 1e-8)))
        X[:, j] = col * (abs(col[i]) / col[i])
    return X


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        if self.eigenvectors.shape[1] != self.eigenvalues.shape[0]:
            raise ValueError("eigenvector count does not match eigenvalue count")


def hermitian_geig(T, G, tol=HERMITIAN_TOL):
    """Solve ``T x = lam G x`` for Hermitian ``T`` and Hermitian positive-definite ``G``.

    The pencil is diagonally equilibrated, reduced with a Cholesky factor
    of ``G`` and handed to a Hermitian eigensolver. Eigenvalues come back
    ascending; eigenvectors are ``G``-orthonormal with a fixed phase
    convention so results are reproducible.
    """
    T = as_matrix(T)
    G = as_matrix(G)
    n = T.shape[0]
    if T.shape != (n, n) or G.shape != (n, n):
        raise ValueError("T and G must be square of equal size")
    if not is_hermitian(T, tol):
        raise NotHermitian("T is not Hermitian")
    if not is_hermitian(G, tol):
        raise NotHermitian("G is not Hermitian")
    if n == 0:
        return Spectrum(np.zeros(0), np.zeros((0, 0), dtype=np.complex128))
    T = hermitian_part(T)
    G = hermitian_part(G)
    dg = G.diagonal().real
    if np.any(dg <= 0):
        raise NotPositiveDefinite("G has a non-positive diagonal entry")
    d = 1.0 / np.sqrt(dg)
    Ts = T * np.outer(d, d)
    Gs = G * np.outer(d, d)
    try:
        L = sla.cholesky(Gs, lower=True)
    except sla.LinAlgError as exc:
        raise NotPositiveDefinite("G is not positive definite") from exc
    C = sla.solve_triangular(L, Ts, lower=True)
    C = sla.solve_triangular(L, C.conj().T, lower=True).conj().T
    lam, Y = np.linalg.eigh(hermitian_part(C))
    X = sla.solve_triangular(L.conj().T, Y, lower=False)
    X = d[:, None] * X
    return Spectrum(lam, _fix_phases(X))


def inverse_gram(G, U):
    """``U^H G^{-1} U`` for Hermitian positive-definite ``G``, via an equilibrated Cholesky factor."""
    G = hermitian_part(as_matrix(G))
    dg = G.diagonal().real
    if np.any(dg <= 0):
        raise NotPositiveDefinite("G has a non-positive diagonal entry")
    d = 1.0 / np.sqrt(dg)
    try:
        L = sla.cholesky(G * np.outer(d, d), lower=True)
    except sla.LinAlgError as exc:
        raise NotPositiveDefinite("G is not positive definite") from exc
    Z = sla.solve_triangular(L, d[:, None] * U, lower=True)
    return hermitian_part(Z.conj().T @ Z)


def null_space(M, tol=DEFAULT_TOL, scale=0.0):
    """Orthonormal basis of the numerical kernel of ``M``.

    Singular values at or below ``tol * max(sigma_max, scale)`` count as
    zero; ``scale`` lets a matrix that is pure round-off be recognised as
    zero. A zero (or zero-row) matrix has the whole space as kernel.
    """
    M = as_matrix(M)
    n = M.shape[1]
    if M.shape[0] == 0 or not np.any(M):
        return np.eye(n, dtype=np.complex128)
    _, s, vh = np.linalg.svd(M, full_matrices=True)
    r = int(np.count_nonzero(s > tol * max(s[0], scale)))
    return np.ascontiguousarray(vh[r:].conj().T)


def row_space(M, tol=DEFAULT_TOL):
    """Orthonormal basis (as columns) of the complement of ``null_space(M)``."""
    M = as_matrix(M)
    n = M.shape[1]
    if M.shape[0] == 0 or not np.any(M):
        return np.zeros((n, 0), dtype=np.complex128)
    _, s, vh = np.linalg.svd(M, full_matrices=True)
    r = int(np.count_nonzero(s > tol * s[0]))
    return np.ascontiguousarray(vh[:r].conj().T)


def solve(A, b):
    """Solve ``A x = b`` by LU with partial pivoting."""
    A = as_matrix(A)
    b = np.asarray(b, dtype=np.complex128)
    if A.shape[0] != A.shape[1]:
        raise ValueError("solve needs a square matrix")
    if A.shape[0] == 0:
        return b.copy()
    with warnings.catch_warnings():
        # singularity is reported below as SingularMatrix
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(A, check_finite=True)
    diag = np.abs(lu.diagonal())
    if diag.min() <= np.finfo(float).eps * max(diag.max(), 1.0) * A.shape[0]:
        raise SingularMatrix("matrix is numerically singular")
    return sla.lu_solve((lu, piv), b)


def orthonormalize(S, weight=None, tol=DEFAULT_TOL):
    """Columns of ``S`` made orthonormal in ``<x, y> = y^H W x`` (modified Gram-Schmidt).

    Raises :class:`RankDeficientBasis` when a column is (numerically) in the
    span of the previous ones.
    """
    S = as_matrix(S)
    n, k = S.shape
    W = np.eye(n, dtype=np.complex128) if weight is None else as_matrix(weight, n, n)
    if k == 0:
        return np.zeros((n, 0), dtype=np.complex128)
    Q, fail = kernels.mgs_weighted(np.ascontiguousarray(S), np.ascontiguousarray(W), tol)
    if fail >= 0:
        raise RankDeficientBasis(f"column {fail} is linearly dependent on earlier columns")
    return Q


def _euclidean(X, weight):
    if weight is None:
        return X
    L = sla.cholesky(hermitian_part(as_matrix(weight)), lower=True)
    return L.conj().T @ X


def _orth(X, tol):
    if X.shape[1] == 0:
        return X
    u, s, _ = np.linalg.svd(X, full_matrices=False)
    if s[0] == 0:
        return u[:, :0]
    return u[:, : int(np.count_nonzero(s > tol * s[0]))]


def subspace_distance(X, Y, weight=None, tol=DEFAULT_TOL):
    """Sine of the largest principal angle between ``span(X)`` and ``span(Y)``.

    Returns 1.0 when the spans have different dimensions.
    """
    X = _orth(_euclidean(as_matrix(X), weight), tol)
    Y = _orth(_euclidean(as_matrix(Y), weight), tol)
    if X.shape[1] != Y.shape[1]:
        return 1.0
    if X.shape[1] == 0:
        return 0.0
    return operator_norm(X - Y @ (Y.conj().T @ X))


def containment_residual(big, small, weight=None, tol=DEFAULT_TOL):
    """Sine of the largest angle between ``span(small)`` and ``span(big)``; 0 if contained."""
    small = _orth(_euclidean(as_matrix(small), weight), tol)
    if small.shape[1] == 0:
        return 0.0
    big = _orth(_euclidean(as_matrix(big), weight), tol)
    return operator_norm(small - big @ (big.conj().T @ small))


# Pade coefficients and thresholds for the scaling-and-squaring exponential
_PADE = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (
        17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0,
    ),
    13: (
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0, 129060195264000.0, 10559470521600.0,
        670442572800.0, 33522128640.0, 1323241920.0, 40840800.0, 960960.0,
        16380.0, 182.0, 1.0,
    ),
}
_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068e0,
    13: 5.371920351148152e0,
}


def _pade_uv(A, m):
    b = _PADE[m]
    n = A.shape[0]
    ident = np.eye(n, dtype=A.dtype)
    A2 = A @ A
    if m < 13:
        powers = [ident, A2]
        while len(powers) < (m + 1) // 2:
            powers.append(powers[-1] @ A2)
        U = sum(b[2 * k + 1] * powers[k] for k in range(len(powers)))
        V = sum(b[2 * k] * powers[k] for k in range(len(powers)))
        return A @ U, V
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
             + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
         + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident)
    return U, V


def matrix_exp(B, t=1.0):
    """``exp(t B)`` by scaling and squaring with diagonal Pade approximants.

    Raises :class:`Overflow` when the 1-norm of ``t B`` exceeds 1e4.
    """
    B = as_matrix(B)
    n = B.shape[0]
    if B.shape != (n, n):
        raise ValueError("matrix_exp needs a square matrix")
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    A = t * B
    if n == 0:
        return A.copy()
    nrm = np.linalg.norm(A, 1)
    if nrm > EXP_NORM_CAP:
        raise Overflow(f"|tB|_1 = {nrm:.3g} exceeds the cap {EXP_NORM_CAP:g}")
    for m in (3, 5, 7, 9):
        if nrm <= _THETA[m]:
            U, V = _pade_uv(A, m)
            return np.linalg.solve(V - U, V + U)
    s = max(0, int(np.ceil(np.log2(nrm / _THETA[13])))) if nrm > 0 else 0
    U, V = _pade_uv(A / 2.0**s, 13)
    R = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        R = R @ R
    return R
