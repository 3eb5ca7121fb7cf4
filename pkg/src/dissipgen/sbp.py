"""Second-order summation-by-parts operators and the three model problems.

With ``H = diag(h/2, h, ..., h, h/2)`` the first-derivative operator obeys
``H d1 + d1^T H = e_N e_N^T - e_0 e_0^T`` exactly, and the second
derivative ``H d2 = -m_pos + e_N d_b - e_0 d_a``. Every boundary form
below is therefore a finite sum of endpoint terms, and the model
quadruples satisfy their Green identities to round-off.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GridTooSmall
from .extension import build_extension
from .pencil import InnerSpace, SkewPencil
from .quadruple import SQRT1_2, BoundaryQuadruple
from .selfadjoint import SymmetricPencil, to_skew
from .serialization import decode_matrix, encode_matrix

KINDS = ("transport", "second-derivative", "wave")


@dataclass(frozen=True)
class SbpOperator:
    n: int
    a: float
    b: float
    h_norm: np.ndarray
    d1: np.ndarray
    m_pos: np.ndarray
    d_a: np.ndarray
    d_b: np.ndarray

    @property
    def h(self):
        return (self.b - self.a) / (self.n - 1)

    @property
    def x(self):
        return np.linspace(self.a, self.b, self.n)

    @property
    def d2(self):
        """``H^{-1} (-m_pos + e_N d_b - e_0 d_a)``."""
        B = -self.m_pos.copy()
        B[-1] += self.d_b
        B[0] -= self.d_a
        return B / np.diag(self.h_norm)[:, None]


def make_sbp(n, order=2, a=0.0, b=1.0):
    if order != 2:
        raise ValueError("only order-2 SBP operators are available")
    n = int(n)
    if n < 4:
        raise GridTooSmall(f"need at least 4 grid points, got {n}")
    if not b > a:
        raise ValueError("need b > a")
    h = (b - a) / (n - 1)
    w = np.full(n, h)
    w[0] = w[-1] = h / 2
    Q = np.zeros((n, n))
    i = np.arange(1, n - 1)
    Q[i, i - 1] = -0.5
    Q[i, i + 1] = 0.5
    Q[0, :2] = (-0.5, 0.5)
    Q[-1, -2:] = (-0.5, 0.5)
    d1 = Q / w[:, None]
    K = 2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    K[0, 0] = K[-1, -1] = 1.0
    d_a = np.zeros(n)
    d_b = np.zeros(n)
    d_a[:3] = (-1.5, 2.0, -0.5)
    d_b[-3:] = (0.5, -2.0, 1.5)
    return SbpOperator(n, float(a), float(b), np.diag(w), d1, K / h, d_a / h, d_b / h)


@dataclass(frozen=True)
class SbpModel:
    kind: str
    n: int
    m: int
    a: float
    b: float
    sbp: SbpOperator
    pencil: SkewPencil
    quadruple: BoundaryQuadruple
    symmetric: SymmetricPencil = None

    @property
    def components(self):
        return 2 if self.kind == "wave" else self.m

    def field(self, values):
        """State vector from per-component grid functions (one row per component)."""
        v = np.asarray(values, dtype=np.complex128).reshape(self.components, self.n)
        if self.kind == "transport":
            return v.T.reshape(-1)
        return v.reshape(-1)

    def extension(self, phi, tol=1e-9):
        return build_extension(self.quadruple, phi, tol)

    def to_json(self, phi=None):
        d = {"kind": self.kind, "n": self.n, "m": self.m, "a": self.a, "b": self.b}
        if phi is not None:
            d["phi"] = encode_matrix(np.asarray(phi))
        return d


def _interior(n, lo, hi):
    """Unit vectors ``e_lo, ..., e_{n-1-hi}``."""
    return np.eye(n)[:, lo:n - hi]


def transport_model(n, m=1, a=0.0, b=1.0):
    """``u' `` on grid functions with values in ``C^m``; ``gm = u(a)``, ``gp = u(b)``."""
    op = make_sbp(n, 2, a, b)
    m = int(m)
    if m < 1:
        raise ValueError("block dimension m must be at least 1")
    I = np.eye(m)
    A = np.kron(op.d1, I)
    W = np.kron(op.h_norm, I)
    core = np.kron(_interior(n, 1, 1), I)
    pencil = SkewPencil(InnerSpace(n * m, W), A, core)
    E = np.eye(n)
    gm = np.kron(E[:1], I)
    gp = np.kron(E[-1:], I)
    q = BoundaryQuadruple(pencil, gm, gp, "model-explicit")
    return SbpModel("transport", n, m, op.a, op.b, op, pencil, q)


def second_derivative_model(n, a=0.0, b=1.0):
    """``A = i d2`` with boundary data built from ``u(a), u(b), u'(a), u'(b)``.

    ``gm = (u(a) + i u'(a), u(b) - i u'(b)) / sqrt2`` and
    ``gp = (u(a) - i u'(a), u(b) + i u'(b)) / sqrt2``. Then ``Phi = -I`` is
    Dirichlet, ``Phi = I`` Neumann and the swap periodic.
    """
    n = int(n)
    if n < 6:
        raise GridTooSmall(f"need at least 6 grid points, got {n}")
    op = make_sbp(n, 2, a, b)
    core = _interior(n, 3, 3)
    sp = SymmetricPencil(InnerSpace(n, op.h_norm), op.d2, core)
    pencil = to_skew(sp)
    e0 = np.zeros(n)
    eN = np.zeros(n)
    e0[0] = 1.0
    eN[-1] = 1.0
    gm = SQRT1_2 * np.vstack([e0 + 1j * op.d_a, eN - 1j * op.d_b])
    gp = SQRT1_2 * np.vstack([e0 - 1j * op.d_a, eN + 1j * op.d_b])
    q = BoundaryQuadruple(pencil, gm, gp, "model-explicit")
    return SbpModel("second-derivative", n, 1, op.a, op.b, op, pencil, q, sp)


def wave_model(n, a=0.0, b=1.0):
    """First-order wave system ``(u1, u2)' = (u2', u1')``.

    ``gp = (u1(a)/2 - u2(a), u1(b)/2 + u2(b))`` and
    ``gm = (u1(a)/2 + u2(a), u1(b)/2 - u2(b))``.
    """
    op = make_sbp(n, 2, a, b)
    Z = np.zeros((n, n))
    A = np.block([[Z, op.d1], [op.d1, Z]])
    W = np.block([[op.h_norm, Z], [Z, op.h_norm]])
    C = _interior(n, 1, 1)
    Zc = np.zeros_like(C)
    core = np.block([[C, Zc], [Zc, C]])
    pencil = SkewPencil(InnerSpace(2 * n, W), A, core)
    gp = np.zeros((2, 2 * n))
    gm = np.zeros((2, 2 * n))
    ia, ib = 0, n - 1
    gp[0, ia], gp[0, n + ia] = 0.5, -1.0
    gp[1, ib], gp[1, n + ib] = 0.5, 1.0
    gm[0, ia], gm[0, n + ia] = 0.5, 1.0
    gm[1, ib], gm[1, n + ib] = 0.5, -1.0
    q = BoundaryQuadruple(pencil, gm, gp, "model-explicit")
    return SbpModel("wave", n, 1, op.a, op.b, op, pencil, q)


def build_model(kind, n, m=1, a=0.0, b=1.0):
    if kind == "transport":
        return transport_model(n, m, a, b)
    if m != 1:
        raise ValueError(f"{kind} model has scalar states (m = 1)")
    if kind == "second-derivative":
        return second_derivative_model(n, a, b)
    if kind == "wave":
        return wave_model(n, a, b)
    raise ValueError(f"unknown model kind {kind!r}; expected one of {KINDS}")


def model_from_json(d):
    """Decode ``{kind, n, m, a, b, phi}``; returns ``(model, phi or None)``."""
    extra = set(d) - {"kind", "n", "m", "a", "b", "phi"}
    if extra:
        raise ValueError(f"unknown model keys {sorted(extra)}")
    model = build_model(d["kind"], int(d["n"]), int(d.get("m", 1)),
                        float(d.get("a", 0.0)), float(d.get("b", 1.0)))
    phi = None
    if "phi" in d:
        q = model.quadruple
        phi = decode_matrix(d["phi"], q.q, q.p)
    return model, phi
