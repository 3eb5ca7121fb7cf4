"""Pure-numpy implementations of the loop-bound kernels.

These are the reference versions; ``_ckernels.pyx`` mirrors them
line for line and the test-suite checks that both agree.
"""

import numpy as np


def mgs_weighted(S, W, drop_tol):
    """Two-pass modified Gram-Schmidt in the inner product ``<x, y> = y^H W x``.

    Returns ``(Q, fail)`` where ``fail`` is the index of the first column
    that collapsed below ``drop_tol`` times its original norm, or -1.
    """
    n, k = S.shape
    Q = np.zeros((n, k), dtype=np.complex128)
    WQ = np.zeros((n, k), dtype=np.complex128)
    for j in range(k):
        v = S[:, j].copy()
        norm0 = np.sqrt(max(np.vdot(v, W @ v).real, 0.0))
        if norm0 == 0.0:
            return Q, j
        for _ in range(2):
            for i in range(j):
                r = np.vdot(WQ[:, i], v)
                v -= r * Q[:, i]
        Wv = W @ v
        nrm = np.sqrt(max(np.vdot(v, Wv).real, 0.0))
        if nrm <= drop_tol * norm0:
            return Q, j
        Q[:, j] = v / nrm
        WQ[:, j] = Wv / nrm
    return Q, -1


def evolve(P, c0, steps, Fp, Fm):
    """Iterate ``c <- P c`` recording energies and boundary fluxes."""
    s = c0.shape[0]
    states = np.empty((steps + 1, s), dtype=np.complex128)
    states[0] = c0
    c = c0.copy()
    for k in range(steps):
        c = P @ c
        states[k + 1] = c
    energy = np.einsum("ij,ij->i", states.conj(), states).real
    fp = states @ Fp.T
    fm = states @ Fm.T
    flux_p = np.einsum("ij,ij->i", fp.conj(), fp).real
    flux_m = np.einsum("ij,ij->i", fm.conj(), fm).real
    return states, energy, flux_p, flux_m
