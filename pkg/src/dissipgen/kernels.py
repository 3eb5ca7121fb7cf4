"""Backend selection for the loop-bound kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback. Setting ``DISSIPGEN_PURE=1`` forces the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("DISSIPGEN_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels


def mgs_weighted(S, W, drop_tol):
    return _impl.mgs_weighted(S, W, float(drop_tol))


def evolve(P, c0, steps, Fp, Fm):
    return _impl.evolve(P, c0, int(steps), Fp, Fm)
