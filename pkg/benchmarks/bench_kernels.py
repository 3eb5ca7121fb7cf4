"""Time the compiled and numpy kernels side by side.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from dissipgen import _pykernels, wave_model

try:
    from dissipgen import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def _hpd(rng, n):
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return Z @ Z.conj().T + n * np.eye(n)


def cases():
    rng = np.random.default_rng(0)
    for n, k in ((32, 16), (128, 64), (256, 250)):
        W = _hpd(rng, n)
        S = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
        yield f"mgs n={n} k={k}", "mgs_weighted", (S, W, 1e-9)
    for n, steps in ((64, 2000), (128, 2000)):
        e = wave_model(n).extension(np.eye(2))
        rng2 = np.random.default_rng(1)
        P = np.linalg.qr(rng2.standard_normal((e.s, e.s)))[0].astype(complex)
        Fp, Fm = e.boundary_maps()
        c0 = rng2.standard_normal(e.s) + 0j
        yield f"evolve s={e.s} steps={steps}", "evolve", (P, c0, steps, Fp, Fm)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'case':28s} {'numpy [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}")
    for label, name, argv in cases():
        tp = min(timeit.repeat(lambda: getattr(_pykernels, name)(*argv), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{label:28s} {tp * 1e3:12.2f} {'n/a':>12s}")
            continue
        tc = min(timeit.repeat(lambda: getattr(_ckernels, name)(*argv), number=1, repeat=args.repeat))
        print(f"{label:28s} {tp * 1e3:12.2f} {tc * 1e3:12.2f} {tp / tc:8.2f}")


if __name__ == "__main__":
    main()
