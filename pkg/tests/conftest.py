import pathlib

import numpy as np
import pytest

from dissipgen import InnerSpace, SkewPencil

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


def random_hpd(rng, n, spread=10.0):
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, _ = np.linalg.qr(Z)
    return (Q * np.geomspace(1.0, spread, n)) @ Q.conj().T


def random_pencil(rng, n, k0=None, weighted=True):
    """``A = M^{-1}(K + N)`` with ``K`` skew-Hermitian and ``N`` Hermitian, ``N core = 0``.

    Then ``T = 2N`` and the core lies in ``ker T`` by construction.
    """
    if k0 is None:
        k0 = int(rng.integers(0, n))
    M = random_hpd(rng, n) if weighted else np.eye(n)
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    K = 0.5 * (Z - Z.conj().T)
    C = rng.standard_normal((n, k0)) + 1j * rng.standard_normal((n, k0))
    Qc, _ = np.linalg.qr(C)
    P = np.eye(n) - Qc @ Qc.conj().T
    Y = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    N = P @ (0.5 * (Y + Y.conj().T)) @ P
    A = np.linalg.solve(M, K + N)
    return SkewPencil(InnerSpace(n, M), A, C)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def worked():
    return SkewPencil.from_arrays([[0, 1], [1, 0]])


ACCEPTANCE = []


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    ACCEPTANCE.append(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
