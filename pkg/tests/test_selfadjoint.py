import numpy as np
import pytest

from dissipgen import (
    SymmetricPencil,
    quadruple_from_form,
    second_derivative_model,
    selfadjoint_extension,
    synth_pencil,
    to_skew,
)
from dissipgen.errors import DimensionMismatch, NotUnitary
from dissipgen.pencil import boundary_form, pencil_invariants
from dissipgen.selfadjoint import (
    phi_from_plus_to_minus,
    spectrum_csv,
    symmetric_boundary_form,
    symmetry_residual,
)


def test_zero_operator():
    sp = SymmetricPencil.from_arrays(np.zeros((3, 3)))
    assert not np.any(to_skew(sp).a_max)


def test_hermitian_s_gives_zero_form():
    rng = np.random.default_rng(0)
    Z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    sp = SymmetricPencil.from_arrays(Z + Z.conj().T, core=np.eye(4))
    assert symmetry_residual(sp) < 1e-15
    p = to_skew(sp)
    assert np.linalg.norm(boundary_form(p)) < 1e-13
    q = quadruple_from_form(p)
    assert q.p == q.q == 0


@pytest.mark.parametrize("n", [8, 33])
def test_sign_bookkeeping(n):
    m = second_derivative_model(n)
    sp = m.symmetric
    assert symmetry_residual(sp) < 1e-12
    assert np.allclose(boundary_form(m.pencil), 1j * symmetric_boundary_form(sp), atol=1e-10)
    assert pencil_invariants(m.pencil).passed
    # boundary form of iS expressed through the model maps
    q = m.quadruple
    T = boundary_form(m.pencil)
    assert np.allclose(q.gp.conj().T @ q.gp - q.gm.conj().T @ q.gm, T, atol=1e-10 * np.abs(T).max())


def _errors(n, phi, exact):
    m = second_derivative_model(n)
    _, cert = selfadjoint_extension(m.quadruple, phi)
    assert cert.report.passed
    lam = cert.eigenvalues[: len(exact)]
    return np.abs(lam - exact)


K = np.arange(1, 4)


def test_dirichlet_spectrum():
    exact = -(K * np.pi) ** 2
    e64, e128 = _errors(64, -np.eye(2), exact), _errors(128, -np.eye(2), exact)
    assert np.all(e64 / np.abs(exact) < 0.01)
    assert np.all((3.5 <= e64 / e128) & (e64 / e128 <= 4.5))


def test_neumann_spectrum():
    exact = np.concatenate([[0.0], -(K * np.pi) ** 2])
    e64, e128 = _errors(64, np.eye(2), exact), _errors(128, np.eye(2), exact)
    assert e64[0] < 1e-8 and e128[0] < 1e-8
    assert np.all(e64[1:] / np.abs(exact[1:]) < 0.01)
    r = e64[1:] / e128[1:]
    assert np.all((3.5 <= r) & (r <= 4.5))


def test_periodic_spectrum_doubly_degenerate():
    swap = np.array([[0, 1], [1, 0]])
    exact = np.concatenate([[0.0], np.repeat(-(2 * K * np.pi) ** 2, 2)])
    m = second_derivative_model(64)
    _, cert = selfadjoint_extension(m.quadruple, swap)
    lam = cert.eigenvalues[:7]
    assert abs(lam[0]) < 1e-8
    # boundary closures split each pair slightly; the split shrinks with h
    split64 = np.abs(lam[1::2] - lam[2::2]) / np.abs(lam[1::2])
    _, cert128 = selfadjoint_extension(second_derivative_model(128).quadruple, swap)
    l128 = cert128.eigenvalues[:7]
    split128 = np.abs(l128[1::2] - l128[2::2]) / np.abs(l128[1::2])
    assert np.all(split64 < 1e-5) and np.all(split128 < split64)
    assert np.all(np.abs(lam[1:] - exact[1:]) / np.abs(exact[1:]) < 0.01)
    e64, e128 = _errors(64, swap, exact), _errors(128, swap, exact)
    r = e64[1:] / e128[1:]
    assert np.all((3.5 <= r) & (r <= 4.5))


def test_strict_contraction_is_not_selfadjoint():
    m = second_derivative_model(32)
    with pytest.raises(NotUnitary):
        selfadjoint_extension(m.quadruple, 0.5 * np.eye(2))
    e = m.extension(0.5 * np.eye(2))
    assert np.linalg.eigvals(e.gen).real.max() <= -1e-6


def test_dimension_mismatch():
    q = quadruple_from_form(synth_pencil(1, 2, 1, seed=0))
    with pytest.raises(DimensionMismatch):
        selfadjoint_extension(q, np.eye(2))


def test_orientation_adapter():
    m = second_derivative_model(16)
    rng = np.random.default_rng(2)
    U, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    # U written plus-to-minus means U gp = gm, i.e. U^H gm = gp
    phi = phi_from_plus_to_minus(U)
    e, _ = selfadjoint_extension(m.quadruple, phi)
    q = m.quadruple
    assert np.abs(U @ q.gp @ e.basis - q.gm @ e.basis).max() < 1e-9 * np.abs(q.gp).max()
    with pytest.raises(NotUnitary):
        phi_from_plus_to_minus(0.5 * np.eye(2))


def test_spectrum_csv():
    text = spectrum_csv([-1.0, -4.0 + 0.5j])
    assert text == "k,re_lambda,im_lambda\n0,-1.0,0.0\n1,-4.0,0.5\n"
