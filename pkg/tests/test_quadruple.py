import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from dissipgen import (
    BoundaryQuadruple,
    SkewPencil,
    boundary_form,
    from_triple,
    graph_gram,
    interpolate,
    quadruple_from_deficiency,
    quadruple_from_form,
    quadruple_iso,
    synth_pencil,
    to_triple,
    verify_quadruple,
)
from dissipgen.errors import (
    DecompositionFails,
    GreenIdentityViolated,
    NoTriple,
    SignatureMismatch,
    SurjectivityViolated,
)
from dissipgen.quadruple import (
    closure_report,
    deficiency_spaces,
    green_residual,
    quadruple_from_json,
    quadruple_to_json,
    triple_form_residual,
)

from conftest import random_pencil

seeds = st.integers(0, 2**32 - 1)


def test_worked_form_quadruple(worked):
    q = quadruple_from_form(worked)
    assert np.allclose(q.gm, [[1, -1]], atol=1e-15)
    assert np.allclose(q.gp, [[1, 1]], atol=1e-15)
    assert q.meta == "form-spectral"
    assert verify_quadruple(q, tol=1e-12).passed


def test_worked_interpolation(worked):
    q = quadruple_from_form(worked)
    assert np.allclose(interpolate(q, [1], [1]), [1, 0], atol=1e-14)
    assert np.allclose(interpolate(q, [-1], [1]), [0, 1], atol=1e-14)


def test_worked_triple(worked):
    G1, G2 = to_triple(quadruple_from_form(worked))
    assert np.allclose(G1, [[0, np.sqrt(2)]])
    assert np.allclose(G2, [[np.sqrt(2), 0]])


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 14))
def test_form_quadruple_axioms(seed, n):
    p = random_pencil(np.random.default_rng(seed), n)
    q = quadruple_from_form(p)
    assert verify_quadruple(q, tol=1e-9).passed
    assert closure_report(q).passed


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(2, 10))
def test_form_quadruple_gains_are_generalized_eigenvalues(seed, n):
    # oracle: the nonzero eigenvalues of T x = lam G x from LAPACK's dense solver
    p = random_pencil(np.random.default_rng(seed), n)
    lam = sla.eigh(boundary_form(p), graph_gram(p), eigvals_only=True)
    lam = lam[np.abs(lam) > 1e-9 * np.abs(lam).max()]
    q = quadruple_from_form(p)
    G = graph_gram(p)
    Ginv = np.linalg.inv(G)
    # gp^H gp = sum lam G x x^H G, so the gains are eigenvalues of gp G^{-1} gp^H
    gains_p = np.linalg.eigvalsh(q.gp @ Ginv @ q.gp.conj().T) if q.q else np.zeros(0)
    gains_m = np.linalg.eigvalsh(q.gm @ Ginv @ q.gm.conj().T) if q.p else np.zeros(0)
    assert q.q == np.count_nonzero(lam > 0) and q.p == np.count_nonzero(lam < 0)
    assert np.allclose(np.sort(gains_p), np.sort(lam[lam > 0]), rtol=1e-6, atol=1e-9)
    assert np.allclose(np.sort(gains_m), np.sort(-lam[lam < 0]), rtol=1e-6, atol=1e-9)


@pytest.mark.parametrize("k0,kp,km", [(1, 2, 2), (0, 1, 3), (3, 0, 2), (2, 2, 0), (2, 0, 0)])
def test_synth_pencil_structure(k0, kp, km):
    p = synth_pencil(k0, kp, km, seed=11)
    K0, Kp, Km = deficiency_spaces(p)
    assert (K0.shape[1], Kp.shape[1], Km.shape[1]) == (k0, kp, km)
    qf = quadruple_from_form(p)
    qd = quadruple_from_deficiency(p)
    assert (qf.p, qf.q) == (qd.p, qd.q) == (km, kp)
    assert verify_quadruple(qd, tol=1e-10).passed
    iso = quadruple_iso(qf, qd)
    assert iso.residual < 1e-8


def test_synth_is_seeded():
    a, b = synth_pencil(1, 1, 1, seed=7), synth_pencil(1, 1, 1, seed=7)
    assert np.array_equal(a.a_max, b.a_max)
    assert not np.array_equal(a.a_max, synth_pencil(1, 1, 1, seed=8).a_max)


def test_deficiency_fails_on_generic_pencil():
    p = random_pencil(np.random.default_rng(3), 6, k0=1)
    with pytest.raises(DecompositionFails):
        quadruple_from_deficiency(p)


def test_broken_quadruples_are_reported(worked):
    bad = BoundaryQuadruple(worked, [[1, -1]], [[0, 0]])
    rep = verify_quadruple(bad)
    assert not rep["individual_surjectivity"].passed
    assert not rep["green_identity"].passed
    dup = BoundaryQuadruple(worked, [[1, 1]], [[1, 1]])
    assert not verify_quadruple(dup)["joint_surjectivity"].passed
    with pytest.raises(SurjectivityViolated):
        interpolate(dup, [1], [0])


def test_iso_rejects_wrong_signature(worked):
    q = quadruple_from_form(worked)
    swapped = BoundaryQuadruple(worked, q.gp, q.gm)
    with pytest.raises(SignatureMismatch):
        quadruple_iso(q, swapped)


def test_iso_between_rotated_quadruples():
    p = synth_pencil(1, 2, 2, seed=4)
    q = quadruple_from_form(p)
    rng = np.random.default_rng(0)
    U, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    V, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    q2 = BoundaryQuadruple(p, U @ q.gm, V @ q.gp)
    iso = quadruple_iso(q, q2)
    assert np.allclose(iso.psi, np.block([[U, np.zeros((2, 2))], [np.zeros((2, 2)), V]]), atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(0, 3), st.integers(1, 3))
def test_triple_round_trip(seed, k0, k):
    p = synth_pencil(k0, k, k, seed=seed)
    q = quadruple_from_form(p)
    G1, G2 = to_triple(q)
    assert triple_form_residual(p, G1, G2) < 1e-10
    back = from_triple(p, G1, G2)
    assert np.allclose(back.gm, q.gm, atol=1e-10) and np.allclose(back.gp, q.gp, atol=1e-10)


def test_to_triple_needs_equal_dimensions():
    with pytest.raises(NoTriple):
        to_triple(quadruple_from_form(synth_pencil(1, 2, 1, seed=0)))


def test_from_triple_rejects_wrong_form(worked):
    with pytest.raises(GreenIdentityViolated):
        from_triple(worked, [[1, 0]], [[1, 0]])


def test_empty_boundary(worked):
    p = SkewPencil.from_arrays([[0, 1], [-1, 0]])
    q = quadruple_from_form(p)
    assert q.p == q.q == 0
    assert verify_quadruple(q).passed
    assert np.allclose(interpolate(q, [], []), 0)


def test_json_round_trip(worked):
    q = quadruple_from_form(worked)
    d = quadruple_to_json(q)
    back = quadruple_from_json(d, worked)
    assert np.array_equal(back.gm, q.gm) and back.meta == "form-spectral"
    with pytest.raises(ValueError):
        quadruple_from_json({**d, "meta": "nonsense"}, worked)


def test_green_residual_scale_free(worked):
    q = quadruple_from_form(worked)
    assert green_residual(q) < 1e-15
