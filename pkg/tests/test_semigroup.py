import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dissipgen import (
    build_extension,
    energy_rate_audit,
    propagate_cn,
    propagate_exact,
    quadruple_from_form,
    synth_pencil,
)
from dissipgen.algebra import matrix_exp
from dissipgen.errors import NotInDomain, SingularStep
from dissipgen.extension import sample_contraction, sample_unitary
from dissipgen.semigroup import cn_step_matrix, propagator

seeds = st.integers(0, 2**32 - 1)


@pytest.fixture
def absorbing(worked):
    return build_extension(quadruple_from_form(worked), [[0.0]])


@pytest.fixture
def conservative(worked):
    return build_extension(quadruple_from_form(worked), [[1.0]])


def test_zero_data(absorbing):
    tr = propagate_exact(absorbing, np.zeros(2), np.linspace(0, 1, 5))
    assert not np.any(tr.states) and not np.any(tr.energies)


def test_worked_decay(absorbing):
    t = np.linspace(0, 3, 7)
    tr = propagate_exact(absorbing, np.array([1, -1]) / np.sqrt(2), t)
    assert np.allclose(tr.energies, np.exp(-2 * t), rtol=1e-13)
    audit = energy_rate_audit(absorbing, tr)
    assert audit.passed
    assert np.allclose(audit.extra["lhs"], -2 * np.exp(-2 * t))
    assert np.allclose(tr.flux_minus, 2 * np.exp(-2 * t)) and np.allclose(tr.flux_plus, 0, atol=1e-30)


def test_worked_constant(conservative):
    tr = propagate_exact(conservative, np.array([1.0, 0.0]), np.linspace(0, 5, 11))
    assert np.allclose(tr.ambient, [1, 0], atol=1e-15)


def test_not_in_domain(absorbing):
    with pytest.raises(NotInDomain):
        propagate_exact(absorbing, np.array([1.0, 0.0]), [0, 1])
    with pytest.raises(NotInDomain):
        propagate_cn(absorbing, np.array([1.0, 0.0]), 0.1, 3)


def test_nonuniform_grid_matches_uniform(absorbing):
    u0 = np.array([1, -1]) / np.sqrt(2)
    a = propagate_exact(absorbing, u0, [0.0, 0.1, 0.5, 2.0])
    assert np.allclose(a.energies, np.exp(-2 * np.array([0.0, 0.1, 0.5, 2.0])), rtol=1e-13)
    b = propagate_exact(absorbing, u0, [0.5, 1.0])
    assert b.energies[0] == pytest.approx(np.exp(-1.0))
    with pytest.raises(ValueError):
        propagate_exact(absorbing, u0, [1.0, 0.5])


def test_cn_scalar_cayley(absorbing):
    u0 = np.array([1, -1]) / np.sqrt(2)
    tr = propagate_cn(absorbing, u0, 0.1, 5)
    ratio = np.sqrt(tr.energies[1:] / tr.energies[:-1])
    assert np.allclose(ratio, 0.95 / 1.05, rtol=1e-14)


def test_cn_identity_for_zero_generator(conservative):
    tr = propagate_cn(conservative, np.array([1.0, 0.0]), 0.3, 4)
    assert np.allclose(tr.states, tr.states[0])


def test_cn_singular_step():
    with pytest.raises(SingularStep):
        cn_step_matrix(np.array([[2.0]]), 1.0)


def test_backward_needs_unitary(absorbing, conservative):
    with pytest.raises(ValueError):
        propagator(absorbing, -1.0)
    assert np.allclose(propagator(conservative, -1.0), [[1.0]])


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_contraction_property(seed):
    rng = np.random.default_rng(seed)
    q = quadruple_from_form(synth_pencil(2, 2, 2, seed=seed % 991))
    e = build_extension(q, sample_contraction(rng, 2, 2))
    for t in (0.0, 0.5, 3.0, 20.0):
        assert np.linalg.norm(matrix_exp(e.gen, t), 2) <= 1 + 1e-9
    u0 = e.basis @ (rng.standard_normal(e.s) + 1j * rng.standard_normal(e.s))
    tr = propagate_exact(e, u0, np.linspace(0, 5, 26))
    assert np.all(np.diff(tr.energies) <= 1e-9 * tr.energies[0])
    assert energy_rate_audit(e, tr).passed


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_unitary_group_round_trip(seed):
    rng = np.random.default_rng(seed)
    q = quadruple_from_form(synth_pencil(1, 2, 2, seed=seed % 991))
    e = build_extension(q, sample_unitary(rng, 2))
    u0 = e.basis @ (rng.standard_normal(e.s) + 1j * rng.standard_normal(e.s))
    tr = propagate_exact(e, u0, np.linspace(0, 4, 9))
    assert np.allclose(tr.energies, tr.energies[0], rtol=1e-10)
    c = propagator(e, -4.0) @ tr.states[-1]
    assert np.linalg.norm(e.basis @ c - u0) < 1e-8 * max(1, np.linalg.norm(u0))
    cn = propagate_cn(e, u0, 0.37, 12)
    assert np.allclose(cn.energies, cn.energies[0], rtol=1e-12)


def test_cn_second_order():
    rng = np.random.default_rng(9)
    q = quadruple_from_form(synth_pencil(2, 2, 2, seed=9))
    e = build_extension(q, sample_contraction(rng, 2, 2))
    u0 = e.basis @ rng.standard_normal(e.s)
    T = 1.0
    exact = propagate_exact(e, u0, [0.0, T]).states[-1]
    errs = []
    for steps in (20, 40, 80):
        errs.append(np.linalg.norm(propagate_cn(e, u0, T / steps, steps).states[-1] - exact))
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all((3.5 <= ratios) & (ratios <= 4.5))


def test_csv_layout(absorbing):
    tr = propagate_exact(absorbing, np.array([1, -1]) / np.sqrt(2), [0.0, 1.0])
    lines = tr.to_csv().split("\n")
    assert lines[0] == "t,energy,flux_plus,flux_minus,u0_re,u0_im,u1_re,u1_im"
    assert len(lines) == 4 and lines[-1] == ""
    row = [float(x) for x in lines[2].split(",")]
    assert row[0] == 1.0 and row[1] == pytest.approx(np.exp(-2.0))
    assert row[4] == pytest.approx(-row[6]) and row[5] == row[7] == 0.0
