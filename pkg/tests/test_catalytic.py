import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermoflux.catalytic import (
    AlphaGrid,
    catalytic_report,
    free_coherence,
    free_energy_alpha,
    heralded_bound_cto,
    heralded_coherence_bound,
    hermitian_eig,
    renyi_divergence,
)
from thermoflux.errors import NotHermitian
from thermoflux.oracle import corpus
from thermoflux.statekit import DensityMatrix, State, System, gibbs_state
from thermoflux.transition import max_transition_probability

LN2 = math.log(2)
TWO = System([0.0, LN2])
PLUS = np.full((2, 2), 0.5)
ALPHAS7 = (0, 0.25, 0.5, 1, 2, 4, math.inf)


def rand_density(rng, n):
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    m = x @ x.conj().T
    return m / np.trace(m).real


# -- grid -------------------------------------------------------------------

def test_grid_contents():
    g = AlphaGrid.default()
    for a in (0, 0.5, 1, 2, math.inf):
        assert a in g.values
    assert list(g.values) == sorted(g.values)
    assert len(AlphaGrid.refined()) > len(g)
    with pytest.raises(ValueError):
        AlphaGrid(())
    with pytest.raises(ValueError):
        AlphaGrid((-1.0,))


# -- classical divergences --------------------------------------------------------

def test_renyi_examples():
    p, q = [0.5, 0.5], [2 / 3, 1 / 3]
    assert renyi_divergence(p, q, 2) == pytest.approx(math.log(9 / 8))
    assert renyi_divergence(p, q, math.inf) == pytest.approx(math.log(1.5))
    for a in ALPHAS7:
        assert renyi_divergence(q, q, a) == pytest.approx(0, abs=1e-15)


def test_renyi_limits():
    p, q = State([0.7, 0.2, 0.1]), State([0.3, 0.3, 0.4])
    kl = float(np.sum(p.populations * np.log(p.populations / q.populations)))
    assert renyi_divergence(p, q, 1) == pytest.approx(kl)
    assert renyi_divergence(p, q, 1 + 1e-6) == pytest.approx(kl, abs=1e-5)
    assert renyi_divergence(p, q, 1e4) == pytest.approx(renyi_divergence(p, q, math.inf), abs=1e-3)
    assert renyi_divergence(p, q, 1e-9) == pytest.approx(renyi_divergence(p, q, 0), abs=1e-6)


def test_renyi_support():
    assert renyi_divergence([0.5, 0.5], [1, 0], 1) == math.inf
    assert renyi_divergence([0.5, 0.5], [1, 0], 2) == math.inf
    assert renyi_divergence([0.5, 0.5], [1, 0], 0.5) == pytest.approx(-2 * math.log(math.sqrt(0.5)))
    assert renyi_divergence([1, 0], [0, 1], 0.5) == math.inf
    assert renyi_divergence([1, 0], [0.5, 0.5], 0) == pytest.approx(math.log(2))


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32))
def test_renyi_monotone_in_alpha(n, seed):
    rng = np.random.default_rng(seed)
    p, q = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
    vals = [renyi_divergence(p, q, a) for a in ALPHAS7]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("alpha", [0.5, 1, 2])
def test_data_processing(alpha):
    rng = np.random.default_rng(int(alpha * 10))
    for _ in range(100):
        n = 4
        g = rng.random((n, n))
        g /= g.sum(axis=0)
        p, q = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
        assert renyi_divergence(g @ p, g @ q, alpha) <= renyi_divergence(p, q, alpha) + 1e-12


def test_free_energy_examples():
    sysm = System([0.0, 0.3, 1.7])
    logz = math.log(np.exp(-sysm.energies).sum())
    for a in ALPHAS7:
        assert free_energy_alpha(gibbs_state(sysm), sysm, a) == pytest.approx(-logz)
    assert free_energy_alpha([0, 1], TWO, math.inf) == pytest.approx(LN2)
    rho = State([0.5, 0.2, 0.3])
    p = rho.populations
    f1 = float(p @ sysm.energies + np.sum(p * np.log(p)))
    assert free_energy_alpha(rho, sysm, 1) == pytest.approx(f1)


def test_free_energy_minimized_by_gibbs():
    rng = np.random.default_rng(4)
    sysm = System([0.0, 0.5, 2.0])
    fmin = free_energy_alpha(gibbs_state(sysm), sysm, 1)
    for _ in range(100):
        r = rng.dirichlet(np.ones(3))
        for a in ALPHAS7[1:]:
            assert free_energy_alpha(r, sysm, a) >= free_energy_alpha(gibbs_state(sysm), sysm, a) - 1e-12
        assert free_energy_alpha(r, sysm, 1) > fmin


# -- CTO bound ----------------------------------------------------------------

def test_cto_examples():
    r = State([0.2, 0.8])
    assert heralded_bound_cto(r, r, TWO) == 1.0
    assert heralded_bound_cto(r, gibbs_state(TWO), TWO) == 1.0
    b = heralded_bound_cto(gibbs_state(TWO), [0, 1], TWO)
    assert 1 / 3 - 1e-9 <= b <= 1
    # alpha = infinity alone gives the same value for a pure target
    assert heralded_bound_cto(gibbs_state(TWO), [0, 1], TWO, AlphaGrid((math.inf,))) == pytest.approx(b, abs=1e-9)


def test_cto_dominates_pstar():
    for inst in corpus(60, seed=13):
        b = heralded_bound_cto(inst.rho, inst.sigma, inst.system)
        assert b >= max_transition_probability(inst.rho, inst.sigma, inst.system) - 1e-9


# -- eigensolver ----------------------------------------------------------------

def test_eig_diagonal():
    e = hermitian_eig(np.diag([0.2, 0.5, 0.3]))
    assert np.allclose(e.eigenvalues, [0.5, 0.3, 0.2])
    assert np.allclose(np.abs(e.eigenvectors), np.eye(3)[:, [1, 2, 0]])


def test_eig_plus():
    e = hermitian_eig(PLUS)
    assert np.allclose(e.eigenvalues, [1, 0], atol=1e-14)


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eig([[1, 2], [0, 1]])
    with pytest.raises(NotHermitian):
        hermitian_eig(np.ones((2, 3)))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**32))
def test_eig_random(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    a = x + x.conj().T
    e = hermitian_eig(a)
    assert np.max(np.abs(e.reconstruct() - a)) < 1e-10
    assert np.allclose(e.eigenvectors.conj().T @ e.eigenvectors, np.eye(n), atol=1e-10)
    assert np.allclose(e.eigenvalues, np.linalg.eigvalsh(a)[::-1], atol=1e-10)


def test_eig_degenerate():
    e = hermitian_eig(np.eye(4))
    assert np.allclose(e.eigenvalues, 1)
    e = hermitian_eig(DensityMatrix(np.full((3, 3), 1 / 3)))
    assert np.allclose(e.eigenvalues, [1, 0, 0], atol=1e-14)


# -- free coherence -----------------------------------------------------------

def test_coherence_examples():
    for a in ALPHAS7:
        assert free_coherence(np.diag([0.3, 0.7]), TWO, a) == 0.0
        assert free_coherence(PLUS, TWO, a) == pytest.approx(LN2, abs=1e-12)


def test_coherence_relative_entropy():
    rng = np.random.default_rng(6)
    m = rand_density(rng, 3)
    w = np.linalg.eigvalsh(m)
    d = np.real(np.diag(m))
    expect = -np.sum(d * np.log(d)) + np.sum(w * np.log(w))
    assert free_coherence(m, None, 1) == pytest.approx(expect, abs=1e-10)


def test_coherence_continuity():
    rng = np.random.default_rng(12)
    for _ in range(10):
        m = rand_density(rng, 3)
        a1 = free_coherence(m, None, 1)
        assert free_coherence(m, None, 1 - 1e-4) == pytest.approx(a1, abs=1e-3)
        assert free_coherence(m, None, 1 + 1e-4) == pytest.approx(a1, abs=1e-3)


def test_coherence_rank_deficient():
    # pure state with a zero diagonal entry stays on the support
    v = np.array([np.sqrt(0.3), np.sqrt(0.7), 0])
    m = np.outer(v, v)
    for a in ALPHAS7:
        assert math.isfinite(free_coherence(m, None, a))
    assert free_coherence(m, None, math.inf) == pytest.approx(LN2, abs=1e-10)


def test_coherence_bound_examples():
    no = System.uniform(2)
    assert heralded_coherence_bound(np.diag([0.5, 0.5]), np.diag([0.9, 0.1]), no) == 1.0
    assert heralded_coherence_bound(np.diag([0.5, 0.5]), PLUS, no) < 1.0
    m = rand_density(np.random.default_rng(1), 2)
    assert heralded_coherence_bound(m, m, no) == 1.0


def test_report_combines():
    rep = catalytic_report(np.diag([0.5, 0.5]), PLUS, System.uniform(2), AlphaGrid((0.5, 1, 2, math.inf)))
    assert rep.combined == min(rep.cto_bound, rep.coherence_bound)
