import math

import numpy as np
import pytest

from thermoflux.curvekit import thermo_majorizes
from thermoflux.errors import NotNormalized
from thermoflux.loccent import PureBipartite, entanglement_of_transition, schmidt_spectrum
from thermoflux.statekit import State, System

BELL = PureBipartite(np.eye(2) / math.sqrt(2))
PRODUCT = PureBipartite([[1, 0], [0, 0]])


def random_bipartite(rng, da, db, rank=None):
    x = rng.normal(size=(da, db)) + 1j * rng.normal(size=(da, db))
    if rank is not None:
        u, s, vh = np.linalg.svd(x)
        s[rank:] = 0
        x = (u[:, : len(s)] * s) @ vh[: len(s)]
    return PureBipartite(x / np.linalg.norm(x))


def test_schmidt_examples():
    assert schmidt_spectrum(BELL).allclose([0.5, 0.5])
    assert schmidt_spectrum(PRODUCT).allclose([1, 0])
    d = PureBipartite(np.diag([math.sqrt(0.7), math.sqrt(0.3)]))
    assert schmidt_spectrum(d).allclose([0.7, 0.3])


def test_schmidt_matches_svd():
    rng = np.random.default_rng(3)
    for da, db in ((2, 3), (3, 2), (4, 4), (1, 3)):
        psi = random_bipartite(rng, da, db)
        sv = np.linalg.svd(psi.amplitudes, compute_uv=False) ** 2
        got = schmidt_spectrum(psi)
        assert got.dim == min(da, db)
        assert np.allclose(got.populations, sv, atol=1e-12)


def test_normalization_checked():
    with pytest.raises(NotNormalized):
        PureBipartite([[1, 1], [0, 0]])


def test_entanglement_examples():
    assert entanglement_of_transition(BELL, PRODUCT) == 1.0
    assert entanglement_of_transition(PRODUCT, BELL) == -1.0
    assert entanglement_of_transition(BELL, BELL) == 0.0


@pytest.mark.parametrize("r,rp", [(1, 2), (2, 4), (3, 1), (4, 3)])
def test_flat_antisymmetry(r, rp):
    d = 4
    psi = PureBipartite(np.diag([1 / math.sqrt(r)] * r + [0] * (d - r)))
    phi = PureBipartite(np.diag([1 / math.sqrt(rp)] * rp + [0] * (d - rp)))
    e = entanglement_of_transition(psi, phi)
    assert e == pytest.approx(math.log2(r / rp), abs=1e-12)
    assert entanglement_of_transition(phi, psi) == pytest.approx(-e, abs=1e-12)


def test_nielsen_consistency():
    rng = np.random.default_rng(9)
    for _ in range(200):
        d = int(rng.integers(2, 5))
        a = rng.dirichlet(np.ones(d) * 0.7)
        b = rng.dirichlet(np.ones(d) * 0.7)
        psi, phi = PureBipartite(np.diag(np.sqrt(a))), PureBipartite(np.diag(np.sqrt(b)))
        e = entanglement_of_transition(psi, phi)
        assert (e >= 0) == thermo_majorizes(State(b), State(a), System.uniform(d))


def test_distillable_from_min_entropy():
    rng = np.random.default_rng(2)
    for _ in range(20):
        a = rng.dirichlet(np.ones(3))
        e = entanglement_of_transition(PureBipartite(np.diag(np.sqrt(a))), PureBipartite(np.diag([1, 0, 0])))
        assert e == pytest.approx(-math.log2(a.max()), abs=1e-12)
        assert e >= 0


def test_unequal_dimensions_padded():
    psi = PureBipartite(np.eye(3) / math.sqrt(3))
    phi = random_bipartite(np.random.default_rng(0), 2, 5)
    e = entanglement_of_transition(psi, phi)
    assert math.isfinite(e) and e >= 0
