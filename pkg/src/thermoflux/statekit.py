"""States, systems and the basic constructions on them.

Populations are kept as read-only numpy arrays indexed by energy level.
Energies and the inverse temperature are stored separately; every formula
only ever consumes the products ``beta * E_i``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BetaMismatch,
    DimensionMismatch,
    EmptyVector,
    InvalidDensityMatrix,
    InvalidRank,
    InvalidSystem,
    NegativePopulation,
    NotNormalized,
)

NORM_TOL = 1e-9
CLAMP_TOL = 1e-12
# relative width inside which two beta-order keys count as tied
TIE_RTOL = 1e-12


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class State:
    """Classical population vector over energy levels."""

    populations: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "populations", _frozen(self.populations))

    @property
    def dim(self) -> int:
        return len(self.populations)

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.populations))

    def __len__(self):
        return self.dim

    def __iter__(self):
        return iter(self.populations)

    def allclose(self, other, atol=NORM_TOL) -> bool:
        other = other.populations if isinstance(other, State) else np.asarray(other)
        return self.dim == len(other) and bool(np.allclose(self.populations, other, rtol=0, atol=atol))


@dataclass(frozen=True, eq=False)
class System:
    """Energy levels plus inverse temperature."""

    energies: np.ndarray
    beta: float = 1.0

    def __post_init__(self):
        energies = _frozen(self.energies)
        if energies.ndim != 1 or len(energies) == 0:
            raise InvalidSystem("energies must be a non-empty vector")
        if not np.all(np.isfinite(energies)):
            raise InvalidSystem("energies must be finite")
        beta = float(self.beta)
        if not (beta > 0 and np.isfinite(beta)):
            raise InvalidSystem(f"beta must be positive and finite, got {self.beta}")
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "beta", beta)

    @classmethod
    def uniform(cls, n: int, beta: float = 1.0) -> "System":
        """Trivial Hamiltonian: the Noisy Operations setting."""
        return cls(np.zeros(n), beta)

    @property
    def dim(self) -> int:
        return len(self.energies)

    @property
    def is_noisy(self) -> bool:
        """True when all levels are degenerate (Noisy Operations)."""
        return bool(np.all(self.energies == self.energies[0]))

    @property
    def weights(self) -> np.ndarray:
        """Unnormalized Gibbs weights exp(-beta E_i)."""
        return np.exp(-self.beta * self.energies)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise InvalidDensityMatrix("density matrix must be square and non-empty")
        if np.max(np.abs(m - m.conj().T)) > NORM_TOL:
            raise InvalidDensityMatrix("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > NORM_TOL:
            raise InvalidDensityMatrix("density matrix trace differs from 1")
        if np.min(np.linalg.eigvalsh((m + m.conj().T) / 2)) < -NORM_TOL:
            raise InvalidDensityMatrix("density matrix is not positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @classmethod
    def from_state(cls, state: State) -> "DensityMatrix":
        return cls(np.diag(state.populations))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def is_diagonal(self, tol=NORM_TOL) -> bool:
        off = self.entries - np.diag(np.diag(self.entries))
        return bool(np.max(np.abs(off)) <= tol)


@dataclass(frozen=True, eq=False)
class BetaOrder:
    perm: tuple

    def __iter__(self):
        return iter(self.perm)

    def __len__(self):
        return len(self.perm)

    def __getitem__(self, k):
        return self.perm[k]


def validate_state(populations) -> State:
    p = np.array(populations, dtype=float).ravel()
    if p.size == 0:
        raise EmptyVector("population vector is empty")
    if not np.all(np.isfinite(p)):
        raise NotNormalized("populations must be finite")
    if np.any(p < -CLAMP_TOL):
        raise NegativePopulation(f"negative population {p.min()!r}")
    p = np.where(p < 0, 0.0, p)
    total = p.sum()
    if abs(total - 1) > NORM_TOL:
        raise NotNormalized(f"populations sum to {total!r}")
    return State(p / total)


def as_state(x) -> State:
    return x if isinstance(x, State) else validate_state(x)


def _check_dims(system: System, *states):
    for s in states:
        if s.dim != system.dim:
            raise DimensionMismatch(f"state has dimension {s.dim}, system has {system.dim}")


def partition_function(system: System) -> float:
    return float(system.weights.sum())


def gibbs_state(system: System) -> State:
    w = system.weights
    return State(w / w.sum())


def sharp_state(d: int, j: int) -> State:
    """Flat state with ``j`` entries ``1/j`` followed by ``d - j`` zeros."""
    if not (1 <= j <= d):
        raise InvalidRank(f"need 1 <= j <= d, got d={d}, j={j}")
    p = np.zeros(d)
    p[:j] = 1.0 / j
    return State(p)


def sharp_nonuniformity(d: int, j: int) -> float:
    """Nonuniformity carried by ``sharp_state(d, j)`` in bits."""
    if not (1 <= j <= d):
        raise InvalidRank(f"need 1 <= j <= d, got d={d}, j={j}")
    return float(np.log2(d / j))


def beta_keys(state: State, system: System) -> np.ndarray:
    _check_dims(system, state)
    # shifting energies by a constant rescales all keys equally
    e = system.energies - system.energies.min()
    return state.populations * np.exp(system.beta * e)


def beta_order(state: State, system: System) -> BetaOrder:
    """Indices sorted by eta_i exp(beta E_i), descending; ties keep index order."""
    keys = beta_keys(state, system)
    order = sorted(range(len(keys)), key=lambda i: -keys[i])
    out = []
    k = 0
    while k < len(order):
        head = keys[order[k]]
        m = k + 1
        while m < len(order) and abs(keys[order[m]] - head) <= TIE_RTOL * max(abs(head), 1e-300):
            m += 1
        out.extend(sorted(order[k:m]))
        k = m
    return BetaOrder(tuple(out))


def decohere(rho: DensityMatrix, system: System) -> State:
    """Full dephasing in the computational (energy) basis."""
    if rho.dim != system.dim:
        raise DimensionMismatch(f"density matrix has dimension {rho.dim}, system has {system.dim}")
    return validate_state(np.real(np.diag(rho.entries)))


def tensor(a, b):
    """Tensor product of two (State, System) pairs."""
    (sa, ya), (sb, yb) = a, b
    _check_dims(ya, sa)
    _check_dims(yb, sb)
    if abs(ya.beta - yb.beta) > 1e-12 * max(ya.beta, yb.beta):
        raise BetaMismatch(f"beta {ya.beta} != {yb.beta}")
    pops = np.outer(sa.populations, sb.populations).ravel()
    energies = np.add.outer(ya.energies, yb.energies).ravel()
    return State(pops), System(energies, ya.beta)
