"""Entanglement of transition between bipartite pure states under LOCC."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .catalytic import hermitian_eig
from .curvekit import build_curve, l_at
from .errors import InvalidDensityMatrix, NotNormalized
from .statekit import NORM_TOL, State, System


@dataclass(frozen=True, eq=False)
class PureBipartite:
    """Amplitude matrix psi[i, j] of sum_ij psi_ij |i>|j>."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex)
        if a.ndim == 1:
            a = a[:, None]
        if a.ndim != 2 or a.size == 0:
            raise InvalidDensityMatrix("amplitudes must be a non-empty matrix")
        norm = float(np.sum(np.abs(a) ** 2))
        if abs(norm - 1) > NORM_TOL:
            raise NotNormalized(f"squared norm is {norm!r}")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def shape(self):
        return self.amplitudes.shape


def schmidt_spectrum(psi: PureBipartite) -> State:
    """Squared Schmidt coefficients, descending, length min(d_A, d_B)."""
    a = psi.amplitudes
    gram = a @ a.conj().T if a.shape[0] <= a.shape[1] else a.conj().T @ a
    lam = np.clip(hermitian_eig(gram).eigenvalues, 0.0, None)
    return State(lam / lam.sum())


def _pad(p: np.ndarray, n: int) -> np.ndarray:
    return np.concatenate((p, np.zeros(n - len(p))))


def entanglement_of_transition(psi: PureBipartite, phi: PureBipartite) -> float:
    """Ebits extracted (positive) or consumed (negative) going psi -> phi.

    Ratios are taken at the elbows of the initial state's spectrum.
    """
    a = schmidt_spectrum(psi).populations
    b = schmidt_spectrum(phi).populations
    n = max(len(a), len(b))
    a, b = State(_pad(a, n)), State(_pad(b, n))
    system = System.uniform(n)
    ca, cb = build_curve(a, system), build_curve(b, system)
    ys = np.unique(ca.ys[1 : ca.rank + 1])
    worst = float(np.max(l_at(cb, ys) / l_at(ca, ys)))
    return -math.log2(worst)
