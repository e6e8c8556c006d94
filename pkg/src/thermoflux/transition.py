"""Maximum transition probability and the protocol that achieves it."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curvekit import build_curve, v_at
from .errors import BetaMismatch, DimensionMismatch, OutOfRange
from .statekit import DensityMatrix, State, System, as_state, decohere

RATIO_RTOL = 1e-12


def _diag(x, system: System) -> tuple[State, bool]:
    """Return the block-diagonal part of ``x`` and whether anything was dropped."""
    if isinstance(x, DensityMatrix):
        return decohere(x, system), not x.is_diagonal()
    return as_state(x), False


def _same_dims(system, *states):
    for s in states:
        if s.dim != system.dim:
            raise DimensionMismatch(f"state has dimension {s.dim}, system has {system.dim}")


def elbow_ratios(rho, sigma, system: System) -> np.ndarray:
    """Vertical ratios V_x(rho) / V_x(sigma) at the elbows of sigma."""
    cr = build_curve(rho, system)
    cs = build_curve(sigma, system)
    return v_at(cr, cs.xs[1:]) / cs.ys[1:]


def max_transition_probability(rho, sigma, system: System) -> float:
    """Largest p with rho -> p sigma + (1 - p) X.

    Coherent inputs are dephased first; for a coherent ``sigma`` the value is
    then only an upper bound (see ``transition_report``).
    """
    rho, _ = _diag(rho, system)
    sigma, _ = _diag(sigma, system)
    _same_dims(system, rho, sigma)
    p = float(np.min(elbow_ratios(rho, sigma, system)))
    return min(max(p, 0.0), 1.0)


@dataclass(frozen=True)
class TransitionReport:
    pstar: float
    achievable: bool
    convertible: bool


def transition_report(rho, sigma, system: System) -> TransitionReport:
    rho_d, _ = _diag(rho, system)
    sigma_d, coherent = _diag(sigma, system)
    p = max_transition_probability(rho_d, sigma_d, system)
    return TransitionReport(pstar=p, achievable=not coherent, convertible=p >= 1.0 - 1e-9 and not coherent)


def flatten_to_target_order(rho, sigma, system: System) -> State:
    """Block-diagonal state whose curve joins rho's curve at sigma's elbows."""
    rho, sigma = as_state(rho), as_state(sigma)
    _same_dims(system, rho, sigma)
    cr = build_curve(rho, system)
    cs = build_curve(sigma, system)
    heights = v_at(cr, cs.xs)
    heights[-1] = 1.0
    pops = np.zeros(system.dim)
    pops[list(cs.order)] = np.maximum(np.diff(heights), 0.0)
    return State(pops / pops.sum())


@dataclass(frozen=True, eq=False)
class Protocol:
    """Certificate that ``pstar`` is achievable.

    All vectors are indexed by energy level.  ``rho_sigma`` is rho flattened
    onto sigma's elbows; ``rho_prime`` is what the block transformations
    make of it, i.e. ``pstar * sigma + (1 - pstar) * x_state``.
    ``boundaries`` index positions in sigma's beta-order (``order``).
    """

    pstar: float
    boundaries: tuple
    ratios: tuple
    x_state: State
    m_diag: np.ndarray
    rho_sigma: State
    rho_prime: State
    order: tuple

    @property
    def blocks(self):
        idx = np.array(self.order)
        return [idx[a:b] for a, b in zip(self.boundaries[:-1], self.boundaries[1:])]


def build_protocol(rho, sigma, system: System) -> Protocol:
    rho, sigma = as_state(rho), as_state(sigma)
    _same_dims(system, rho, sigma)
    n = system.dim
    cs = build_curve(sigma, system)
    order = np.array(cs.order)
    rho_sigma = flatten_to_target_order(rho, sigma, system)

    # cumulative heights in sigma's order: rho's curve and sigma's own
    a = v_at(build_curve(rho, system), cs.xs)
    a[-1] = 1.0
    b = cs.ys
    pstar = min(max(float(np.min(a[1:] / b[1:])), 0.0), 1.0)

    bounds = [0]
    ratios = []
    while bounds[-1] < n:
        prev = bounds[-1]
        num = a[prev + 1 :] - a[prev]
        den = b[prev + 1 :] - b[prev]
        if not np.any(den > 1e-15):
            # sigma carries no weight past here: the rest goes to X untouched
            ratios.append(math.inf)
            bounds.append(n)
            break
        live = den > 1e-15
        r = np.full(len(den), np.inf)
        r[live] = num[live] / den[live]
        rmin = float(np.min(r))
        hit = np.nonzero(r <= rmin * (1 + RATIO_RTOL) + RATIO_RTOL)[0]
        last = int(hit[-1]) if len(hit) else len(r) - 1
        ratios.append(max(rmin, pstar))
        bounds.append(prev + 1 + last)

    m = np.zeros(n)
    x = np.zeros(n)
    prime = np.zeros(n)
    for (lo, hi), r in zip(zip(bounds[:-1], bounds[1:]), ratios):
        lv = order[lo:hi]
        if math.isinf(r):
            prime[lv] = rho_sigma.populations[lv]
            m[lv] = 0.0
            if pstar < 1:
                x[lv] = rho_sigma.populations[lv] / (1 - pstar)
        else:
            prime[lv] = r * sigma.populations[lv]
            m[lv] = min(pstar / r, 1.0) if r > 0 else 1.0
            if pstar < 1:
                x[lv] = (r - pstar) / (1 - pstar) * sigma.populations[lv]
    if pstar >= 1:
        x = sigma.populations.copy()
    else:
        x = np.maximum(x, 0.0)
    m.setflags(write=False)
    return Protocol(
        pstar=pstar,
        boundaries=tuple(bounds),
        ratios=tuple(ratios),
        x_state=State(x),
        m_diag=m,
        rho_sigma=rho_sigma,
        rho_prime=State(prime),
        order=tuple(cs.order),
    )


def measurement_unitary(m_diag) -> np.ndarray:
    """Real orthogonal [[sqrt M, sqrt(1-M)], [sqrt(1-M), -sqrt M]] on system + ancilla."""
    m = np.asarray(m_diag, dtype=float)
    if np.any(m < -1e-12) or np.any(m > 1 + 1e-12):
        raise OutOfRange("measurement entries must lie in [0, 1]")
    m = np.clip(m, 0.0, 1.0)
    s, c = np.diag(np.sqrt(m)), np.diag(np.sqrt(1 - m))
    return np.block([[s, c], [c, -s]])


def apply_measurement(m_diag, populations) -> np.ndarray:
    """Unnormalized post-measurement populations for the success outcome."""
    return np.asarray(m_diag) * np.asarray(populations)


def binary_entropy(p: float) -> float:
    """h(p) in nats."""
    if not 0 <= p <= 1:
        raise OutOfRange(f"probability {p} outside [0, 1]")
    return -sum(t * math.log(t) for t in (p, 1 - p) if t > 0)


def erasure_cost(p: float, repeated: bool = False) -> float:
    """Cost of erasing the measurement record, in units of kT."""
    if not 0 <= p <= 1:
        raise OutOfRange(f"probability {p} outside [0, 1]")
    return binary_entropy(p) if repeated else math.log(2)


def embed_changing_hamiltonian(rho, sys1: System, sigma, sys2: System):
    """Map a transition between Hamiltonians onto a single switched system."""
    rho, sigma = as_state(rho), as_state(sigma)
    if abs(sys1.beta - sys2.beta) > 1e-12 * max(sys1.beta, sys2.beta):
        raise BetaMismatch(f"beta {sys1.beta} != {sys2.beta}")
    _same_dims(sys1, rho)
    _same_dims(sys2, sigma)
    n1, n2 = sys1.dim, sys2.dim
    r = np.concatenate((rho.populations, np.zeros(n2)))
    s = np.concatenate((np.zeros(n1), sigma.populations))
    system = System(np.concatenate((sys1.energies, sys2.energies)), sys1.beta)
    return State(r), State(s), system
