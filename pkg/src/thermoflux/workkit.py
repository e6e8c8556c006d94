"""Work of transition, probability bounds and the probability/work tradeoff.

Under a trivial Hamiltonian (Noisy Operations) work is counted in bits of
nonuniformity; otherwise it is the dimensionless ``beta * W``.  Positive
values are extractable, negative values must be supplied.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curvekit import build_curve, l_at
from .errors import NumericalFailure, OutOfRange
from .statekit import State, System, as_state, gibbs_state, tensor
from .transition import _diag, _same_dims, max_transition_probability

LN2 = math.log(2)


@dataclass(frozen=True)
class WorkValue:
    value: float
    mode: str  # "NO" (bits) or "TO" (beta * W, nats)

    @property
    def nats(self) -> float:
        return self.value * LN2 if self.mode == "NO" else self.value

    @property
    def bits(self) -> float:
        return self.value if self.mode == "NO" else self.value / LN2

    def __float__(self):
        return float(self.value)


def _mode(system: System, mode=None) -> str:
    if mode is None:
        return "NO" if system.is_noisy else "TO"
    if mode not in ("NO", "TO"):
        raise ValueError(f"unknown mode {mode!r}")
    return mode


def horizontal_ratios(rho, sigma, system: System) -> np.ndarray:
    """L_y(rho) / L_y(sigma) for y at the elbows of sigma (up to its rank)."""
    cr = build_curve(rho, system)
    cs = build_curve(sigma, system)
    ys = np.unique(cs.ys[1 : cs.rank + 1])
    return l_at(cr, ys) / l_at(cs, ys)


def work_of_transition(rho, sigma, system: System, mode=None) -> WorkValue:
    rho, _ = _diag(rho, system)
    sigma, _ = _diag(sigma, system)
    _same_dims(system, rho, sigma)
    mode = _mode(system, mode)
    worst = float(np.max(horizontal_ratios(rho, sigma, system)))
    if worst <= 0:
        return WorkValue(math.inf, mode)
    if not math.isfinite(worst):
        return WorkValue(-math.inf, mode)
    return WorkValue(-math.log2(worst) if mode == "NO" else -math.log(worst), mode)


def nonuniformity_of_formation(state) -> float:
    """-log2(eta_max * n), in bits."""
    p = as_state(state).populations
    return float(-math.log2(p.max() * len(p)))


def pstar_bounds(rho, sigma, system: System) -> tuple[float, float]:
    """Bracket on p* from the work of transition in both directions."""
    rho, _ = _diag(rho, system)
    sigma, _ = _diag(sigma, system)
    forward = work_of_transition(rho, sigma, system).nats
    backward = work_of_transition(sigma, rho, system).nats
    lower = min(1.0, math.exp(forward)) if forward > -math.inf else 0.0
    upper = min(1.0, math.exp(-backward)) if backward < math.inf else 0.0
    return lower, upper


def work_qubit(w_nats: float, beta: float) -> System:
    return System([0.0, abs(w_nats) / beta], beta)


def with_work(rho, sigma, system: System, w) -> tuple[State, State, System]:
    """Append a two-level work system carrying |w| (bits in NO mode).

    ``w <= 0`` puts rho on the excited level (work supplied); ``w > 0`` puts
    sigma there (work extracted).  The other state sits in the ground level.
    """
    w_nats = w * LN2 if system.is_noisy else w
    ws = work_qubit(w_nats, system.beta)
    ground, excited = State([1.0, 0.0]), State([0.0, 1.0])
    if w <= 0:
        r, big = tensor((rho, system), (excited, ws))
        s, _ = tensor((sigma, system), (ground, ws))
    else:
        r, big = tensor((rho, system), (ground, ws))
        s, _ = tensor((sigma, system), (excited, ws))
    return r, s, big


def pstar_with_work(rho, sigma, system: System, beta_w: float) -> float:
    """p* when ``beta_w`` of work is extracted (> 0) or supplied (< 0).

    In NO mode ``beta_w`` is read as bits.
    """
    rho, _ = _diag(rho, system)
    sigma, _ = _diag(sigma, system)
    _same_dims(system, rho, sigma)
    r, s, big = with_work(rho, sigma, system, beta_w)
    return max_transition_probability(r, s, big)


def tradeoff_curve(rho, sigma, system: System, ws) -> np.ndarray:
    return np.array([pstar_with_work(rho, sigma, system, w) for w in ws])


def _qubit_work_bits(eta1: float, zeta1: float) -> float:
    """Nonuniformity of transition between two qubit spectra."""
    eta2, zeta2 = 1 - eta1, 1 - zeta1
    rank_r = 1 + (eta2 > 0)
    rank_s = 1 + (zeta2 > 0)
    worst = rank_r / rank_s
    if zeta2 > 0:
        lr = zeta1 / eta1 if zeta1 <= eta1 else 1 + (zeta1 - eta1) / eta2
        worst = max(worst, lr)
    return -math.log2(worst)


def qubit_tradeoff_closed_form(eta1: float, zeta1: float, w_bits: float) -> float:
    """p*(W) for qubits under Noisy Operations, W in bits."""
    if not (0.5 <= eta1 <= 1 and 0.5 <= zeta1 <= 1):
        raise OutOfRange("largest eigenvalues must lie in [1/2, 1]")
    p0 = min(eta1 / zeta1, 1.0)
    w_rs = _qubit_work_bits(eta1, zeta1)
    if w_bits <= w_rs:
        return 1.0
    t = 2.0 ** (-w_bits)
    if eta1 < zeta1:
        if w_bits <= 0:
            return (2 - t) * p0 + (t - 1) / zeta1
        return p0 * t
    if eta1 == 0.5:
        return t
    crossover = math.log2((eta1 - 2 * zeta1 + 2 * eta1 * zeta1) / (2 * eta1 * zeta1 - zeta1))
    if w_bits <= crossover:
        return (2 * eta1 - 1) + 2 * (1 - eta1) * t
    return eta1 / zeta1 * t


def jarzynski_upper_check(sigma, system: System, tol: float = 1e-9) -> tuple[float, float]:
    """p*(thermal -> sigma) and its product with exp(beta W_{sigma -> thermal})."""
    sigma, _ = _diag(sigma, system)
    tau = gibbs_state(system)
    p = max_transition_probability(tau, sigma, system)
    w = work_of_transition(sigma, tau, system).nats
    product = p * math.exp(w)
    if product > 1 + tol:
        raise NumericalFailure(f"p* exp(beta W) = {product!r} exceeds 1")
    return p, product
