"""Brute-force cross-checks: a dense simplex solver over Gibbs-stochastic
matrices, dense curve sampling, and a seeded random instance corpus.

A diagonal state can be mapped to another by Thermal Operations exactly when
some column-stochastic matrix fixing the Gibbs distribution does it, so both
feasibility and the optimal probability are small linear programs.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .curvekit import build_curve, v_at
from .errors import DimensionMismatch, NumericalFailure
from .statekit import State, System, as_state, gibbs_state
from .workkit import WorkValue, with_work

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-9
MAX_PIVOTS = 1_000_000
WORK_RANGE = 50.0
WORK_TOL = 1e-8
DEFAULT_SEED = 12345

MASK64 = (1 << 64) - 1


class SplitMix64:
    """64-bit splitmix generator; the reference stream for the test corpus."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def below(self, n: int) -> int:
        return int(self.uniform() * n)

    def dirichlet(self, n: int) -> np.ndarray:
        e = np.array([-math.log1p(-self.uniform()) for _ in range(n)])
        # every draw is 0 only with probability 2^-53n; fall back to flat
        return e / e.sum() if e.sum() > 0 else np.full(n, 1.0 / n)


def env_seed() -> int:
    raw = os.environ.get("THERMOFLUX_SEED")
    return DEFAULT_SEED if raw in (None, "") else int(raw)


# -- linear programming -----------------------------------------------------

class LpStatus(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True, eq=False)
class LpProblem:
    """Minimize (or maximize) c.x subject to A x = b and per-variable bounds.

    ``bounds`` defaults to ``[0, inf)`` for every variable.
    """

    objective: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray
    bounds: tuple = None
    maximize: bool = False

    def __post_init__(self):
        c = np.array(self.objective, dtype=float).ravel()
        a = np.array(self.a_eq, dtype=float)
        b = np.array(self.b_eq, dtype=float).ravel()
        if a.size == 0:
            a = np.zeros((0, len(c)))
        if a.ndim != 2 or a.shape[1] != len(c) or a.shape[0] != len(b):
            raise DimensionMismatch(f"A is {a.shape}, c has {len(c)}, b has {len(b)}")
        bounds = self.bounds
        if bounds is None:
            bounds = [(0.0, math.inf)] * len(c)
        bounds = tuple((float(lo), float(hi)) for lo, hi in bounds)
        if len(bounds) != len(c):
            raise DimensionMismatch(f"{len(bounds)} bounds for {len(c)} variables")
        for lo, hi in bounds:
            if math.isnan(lo) or math.isnan(hi) or lo == math.inf or hi == -math.inf:
                raise ValueError(f"bad bound ({lo}, {hi})")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "a_eq", a)
        object.__setattr__(self, "b_eq", b)
        object.__setattr__(self, "bounds", bounds)


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: LpStatus
    values: np.ndarray = field(default_factory=lambda: np.zeros(0))
    objective_value: float = math.nan
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == LpStatus.OPTIMAL


class _Tableau:
    def __init__(self, a, b):
        self.t = np.hstack((a, b[:, None]))
        self.basis = []
        self.pivots = 0

    def pivot(self, row, col):
        self.pivots += 1
        if self.pivots > MAX_PIVOTS:
            raise NumericalFailure(f"simplex exceeded {MAX_PIVOTS} pivots")
        t = self.t
        t[row] /= t[row, col]
        for i in range(t.shape[0]):
            if i != row and t[i, col] != 0.0:
                t[i] -= t[i, col] * t[row]
        self.basis[row] = col

    def run(self, cost, allowed):
        """Bland's-rule simplex on the current basis; returns False if unbounded."""
        t = self.t
        while True:
            cb = cost[self.basis]
            reduced = cost - cb @ t[:, :-1]
            entering = next((j for j in allowed if reduced[j] < -PIVOT_TOL), None)
            if entering is None:
                return True
            col = t[:, entering]
            rows = np.nonzero(col > PIVOT_TOL)[0]
            if len(rows) == 0:
                return False
            ratios = t[rows, -1] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
            leave = min(ties, key=lambda i: self.basis[i])
            self.pivot(int(leave), entering)


def _standardize(prob: LpProblem):
    """Rewrite as min c'y, A'y = b', y >= 0 with x = offset + T y."""
    n = len(prob.objective)
    cols, offset = [], np.zeros(n)
    ub_rows = []
    for j, (lo, hi) in enumerate(prob.bounds):
        e = np.zeros(n)
        if lo > -math.inf:
            offset[j] = lo
            e[j] = 1.0
            cols.append(e)
            if hi < math.inf:
                ub_rows.append((len(cols) - 1, hi - lo))
        elif hi < math.inf:
            offset[j] = hi
            e[j] = -1.0
            cols.append(e)
        else:
            e[j] = 1.0
            cols.append(e)
            cols.append(-e)
    tmat = np.array(cols).T if cols else np.zeros((n, 0))
    a = prob.a_eq @ tmat
    b = prob.b_eq - prob.a_eq @ offset
    # one slack column per finite upper bound
    k = len(ub_rows)
    a = np.hstack((a, np.zeros((a.shape[0], k))))
    extra = np.zeros((k, a.shape[1]))
    for r, (col, width) in enumerate(ub_rows):
        extra[r, col] = 1.0
        extra[r, tmat.shape[1] + r] = 1.0
    a = np.vstack((a, extra))
    b = np.concatenate((b, [w for _, w in ub_rows]))
    tmat = np.hstack((tmat, np.zeros((n, k))))
    sign = -1.0 if prob.maximize else 1.0
    c = sign * (prob.objective @ tmat)
    return a, b, c, tmat, offset


def simplex_solve(prob: LpProblem) -> LpSolution:
    """Dense two-phase simplex with Bland's rule."""
    for lo, hi in prob.bounds:
        if lo > hi:
            return LpSolution(LpStatus.INFEASIBLE)
    a, b, c, tmat, offset = _standardize(prob)
    m, n = a.shape
    flip = b < 0
    a[flip] *= -1
    b[flip] *= -1

    # phase 1: one artificial per row
    tab = _Tableau(np.hstack((a, np.eye(m))), b)
    tab.basis = list(range(n, n + m))
    cost1 = np.concatenate((np.zeros(n), np.ones(m)))
    tab.run(cost1, range(n + m))
    if tab.t[:, -1] @ cost1[tab.basis] > FEAS_TOL:
        return LpSolution(LpStatus.INFEASIBLE, pivots=tab.pivots)

    # drive artificials out of the basis, dropping rows that are redundant
    r = 0
    while r < tab.t.shape[0]:
        if tab.basis[r] >= n:
            cand = np.nonzero(np.abs(tab.t[r, :n]) > PIVOT_TOL)[0]
            if len(cand):
                tab.pivot(r, int(cand[0]))
            else:
                tab.t = np.delete(tab.t, r, axis=0)
                del tab.basis[r]
                continue
        r += 1
    tab.t = np.delete(tab.t, np.s_[n : n + m], axis=1)

    if not tab.run(c, range(n)):
        return LpSolution(LpStatus.UNBOUNDED, pivots=tab.pivots)
    y = np.zeros(n)
    y[tab.basis] = tab.t[:, -1]
    x = offset + tmat @ y
    return LpSolution(LpStatus.OPTIMAL, x, float(prob.objective @ x), tab.pivots)


# -- Gibbs-stochastic programs ----------------------------------------------

def _gibbs_stochastic_rows(g: np.ndarray, extra_cols: int):
    """Equality rows for vec(G) (row-major) with unit column sums and G g = g."""
    n = len(g)
    width = n * n + extra_cols
    rows, rhs = [], []
    for j in range(n):
        r = np.zeros(width)
        r[j : n * n : n] = 1.0
        rows.append(r)
        rhs.append(1.0)
    for i in range(n):
        r = np.zeros(width)
        r[i * n : (i + 1) * n] = g
        rows.append(r)
        rhs.append(g[i])
    return rows, rhs


def _pair(rho, sigma, system):
    rho, sigma = as_state(rho), as_state(sigma)
    for s in (rho, sigma):
        if s.dim != system.dim:
            raise DimensionMismatch(f"state has dimension {s.dim}, system has {system.dim}")
    return rho.populations, sigma.populations


def oracle_feasible(rho, sigma, system: System) -> bool:
    eta, zeta = _pair(rho, sigma, system)
    n = system.dim
    g = gibbs_state(system).populations
    rows, rhs = _gibbs_stochastic_rows(g, 0)
    for i in range(n):
        r = np.zeros(n * n)
        r[i * n : (i + 1) * n] = eta
        rows.append(r)
        rhs.append(zeta[i])
    sol = simplex_solve(LpProblem(np.zeros(n * n), np.array(rows), np.array(rhs)))
    return sol.optimal


def oracle_pstar(rho, sigma, system: System) -> float:
    """max p with (G eta)_i >= p zeta_i over Gibbs-stochastic G."""
    eta, zeta = _pair(rho, sigma, system)
    n = system.dim
    g = gibbs_state(system).populations
    # variables: vec(G), p, slacks s_i
    rows, rhs = _gibbs_stochastic_rows(g, 1 + n)
    for i in range(n):
        r = np.zeros(n * n + 1 + n)
        r[i * n : (i + 1) * n] = eta
        r[n * n] = -zeta[i]
        r[n * n + 1 + i] = -1.0
        rows.append(r)
        rhs.append(0.0)
    c = np.zeros(n * n + 1 + n)
    c[n * n] = 1.0
    bounds = [(0.0, math.inf)] * (n * n) + [(0.0, 1.0)] + [(0.0, math.inf)] * n
    sol = simplex_solve(LpProblem(c, np.array(rows), np.array(rhs), bounds, maximize=True))
    if not sol.optimal:
        raise NumericalFailure(f"p* program returned {sol.status.value}")
    return min(max(sol.objective_value, 0.0), 1.0)


def oracle_work(rho, sigma, system: System) -> WorkValue:
    """Work of transition by bisection on feasibility with a work qubit."""
    rho, sigma = as_state(rho), as_state(sigma)
    mode = "NO" if system.is_noisy else "TO"

    def feasible(w):
        r, s, big = with_work(rho, sigma, system, w)
        return oracle_feasible(r, s, big)

    lo, hi = -WORK_RANGE, WORK_RANGE
    if not feasible(lo):
        return WorkValue(-math.inf, mode)
    if feasible(hi):
        return WorkValue(math.inf, mode)
    while hi - lo > WORK_TOL:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return WorkValue(0.5 * (lo + hi), mode)


def dense_curve_check(rho, sigma, system: System, samples: int = 10_000) -> bool:
    """Curve dominance tested on a uniform x grid rather than at elbows."""
    if samples < 2:
        raise ValueError("need at least two samples")
    cr, cs = build_curve(rho, system), build_curve(sigma, system)
    xs = np.linspace(0.0, cs.z, samples)
    return bool(np.all(v_at(cr, xs) >= v_at(cs, xs) - FEAS_TOL))


def random_gibbs_stochastic(system: System, seed: int, weights=None, vertices: int = 2) -> np.ndarray:
    """Convex mixture of I, g 1^T and ``vertices`` random LP vertices.

    ``weights`` (length 2 + vertices) overrides the Dirichlet mixture.
    """
    rng = SplitMix64(seed)
    n = system.dim
    g = gibbs_state(system).populations
    parts = [np.eye(n), np.outer(g, np.ones(n))]
    rows, rhs = _gibbs_stochastic_rows(g, 0)
    for _ in range(vertices):
        cost = np.array([rng.uniform() - 0.5 for _ in range(n * n)])
        sol = simplex_solve(LpProblem(cost, np.array(rows), np.array(rhs)))
        parts.append(np.clip(sol.values.reshape(n, n), 0.0, None))
    w = rng.dirichlet(len(parts)) if weights is None else np.asarray(weights, dtype=float)
    if len(w) != len(parts):
        raise DimensionMismatch(f"{len(w)} weights for {len(parts)} components")
    out = sum(wk * p for wk, p in zip(w, parts))
    return out / out.sum(axis=0, keepdims=True)


# -- corpus -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Instance:
    index: int
    rho: State
    sigma: State
    system: System


def _instance_seed(seed: int, k: int) -> int:
    return SplitMix64((seed * 0x100000001B3 + k) & MASK64).next_u64()


def random_instance(k: int, seed: int | None = None, mode: str = "TO") -> Instance:
    """Instance ``k``: n = 2 + k % 3, energies uniform in [0, 3], beta = 1."""
    seed = env_seed() if seed is None else seed
    rng = SplitMix64(_instance_seed(seed, k))
    n = 2 + k % 3
    energies = np.array([3.0 * rng.uniform() for _ in range(n)])
    if mode == "NO":
        energies = np.zeros(n)
    eta = rng.dirichlet(n)
    zeta = rng.dirichlet(n)
    if rng.uniform() < 0.2:
        zeta[rng.below(n)] = 0.0
        zeta /= zeta.sum()
    if rng.uniform() < 0.1:
        eta[rng.below(n)] = 0.0
        eta /= eta.sum()
    return Instance(k, State(eta), State(zeta), System(energies, 1.0))


def corpus(count: int = 500, seed: int | None = None, mode: str = "TO"):
    seed = env_seed() if seed is None else seed
    return [random_instance(k, seed, mode) for k in range(count)]
