"""Renyi divergences, alpha free energies and heralded-probability bounds.

Everything is in natural-log units with kT = 1.  The alpha family is
sampled on a finite grid; ``AlphaGrid.refined`` doubles the log-spaced part
so grid sensitivity can be measured directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NumericalFailure
from .statekit import DensityMatrix, State, System, as_state, gibbs_state, partition_function
from .transition import _diag

BISECT_TOL = 1e-10
GAP_TOL = 1e-12
SUPPORT_TOL = 1e-12
MONO_SAMPLES = 32
SCAN_POINTS = 10_000
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class AlphaGrid:
    values: tuple

    def __post_init__(self):
        vals = sorted(float(a) for a in self.values)
        if not vals:
            raise ValueError("alpha grid is empty")
        if vals[0] < 0:
            raise ValueError("negative alpha is not supported")
        out = [vals[0]]
        for a in vals[1:]:
            if not math.isclose(a, out[-1], rel_tol=1e-12, abs_tol=0.0):
                out.append(a)
        object.__setattr__(self, "values", tuple(out))

    @classmethod
    def default(cls) -> "AlphaGrid":
        return cls._build(13)

    @classmethod
    def refined(cls) -> "AlphaGrid":
        return cls._build(25)

    @classmethod
    def _build(cls, k: int) -> "AlphaGrid":
        return cls((0.0, 0.5, 1.0, 2.0, math.inf, *np.logspace(-3, 3, k).tolist()))

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


# -- classical divergences --------------------------------------------------

def renyi_divergence(p, q, alpha: float) -> float:
    """D_alpha(p || q) in nats; support violations give +inf."""
    p = as_state(p).populations
    q = as_state(q).populations
    if len(p) != len(q):
        raise DimensionMismatch(f"{len(p)} vs {len(q)} entries")
    return float(_renyi_rows(p[None, :], q, alpha)[0])


def _renyi_rows(rows: np.ndarray, q: np.ndarray, alpha: float) -> np.ndarray:
    """D_alpha(row || q) for every row of a matrix of distributions."""
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    on = rows > 0
    if alpha == 0:
        mass = np.where(on, q, 0.0).sum(axis=1)
        with np.errstate(divide="ignore"):
            return np.where(mass > 0, -np.log(mass), math.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        logp = np.where(on, np.log(np.where(on, rows, 1.0)), -math.inf)
        logq = np.log(q)
    violated = np.any(on & (q <= 0), axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        if alpha == 1:
            out = np.where(on, rows * (logp - logq), 0.0).sum(axis=1)
        elif math.isinf(alpha):
            out = np.where(on, logp - logq, -math.inf).max(axis=1)
        else:
            terms = np.where(on, alpha * logp + (1 - alpha) * logq, -math.inf)
            top = terms.max(axis=1)
            safe = np.where(np.isfinite(top), top, 0.0)
            lse = safe + np.log(np.exp(terms - safe[:, None]).sum(axis=1))
            out = np.where(np.isfinite(top), lse / (alpha - 1), math.inf)
    if alpha >= 1:
        out = np.where(violated, math.inf, out)
    return out


def free_energy_alpha(state, system: System, alpha: float) -> float:
    """F_alpha / kT = D_alpha(state || Gibbs) - log Z."""
    state = as_state(state)
    if state.dim != system.dim:
        raise DimensionMismatch(f"state has dimension {state.dim}, system has {system.dim}")
    return renyi_divergence(state, gibbs_state(system), alpha) - math.log(partition_function(system))


def _largest_feasible(gap, tol=BISECT_TOL) -> float:
    """Largest p in [0, 1] with gap(p) >= -GAP_TOL.

    ``gap`` maps an array of p values to an array of gaps.  If the sampled
    gap is non-increasing the feasible set is taken to be an interval and
    bisected directly; otherwise a dense scan picks the last feasible point
    and the bracket after it is bisected.
    """
    ok = lambda p: gap(np.array([p]))[0] >= -GAP_TOL  # noqa: E731
    if ok(1.0):
        return 1.0
    ps = np.linspace(0.0, 1.0, MONO_SAMPLES)
    g = gap(ps)
    if not np.all(np.diff(g) <= GAP_TOL):
        ps = np.linspace(0.0, 1.0, SCAN_POINTS)
        g = gap(ps)
    feas = np.nonzero(g >= -GAP_TOL)[0]
    if len(feas) == 0:
        return 0.0
    k = int(feas[-1])
    lo, hi = float(ps[k]), float(ps[min(k + 1, len(ps) - 1)])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def heralded_bound_cto(rho, sigma, system: System, grid: AlphaGrid | None = None) -> float:
    """Largest heralded probability allowed by every alpha free energy.

    The failure branch is taken to be the thermal state, the cheapest
    choice.  The reference is tau x (1/2, 1/2) rather than tau x I; the
    constant shift cancels between the two sides.
    """
    grid = grid or AlphaGrid.default()
    rho, sigma = _classical(rho, system), _classical(sigma, system)
    tau = gibbs_state(system).populations
    ref = np.kron(tau, [0.5, 0.5])
    lhs_row = np.kron(rho.populations, [1.0, 0.0])[None, :]
    s0 = np.kron(sigma.populations, [1.0, 0.0])
    t1 = np.kron(tau, [0.0, 1.0])

    best = 1.0
    for a in grid:
        lhs = _renyi_rows(lhs_row, ref, a)[0]
        gap = lambda ps: lhs - _renyi_rows(np.outer(ps, s0) + np.outer(1 - ps, t1), ref, a)  # noqa: E731
        best = min(best, _largest_feasible(gap))
    return best


def _classical(x, system: System) -> State:
    if isinstance(x, np.ndarray) and x.ndim == 2:
        x = DensityMatrix(x)
    s, _ = _diag(x, system)
    if s.dim != system.dim:
        raise DimensionMismatch(f"state has dimension {s.dim}, system has {system.dim}")
    return s


# -- Hermitian eigensolver --------------------------------------------------

@dataclass(frozen=True, eq=False)
class HermitianEig:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _as_matrix(m) -> np.ndarray:
    return np.array(m.entries if isinstance(m, DensityMatrix) else m, dtype=complex)


def hermitian_eig(matrix, tol: float = 1e-12) -> HermitianEig:
    """Cyclic complex Jacobi diagonalization, eigenvalues descending."""
    a = _as_matrix(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotHermitian("matrix must be square")
    if np.max(np.abs(a - a.conj().T), initial=0.0) > 1e-9:
        raise NotHermitian("matrix is not Hermitian")
    a = (a + a.conj().T) / 2
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))

    def off(m):
        return float(np.linalg.norm(m - np.diag(np.diag(m))))

    sweeps = 0
    while off(a) >= tol * scale:
        if sweeps == JACOBI_MAX_SWEEPS:
            raise NumericalFailure(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                phase = apq / mag
                # phase-rotate q so that the pair element is real, then a real rotation
                tau = (a[q, q].real - a[p, p].real) / (2 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1 + tau * tau))
                c = 1 / math.sqrt(1 + t * t)
                s = t * c
                rot = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ rot
    w = np.real(np.diag(a))
    order = np.argsort(-w, kind="stable")
    return HermitianEig(w[order], v[:, order])


def _mat_power(m: np.ndarray, power: float) -> np.ndarray:
    """m**power on the support of m (0**x = 0)."""
    e = hermitian_eig(m)
    lam = e.eigenvalues
    keep = lam > SUPPORT_TOL
    vk = e.eigenvectors[:, keep]
    return (vk * lam[keep] ** power) @ vk.conj().T


def _entropy(m: np.ndarray) -> float:
    lam = hermitian_eig(m).eigenvalues
    lam = lam[lam > SUPPORT_TOL]
    return float(-np.sum(lam * np.log(lam)))


# -- free coherence ---------------------------------------------------------

def _coherent(x) -> np.ndarray:
    if isinstance(x, DensityMatrix):
        return np.array(x.entries, dtype=complex)
    if isinstance(x, State):
        return np.diag(x.populations).astype(complex)
    return DensityMatrix(x).entries.copy()


def free_coherence(rho, system: System | None = None, alpha: float = 1.0) -> float:
    """A_alpha(rho): quantum Renyi divergence between rho and its dephasing."""
    m = _coherent(rho)
    if system is not None and m.shape[0] != system.dim:
        raise DimensionMismatch(f"density matrix has dimension {m.shape[0]}, system has {system.dim}")
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    d = np.real(np.diag(m))
    supp = d > SUPPORT_TOL
    # rho lives inside supp(rho_D) for any PSD matrix; guard anyway
    if np.max(np.abs(m[~supp]), initial=0.0) > SUPPORT_TOL:
        return math.inf
    if np.max(np.abs(m - np.diag(np.diag(m))), initial=0.0) <= SUPPORT_TOL:
        return 0.0
    ms = m[np.ix_(supp, supp)]
    ds = d[supp]
    if alpha == 1:
        return float(-np.sum(ds * np.log(ds)) - _entropy(ms))
    if math.isinf(alpha):
        h = ds ** -0.5
        lam = hermitian_eig(h[:, None] * ms * h[None, :]).eigenvalues[0]
        return float(math.log(lam))
    if alpha < 1:
        # alpha = 0 gives the support projector of rho
        ra = _mat_power(ms, alpha)
        val = float(np.real(np.trace(ra @ np.diag(ds ** (1 - alpha)))))
        return math.inf if val <= 0 else math.log(val) / (alpha - 1)
    h = ds ** ((1 - alpha) / (2 * alpha))
    inner = h[:, None] * ms * h[None, :]
    val = float(np.real(np.trace(_mat_power(inner, alpha))))
    return math.log(val) / (alpha - 1)


def heralded_coherence_bound(rho, sigma, system: System, grid: AlphaGrid | None = None) -> float:
    """Upper bound on the heralded probability from free coherence alone."""
    grid = grid or AlphaGrid.default()
    r, s = _coherent(rho), _coherent(sigma)
    for m in (r, s):
        if m.shape[0] != system.dim:
            raise DimensionMismatch(f"density matrix has dimension {m.shape[0]}, system has {system.dim}")
    tau = np.diag(gibbs_state(system).populations).astype(complex)
    f0 = np.diag([1.0, 0.0])
    f1 = np.diag([0.0, 1.0])
    lhs_m = np.kron(r, f0)
    s0, t1 = np.kron(s, f0), np.kron(tau, f1)

    best = 1.0
    for a in grid:
        lhs = free_coherence(lhs_m, None, a)

        def gap(ps, lhs=lhs, a=a):
            return np.array([lhs - free_coherence(p * s0 + (1 - p) * t1, None, a) for p in ps])

        best = min(best, _largest_feasible(gap))
    return best


@dataclass(frozen=True)
class CatalyticReport:
    cto_bound: float
    coherence_bound: float

    @property
    def combined(self) -> float:
        """Minimum of the two; an upper bound only when sigma is coherent."""
        return min(self.cto_bound, self.coherence_bound)


def catalytic_report(rho, sigma, system: System, grid: AlphaGrid | None = None) -> CatalyticReport:
    return CatalyticReport(
        cto_bound=heralded_bound_cto(rho, sigma, system, grid),
        coherence_bound=heralded_coherence_bound(rho, sigma, system, grid),
    )
