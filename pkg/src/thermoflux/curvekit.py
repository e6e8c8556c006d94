"""Thermo-majorization curves and the monotones read off them.

A curve is stored as its breakpoints, starting from ``(0, 0)``, with x in
units of Gibbs weight (so the last point sits at ``(Z, 1)``).  For a trivial
Hamiltonian each level contributes weight 1 and the curve is the ordinary
Lorenz curve stretched by ``n``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, OutOfRange
from .statekit import NORM_TOL, State, System, as_state, beta_order

CMP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Curve:
    xs: np.ndarray
    ys: np.ndarray
    z: float
    rank: int
    order: tuple

    @property
    def points(self):
        return list(zip(self.xs.tolist(), self.ys.tolist()))

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.ys) / np.diff(self.xs)

    def is_concave(self, tol=1e-12) -> bool:
        return bool(np.all(np.diff(self.slopes) <= tol))

    def __call__(self, x):
        return v_at(self, x)


@dataclass(frozen=True, eq=False)
class ElbowSets:
    xs: np.ndarray
    ys: np.ndarray


def build_curve(state, system: System) -> Curve:
    state = as_state(state)
    if state.dim != system.dim:
        raise DimensionMismatch(f"state has dimension {state.dim}, system has {system.dim}")
    order = beta_order(state, system).perm
    idx = np.array(order)
    xs = np.concatenate(([0.0], np.cumsum(system.weights[idx])))
    ys = np.concatenate(([0.0], np.cumsum(state.populations[idx])))
    rank = state.rank
    # zero populations are last in beta-order, so the curve tops out at index rank
    ys[rank:] = 1.0
    np.minimum(ys, 1.0, out=ys)
    xs.setflags(write=False)
    ys.setflags(write=False)
    return Curve(xs, ys, float(xs[-1]), rank, order)


def _curve(c, system):
    return c if isinstance(c, Curve) else build_curve(c, system)


def v_at(curve: Curve, x):
    """Height of the curve at ``x`` (scalar or array)."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < -CMP_TOL) or np.any(xa > curve.z + CMP_TOL):
        raise OutOfRange(f"x outside [0, {curve.z}]")
    out = np.interp(np.clip(xa, 0.0, curve.z), curve.xs, curve.ys)
    return float(out) if out.ndim == 0 else out


def l_at(curve: Curve, y):
    """Leftmost x at which the curve reaches height ``y``.

    ``y = 1`` returns the Gibbs weight of the populated levels (the curve
    may reach 1 earlier only through rounding, never through geometry).
    """
    ya = np.asarray(y, dtype=float)
    if np.any(ya < -CMP_TOL) or np.any(ya > 1 + CMP_TOL):
        raise OutOfRange("y outside [0, 1]")
    ya = np.clip(ya, 0.0, 1.0)
    xs, ys = curve.xs, curve.ys
    k = np.searchsorted(ys, ya, side="left")
    k = np.clip(k, 1, len(ys) - 1)
    y0, y1 = ys[k - 1], ys[k]
    x0, x1 = xs[k - 1], xs[k]
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(y1 > y0, (ya - y0) / (y1 - y0), 1.0)
    out = x0 + frac * (x1 - x0)
    out = np.where(ya == y1, x1, out)
    out = np.where(ya <= 0, 0.0, out)
    out = np.where(ya >= 1, xs[curve.rank], out)
    return float(out) if out.ndim == 0 else out


def elbow_sets(state, system: System) -> ElbowSets:
    c = build_curve(state, system)
    return ElbowSets(c.xs[1:].copy(), np.unique(c.ys[1 : c.rank + 1]))


def curve_elbows(curve: Curve):
    """Elbow x-values and the y-values below rank, taken from a built curve."""
    return curve.xs[1:], np.unique(curve.ys[1 : curve.rank + 1])


def thermo_majorizes(rho, sigma, system: System, strict: bool = False) -> bool:
    """Whether ``rho`` can be converted deterministically into ``sigma``.

    Only the elbows of ``sigma`` are checked.  ``strict`` drops the
    comparison tolerance.
    """
    cr = _curve(rho, system)
    cs = _curve(sigma, system)
    if len(cr.xs) != len(cs.xs):
        raise DimensionMismatch("states live on different systems")
    tol = 0.0 if strict else CMP_TOL
    return bool(np.all(v_at(cr, cs.xs[1:]) >= cs.ys[1:] - tol))


def curves_equal(a: Curve, b: Curve, tol=NORM_TOL) -> bool:
    """Same function on [0, Z], regardless of breakpoint bookkeeping."""
    grid = np.union1d(a.xs, b.xs)
    return bool(np.allclose(v_at(a, grid), v_at(b, grid), rtol=0, atol=tol))


# -- export -----------------------------------------------------------------

def write_csv(curve: Curve, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y"])
        for x, y in curve.points:
            w.writerow([f"{x:.17g}", f"{y:.17g}"])


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if rows[0] != ["x", "y"]:
        raise ValueError(f"{path}: expected header x,y")
    return [(float(x), float(y)) for x, y in rows[1:]]


SVG_W, SVG_H, SVG_PAD = 640, 480, 40


def curve_svg(curve: Curve, *, stroke="#1f77b4") -> str:
    sx = (SVG_W - 2 * SVG_PAD) / curve.z
    sy = SVG_H - 2 * SVG_PAD
    x0, y0 = SVG_PAD, SVG_H - SVG_PAD
    pts = " ".join(f"{x0 + x * sx:.6g},{y0 - y * sy:.6g}" for x, y in curve.points)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_W}" height="{SVG_H}" '
        f'viewBox="0 0 {SVG_W} {SVG_H}">\n'
        f'  <g stroke="#bbbbbb" stroke-width="1">\n'
        f'    <line x1="{x0}" y1="{y0}" x2="{SVG_W - SVG_PAD}" y2="{y0}"/>\n'
        f'    <line x1="{x0}" y1="{y0}" x2="{x0}" y2="{SVG_PAD}"/>\n'
        f"  </g>\n"
        f'  <polyline fill="none" stroke="{stroke}" stroke-width="2" points="{pts}"/>\n'
        f"</svg>\n"
    )


def write_svg(curve: Curve, path) -> None:
    with open(path, "w") as fh:
        fh.write(curve_svg(curve))
