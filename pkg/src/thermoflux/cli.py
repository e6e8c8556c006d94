"""Command-line front end.

Every subcommand reads a JSON problem file and writes one JSON object to
stdout.  Exit status: 0 on success, 1 for bad input, 2 when a numerical
routine fails to converge.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import catalytic, curvekit, loccent, oracle, transition, workkit
from .errors import NumericalFailure, ThermofluxError
from .statekit import DensityMatrix, System, decohere, validate_state

FLOAT_FMT = ".17g"


# -- JSON output ------------------------------------------------------------

def _encode(obj) -> str:
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format(x, FLOAT_FMT)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return _encode(obj)


# -- problem files ----------------------------------------------------------

def _complex_matrix(raw) -> np.ndarray:
    rows = []
    for row in raw:
        out = []
        for v in row:
            if isinstance(v, (list, tuple)):
                if len(v) != 2:
                    raise ValueError("density-matrix entries must be [re, im] pairs")
                out.append(complex(float(v[0]), float(v[1])))
            else:
                out.append(complex(float(v)))
        rows.append(out)
    return np.array(rows, dtype=complex)


def _parse_state(raw, name):
    if not isinstance(raw, dict):
        raise ValueError(f"{name} must be an object")
    if "populations" in raw:
        return validate_state(raw["populations"])
    if "density_matrix" in raw:
        return DensityMatrix(_complex_matrix(raw["density_matrix"]))
    raise ValueError(f"{name} needs 'populations' or 'density_matrix'")


class Problem:
    def __init__(self, data: dict, beta: float | None = None):
        if not isinstance(data, dict):
            raise ValueError("problem file must hold a JSON object")
        self.rho = _parse_state(data["rho"], "rho") if "rho" in data else None
        self.sigma = _parse_state(data["sigma"], "sigma") if "sigma" in data else None
        self.mode = data.get("mode")
        if self.mode not in (None, "NO", "TO"):
            raise ValueError(f"unknown mode {self.mode!r}")
        sysd = data.get("system", {})
        b = float(sysd.get("beta", 1.0)) if beta is None else beta
        if self.mode == "NO":
            ref = self.rho if self.rho is not None else self.sigma
            if "energies" in sysd:
                n = len(sysd["energies"])
            elif ref is not None:
                n = ref.dim
            else:
                raise ValueError("cannot infer the dimension")
            self.system = System(np.zeros(n), b)
        else:
            self.system = System(sysd["energies"], b)

    def need(self, *names):
        for n in names:
            if getattr(self, n) is None:
                raise ValueError(f"problem file has no {n}")

    def diag(self, name):
        x = getattr(self, name)
        return decohere(x, self.system) if isinstance(x, DensityMatrix) else x

    def coherent(self, name) -> bool:
        x = getattr(self, name)
        return isinstance(x, DensityMatrix) and not x.is_diagonal()


def load_problem(path, beta=None) -> Problem:
    with open(path) as fh:
        return Problem(json.load(fh), beta)


# -- subcommands ------------------------------------------------------------

def _pops(s):
    return s.populations.tolist()


def cmd_check(pb: Problem, args):
    pb.need("rho", "sigma")
    rep = transition.transition_report(pb.rho, pb.sigma, pb.system)
    return {
        "convertible": rep.convertible,
        "thermo_majorizes": curvekit.thermo_majorizes(pb.diag("rho"), pb.diag("sigma"), pb.system),
        "pstar": rep.pstar,
    }


def cmd_pstar(pb: Problem, args):
    pb.need("rho", "sigma")
    rep = transition.transition_report(pb.rho, pb.sigma, pb.system)
    return {"pstar": rep.pstar, "achievable": rep.achievable}


def cmd_protocol(pb: Problem, args):
    pb.need("rho", "sigma")
    pr = transition.build_protocol(pb.diag("rho"), pb.diag("sigma"), pb.system)
    return {
        "pstar": pr.pstar,
        "blocks": [b.tolist() for b in pr.blocks],
        "ratios": list(pr.ratios),
        "x_state": _pops(pr.x_state),
        "measurement": pr.m_diag.tolist(),
        "rho_sigma": _pops(pr.rho_sigma),
        "rho_prime": _pops(pr.rho_prime),
        "erasure_cost": transition.erasure_cost(pr.pstar),
    }


def _work_fields(w: workkit.WorkValue):
    return {"mode": w.mode, "value": w.value, "beta_w": w.nats, "w_over_kT": w.nats, "bits": w.bits}


def cmd_work(pb: Problem, args):
    pb.need("rho", "sigma")
    fwd = workkit.work_of_transition(pb.diag("rho"), pb.diag("sigma"), pb.system)
    return {**_work_fields(fwd), "upper_bound_only": pb.coherent("sigma")}


def cmd_bounds(pb: Problem, args):
    pb.need("rho", "sigma")
    r, s = pb.diag("rho"), pb.diag("sigma")
    lo, hi = workkit.pstar_bounds(r, s, pb.system)
    return {"lower": lo, "pstar": transition.max_transition_probability(r, s, pb.system), "upper": hi}


def cmd_tradeoff(pb: Problem, args):
    pb.need("rho", "sigma")
    if args.steps < 2:
        raise ValueError("--steps must be at least 2")
    ws = np.linspace(args.wmin, args.wmax, args.steps)
    ps = workkit.tradeoff_curve(pb.diag("rho"), pb.diag("sigma"), pb.system, ws)
    return {"units": "bits" if pb.system.is_noisy else "beta_w", "w": ws.tolist(), "pstar": ps.tolist()}


def _alphas(text: str) -> catalytic.AlphaGrid:
    if text in ("default", ""):
        return catalytic.AlphaGrid.default()
    if text == "refined":
        return catalytic.AlphaGrid.refined()
    return catalytic.AlphaGrid(tuple(float(a) for a in text.split(",")))


def cmd_catalytic(pb: Problem, args):
    pb.need("rho", "sigma")
    grid = _alphas(args.alphas)
    rep = catalytic.catalytic_report(pb.rho, pb.sigma, pb.system, grid)
    return {
        "alphas": list(grid.values),
        "cto_bound": rep.cto_bound,
        "coherence_bound": rep.coherence_bound,
        "combined_upper_bound": rep.combined,
        "pstar": transition.max_transition_probability(pb.rho, pb.sigma, pb.system),
    }


def _bipartite(text: str) -> loccent.PureBipartite:
    p = Path(text)
    raw = json.loads(p.read_text()) if not text.lstrip().startswith("[") and p.exists() else json.loads(text)
    return loccent.PureBipartite(_complex_matrix(raw))


def cmd_locc(pb, args):
    psi, phi = _bipartite(args.psi), _bipartite(args.phi)
    return {
        "ebits": loccent.entanglement_of_transition(psi, phi),
        "psi_schmidt": _pops(loccent.schmidt_spectrum(psi)),
        "phi_schmidt": _pops(loccent.schmidt_spectrum(phi)),
    }


def cmd_curve(pb: Problem, args):
    pb.need(args.state)
    c = curvekit.build_curve(pb.diag(args.state), pb.system)
    if args.csv:
        curvekit.write_csv(c, args.csv)
    if args.svg:
        curvekit.write_svg(c, args.svg)
    return {"state": args.state, "z": c.z, "points": [list(pt) for pt in c.points]}


def cmd_oracle(pb: Problem, args):
    pb.need("rho", "sigma")
    r, s = pb.diag("rho"), pb.diag("sigma")
    if args.what == "pstar":
        return {"pstar": oracle.oracle_pstar(r, s, pb.system)}
    return {"feasible": oracle.oracle_feasible(r, s, pb.system)}


def cmd_corpus(pb, args):
    out = []
    for inst in oracle.corpus(args.count, args.seed, args.mode):
        out.append({
            "index": inst.index,
            "energies": inst.system.energies.tolist(),
            "rho": _pops(inst.rho),
            "sigma": _pops(inst.sigma),
            "pstar": transition.max_transition_probability(inst.rho, inst.sigma, inst.system),
        })
    return {"seed": oracle.env_seed() if args.seed is None else args.seed, "instances": out}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="thermoflux", description="Single-shot transition probabilities and work.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, needs_input=True, **kw):
        p = sub.add_parser(name, **kw)
        p.add_argument("-i", "--input", required=needs_input, help="problem JSON file")
        p.add_argument("--beta", type=float, help="override the inverse temperature")
        p.set_defaults(func=fn, needs_input=needs_input)
        return p

    add("check", cmd_check, help="deterministic convertibility")
    add("pstar", cmd_pstar, help="maximum transition probability")
    add("protocol", cmd_protocol, help="blocks, measurement and failure state")
    add("work", cmd_work, help="work (or nonuniformity) of transition")
    add("bounds", cmd_bounds, help="work bounds on p*")
    p = add("tradeoff", cmd_tradeoff, help="p* as a function of work")
    p.add_argument("--wmin", type=float, required=True)
    p.add_argument("--wmax", type=float, required=True)
    p.add_argument("--steps", type=int, default=51)
    p = add("catalytic", cmd_catalytic, help="catalytic and coherence bounds")
    p.add_argument("--alphas", default="default", help="'default', 'refined' or comma list (inf allowed)")
    p = add("locc", cmd_locc, needs_input=False, help="entanglement of transition")
    p.add_argument("--psi", required=True, help="amplitude matrix as JSON or a file")
    p.add_argument("--phi", required=True, help="amplitude matrix as JSON or a file")
    p = add("curve", cmd_curve, help="thermo-majorization curve export")
    p.add_argument("--state", choices=("rho", "sigma"), default="rho")
    p.add_argument("--csv")
    p.add_argument("--svg")
    p = add("oracle", cmd_oracle, help="linear-programming cross-check")
    p.add_argument("what", choices=("pstar", "feasible"))
    p = add("corpus", cmd_corpus, needs_input=False, help="seeded random instances")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=("TO", "NO"), default="TO")
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        pb = load_problem(args.input, args.beta) if args.input else None
        result = args.func(pb, args)
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ThermofluxError, ValueError, KeyError, TypeError, OSError) as exc:
        # json.JSONDecodeError is a ValueError
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(dumps(result) + "\n")
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
