"""Batch command-line front end.

Every subcommand writes deterministic CSV or JSON (17 significant digits) to
stdout or to --out. Settings come from flags and optionally from a flat
``key = value`` scenario file given with --config; flags win.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import entropy_checker as ent
from . import fv_oracle as fv
from . import limit_analysis as la
from . import weak_form as wf
from .errors import ConfigError, InvalidStateError, ScaledEulerError
from .flux_model import FluxModel, State, brio, check_genuine_nonlinearity, quadratic_g, validate_hypotheses
from .riemann_solver import (Case, ConstantState, RarefactionFan, RiemannData, Shock, Vacuum, classify,
                             sample_arrays, solve, solve_two_shock, vacuum_edges)

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 1, 2
fmt = la.fmt

# key -> (type, default); the same names are used as --flags (with dashes)
SETTINGS = {
    "flux": (str, "brio"),
    "flux_table": (str, None),
    "g": (str, "linear"),
    "ul": (float, 1.0),
    "rhol": (float, 1.0),
    "ur": (float, -1.0),
    "rhor": (float, 1.0),
    "eps": (float, 1e-4),
    "eps_list": (str, ",".join(format(e, "g") for e in la.DEFAULT_EPS)),
    "t": (float, 1.0),
    "samples": (int, 21),
    "x_min": (float, -2.0),
    "x_max": (float, 2.0),
    "n_cells": (int, 1600),
    "cfl": (float, 0.9),
    "t_end": (float, 0.5),
    "levels": (str, None),
    "bumps": (int, 20),
    "seed": (int, 7),
    "rho_max": (float, 100.0),
    "n_samples": (int, 64),
    "out": (str, None),
    "out_dir": (str, "scaled-euler-out"),
    "snapshot_out": (str, None),
}

COLUMN_DOCS = {
    "solve": """\
output, two CSV blocks separated by a blank line:
  waves:    kind,family,xi_lo,xi_hi,u,rho
      kind      constant | shock | rarefaction | vacuum
      family    characteristic family of a shock or fan (1 slow, 2 fast); empty otherwise
      xi_lo/hi  edges of the segment in x/t (velocity units); a shock has xi_lo = xi_hi = its speed
      u, rho    the constant state (empty for fans and vacuum)
  samples:  x,u,rho   exact solution at time --t on --samples points of [--x-min, --x-max]
a header comment line gives the case tag and the intermediate state (u_star, rho_star).""",
    "sweep": """\
columns: epsilon,u_star,rho_star,s1,s2,l_estimate,weight_estimate
  epsilon          scaling parameter of the run (dimensionless)
  u_star, rho_star intermediate state between the two shocks (velocity, density)
  s1, s2           slow and fast shock speeds (velocity units)
  l_estimate       2 eps (f(rho_star) - f(rho_l)), tends to the concentration value (u_l-u_r)^2/4
  weight_estimate  (s2 - s1) rho_star: mass between the shocks per unit time, tends to the delta weight slope""",
    "limit": """\
JSON keys: c_slope,u_left,u_right,rho_left,rho_right,weight_slope,l,u_on_line,case
  c_slope       speed of the concentration line x = c_slope t
  u_left/right, rho_left/right  limit states either side of the line
  weight_slope  delta weight per unit time (weight = weight_slope * t)
  l             concentration value, limit of 2 eps f(rho_star)
  u_on_line     velocity carried on the line
  case          TwoShock | Contact | TwoRarefactionVacuum
for TwoShock data "closed_form" holds the exact limit and "extrapolation" maps each
extrapolated sweep column to {value, order, converged, last_value}.""",
    "entropy": """\
columns: epsilon,coeff1,coeff2,limit,admissible
  coeff1, coeff2  entropy production -s[eta] + [q] of the slow and fast shock
  limit           common eps -> 0 limit (u_r - u_l)(u_l - u_r)^2 / 24
  admissible      1 if both coefficients are <= 0, else 0""",
    "weak-residual": """\
columns: x0,t0,rx,rt,residual_u,residual_u_literal,residual_rho,tol,pass
  x0,t0,rx,rt         centre and radii of the bump test function
  residual_u          velocity weak-form residual with flux u^2/2
  residual_u_literal  same with flux u (reported for comparison; not a pass criterion)
  residual_rho        density residual including the line mass
  tol                 1e-8 * |phi|_C1 * scale^2
  pass                1 if |residual_u| and |residual_rho| are within tol""",
    "fv-compare": """\
columns: n_cells,l1_u,l1_rho,l1,order
  n_cells     cells on [--x-min, --x-max]
  l1_u/l1_rho L1 distance of finite-volume and exact cell averages at --t-end
  l1          l1_u + l1_rho
  order       empirical order against the previous row (empty on the first row)
--snapshot-out writes the finest finite-volume state as columns x,u,rho
(cell centre, velocity, density).""",
    "validate-flux": """\
prints key,value lines: hypotheses_ok, first_violation, nonlinearity_ok, flagged_states.""",
    "all": """\
runs solve, sweep, limit, entropy, weak-residual and fv-compare and writes
<name>.csv / limit.json into --out-dir; column contracts as for each subcommand.""",
}


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def read_config(path: str) -> dict:
    """Parse a flat ``key = value`` file; '#' starts a comment."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{no}: expected 'key = value', got {raw.strip()!r}")
        key, val = (p.strip() for p in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in SETTINGS:
            raise ConfigError(f"{path}:{no}: unknown key {key!r}")
        typ = SETTINGS[key][0]
        try:
            out[key] = typ(val)
        except ValueError as exc:
            raise ConfigError(f"{path}:{no}: key {key!r}: cannot parse {val!r} as {typ.__name__}") from exc
    return out


def resolve(args: argparse.Namespace) -> dict:
    cfg = read_config(args.config) if args.config else {}
    out = {}
    for key, (_, default) in SETTINGS.items():
        flag = getattr(args, key, None)
        out[key] = flag if flag is not None else cfg.get(key, default)
    return out


def parse_eps_list(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise ConfigError(f"eps_list: {exc}") from exc
    if len(vals) < 1 or any(v <= 0 for v in vals) or any(b >= a for a, b in zip(vals, vals[1:])):
        raise ConfigError("eps_list must be positive and strictly decreasing")
    return vals


@dataclass(frozen=True)
class TableFlux:
    """f' by monotone cubic (PCHIP) interpolation, f by its antiderivative.

    Outside the table f' continues linearly with the end slopes, so f is
    quadratic there.
    """

    rho: np.ndarray
    f0: float
    fp: PchipInterpolator
    F: object

    @classmethod
    def from_csv(cls, path):
        try:
            with open(path) as fh:
                rows = list(csv.DictReader(fh))
            rho = np.array([float(r["rho"]) for r in rows])
            f = np.array([float(r["f"]) for r in rows])
            fprime = np.array([float(r["fprime"]) for r in rows])
        except (OSError, KeyError, ValueError) as exc:
            raise ConfigError(f"flux table {path!r}: need a CSV with columns rho,f,fprime ({exc})") from exc
        if len(rho) < 3 or np.any(np.diff(rho) <= 0.0):
            raise ConfigError(f"flux table {path!r}: need >= 3 rows with increasing rho")
        fp = PchipInterpolator(rho, fprime, extrapolate=False)
        return cls(rho, float(f[0]), fp, fp.antiderivative())

    def _ends(self):
        a, b = self.rho[0], self.rho[-1]
        d = self.fp.derivative()
        return a, b, float(self.fp(a)), float(self.fp(b)), float(d(a)), float(d(b))

    def f_prime(self, r):
        r = np.asarray(r, dtype=float)
        a, b, pa, pb, sa, sb = self._ends()
        inside = np.clip(r, a, b)
        out = self.fp(inside)
        out = np.where(r < a, pa + sa * (r - a), out)
        out = np.where(r > b, pb + sb * (r - b), out)
        return out if out.ndim else float(out)

    def f(self, r):
        r = np.asarray(r, dtype=float)
        a, b, pa, pb, sa, sb = self._ends()
        inside = np.clip(r, a, b)
        out = self.f0 + self.F(inside)
        fb = self.f0 + float(self.F(b))
        out = np.where(r < a, self.f0 + pa * (r - a) + 0.5 * sa * (r - a) ** 2, out)
        out = np.where(r > b, fb + pb * (r - b) + 0.5 * sb * (r - b) ** 2, out)
        return out if out.ndim else float(out)


def build_model(cfg: dict, eps: Optional[float] = None) -> FluxModel:
    eps = cfg["eps"] if eps is None else eps
    kind = cfg["flux"]
    if kind == "brio":
        return brio(eps)
    if kind == "quadratic-g":
        return quadratic_g(eps)
    if kind == "table":
        if not cfg["flux_table"]:
            raise ConfigError("flux=table needs flux_table=<csv path>")
        if cfg["g"] not in ("linear", "quadratic"):
            raise ConfigError(f"g must be linear or quadratic, got {cfg['g']!r}")
        t = TableFlux.from_csv(cfg["flux_table"])
        return FluxModel(t.f, t.f_prime, eps, cfg["g"], name="table")
    raise ConfigError(f"unknown flux {kind!r} (brio | quadratic-g | table)")


def build_data(cfg: dict) -> RiemannData:
    try:
        return RiemannData(State(cfg["ul"], cfg["rhol"]), State(cfg["ur"], cfg["rhor"]))
    except InvalidStateError as exc:
        raise InvalidStateError(f"invalid Riemann data: {exc}") from exc


def build_grid(cfg: dict) -> fv.Grid1D:
    return fv.Grid1D(cfg["x_min"], cfg["x_max"], cfg["n_cells"], cfg["cfl"])


# ---------------------------------------------------------------------------
# subcommands; each writes to a text stream and returns an exit code
# ---------------------------------------------------------------------------

def _num(x):
    return "" if x is None else fmt(x)


def cmd_validate_flux(cfg, out) -> int:
    m = build_model(cfg)
    hyp = validate_hypotheses(m, cfg["rho_max"], cfg["n_samples"])
    rng = np.random.default_rng(cfg["seed"])
    grid = [State(u, r) for u, r in zip(rng.uniform(-5, 5, 100), rng.uniform(0.1, 10, 100))]
    gnl = check_genuine_nonlinearity(m, grid)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("key", "value"))
    w.writerow(("hypotheses_ok", int(hyp.ok)))
    w.writerow(("first_violation", "" if hyp.first_violation is None else
                f"index={hyp.first_violation[0]} rho={fmt(hyp.first_violation[1])} {hyp.first_violation[2]}"))
    w.writerow(("nonlinearity_ok", int(gnl.ok)))
    w.writerow(("flagged_states", len(gnl.flagged)))
    return EXIT_OK if hyp.ok and gnl.ok else EXIT_INVALID


def cmd_solve(cfg, out) -> int:
    m = build_model(cfg)
    data = build_data(cfg)
    fan = solve(m, data)
    inter = fan.intermediate
    out.write(f"# case={fan.case.value} epsilon={fmt(m.epsilon)}"
              f" u_star={fmt(inter.u_star)} rho_star={fmt(inter.rho_star)}")
    if fan.case is Case.TWO_RAREFACTION_VACUUM:
        e1, e2 = vacuum_edges(fan)
        out.write(f" u_star1={fmt(e1)} u_star2={fmt(e2)}")
    out.write("\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("kind", "family", "xi_lo", "xi_hi", "u", "rho"))
    for seg in fan.segments:
        if isinstance(seg, ConstantState):
            w.writerow(("constant", "", _num(seg.xi_lo), _num(seg.xi_hi), fmt(seg.state.u), fmt(seg.state.rho)))
        elif isinstance(seg, Shock):
            w.writerow(("shock", seg.family, fmt(seg.speed), fmt(seg.speed), "", ""))
        elif isinstance(seg, RarefactionFan):
            w.writerow(("rarefaction", seg.family, fmt(seg.xi_lo), fmt(seg.xi_hi), "", ""))
        elif isinstance(seg, Vacuum):
            w.writerow(("vacuum", "", fmt(seg.xi_lo), fmt(seg.xi_hi), "", ""))
    out.write("\n")
    x = np.linspace(cfg["x_min"], cfg["x_max"], cfg["samples"])
    u, rho = sample_arrays(fan, m, x, cfg["t"])
    w.writerow(("x", "u", "rho"))
    for row in zip(x, u, rho):
        w.writerow(tuple(fmt(v) for v in row))
    return EXIT_OK


def cmd_sweep(cfg, out) -> int:
    notices = []
    recs = la.sweep(build_model(cfg), build_data(cfg), parse_eps_list(cfg["eps_list"]), notices)
    for n in notices:
        print(f"notice: {n}", file=sys.stderr)
    la.write_sweep_csv(recs, out)
    return EXIT_OK


def _limit_json(lim) -> dict:
    keys = ("c_slope", "u_left", "u_right", "rho_left", "rho_right", "weight_slope", "l", "u_on_line", "case")
    if isinstance(lim, la.DeltaShockLimit):
        vals = {k: getattr(lim, k) for k in keys}
    elif isinstance(lim, la.ContactLimit):
        vals = dict(c_slope=lim.c_slope, u_left=lim.u, u_right=lim.u, rho_left=lim.rho_left,
                    rho_right=lim.rho_right, weight_slope=0.0, l=0.0, u_on_line=lim.u, case=lim.case)
    else:
        vals = dict(c_slope=None, u_left=lim.u_left, u_right=lim.u_right, rho_left=lim.rho_left,
                    rho_right=lim.rho_right, weight_slope=0.0, l=0.0, u_on_line=None, case=lim.case)
    return vals


def _json_num(x):
    if x is None or isinstance(x, str):
        return x
    x = float(x)
    return x if math.isfinite(x) else str(x)


def cmd_limit(cfg, out) -> int:
    data = build_data(cfg)
    closed = la.closed_form_limit(data)
    if classify(data) is Case.TWO_SHOCK:
        recs = la.sweep(build_model(cfg), data, parse_eps_list(cfg["eps_list"]))
        ext = la.extrapolate_limit(recs, data)
        doc = {k: _json_num(v) for k, v in _limit_json(ext).items()}
        doc["closed_form"] = {k: _json_num(v) for k, v in _limit_json(closed).items()}
        doc["extrapolation"] = {k: {"value": _json_num(e.value), "order": _json_num(e.order),
                                    "converged": e.converged, "last_value": _json_num(e.last_value)}
                                for k, e in ext.extrapolation.items()}
    else:
        doc = {k: _json_num(v) for k, v in _limit_json(closed).items()}
    # repr of a float is its shortest round-trip form, hence deterministic
    json.dump(doc, out, indent=2, sort_keys=False)
    out.write("\n")
    return EXIT_OK


def cmd_entropy(cfg, out) -> int:
    data = build_data(cfg)
    model = build_model(cfg)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("epsilon", "coeff1", "coeff2", "limit", "admissible"))
    lim = ent.coefficient_limit(data)
    for eps in parse_eps_list(cfg["eps_list"]):
        m = model.with_epsilon(eps)
        try:
            inter, _ = solve_two_shock(m, data)
        except ScaledEulerError as exc:
            print(f"notice: eps={eps:g} skipped: {exc}", file=sys.stderr)
            continue
        rep = ent.delta_coefficients(m, data, inter)
        w.writerow((fmt(eps), fmt(rep.coeff1), fmt(rep.coeff2), fmt(lim), int(ent.admissibility_verdict(rep))))
    return EXIT_OK


def cmd_weak(cfg, out) -> int:
    data = build_data(cfg)
    lim = la.closed_form_limit(data)
    sol = wf.from_limit(lim)
    c = getattr(lim, "c_slope", None) or 0.0
    bumps = wf.bump_battery(cfg["bumps"], cfg["seed"], c_slope=c)
    rep = wf.run_battery(sol, data, bumps)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("x0", "t0", "rx", "rt", "residual_u", "residual_u_literal", "residual_rho", "tol", "pass"))
    for r in rep.results:
        b = r.bump
        w.writerow((fmt(b.x0), fmt(b.t0), fmt(b.rx), fmt(b.rt), fmt(r.residual_u), fmt(r.residual_u_literal),
                    fmt(r.residual_rho), fmt(r.tol), int(r.passed)))
    return EXIT_OK if rep.passed else EXIT_INVALID


def cmd_fv(cfg, out) -> int:
    m = build_model(cfg)
    data = build_data(cfg)
    grid = build_grid(cfg)
    levels = None
    if cfg["levels"]:
        try:
            levels = [int(x) for x in cfg["levels"].split(",") if x]
        except ValueError as exc:
            raise ConfigError(f"levels: {exc}") from exc
    rep = fv.run_compare(m, data, grid, cfg["t_end"], levels)
    orders = [None] + rep.orders()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("n_cells", "l1_u", "l1_rho", "l1", "order"))
    for e, p in zip(rep.entries, orders):
        w.writerow((e.n_cells, fmt(e.l1_u), fmt(e.l1_rho), fmt(e.l1), _num(p)))
    if cfg["snapshot_out"]:
        g = grid.with_cells(rep.entries[-1].n_cells)
        snap = fv.run(m, fv.riemann_snapshot(data, g), g, cfg["t_end"])
        with open(cfg["snapshot_out"], "w") as fh:
            fv.write_snapshot_csv(snap, g, fh)
    return EXIT_OK


def cmd_all(cfg, out) -> int:
    os.makedirs(cfg["out_dir"], exist_ok=True)
    data = build_data(cfg)
    steps = [("solve.csv", cmd_solve), ("limit.json", cmd_limit), ("weak-residual.csv", cmd_weak),
             ("fv-compare.csv", cmd_fv)]
    if classify(data) is Case.TWO_SHOCK:
        steps[1:1] = [("sweep.csv", cmd_sweep), ("entropy.csv", cmd_entropy)]
    code = EXIT_OK
    for name, fn in steps:
        with open(os.path.join(cfg["out_dir"], name), "w") as fh:
            rc = fn(cfg, fh)
        out.write(f"{name}\t{'ok' if rc == EXIT_OK else 'validation failed'}\n")
        code = max(code, rc)
    return code


COMMANDS = {
    "validate-flux": (cmd_validate_flux, "check f' > 0, f'' > 0 and genuine nonlinearity"),
    "solve": (cmd_solve, "exact Riemann solution: wave table and samples"),
    "sweep": (cmd_sweep, "two-shock solves over a decreasing eps list"),
    "limit": (cmd_limit, "eps -> 0 limit object as JSON"),
    "entropy": (cmd_entropy, "entropy production of both shocks over the eps list"),
    "weak-residual": (cmd_weak, "weak-form residuals of the closed-form limit on a bump battery"),
    "fv-compare": (cmd_fv, "finite-volume vs exact refinement table"),
    "all": (cmd_all, "run the whole pipeline into --out-dir"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scaled-euler", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter,
                                epilog="exit codes: 0 success, 1 invalid input or failed validation, 2 solver error")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_, description=help_, epilog=COLUMN_DOCS[name],
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        sp.add_argument("--config", help="flat key = value scenario file (keys as the flags below)")
        sp.add_argument("--flux", choices=("brio", "quadratic-g", "table"), help="flux model (default brio)")
        sp.add_argument("--flux-table", help="CSV with columns rho,f,fprime for --flux table")
        sp.add_argument("--g", choices=("linear", "quadratic"), help="g for --flux table (default linear)")
        for key, label in (("ul", "left velocity"), ("rhol", "left density"),
                           ("ur", "right velocity"), ("rhor", "right density")):
            sp.add_argument(f"--{key}", type=float, help=label)
        sp.add_argument("--eps", type=float, help="scaling parameter (default 1e-4)")
        sp.add_argument("--eps-list", help="comma-separated decreasing eps values (default 1e-1..1e-7)")
        sp.add_argument("--t", type=float, help="sampling time for solve (default 1)")
        sp.add_argument("--samples", type=int, help="number of sample points for solve (default 21)")
        sp.add_argument("--x-min", type=float, help="left end of the x window (default -2)")
        sp.add_argument("--x-max", type=float, help="right end of the x window (default 2)")
        sp.add_argument("--n-cells", type=int, help="finest finite-volume grid (default 1600)")
        sp.add_argument("--cfl", type=float, help="Courant number (default 0.9)")
        sp.add_argument("--t-end", type=float, help="finite-volume end time (default 0.5)")
        sp.add_argument("--levels", help="comma-separated cell counts (default n/4,n/2,n)")
        sp.add_argument("--bumps", type=int, help="bump battery size (default 20)")
        sp.add_argument("--seed", type=int, help="battery / grid seed (default 7)")
        sp.add_argument("--rho-max", type=float, help="upper density for validate-flux (default 100)")
        sp.add_argument("--n-samples", type=int, help="density samples for validate-flux (default 64)")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--out-dir", help="output directory for all")
        sp.add_argument("--snapshot-out", help="CSV path for the finest fv snapshot (x,u,rho)")
    return p


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; here 2 means a solver error
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID
    fn = COMMANDS[args.command][0]
    try:
        cfg = resolve(args)
        if cfg["out"]:
            buf = io.StringIO()
            code = fn(cfg, buf)
            with open(cfg["out"], "w") as fh:
                fh.write(buf.getvalue())
            return code
        return fn(cfg, stdout)
    except (ConfigError, InvalidStateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ScaledEulerError as exc:
        print(f"solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


def main() -> None:
    sys.exit(run())
