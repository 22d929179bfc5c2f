"""Command-line front end.

Every subcommand writes a table (CSV) or flat object(s) (JSON) to ``--out``
or stdout, prints a one-line summary, and records a run manifest next to the
output (``<out>.manifest.json``; on stderr when writing to stdout).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .curves import bautin_point, hopf_locus, sweep
from .equilibria import classify, find_equilibria
from .errors import AnalysisError, EmptyRange, ParameterError
from .global_dynamics import find_homoclinic, find_limit_cycles, melnikov_guided_homoclinic
from .integrate import IntegratorConfig, integrate, slow_fast_compare
from .lyapunov import l2_origin_closed, lyapunov_at, transversality_closed
from .melnikov import (
    Branch,
    HomoclinicOrbit,
    LevelBranch,
    kappa_min,
    lambda_double,
    lambda_double_quadrature,
    lambda_single,
    melnikov_integrals,
    persistence_surface,
    ralpha,
)
from .model import ReducedParams, SlowFastParams, full_field, reduced_field

Record = dict[str, Any]


class UsageError(Exception):
    pass


# ---- argument helpers -------------------------------------------------------


def _range(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"range {text!r} must look like min:max:n")
    lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    if n < 1:
        raise UsageError(f"range {text!r} needs n >= 1")
    return np.linspace(lo, hi, n)


def _grid(text: str | None, dims: int) -> list[np.ndarray]:
    if text is None:
        raise UsageError("--grid is required")
    axes = [_range(t) for t in text.split(",")]
    if len(axes) != dims:
        raise UsageError(f"--grid needs {dims} comma-separated ranges")
    return axes


def _pair(text: str, name: str) -> tuple[float, float]:
    try:
        a, b = (float(t) for t in text.split(":"))
    except ValueError:
        raise UsageError(f"{name} must look like a:b") from None
    return a, b


def _need(args, *names: str) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing required flag(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _reduced(args) -> ReducedParams:
    _need(args, "p", "r", "s")
    return ReducedParams(args.p, args.r, args.s)


def _cfg(args, rtol: float = 1e-10, atol: float = 1e-12) -> IntegratorConfig:
    return IntegratorConfig(
        rtol=args.rtol if args.rtol is not None else rtol,
        atol=args.atol if args.atol is not None else atol,
    )


def _c(z: complex, name: str) -> Record:
    return {f"{name}_re": z.real, f"{name}_im": z.imag}


# ---- subcommands ---------------------------------------------------------------
# each returns (records, summary, is_table)


def cmd_equilibria(args):
    params = _reduced(args)
    rows = []
    for eq in find_equilibria(params):
        row = {"name": eq.name, "x": eq.location[0], "y": eq.location[1], "kind": eq.kind.value}
        row.update(_c(eq.eigenvalues[0], "ev1"))
        row.update(_c(eq.eigenvalues[1], "ev2"))
        row["collision"] = eq.collision or ""
        rows.append(row)
    return rows, f"{len(rows)} equilibria", True


def cmd_classify(args):
    params = _reduced(args)
    _need(args, "x")
    y = -args.x + 0.0 if args.y is None else args.y
    eq = classify(params, (args.x, y))
    row = {"x": args.x, "y": y, "kind": eq.kind.value}
    row.update(_c(eq.eigenvalues[0], "ev1"))
    row.update(_c(eq.eigenvalues[1], "ev2"))
    return [row], eq.kind.value, False


def cmd_hopf_locus(args):
    _need(args, "s")
    ps = _grid(args.grid, 1)[0]
    which = {"origin": "Origin", "p1": "P1", "p2": "P2"}[args.which.lower()]
    loc = hopf_locus(which, args.s, ps)
    rows = [
        {"p": p, "r": r, "trace": tr, "det": d, "l1": l1, "criticality": c.value}
        for p, r, tr, d, l1, c in zip(loc.p, loc.r, loc.trace, loc.det, loc.l1, loc.criticality)
    ]
    return rows, f"{which} Hopf locus, {len(rows)} points, certified={loc.certified}", True


def cmd_bautin(args):
    _need(args, "s")
    cert = bautin_point(args.s)
    row = {
        "s": cert.s,
        "r": cert.r,
        "p": cert.p,
        "p_formula": cert.p_formula,
        "l1": cert.l1,
        "l2": cert.l2,
        "transversality": cert.transversality,
        "transversality_closed": transversality_closed(args.s),
        "l2_unit_first_component": l2_origin_closed(args.s, adjoint_unit=0),
        "transversality_unit_first_component": transversality_closed(args.s, adjoint_unit=0),
    }
    return [row], f"Bautin point (r, p) = (1, {cert.p:.9g}), l2 = {cert.l2:.9g}", False


def cmd_lyapunov(args):
    params = _reduced(args)
    eqs = {n: eq for eq in find_equilibria(params) for n in (eq.collision or eq.name).split("=")}
    if args.at not in eqs:
        raise ParameterError(f"equilibrium {args.at} does not exist at these parameters")
    res = lyapunov_at(params, eqs[args.at].location, always_l2=True)
    row = {"at": args.at, "omega": res.omega, "l1": res.l1, "l2": res.l2, "criticality": res.criticality.value}
    for k, v in vars(res.g).items():
        row.update(_c(v, k))
    return [row], f"l1 = {res.l1:.9g} ({res.criticality.value})", False


def cmd_sweep(args):
    _need(args, "s")
    ps, rs = _grid(args.grid, 2)
    rows = [
        {
            "p": lab.p,
            "r": lab.r,
            "s": lab.s,
            "n_equilibria": lab.n_equilibria,
            "kind_P0": lab.kinds["P0"].value if lab.kinds["P0"] else "",
            "kind_P1": lab.kinds["P1"].value if lab.kinds["P1"] else "",
            "kind_P2": lab.kinds["P2"].value if lab.kinds["P2"] else "",
        }
        for lab in sweep(args.s, ps, rs)
    ]
    return rows, f"{len(rows)} grid points", True


def cmd_simulate(args):
    params = _reduced(args)
    _need(args, "x0", "y0")
    T = args.T
    if not T > 0:
        raise ParameterError("T must be > 0")
    t_eval = np.linspace(0.0, T, args.n)
    if args.eps is not None:
        sf = SlowFastParams(params, args.eps)
        z0 = -args.x0 if args.z0 is None else args.z0
        tr = integrate(lambda st: full_field(sf, st), [args.x0, args.y0, z0], (0.0, T), _cfg(args), t_eval)
        rows = [{"t": t, "x": s[0], "y": s[1], "z": s[2]} for t, s in zip(tr.times, tr.states)]
    else:
        tr = integrate(lambda st: reduced_field(params, st), [args.x0, args.y0], (0.0, T), _cfg(args), t_eval)
        rows = [{"t": t, "x": s[0], "y": s[1]} for t, s in zip(tr.times, tr.states)]
    return rows, f"{len(rows)} samples to t={T:g}, end state {tr.final.tolist()}", True


def cmd_slowfast_check(args):
    params = _reduced(args)
    _need(args, "eps", "x0", "y0")
    sf = SlowFastParams(params, args.eps)
    z0 = -args.x0 if args.z0 is None else args.z0
    d = slow_fast_compare(sf, [args.x0, args.y0, z0], args.T, _cfg(args))
    row = dict(vars(d))
    return [row], (
        f"manifold residual {d.manifold_residual:.3e}, state gap {d.state_gap_all:.3e} (eps={d.eps:g})"
    ), False


def cmd_melnikov(args):
    _need(args, "delta", "mu")
    b = args.branch.lower()
    if b == "double":
        quad_res = lambda_double_quadrature(args.delta, args.mu)
        closed = lambda_double(args.delta, args.mu)
    else:
        branch = Branch.LeftLoop if b == "left" else Branch.RightLoop
        quad_res = melnikov_integrals(HomoclinicOrbit(branch, args.delta, args.mu))
        closed = lambda_single(branch, args.delta, args.mu)
    row = {
        "branch": b,
        "delta": args.delta,
        "mu": args.mu,
        "lambda_closed": closed,
        "lambda_quadrature": quad_res.lambda_root,
        "I0": quad_res.I0,
        "I1": quad_res.I1,
        "I2": quad_res.I2,
    }
    return [row], f"lambda = {closed:.9g} (closed), {quad_res.lambda_root:.9g} (quadrature)", False


def cmd_persistence_surface(args):
    ds, ms = _grid(args.grid, 2)
    rows = [{"delta": d, "mu": m, "lambda": lam} for d, m, lam in persistence_surface(args.which, ds, ms)]
    return rows, f"{len(rows)} surface points ({args.which})", True


def cmd_ralpha(args):
    level = {"outer": LevelBranch.Outer, "inner": LevelBranch.InnerRight}[args.level.lower()]
    alphas = _grid(args.grid, 1)[0] if args.grid else None
    if alphas is None:
        _need(args, "alpha")
        alphas = [args.alpha]
    rows = [{"alpha": float(a), "R": ralpha(float(a), level)} for a in alphas]
    return rows, f"R({rows[0]['alpha']:g}) = {rows[0]['R']:.9g}", len(rows) > 1


def cmd_kappa(args):
    a, k = kappa_min()
    return [{"alpha_star": a, "kappa": k}], f"kappa = {k:.9g} at alpha = {a:.9g}", False


def cmd_limit_cycles(args):
    params = _reduced(args)
    lo, hi = _pair(args.bracket, "--bracket")
    cycles = find_limit_cycles(params, (lo, hi), n_scan=args.n_scan, cfg=_cfg(args, 1e-11, 1e-13))
    rows = [
        {
            "radius": c.radius,
            "x": c.section_point[0],
            "y": c.section_point[1],
            "period": c.period,
            "multiplier": c.multiplier,
            "stability": c.stability.value,
        }
        for c in cycles
    ]
    return rows, f"{len(rows)} cycle(s): " + ", ".join(c.stability.value for c in cycles), True


def cmd_homoclinic(args):
    if args.eta is not None:
        _need(args, "delta", "mu")
        res = melnikov_guided_homoclinic(args.delta, args.mu, args.eta, args.loop, with_orbit=args.format == "csv")
    else:
        _need(args, "r", "s", "p_bracket")
        ReducedParams(1.0, args.r, args.s)  # validates r and s
        res = find_homoclinic(
            args.r, args.s, _pair(args.p_bracket, "--p-bracket"), args.saddle, args.enclosed,
            cfg=_cfg(args, 1e-11, 1e-13),
        )
    summary = {f"fixed_{k}": v for k, v in res.fixed.items()}
    summary.update(
        parameter=res.parameter,
        value=res.value,
        prediction=res.prediction,
        splitting_at_root=res.splitting_at_root,
        saddle=res.saddle,
        offset_shift=res.offset_shift,
    )
    line = f"{res.parameter}* = {res.value:.10g} (gap {res.splitting_at_root:.2e})"
    if args.format == "csv" and res.orbit is not None:
        rows = [{"t": t, "x": s[0], "y": s[1]} for t, s in zip(res.orbit.times, res.orbit.states)]
        return rows, line, True
    return [summary], line, False


COMMANDS: dict[str, tuple[Callable, str]] = {
    "equilibria": (cmd_equilibria, "equilibria and their linear type"),
    "classify": (cmd_classify, "classify one equilibrium (--x [--y])"),
    "hopf-locus": (cmd_hopf_locus, "sampled Hopf curve r(p) with l1 (--which, --grid pmin:pmax:n)"),
    "bautin": (cmd_bautin, "Bautin point of the origin with certificate"),
    "lyapunov": (cmd_lyapunov, "Lyapunov data at a Hopf equilibrium (--at)"),
    "sweep": (cmd_sweep, "region labels on a (p, r) grid"),
    "simulate": (cmd_simulate, "trajectory of the reduced (or, with --eps, full) system"),
    "slowfast-check": (cmd_slowfast_check, "compare full and reduced flows"),
    "melnikov": (cmd_melnikov, "persistence value of a homoclinic loop"),
    "persistence-surface": (cmd_persistence_surface, "lambda over a (delta, mu) grid"),
    "ralpha": (cmd_ralpha, "level-curve persistence function R(alpha)"),
    "kappa": (cmd_kappa, "minimum of R on the outer level curves"),
    "limit-cycles": (cmd_limit_cycles, "limit cycles around the origin by return map"),
    "homoclinic": (cmd_homoclinic, "homoclinic connection by shooting"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("parameters")
    for name in ("p", "r", "s", "eps", "delta", "mu", "eta", "rtol", "atol", "x", "y", "x0", "y0", "z0", "alpha"):
        g.add_argument(f"--{name}", type=float)
    g.add_argument("--lambda", dest="lam", type=float, help="rescaled damping (unused by most commands)")
    g.add_argument("--T", type=float, default=20.0, help="integration time")
    g.add_argument("--n", type=int, default=2001, help="output samples for trajectories")
    g.add_argument("--grid", help="pmin:pmax:n[,rmin:rmax:n]")
    g.add_argument("--out", help="output file (default stdout)")
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("--seed", type=int, default=0, help="recorded in the manifest; no command draws random numbers")
    g.add_argument("--which", default="origin", help="origin|P1|P2 (hopf-locus) or left|right|double (persistence-surface)")
    g.add_argument("--branch", choices=("left", "right", "double"), default="left")
    g.add_argument("--loop", choices=("left", "right", "double"), default="left")
    g.add_argument("--level", choices=("outer", "inner"), default="outer")
    g.add_argument("--at", choices=("P0", "P1", "P2"), default="P0")
    g.add_argument("--bracket", default="0.01:1", help="radius bracket lo:hi for limit-cycles")
    g.add_argument("--n-scan", type=int, default=40)
    g.add_argument("--p-bracket", help="p bracket a:b for homoclinic")
    g.add_argument("--saddle", default="P0")
    g.add_argument("--enclosed", default="P2")

    parser = argparse.ArgumentParser(prog="glacialbif", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_, description=help_)
    return parser


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if hasattr(v, "value"):
        return v.value
    return v


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(_jsonable(v))


def render(records: list[Record], fmt: str, table: bool) -> str:
    if fmt == "json":
        objs = [{k: _jsonable(v) for k, v in r.items()} for r in records]
        return json.dumps(objs if table else objs[0], indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(records[0].keys()) if records else [])
    for r in records:
        w.writerow([_fmt(v) for v in r.values()])
    return buf.getvalue()


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    fn, _ = COMMANDS[args.command]
    t0 = time.perf_counter()
    try:
        records, summary, table = fn(args)
    except (UsageError, ParameterError, EmptyRange) as exc:
        print(f"glacialbif {args.command}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except AnalysisError as exc:
        print(f"glacialbif {args.command}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    text = render(records, args.format, table)
    params = {k: _jsonable(v) for k, v in sorted(vars(args).items()) if k != "command"}
    manifest = {
        "subcommand": args.command,
        "parameters": params,
        "tolerances": {"rtol": args.rtol, "atol": args.atol},
        "artifacts": [args.out] if args.out else [],
        "wall_clock_s": round(time.perf_counter() - t0, 6),
        "version": __version__,
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        with open(args.out + ".manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=1)
            fh.write("\n")
        print(f"{args.command}: {summary} -> {args.out}")
    else:
        sys.stdout.write(text)
        print(f"{args.command}: {summary}", file=sys.stderr)
        print(json.dumps(manifest), file=sys.stderr)
    return 0


def main() -> None:
    sys.exit(run())
