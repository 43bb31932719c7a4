"""Command-line interface: validate, analyze, simulate, basin.

Exit codes follow one convention across subcommands: 0 for success (valid
spec, converged run), 1 for an analytic or convergence failure (invalid
spec, run that missed the target), 2 for usage, I/O, or parse errors.
All numbers print with 12 significant digits.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .equilibria import (
    case_table,
    enumerate_general_large_k,
    enumerate_isosceles,
    k_star,
    k_zero,
    refine_numeric,
)
from .formation import NotTriangulatedFromRootError, validate_spec
from .potentials import CanonicalTriangleParams
from .scenario import ScenarioError, load_scenario
from .simulate import (
    GRADIENT_STOP,
    IntegratorConfig,
    basin_sample,
    convergence_report,
    integrate_hierarchy,
    write_basin,
    write_trajectory,
)

__all__ = ["main", "entry"]


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def _fmt_point(p) -> str:
    return f"[{_fmt(p[0])}, {_fmt(p[1])}]"


def _print_record(rec) -> None:
    line = f"  {rec.label} {_fmt_point(rec.position)} {rec.classification}"
    if rec.eigenvalues is not None:
        line += f" eigenvalues [{_fmt(rec.eigenvalues[0])}, {_fmt(rec.eigenvalues[1])}]"
    print(line)


def _positive(parser: argparse.ArgumentParser, name: str, value: float) -> float:
    if value is None or not np.isfinite(value) or value <= 0.0:
        parser.error(f"{name} must be positive and finite")
    return float(value)


def _add_integrator_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--method", choices=["rk4", "rk45"], help="integration method")
    sub.add_argument("--step", type=float, help="fixed-step size (rk4)")
    sub.add_argument("--rtol", type=float, help="relative tolerance (rk45)")
    sub.add_argument("--atol", type=float, help="absolute tolerance (rk45)")
    sub.add_argument("--t-max", type=float, help="time horizon")
    sub.add_argument("--gradient-stop", type=float, help="gradient-norm stopping threshold")
    sub.add_argument("--stride", type=int, help="record every n-th step")


def _integrator_overrides(args) -> dict:
    out = {}
    for flag, field in [
        ("method", "method"), ("step", "step"), ("rtol", "rtol"), ("atol", "atol"),
        ("t_max", "t_max"), ("gradient_stop", "gradient_stop"), ("stride", "sample_stride"),
    ]:
        v = getattr(args, flag, None)
        if v is not None:
            out[field] = v
    return out


def cmd_validate(args, parser) -> int:
    try:
        sc = load_scenario(args.scenario)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = validate_spec(sc.spec)
    if report.ok:
        print(f"valid: {sc.spec.agent_count} agents, {len(sc.spec.edges)} edges, "
              f"{len(sc.spec.cliques)} cliques")
        return 0
    for v in report.violations:
        print(str(v))
    return 1


def cmd_analyze(args, parser) -> int:
    b = _positive(parser, "--b", args.b)
    c = _positive(parser, "--c", args.c)
    a = float(args.a)
    if not np.isfinite(a):
        parser.error("--a must be finite")
    K = args.K
    if K is not None:
        K = _positive(parser, "--K", K)

    if a == 0.0:
        print("isosceles follower analysis")
        print("a = 0")
        print(f"b = {_fmt(b)}")
        print(f"c = {_fmt(c)}")
        ks = k_star(b, c)
        kz = k_zero(b, c)
        print(f"K_star = {_fmt(ks)}")
        if kz is None:
            print("K_zero = absent (b^2/c^2 < 2)")
        else:
            print(f"K_zero = {_fmt(kz)}")
        if K is None:
            return 0
        report = case_table(CanonicalTriangleParams(a=0.0, b=b, c=c, gain=K))
        print(f"K = {_fmt(K)}")
        print("equilibria:")
        for rec in report.equilibria:
            _print_record(rec)
        if report.globally_convergent:
            print(f"globally convergent: yes (K > K_star = {_fmt(ks)})")
        else:
            print(f"globally convergent: no (K <= K_star = {_fmt(ks)})")
        print("almost globally convergent: "
              + ("yes" if report.almost_globally_convergent else "no"))
        return 0

    print("general target analysis")
    print(f"a = {_fmt(a)}")
    print(f"b = {_fmt(b)}")
    print(f"c = {_fmt(c)}")
    ratio = a * a / (c * c)
    print(f"a^2/c^2 = {_fmt(ratio)}")
    if ratio > 8.0:
        print("a^2/c^2 > 8: a misplaced stable equilibrium persists at arbitrarily large gain")
    elif ratio == 8.0:
        print("a^2/c^2 = 8: boundary case, the extra equilibrium pair is degenerate")
    else:
        print("a^2/c^2 < 8: the target is the only stable equilibrium at large gain")
    print("equilibria in the infinite-gain limit (on the line y = b):")
    for rec in enumerate_general_large_k(a, b, c):
        _print_record(rec)
    if K is not None:
        params = CanonicalTriangleParams(a=a, b=b, c=c, gain=K)
        L = params.length_scale()
        g = np.linspace(-2.0 * L, 2.0 * L, 21)
        seeds = np.stack(np.meshgrid(g, g), axis=-1).reshape(-1, 2)
        result = refine_numeric(params, seeds)
        print(f"numeric equilibria at K = {_fmt(K)}:")
        for rec in result.records:
            _print_record(rec)
    return 0


def cmd_simulate(args, parser) -> int:
    try:
        sc = load_scenario(args.scenario)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if sc.initial is None:
        print("error: scenario has no initial positions to simulate from", file=sys.stderr)
        return 2
    try:
        assignment = sc.layer_assignment()
    except (NotTriangulatedFromRootError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = sc.integrator_config(**_integrator_overrides(args))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    traj = integrate_hierarchy(sc.spec, assignment, sc.initial, cfg)
    report = convergence_report(traj, sc.spec, args.tol, assignment)
    try:
        write_trajectory(traj, args.output)
    except OSError as exc:
        print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
        return 2

    print(f"agents: {sc.spec.agent_count}, samples: {len(traj.times)}")
    print(f"terminal reason: {traj.terminal_reason} at t = {_fmt(traj.times[-1])}")
    print(f"max residual: {_fmt(report.target.max_residual)} (tolerance {_fmt(args.tol)})")
    print("in target: " + ("yes" if report.target.in_target else "no"))
    if report.potential_monotone is not None:
        print("total potential monotone: "
              + ("yes" if report.potential_monotone else "no"))
    print(f"wrote {args.output}")
    return 0 if report.converged else 1


def cmd_basin(args, parser) -> int:
    b = _positive(parser, "--b", args.b)
    c = _positive(parser, "--c", args.c)
    K = _positive(parser, "--K", args.K)
    a = float(args.a)
    if not np.isfinite(a):
        parser.error("--a must be finite")
    xmin, xmax, ymin, ymax = args.grid
    if not (xmin < xmax and ymin < ymax):
        parser.error("--grid must satisfy xmin < xmax and ymin < ymax")
    if args.res < 1:
        parser.error("--res must be at least 1")

    params = CanonicalTriangleParams(a=a, b=b, c=c, gain=K)
    cfg = IntegratorConfig(**_integrator_overrides(args))
    if a == 0.0:
        records = enumerate_isosceles(params)
    else:
        gx = np.linspace(xmin, xmax, 21)
        gy = np.linspace(ymin, ymax, 21)
        seeds = np.stack(np.meshgrid(gx, gy), axis=-1).reshape(-1, 2)
        records = list(refine_numeric(params, seeds).records)

    basin = basin_sample(params, (xmin, xmax, ymin, ymax), args.res, cfg, records)
    try:
        write_basin(basin, args.output)
    except OSError as exc:
        print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
        return 2

    total = basin.labels.size
    print(f"basin map: {len(basin.xs)}x{len(basin.ys)} nodes over "
          f"[{_fmt(xmin)}, {_fmt(xmax)}] x [{_fmt(ymin)}, {_fmt(ymax)}]")
    for name, count in sorted(basin.counts().items()):
        print(f"  {name}: {count} ({_fmt(100.0 * count / total)}%)")
    print(f"wrote {args.output}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="triform",
        description="Flip-free formation control: validate specs, analyze follower "
                    "equilibria, run gradient-flow simulations, map basins.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate", help="check a scenario file for consistency")
    p_val.add_argument("scenario", help="scenario JSON path")

    p_ana = sub.add_parser("analyze", help="equilibria and gain thresholds for one triangle")
    p_ana.add_argument("--a", type=float, default=0.0, help="target horizontal offset (default 0)")
    p_ana.add_argument("--b", type=float, required=True, help="target height")
    p_ana.add_argument("--c", type=float, required=True, help="leader half-separation")
    p_ana.add_argument("--K", type=float, default=None, help="area gain")

    p_sim = sub.add_parser("simulate", help="integrate a scenario's layered gradient flow")
    p_sim.add_argument("scenario", help="scenario JSON path")
    p_sim.add_argument("-o", "--output", required=True, help="trajectory output path")
    p_sim.add_argument("--tol", type=float, default=1e-3,
                       help="target membership tolerance (default 1e-3)")
    _add_integrator_flags(p_sim)

    p_bas = sub.add_parser("basin", help="label a grid of follower starts by attractor")
    p_bas.add_argument("--a", type=float, default=0.0, help="target horizontal offset (default 0)")
    p_bas.add_argument("--b", type=float, required=True, help="target height")
    p_bas.add_argument("--c", type=float, required=True, help="leader half-separation")
    p_bas.add_argument("--K", type=float, required=True, help="area gain")
    p_bas.add_argument("--grid", type=float, nargs=4, required=True,
                       metavar=("XMIN", "XMAX", "YMIN", "YMAX"), help="grid bounds")
    p_bas.add_argument("--res", type=int, required=True, help="nodes per axis")
    p_bas.add_argument("-o", "--output", required=True, help="basin output path")
    _add_integrator_flags(p_bas)

    args = parser.parse_args(argv)
    handler = {
        "validate": cmd_validate,
        "analyze": cmd_analyze,
        "simulate": cmd_simulate,
        "basin": cmd_basin,
    }[args.command]
    return handler(args, parser)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
