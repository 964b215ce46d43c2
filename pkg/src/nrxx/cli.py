"""Command line driver: single runs, convergence tables and cost scaling.

Examples::

    nrxx run --scenario periodic --N 200 --out periodic.csv
    nrxx run --scenario shock_tube --N 400 --kn-prime 0.001 --out tube.csv
    nrxx convergence --scenario periodic --grids 20,40,80 --ref-N 320
    nrxx scaling --grids 25,50,100,200
    nrxx run --config case.cfg --N 100
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from .scenarios import (
    ConfigError,
    ScenarioConfig,
    SolverBreakdown,
    _parse_grids,
    run_scenario,
)
from .studies import convergence_study, scaling_benchmark

DEFAULT_GRIDS = {"convergence": (20, 40, 80), "scaling": (25, 50, 100, 200)}
DEFAULT_REF_N = 320


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key = value file; flags override its entries")
    p.add_argument("--scenario", choices=("periodic", "shock_tube", "custom"))
    p.add_argument("--M", type=int, help="expansion order")
    p.add_argument("--N", type=int, help="number of cells")
    p.add_argument("--kn", type=float, help="Knudsen number")
    p.add_argument("--kn-prime", type=float, help="hard-sphere Knudsen number Kn' (converted)")
    p.add_argument("--cfl", type=float)
    p.add_argument("--t-end", type=float)
    p.add_argument("--no-reconstruction", dest="reconstruction", action="store_const", const=False,
                   help="first-order scheme without linear reconstruction")
    p.add_argument("--integrator", choices=("rkc", "euler"))
    p.add_argument("--epsilon", type=float, help="RKC damping parameter")
    p.add_argument("--out", help="output CSV path")
    p.add_argument("--ref-N", type=int, help="reference grid for convergence runs")
    p.add_argument("--grids", type=_parse_grids, help="comma separated list of N")
    p.add_argument("--write-coeffs", action="store_const", const=True,
                   help="also write the standard-frame coefficients up to degree 3")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nrxx", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command")
    for name, text in (
        ("run", "advance one scenario and write its profile"),
        ("convergence", "L1 errors against a fine-grid reference"),
        ("scaling", "wall time and step sizes versus N"),
    ):
        _add_common(sub.add_parser(name, help=text))
    return parser


_KEYS = ("scenario", "M", "N", "kn", "kn_prime", "cfl", "t_end", "reconstruction", "integrator",
         "epsilon", "out", "ref_N", "grids", "write_coeffs")


def config_from_args(args: argparse.Namespace) -> ScenarioConfig:
    overrides = {k: getattr(args, k) for k in _KEYS if getattr(args, k, None) is not None}
    # a flag for one Knudsen flavour replaces the other from the file
    if "kn" in overrides:
        overrides.setdefault("kn_prime", None)
    if "kn_prime" in overrides:
        overrides.setdefault("kn", None)
    if args.config is not None:
        base = ScenarioConfig.from_file(args.config)
        return base.replace(**overrides)
    return ScenarioConfig(**{k: v for k, v in overrides.items() if v is not None})


def _print_table(header, rows, out=None) -> None:
    out = sys.stdout if out is None else out
    cells = [[_cell(v) for v in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) for i, h in enumerate(header)]
    print("  ".join(h.rjust(w) for h, w in zip(header, widths)), file=out)
    for r in cells:
        print("  ".join(v.rjust(w) for v, w in zip(r, widths)), file=out)


def _cell(v) -> str:
    if isinstance(v, float):
        return "-" if math.isnan(v) else f"{v:.6g}"
    return str(v)


def cmd_run(cfg: ScenarioConfig) -> int:
    res = run_scenario(cfg)
    m = res.meta
    print(
        f"{cfg.scenario}: M={cfg.M} N={cfg.N} Kn={cfg.knudsen:.6g} t={m['t_end']:.6g} "
        f"steps={m['steps']} avg_dt={m['avg_dt']:.4g} avg_s={m['avg_s']:.3g} wall={m['wall_time']:.3g}s"
    )
    if cfg.out:
        print(f"wrote {cfg.out}")
    return 0


def cmd_convergence(cfg: ScenarioConfig) -> int:
    grids = cfg.grids or DEFAULT_GRIDS["convergence"]
    ref_N = cfg.ref_N or DEFAULT_REF_N
    rows = convergence_study(cfg.replace(out=None), grids, ref_N)
    header = ["N", "err_rho", "order_rho", "err_theta", "order_theta"]
    table = [(r.N, r.err_rho, r.order_rho, r.err_theta, r.order_theta) for r in rows]
    print(f"reference N = {ref_N}")
    _print_table(header, table)
    if cfg.out:
        lines = [",".join(header)] + [",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in r) for r in table]
        Path(cfg.out).write_text("\n".join(lines) + "\n")
    return 0


def cmd_scaling(cfg: ScenarioConfig) -> int:
    grids = cfg.grids or DEFAULT_GRIDS["scaling"]
    res = scaling_benchmark(cfg.replace(out=None), grids)
    header = ["N", "wall_time", "steps", "avg_dt", "avg_s", "avg_dt_over_s"]
    table = [(r.N, r.wall_time, r.steps, r.avg_dt, r.avg_s, r.avg_dt_over_s) for r in res.rows]
    _print_table(header, table)
    print(f"slopes: wall_time {res.slope_time:.3f}  dt {res.slope_dt:.3f}  dt/s {res.slope_dt_over_s:.3f}")
    if cfg.out:
        lines = [",".join(header)] + [",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in r) for r in table]
        Path(cfg.out).write_text("\n".join(lines) + "\n")
    return 0


COMMANDS = {"run": cmd_run, "convergence": cmd_convergence, "scaling": cmd_scaling}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in (*COMMANDS, "-h", "--help"):
        argv.insert(0, "run")
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"nrxx: configuration error: {exc}", file=sys.stderr)
        return 2
    try:
        return COMMANDS[args.command](cfg)
    except SolverBreakdown as exc:
        print(f"nrxx: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"nrxx: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
