"""Command-line front end.

Subcommands:
  run          integrate a configured system, write diagnostics CSV,
               snapshots, and report figures
  check        execute the invariant suite, one pass/fail line per check
  convergence  refinement study with observed-order table
  sweep        run one config across a list of parameter values

Exit codes: 0 ok, 2 config error, 3 divergence, 4 solver failure,
5 check failure.
"""

from __future__ import annotations

import argparse
import copy
import csv
import sys as _sys
from pathlib import Path

import numpy as np

from .checks import run_checks
from .convergence import ConvergenceTable, dt_refinement
from .errors import ConfigError, DivergenceError, MagflowError
from .integrators import evolve
from .runconfig import build_run, dump_toml, parse_config, parse_config_dict
from .snapshots import write_snapshot

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGENCE = 3
EXIT_SOLVER = 4
EXIT_CHECK = 5

CSV_SCHEMA = "# magflow-csv v1"


def _say(quiet, *args):
    if not quiet:
        print(*args)


def _write_csv(path, records):
    extras = sorted(records[0].extra) if records else []
    with open(path, "w", newline="") as fh:
        fh.write(CSV_SCHEMA + "\n")
        writer = csv.writer(fh)
        writer.writerow(["t", "energy"] + extras)
        for r in records:
            writer.writerow(
                [repr(r.t), repr(r.energy)] + [repr(r.extra[k]) for k in extras]
            )


def _write_table_csv(path, table: ConvergenceTable):
    with open(path, "w", newline="") as fh:
        fh.write(CSV_SCHEMA + "\n")
        writer = csv.writer(fh)
        for row in table.csv_rows():
            writer.writerow(row)


def _write_snapshots(outdir, setup, traj, quiet):
    times = setup.output["snapshot_times"]
    if not times:
        return
    prefix = setup.output["snapshot_prefix"]
    ts = np.array([t for t, _ in traj])
    for want in times:
        i = int(np.argmin(np.abs(ts - float(want))))
        t, state = traj[i]
        path = Path(outdir) / f"{prefix}_t{t:.6g}.snap"
        write_snapshot(path, state, setup.system_name, setup.truncation, t)
        _say(quiet, f"wrote {path}")


def cmd_run(args) -> int:
    cfg = parse_config(args.config)
    if args.seed is not None:
        cfg["run"]["seed"] = args.seed
    return _run_config(cfg, args.out, args.quiet)


def _run_config(cfg, out, quiet) -> int:
    setup = build_run(cfg)
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "config.normalized.toml").write_text(dump_toml(cfg))
    csv_path = outdir / setup.output["csv"]
    try:
        traj, records = evolve(setup.system, setup.u0, setup.integrator)
    except DivergenceError as err:
        print(
            f"divergence in {setup.system_name}: {err}",
            file=_sys.stderr,
        )
        return EXIT_DIVERGENCE
    _write_csv(csv_path, records)
    _say(quiet, f"wrote {csv_path}  ({len(records)} records,"
                f" final t={records[-1].t:g})")
    _write_snapshots(outdir, setup, traj, quiet)
    if setup.output["figures"]:
        from .figures import render_diagnostics

        fig_path = outdir / (Path(setup.output["csv"]).stem + ".png")
        render_diagnostics(records, fig_path, title=setup.system_name)
        _say(quiet, f"wrote {fig_path}")
    return EXIT_OK


def cmd_check(args) -> int:
    results = run_checks(
        seed=args.seed if args.seed is not None else 0,
        flip_bracket_sign=args.flip_bracket_sign,
        samples=args.samples,
    )
    for r in results:
        _say(args.quiet, r.line())
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} of {len(results)} checks failed", file=_sys.stderr)
        return EXIT_CHECK
    _say(args.quiet, f"all {len(results)} checks passed")
    return EXIT_OK


def cmd_convergence(args) -> int:
    cfg = parse_config(args.config)
    if args.seed is not None:
        cfg["run"]["seed"] = args.seed
    if args.levels < 3:
        raise ConfigError("need at least 3 refinement levels", kind="schema")
    setup = build_run(cfg)
    table = dt_refinement(
        setup.system, setup.u0, setup.integrator.dt, setup.integrator.t_end,
        args.levels, scheme=setup.integrator.scheme,
    )
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / "convergence.csv"
    _write_table_csv(csv_path, table)
    for line in table.lines():
        _say(args.quiet, line)
    _say(args.quiet, f"wrote {csv_path}")
    if setup.output["figures"]:
        from .figures import render_convergence

        fig_path = outdir / "convergence.png"
        render_convergence(table, fig_path, title=setup.system_name)
        _say(args.quiet, f"wrote {fig_path}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = parse_config(args.config)
    if "sweep" not in cfg:
        raise ConfigError("sweep subcommand needs a [sweep] section",
                          kind="schema", key="sweep")
    if args.seed is not None:
        cfg["run"]["seed"] = args.seed
    param = cfg["sweep"]["parameter"]
    _, _, key = param.partition(".")
    worst = EXIT_OK
    for value in cfg["sweep"]["values"]:
        sub = copy.deepcopy(cfg)
        del sub["sweep"]
        sub["params"][key] = value
        sub = parse_config_dict(sub)
        rundir = Path(args.out) / f"{key}={value:g}"
        _say(args.quiet, f"--- {param} = {value:g} -> {rundir}")
        code = _run_config(sub, rundir, args.quiet)
        worst = max(worst, code)
    return worst


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="magflow",
        description="Simulation and verification toolkit for magnetic"
        " Euler-Arnold equations",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_required=True):
        if config_required:
            sp.add_argument("--config", required=True, help="TOML run config")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--quiet", action="store_true")

    sp = sub.add_parser("run", help="integrate one configured system")
    common(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("check", help="execute the invariant suite")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--out", default=".")
    sp.add_argument("--quiet", action="store_true")
    sp.add_argument("--samples", type=int, default=10,
                    help="random samples per identity")
    sp.add_argument("--flip-bracket-sign", action="store_true",
                    help="negate every bracket (negative control)")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("convergence", help="dt-refinement study")
    common(sp)
    sp.add_argument("--levels", type=int, default=4)
    sp.set_defaults(func=cmd_convergence)

    sp = sub.add_parser("sweep", help="run a config across parameter values")
    common(sp)
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error ({err.kind}): {err}", file=_sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as err:
        print(f"divergence: {err}", file=_sys.stderr)
        return EXIT_DIVERGENCE
    except MagflowError as err:
        print(f"solver error: {err}", file=_sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    raise SystemExit(main())
