"""Command-line front end.

Subcommands::

    solve      one analytical solve of a scenario config
    sweep      run the sweep described by a config file
    simulate   discrete-event replications of a scenario config
    compare    analytical vs simulated metrics with tolerance verdicts
    reproduce  named experiment presets (fig5 .. fig12)

Exit codes: 0 success, 2 config parse error, 3 validation/infeasibility,
4 solver non-convergence, 5 comparison outside tolerances, 1 anything else.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .config import SweepParameter, SweepSpec, parse_config
from .errors import (
    ConfigParseError,
    ConvergenceError,
    InfeasiblePhaseError,
    ValidationError,
    WbanCsmaError,
)
from .metrics import analytical_metrics
from .params import NUM_PRIORITIES, Scenario
from .presets import PRESET_HORIZON, PRESET_NAMES, PRESET_REPLICATIONS, preset
from .sim import run_replications, run_simulation, sim_metrics, summarize_replications
from .solver import solve_fixed_point
from .sweep import (
    ResultTable,
    SweepMode,
    compare,
    run_sweep,
)

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_CONVERGENCE = 4
EXIT_COMPARE = 5


def _fmt(value, width=12, digits=6):
    if value is None:
        return " " * (width - 3) + "n/a"
    return f"{value:>{width}.{digits}g}"


def _print_report(report, header):
    print(header)
    print(f"{'UP':>3} {'reliability':>12} {'throughput':>12} {'energy_J':>12} {'delay_s':>12}")
    for i in range(NUM_PRIORITIES):
        if report.reliability[i] is None and report.throughput[i] is None:
            continue
        print(
            f"{i:>3} {_fmt(report.reliability[i])} {_fmt(report.throughput[i])} "
            f"{_fmt(report.energy[i])} {_fmt(report.delay[i])}"
        )


def _single_value_spec(scenario: Scenario, seed: int, replications: int) -> SweepSpec:
    # a degenerate sweep reuses the table schema for single-scenario output
    return SweepSpec(
        base=scenario,
        parameter=SweepParameter.BER,
        values=(scenario.ber,),
        replications=replications,
        seed=seed,
    )


def _load_scenario(path) -> Scenario:
    loaded = parse_config(path)
    if isinstance(loaded, SweepSpec):
        raise ValidationError(
            f"{path} defines a sweep; this subcommand needs a plain scenario"
        )
    return loaded


def _cmd_solve(args) -> int:
    scenario = _load_scenario(args.config)
    solution = solve_fixed_point(scenario)
    report = analytical_metrics(solution)
    _print_report(report, f"analytical metrics ({args.config})")
    print(f"iterations={solution.iterations} residual={solution.residual:.3e}")
    if args.out:
        table = run_sweep(_single_value_spec(scenario, 0, 1), SweepMode.ANALYTICAL)
        table.write_csv(args.out)
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    loaded = parse_config(args.config)
    if isinstance(loaded, Scenario):
        raise ValidationError(f"{args.config} has no [sweep] section")
    spec = loaded
    if args.seed is not None or args.replications is not None:
        spec = SweepSpec(
            base=spec.base,
            parameter=spec.parameter,
            values=spec.values,
            replications=args.replications or spec.replications,
            seed=args.seed if args.seed is not None else spec.seed,
        )
    table = run_sweep(
        spec, SweepMode(args.mode), horizon=args.horizon, parallel=args.parallel
    )
    table.write_csv(args.out)
    print(f"wrote {args.out} ({len(table.rows)} rows)")
    if args.plot:
        _plot(table, Path(args.out).with_suffix(".svg"))
    return EXIT_OK


def _cmd_simulate(args) -> int:
    scenario = _load_scenario(args.config)
    if args.trace:
        with open(args.trace, "w") as handle:
            run_simulation(scenario, (args.seed, 0), args.horizon, trace=handle)
        print(f"wrote trace of replication 0 to {args.trace}")
    stats = run_replications(
        scenario, args.seed, args.horizon, args.replications, parallel=args.parallel
    )
    reports = [sim_metrics(s, scenario) for s in stats]
    mean, half = summarize_replications(reports)
    _print_report(mean, f"simulated metrics ({args.replications} x {args.horizon}s)")
    if args.out:
        spec = _single_value_spec(scenario, args.seed, args.replications)
        table = run_sweep(
            spec, SweepMode.SIMULATED, horizon=args.horizon, parallel=args.parallel
        )
        table.write_csv(args.out)
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    scenario = _load_scenario(args.config)
    solution = solve_fixed_point(scenario)
    analytical = analytical_metrics(solution)
    stats = run_replications(
        scenario, args.seed, args.horizon, args.replications, parallel=args.parallel
    )
    mean, _ = summarize_replications([sim_metrics(s, scenario) for s in stats])
    report = compare({"scenario": analytical}, {"scenario": mean})
    print(f"{'UP':>3} {'metric':>12} {'analytical':>12} {'simulated':>12} {'dev':>9} verdict")
    for row in report.rows:
        verdict = "-" if row.within is None else ("pass" if row.within else "FAIL")
        dev = "n/a" if row.deviation is None else f"{row.deviation:8.4f}"
        print(
            f"{row.up:>3} {row.metric:>12} {_fmt(row.analytical)} "
            f"{_fmt(row.simulated)} {dev:>9} {verdict}"
        )
    if args.out:
        with open(args.out, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["up", "metric", "analytical", "simulated", "deviation", "within"])
            for row in report.rows:
                writer.writerow(
                    [
                        row.up,
                        row.metric,
                        "" if row.analytical is None else repr(row.analytical),
                        "" if row.simulated is None else repr(row.simulated),
                        "" if row.deviation is None else repr(row.deviation),
                        "" if row.within is None else row.within,
                    ]
                )
        print(f"wrote {args.out}")
    print("comparison:", "pass" if report.passed else "FAIL")
    return EXIT_OK if report.passed else EXIT_COMPARE


def _cmd_reproduce(args) -> int:
    mode = SweepMode(args.mode)
    specs = preset(args.preset, seed=args.seed)
    tables = [
        run_sweep(
            spec,
            mode,
            horizon=args.horizon,
            parallel=args.parallel,
        )
        for spec in specs
    ]
    merged = tables[0].with_rows([row for t in tables for row in t.rows])
    out = args.out or f"{args.preset}.csv"
    merged.write_csv(out)
    print(f"wrote {out} ({len(merged.rows)} rows)")
    if args.plot:
        _plot(merged, Path(out).with_suffix(".svg"))
    return EXIT_OK


def _plot(table: ResultTable, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    idx = {name: i for i, name in enumerate(table.columns)}
    metric_cols = [c for c in ("reliability", "throughput", "energy_j", "delay_s") if c in idx]
    if not metric_cols:
        metric_cols = [c for c in table.columns if c.endswith("_ana")]
    fig, axes = plt.subplots(2, 2, figsize=(10, 7))
    for ax, col in zip(axes.flat, metric_cols[:4]):
        series = {}
        for row in table.rows:
            up = row[idx["up"]]
            key = (up, row[idx["mechanism"]])
            try:
                x = float(row[idx["value"]])
            except ValueError:
                x = len(series.get(key, ([], []))[0])
            y = row[idx[col]]
            xs, ys = series.setdefault(key, ([], []))
            if y is not None:
                xs.append(x)
                ys.append(y)
        for (up, mech), (xs, ys) in sorted(series.items()):
            ax.plot(xs, ys, marker="o", markersize=3, label=f"UP{up} {mech}")
        ax.set_title(col)
        ax.set_xlabel(table.rows[0][idx["parameter"]] if table.rows else "value")
    handles, labels = axes.flat[0].get_legend_handles_labels()
    fig.legend(handles, labels, loc="lower center", ncol=4, fontsize=7)
    fig.tight_layout(rect=(0, 0.08, 1, 1))
    fig.savefig(path)
    plt.close(fig)
    print(f"wrote {path}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wban-csma",
        description="Analytical model and discrete-event simulator for "
        "IEEE 802.15.6 CSMA/CA performance evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, sim=False):
        p.add_argument("--out", help="output CSV path")
        p.add_argument("--parallel", type=int, default=1, help="worker processes")
        if sim:
            p.add_argument("--seed", type=int, default=1)
            p.add_argument("--replications", type=int, default=PRESET_REPLICATIONS)
            p.add_argument("--horizon", type=float, default=PRESET_HORIZON,
                           help="simulated seconds per replication")

    p_solve = sub.add_parser("solve", help="single analytical solve")
    p_solve.add_argument("--config", required=True)
    p_solve.add_argument("--out")
    p_solve.set_defaults(func=_cmd_solve)

    p_sweep = sub.add_parser("sweep", help="run a configured parameter sweep")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--mode", choices=[m.value for m in SweepMode],
                         default="analytical")
    p_sweep.add_argument("--plot", action="store_true")
    p_sweep.add_argument("--seed", type=int)
    p_sweep.add_argument("--replications", type=int)
    p_sweep.add_argument("--horizon", type=float, default=PRESET_HORIZON)
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--parallel", type=int, default=1)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_sim = sub.add_parser("simulate", help="discrete-event replications")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--trace", help="write an event log of replication 0")
    common(p_sim, sim=True)
    p_sim.set_defaults(func=_cmd_simulate)

    p_cmp = sub.add_parser("compare", help="analytical vs simulation verdicts")
    p_cmp.add_argument("--config", required=True)
    common(p_cmp, sim=True)
    p_cmp.set_defaults(func=_cmd_compare)

    p_rep = sub.add_parser("reproduce", help="named experiment presets")
    p_rep.add_argument("preset", choices=PRESET_NAMES)
    p_rep.add_argument("--mode", choices=[m.value for m in SweepMode],
                       default="analytical")
    p_rep.add_argument("--plot", action="store_true")
    common(p_rep, sim=True)
    p_rep.set_defaults(func=_cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigParseError as exc:
        print(f"config parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValidationError, InfeasiblePhaseError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConvergenceError as exc:
        print(f"solver did not converge: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except WbanCsmaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
