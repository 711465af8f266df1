"""Parameter sweeps, CSV result tables and analytical-vs-simulated
comparison."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum

from .config import SweepSpec, apply_sweep_value
from .errors import CompareError, WbanCsmaError
from .metrics import MetricsReport, analytical_metrics
from .params import NUM_PRIORITIES, Scenario
from .sim import run_replications, sim_metrics, summarize_replications
from .solver import solve_fixed_point

SCHEMA_VERSION = 1

_IDENTITY_COLUMNS = (
    ("schema", "int"),
    ("parameter", "str"),
    ("value", "str"),
    ("mechanism", "str"),
    ("traffic", "str"),
    ("up", "int"),
    ("nodes", "int"),
    ("status", "str"),
)
_ANALYTICAL_COLUMNS = _IDENTITY_COLUMNS + (
    ("reliability", "float"),
    ("throughput", "float"),
    ("energy_j", "float"),
    ("delay_s", "float"),
    ("iterations", "int"),
    ("residual", "float"),
)
_SIMULATED_COLUMNS = _IDENTITY_COLUMNS + (
    ("reliability", "float"),
    ("throughput", "float"),
    ("energy_j", "float"),
    ("delay_s", "float"),
    ("replications", "int"),
    ("reliability_hw", "float"),
    ("throughput_hw", "float"),
    ("energy_hw", "float"),
    ("delay_hw", "float"),
)
_BOTH_COLUMNS = _IDENTITY_COLUMNS + tuple(
    (f"{metric}_{side}", "float")
    for metric in ("reliability", "throughput", "energy_j", "delay_s")
    for side in ("ana", "sim", "dev")
)

_SCHEMAS = {
    "analytical": _ANALYTICAL_COLUMNS,
    "sim": _SIMULATED_COLUMNS,
    "both": _BOTH_COLUMNS,
}


class SweepMode(Enum):
    ANALYTICAL = "analytical"
    SIMULATED = "sim"
    BOTH = "both"


@dataclass(frozen=True)
class ResultTable:
    """Rows of typed cells with a fixed, versioned column schema."""

    columns: tuple
    types: tuple
    rows: tuple

    def write_csv(self, path):
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(self.columns)
            for row in self.rows:
                writer.writerow(["" if v is None else _encode(v) for v in row])

    @classmethod
    def read_csv(cls, path, schema: str):
        spec = _SCHEMAS[schema]
        names = tuple(name for name, _ in spec)
        types = tuple(kind for _, kind in spec)
        with open(path, newline="") as handle:
            reader = csv.reader(handle)
            header = tuple(next(reader))
            if header != names:
                raise WbanCsmaError(
                    f"CSV header does not match the {schema} schema"
                )
            rows = []
            for raw in reader:
                rows.append(
                    tuple(
                        _decode(cell, kind) for cell, kind in zip(raw, types)
                    )
                )
        return cls(columns=names, types=types, rows=tuple(rows))

    @classmethod
    def empty(cls, schema: str):
        spec = _SCHEMAS[schema]
        return cls(
            columns=tuple(n for n, _ in spec),
            types=tuple(k for _, k in spec),
            rows=(),
        )

    def with_rows(self, rows):
        return ResultTable(columns=self.columns, types=self.types, rows=tuple(rows))


def _encode(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _decode(cell: str, kind: str):
    if cell == "":
        return None
    if kind == "int":
        return int(cell)
    if kind == "float":
        return float(cell)
    return cell


def format_value(value) -> str:
    """Canonical string form of a swept value for the `value` column."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _identity(scenario: Scenario, parameter, value, up: int, status: str):
    return (
        SCHEMA_VERSION,
        parameter.value,
        format_value(value),
        scenario.mechanism.value,
        scenario.traffic.value,
        up,
        scenario.node_counts[up],
        status,
    )


def _metric_cells(report: MetricsReport | None, up: int):
    if report is None:
        return (None, None, None, None)
    return (
        report.reliability[up],
        report.throughput[up],
        report.energy[up],
        report.delay[up],
    )


def _sim_point(scenario, seed, horizon, replications, parallel):
    stats = run_replications(scenario, seed, horizon, replications, parallel=parallel)
    reports = [sim_metrics(s, scenario) for s in stats]
    return summarize_replications(reports)


def run_sweep(
    spec: SweepSpec,
    mode: SweepMode = SweepMode.ANALYTICAL,
    horizon: float = 60.0,
    parallel: int = 1,
) -> ResultTable:
    """One row per (swept value, active priority).

    Scenario-level failures are recorded in-row via the status column and
    the sweep continues.  Given the same spec and seed the output is
    deterministic; the analytical mode involves no randomness at all.
    """
    table = ResultTable.empty(mode.value)
    rows = []
    for index, value in enumerate(spec.values):
        scenario = apply_sweep_value(spec.base, spec.parameter, value)
        status = "ok"
        analytical = None
        simulated = half = None
        try:
            if mode in (SweepMode.ANALYTICAL, SweepMode.BOTH):
                solution = solve_fixed_point(scenario)
                analytical = analytical_metrics(solution)
            if mode in (SweepMode.SIMULATED, SweepMode.BOTH):
                simulated, half = _sim_point(
                    scenario, (spec.seed, index), horizon, spec.replications, parallel
                )
        except WbanCsmaError as exc:
            status = f"error:{type(exc).__name__}"
        for up in scenario.active_priorities():
            identity = _identity(scenario, spec.parameter, value, up, status)
            if mode is SweepMode.ANALYTICAL:
                cells = _metric_cells(analytical, up) + (
                    (solution.iterations, solution.residual)
                    if status == "ok"
                    else (None, None)
                )
            elif mode is SweepMode.SIMULATED:
                cells = _metric_cells(simulated, up)
                cells += (spec.replications,) + _metric_cells(half, up)
            else:
                cells = ()
                for ana, sim in zip(
                    _metric_cells(analytical, up), _metric_cells(simulated, up)
                ):
                    cells += (ana, sim, relative_deviation(ana, sim))
            rows.append(identity + cells)
    return table.with_rows(rows)


def relative_deviation(analytical, simulated):
    """|simulated - analytical| / |analytical| (None when undefined)."""
    if analytical is None or simulated is None:
        return None
    if analytical == 0.0:
        return 0.0 if simulated == 0.0 else math.inf
    return abs(simulated - analytical) / abs(analytical)


@dataclass(frozen=True)
class MetricTolerance:
    relative: float
    absolute: float | None = None


#: Cross-validation bands: reliability and throughput accept the looser of
#: a relative or absolute criterion, delay is relative-only, energy is
#: reported but not gated.
DEFAULT_TOLERANCES = {
    "reliability": MetricTolerance(0.15, 0.05),
    "throughput": MetricTolerance(0.15, 0.05),
    "delay": MetricTolerance(0.25, None),
    "energy": None,
}


@dataclass(frozen=True)
class Deviation:
    key: str
    up: int
    metric: str
    analytical: float | None
    simulated: float | None
    deviation: float | None
    within: bool | None


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple
    passed: bool

    def failures(self):
        return [row for row in self.rows if row.within is False]


def compare(analytical, simulated, tolerances=None) -> ComparisonReport:
    """Per-priority, per-metric deviation between two keyed report sets.

    ``analytical`` and ``simulated`` map matching keys to MetricsReport
    instances.  A metric with no configured tolerance is reported with
    ``within=None`` and does not affect the verdict.
    """
    if tolerances is None:
        tolerances = DEFAULT_TOLERANCES
    if set(analytical) != set(simulated):
        raise CompareError(
            f"mismatched keys: {sorted(analytical)} vs {sorted(simulated)}"
        )
    rows = []
    passed = True
    for key in analytical:
        ana, sim = analytical[key], simulated[key]
        for up in range(NUM_PRIORITIES):
            for metric in ("reliability", "throughput", "energy", "delay"):
                a = getattr(ana, metric)[up]
                s = getattr(sim, metric)[up]
                if a is None and s is None:
                    continue
                dev = relative_deviation(a, s)
                tol = tolerances.get(metric)
                if tol is None:
                    within = None
                elif a is None or s is None:
                    within = False
                else:
                    within = dev <= tol.relative or (
                        tol.absolute is not None and abs(s - a) <= tol.absolute
                    )
                if within is False:
                    passed = False
                rows.append(Deviation(str(key), up, metric, a, s, dev, within))
    return ComparisonReport(rows=tuple(rows), passed=passed)
