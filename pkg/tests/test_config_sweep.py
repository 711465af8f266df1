"""Config parsing, sweep tables, CSV round-trips, comparison logic and the
command-line interface."""

import pytest

from wban_csma import (
    CompareError,
    ConfigParseError,
    DEFAULT_PHY,
    DEFAULT_UP_TABLE,
    Mechanism,
    MetricsReport,
    ResultTable,
    Scenario,
    SweepMode,
    SweepParameter,
    SweepSpec,
    Traffic,
    ValidationError,
    analytical_metrics,
    apply_sweep_value,
    base_scenario,
    compare,
    parse_config,
    relative_deviation,
    run_sweep,
    solve_fixed_point,
)
from wban_csma.cli import (
    EXIT_COMPARE,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_VALIDATION,
    main,
)


class TestParseConfig:
    def test_minimal_file_gets_defaults(self, tmp_path):
        path = tmp_path / "minimal.ini"
        path.write_text("[scenario]\nnodes_per_up = 2\n")
        scenario = parse_config(path)
        assert isinstance(scenario, Scenario)
        assert scenario.node_counts == (2,) * 8
        assert scenario.phy == DEFAULT_PHY
        assert scenario.up_table == DEFAULT_UP_TABLE

    def test_ber_validation_error(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[scenario]\nnodes_per_up = 2\nber = 1.5\n")
        with pytest.raises(ValidationError, match=r"ber outside \[0,1\]"):
            parse_config(path)

    def test_parse_error_reports_line(self, tmp_path):
        path = tmp_path / "broken.ini"
        path.write_text("[scenario]\nnodes_per_up = 2\n  dangling continuation\nber\n")
        with pytest.raises(ConfigParseError) as err:
            parse_config(path)
        assert "line" in str(err.value)

    def test_rap_sweep_file(self, tmp_path):
        path = tmp_path / "rap_sweep.ini"
        path.write_text(
            "[scenario]\n"
            "nodes_per_up = 2\n"
            "traffic = nonsaturated\n"
            "arrival_rates = 2.0\n"
            "ber = 2e-5\n"
            "eap1_len = 0.1\n"
            "[sweep]\n"
            "parameter = rap1_len\n"
            "values = 0.1 0.2 0.3 0.4 0.5 0.6 0.7 0.8\n"
            "replications = 20\n"
            "seed = 3\n"
        )
        spec = parse_config(path)
        assert isinstance(spec, SweepSpec)
        assert spec.parameter is SweepParameter.RAP1_LEN
        assert len(spec.values) == 8
        assert spec.seed == 3

    def test_phy_and_priority_overrides(self, tmp_path):
        path = tmp_path / "override.ini"
        path.write_text(
            "[scenario]\nnodes_per_up = 1\n"
            "[phy]\nsifs = 50e-6\n"
            "[up0]\ncw_min = 8\ncw_max = 32\n"
        )
        scenario = parse_config(path)
        assert scenario.phy.sifs == pytest.approx(50e-6)
        assert scenario.up_table[0].cw_min == 8
        assert scenario.up_table[0].cw_max == 32

    def test_mechanism_spellings(self, tmp_path):
        path = tmp_path / "mech.ini"
        path.write_text("[scenario]\nnodes_per_up = 1\nmechanism = RTS/CTS\n")
        assert parse_config(path).mechanism is Mechanism.RTS_CTS


class TestSweepSpec:
    def test_node_count_divisibility(self):
        with pytest.raises(ValidationError, match="divisible"):
            SweepSpec(
                base=base_scenario(),
                parameter=SweepParameter.NODE_COUNT,
                values=(12,),
            )

    def test_empty_values_rejected(self):
        with pytest.raises(ValidationError):
            SweepSpec(base=base_scenario(), parameter=SweepParameter.BER, values=())

    def test_node_count_respects_active_set(self):
        base = Scenario(node_counts=(1, 1, 0, 0, 0, 0, 0, 1), traffic=Traffic.SATURATED)
        scenario = apply_sweep_value(base, SweepParameter.NODE_COUNT, 9)
        assert scenario.node_counts == (3, 3, 0, 0, 0, 0, 0, 3)


@pytest.fixture(scope="module")
def small_spec():
    return SweepSpec(
        base=base_scenario(),
        parameter=SweepParameter.BER,
        values=(0.0, 2e-5),
        replications=2,
        seed=9,
    )


class TestSweepTables:

    def test_analytical_roundtrip(self, tmp_path, small_spec):
        table = run_sweep(small_spec, SweepMode.ANALYTICAL)
        path = tmp_path / "out.csv"
        table.write_csv(path)
        again = ResultTable.read_csv(path, "analytical")
        assert again == table

    def test_simulated_roundtrip(self, tmp_path, small_spec):
        table = run_sweep(small_spec, SweepMode.SIMULATED, horizon=2.0)
        path = tmp_path / "sim.csv"
        table.write_csv(path)
        assert ResultTable.read_csv(path, "sim") == table

    def test_analytical_bit_reproducible(self, tmp_path, small_spec):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        run_sweep(small_spec, SweepMode.ANALYTICAL).write_csv(p1)
        run_sweep(small_spec, SweepMode.ANALYTICAL).write_csv(p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_single_value_sweep_matches_solve(self):
        spec = SweepSpec(
            base=base_scenario(),
            parameter=SweepParameter.BER,
            values=(2e-5,),
        )
        table = run_sweep(spec, SweepMode.ANALYTICAL)
        report = analytical_metrics(solve_fixed_point(base_scenario()))
        idx = {c: i for i, c in enumerate(table.columns)}
        assert len(table.rows) == 8
        for row in table.rows:
            up = row[idx["up"]]
            assert row[idx["reliability"]] == pytest.approx(report.reliability[up])
            assert row[idx["throughput"]] == pytest.approx(report.throughput[up])
            assert row[idx["delay_s"]] == pytest.approx(report.delay[up])

    def test_failure_marker_keeps_sweeping(self):
        spec = SweepSpec(
            base=base_scenario(),
            parameter=SweepParameter.RAP1_LEN,
            values=(0.002, 0.8),
        )
        table = run_sweep(spec, SweepMode.ANALYTICAL)
        idx = {c: i for i, c in enumerate(table.columns)}
        statuses = {row[idx["value"]]: row[idx["status"]] for row in table.rows}
        assert statuses["0.002"] == "error:InfeasiblePhaseError"
        assert statuses["0.8"] == "ok"

    def test_both_mode_has_deviation_columns(self, small_spec):
        table = run_sweep(small_spec, SweepMode.BOTH, horizon=2.0)
        assert "reliability_dev" in table.columns
        idx = {c: i for i, c in enumerate(table.columns)}
        row = table.rows[0]
        ana, sim, dev = (
            row[idx["reliability_ana"]],
            row[idx["reliability_sim"]],
            row[idx["reliability_dev"]],
        )
        assert dev == pytest.approx(relative_deviation(ana, sim))


def _report(**per_up):
    cols = {
        "reliability": [None] * 8,
        "throughput": [None] * 8,
        "energy": [None] * 8,
        "delay": [None] * 8,
    }
    for metric, (up, value) in per_up.items():
        cols[metric][up] = value
    return MetricsReport(
        reliability=tuple(cols["reliability"]),
        throughput=tuple(cols["throughput"]),
        energy=tuple(cols["energy"]),
        delay=tuple(cols["delay"]),
    )


class TestCompare:
    def test_identical_passes_with_zero_deviation(self):
        a = _report(reliability=(2, 0.9))
        report = compare({"x": a}, {"x": a})
        assert report.passed
        assert all(r.deviation == 0.0 for r in report.rows)

    def test_documented_example(self):
        ana = _report(reliability=(1, 0.88))
        sim = _report(reliability=(1, 0.80))
        report = compare({"x": ana}, {"x": sim})
        row = report.rows[0]
        assert row.deviation == pytest.approx(0.08 / 0.88)
        assert row.within is True
        assert report.passed

    def test_outside_tolerance_fails(self):
        ana = _report(delay=(4, 0.100))
        sim = _report(delay=(4, 0.200))
        report = compare({"x": ana}, {"x": sim})
        assert not report.passed
        assert report.failures()[0].metric == "delay"

    def test_absolute_band_rescues_small_values(self):
        ana = _report(throughput=(3, 0.001))
        sim = _report(throughput=(3, 0.04))
        report = compare({"x": ana}, {"x": sim})
        assert report.passed

    def test_key_mismatch(self):
        a = _report(reliability=(0, 1.0))
        with pytest.raises(CompareError):
            compare({"x": a}, {"y": a})


class TestCli:
    def _write_scenario(self, tmp_path, extra=""):
        path = tmp_path / "scenario.ini"
        path.write_text("[scenario]\nnodes_per_up = 2\n" + extra)
        return path

    def test_solve_ok(self, tmp_path, capsys):
        path = self._write_scenario(tmp_path)
        out = tmp_path / "solve.csv"
        assert main(["solve", "--config", str(path), "--out", str(out)]) == EXIT_OK
        assert out.exists()
        assert "reliability" in capsys.readouterr().out

    def test_parse_error_exit_code(self, tmp_path):
        path = tmp_path / "broken.ini"
        path.write_text("nodes_per_up = 2\n")  # key before any section header
        assert main(["solve", "--config", str(path)]) == EXIT_PARSE

    def test_validation_exit_code(self, tmp_path):
        path = self._write_scenario(tmp_path, "ber = 2.0\n")
        assert main(["solve", "--config", str(path)]) == EXIT_VALIDATION

    def test_sweep_writes_csv(self, tmp_path):
        path = tmp_path / "sweep.ini"
        path.write_text(
            "[scenario]\nnodes_per_up = 2\n[sweep]\nparameter = ber\nvalues = 0 2e-5\n"
        )
        out = tmp_path / "table.csv"
        assert (
            main(["sweep", "--config", str(path), "--out", str(out)]) == EXIT_OK
        )
        table = ResultTable.read_csv(out, "analytical")
        assert len(table.rows) == 16

    def test_simulate_and_trace(self, tmp_path, capsys):
        path = self._write_scenario(tmp_path)
        trace = tmp_path / "events.log"
        code = main(
            [
                "simulate",
                "--config", str(path),
                "--seed", "3",
                "--replications", "2",
                "--horizon", "2.0",
                "--trace", str(trace),
            ]
        )
        assert code == EXIT_OK
        assert trace.exists() and trace.read_text()

    def test_compare_exit_reflects_verdict(self, tmp_path):
        # the bundled analytical model is known to sit outside the delay
        # band against the simulator, so the verdict here is a failure code
        path = self._write_scenario(tmp_path)
        code = main(
            [
                "compare",
                "--config", str(path),
                "--seed", "3",
                "--replications", "2",
                "--horizon", "2.0",
            ]
        )
        assert code == EXIT_COMPARE

    def test_reproduce_deterministic(self, tmp_path):
        out1 = tmp_path / "fig7a.csv"
        out2 = tmp_path / "fig7b.csv"
        assert main(["reproduce", "fig7", "--out", str(out1)]) == EXIT_OK
        assert main(["reproduce", "fig7", "--out", str(out2)]) == EXIT_OK
        assert out1.read_bytes() == out2.read_bytes()
