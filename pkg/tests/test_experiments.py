import csv
import json

import jsonschema
import pytest

from spinlock_qa.experiments import (
    ExperimentConfig,
    ResultTable,
    apply_overrides,
    export,
    load_config,
    read_table,
    run_experiment,
)
from spinlock_qa.experiments.cli import main
from spinlock_qa.experiments.runs import fig3_agreement, linear_fit
from spinlock_qa.experiments.table import meta_path

SHORT = {"t_end_ns": 20.0}


def short_cfg(experiment, **extra):
    data = {"experiment": experiment, "spec": dict(SHORT)}
    data.update(extra)
    return ExperimentConfig.from_dict(data)


def test_unknown_keys_rejected():
    with pytest.raises(jsonschema.ValidationError):
        ExperimentConfig.from_dict({"experiment": "fig1", "omega": 2.4})
    with pytest.raises(jsonschema.ValidationError):
        ExperimentConfig.from_dict({"spec": {"Lambda": 1.0}})
    with pytest.raises(jsonschema.ValidationError):
        ExperimentConfig.from_dict({"frame": "interaction"})


def test_invalid_physics_fails_before_running():
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"experiment": "custom", "spec": {"h_ghz": [0.1, 0.2, 0.3]}})
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"L_range": [5, 3]})


def test_overrides():
    data = apply_overrides({"spec": {"L": 2}}, ["spec.L=3", "omega_list_ghz=[2.4,4.8]", "frame=rotating"])
    assert data == {"spec": {"L": 3}, "omega_list_ghz": [2.4, 4.8], "frame": "rotating"}
    with pytest.raises(ValueError):
        apply_overrides({}, ["spec.L"])


def test_experiment_defaults_resolve():
    assert ExperimentConfig(experiment="fig2").build_spec().omega_ghz == 4.8
    spec = ExperimentConfig(experiment="fig3").build_spec()
    assert spec.L == 2 and spec.qubit_freqs_ghz == pytest.approx((2.4, 4.3))
    two_pi = ExperimentConfig(gamma_convention="two_pi_per_ns").build_spec()
    assert two_pi.gamma_per_ns == pytest.approx(0.02 * 3.141592653589793)


def test_load_config_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"experiment": "custom", "spec": {"L": 2, "t_end_ns": 5.0}}))
    cfg = load_config(path, ["spec.L=3"], format="json")
    assert cfg.build_spec().L == 3 and cfg.format == "json"


def test_csv_header_and_round_trip(tmp_path):
    table = run_experiment(short_cfg("custom", frame="rotating", spec={"L": 2, **SHORT}))
    out = export(table, tmp_path / "run.csv")
    with open(out, newline="") as fh:
        header = next(csv.reader(fh))
    assert header == ["experiment", "run_id", "frame", "t_ns", "fidelity", "infidelity", "norm_drift"]
    back = read_table(out)
    assert back.rows == table.rows
    assert back.metadata["code_version"] == table.metadata["code_version"]
    assert meta_path(out).exists()


def test_json_round_trip(tmp_path):
    table = run_experiment(short_cfg("fig3", fig3_quadrature=False))
    out = export(table, tmp_path / "fig3.json", "json")
    back = read_table(out)
    assert back.rows == table.rows
    assert back.param_keys == ("curve",)


def test_empty_table_exports_header_only(tmp_path):
    table = ResultTable("fig1", ("omega_ghz",))
    out = export(table, tmp_path / "empty.csv")
    assert out.read_text() == "experiment,run_id,omega_ghz,t_ns,fidelity,infidelity,norm_drift\n"
    with pytest.raises(ValueError):
        export(table, tmp_path / "x.txt", "parquet")


def test_deterministic_output(tmp_path):
    cfg = short_cfg("fig1", omega_list_ghz=[2.4, 4.8])
    a = export(run_experiment(cfg), tmp_path / "a.csv").read_bytes()
    b = export(run_experiment(cfg), tmp_path / "b.csv").read_bytes()
    assert a == b


def test_workers_do_not_change_results():
    cfg = short_cfg("fig1", omega_list_ghz=[2.4, 3.6])
    serial = run_experiment(cfg)
    parallel = run_experiment(short_cfg("fig1", omega_list_ghz=[2.4, 3.6], workers=2))
    assert serial.rows == parallel.rows


def test_fig2_row_matches_fig1_run():
    fig1 = run_experiment(short_cfg("fig1", omega_list_ghz=[4.8]))
    fig2 = run_experiment(short_cfg("fig2", L_range=[4, 4]))
    assert fig2.rows[0]["fidelity"] == fig1.rows[-1]["fidelity"]


def test_gap_scan():
    table = run_experiment(ExperimentConfig(experiment="gap_scan", gap_scan_points=101))
    meta = table.metadata
    assert meta["min_gap"] > 0.01
    assert meta["checks"]["min gap > gamma"]
    assert not meta["adiabaticity_warning"]
    first, last = table.rows[0], table.rows[-1]
    assert first["gap_rad_per_ns"] == pytest.approx(2 * 3.141592653589793)
    # B -> 1: Ising levels are -h - J/2, h - J/2, +J/2 (twice); gap 2h
    assert last["gap_rad_per_ns"] == pytest.approx(2 * 3.141592653589793 * 0.06, rel=1e-6)
    assert last["fidelity"] == pytest.approx(1.0)


def test_violations_report_failed_checks():
    table = ResultTable("x", ())
    table.metadata["checks"] = {"a": True, "b": False}
    table.add("r", {}, 0.0, 1.0, 2e-6)
    assert table.violations() == ["r t=0.0: norm drift 2e-06", "check failed: b"]
    with pytest.raises(ValueError):
        table.add("r", {"extra": 1}, 0.0, 1.0, None)


def test_helpers():
    fit = linear_fit([2, 3, 4], [0.9, 0.8, 0.7])
    assert fit["slope"] == pytest.approx(-0.1) and fit["r2"] == pytest.approx(1.0)
    assert fig3_agreement(0.004, 0.006)
    assert not fig3_agreement(0.0, 0.0056)
    assert fig3_agreement(0.0, 0.005)


def test_cli_stdout(capsys):
    code = main(["run", "--experiment", "custom", "--set", "spec.L=1", "--set", "spec.t_end_ns=3"])
    out = capsys.readouterr().out.splitlines()
    assert code == 0
    assert out[0] == "experiment,run_id,frame,t_ns,fidelity,infidelity,norm_drift"
    assert len(out) == 1 + 4


def test_cli_writes_file(tmp_path):
    out = tmp_path / "gap.json"
    code = main(["run", "--experiment", "gap_scan", "--set", "gap_scan_points=11", "--out", str(out), "--format", "json"])
    assert code == 0
    assert len(json.loads(out.read_text())["rows"]) == 11


def test_cli_invalid_config(capsys):
    assert main(["run", "--set", "spec.bogus=1"]) == 2
    assert "invalid configuration" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_cli_failing_check_exits_nonzero(capsys):
    code = main(["run", "--experiment", "gap_scan", "--set", "spec.gamma_per_ns=1.0", "--set", "gap_scan_points=11"])
    assert code == 1
    assert "[FAIL] min gap > gamma" in capsys.readouterr().err
