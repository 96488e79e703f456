"""End-to-end tests for the setr command line"""
import csv
import json
from pathlib import Path

import pytest

from src.presentation.cli import main


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Run every command against a fresh config directory"""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("SETR_CONFIG_DIR", str(tmp_path / "config"))
    monkeypatch.setenv("SETR_LOG_LEVEL", "WARNING")


def _report(out_dir, command):
    with open(Path(out_dir) / f"{command}_report.json", encoding="utf-8") as f:
        return json.load(f)


def test_compute_weak_constant(baseline_scenario_data, write_scenario, capsys):
    path = write_scenario(baseline_scenario_data)
    assert main(["compute", "--config", path]) == 0

    out_dir = baseline_scenario_data['output']
    assert capsys.readouterr().out.strip() == str(Path(out_dir) / "compute_report.json")
    report = _report(out_dir, "compute")
    assert report['status'] == "ok"
    assert report['scenario'] == "baseline"
    assert report['labels'] == ["carbon-allowance"]
    assert report['results']['setr']['value'] == pytest.approx(0.75, rel=1e-8)
    assert report['results']['setr']['method'] == "WeakConstant"
    assert report['diagnostics']['normalized_config']['market']['s0'] == 1.0
    assert len(report['config_hash']) == 64


def test_compute_is_reproducible(baseline_scenario_data, write_scenario):
    path = write_scenario(baseline_scenario_data)
    report_file = Path(baseline_scenario_data['output']) / "compute_report.json"
    assert main(["compute", "--config", path]) == 0
    first = report_file.read_bytes()
    assert main(["compute", "--config", path]) == 0
    assert report_file.read_bytes() == first


def test_missing_premium_is_a_validation_error(baseline_scenario_data, write_scenario, capsys):
    del baseline_scenario_data['premium']
    path = write_scenario(baseline_scenario_data)
    assert main(["compute", "--config", path]) == 2
    assert "premium" in capsys.readouterr().err
    assert not Path(baseline_scenario_data['output']).exists()


def test_missing_config_flag():
    assert main(["compute"]) == 2


def test_non_object_scenario_with_overrides(tmp_path):
    listed = tmp_path / "listed.json"
    listed.write_text("[]", encoding="utf-8")
    assert main(["compute", "--config", str(listed), "--out", str(tmp_path / "out"), "--seed", "5"]) == 2


def test_negative_seed_override(baseline_scenario_data, write_scenario):
    path = write_scenario(baseline_scenario_data)
    assert main(["compute", "--config", path, "--seed", "-4"]) == 2


def test_divergent_geometric_writes_a_failed_report(baseline_scenario_data, write_scenario):
    baseline_scenario_data['setr_mode'] = "geometric"
    baseline_scenario_data['premium'] = {"kind": "geometric", "p0_per_day": 0.001, "lambda_per_day": 0.002}
    path = write_scenario(baseline_scenario_data)
    assert main(["compute", "--config", path]) == 3

    report = _report(baseline_scenario_data['output'], "compute")
    assert report['status'] == "failed"
    assert report['diagnostics']['error']['type'] == "DivergentExpectation"


def test_geometric_compute_notes_the_growth_origin(baseline_scenario_data, write_scenario):
    baseline_scenario_data['setr_mode'] = "geometric"
    baseline_scenario_data['premium'] = {"kind": "geometric", "p0_per_day": 0.001, "lambda_per_day": 0.001}
    path = write_scenario(baseline_scenario_data)
    assert main(["compute", "--config", path]) == 0

    report = _report(baseline_scenario_data['output'], "compute")
    assert report['results']['setr']['value'] == pytest.approx(3.0, rel=1e-6)
    assert any("t0" in warning for warning in report['warnings'])


def test_out_override(baseline_scenario_data, write_scenario, tmp_path):
    path = write_scenario(baseline_scenario_data)
    assert main(["compute", "--config", path, "--out", str(tmp_path / "other")]) == 0
    assert (tmp_path / "other" / "compute_report.json").exists()
    assert not Path(baseline_scenario_data['output']).exists()


def test_curve_is_flat_for_exponential(baseline_scenario_data, write_scenario):
    baseline_scenario_data['setr_mode'] = "strong_curve"
    path = write_scenario(baseline_scenario_data)
    assert main(["curve", "--config", path]) == 0

    out_dir = Path(baseline_scenario_data['output'])
    with open(out_dir / "strong_curve.csv", newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["t_prime_days", "phi"]
    assert len(rows) == 17
    for _, phi in rows[1:]:
        assert float(phi) == pytest.approx(0.75, rel=1e-8)

    report = _report(out_dir, "curve")
    assert report['results']['curve_file'] == "strong_curve.csv"
    assert report['results']['spread'] <= 1e-10


def test_curve_with_empty_grid(baseline_scenario_data, write_scenario):
    baseline_scenario_data['grid_days'] = []
    path = write_scenario(baseline_scenario_data)
    assert main(["curve", "--config", path]) == 2


def test_curve_without_grid(baseline_scenario_data, write_scenario):
    del baseline_scenario_data['grid_days']
    path = write_scenario(baseline_scenario_data)
    assert main(["curve", "--config", path]) == 2


def test_simulate_writes_paths_and_manifest(baseline_scenario_data, write_scenario):
    path = write_scenario(baseline_scenario_data)
    assert main(["simulate", "--config", path, "--paths", "4"]) == 0

    out_dir = Path(baseline_scenario_data['output'])
    for i in range(4):
        with open(out_dir / f"path_{i:05d}.csv", newline="", encoding="utf-8") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["t_days", "riskfree", "carbon"]
        assert len(rows) == 1502

    manifest = json.loads((out_dir / "manifest.json").read_text(encoding="utf-8"))
    assert [entry['path_index'] for entry in manifest['paths']] == [0, 1, 2, 3]
    assert manifest['phi'] == pytest.approx(0.75, rel=1e-8)

    report = _report(out_dir, "simulate")
    assert report['results']['n_paths'] == 4
    assert report['results']['phi_source'] == "weak_constant"
    assert "manifest.json" in report['results']['files']


def test_simulate_is_byte_identical_across_runs_and_workers(baseline_scenario_data, write_scenario):
    path = write_scenario(baseline_scenario_data)
    out_dir = Path(baseline_scenario_data['output'])
    names = [f"path_{i:05d}.csv" for i in range(4)] + ["manifest.json", "simulate_report.json"]

    assert main(["simulate", "--config", path, "--paths", "4"]) == 0
    first = {name: (out_dir / name).read_bytes() for name in names}
    assert main(["simulate", "--config", path, "--paths", "4"]) == 0
    assert {name: (out_dir / name).read_bytes() for name in names} == first

    baseline_scenario_data['market']['workers'] = 4
    pooled = write_scenario(baseline_scenario_data, "pooled.json")
    assert main(["simulate", "--config", pooled, "--paths", "4"]) == 0
    for name in names[:-1]:
        assert (out_dir / name).read_bytes() == first[name]
    assert _report(out_dir, "simulate")['config_hash'] == json.loads(first["simulate_report.json"])['config_hash']


def test_simulate_rejects_zero_paths(baseline_scenario_data, write_scenario):
    path = write_scenario(baseline_scenario_data)
    assert main(["simulate", "--config", path, "--paths", "0"]) == 2


def test_simulate_needs_a_market(baseline_scenario_data, write_scenario):
    del baseline_scenario_data['market']
    path = write_scenario(baseline_scenario_data)
    assert main(["simulate", "--config", path]) == 2


def test_verify_passes_for_the_weak_setr(baseline_scenario_data, write_scenario):
    path = write_scenario(baseline_scenario_data)
    assert main(["verify", "--config", path, "--paths", "100000"]) == 0

    report = _report(baseline_scenario_data['output'], "verify")
    assert report['results']['passed'] is True
    assert report['results']['se_multiple'] == 3.0
    assert report['results']['analytic_expected_premium_earnings']['value'] == pytest.approx(0.75, rel=1e-8)


def test_verify_fails_for_a_doubled_shock(baseline_scenario_data, write_scenario):
    baseline_scenario_data['phi_override'] = 1.5
    path = write_scenario(baseline_scenario_data)
    assert main(["verify", "--config", path, "--paths", "2000"]) == 1

    report = _report(baseline_scenario_data['output'], "verify")
    assert report['status'] == "failed"
    assert report['results']['passed'] is False
    assert report['results']['phi_source'] == "phi_override"


def test_verify_zero_case(baseline_scenario_data, write_scenario):
    baseline_scenario_data['premium'] = {"kind": "constant", "p_per_day": 0.0}
    path = write_scenario(baseline_scenario_data)
    assert main(["verify", "--config", path, "--paths", "500"]) == 0

    monte_carlo = _report(baseline_scenario_data['output'], "verify")['results']['monte_carlo']
    assert monte_carlo['residual'] == 0.0
    assert monte_carlo['combined_se'] == 0.0


def test_csv_report_format(baseline_scenario_data, write_scenario):
    path = write_scenario(baseline_scenario_data)
    assert main(["compute", "--config", path, "--format", "csv"]) == 0

    with open(Path(baseline_scenario_data['output']) / "compute_report.csv", newline="", encoding="utf-8") as f:
        rows = dict(csv.reader(f))
    assert rows['status'] == "ok"
    assert float(rows['results.setr.value']) == pytest.approx(0.75, rel=1e-8)


def test_sidecar_keeps_timing_out_of_the_report(baseline_scenario_data, write_scenario):
    path = write_scenario(baseline_scenario_data)
    assert main(["compute", "--config", path, "--sidecar"]) == 0

    out_dir = Path(baseline_scenario_data['output'])
    sidecar = json.loads((out_dir / "compute_report.meta.json").read_text(encoding="utf-8"))
    assert sidecar['command'] == "compute"
    assert sidecar['elapsed_seconds'] >= 0.0
    assert "elapsed_seconds" not in (out_dir / "compute_report.json").read_text(encoding="utf-8")
