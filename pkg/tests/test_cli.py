import json

import pytest
from click.testing import CliRunner

import pointing_cli
from PointingLab.services.specfun import QuadratureError


@pytest.fixture
def runner():
    return CliRunner()


def test_presets_lists_names(runner):
    result = runner.invoke(pointing_cli.cli, ["presets"])
    assert result.exit_code == 0
    assert result.stdout.split() == ["fig3a", "fig3b", "fig4", "fig6", "fig7", "fig8", "fig9a", "fig9b", "fig9c", "remark1"]


def test_presets_echoes_resolved_document(runner):
    result = runner.invoke(pointing_cli.cli, ["presets", "fig6"])
    assert result.exit_code == 0
    doc = json.loads(result.stdout)
    assert doc["variant"] == "ula"
    assert doc["tx"]["kind"] == "ULA"


def test_unknown_preset_is_a_usage_error(runner):
    result = runner.invoke(pointing_cli.cli, ["--preset", "nope", "pointing"])
    assert result.exit_code == 2
    assert "Unknown preset" in result.stderr


def test_pointing_curve_csv(runner):
    result = runner.invoke(pointing_cli.cli, ["--preset", "fig3a", "pointing", "--no-mc-overlay", "--points", "50"])
    assert result.exit_code == 0, result.stderr
    lines = result.stdout.splitlines()
    assert lines[0] == "h_over_g0,pdf,cdf"
    assert len(lines) == 51
    assert lines[-1].startswith("1,")
    assert lines[-1].endswith(",1")


def test_file_output_is_reproducible(runner, tmp_path):
    outputs = []
    for name in ("first.csv", "second.csv"):
        out = tmp_path / name
        args = ["--preset", "fig4", "--samples", "2000", "--seed", "17", "--out", str(out), "pointing", "--points", "40"]
        result = runner.invoke(pointing_cli.cli, args)
        assert result.exit_code == 0, result.stderr
        assert result.stdout == ""
        outputs.append(out.read_bytes())
        config = json.loads((tmp_path / f"{name}.config.json").read_text())
        assert config["simulation"]["seed"] == 17
        summary = json.loads((tmp_path / f"{name}.summary.json").read_text())
        assert summary["mc_samples"] == 2000
    assert outputs[0] == outputs[1]
    assert outputs[0].splitlines()[0] == b"h_over_g0,pdf,cdf,mc_cdf,mc_pdf"


def test_single_element_pattern_is_flat(runner, tmp_path):
    path = tmp_path / "iso.json"
    path.write_text(json.dumps({"tx": {"n_elements": 1}, "pattern": {"theta_steps": 5, "phi_steps": 4}}))
    result = runner.invoke(pointing_cli.cli, ["--config", str(path), "pattern"])
    assert result.exit_code == 0, result.stderr
    lines = result.stdout.splitlines()
    assert lines[0] == "theta_deg,phi_deg,gain_linear,gain_dbi"
    assert len(lines) == 21
    assert {line.split(",")[2] for line in lines[1:]} == {"1"}


def test_e2e_json(runner):
    result = runner.invoke(pointing_cli.cli, ["--preset", "fig9b", "--format", "json", "e2e", "--no-mc-overlay", "--points", "20"])
    assert result.exit_code == 0, result.stderr
    doc = json.loads(result.stdout)
    assert doc["header"] == ["h_over_scale", "h", "pdf", "cdf"]
    assert len(doc["rows"]) == 20
    assert doc["summary"]["method"] == "symmetric"
    assert doc["config"]["name"] == "fig9b"
    cdf = [row[3] for row in doc["rows"]]
    assert cdf == sorted(cdf)


def test_e2e_method_must_fit_variant(runner):
    result = runner.invoke(pointing_cli.cli, ["--preset", "fig9b", "e2e", "--method", "ula", "--no-mc-overlay"])
    assert result.exit_code == 2


def test_outage_versus_distance(runner):
    result = runner.invoke(pointing_cli.cli, ["--preset", "fig7", "--format", "json", "outage"])
    assert result.exit_code == 0, result.stderr
    doc = json.loads(result.stdout)
    assert doc["header"] == ["absorption_per_km", "z_m", "outage_prob", "snr_db_mean"]
    assert len(doc["rows"]) == 4 * 40
    lengths = doc["summary"]["max_link_length_m"]
    assert lengths["0.5"] == pytest.approx(3100.0, rel=1e-4)
    assert lengths["4"] < 1000.0


def test_validate_writes_report(runner, tmp_path):
    reports = []
    for name in ("a.json", "b.json"):
        report = tmp_path / name
        result = runner.invoke(pointing_cli.cli, ["--preset", "fig4", "--samples", "20000", "validate", "--report", str(report)])
        assert result.exit_code in (0, 3), result.stderr
        doc = json.loads(report.read_text())
        assert doc["preset"] == "fig4"
        assert doc["passed"] == (result.exit_code == 0)
        assert {c["name"] for c in doc["checks"]} >= {"pointing_mc_mainlobe", "pdf_normalization", "e2e_mc", "outage_mc"}
        reports.append(report.read_bytes())
    assert reports[0] == reports[1]


def test_numeric_failure_exit_code(runner, monkeypatch):
    def broken(self, n_points=None, mc_overlay=None):
        raise QuadratureError("integral diverged")

    monkeypatch.setattr(pointing_cli.CurvesPlugin, "pointing", broken)
    result = runner.invoke(pointing_cli.cli, ["--preset", "fig4", "pointing"])
    assert result.exit_code == 4
    assert "integral diverged" in result.stderr


def test_outage_versus_array_size(runner):
    result = runner.invoke(pointing_cli.cli, ["--preset", "fig8", "--format", "json", "outage"])
    assert result.exit_code == 0, result.stderr
    doc = json.loads(result.stdout)
    assert doc["header"] == ["profile", "n_elements", "outage_prob", "snr_db_mean", "z_max_m"]
    assert len(doc["rows"]) == 2 * 10
    assert all(isinstance(row[3], float) for row in doc["rows"])
    optima = {entry["profile"]: entry["best_length_n"] for entry in doc["summary"]["optima"]}
    assert optima[0] in {20, 30, 40}
    assert optima[1] in {50, 60, 70}


@pytest.mark.parametrize("preset", ["fig3a", "fig3b"])
def test_validate_general_presets_pass(runner, tmp_path, preset):
    report = tmp_path / f"{preset}.json"
    args = ["--preset", preset, "--samples", "200000", "validate", "--report", str(report)]
    result = runner.invoke(pointing_cli.cli, args)
    assert result.exit_code == 0, result.stderr
    checks = {c["name"]: c for c in json.loads(report.read_text())["checks"]}
    # both pattern oracles keep their distance in the report
    for name in ("pointing_mc_mainlobe", "pointing_mc_exact"):
        assert checks[name]["status"] in ("pass", "report")
        assert checks[name]["statistic"] > 0.0
    if preset == "fig3b":
        assert checks["pointing_mc_exact"]["status"] == "report"
        assert checks["e2e_vs_mixture"]["status"] == "report"
        assert checks["e2e_mc"]["detail"] == "expansion regime"
