import json

import numpy as np
import pytest
from click.testing import CliRunner

from modfrac.cli import main
from modfrac.fracint import apply_riesz
from modfrac.grid import Field, GridSpec, forward_ft
from modfrac.reports import field_from_csv, field_to_csv, read_csv_rows
from modfrac.acceptance import random_bandlimited

REGION = ["region", "--n", "1", "--alpha", "1/4", "--beta", "1/4", "--p1", "2", "--q1", "4"]


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, list(args), catch_exceptions=False)

    return invoke


def test_region_example(run):
    res = run(*REGION, "--p2", "4", "--q2", "2")
    assert res.exit_code == 0
    row = read_csv_rows(res.stdout)[0]
    assert row["bounded"] == "false" and row["q_critical"] == "true"
    assert "# param alpha: 1/4" in res.stdout


def test_region_json_keeps_rationals(run):
    res = run(*REGION, "--p2", "4", "--q2", "5/2", "--format", "json")
    doc = json.loads(res.stdout)
    assert doc["command"] == "region" and doc["params"]["q2"] == "5/2"
    assert doc["rows"][0]["bounded"] is True and doc["rows"][0]["p_critical"] is True


def test_region_grid(run, tmp_path):
    path = tmp_path / "grid.csv"
    res = run(*REGION, "--grid", "--steps", "32", "--out", str(path))
    assert res.exit_code == 0 and res.stdout == ""
    assert len(read_csv_rows(path.read_text())) == 1024


@pytest.mark.parametrize("extra", [
    ["--p2", "2/0", "--q2", "2"],
    ["--p2", "4", "--q2", "0.5"],
    ["--p2", "4"],
    ["--p2", "1/2", "--q2", "2"],
])
def test_region_invalid_input(run, extra):
    res = run(*REGION, *extra)
    assert res.exit_code == 2


def test_region_names_violated_range(run):
    res = run("region", "--alpha", "1/4", "--beta", "1/2", "--p1", "2", "--q1", "4",
              "--p2", "4", "--q2", "2")
    assert res.exit_code == 2 and "beta <= alpha" in res.stderr


@pytest.fixture(scope="module")
def dilation_reports():
    runner = CliRunner()
    csv = runner.invoke(main, ["dilation-scan"], catch_exceptions=False)
    js = runner.invoke(main, ["dilation-scan", "--format", "json"], catch_exceptions=False)
    return csv, js


def test_dilation_scan_default(dilation_reports):
    csv, _ = dilation_reports
    assert csv.exit_code == 0
    assert "slope_out" in csv.stderr
    summary = {line.split(":")[0][10:]: line.split(": ")[1]
               for line in csv.stdout.splitlines() if line.startswith("# summary")}
    assert abs(float(summary["slope_out"]) + 0.5) < 0.1


def test_dilation_csv_and_json_rows_agree(dilation_reports):
    csv, js = dilation_reports
    rows = read_csv_rows(csv.stdout)
    doc = json.loads(js.stdout)
    assert len(rows) == len(doc["rows"]) == 7
    for a, b in zip(rows, doc["rows"]):
        for key in ("lam", "in_norm", "out_norm", "leak_in", "leak_out", "sample_err"):
            assert float(a[key]) == b[key]


def test_dilation_rejects_large_lambda(run):
    assert run("dilation-scan", "--lambda", "1/2").exit_code == 2
    assert run("dilation-scan", "--lambda", "abc").exit_code == 2


def test_dilation_too_few_values(run):
    assert run("dilation-scan", "--lambda", "1/8", "--lambda", "1/16").exit_code == 2


def test_reports_are_deterministic(run):
    args = ["lemma31", "--p", "4", "--kmax", "8", "--trials", "2", "--steps", "5", "--seed", "3"]
    a, b = run(*args), run(*args)
    assert a.exit_code == 0 and a.stdout == b.stdout
    c = run(*args[:-1], "4")
    assert c.stdout != a.stdout


def test_band_sweep_command_l2(run):
    res = run("lemma31", "--kmax", "20", "--format", "json")
    assert res.exit_code == 0
    doc = json.loads(res.stdout)
    assert doc["summary"]["max"] <= 2.0
    assert {r["method"] for r in doc["rows"]} == {"exact-l2"}


def test_band_sweep_command_rejects_tiny_sweep(run):
    assert run("lemma31", "--kmax", "0").exit_code == 2
    assert run("lemma31", "--p", "1").exit_code == 2


def test_critical_scan(run):
    res = run("critical-scan", "--K", "10", "--K", "100", "--K", "1000", "--format", "json")
    assert res.exit_code == 0
    doc = json.loads(res.stdout)
    sums = [r["out_power"] for r in doc["rows"]]
    assert sums == sorted(sums) and doc["summary"]["total_bound"] == "inf"


def test_critical_scan_control(run):
    res = run("critical-scan", "--q2", "20/9", "--control", "--format", "json")
    assert res.exit_code == 0
    assert np.isfinite(json.loads(res.stdout)["summary"]["total_bound"])


@pytest.mark.parametrize("extra", [["--q2", "5/2"], ["--eps", "1"], ["--q2", "2.5"], ["--K", "1"]])
def test_critical_scan_invalid(run, extra):
    assert run("critical-scan", *extra).exit_code == 2


def test_norm_gauss_moyal(run):
    res = run("norm", "--profile", "gauss", "--p", "2", "--q", "2", "--format", "json")
    assert res.exit_code == 0
    row = json.loads(res.stdout)["rows"][0]
    assert row["stft"] / row["lp"] == pytest.approx(np.sqrt(2 * np.pi) * np.pi ** 0.25, rel=1e-6)
    assert row["ratio"] == pytest.approx(row["decomp"] / row["stft"])


def test_norm_requires_one_source(run, tmp_path):
    assert run("norm").exit_code == 2
    path = tmp_path / "f.csv"
    path.write_text(field_to_csv(Field(GridSpec(1, 64, 8.0), np.ones(64))))
    assert run("norm", "--profile", "psi", "--in", str(path)).exit_code == 2


def test_norm_reads_field_file(run, tmp_path):
    g = GridSpec(1, 256, 16.0)
    f = random_bandlimited(np.random.default_rng(1), g, 1)[0]
    path = tmp_path / "f.csv"
    path.write_text(field_to_csv(f))
    res = run("norm", "--in", str(path), "--p", "3", "--q", "2", "--format", "json")
    assert res.exit_code == 0
    assert json.loads(res.stdout)["params"]["grid_m"] == 256


def test_apply_doubles_riesz(run, tmp_path):
    g = GridSpec(1, 256, 16.0)
    f = random_bandlimited(np.random.default_rng(2), g, 1)[0]
    src, dst = tmp_path / "f.csv", tmp_path / "g.csv"
    src.write_text(field_to_csv(f))
    res = run("apply", "--alpha", "1/4", "--beta", "1/4", "--in", str(src), "--out", str(dst))
    assert res.exit_code == 0
    out = field_from_csv(dst.read_text())
    F, G = forward_ft(f).values, forward_ft(out).values
    xi = np.abs(g.axis("spectral"))
    off = xi > 0
    assert np.max(np.abs(G[off] - 2 * xi[off] ** -0.25 * F[off])) < 1e-12 * np.abs(F).max()
    assert np.max(np.abs(out.values - 2 * apply_riesz(f, 0.25).values)) < 1e-15 * np.abs(out.values).max()


def test_apply_invalid(run, tmp_path):
    src = tmp_path / "f.csv"
    src.write_text(field_to_csv(Field(GridSpec(1, 64, 8.0), np.ones(64))))
    assert run("apply", "--alpha", "2", "--in", str(src)).exit_code == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("index,re,im\n0,1,0\n")
    assert run("apply", "--alpha", "1/4", "--in", str(bad)).exit_code == 2


def test_selftest_subset(run):
    res = run("selftest", "--only", "1", "--only", "2")
    assert res.exit_code == 0
    assert "[PASS]  1 transform fidelity" in res.stderr
    assert [r["passed"] for r in read_csv_rows(res.stdout)] == ["true", "true"]
    assert run("selftest", "--only", "99").exit_code == 2


def test_version(run):
    res = run("--version")
    assert res.exit_code == 0 and "modfrac" in res.stdout
