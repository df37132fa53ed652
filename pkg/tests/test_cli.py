"""End-to-end command line runs: artifacts, exit codes, determinism."""

import json
import math

import pytest

from flatdiff.cli import main

CAUCHY_KERNEL = {
    "family": "pure_fractional",
    "s": 0.5,
    "amplitude": 1.0 / math.pi,
    "j0": math.pi,
    "j1": 1.0,
    "r0": 2.0,
}
UNIT_KERNEL = {
    "family": "pure_fractional",
    "s": 0.5,
    "amplitude": 1.0,
    "j0": 1.0,
    "j1": 1.0,
    "r0": 2.0,
}


def write_config(tmp_path, name="config.json", **sections):
    path = tmp_path / name
    path.write_text(json.dumps(sections, indent=2))
    return str(path)


def base_config(tmp_path, **overrides):
    sections = {
        "kernel": CAUCHY_KERNEL,
        "grid": {"x_min": -40.0, "x_max": 40.0, "n": 401},
        "initial": {"kind": "step", "a": 1.0, "b": 0.0},
        "times": {"t_final": 0.5, "snapshots": [0.25]},
    }
    sections.update(overrides)
    return write_config(tmp_path, **sections)


def read_reports(out_dir):
    return json.loads((out_dir / "report.json").read_text())


# -- simulate ----------------------------------------------------------------


def test_simulate_writes_csv_and_metadata(tmp_path):
    cfg = base_config(tmp_path)
    out = tmp_path / "run"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "trajectory.csv").read_text().splitlines()
    assert lines[0] == "t,x,u"
    assert len(lines) == 1 + 3 * 401
    first = lines[1].split(",")
    assert float(first[0]) == 0.0 and float(first[1]) == -40.0 and float(first[2]) == 1.0
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["package_version"]
    assert meta["derived"]["snapshot_times"] == [0.0, 0.25, 0.5]
    assert meta["derived"]["kernel_certificate"]["verified"] is True
    assert meta["derived"]["h"] == pytest.approx(0.2, rel=1e-14)
    assert not (out / "trajectory.json").exists()


def test_simulate_format_variants(tmp_path):
    cfg = base_config(tmp_path, times={"t_final": 0.0})
    out_json = tmp_path / "json_run"
    assert main(["simulate", "--config", cfg, "--out", str(out_json),
                 "--format", "json"]) == 0
    payload = json.loads((out_json / "trajectory.json").read_text())
    assert len(payload) == 1 and payload[0]["t"] == 0.0
    assert not (out_json / "trajectory.csv").exists()

    out_both = tmp_path / "both_run"
    assert main(["simulate", "--config", cfg, "--out", str(out_both),
                 "--format", "both"]) == 0
    assert (out_both / "trajectory.csv").exists()
    assert (out_both / "trajectory.json").exists()


def test_simulate_is_deterministic(tmp_path):
    cfg = base_config(tmp_path)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["simulate", "--config", cfg, "--out", str(out2)]) == 0
    for name in ("trajectory.csv", "metadata.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


# -- config validation -------------------------------------------------------


def test_unknown_top_level_key_rejected(tmp_path):
    cfg = base_config(tmp_path, extra={"x": 1})
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_unknown_nested_key_rejected(tmp_path):
    kernel = dict(CAUCHY_KERNEL, flux=3.0)
    cfg = base_config(tmp_path, kernel=kernel)
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_missing_and_malformed_config(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path / "o")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2


def test_unknown_kernel_family_rejected(tmp_path):
    kernel = dict(CAUCHY_KERNEL, family="levy_flight")
    cfg = base_config(tmp_path, kernel=kernel)
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_hypothesis_violating_kernel_rejected(tmp_path):
    kernel = dict(UNIT_KERNEL, j0=0.5)
    cfg = base_config(tmp_path, kernel=kernel)
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


# -- verify subcommands ------------------------------------------------------


def test_verify_flattening_report(tmp_path):
    cfg = base_config(tmp_path, checks={"flattening": {"t": 0.5}})
    out = tmp_path / "flat"
    assert main(["verify-flattening", "--config", cfg, "--out", str(out)]) == 0
    reports = read_reports(out)
    assert len(reports) == 1
    rep = reports[0]
    assert rep["check"] == "flattening_ratio"
    assert rep["pass"] is True
    assert rep["bound"] == pytest.approx(1.0 / (4.0 * math.pi), rel=1e-12)
    assert 0.29 < rep["measured"] < 0.3184
    assert rep["details"]["window"][0] == pytest.approx(25.0)


def test_verify_proposition_reports(tmp_path):
    cfg = base_config(
        tmp_path,
        checks={
            "halfline": {"tol": 0.02},
            "mirror": {
                "eps": 0.5,
                "t_final": 0.25,
                "tol": 0.02,
                "grid": {"x_min": -20.0, "x_max": 20.0, "n": 101},
            },
        },
    )
    out = tmp_path / "prop"
    assert main(["verify-proposition", "--config", cfg, "--out", str(out)]) == 0
    reports = read_reports(out)
    assert [r["check"] for r in reports] == ["halfline_lower_bound", "mirror_identity"]
    assert all(r["pass"] for r in reports)
    assert reports[0]["measured"] > 0.5
    assert reports[1]["measured"] <= 1e-12


def test_verify_proposition_failing_check_exits_1(tmp_path):
    cfg = base_config(
        tmp_path,
        checks={
            "mirror": {
                "eps": 0.5,
                "t_final": 0.25,
                "tol": 1e-20,
                "grid": {"x_min": -20.0, "x_max": 20.0, "n": 101},
            }
        },
    )
    out = tmp_path / "prop_fail"
    assert main(["verify-proposition", "--config", cfg, "--out", str(out)]) == 1
    reports = read_reports(out)
    assert reports[0]["pass"] is True
    assert reports[1]["pass"] is False


def test_verify_subsolution_report(tmp_path):
    cfg = write_config(
        tmp_path,
        kernel=UNIT_KERNEL,
        checks={"subsolution": {"c": 2.0, "nt": 2, "nx": 3, "x_max": 200.0}},
    )
    out = tmp_path / "sub"
    assert main(["verify-subsolution", "--config", cfg, "--out", str(out)]) == 0
    rep = read_reports(out)[0]
    assert rep["check"] == "subsolution_residual_grid"
    assert rep["pass"] is True
    assert rep["measured"] < 0.0
    assert rep["details"]["kappa"] == 0.25
    assert rep["details"]["t_star"] == 16.0
    assert rep["details"]["r_star"] == 16.0
    rows = rep["details"]["samples"]
    assert len(rows) == 6
    assert all(row["pass"] for row in rows)
    assert {row["t"] for row in rows} == {16.0 / 3.0, 32.0 / 3.0}


def test_verify_subsolution_window_below_onset_exits_2(tmp_path):
    cfg = write_config(
        tmp_path,
        kernel=UNIT_KERNEL,
        checks={"subsolution": {"c": 2.0, "nt": 2, "nx": 2, "x_max": 10.0}},
    )
    assert main(["verify-subsolution", "--config", cfg,
                 "--out", str(tmp_path / "o")]) == 2


# -- reference comparison and bench ------------------------------------------


def test_reference_compare_refines(tmp_path):
    cfg = base_config(tmp_path, reference={"refine_levels": 2}, times={"t_final": 0.5})
    out = tmp_path / "ref"
    assert main(["reference-compare", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "reference_errors.csv").read_text().splitlines()
    assert lines[0] == "h,domain_size,linf_interior"
    assert len(lines) == 3
    h0, span0, err0 = map(float, lines[1].split(","))
    h1, span1, err1 = map(float, lines[2].split(","))
    assert h1 == pytest.approx(h0 / 2.0, rel=1e-12)
    assert span1 == pytest.approx(2.0 * span0, rel=1e-12)
    assert 0.0 < err1 < err0


def test_reference_compare_needs_positive_time(tmp_path):
    cfg = base_config(tmp_path, times={"t_final": 0.0})
    assert main(["reference-compare", "--config", cfg,
                 "--out", str(tmp_path / "o")]) == 2


def test_bench_schema(tmp_path):
    cfg = write_config(
        tmp_path,
        kernel=UNIT_KERNEL,
        bench={"sizes": [256, 512], "reps": 1, "domain": [-10.0, 10.0]},
    )
    out = tmp_path / "bench"
    assert main(["bench", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "bench.csv").read_text().splitlines()
    assert lines[0] == "n,direct_ms,fft_ms,speedup"
    assert len(lines) == 3
    for line, n in zip(lines[1:], (256, 512)):
        cells = line.split(",")
        assert int(cells[0]) == n
        assert float(cells[1]) > 0 and float(cells[2]) > 0 and float(cells[3]) > 0
