import csv
import importlib.util
import json
import math

import numpy as np
import pytest

from Errors import InvalidParameters, NoRoot
from Commands import CommandLogic
from ConfigLoader import apply_overrides, build_run_config, load_run_config

from conftest import SOURCE_DIR, WORKED_A


_main_module = importlib.util.spec_from_file_location("necklace_main", SOURCE_DIR / "__main__.py")
cli = importlib.util.module_from_spec(_main_module)
_main_module.loader.exec_module(cli)


ANGLE = 0.7
EQUAL_ARM = {
    "l1": 1.0, "l2": 1.0, "l3": 0.5,
    "A": [[0, 0, math.cos(ANGLE)], [0, 0, math.sin(ANGLE)], [math.cos(ANGLE), math.sin(ANGLE), 0]],
}


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as file:
        return list(csv.DictReader(file))


def _run(*argv):
    return cli.main([str(arg) for arg in argv])


@pytest.fixture
def equal_arm_config(write_config):
    return write_config({
        "necklace": EQUAL_ARM,
        "scan": {"sigma_min": 0.5, "sigma_max": 3.0, "grid": 101},
        "truncation": {"n_cells": 5},
    })


def test_commands_registered():
    assert set(cli.list_commands(CommandLogic)) == {"bands", "dispersion", "reflect", "design"}


def test_bands_closed_form(equal_arm_config, tmp_path):
    out = tmp_path / "bands.csv"
    assert _run("bands", "--config", equal_arm_config, "--output", out) == 0

    rows = _read_csv(out)
    assert list(rows[0]) == ["sigma", "F", "is_pole", "band_id"]
    assert len(rows) == 101

    sigma = np.array([float(row["sigma"]) for row in rows])
    f = np.array([float(row["F"]) for row in rows])
    assert np.max(np.abs(f + 2 * np.cos(1.5 * sigma))) < 1e-10
    assert all(row["is_pole"] == "0" and row["band_id"] == "0" for row in rows)


def test_bands_decoupled_all_poles(write_config, tmp_path):
    necklace = dict(EQUAL_ARM, A=np.zeros((3, 3)).tolist())
    config = write_config({"necklace": necklace, "scan": {"sigma_min": 0.5, "sigma_max": 3.0, "grid": 21}})
    out = tmp_path / "bands.csv"

    assert _run("bands", "--config", config, "--output", out) == 0

    rows = _read_csv(out)
    assert len(rows) == 21
    assert all(row["is_pole"] == "1" and row["F"] == "" for row in rows)


def test_bands_json(equal_arm_config, tmp_path):
    out = tmp_path / "bands.json"
    assert _run("bands", "--config", equal_arm_config, "--output", out, "--format", "json") == 0

    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["config"]["necklace"] == EQUAL_ARM
    assert report["bands"] == [[0.5, 3.0]]
    assert report["poles"] == []
    assert len(report["samples"]) == 101


def test_grid_override(equal_arm_config, tmp_path):
    out = tmp_path / "bands.csv"
    assert _run("bands", "--config", equal_arm_config, "--output", out, "--grid", 11) == 0
    assert len(_read_csv(out)) == 11


def test_dispersion_equal_arm(equal_arm_config, tmp_path):
    out = tmp_path / "dispersion.csv"
    assert _run("dispersion", "--config", equal_arm_config, "--output", out) == 0

    rows = _read_csv(out)
    assert list(rows[0]) == ["sigma", "k", "vg", "band_id"]

    k = np.array([float(row["k"]) for row in rows])
    vg = np.array([float(row["vg"]) for row in rows])
    assert np.allclose(np.abs(vg), 1.0, atol=1e-6)
    assert np.max(np.abs(np.diff(k))) < math.pi / 2


def test_reflect_equal_arm(equal_arm_config, tmp_path):
    out = tmp_path / "reflect.csv"
    assert _run("reflect", "--config", equal_arm_config, "--output", out) == 0

    rows = _read_csv(out)
    assert list(rows[0]) == ["sigma", "formula_r", "oracle_r", "oracle_t", "unitarity_defect", "flag"]

    for row in rows:
        assert float(row["oracle_r"]) < 1e-8
        assert float(row["unitarity_defect"]) < 1e-10
        if row["formula_r"]:
            assert float(row["formula_r"]) < 1e-6


def test_reflect_flags_gap_rows(write_config, tmp_path):
    config = write_config({
        "necklace": {"l1": 1.3, "l2": 0.7, "l3": 0.9, "A": WORKED_A},
        "scan": {"sigma_min": 0.5, "sigma_max": 6.0, "grid": 201},
        "truncation": {"n_cells": 4},
    })
    out = tmp_path / "reflect.csv"

    assert _run("reflect", "--config", config, "--output", out) == 0

    rows = _read_csv(out)
    gap_rows = [row for row in rows if row["flag"] == "gap"]
    assert gap_rows
    assert all(row["formula_r"] == "" and row["oracle_r"] != "" for row in gap_rows)

    longer = tmp_path / "reflect_long.csv"
    assert _run("reflect", "--config", config, "--output", longer, "--cells", 12) == 0

    long_rows = {row["sigma"]: row for row in _read_csv(longer)}
    shared = [row for row in gap_rows if long_rows[row["sigma"]]["oracle_r"]]
    short_leak = [1 - float(row["oracle_r"]) for row in shared]
    long_leak = [1 - float(long_rows[row["sigma"]]["oracle_r"]) for row in shared]
    assert np.mean(long_leak) < np.mean(short_leak)


def test_parallel_output_is_identical(equal_arm_config, tmp_path):
    serial, parallel = tmp_path / "serial.csv", tmp_path / "parallel.csv"

    assert _run("reflect", "--config", equal_arm_config, "--output", serial) == 0
    assert _run("reflect", "--config", equal_arm_config, "--output", parallel, "--jobs", 2) == 0

    assert serial.read_bytes() == parallel.read_bytes()


@pytest.fixture
def design_config(write_config):
    return write_config({
        "necklace": {"A": WORKED_A},
        "design": {"sigma0": 5.0, "eps": 0.1},
        "truncation": {"n_cells": 10},
    })


def test_design_report_is_deterministic(design_config, tmp_path):
    first, second = tmp_path / "first.json", tmp_path / "second.json"

    assert _run("design", "--config", design_config, "--output", first) == 0
    assert _run("design", "--config", design_config, "--output", second) == 0
    assert first.read_bytes() == second.read_bytes()

    report = json.loads(first.read_text(encoding="utf-8"))
    assert report["config"]["design"] == {"sigma0": 5.0, "eps": 0.1}
    assert abs(report["verification"]["f_sigma0"]) < 1e-8
    assert report["result"]["l2"] <= report["result"]["l1"]


def test_design_verification_table(design_config, tmp_path):
    out = tmp_path / "design.csv"
    assert _run("design", "--config", design_config, "--output", out, "--format", "csv") == 0

    rows = {row["quantity"]: row for row in _read_csv(out)}
    assert rows["f_sigma0"]["stored"] != ""
    assert abs(float(rows["pole_distance"]["stored"]) - float(rows["pole_distance"]["recomputed"])) < 1e-8


def test_design_sweep_table(write_config, tmp_path):
    config = write_config({
        "necklace": {"A": WORKED_A},
        "design": {"sigma0": 5.0, "eps": 0.1, "eps_sweep": [0.1, 0.05]},
    })
    out = tmp_path / "sweep.csv"

    assert _run("design", "--config", config, "--output", out, "--format", "csv") == 0

    rows = _read_csv(out)
    assert list(rows[0]) == ["eps", "pole_distance", "min_vg", "oracle_r"]
    assert [row["eps"] for row in rows] == ["0.10000000000000001", "0.050000000000000003", "slope"]


def test_degenerate_design_exits_2(write_config, tmp_path):
    a = np.array(WORKED_A)
    a[1, 2] = a[2, 1] = 0.0
    config = write_config({"necklace": {"A": a.tolist()}, "design": {"sigma0": 5.0, "eps": 0.1}})

    assert _run("design", "--config", config, "--output", tmp_path / "out.json") == 2


def test_missing_block_exits_2(write_config, tmp_path):
    config = write_config({"necklace": EQUAL_ARM})
    assert _run("bands", "--config", config, "--output", tmp_path / "out.csv") == 2


def test_json_syntax_error_exits_2(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"necklace": {\n  "l1": 1,,\n}}', encoding="utf-8")

    assert _run("bands", "--config", path) == 2

    with pytest.raises(InvalidParameters, match=r"broken.json:2:"):
        load_run_config(path, "bands")


def test_numerical_failure_exits_1(equal_arm_config, tmp_path, monkeypatch):
    def failing_scan(*_):
        raise NoRoot("no root")

    monkeypatch.setattr(CommandLogic, "scan_bands", failing_scan)
    assert _run("bands", "--config", equal_arm_config, "--output", tmp_path / "out.csv") == 1


def test_overrides_win():
    raw = {"scan": {"sigma_min": 1.0, "sigma_max": 2.0, "grid": 10}, "necklace": EQUAL_ARM}
    merged = apply_overrides(raw, {"sigma_max": 4.0, "format": "json", "cells": None})

    config = build_run_config("bands", merged)
    assert config.scan.window == (1.0, 4.0)
    assert config.output_format == "json"
    assert raw["scan"]["sigma_max"] == 2.0


@pytest.mark.parametrize("scan", [
    {"sigma_min": 2.0, "sigma_max": 1.0, "grid": 10},
    {"sigma_min": 1.0, "sigma_max": 2.0, "grid": 1},
    {"sigma_min": 1.0, "sigma_max": 2.0, "grid": 2.5},
    {"sigma_min": "a", "sigma_max": 2.0, "grid": 10},
])
def test_bad_scan_block(scan):
    with pytest.raises(InvalidParameters, match="scan"):
        build_run_config("bands", {"necklace": EQUAL_ARM, "scan": scan})


def test_default_formats():
    assert build_run_config("design", {"necklace": {"A": WORKED_A}, "design": {}}).output_format == "json"
    assert build_run_config("bands", {"necklace": EQUAL_ARM, "scan": {
        "sigma_min": 1.0, "sigma_max": 2.0, "grid": 10}}).output_format == "csv"


@pytest.mark.parametrize("command, raw, field", [
    ("reflect", {"truncation": 5}, "truncation"),
    ("bands", {"output": "out.csv"}, "output"),
    ("design", {"design": {"sigma0": 5.0, "eps": 0.1, "eps_sweep": ["a"]}}, r"design.eps_sweep\[0\]"),
    ("design", {"design": {"sigma0": 5.0, "eps": 0.1, "eps_sweep": [0.1, -0.05]}}, r"design.eps_sweep\[1\]"),
    ("design", {"design": {"sigma0": 5.0, "eps": 0.1, "eps_sweep": 0.1}}, "design.eps_sweep"),
])
def test_malformed_blocks_exit_2(write_config, tmp_path, command, raw, field):
    base = {
        "necklace": EQUAL_ARM if command != "design" else {"A": WORKED_A},
        "scan": {"sigma_min": 0.5, "sigma_max": 3.0, "grid": 11},
        "truncation": {"n_cells": 2},
    }
    data = {**base, **raw}

    with pytest.raises(InvalidParameters, match=field):
        build_run_config(command, data)

    assert _run(command, "--config", write_config(data), "--output", tmp_path / "out") == 2


def test_design_writes_companion(design_config, tmp_path):
    out = tmp_path / "design.json"
    assert _run("design", "--config", design_config, "--output", out) == 0

    report = json.loads(out.read_text(encoding="utf-8"))
    rows = {row["quantity"]: row for row in _read_csv(tmp_path / "design.csv")}
    assert "output" not in report["config"]
    assert float(rows["pole_distance"]["stored"]) == report["result"]["diagnostics"]["pole_distance"]

    table = tmp_path / "table.csv"
    assert _run("design", "--config", design_config, "--output", table, "--format", "csv") == 0
    assert json.loads((tmp_path / "table.json").read_text(encoding="utf-8"))["verification"]


def test_companion_path():
    assert CommandLogic.companion_path("run.json", "json").name == "run.csv"
    assert CommandLogic.companion_path("run.csv", "json").name == "run_verification.csv"
    assert CommandLogic.companion_path("run.json", "csv").name == "run_report.json"
