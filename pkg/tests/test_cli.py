from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from conftest import scenario_doc
from evitrack.cli import main
from evitrack.scenario import canonical_json


@pytest.fixture
def scenario_file(tmp_path: Path) -> Path:
    path = tmp_path / "scenario.json"
    path.write_text(canonical_json(scenario_doc()), encoding="utf-8")
    return path


def run(capsys, *argv: str):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_paths_prints_one_canonical_document(scenario_file, capsys):
    code, out, err = run(capsys, "paths", "--scenario", str(scenario_file))
    assert code == 0
    assert err == ""
    assert out.endswith("\n") and out.count("\n") == 1
    doc = json.loads(out)
    assert doc["conflict_k"] == pytest.approx(0.15, abs=1e-12)
    assert canonical_json(doc) == out


def test_graph_stdout_matches_out_file(scenario_file, tmp_path, capsys):
    out_file = tmp_path / "graph.json"
    code, out, _ = run(
        capsys, "graph", "--scenario", str(scenario_file), "--out", str(out_file)
    )
    assert code == 0
    assert out_file.read_text(encoding="utf-8") == out
    doc = json.loads(out)
    assert doc["edges"][0]["q"] == pytest.approx(0.5)


def test_counts(scenario_file, capsys):
    code, out, _ = run(capsys, "counts", "--scenario", str(scenario_file))
    assert code == 0
    doc = json.loads(out)
    assert doc["min_count"] == 0
    assert doc["intervals"]["1"][0] == pytest.approx(13 / 17, abs=1e-12)


def test_region_and_window(scenario_file, capsys):
    code, out, _ = run(
        capsys,
        "region",
        "--scenario",
        str(scenario_file),
        "--rect",
        "0,0,2000,2000",
    )
    assert code == 0
    assert json.loads(out)["interval"][0] == pytest.approx(0.6)
    code, out, _ = run(
        capsys,
        "region",
        "--scenario",
        str(scenario_file),
        "--rect",
        "0,0,20000,20000",
        "--window",
        "900000,2000000",
    )
    assert code == 0
    assert json.loads(out)["interval"][0] == pytest.approx(0.5)


def test_evmap_deterministic(scenario_file, capsys):
    args = ("evmap", "--scenario", str(scenario_file), "--t", "600000")
    code, first, _ = run(capsys, *args)
    assert code == 0
    code, second, _ = run(capsys, *args)
    assert first == second
    doc = json.loads(first)
    assert len(doc["values"]) == doc["width"] * doc["height"]


def test_shortest(scenario_file, capsys):
    code, out, _ = run(
        capsys,
        "shortest",
        "--scenario",
        str(scenario_file),
        "--from",
        "1000,1000",
        "--to",
        "4000,5000",
    )
    assert code == 0
    assert json.loads(out)["length_m"] == pytest.approx(5000.0)


def test_simulate_deterministic(tmp_path, capsys):
    config = {
        "id": "simcli",
        "map": scenario_doc()["map"],
        "types": scenario_doc()["types"],
        "sensors": [],
        "tracks": [
            {
                "type": "midget",
                "speed_mps": 2.0,
                "start_ms": 0,
                "waypoints": [[2000.0, 2000.0], [8000.0, 8000.0]],
                "report_every_ms": 900000,
                "trust": [0.4, 0.9],
            }
        ],
        "duration_ms": 3600000,
        "assumptions": {},
        "false_reports": {"rate_per_hour": 0.5, "position_sigma_m": 500.0, "trust": 0.3},
    }
    cfg_path = tmp_path / "sim.json"
    cfg_path.write_text(canonical_json(config), encoding="utf-8")
    out_a = tmp_path / "a.json"
    out_b = tmp_path / "b.json"
    code, stdout_a, _ = run(
        capsys, "simulate", "--config", str(cfg_path), "--seed", "9", "--out", str(out_a)
    )
    assert code == 0
    code, stdout_b, _ = run(
        capsys, "simulate", "--config", str(cfg_path), "--seed", "9", "--out", str(out_b)
    )
    assert stdout_a == stdout_b
    assert out_a.read_bytes() == out_b.read_bytes()
    assert json.loads(stdout_a)["reports"]


# ---------------------------------------------------------------------------
# Exit codes


def test_bad_args_exit_2(capsys):
    code, out, err = run(capsys, "paths")
    assert code == 2
    assert out == ""
    failure = json.loads(err)
    assert failure["field"] == "args"


def test_missing_file_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "paths", "--scenario", str(tmp_path / "nope.json"))
    assert code == 2
    assert "error" in json.loads(err)


def test_invalid_json_exit_2(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{", encoding="utf-8")
    code, _, err = run(capsys, "paths", "--scenario", str(path))
    assert code == 2
    assert "error" in json.loads(err)


def test_schema_error_exit_2_names_field(capsys, tmp_path):
    doc = scenario_doc()
    doc["reports"][0]["trust_p"] = 9
    path = tmp_path / "bad.json"
    path.write_text(canonical_json(doc), encoding="utf-8")
    code, _, err = run(capsys, "paths", "--scenario", str(path))
    assert code == 2
    assert json.loads(err)["field"] == "reports[0].trust_p"


def test_over_limit_exit_3_unless_beamed(tmp_path, capsys):
    reports = [
        {
            "id": f"r{k:02d}",
            "time": k * 600_000,
            "position": [1000.0 + 900.0 * k, 1000.0],
            "trust_p": 0.5,
        }
        for k in range(12)
    ]
    path = tmp_path / "big.json"
    path.write_text(canonical_json(scenario_doc(sid="big", reports=reports)))
    code, out, err = run(capsys, "paths", "--scenario", str(path))
    assert code == 3
    assert out == ""
    assert "error" in json.loads(err)
    code, out, _ = run(capsys, "paths", "--scenario", str(path), "--beam", "500")
    assert code == 0
    assert json.loads(out)["approximate"] is True


def test_navigation_error_exit_3(capsys, tmp_path):
    from conftest import island_map
    from evitrack.geometry import navmap_to_geojson

    doc = scenario_doc(navmap=island_map())
    path = tmp_path / "nav.json"
    path.write_text(canonical_json(doc), encoding="utf-8")
    code, _, err = run(
        capsys,
        "shortest",
        "--scenario",
        str(path),
        "--from",
        "10000,10000",
        "--to",
        "1000,1000",
    )
    assert code == 3
    assert "error" in json.loads(err)


# ---------------------------------------------------------------------------
# Report rendering


def test_report_writes_figures_and_tables(scenario_file, tmp_path, capsys):
    out_dir = tmp_path / "report"
    code, out, _ = run(
        capsys, "report", "--scenario", str(scenario_file), "--out-dir", str(out_dir)
    )
    assert code == 0
    doc = json.loads(out)
    written = set(doc["written"])
    assert {"overview.png", "graph.png", "evidence_map.png", "paths.csv", "counts.csv"} <= written
    for name in written:
        assert (out_dir / name).stat().st_size > 0
    paths_csv = (out_dir / "paths.csv").read_text(encoding="utf-8").splitlines()
    assert paths_csv[0] == "rank,chain,support,plausibility"
    assert len(paths_csv) == 5


def test_console_script_entry_point(scenario_file):
    proc = subprocess.run(
        [sys.executable, "-m", "evitrack.cli", "counts", "--scenario", str(scenario_file)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["min_count"] == 0
