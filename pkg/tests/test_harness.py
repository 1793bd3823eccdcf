import json
import re
from collections import Counter

import pytest

from spinlattice import harness
from spinlattice.exactalg import ConfigInvalid
from spinlattice.harness import RunConfig, export_building, main, run_suite, selected_checks
from spinlattice.vertexlat import build_complex

ACCEPTANCE_IDS = [
    "fermat.points", "fermat.lines", "forms.hasse", "hodge.table", "clifford.iso",
    "building.radius1", "strata.d3", "strata.d1d2", "dieudonne.roundtrip", "stability",
]


def test_every_acceptance_id_is_registered():
    assert list(harness.CHECKS) == ACCEPTANCE_IDS


def test_invalid_precision_rejected_before_checks():
    with pytest.raises(ConfigInvalid):
        run_suite(RunConfig(N=5))
    with pytest.raises(ConfigInvalid):
        run_suite(RunConfig(p=9))


def test_cli_config_error_exit_code(capsys):
    assert main(["verify", "--precision", "5"]) == 2
    assert "config error" in capsys.readouterr().err


def test_filter_selects_fermat_checks():
    assert selected_checks(["fermat.*"]) == ["fermat.points", "fermat.lines"]
    report = run_suite(RunConfig(filters=["fermat.*"]))
    assert [r.id for r in report.results] == ["fermat.points", "fermat.lines"]
    assert report.ok


def test_report_is_deterministic(tmp_path):
    cfg = RunConfig(filters=["forms.*", "hodge.*", "strata.d1d2"], seed=5)
    a = run_suite(cfg).to_json()
    b = run_suite(cfg).to_json()
    assert a == b
    doc = json.loads(a)
    assert doc["schema"] == 1
    assert doc["environment"] == {"precision": 12, "bound": 4, "seed": 5}
    assert {c["status"] for c in doc["checks"]} == {"PASS"}
    assert "seconds" not in a


def test_failing_check_is_captured(monkeypatch):
    def boom(cfg, ctx):
        raise RuntimeError("synthetic")

    monkeypatch.setitem(harness.CHECKS, "forms.hasse", ("broken", boom))
    report = run_suite(RunConfig(filters=["forms.hasse"]))
    (res,) = report.results
    assert not res.passed and "synthetic" in res.observed
    assert not report.ok


def test_config_file_and_override(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"p": 5, "seed": 2}))
    assert main(["count", "fermat", "--config", str(path)]) == 0
    assert capsys.readouterr().out.strip() == "3276"
    assert main(["count", "fermat", "--config", str(path), "--p", "3"]) == 0
    assert capsys.readouterr().out.strip() == "280"
    path.write_text(json.dumps({"colour": 1}))
    assert main(["count", "fermat", "--config", str(path)]) == 2


def test_verify_writes_reports(tmp_path, capsys):
    out = tmp_path / "rep"
    assert main(["verify", "--filter", "fermat.points", "--out", str(out)]) == 0
    assert (out / "report.json").exists() and (out / "report.txt").exists()
    capsys.readouterr()
    assert main(["report", "--show", "--out", str(out)]) == 0
    assert "PASS fermat.points" in capsys.readouterr().out


def test_strata_command(capsys):
    assert main(["strata", "--d", "2", "--q", "81"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["total"] == {"+": 82, "-": 82}
    assert main(["strata", "--d", "2", "--q", "27"]) == 2


def test_building_export_radius_zero(space, base):
    doc = json.loads(export_building(build_complex(space, base, 0), "json"))
    assert len(doc["nodes"]) == 1 and doc["edges"] == []
    assert doc["nodes"][0]["s_label"] == "herm0"


def _parse_dot(text):
    nodes = re.findall(r'^\s+n\d+ \[label="(\d+)", type=(\d+), s_label="(\w+)"', text, re.M)
    edges = re.findall(r"^\s+(n\d+) -- (n\d+);", text, re.M)
    return Counter((int(t), s) for _, t, s in nodes), len(edges)


def test_building_export_radius_one(complex1, tmp_path):
    text = export_building(complex1, "json", str(tmp_path / "b.json"))
    doc = json.loads(text)
    assert len(doc["nodes"]) == 393 and len(doc["edges"]) == 1512
    assert [n["key"] for n in doc["nodes"]] == sorted(n["key"] for n in doc["nodes"])
    assert export_building(complex1, "json") == text
    dot = export_building(complex1, "dot")
    nodes, n_edges = _parse_dot(dot)
    assert nodes == Counter((n["type"], n["s_label"]) for n in doc["nodes"])
    assert n_edges == 1512
    with pytest.raises(ValueError):
        export_building(complex1, "svg")


def test_building_command_to_stdout(capsys):
    assert main(["building", "--radius", "0", "--format", "dot"]) == 0
    assert capsys.readouterr().out.startswith("graph building {")
