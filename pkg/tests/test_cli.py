import csv
import io
import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from ccr_reduce import cli
from ccr_reduce.scenario import bundled, bundled_path

DATA = Path(__file__).parent / "data"


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


@pytest.fixture(scope="module")
def gb_small_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("run") / "report.json"
    code = cli.main(["run", str(bundled_path("gb_small")), "--json", str(out), "--no-timing"])
    return code, json.loads(out.read_text())


def test_gb_small_passes(gb_small_run):
    code, report = gb_small_run
    assert code == 0
    s = report["summary"]
    assert s["failed"] == 0 and s["total"] == len(report["entries"]) > 20
    assert report["scenario"] == bundled("gb_small")
    for e in report["entries"]:
        assert set(e) == {"id", "anchor", "suite", "status", "residual", "tolerance", "runtime", "message",
                          "details"}
        assert e["anchor"] and e["status"] == "PASS" and e["runtime"] == 0.0


def test_mislabeled_spacelike_pair_fails(capsys):
    code = cli.main(["run", str(DATA / "mislabeled_spacelike.json")])
    out = capsys.readouterr().out
    assert code == 1
    assert "FAIL gb.weak_causality" in out


def test_empty_suite_list(tmp_path):
    path = write(tmp_path, "empty.json", {"schema_version": 1, "name": "empty", "grid": {"kind": "abstract"},
                                          "suites": []})
    out = tmp_path / "r.json"
    assert cli.main(["run", path, "--json", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["entries"] == [] and report["summary"] == {"total": 0, "passed": 0, "failed": 0}


def test_abstract_scenario(capsys):
    assert cli.main(["run", str(DATA / "abstract_small.json")]) == 0
    assert "5/5 checks passed" in capsys.readouterr().out


@pytest.mark.parametrize("text", ["{not json", json.dumps({"schema_version": 1, "name": "x",
                                                            "grid": {"kind": "abstract"}, "suites": [],
                                                            "surprise": True}), "[]"])
def test_parse_errors_exit_2(tmp_path, capsys, text):
    p = tmp_path / "bad.json"
    p.write_text(text)
    assert cli.main(["run", str(p)]) == 2
    assert "ccr-reduce:" in capsys.readouterr().err


def test_missing_file_exit_2(tmp_path):
    assert cli.main(["run", str(tmp_path / "missing.json")]) == 2


def test_usage_error_exit_2():
    with pytest.raises(SystemExit) as info:
        cli.main(["run"])
    assert info.value.code == 2


def test_report_is_byte_stable_across_threads(tmp_path, monkeypatch):
    sc = {"schema_version": 1, "name": "stable", "seed": 11, "grid": {"kind": "gb", "n": 3, "extent": 1.0},
          "suites": ["symspace.dimension_law", "weyl.algebra", "gb.krein", "gb.gauge", "gb.decomposition"],
          "instances": {"symspace.dimension_law": 30, "weyl.algebra_identities": 30,
                        "gb.gauge_identities": 50, "gb.decomposition": 20}}
    path = write(tmp_path, "stable.json", sc)
    texts = []
    for threads in ("1", "3"):
        monkeypatch.setenv("CCR_REDUCE_THREADS", threads)
        out = tmp_path / f"r{threads}.json"
        assert cli.main(["run", path, "--json", str(out), "--no-timing"]) == 0
        texts.append(out.read_bytes())
    assert texts[0] == texts[1]


@pytest.mark.parametrize("value", ["zero", "0", "-2"])
def test_invalid_thread_cap(monkeypatch, value):
    monkeypatch.setenv("CCR_REDUCE_THREADS", value)
    assert cli.main(["run", str(DATA / "abstract_small.json")]) == 2


def test_converge_two_levels(tmp_path):
    out = tmp_path / "conv.csv"
    assert cli.main(["converge", str(DATA / "mislabeled_spacelike.json"), "--levels", "2", "--csv", str(out)]) == 1
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert [int(r["n"]) for r in rows] == [25, 37]
    assert list(rows[0]) == cli.CSV_FIELDS
    # the Cauchy column decreases; the mislabeled pair keeps the spacelike column from decreasing
    assert float(rows[1]["cauchy_residual"]) < float(rows[0]["cauchy_residual"])


def test_converge_bundled(tmp_path, capsys):
    assert cli.main(["converge", str(bundled_path("gb_small")), "--levels", "3"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 3
    for col in ("cauchy_residual", "spacelike_residual"):
        vals = [float(r[col]) for r in rows]
        assert vals[1] < vals[0]
    assert all(abs(float(r["kernel_gap"]) - 1) < 1e-12 for r in rows)


@pytest.mark.parametrize("levels", ["1", "4"])
def test_converge_level_errors(levels):
    assert cli.main(["converge", str(bundled_path("gb_small")), "--levels", levels]) == 2


def test_converge_abstract_unsupported(capsys):
    assert cli.main(["converge", str(DATA / "abstract_small.json"), "--levels", "2"]) == 2
    assert "UnsupportedScenario" in capsys.readouterr().err


def test_demo_default(capsys):
    assert cli.main(["demo", "gb", "--no-timing"]) == 0
    out = capsys.readouterr().out
    assert "8/8 checks passed" in out
    for cid in cli.DEMO_CHECKS:
        assert f"PASS {cid}" in out


def test_demo_flags(tmp_path, capsys):
    out = tmp_path / "demo.json"
    code = cli.main(["demo", "gb", "--break-causality", "--skip-stage2", "--json", str(out), "--no-timing"])
    text = capsys.readouterr().out
    # the gradient stage alone leaves a degenerate reduced form, which is reported as a failure
    assert code == 1
    assert "field-level causality violation witnessed" in text
    assert "PASS gb.weak_causality" in text
    assert "reduced form degenerate: radical rank" in text
    report = json.loads(out.read_text())
    ids = [e["id"] for e in report["entries"]]
    assert "gb.stage1_only" in ids and "gb.two_stage" not in ids
    st1 = next(e for e in report["entries"] if e["id"] == "gb.stage1_only")
    assert st1["status"] == "FAIL" and st1["residual"] > 0


@pytest.mark.skipif(shutil.which("ccr-reduce") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["ccr-reduce", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("ccr-reduce ")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ccr_reduce", "run", str(DATA / "abstract_small.json")],
                         capture_output=True, text=True)
    assert res.returncode == 0
