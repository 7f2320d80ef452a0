import json
import shutil
import subprocess
import sys

import pytest

from superboson.cli import main, run
from superboson.report import ConfigError, Report, RunConfig, SCHEMA_VERSION, parse_rational
from superboson.algebra import CheckRecord


def _json(capsys, argv):
    code = main(argv + ["--format", "json"])
    return code, json.loads(capsys.readouterr().out)


def test_equal_ranks_exit_2(capsys):
    assert main(["relations", "--M", "1", "--N", "1"]) == 2
    assert "M != N" in capsys.readouterr().err


@pytest.mark.parametrize("bad", ["0.5", "1e3", "1/0", "x"])
def test_rationals_only(bad, capsys):
    assert main(["relations", "--alpha", bad]) == 2
    assert "alpha" in capsys.readouterr().err


def test_parse_rational():
    assert parse_rational("-3/6") == parse_rational("-1/2")
    with pytest.raises(ConfigError) as exc:
        parse_rational("0.25", "beta")
    assert exc.value.field == "beta"


def test_relation_filter(capsys):
    code, rep = _json(capsys, ["relations", "--relations", "1.14", "--modes", "1", "--degree", "1"])
    assert code == 0
    ids = [r["id"] for r in rep["records"] if r["status"] != "skipped"]
    assert ids and all(i.startswith("1.14[") for i in ids)
    assert all(abs(int(p.split("=")[1])) <= 1 for i in ids for p in i[5:-1].split(",") if p[0] in "mn")


def test_json_schema(capsys):
    code, rep = _json(capsys, ["relations", "--relations", "1.2,level", "--degree", "1"])
    assert code == 0
    assert set(rep) == {"meta", "config", "records", "summary", "data", "notes"}
    assert rep["meta"]["schema_version"] == SCHEMA_VERSION
    assert set(rep["meta"]["versions"]) == {"superboson", "python-flint", "python"}
    assert set(rep["records"][0]) == {"id", "status", "residual", "notes", "states"}
    s = rep["summary"]
    assert s["total"] == s["pass"] + s["fail"] + s["skipped"]
    assert rep["config"]["relations"] == ["1.2", "level"]


def test_failures_exit_1(capsys):
    code, rep = _json(capsys, ["relations", "--relations", "1.7", "--modes", "1", "--degree", "1"])
    assert code == 1
    assert rep["summary"]["fail"] > 0


def test_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["relations", "--relations", "1.12,1.15", "--modes", "1", "--degree", "1", "--format", "json"]
    main(argv + ["--out", str(a)])
    main(argv + ["--out", str(b), "--jobs", "2"])
    da, db = json.loads(a.read_text()), json.loads(b.read_text())
    for d in (da, db):
        d["meta"].pop("seconds")
        d["config"].pop("jobs")
        d["config"].pop("out")
    assert da == db
    rep1, _ = run(argv)
    rep2, _ = run(argv)
    assert rep1.to_json(timing=False) == rep2.to_json(timing=False)


def test_character_series_file(tmp_path, capsys):
    out = tmp_path / "s.txt"
    code = main(["character", "brute", "--alpha", "-1", "--part", "ker", "--degree", "3",
                 "--series", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# ")
    assert all(" : " in ln for ln in lines[1:])
    capsys.readouterr()


def test_character_compare(capsys):
    code, rep = _json(capsys, ["character", "compare", "--alpha", "1/2", "--degree", "4"])
    assert code == 0
    assert "monomial" in json.dumps(rep["data"])


def test_character_needs_eta(capsys):
    assert main(["character", "brute", "--alpha", "1/2", "--part", "ker", "--degree", "2"]) != 0
    capsys.readouterr()


def test_eval_21(capsys):
    code, rep = _json(capsys, ["eval", "--M", "2", "--N", "1", "--modes", "1"])
    assert code == 0
    assert rep["summary"]["fail"] == 0


def test_hw(capsys):
    code, rep = _json(capsys, ["hw"])
    assert code == 0
    assert "no other families" in [r["id"] for r in rep["records"]]


def test_vo_conventions(capsys):
    code, _ = _json(capsys, ["vo", "--kind", "psi", "--degree", "1", "--modes", "1"])
    assert code == 1
    code, rep = _json(capsys, ["vo", "--kind", "psi", "--degree", "1", "--modes", "1",
                               "--convention", "repaired"])
    bad = [r["id"] for r in rep["records"] if r["status"] == "fail"]
    assert bad == ["helper [psi1,e0] [repaired]"]


def test_report_text_and_exit_code():
    rep = Report("x", {}, [CheckRecord("a", "pass"), CheckRecord("b", "skipped", notes="why")])
    assert rep.exit_code() == 0
    rep.records.append(CheckRecord("c", "fail", "on 0:\nresidual"))
    assert rep.exit_code() == 1
    text = rep.to_text()
    assert "FAIL    c  on 0:" in text
    assert text.rstrip().endswith("summary: 1 pass, 1 fail, 1 skipped of 3")


def test_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(degree=-1).validate()
    with pytest.raises(ConfigError):
        RunConfig(jobs=0).validate()
    assert RunConfig(alpha="(1,0)").validate().space().kind == "10"


@pytest.mark.skipif(shutil.which("superboson") is None, reason="console script not installed")
def test_console_script():
    p = subprocess.run(["superboson", "relations", "--M", "2", "--N", "2"], capture_output=True, text=True)
    assert p.returncode == 2
    p = subprocess.run([sys.executable, "-m", "superboson.cli", "--help"], capture_output=True, text=True)
    assert p.returncode == 0 and "relations" in p.stdout
