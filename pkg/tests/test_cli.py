import json
import shlex
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from kekule_integrals.cli import main, parse_range
from kekule_integrals.harness import REPORT_SCHEMA

ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("KEKULE_CACHE_DIR", str(tmp_path / "cache"))
    monkeypatch.setenv("KEKULE_OEIS_URL", "http://127.0.0.1:9")  # nothing listens there


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_seq_kekule(capsys):
    rc, out, _ = run(capsys, "seq", "kekule", "--n", "0..3")
    assert rc == 0 and out.split() == ["0", "4", "40", "396"]


def test_seq_variants(capsys):
    assert run(capsys, "seq", "y", "--n", "2", "--k", "1")[1].split() == ["24"]
    assert run(capsys, "seq", "z", "--n", "1", "--k", "3")[1].split() == ["7"]
    assert run(capsys, "seq", "pell", "--n", "1..6")[1].split() == ["1", "2", "5", "12", "29", "70"]
    assert run(capsys, "seq", "core", "--n", "8,12")[1].split() == ["2", "3"]


def test_parse_range():
    assert parse_range("0..3") == [0, 1, 2, 3]
    assert parse_range("1,4,7") == [1, 4, 7]
    for bad in ("3..1", "a..b", ""):
        with pytest.raises(ValueError):
            parse_range(bad)


def test_double_json_example(capsys):
    rc, out, _ = run(capsys, "double", "--n", "2", "--upper", "1", "--digits", "60", "--json")
    doc = json.loads(out)
    jsonschema.validate(doc, REPORT_SCHEMA)
    case = doc["cases"][0]
    assert rc == 0 and case["recognized"] == "4 (-1 + √2) π"
    assert case["computed"].startswith("5.2051611382742920342129504271247632576698")


def test_verify_conj8_writes_report(capsys, tmp_path):
    out_path = tmp_path / "r.json"
    rc, out, _ = run(capsys, "verify", "--suite", "conj8", "--m", "1..17", "--offline",
                     "--out", str(out_path))
    assert rc == 0
    doc = json.loads(out_path.read_text())
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert doc["summary"]["pass"] == 17 and doc["summary"]["fail"] == 0


@pytest.mark.parametrize("argv", [
    ["seq", "kekule", "--n", "0..3"],
    ["seq", "convergent", "--n", "1..3"],
    ["integral", "--n", "4", "--k", "2"],
    ["double", "--n", "0", "--upper", "2*sqrt2"],
    ["recognize", "--value", "6.28318530717958647692528676655900576839433879875021164194989"],
    ["verify", "--suite", "conj4", "--n", "2,4,6", "--offline"],
    ["verify", "--suite", "series", "--offline"],
    ["oeis", "--id", "A019554", "--terms", "8", "--offline"],
    ["cache", "stats"],
    ["cache", "clear"],
])
def test_json_output_validates_for_every_verb(capsys, argv):
    rc, out, _ = run(capsys, "--json", *argv)
    assert rc == 0
    jsonschema.validate(json.loads(out), REPORT_SCHEMA)


def test_recognize_from_file_and_forms(capsys, tmp_path):
    value = "18.4731812361479270041195602731821754132159099875052057221889"
    f = tmp_path / "v.txt"
    f.write_text(value + "\n")
    rc, out, _ = run(capsys, "recognize", "--value", f"@{f}", "--form", "conj10", "--m", "3")
    assert rc == 0 and "2 √(3 (6 + √2))" in out
    rc, out, _ = run(capsys, "recognize", "--value",
                     "14.4037729838999605127345850321415817756774018572315309236614",
                     "--form", "logsurd")
    assert rc == 0 and out.strip() == "-π (ln(1) - 2 ln(5 + 2 √6))"


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["seq", "kekule"],
    ["seq", "kekule", "--n", "0..3", "--bogus"],
    ["double", "--n", "2", "--upper", "1.5"],
    ["double", "--n", "2", "--upper", "1", "--digits", "400"],
    ["integral", "--n", "2", "--k", "0.5"],
    ["verify", "--suite", "conj99"],
    ["recognize", "--value", "1.0", "--form", "conj10"],
    ["cache", "purge"],
])
def test_usage_errors_exit_2(capsys, argv):
    rc, out, err = run(capsys, *argv)
    assert rc == 2
    assert "usage" in (out + err).lower()


def test_computation_failures_exit_3(capsys):
    rc, _, err = run(capsys, "oeis", "--id", "A999999", "--terms", "1", "--offline")
    assert rc == 3 and "A999999" in err
    pi50 = "3.14159265358979323846264338327950288419716939937510"
    rc, _, _ = run(capsys, "recognize", "--value", "2." + "7" * 50 + "3", "--form", "logsurd")
    assert rc == 3
    rc, _, _ = run(capsys, "recognize", "--value", pi50, "--form", "surd")
    assert rc == 0  # pi itself is 1 * pi


def test_verification_failure_exits_1(capsys):
    rc, out, _ = run(capsys, "verify", "--suite", "prop1", "--N", "1000", "--offline")
    assert rc == 1 and "fail" in out


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kekule_integrals.cli", "seq", "companion", "--n", "0..3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.split() == ["1", "5", "49", "485"]


def _readme_commands():
    text = (ROOT / "README.md").read_text()
    return [line for line in text.splitlines() if line.startswith("kekule ")]


def test_readme_has_examples():
    assert len(_readme_commands()) >= 8


@pytest.mark.parametrize("line", _readme_commands())
def test_readme_examples_run_offline(capsys, line):
    rc, out, _ = run(capsys, *shlex.split(line)[1:])
    assert rc == 0 and out.strip()
