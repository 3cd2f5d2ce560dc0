import csv
import io
import json
import subprocess
import sys
from collections import Counter

import jsonschema
import pytest

from eostrata import cli
from eostrata.hecke_chow import build_window


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def json_rows(text):
    recs = [json.loads(line) for line in text.splitlines()]
    cli.validate_records(recs)
    assert recs[0]["record"] == "header" and recs[-1]["record"] == "summary"
    return recs[0], [r["data"] for r in recs[1:-1]], recs[-1]


def test_eo_strata_n3(capsys):
    code, out, _ = run(["eo-strata", "--n", "3", "--format", "json-lines"], capsys)
    assert code == 0
    header, rows, summary = json_rows(out)
    assert len(rows) == 9 and summary["ok"]
    assert Counter(r["dimension"] for r in rows) == Counter([0, 1, 1, 2, 2, 2, 3, 3, 4])
    assert header["seed"] == 0


def test_newton_strata_n3(capsys):
    code, out, _ = run(["newton-strata", "--n", "3", "--format", "csv"], capsys)
    assert code == 0
    lines = [ln for ln in out.splitlines() if not ln.startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(lines))))
    assert len(rows) == 4
    assert sum(r["mu_ordinary"] == "yes" for r in rows) == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["eo-strata", "--n", "4"],
        ["newton-strata", "--n", "5"],
        ["slopes", "--n", "3", "--a", "3", "--b", "1"],
        ["std-module", "--n", "3", "--a", "2", "--b", "2", "--p", "3"],
        ["dl-points", "--n", "3", "--variant", "all"],
        ["dl-points", "--n", "2", "--i", "1", "--points"],
        ["principal-check", "--n", "2", "--i", "1", "--random", "10"],
        ["chow-kernel", "--window", "2,2,1", "--coeff", "Fl:5"],
        ["ihara-n2", "--window", "2,2,1"],
        ["e1-row", "--pattern", "iwahori", "--random-model", "3"],
        ["e1-row", "--pattern", "k1-hecke", "--window", "2,2,1", "--drop-connected"],
        ["selftest", "--quick", "--only", "1,4"],
    ],
)
def test_json_output_validates_and_passes(argv, capsys):
    code, out, _ = run(argv + ["--format", "json-lines", "--seed", "12345678901234567890"], capsys)
    assert code == 0
    header, rows, summary = json_rows(out)
    assert header["seed"] == 12345678901234567890
    assert summary["rows"] == len(rows) > 0


def test_schema_rejects_malformed_records():
    schema = cli.load_schema()
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({"record": "header", "command": "eo-strata", "seed": -1,
                             "params": {}, "columns": ["a"]}, schema)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({"record": "row", "command": "eo-strata", "data": {"a": 1}}, schema)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({"record": "summary", "command": "nope", "ok": True, "rows": 0, "notes": []}, schema)


def test_table_is_deterministic(capsys):
    argv = ["principal-check", "--n", "3", "--i", "2", "--random", "8", "--seed", "99", "--exponent2", "dual"]
    a = run(argv, capsys)
    b = run(argv, capsys)
    assert a == b and a[0] == 0
    assert a[1].startswith("# eostrata principal-check seed=99 ")


def test_validation_failure_exit_code(capsys):
    # printed constants disagree with form 1 for n = 3
    code, out, _ = run(["principal-check", "--n", "3", "--i", "1", "--random", "4", "--seed", "7"], capsys)
    assert code == cli.EXIT_FAIL
    assert "# status: FAILED" in out


def test_guard_exit_code(capsys):
    code, _, err = run(["dl-points", "--n", "5"], capsys)
    assert code == cli.EXIT_GUARD and "guard" in err
    code, _, _ = run(["chow-kernel", "--window", "4,2,1"], capsys)
    assert code == cli.EXIT_GUARD


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["eo-strata"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["chow-kernel", "--window", "2,2,1", "--coeff", "Fl:4"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        cli.main(["selftest", "--seed", str(2**64)])
    capsys.readouterr()
    code, _, err = run(["chow-kernel", "--window", "2,2,1", "--coeff", "Fl:3"], capsys)
    assert code == cli.EXIT_USAGE and "admissible" in err
    code, _, _ = run(["chow-kernel"], capsys)
    assert code == cli.EXIT_USAGE
    code, _, _ = run(["selftest", "--only", "15"], capsys)
    assert code == cli.EXIT_USAGE


def test_model_and_divisor_files(tmp_path, capsys):
    model = tmp_path / "model.json"
    model.write_text(build_window(2, 3, 1).to_model().dumps())
    code, out, _ = run(["ihara-n2", "--model", str(model), "--format", "json-lines"], capsys)
    assert code == 0
    _, rows, _ = json_rows(out)
    assert {r["quantity"]: r["value"] for r in rows}["h1"] == 6
    div = tmp_path / "d.txt"
    div.write_text("A 1,0 1\nA 0,1 -1\nB 0,1 1\nB 1,0 -1\n")
    code, out, _ = run(["principal-check", "--n", "2", "--i", "1", "--divisor", str(div)], capsys)
    assert code == 0 and "file" in out
    code, _, err = run(["ihara-n2", "--model", str(tmp_path / "missing.json")], capsys)
    assert code == cli.EXIT_USAGE


def test_precision_env(monkeypatch, capsys):
    monkeypatch.setenv("EOSTRATA_PRECISION", "30")
    code, out, _ = run(["slopes", "--n", "2", "--a", "2", "--b", "1"], capsys)
    assert code == 0 and "precision=30" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "eostrata", "eo-strata", "--n", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "# eostrata eo-strata seed=0 n=2"
