import json
from pathlib import Path

import pytest

from fqcrystal.cli import run
from fqcrystal.modelio import ModelError, load_model, model_to_json, parse_model, read_csv

INPUTS = Path(__file__).resolve().parent.parent / "docs" / "inputs"
SUBCOMMANDS = ["construct", "roots", "spectrum", "cutproject", "generic", "unfolded", "mixedvol",
               "amoeba", "leeyang", "stability", "verify", "plot"]


def fq(tmp_path, *argv, out="out"):
    return run([*argv, "--out", str(tmp_path / out)])


def test_mixedvol_prints_two(tmp_path, capsys):
    assert fq(tmp_path, "mixedvol", "--polytopes", str(INPUTS / "squares.json")) == 0
    assert capsys.readouterr().out.strip().endswith("2")
    data = json.loads((tmp_path / "out" / "mixedvol.json").read_text())
    assert data["mixed_volume"] == "2"


def test_unfolded_reports_folded(tmp_path):
    assert fq(tmp_path, "unfolded", "--polytopes", str(INPUTS / "squares.json")) == 0
    data = json.loads((tmp_path / "out" / "unfolded.json").read_text())
    assert data["unfolded"] is False and data["witness_u"] is not None


def test_verify_ks_passes(tmp_path, capsys):
    assert fq(tmp_path, "verify", "--spec", str(INPUTS / "ks_spec.json"), "--window", "1000") == 0
    assert "overall      PASS" in capsys.readouterr().out
    rep = json.loads((tmp_path / "out" / "verify.json").read_text())
    assert all(c["pass"] for c in rep["checks"])


def test_missing_model_exit_2(tmp_path, capsys):
    assert fq(tmp_path, "roots", "--model", str(tmp_path / "missing.json")) == 2
    assert "no such file" in capsys.readouterr().err


def test_usage_errors_exit_2(tmp_path):
    assert run(["bogus"]) == 2
    assert fq(tmp_path, "roots") == 2  # needs --model or --spec
    assert fq(tmp_path, "roots", "--spec", str(INPUTS / "ks_spec.json"), "--window", "-1") == 2


def test_malformed_model_diagnostics(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"m": 2, "components": [{"terms": [{"exp": [1], "re": "1"}]}]}')
    assert fq(tmp_path, "roots", "--model", str(bad)) == 2
    err = capsys.readouterr().err
    assert "components[0].terms[0].exp" in err
    bad.write_text('{"m": 2,\n "components": [}')
    assert fq(tmp_path, "roots", "--model", str(bad)) == 2
    assert "line 2" in capsys.readouterr().err


def test_computational_error_exit_1(tmp_path):
    # z1 - 2 z2 with M = (1, 1/2) has no real roots; the rational route refuses it
    model = tmp_path / "m.json"
    model.write_text(json.dumps({"m": 2, "n": 1, "components": [{"terms": [
        {"exp": [1, 0], "re": "1"}, {"exp": [0, 1], "re": "-2"}]}], "M": [["1"], ["1/2"]]}))
    assert fq(tmp_path, "spectrum", "--model", str(model), "--window", "3") == 1



def test_spectrum_float_frequency_matrix(tmp_path, capsys):
    # "-0.3" is a float, so the rational route asks for "-3/10" instead
    assert fq(tmp_path, "spectrum", "--model", str(INPUTS / "ks_model.json"), "--window", "2") == 1
    assert "'-3/10'" in capsys.readouterr().err
    exact = json.loads((INPUTS / "ks_model.json").read_text())
    exact["M"] = [["1"], ["-3/10"]]
    model = tmp_path / "exact.json"
    model.write_text(json.dumps(exact))
    assert fq(tmp_path, "spectrum", "--model", str(model), "--window", "2") == 0
    _, rows = read_csv(tmp_path / "out" / "spectrum.csv")
    assert len(rows) == 13


@pytest.mark.parametrize("cmd", SUBCOMMANDS)
def test_every_subcommand_has_dry_run(tmp_path, cmd):
    inputs = {
        "construct": ["--spec", INPUTS / "ks_spec.json"],
        "roots": ["--spec", INPUTS / "ks_spec.json"],
        "spectrum": ["--spec", INPUTS / "ks_spec.json"],
        "cutproject": ["--input", INPUTS / "cutproject.json"],
        "generic": ["--model", INPUTS / "linear_system.json"],
        "unfolded": ["--polytopes", INPUTS / "squares.json"],
        "mixedvol": ["--polytopes", INPUTS / "squares.json"],
        "amoeba": ["--model", INPUTS / "ks_model.json"],
        "leeyang": ["--model", INPUTS / "lee_yang.json"],
        "stability": ["--model", INPUTS / "ks_model.json"],
        "verify": ["--spec", INPUTS / "ks_spec.json"],
        "plot": ["--input", None],
    }[cmd]
    if cmd == "plot":
        assert fq(tmp_path, "roots", "--spec", str(INPUTS / "ks_spec.json"), "--window", "5", out="src") == 0
        inputs = ["--input", tmp_path / "src" / "roots.csv"]
    assert fq(tmp_path, cmd, *map(str, inputs), "--dry-run") == 0
    assert not (tmp_path / "out").exists() or not any((tmp_path / "out").iterdir())


def test_roots_csv_and_manifest(tmp_path):
    assert fq(tmp_path, "roots", "--spec", str(INPUTS / "ks_spec.json"), "--window", "50") == 0
    header, rows = read_csv(tmp_path / "out" / "roots.csv")
    assert header[0] == "x1" and abs(len(rows) - 160) <= 1
    man = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert man["subcommand"] == "roots" and "roots.csv" in man["artifacts"]
    assert man["inputs"]


def test_byte_identical_outputs(tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    for name in ("a", "b"):
        assert fq(tmp_path, "spectrum", "--spec", str(INPUTS / "ks_spec.json"), "--window", "3", out=name) == 0
    for f in ("spectrum.csv", "manifest.json"):
        a = (tmp_path / "a" / f).read_bytes()
        b = (tmp_path / "b" / f).read_bytes()
        if f == "manifest.json":
            a, b = (json.loads(x) for x in (a, b))
            a.pop("parameters", None), b.pop("parameters", None)
        assert a == b


def test_sine_model_spectrum(tmp_path):
    assert fq(tmp_path, "spectrum", "--model", str(INPUTS / "sine_model.json"), "--window", "6") == 0
    header, rows = read_csv(tmp_path / "out" / "spectrum.csv")
    s = header.index("s1")
    freqs = sorted(float(r[s]) for r in rows if abs(complex(float(r[header.index("re")]),
                                                            float(r[header.index("im")]))) > 1e-9)
    assert freqs == [-6, -4, -2, 0, 2, 4, 6]


def test_generic_and_amoeba_and_leeyang(tmp_path):
    assert fq(tmp_path, "generic", "--model", str(INPUTS / "linear_system.json"), out="g") == 0
    assert json.loads((tmp_path / "g" / "verdict.json").read_text())["verdict"] == "generic"
    assert fq(tmp_path, "leeyang", "--model", str(INPUTS / "lee_yang.json"), out="l") == 0
    assert json.loads((tmp_path / "l" / "leeyang.json").read_text())[0]["verdict"] == "probably-yes"
    assert fq(tmp_path, "amoeba", "--model", str(INPUTS / "ks_model.json"), "--grid", "64", out="a") == 0
    header, rows = read_csv(tmp_path / "a" / "amoeba.csv")
    assert header == ["x1", "x2", "membership"]
    assert {r[2] for r in rows} <= {"yes", "no", "boundary-undecided"}


def test_plot_writes_svg(tmp_path):
    assert fq(tmp_path, "spectrum", "--spec", str(INPUTS / "ks_spec.json"), "--window", "3", out="s") == 0
    assert fq(tmp_path, "plot", "--input", str(tmp_path / "s" / "spectrum.csv")) == 0
    svg = (tmp_path / "out" / "spectrum.svg").read_text()
    assert svg.startswith("<svg") and "<line" in svg


def test_model_roundtrip():
    Q, M = load_model(INPUTS / "ks_model.json")
    Q2, M2 = parse_model(model_to_json(Q, M))
    assert Q2 == Q and M2 == M
    with pytest.raises(ModelError, match="zero polynomial"):
        parse_model({"m": 1, "components": [{"terms": [{"exp": [0], "re": 0}]}]})
