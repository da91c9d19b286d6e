from __future__ import annotations

import csv
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from circlelab import piecewise as pw
from circlelab.cli import main
from circlelab.config import (
    RunConfig,
    graph_csv,
    map_to_spec,
    parse_config,
    parse_map,
    serialize_config,
    trace_csv,
)
from circlelab.errors import ParseError
from circlelab.reports import SCHEMA
from circlelab.rotation import irrational_scheme


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_rot(capsys, tmp_path):
    rep = tmp_path / "r.json"
    code, out, _ = run(capsys, "rot", "--map", "rigid:2/5", "--report", str(rep))
    assert code == 0 and out.strip() == "2/5 exact, certificate x=0"
    data = json.loads(rep.read_text())
    assert data["schema"] == SCHEMA


def test_decimal_input_is_rejected(capsys):
    code, _, err = run(capsys, "rot", "--map", "rigid:0.5")
    assert code == 3 and "ParseError" in err
    with pytest.raises(SystemExit) as e:
        main(["rot", "--map", "rigid:1/2", "--q-cap", "many"])
    assert e.value.code == 3
    with pytest.raises(SystemExit) as e:
        main(["construct", "prop41", "--rho", "0.1"])
    assert e.value.code == 3


def test_classify_and_crossings(capsys):
    code, out, _ = run(capsys, "classify", "--map", "thmB.f")
    assert code == 0 and "HyperbolicLike" in out
    code, out, _ = run(capsys, "crossings", "--map", "rigid:1/3", "--map2", "rigid:1/2")
    assert code == 0 and out.split()[0] == "0"


def test_wordball_exit_codes(capsys):
    code, out, _ = run(capsys, "wordball", "--group", "thmB", "--radius", "3")
    assert code == 0 and "max_fixed_points=2" in out
    code, _, err = run(capsys, "wordball", "--group", "thmB", "--radius", "3", "--expected", "1")
    assert code == 2 and "claim violated" in err
    code, _, _ = run(capsys, "wordball", "--group", "thmB", "--radius", "3", "--expected", "2")
    assert code == 0


def test_construct_thmb(capsys, tmp_path):
    graph = tmp_path / "f.csv"
    code, out, _ = run(capsys, "construct", "thmB", "--csv", str(graph))
    assert code == 0 and "[[0, 1], [1, 0]]" in out
    code, _, err = run(capsys, "construct", "thmB", "--lambda", "2", "--mu", "4")
    assert code == 3 and "DependentParameters" in err


def test_elementary_and_lemmas(capsys, tmp_path):
    code, out, _ = run(capsys, "elementary", "--group", "thmB")
    assert code == 0 and out.strip() == "FiniteOrbit order=2"
    code, out, _ = run(capsys, "lemma-perturb", "--map", "rigid:1/3", "--draws", "3")
    assert code == 0 and "3/3" in out
    trace = tmp_path / "t.csv"
    code, out, _ = run(capsys, "lemma-irrational", "--h0", "rigid:1/3", "--steps", "2", "--csv", str(trace))
    assert code == 0 and "nesting ok" in out
    code, _, _ = run(capsys, "lemma-irrational", "--h0", "rigid:1/3", "--steps", "2", "--supply", "random")
    assert code == 2


def test_amplify_calibrate(capsys):
    code, out, _ = run(capsys, "amplify", "--map", "rigid:1/3", "--map2", "rigid:1/100", "--calibrate", "1/5")
    assert code == 0 and out.strip() == "m=6"
    code, _, _ = run(capsys, "amplify", "--map", "rigid:1/3", "--map2", "rigid:1/100")
    assert code == 3


def test_missing_file_is_an_input_error(capsys, tmp_path):
    code, _, _ = run(capsys, "--config", str(tmp_path / "absent.json"))
    assert code == 3


# --- configs and reports ------------------------------------------------------------------


def test_config_round_trip():
    cfg = RunConfig(
        command="wordball",
        maps={"a": "rigid:1/3", "b": {"type": "pw_affine", "xs": ["0", "1/2"], "ys": ["0", "3/4"]}},
        group=["a", "b"],
        params={"radius": 3, "eps": Fraction(1, 10), "interval": (Fraction(0), Fraction(1, 4))},
        outputs={"report": "out.json"},
        seed=7,
    )
    assert parse_config(serialize_config(cfg)) == cfg


@pytest.mark.parametrize(
    "text",
    [
        '{"command": "rot", "params": {"eps": 0.1}}',
        '{"command": "rot", "params": {"eps": "0.1"}}',
        '{"command": "rot", "bogus": 1}',
        '{"command": "rot", "params": {"radius": "3"}}',
        '{"params": {}}',
        "not json",
    ],
)
def test_bad_configs(text):
    with pytest.raises(ParseError):
        parse_config(text)


def test_map_spec_round_trip():
    for f in (pw.rigid(Fraction(1, 3)), pw.half_turn(), pw.pw_affine_graph([0, Fraction(1, 2)], [0, Fraction(3, 4)])):
        assert parse_map(map_to_spec(f)) == f


def test_config_run_is_deterministic(tmp_path):
    reports = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        cfg = RunConfig("lemma-perturb", maps={"h": "rigid:1/2"}, params={"draws": 3}, outputs={"report": str(out)}, seed=5)
        path = tmp_path / f"c{i}.json"
        path.write_text(serialize_config(cfg))
        assert main(["--config", str(path)]) == 0
        reports.append(out.read_bytes())
    assert reports[0] == reports[1]
    assert json.loads(reports[0])["schema"] == SCHEMA


def _rows(text):
    lines = text.splitlines()
    assert lines[0] == f"# schema: {SCHEMA}"
    return list(csv.DictReader(lines[1:]))


def test_graph_csv():
    f = pw.pw_affine_graph([0, Fraction(1, 2)], [0, Fraction(3, 4)])
    rows = _rows(graph_csv(f, 256))
    assert len(rows) == 256
    ys = [Fraction(r["fx_lo"]) for r in rows]
    assert all(b > a for a, b in zip(ys, ys[1:]))
    moeb = _rows(graph_csv(pw.half_turn(), 64))
    assert all(Fraction(r["fx_lo"]) <= Fraction(r["fx_hi"]) for r in moeb)


def test_trace_csv_widths():
    trace = irrational_scheme(pw.rigid(Fraction(1, 3)), steps=2)
    rows = _rows(trace_csv(trace))
    for r in rows:
        assert Fraction(r["width_exact"]) == Fraction(1, int(r["q"]) ** 2)


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "circlelab.cli", "rot", "--map", "rigid:1/4"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("1/4 exact")
