import hashlib
import json
import math

import numpy as np
import pytest

from tqc import io
from tqc.cli import main
from tqc.curves import ClosedCurve
from tqc.errors import InputError


@pytest.fixture
def work(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["gen", "--shape", "ellipse", "--n", "256", "--out", "e.json"]) == 0
    return tmp_path


def read(path):
    return json.loads((path).read_text())


def test_gen_writes_curve(work):
    d = read(work / "e.json")
    assert d["closed"] and d["orientation"] == "ccw"
    assert d["spec"] == {"kind": "ellipse", "n": 256, "params": {"a": 2.0, "b": 1.0}}
    curve = io.load_curve("e.json")
    assert curve.n == 256


def test_report_envelope_and_hash(work, capsys):
    assert main(["turning", "--curve", "e.json", "--t", "1"]) == 0
    out = capsys.readouterr().out
    d = json.loads(out)
    assert set(d) == {"tool", "command", "seed", "metric", "inputs", "result"}
    assert d["command"] == ["turning", "--curve", "e.json", "--t", "1"]
    digest = hashlib.sha256((work / "e.json").read_bytes()).hexdigest()
    assert d["inputs"] == {"e.json": "sha256:" + digest}
    assert out.endswith("\n")
    assert out == json.dumps(d, sort_keys=True, indent=2) + "\n"


def test_reruns_are_byte_identical(work):
    argv = ["qs", "--curve", "e.json", "--exponent", "0.5", "--n", "96", "--csv", "b.csv"]
    assert main(argv + ["--out", "a.json"]) == 0
    first = ((work / "a.json").read_bytes(), (work / "b.csv").read_bytes())
    assert main(argv + ["--out", "a.json"]) == 0
    assert first == ((work / "a.json").read_bytes(), (work / "b.csv").read_bytes())


def test_thread_count_does_not_change_report(work):
    base = ["qs", "--curve", "e.json", "--exponent", "1", "--n", "96"]
    assert main(base + ["--threads", "1", "--out", "t1.json"]) == 0
    assert main(base + ["--threads", "3", "--out", "t3.json"]) == 0
    r1, r3 = read(work / "t1.json"), read(work / "t3.json")
    assert r1["result"] == r3["result"]


def test_csv_matches_report(work):
    assert main(["qs", "--curve", "e.json", "--exponent", "1", "--n", "96", "--csv", "b.csv", "--out", "q.json"]) == 0
    rows = (work / "b.csv").read_text().splitlines()
    bins = read(work / "q.json")["result"]["rho_bins"]
    assert rows[0] == "k_lo,k_hi,max_ratio,count"
    assert len(rows) == len(bins) + 1
    for line, b in zip(rows[1:], bins):
        lo, hi, val, count = line.split(",")
        assert float(hi) == b["k_hi"] and int(count) == b["count"]
        assert (val == "") == (b["max_ratio"] is None)


def test_param_then_qs_from_map(work):
    assert main(["param", "--curve", "e.json", "--n", "64", "--out", "m.json"]) == 0
    d = read(work / "m.json")
    assert d["kind"] == "arclength" and len(d["samples"]) == 64
    assert main(["qs", "--map", "m.json", "--curve", "e.json", "--exponent", "1", "--out", "q.json"]) == 0
    rep = read(work / "q.json")
    assert set(rep["inputs"]) == {"m.json", "e.json"}
    assert math.isfinite(rep["result"]["weak_R"])


def test_conformal_outputs(work):
    argv = ["conformal", "--curve", "e.json", "--grid", "100", "--pairs", "100"]
    assert main(argv + ["--out", "map.json", "--report", "r.json", "--svg", "m.svg"]) == 0
    assert read(work / "r.json")["result"]["passed"]
    assert "stages" in read(work / "r.json")["result"]
    assert "inv_b" in read(work / "map.json")
    svg = (work / "m.svg").read_text()
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert main(argv + ["--drop-stage", "0", "--report", "bad.json"]) == 2
    assert not read(work / "bad.json")["result"]["passed"]


def test_verify_scenarios(work):
    assert main(["verify", "--scenario", "cor34", "--out", "c.json"]) == 0
    assert read(work / "c.json")["result"]["passed"]
    assert main(["verify", "--scenario", "cor35", "--n-alpha", "2", "--out", "c.json"]) == 0
    assert main(["gen", "--shape", "koch", "--level", "3", "--out", "k.json"]) == 0
    assert main(["verify", "--scenario", "thm27", "--curve", "k.json", "--depth", "2", "--out", "c.json"]) == 0


def test_tree_threshold_failure_exits_2(work):
    assert main(["tree", "--curve", "e.json", "--depth", "2", "--out", "t.json"]) == 0
    assert main(["tree", "--curve", "e.json", "--depth", "2", "--prop3-max", "0.5", "--out", "t.json"]) == 2


def test_subdivide(work):
    assert main(["subdivide", "--curve", "e.json", "--eps", "0.1", "--out", "s.json"]) == 0
    assert read(work / "s.json")["result"]


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["turning"],
    ["verify", "--scenario", "nope"],
    ["gen", "--shape", "triangle"],
])
def test_usage_errors_exit_1(work, argv, capsys):
    assert main(argv) == 1
    assert "error" in capsys.readouterr().err


def test_malformed_json_names_problem(work, capsys):
    (work / "bad.json").write_text("{not json")
    assert main(["turning", "--curve", "bad.json", "--t", "1"]) == 1
    assert "bad.json" in capsys.readouterr().err


@pytest.mark.parametrize("doc,field", [
    ({"closed": True}, "vertices"),
    ({"vertices": [[0, 0], [1, 0], [0, 1]], "closed": False}, "closed"),
    ({"vertices": [[0, 0], [1, 0], [0, 1]], "orientation": "up"}, "orientation"),
    ({"vertices": [[0, 0], [1, "x"], [0, 1]]}, "vertices"),
])
def test_missing_or_bad_field_is_named(work, doc, field, capsys):
    (work / "c.json").write_text(json.dumps(doc))
    assert main(["turning", "--curve", "c.json", "--t", "1"]) == 1
    assert field in capsys.readouterr().err


def test_missing_file(work, capsys):
    assert main(["turning", "--curve", "nothere.json", "--t", "1"]) == 1
    assert "nothere.json" in capsys.readouterr().err


def test_dumps_handles_special_floats():
    text = io.dumps({"a": math.inf, "b": math.nan, "c": np.float64(1.5), "d": np.arange(2)})
    d = json.loads(text)
    assert d == {"a": "inf", "b": "nan", "c": 1.5, "d": [0, 1]}
    assert text.endswith("\n")


def test_curve_dict_round_trip():
    c = ClosedCurve(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.2, 0.7]]))
    again = io.curve_from_dict(json.loads(json.dumps(io.curve_to_dict(c))))
    assert np.array_equal(again.vertices, c.vertices)


def test_load_json_reports_position(tmp_path):
    p = tmp_path / "x.json"
    p.write_text('{"a": 1,\n  "b": }')
    with pytest.raises(InputError, match="line 2"):
        io.load_json(str(p), "curve")
