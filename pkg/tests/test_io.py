import io
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from jointmoments.ensembles import EnsembleSpec
from jointmoments.io import (
    format_value,
    provenance,
    read_csv,
    read_json,
    to_jsonable,
    write_csv,
    write_json,
    write_samples,
)


def test_format_value():
    assert format_value(0.1) == "0.10000000000000001"
    assert float(format_value(1 / 3)) == 1 / 3
    assert format_value(None) == ""
    assert format_value(True) == "true"
    assert format_value(np.int64(3)) == "3"
    assert format_value(Fraction(1, 4)) == "0.25"
    assert format_value([1, 2]) == "[1,2]"


def test_to_jsonable():
    assert to_jsonable({"a": float("nan"), "b": 1 + 2j, "c": np.arange(2)}) == {
        "a": None,
        "b": {"re": 1.0, "im": 2.0},
        "c": [0, 1],
    }
    assert to_jsonable(EnsembleSpec.laguerre(2, 2.0, 1.0))["kind"] == "laguerre"


def test_csv_roundtrip_exact_floats(tmp_path):
    rows = [{"x": 1 / 3, "y": math.pi}, {"x": 1e-300, "y": -2.5}]
    meta = provenance(7, {"beta": 2.0}, "demo")
    path = tmp_path / "out.csv"
    write_csv(rows, path, meta)
    text = path.read_text()
    assert text.startswith("# package: jointmoments\n")
    got_meta, got = read_csv(path)
    assert got_meta["seed"] == 7 and got_meta["spec"] == {"beta": 2.0}
    assert [float(r["x"]) for r in got] == [1 / 3, 1e-300]
    assert [float(r["y"]) for r in got] == [math.pi, -2.5]


def test_json_roundtrip_spec(tmp_path):
    spec = EnsembleSpec.hua_pickrell(3, 2.0, 1.0 + 0.5j)
    path = tmp_path / "r.json"
    write_json(spec, {"value": 0.1}, {"n": 3}, path)
    doc = read_json(path)
    assert EnsembleSpec.from_dict(doc["spec"]) == spec
    assert doc["result"]["value"] == 0.1


def test_json_to_stream():
    buf = io.StringIO()
    write_json({"a": 1}, {"v": float("inf")}, None, buf)
    doc = json.loads(buf.getvalue())
    assert doc == {"spec": {"a": 1}, "result": {"v": None}, "diagnostics": {}}


def test_write_samples_sidecar(tmp_path):
    pts = np.array([[2.0, 1.0], [0.5, -0.5]])
    spec = EnsembleSpec.laguerre(2, 2.0, 1.0)
    side = write_samples(pts, tmp_path / "s.csv", spec, 3, {"acceptance": 0.4})
    meta, rows = read_csv(tmp_path / "s.csv")
    assert [[float(r["x1"]), float(r["x2"])] for r in rows] == pts.tolist()
    doc = read_json(side)
    assert EnsembleSpec.from_dict(doc["spec"]) == spec
    assert doc["result"]["n_draws"] == 2
    assert doc["diagnostics"]["acceptance"] == 0.4
