import csv
import io
import struct

import numpy as np
import pytest
from hypothesis import given, strategies as st

from synturb.io import (
    FORMAT_VERSION, MAGIC, FormatError, csv_text, ensemble_rows, format_float, gnuplot_script,
    json_text, load_ensemble, load_field, read_block, save_ensemble, save_field, write_block,
)
from synturb.kraichnan import KraichnanOracle, simulate_limit_pairs
from synturb.params import make_params
from synturb.synthfield import advance, eval_increment, synthesize


@given(st.floats(allow_nan=False, allow_infinity=True))
def test_format_float_round_trips(v):
    assert float(format_float(v)) == v


def test_csv_is_rfc4180():
    text = csv_text(["name", "value"], [("a,b", 1.5), ('say "hi"', 2), ("x", float("nan"))])
    assert text.split("\r\n")[0] == "name,value"
    assert text.endswith("\r\n")
    rows = list(csv.reader(io.StringIO(text, newline="")))
    assert rows[1] == ["a,b", "1.5"]
    assert rows[2] == ['say "hi"', "2"]
    assert rows[3] == ["x", "nan"]


def test_json_stable_key_order():
    a = json_text({"b": 1, "a": {"y": np.float64(2.0), "x": np.arange(2)}})
    b = json_text({"a": {"x": [0, 1], "y": 2.0}, "b": 1})
    assert a == b
    assert a.index('"a"') < a.index('"b"')


def test_gnuplot_script_columns():
    s = gnuplot_script("msd.csv", "t", ["msd"], ["t", "msd", "stderr"], logx=True, logy=True)
    assert "using 1:2" in s and "set logscale x" in s and "separator ','" in s


def test_block_round_trip(tmp_path):
    arrs = {"a": np.arange(6.0).reshape(2, 3), "b": np.array([np.pi])}
    path = write_block(tmp_path / "x.bin", {"kind": "test"}, arrs)
    raw = path.read_bytes()
    assert raw[:8] == MAGIC
    assert struct.unpack("<II", raw[8:16])[0] == FORMAT_VERSION
    hdr, out = read_block(path)
    assert hdr["kind"] == "test"
    for k in arrs:
        assert np.array_equal(out[k], arrs[k])
    # payload is little-endian f64
    assert np.frombuffer(raw[-8:], dtype="<f8")[0] == np.pi


def test_block_rejects_bad_input(tmp_path):
    path = write_block(tmp_path / "x.bin", {}, {"a": np.zeros(2)})
    raw = bytearray(path.read_bytes())
    newer = raw[:8] + struct.pack("<I", FORMAT_VERSION + 1) + raw[12:]
    (tmp_path / "n.bin").write_bytes(bytes(newer))
    with pytest.raises(FormatError, match="newer"):
        read_block(tmp_path / "n.bin")
    (tmp_path / "m.bin").write_bytes(b"NOTMAGIC" + bytes(raw[8:]))
    with pytest.raises(FormatError):
        read_block(tmp_path / "m.bin")
    (tmp_path / "t.bin").write_bytes(bytes(raw) + b"\0")
    with pytest.raises(FormatError, match="trailing"):
        read_block(tmp_path / "t.bin")


def test_field_round_trip(tmp_path):
    p = make_params(1.2, 0.45, ell1=0.01)
    f = synthesize(p, 64, seed=7, n_real=2)
    advance(f, 0.2)
    save_field(tmp_path / "f.bin", f)
    g = load_field(tmp_path / "f.bin")
    assert g.time == f.time and g.params == p
    x = np.array([[0.3, 0.1], [0.2, -0.4]])
    assert np.array_equal(eval_increment(g, x), eval_increment(f, x))


def test_ensemble_round_trip(tmp_path):
    o = KraichnanOracle(make_params(1.2, 0.45), 0.1)
    e = simulate_limit_pairs(o, [1.0, 0.0], 1.0, n_pairs=5, seed=1, times=[0.0, 0.5, 1.0])
    save_ensemble(tmp_path / "e.bin", e)
    e2 = load_ensemble(tmp_path / "e.bin")
    assert np.array_equal(e2.traj, e.traj) and e2.model == "kraichnan" and e2.seed == 1
    rows = list(ensemble_rows(e2, [0]))
    assert rows[0] == (0.0, 0, 1.0, 0.0)
    with pytest.raises(FormatError):
        load_field(tmp_path / "e.bin")
