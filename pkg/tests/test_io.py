import json

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from qhdlab.grid import make_grid
from qhdlab.io import read_snapshot, write_json, write_manifest, write_snapshot


@given(arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(1, 7)),
              elements=st.floats(allow_nan=False, width=64)))
def test_real_snapshot_roundtrip_is_bitwise(arr):
    import tempfile
    with tempfile.TemporaryDirectory() as d:
        write_snapshot(f"{d}/a", arr, t=0.5)
        back, header = read_snapshot(f"{d}/a")
    assert back.tobytes() == arr.tobytes()
    assert header["dtype"] == "float64" and header["byteorder"] == "little"


def test_complex_snapshot_with_grid(tmp_path):
    g = make_grid(2, 8, 3.0)
    z = np.exp(1j * g.x[0]) * (1 + g.x[1])
    bin_path, json_path = write_snapshot(tmp_path / "psi_0001", z, g, 1.25, field="psi")
    assert bin_path.stat().st_size == z.size * 16
    back, h = read_snapshot(tmp_path / "psi_0001")
    assert np.array_equal(back, z)
    assert h["shape"] == [8, 8] and h["t"] == 1.25 and h["field"] == "psi"
    assert h["grid"] == g.to_dict()
    # raw layout: little-endian complex128 in C order
    assert np.array_equal(np.fromfile(bin_path, dtype="<c16").reshape(8, 8), z)


def test_manifest_and_json(tmp_path):
    p = write_manifest(tmp_path, {"run": {"kind": "nls"}}, "ok", 1.5, seed=3,
                       arr=np.arange(3), x=np.float64(2.0))
    doc = json.loads(p.read_text())
    assert doc["status"] == "ok" and doc["seed"] == 3 and doc["arr"] == [0, 1, 2]
    assert {"qhdlab", "numpy", "scipy", "python"} <= set(doc["versions"])
    with pytest.raises(TypeError):
        write_json(tmp_path / "bad.json", {"o": object()})
