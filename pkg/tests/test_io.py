import json

import numpy as np
import pytest

from cansys import io
from cansys.errors import InputError

from conftest import DATA


def test_dumps_is_canonical():
    text = io.dumps({"b": 1 + 2j, "a": [np.float64(-0.0), np.nan, np.inf, np.int64(3), np.bool_(True)]})
    assert text.endswith("\n")
    assert json.loads(text) == {"a": [0.0, "nan", "inf", 3, True], "b": [1.0, 2.0]}
    assert text.index('"a"') < text.index('"b"')
    assert io.encode_matrix(np.array([[-0.0 - 0.0j]])) == [[[0.0, 0.0]]]


def test_parse_matrix_scalars():
    m = io.parse_matrix([[1, [0, 2]], [[3.5, -1], 0]], "/M")
    assert np.array_equal(m, [[1, 2j], [3.5 - 1j, 0]])
    assert io.parse_matrix([], "/M", (0, 3)).shape == (0, 3)
    with pytest.raises(io.DocumentError) as exc:
        io.parse_matrix([[1, 2], [3]], "/M")
    assert exc.value.pointer == "/M"
    with pytest.raises(io.DocumentError) as exc:
        io.parse_matrix([[1, [1, 2, 3]]], "/M")
    assert exc.value.pointer == "/M/0/1"


def test_system_round_trip():
    doc = io.load(DATA / "systems" / "twopiece4.json")
    s = io.parse_system(doc)
    assert s.n == 4 and (s.a, s.b) == (0.0, 2.0) and len(s.pieces) == 2
    assert np.allclose(s.Delta(0.5), np.eye(4) + 0.5 * np.array(
        [[0.5, 0, 0.25, 0], [0, 0, 0, 0], [0.25, 0, 0, 0], [0, 0, 0, 0.5]]))
    half = io.parse_system(io.load(DATA / "systems" / "dirac_halfline.json"))
    assert not half.endpoint_b.is_regular and np.isinf(half.endpoint_b.true_b)


def test_system_tiling_and_overrides():
    doc = io.load(DATA / "systems" / "dirac.json")
    s = io.parse_system(doc, {"rel_tol": "1e-8"})
    assert s.tol.rel_tol == 1e-8
    doc["pieces"][0]["t0"] = 0.5
    with pytest.raises(InputError):
        io.parse_system(doc)
