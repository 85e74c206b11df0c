import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lonsim.exceptions import UndefinedCorrelationError
from lonsim.similarity import SimilarityMatrix, block_summary, sim, sim_matrix


def test_sim_examples():
    z = np.array([0.3, 0.1, 0.5, 0.2])
    assert sim(z, z) == 1.0
    assert sim(z, np.exp(3 * z)) == 1.0
    assert sim(z, -z) == -1.0
    with pytest.raises(UndefinedCorrelationError):
        sim(z, np.ones(4))
    with pytest.raises(ValueError):
        sim(z, z[:3])


def test_matrix_duplicates_and_absent_cells():
    a = np.array([1.0, 3.0, 2.0, 0.0])
    m = sim_matrix([a, a.copy(), np.ones(4)], ["a", "b", "c"])
    assert m.get("a", "b") == 1.0
    assert math.isnan(m.get("a", "c"))
    assert np.isnan(np.diag(m.values)).all()
    assert np.array_equal(m.values, m.values.T, equal_nan=True)
    assert len(list(m.pairs())) == 3


def test_csv_format_and_round_trip(tmp_path):
    a = np.array([1.0, 3.0, 2.0, 0.0])
    m = sim_matrix([a, np.array([1.0, 2.0, 3.0, 4.0]), np.ones(4)], ["a", "b", "c"])
    m.to_csv(tmp_path / "s.csv")
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0] == "id,a,b,c"
    assert lines[1] == "a,-,-0.400000,NA"
    assert lines[3] == "c,NA,NA,-"
    back = SimilarityMatrix.from_csv(tmp_path / "s.csv")
    assert back.ids == m.ids
    assert np.allclose(back.values, m.values, equal_nan=True, atol=5e-7)


def test_block_summary_examples():
    x, y = np.arange(6.0), np.arange(6.0)[::-1]
    m = sim_matrix([x, x, y, y], ["a1", "a2", "b1", "b2"])
    blocks = block_summary(m, {"a1": "A", "a2": "A", "b1": "B", "b2": "B"})
    assert blocks == {("A", "A"): 1.0, ("A", "B"): -1.0, ("B", "B"): 1.0}
    one = block_summary(m, dict.fromkeys(m.ids, "G"))
    assert list(one) == [("G", "G")]
    with pytest.raises(KeyError):
        block_summary(m, {"a1": "A"})


vectors = st.lists(st.lists(st.integers(0, 20), min_size=8, max_size=8), min_size=2, max_size=6)


@given(vectors)
def test_matrix_properties(rows):
    mats = [np.array(r, dtype=float) for r in rows]
    m = sim_matrix(mats, [str(i) for i in range(len(mats))])
    v = m.values
    off = ~np.eye(len(mats), dtype=bool)
    finite = v[off][~np.isnan(v[off])]
    assert np.all((finite >= -1 - 1e-12) & (finite <= 1 + 1e-12))
    assert np.array_equal(v, v.T, equal_nan=True)
    # a strictly increasing transform of one footprint leaves its row unchanged
    mats2 = [np.exp(mats[0] / 7.0) * 3 + 1] + mats[1:]
    m2 = sim_matrix(mats2, m.ids)
    assert np.allclose(m2.values, v, equal_nan=True, atol=1e-12)
    for b in block_summary(m, {i: int(i) % 2 for i in m.ids}).values():
        assert -1 - 1e-12 <= b <= 1 + 1e-12
