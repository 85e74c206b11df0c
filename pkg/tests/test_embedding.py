import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_lon
from lonsim.embedding import (
    fitness_octiles,
    instance_space,
    node_embed,
    principal_axes,
    project_2d,
    random_walks,
    scatter_svg,
    wl_footprint,
    wl_histogram,
)
from lonsim.exceptions import ProjectionError
from lonsim.problems import generate
from lonsim.sampling import IlsConfig, sample_lon


@pytest.fixture(scope="module")
def sampled():
    return sample_lon(generate("npp", 10, seed=1), IlsConfig(100, 50), 0)


def test_node_embed_shape_and_determinism(sampled):
    z = node_embed(sampled, d=8, seed=3)
    assert z.shape == (sampled.n_nodes, 8)
    assert np.isfinite(z).all()
    assert np.array_equal(z, node_embed(sampled, d=8, seed=3))


def test_node_embed_single_node():
    assert node_embed(make_lon([0]), d=4).tolist() == [[0.0] * 4]


def test_node_embed_ignores_input_order():
    configs, fit, edges = [5, 1, 9, 3], [2, 1, 0, 3], [(0, 1), (1, 2), (3, 0), (3, 2)]
    perm = [2, 0, 3, 1]
    inv = {old: new for new, old in enumerate(perm)}
    a = make_lon(fit, edges, configs=configs)
    b = make_lon([fit[i] for i in perm], [(inv[s], inv[d]) for s, d in edges], configs=[configs[i] for i in perm])
    assert np.array_equal(node_embed(a, d=4), node_embed(b, d=4))


def test_walks_follow_edges(sampled):
    walks = random_walks(sampled, n_walks=2, walk_length=6, seed=0)
    assert walks.shape == (2 * sampled.n_nodes, 6)
    edges = set(zip(sampled.src.tolist(), sampled.dst.tolist()))
    sinks = set(np.flatnonzero(sampled.out_degree() == 0).tolist())
    for row in walks:
        for a, b in zip(row, row[1:]):
            assert (int(a), int(b)) in edges or int(a) in sinks


def test_node_embed_symmetric_complete_lon():
    k = 6
    lon = make_lon([0] * k, [(i, j) for i in range(k) for j in range(k) if i != j])
    # the off-diagonal PMI is only about log(1.03) here, so the band needs many walks
    z = node_embed(lon, d=k, n_walks=4000, walk_length=40, window=5, seed=0)
    d = [np.linalg.norm(z[i] - z[j]) for i in range(k) for j in range(i + 1, k)]
    assert max(d) <= 1.1 * min(d)


def test_footprint_basics(sampled):
    f = wl_footprint(sampled)
    assert f.vector.shape == (128,)
    assert np.linalg.norm(f.vector) == pytest.approx(1.0, abs=1e-12)
    assert np.array_equal(f.vector, wl_footprint(sampled).vector)
    one = wl_footprint(make_lon([4]), D=16)
    assert np.linalg.norm(one.vector) == pytest.approx(1.0)
    assert np.array_equal(wl_footprint(make_lon([])).vector, np.zeros(128))


@given(st.integers(0, 2**32))
def test_footprint_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 25))
    fit = rng.integers(0, 10, k)
    pairs = [(a, b) for a in range(k) for b in range(k) if a != b and rng.random() < 0.2]
    src = np.array([a for a, _ in pairs], dtype=np.int64)
    dst = np.array([b for _, b in pairs], dtype=np.int64)
    perm = rng.permutation(k)
    inv = np.argsort(perm)
    base = wl_histogram(fit, src, dst)
    assert np.array_equal(base, wl_histogram(fit[perm], inv[src], inv[dst]))


def test_octiles():
    assert fitness_octiles(np.arange(8)).tolist() == list(range(8))
    assert fitness_octiles(np.arange(8), "max").tolist() == list(range(7, -1, -1))
    assert fitness_octiles([3, 3, 3]).tolist() == [0, 0, 0]


def test_projection_preserves_planar_geometry():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(20, 2))
    x -= x.mean(axis=0)
    y = project_2d(x)
    dx = np.linalg.norm(x[:, None] - x[None], axis=2)
    dy = np.linalg.norm(y[:, None] - y[None], axis=2)
    assert np.allclose(dx, dy, atol=1e-9)


@given(st.integers(0, 2**32), st.integers(2, 30), st.integers(1, 12))
def test_projection_centroid_at_origin(seed, m, d):
    x = np.random.default_rng(seed).normal(size=(m, d))
    y = project_2d(x)
    assert y.shape == (m, 2)
    assert np.allclose(y.mean(axis=0), 0.0, atol=1e-9)


def test_projection_duplicates_and_errors():
    x = np.array([[1.0, 2.0, 0.0], [3.0, 1.0, 1.0], [0.0, 0.0, 5.0]])
    y = project_2d(np.vstack([x, x]))
    assert np.allclose(y[:3], y[3:])
    with pytest.raises(ProjectionError):
        principal_axes(np.ones((1, 3)))
    assert np.allclose(instance_space([np.ones(4), np.ones(4)]), 0.0)


def test_scatter_svg():
    svg = scatter_svg(np.array([[0.0, 0.0], [1.0, 1.0]]), [1, 3], [5, 2])
    assert svg.startswith("<svg") and svg.count("<circle") == 2
