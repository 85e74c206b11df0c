"""Node embeddings, whole-graph footprints and planar projections."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from . import _rng
from ._rng import derive
from .exceptions import ProjectionError
from .lon import LON
from .metrics import undirected, adjacency
from .problems import Sense

DEFAULT_DIM = 32
DEFAULT_FOOTPRINT_DIM = 128
DEFAULT_WL_ITERATIONS = 3


# -- node embedding ------------------------------------------------------------


def random_walks(lon: LON, n_walks: int = 10, walk_length: int = 40, seed: int = 0) -> np.ndarray:
    """Weighted random walks, ``n_walks`` from every node, each ``walk_length`` nodes long.

    Rows are ordered by (start node id, walk index).  Each walk draws from a
    stream keyed by its start node's configuration, so walks do not depend on
    how ids were assigned.  At a node without out-edges the walk jumps to a
    uniformly chosen node.
    """
    n = lon.n_nodes
    counts = np.bincount(lon.src, minlength=n)
    indptr = np.concatenate([[0], np.cumsum(counts)])
    cumw = np.cumsum(lon.weight)
    base = np.where(indptr[:-1] > 0, cumw[np.maximum(indptr[:-1] - 1, 0)], 0)
    rowtot = np.bincount(lon.src, weights=lon.weight, minlength=n).astype(np.int64)

    node_keys = _rng.derive_array(derive(seed, "walks"), lon.configs.astype(np.uint64))
    keys = np.concatenate([_rng.derive_keys(node_keys, j)[:, None] for j in range(n_walks)], axis=1).ravel()
    starts = np.repeat(np.arange(n), n_walks)
    counters = np.zeros(keys.size, dtype=np.int64)
    walks = np.empty((keys.size, walk_length), dtype=np.int64)
    walks[:, 0] = starts
    cur = starts.copy()
    for t in range(1, walk_length):
        tot = rowtot[cur]
        sink = tot == 0
        draw = _rng.below_array(keys, counters, np.where(sink, n, tot))
        nxt = np.empty_like(cur)
        nxt[sink] = draw[sink]
        live = ~sink
        if live.any():
            pos = np.searchsorted(cumw, base[cur[live]] + draw[live], side="right")
            nxt[live] = lon.dst[pos]
        walks[:, t] = nxt
        cur = nxt
    return walks


def cooccurrence(walks: np.ndarray, n_nodes: int, window: int = 5) -> sparse.csr_matrix:
    """Symmetric counts of node pairs appearing within ``window`` steps of each other."""
    rows, cols = [], []
    length = walks.shape[1]
    for off in range(1, min(window, length - 1) + 1):
        a = walks[:, :-off].ravel()
        b = walks[:, off:].ravel()
        rows += [a, b]
        cols += [b, a]
    if not rows:
        return sparse.csr_matrix((n_nodes, n_nodes))
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    m = sparse.coo_matrix((np.ones(r.size), (r, c)), shape=(n_nodes, n_nodes)).tocsr()
    m.sum_duplicates()
    return m


def ppmi(counts: sparse.csr_matrix) -> sparse.csr_matrix:
    """Positive pointwise mutual information of a co-occurrence matrix."""
    total = counts.sum()
    if total == 0:
        return counts.copy()
    row = np.asarray(counts.sum(axis=1)).ravel()
    col = np.asarray(counts.sum(axis=0)).ravel()
    coo = counts.tocoo()
    pmi = np.log(coo.data * total / (row[coo.row] * col[coo.col]))
    keep = pmi > 0
    return sparse.csr_matrix((pmi[keep], (coo.row[keep], coo.col[keep])), shape=counts.shape)


def _orient_columns(m: np.ndarray) -> np.ndarray:
    """Flip columns so each one's largest-magnitude entry is positive."""
    if m.size == 0:
        return m
    idx = np.argmax(np.abs(m), axis=0)
    signs = np.sign(m[idx, np.arange(m.shape[1])])
    signs[signs == 0] = 1.0
    return m * signs


def truncated_svd_embedding(m: sparse.csr_matrix, d: int) -> np.ndarray:
    """Rank-``d`` factor ``U_d * sqrt(S_d)``, zero-padded when the rank is smaller."""
    n = m.shape[0]
    dense = m.toarray()
    u, s, _ = np.linalg.svd(dense, full_matrices=False)
    k = min(d, s.size)
    emb = np.zeros((n, d))
    emb[:, :k] = _orient_columns(u[:, :k] * np.sqrt(s[:k]))
    emb[np.abs(emb) < 1e-15] = 0.0
    return emb


def node_embed(
    lon: LON,
    d: int = DEFAULT_DIM,
    n_walks: int = 10,
    walk_length: int = 40,
    window: int = 5,
    seed: int = 0,
) -> np.ndarray:
    """Random walk -> windowed co-occurrence -> PPMI -> truncated SVD.

    Returns an ``N_node x d`` matrix in node id order; a single-node LON maps
    to the zero vector.
    """
    n = lon.n_nodes
    if n < 2:
        return np.zeros((n, d))
    walks = random_walks(lon, n_walks, walk_length, seed)
    return truncated_svd_embedding(ppmi(cooccurrence(walks, n, window)), d)


# -- planar projection ---------------------------------------------------------


@dataclass
class PrincipalAxes:
    mean: np.ndarray
    components: np.ndarray = field(repr=False)
    explained_variance: np.ndarray = field(repr=False)


def principal_axes(x: np.ndarray, n_components: int = 2) -> PrincipalAxes:
    """Top principal directions, each oriented so its largest-magnitude loading is positive."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ProjectionError("projection needs a 2-D array with at least 2 rows")
    mean = x.mean(axis=0)
    xc = x - mean
    _, s, vt = np.linalg.svd(xc, full_matrices=False)
    comps = np.zeros((n_components, x.shape[1]))
    var = np.zeros(n_components)
    k = min(n_components, vt.shape[0])
    comps[:k] = _orient_columns(vt[:k].T).T
    var[:k] = s[:k] ** 2 / (x.shape[0] - 1)
    return PrincipalAxes(mean, comps, var)


def project_2d(x: np.ndarray) -> np.ndarray:
    """Centre rows and project onto the top two principal directions."""
    axes = principal_axes(x, 2)
    return (np.asarray(x, dtype=np.float64) - axes.mean) @ axes.components.T


# -- whole-graph footprint -----------------------------------------------------


def fitness_octiles(fitness, sense: Sense = Sense.MIN) -> np.ndarray:
    """Octile bin (0 = best) of each fitness within its own LON; ties go to the lower bin."""
    f = np.asarray(fitness, dtype=np.float64)
    if f.size == 0:
        return np.zeros(0, dtype=np.int64)
    bad = f if Sense(sense) is Sense.MIN else -f
    cuts = np.quantile(bad, np.arange(1, 8) / 8.0)
    return np.searchsorted(cuts, bad, side="left").astype(np.int64)


def wl_histogram(
    fitness,
    src,
    dst,
    sense: Sense = Sense.MIN,
    iterations: int = DEFAULT_WL_ITERATIONS,
    dim: int = DEFAULT_FOOTPRINT_DIM,
) -> np.ndarray:
    """Hashed Weisfeiler-Lehman label histogram of a graph, L2-normalised.

    Only fitness values and the undirected edge set enter, so any relabelling
    of node ids gives the same vector.
    """
    fitness = np.asarray(fitness)
    n = fitness.size
    out = np.zeros(dim)
    if n == 0:
        return out
    u = undirected(adjacency(n, src, dst))
    nbrs = [u.indices[u.indptr[i] : u.indptr[i + 1]] for i in range(n)]
    labels = [str(b) for b in fitness_octiles(fitness, sense)]
    occurrences = [f"0:{lab}" for lab in labels]
    for t in range(1, iterations + 1):
        sigs = [labels[i] + "(" + ",".join(sorted(labels[j] for j in nbrs[i])) + ")" for i in range(n)]
        labels = [format(int(h), "016x") for h in _rng.fnv1a64_many(sigs)]
        occurrences += [f"{t}:{lab}" for lab in labels]
    buckets = (_rng.fnv1a64_many(occurrences) % np.uint64(dim)).astype(np.int64)
    out = np.bincount(buckets, minlength=dim).astype(np.float64)
    return out / np.linalg.norm(out)


@dataclass(frozen=True)
class Footprint:
    vector: np.ndarray = field(repr=False)
    lon_id: str | None
    iterations: int
    dim: int


def wl_footprint(lon: LON, iterations: int = DEFAULT_WL_ITERATIONS, D: int = DEFAULT_FOOTPRINT_DIM) -> Footprint:
    vec = wl_histogram(lon.fitness, lon.src, lon.dst, lon.sense, iterations, D)
    return Footprint(vec, lon.instance_id, iterations, D)


def instance_space(footprints) -> np.ndarray:
    """Planar coordinates of stacked footprints."""
    mat = np.vstack([f.vector if isinstance(f, Footprint) else np.asarray(f) for f in footprints])
    return project_2d(mat)


# -- export --------------------------------------------------------------------


def scatter_svg(coords: np.ndarray, degree, fitness, sense: Sense = Sense.MIN, size: int = 480) -> str:
    """Minimal SVG scatter: radius grows with ``log(1 + degree)``, darker fill is fitter."""
    coords = np.asarray(coords, dtype=np.float64)
    degree = np.asarray(degree, dtype=np.float64)
    fitness = np.asarray(fitness, dtype=np.float64)
    pad = 16.0
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">']
    lines.append(f'<rect width="{size}" height="{size}" fill="white"/>')
    if coords.shape[0]:
        lo = coords.min(axis=0)
        span = coords.max(axis=0) - lo
        span[span == 0] = 1.0
        xy = pad + (coords - lo) / span * (size - 2 * pad)
        key = fitness if Sense(sense) is Sense.MIN else -fitness
        order = np.argsort(np.argsort(key, kind="stable"), kind="stable")
        shade = order / max(len(order) - 1, 1)
        for (x, y), deg, s in zip(xy, degree, shade):
            r = 1.5 + 2.0 * math.log1p(deg)
            g = int(round(40 + 200 * s))
            lines.append(f'<circle cx="{x:.2f}" cy="{size - y:.2f}" r="{r:.2f}" fill="rgb({g},{g},{g})" fill-opacity="0.8"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
