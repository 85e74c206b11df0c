"""Node-level and graph-level LON features.

Conventions
-----------
* Directed metrics (betweenness, closeness, PageRank, path lengths) use the
  simple directed graph; edge weights are ignored.
* Undirected metrics (eigenvector centrality, clustering, degree
  assortativity, CDD, RCC) use the undirected simple projection.
* Shortest paths are computed by level-synchronous breadth-first search over
  blocks of sources with sparse matrix products.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd
from scipy import sparse
from scipy.stats import rankdata

from .exceptions import EmptyGraphError, UndefinedCorrelationError
from .lon import LON, CMLON, find_sinks, global_optima

NODE_FEATURES = (
    "deg",
    "deg_in",
    "deg_out",
    "c_betw",
    "c_ev",
    "c_close",
    "c_pg",
    "cc",
    "avg_deg",
    "avg_fit",
    "l_min",
    "l_avg",
    "b_size",
    "n_climb",
    "n_pert",
    "freq",
)

GRAPH_FEATURES = (
    "N_node",
    "N_edge",
    "dens",
    "cc_avg",
    "ast_deg",
    "ast_fit",
    "L_avg",
    "L_min",
    "B_size",
    "N_climb",
    "N_pert",
    "N_funnel",
)

EV_TOL = 1e-10
EV_MAX_ITER = 1000
PR_DAMPING = 0.85
PR_TOL = 1e-12
PR_MAX_ITER = 10000


# -- graph primitives ----------------------------------------------------------


def adjacency(n_nodes: int, src, dst) -> sparse.csr_matrix:
    """Directed 0/1 adjacency, ``A[u, v] = 1`` for each edge ``u -> v``."""
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    a = sparse.csr_matrix((np.ones(src.size), (src, dst)), shape=(n_nodes, n_nodes))
    a.data[:] = 1.0
    return a


def undirected(a: sparse.csr_matrix) -> sparse.csr_matrix:
    u = (a + a.T).tocsr()
    u.setdiag(0)
    u.eliminate_zeros()
    u.data[:] = 1.0
    return u


def _bfs_block(a: sparse.csr_matrix, sources: np.ndarray, want_sigma: bool):
    """Distances (and shortest-path counts) from each source in ``sources``.

    Returns ``dist`` with ``inf`` for unreachable nodes, and ``sigma`` (number of
    shortest paths) when requested.
    """
    n = a.shape[0]
    b = sources.size
    rows = np.arange(b)
    dist = np.full((b, n), np.inf)
    dist[rows, sources] = 0.0
    sigma = np.zeros((b, n)) if want_sigma else None
    frontier = np.zeros((b, n))
    frontier[rows, sources] = 1.0
    if want_sigma:
        sigma[rows, sources] = 1.0
    level = 0
    at = a.T.tocsr()
    while True:
        level += 1
        reach = (at @ frontier.T).T
        new = (reach > 0) & np.isinf(dist)
        if not new.any():
            break
        dist[new] = level
        if want_sigma:
            sigma[new] = reach[new]
        frontier = np.where(new, reach if want_sigma else 1.0, 0.0)
    return dist, sigma


def _blocks(n: int, size: int = 256):
    for start in range(0, n, size):
        yield np.arange(start, min(start + size, n))


def distance_matrix(a: sparse.csr_matrix) -> np.ndarray:
    """All-pairs hop distances ``D[s, t]`` (``inf`` when unreachable)."""
    n = a.shape[0]
    out = np.empty((n, n))
    for blk in _blocks(n):
        out[blk] = _bfs_block(a, blk, False)[0]
    return out


def betweenness(a: sparse.csr_matrix, normalized: bool = True) -> np.ndarray:
    """Directed betweenness (Brandes accumulation, vectorised over source blocks)."""
    n = a.shape[0]
    bc = np.zeros(n)
    for blk in _blocks(n):
        dist, sigma = _bfs_block(a, blk, True)
        delta = np.zeros_like(sigma)
        finite = np.isfinite(dist)
        maxd = int(dist[finite].max()) if finite.any() else 0
        for d in range(maxd - 1, -1, -1):
            nxt = dist == d + 1
            coeff = np.where(nxt, (1.0 + delta) / np.where(nxt, sigma, 1.0), 0.0)
            # sum over successors w of v of coeff[s, w]
            acc = (a @ coeff.T).T
            cur = dist == d
            delta = np.where(cur, delta + sigma * acc, delta)
        delta[np.arange(blk.size), blk] = 0.0
        bc += delta.sum(axis=0)
    if normalized:
        bc = bc / ((n - 1) * (n - 2)) if n > 2 else np.zeros(n)
    return bc


def harmonic_closeness(dist: np.ndarray) -> np.ndarray:
    """Normalised harmonic closeness over incoming paths: ``sum_v 1/d(v, u) / (N-1)``."""
    n = dist.shape[0]
    if n < 2:
        return np.zeros(n)
    with np.errstate(divide="ignore"):
        inv = np.where(np.isfinite(dist) & (dist > 0), 1.0 / dist, 0.0)
    return inv.sum(axis=0) / (n - 1)


def _components(u: sparse.csr_matrix) -> np.ndarray:
    from scipy.sparse.csgraph import connected_components

    return connected_components(u, directed=False)[1]


def eigenvector_centrality(u: sparse.csr_matrix, tol: float = EV_TOL, max_iter: int = EV_MAX_ITER) -> np.ndarray:
    """Principal eigenvector of the largest undirected component, zero elsewhere.

    Power iteration on ``A + I`` (same eigenvectors, no oscillation on
    bipartite graphs), started from the all-ones vector and L2-normalised.
    Ties between equally large components go to the one holding the smallest
    node id.
    """
    n = u.shape[0]
    out = np.zeros(n)
    if n == 0:
        return out
    labels = _components(u)
    sizes = np.bincount(labels)
    big = np.flatnonzero(sizes == sizes.max())
    first = {lab: np.flatnonzero(labels == lab)[0] for lab in big}
    comp = min(big, key=lambda lab: first[lab])
    members = np.flatnonzero(labels == comp)
    sub = u[members][:, members]
    x = np.ones(members.size) / math.sqrt(members.size)
    for _ in range(max_iter):
        y = sub @ x + x
        y /= np.linalg.norm(y)
        if np.abs(y - x).max() < tol:
            x = y
            break
        x = y
    out[members] = x
    return out


def pagerank(a: sparse.csr_matrix, damping: float = PR_DAMPING, tol: float = PR_TOL, max_iter: int = PR_MAX_ITER) -> np.ndarray:
    """PageRank with uniform teleport; dangling mass is spread uniformly."""
    n = a.shape[0]
    if n == 0:
        return np.zeros(0)
    outdeg = np.asarray(a.sum(axis=1)).ravel()
    dangling = outdeg == 0
    inv = np.where(dangling, 0.0, 1.0 / np.where(dangling, 1.0, outdeg))
    pt = (sparse.diags(inv) @ a).T.tocsr()
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        y = damping * (pt @ x + x[dangling].sum() / n) + (1.0 - damping) / n
        if np.abs(y - x).sum() < tol:
            x = y
            break
        x = y
    return x / x.sum()


def clustering(u: sparse.csr_matrix) -> np.ndarray:
    """Local clustering coefficient on the undirected projection (0 below degree 2)."""
    deg = np.asarray(u.sum(axis=1)).ravel()
    tri = np.asarray((u @ u).multiply(u).sum(axis=1)).ravel() / 2.0
    denom = deg * (deg - 1) / 2.0
    return np.where(denom > 0, tri / np.where(denom > 0, denom, 1.0), 0.0)


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size != y.size:
        raise ValueError("length mismatch")
    if x.size < 2:
        raise UndefinedCorrelationError("need at least two observations")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelationError("constant input")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def spearman(x, y) -> float:
    """Spearman rank correlation: Pearson correlation of mean-tied ranks."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise UndefinedCorrelationError("need at least two observations")
    return pearson(rankdata(x), rankdata(y))


def _try(fn, *args) -> float:
    try:
        return fn(*args)
    except UndefinedCorrelationError:
        return math.nan


def degree_assortativity(u: sparse.csr_matrix) -> float:
    """Pearson correlation of endpoint degrees over both orientations of each undirected edge."""
    deg = np.asarray(u.sum(axis=1)).ravel()
    coo = u.tocoo()
    return _try(pearson, deg[coo.row], deg[coo.col])


def fitness_assortativity(lon: LON) -> float:
    return _try(pearson, lon.fitness[lon.src], lon.fitness[lon.dst])


# -- feature tables ------------------------------------------------------------


def _path_lengths(dist: np.ndarray, go: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Min and mean hop count from each node to the global optima it can reach."""
    to_go = dist[:, go]
    reach = np.isfinite(to_go)
    any_reach = reach.any(axis=1)
    l_min = np.where(any_reach, np.where(reach, to_go, np.inf).min(axis=1), np.nan)
    cnt = reach.sum(axis=1)
    tot = np.where(reach, to_go, 0.0).sum(axis=1)
    l_avg = np.where(any_reach, tot / np.maximum(cnt, 1), np.nan)
    return l_min, l_avg


def node_features(lon: LON) -> pd.DataFrame:
    """One row per node id with every low-level feature; absent values are NaN."""
    n = lon.n_nodes
    if n == 0:
        raise EmptyGraphError("LON has no nodes")
    a = adjacency(n, lon.src, lon.dst)
    u = undirected(a)
    deg_in = lon.in_degree()
    deg_out = lon.out_degree()
    deg = deg_in + deg_out
    dist = distance_matrix(a)
    go, _ = global_optima(lon)
    l_min, l_avg = _path_lengths(dist, go)

    avg_deg = np.full(n, np.nan)
    avg_fit = np.full(n, np.nan)
    at = a.T.tocsr()
    for i in range(n):
        nb = a.indices[a.indptr[i] : a.indptr[i + 1]]
        if nb.size == 0:
            nb = at.indices[at.indptr[i] : at.indptr[i + 1]]
        if nb.size:
            avg_deg[i] = deg[nb].mean()
            avg_fit[i] = lon.fitness[nb].mean()

    return pd.DataFrame(
        {
            "id": np.arange(n),
            "config": [lon.config_str(i) for i in range(n)],
            "fitness": lon.fitness,
            "deg": deg,
            "deg_in": deg_in,
            "deg_out": deg_out,
            "c_betw": betweenness(a),
            "c_ev": eigenvector_centrality(u),
            "c_close": harmonic_closeness(dist),
            "c_pg": pagerank(a),
            "cc": clustering(u),
            "avg_deg": avg_deg,
            "avg_fit": avg_fit,
            "l_min": l_min,
            "l_avg": l_avg,
            "b_size": lon.b_size,
            "n_climb": lon.n_climb,
            "n_pert": lon.n_pert,
            "freq": lon.freq,
        }
    )


@dataclass(frozen=True)
class GraphFeatures:
    N_node: int
    N_edge: int
    dens: float
    cc_avg: float
    ast_deg: float
    ast_fit: float
    L_avg: float
    L_min: float
    B_size: float
    N_climb: float
    N_pert: float
    N_funnel: int

    def to_dict(self) -> dict:
        return asdict(self)

    def as_array(self) -> np.ndarray:
        return np.array([float(v) for v in asdict(self).values()])


def _nanmean(x) -> float:
    x = np.asarray(x, dtype=np.float64)
    x = x[~np.isnan(x)]
    return float(x.mean()) if x.size else math.nan


def graph_features(lon: LON, cmlon: LON | None = None, table: pd.DataFrame | None = None) -> GraphFeatures:
    """Graph-level scalars; ``N_funnel`` comes from the sinks of ``cmlon``.

    A precomputed :func:`node_features` table may be passed to avoid recomputation.
    """
    n = lon.n_nodes
    if cmlon is not None and cmlon.variant != CMLON:
        raise ValueError(f"cmlon must be a CMLON, got {cmlon.variant}")
    if n == 0:
        return GraphFeatures(0, 0, *(math.nan,) * 9, 0 if cmlon is None else int(find_sinks(cmlon).size))
    a = adjacency(n, lon.src, lon.dst)
    u = undirected(a)
    if table is None:
        table = node_features(lon)
    dens = lon.n_edges / (n * (n - 1)) if n >= 2 else math.nan
    return GraphFeatures(
        N_node=n,
        N_edge=lon.n_edges,
        dens=dens,
        cc_avg=float(clustering(u).mean()),
        ast_deg=degree_assortativity(u),
        ast_fit=fitness_assortativity(lon),
        L_avg=_nanmean(table["l_avg"]),
        L_min=_nanmean(table["l_min"]),
        B_size=_nanmean(lon.b_size),
        N_climb=_nanmean(lon.n_climb),
        N_pert=_nanmean(lon.n_pert),
        N_funnel=int(find_sinks(cmlon).size) if cmlon is not None else -1,
    )


# -- trajectories --------------------------------------------------------------


def undirected_degrees(lon: LON) -> np.ndarray:
    u = undirected(adjacency(lon.n_nodes, lon.src, lon.dst))
    return np.asarray(u.sum(axis=1)).ravel().astype(np.int64)


def cdd(lon: LON) -> list[tuple[int, float]]:
    """Cumulative degree distribution ``P(deg >= k)`` for ``k = 1..max degree``."""
    if lon.n_nodes == 0:
        raise EmptyGraphError("LON has no nodes")
    deg = undirected_degrees(lon)
    kmax = int(deg.max())
    return [(k, float((deg >= k).sum()) / deg.size) for k in range(1, kmax + 1)]


def rcc(lon: LON) -> list[tuple[int, float]]:
    """Rich-club coefficient for ``k = 1..max degree``, skipping ``k`` with fewer than two rich nodes."""
    if lon.n_nodes == 0:
        raise EmptyGraphError("LON has no nodes")
    u = undirected(adjacency(lon.n_nodes, lon.src, lon.dst))
    deg = np.asarray(u.sum(axis=1)).ravel()
    coo = sparse.triu(u, k=1).tocoo()
    lo_end = np.minimum(deg[coo.row], deg[coo.col])
    out = []
    for k in range(1, int(deg.max()) + 1 if deg.size else 1):
        nk = int((deg > k).sum())
        if nk < 2:
            continue
        ek = int((lo_end > k).sum())
        out.append((k, 2.0 * ek / (nk * (nk - 1))))
    return out


# -- correlation analyses ------------------------------------------------------


def feature_fitness_correlations(table: pd.DataFrame, features=NODE_FEATURES) -> dict[str, float]:
    """Spearman correlation of each feature column with fitness, pairwise-complete."""
    out = {}
    fit = table["fitness"].to_numpy(dtype=np.float64)
    for name in features:
        col = table[name].to_numpy(dtype=np.float64)
        ok = ~np.isnan(col)
        if ok.sum() < 3:
            out[name] = math.nan
            continue
        out[name] = _try(spearman, col[ok], fit[ok])
    return out


def feature_trajectories(frame: pd.DataFrame, features=GRAPH_FEATURES) -> pd.DataFrame:
    """Mean and population sd of each graph feature per ``(kind, n)`` group, long format."""
    rows = []
    for (kind, n), grp in frame.groupby(["kind", "n"], sort=True):
        for name in features:
            vals = grp[name].to_numpy(dtype=np.float64)
            vals = vals[~np.isnan(vals)]
            mean = float(vals.mean()) if vals.size else math.nan
            sd = float(vals.std(ddof=0)) if vals.size else math.nan
            rows.append({"group": kind, "feature": name, "n": int(n), "mean": mean, "sd": sd})
    return pd.DataFrame(rows, columns=["group", "feature", "n", "mean", "sd"])
