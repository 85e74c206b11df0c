"""Local optima network data model and transformations."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import LonParseError, MixingError, SequencingError
from .problems import BitString, Sense

RAW, MONOTONIC, CMLON = "RAW", "MONOTONIC", "CMLON"
VARIANTS = (RAW, MONOTONIC, CMLON)


def _float_array(values, size) -> np.ndarray:
    if values is None:
        return np.full(size, np.nan)
    return np.asarray(values, dtype=np.float64).reshape(size)


@dataclass(frozen=True, eq=False)
class LON:
    """Directed weighted graph of local optima.

    Node ``i`` has configuration ``configs[i]`` (integer encoding, see
    :class:`lonsim.problems.BitString`).  Nodes are always sorted by
    configuration, so node ids are canonical.  Absent float attributes are NaN.
    Use :meth:`build` to construct from unsorted data.
    """

    n: int
    configs: np.ndarray
    fitness: np.ndarray
    freq: np.ndarray
    n_climb: np.ndarray
    n_pert: np.ndarray
    b_size: np.ndarray
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    metadata: dict = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        n: int,
        configs,
        fitness,
        freq=None,
        n_climb=None,
        n_pert=None,
        b_size=None,
        src=(),
        dst=(),
        weight=None,
        metadata: dict | None = None,
    ) -> "LON":
        """Canonicalise node order and edge order, then validate.

        Edge endpoints refer to positions in the *input* node arrays.
        Duplicate edges are rejected rather than merged.
        """
        configs = np.asarray(configs, dtype=np.int64).reshape(-1)
        size = configs.size
        order = np.argsort(configs, kind="stable")
        inv = np.empty(size, dtype=np.int64)
        inv[order] = np.arange(size)
        src = np.asarray(src, dtype=np.int64).reshape(-1)
        dst = np.asarray(dst, dtype=np.int64).reshape(-1)
        weight = np.ones(src.size, dtype=np.int64) if weight is None else np.asarray(weight, dtype=np.int64).reshape(-1)
        if src.size != dst.size or src.size != weight.size:
            raise ValueError("edge arrays differ in length")
        if src.size and (src.min() < 0 or dst.min() < 0 or max(src.max(), dst.max()) >= size):
            raise ValueError("edge endpoint refers to a missing node")
        src, dst = inv[src], inv[dst]
        eorder = np.lexsort((dst, src))
        freq = np.zeros(size, dtype=np.int64) if freq is None else np.asarray(freq, dtype=np.int64).reshape(size)
        lon = cls(
            n=int(n),
            configs=configs[order],
            fitness=np.asarray(fitness, dtype=np.int64).reshape(size)[order],
            freq=freq[order],
            n_climb=_float_array(n_climb, size)[order],
            n_pert=_float_array(n_pert, size)[order],
            b_size=_float_array(b_size, size)[order],
            src=src[eorder],
            dst=dst[eorder],
            weight=weight[eorder],
            metadata={**(metadata or {}), "n": int(n)},
        )
        lon.validate()
        return lon

    def validate(self) -> None:
        if self.configs.size and np.any(np.diff(self.configs) <= 0):
            raise ValueError("node configurations must be unique and sorted")
        if np.any(self.src == self.dst):
            raise ValueError("self-loops are not allowed")
        if np.any(self.weight < 1):
            raise ValueError("edge weights must be >= 1")
        if self.src.size > 1:
            key = self.src * max(self.n_nodes, 1) + self.dst
            if np.any(np.diff(key) <= 0):
                raise ValueError("duplicate edges")
        if self.variant in (MONOTONIC, CMLON) and self.src.size:
            ok = _not_worse(self.fitness[self.dst], self.fitness[self.src], self.sense)
            if not ok.all():
                raise ValueError(f"{self.variant} LON contains a deteriorating edge")

    # -- convenience -----------------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return int(self.configs.size)

    @property
    def n_edges(self) -> int:
        return int(self.src.size)

    @property
    def sense(self) -> Sense:
        return Sense(self.metadata.get("sense", "min"))

    @property
    def variant(self) -> str:
        return self.metadata.get("variant", RAW)

    @property
    def instance_id(self):
        return self.metadata.get("instance_id")

    def config_str(self, i: int) -> str:
        return str(BitString(int(self.configs[i]), self.n))

    def index_of(self, config) -> int:
        """Node id of a configuration given as int, text or :class:`BitString`."""
        if isinstance(config, str):
            config = int(config, 2)
        elif isinstance(config, BitString):
            config = config.value
        i = int(np.searchsorted(self.configs, config))
        if i >= self.n_nodes or self.configs[i] != config:
            raise KeyError(config)
        return i

    def out_degree(self) -> np.ndarray:
        return np.bincount(self.src, minlength=self.n_nodes)

    def in_degree(self) -> np.ndarray:
        return np.bincount(self.dst, minlength=self.n_nodes)

    def replace(self, **changes) -> "LON":
        fields = {k: getattr(self, k) for k in self.__dataclass_fields__}
        fields.update(changes)
        if "metadata" in changes:
            fields["metadata"] = dict(changes["metadata"])
        lon = LON(**fields)
        lon.validate()
        return lon

    def with_metadata(self, **items) -> "LON":
        return self.replace(metadata={**self.metadata, **items})

    def with_basins(self, b_size) -> "LON":
        return self.replace(b_size=_float_array(b_size, self.n_nodes))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LON):
            return NotImplemented
        ints = ("configs", "fitness", "freq", "src", "dst", "weight")
        floats = ("n_climb", "n_pert", "b_size")
        return (
            self.n == other.n
            and all(np.array_equal(getattr(self, a), getattr(other, a)) for a in ints)
            and all(np.array_equal(getattr(self, a), getattr(other, a), equal_nan=True) for a in floats)
            and _jsonable(self.metadata) == _jsonable(other.metadata)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"LON({self.instance_id!r}, variant={self.variant}, nodes={self.n_nodes}, edges={self.n_edges})"


def _not_worse(a, b, sense: Sense):
    return a <= b if sense is Sense.MIN else a >= b


def _jsonable(obj):
    return json.loads(json.dumps(obj, sort_keys=True))


# -- construction from ILS records -------------------------------------------


def lon_from_records(
    n: int,
    arrive_cfg,
    arrive_fit,
    arrive_steps,
    depart_cfg,
    depart_pert,
    edge_src,
    edge_dst,
    metadata: dict,
) -> LON:
    """Aggregate raw arrival / departure / transition records into a LON.

    Every sum is taken over integers before dividing, so the result does not
    depend on record order.
    """
    arrive_cfg = np.asarray(arrive_cfg, dtype=np.int64)
    arrive_fit = np.asarray(arrive_fit, dtype=np.int64)
    configs, first, inv = np.unique(arrive_cfg, return_index=True, return_inverse=True)
    size = configs.size
    freq = np.bincount(inv, minlength=size)
    climb = np.bincount(inv, weights=np.asarray(arrive_steps, dtype=np.int64), minlength=size)
    fitness = arrive_fit[first]

    depart_cfg = np.asarray(depart_cfg, dtype=np.int64)
    dep_idx = np.searchsorted(configs, depart_cfg)
    if depart_cfg.size and (dep_idx.max() >= size or np.any(configs[dep_idx] != depart_cfg)):
        raise ValueError("departure from an optimum that was never visited")
    n_dep = np.bincount(dep_idx, minlength=size)
    pert = np.bincount(dep_idx, weights=np.asarray(depart_pert, dtype=np.int64), minlength=size)
    with np.errstate(invalid="ignore", divide="ignore"):
        n_pert = np.where(n_dep > 0, pert / np.maximum(n_dep, 1), np.nan)
    n_climb = climb / freq

    s = np.searchsorted(configs, np.asarray(edge_src, dtype=np.int64))
    d = np.searchsorted(configs, np.asarray(edge_dst, dtype=np.int64))
    if s.size:
        pair = s * size + d
        upair, counts = np.unique(pair, return_counts=True)
        s, d, w = upair // size, upair % size, counts
    else:
        w = np.zeros(0, dtype=np.int64)
    return LON.build(n, configs, fitness, freq, n_climb, n_pert, None, s, d, w, metadata)


def merge_traces(traces, instance, metadata: dict | None = None) -> LON:
    """Merge ILS run traces of one instance into a single RAW LON."""
    traces = list(traces)
    for t in traces:
        if t.instance_id != instance.id:
            raise MixingError(f"trace of {t.instance_id!r} cannot be merged into {instance.id!r}")
    arr = [(v.value, f, s) for t in traces for (v, f, s) in t.visited]
    dep = [(c.value, p) for t in traces for (c, p) in t.escape_effort]
    edges = [(u.value, v.value) for t in traces for (u, v), c in t.transitions.items() for _ in range(c)]
    meta = {
        "instance_id": instance.id,
        "kind": instance.kind.value,
        "n": instance.n,
        "sense": instance.sense.value,
        "variant": RAW,
    }
    meta.update(metadata or {})
    cols = lambda rows, k: [r[k] for r in rows]  # noqa: E731
    return lon_from_records(
        instance.n,
        cols(arr, 0),
        cols(arr, 1),
        cols(arr, 2),
        cols(dep, 0),
        cols(dep, 1),
        cols(edges, 0),
        cols(edges, 1),
        meta,
    )


# -- transformations -----------------------------------------------------------


def monotonic_filter(lon: LON) -> LON:
    """Drop edges whose destination is strictly worse than their source."""
    if lon.variant not in (RAW, MONOTONIC):
        raise SequencingError(f"monotonic_filter expects a RAW or MONOTONIC LON, got {lon.variant}")
    keep = _not_worse(lon.fitness[lon.dst], lon.fitness[lon.src], lon.sense)
    return lon.replace(
        src=lon.src[keep],
        dst=lon.dst[keep],
        weight=lon.weight[keep],
        metadata={**lon.metadata, "variant": MONOTONIC},
    )


def _find(parent, i):
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        parent[i], i = root, parent[i]
    return root


def plateau_groups(lon: LON) -> list[list[int]]:
    """Maximal sets of equal-fitness nodes joined by equal-fitness edges (direction ignored)."""
    parent = list(range(lon.n_nodes))
    eq = lon.fitness[lon.src] == lon.fitness[lon.dst]
    for u, v in zip(lon.src[eq].tolist(), lon.dst[eq].tolist()):
        ru, rv = _find(parent, u), _find(parent, v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    groups: dict[int, list[int]] = {}
    for i in range(lon.n_nodes):
        groups.setdefault(_find(parent, i), []).append(i)
    return [groups[r] for r in sorted(groups)]


def _weighted_mean(values: np.ndarray, weights: np.ndarray) -> float:
    ok = ~np.isnan(values)
    if not ok.any():
        return math.nan
    w = weights[ok].astype(np.float64)
    if w.sum() == 0:
        return float(values[ok].mean())
    return float(np.dot(values[ok], w) / w.sum())


def compress_plateaus(lon: LON) -> LON:
    """Contract plateaus of a MONOTONIC LON into their minimum-id member."""
    if lon.variant != MONOTONIC:
        raise SequencingError(f"compress_plateaus expects a MONOTONIC LON, got {lon.variant}")
    groups = plateau_groups(lon)
    rep_of = np.empty(lon.n_nodes, dtype=np.int64)
    for g, members in enumerate(groups):
        rep_of[members] = g
    size = len(groups)
    reps = np.array([m[0] for m in groups], dtype=np.int64)
    freq = np.bincount(rep_of, weights=lon.freq, minlength=size).astype(np.int64)
    b_size = np.full(size, np.nan)
    n_climb = np.full(size, np.nan)
    n_pert = np.full(size, np.nan)
    for g, members in enumerate(groups):
        m = np.asarray(members)
        bs = lon.b_size[m]
        if not np.isnan(bs).all():
            b_size[g] = float(np.nansum(bs))
        n_climb[g] = _weighted_mean(lon.n_climb[m], lon.freq[m])
        n_pert[g] = _weighted_mean(lon.n_pert[m], lon.freq[m])

    s, d = rep_of[lon.src], rep_of[lon.dst]
    keep = s != d
    s, d, w = s[keep], d[keep], lon.weight[keep]
    if s.size:
        pair = s * size + d
        upair, inv = np.unique(pair, return_inverse=True)
        w = np.bincount(inv, weights=w).astype(np.int64)
        s, d = upair // size, upair % size
    return LON.build(
        lon.n,
        lon.configs[reps],
        lon.fitness[reps],
        freq,
        n_climb,
        n_pert,
        b_size,
        s,
        d,
        w,
        {**lon.metadata, "variant": CMLON},
    )


def find_sinks(cmlon: LON) -> np.ndarray:
    """Node ids without outgoing edges; their count is the funnel count."""
    if cmlon.variant != CMLON:
        raise SequencingError(f"find_sinks expects a CMLON, got {cmlon.variant}")
    return np.flatnonzero(cmlon.out_degree() == 0)


def global_optima(lon: LON, verified_best: int | None = None) -> tuple[np.ndarray, bool]:
    """Nodes attaining the best sampled fitness, and whether that matches ``verified_best``."""
    if lon.n_nodes == 0:
        return np.zeros(0, dtype=np.int64), False
    best = lon.fitness.min() if lon.sense is Sense.MIN else lon.fitness.max()
    ids = np.flatnonzero(lon.fitness == best)
    verified = verified_best is not None and int(verified_best) == int(best)
    return ids, verified


# -- serialisation -------------------------------------------------------------


def _num(x: float):
    return None if math.isnan(x) else float(x)


def lon_to_dict(lon: LON) -> dict:
    nodes = [
        {
            "id": i,
            "config": lon.config_str(i),
            "fitness": int(lon.fitness[i]),
            "freq": int(lon.freq[i]),
            "n_climb": _num(lon.n_climb[i]),
            "n_pert": _num(lon.n_pert[i]),
            "b_size": _num(lon.b_size[i]),
        }
        for i in range(lon.n_nodes)
    ]
    edges = [
        {"src": int(s), "dst": int(d), "weight": int(w)}
        for s, d, w in zip(lon.src.tolist(), lon.dst.tolist(), lon.weight.tolist())
    ]
    return {"metadata": lon.metadata, "nodes": nodes, "edges": edges}


def save_lon(lon: LON, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(lon_to_dict(lon), sort_keys=True, separators=(",", ":")) + "\n")


def _nan_or(v, where):
    if v is None:
        return math.nan
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise LonParseError(f"{where}: expected a number or null, got {v!r}")
    return float(v)


def lon_from_dict(d: dict, source: str = "<dict>") -> LON:
    try:
        meta = dict(d["metadata"])
        nodes, edges = d["nodes"], d["edges"]
    except (KeyError, TypeError) as exc:
        raise LonParseError(f"{source}: missing top-level key {exc}") from None
    n = meta.get("n")
    if not isinstance(n, int):
        if not nodes:
            n = 0
        else:
            raise LonParseError(f"{source}: metadata.n must be an integer")
    cfg, fit, freq, climb, pert, bsize = [], [], [], [], [], []
    for pos, node in enumerate(nodes):
        where = f"{source}: nodes[{pos}]"
        try:
            if node["id"] != pos:
                raise LonParseError(f"{where}: id {node['id']} out of order")
            text = node["config"]
            if len(text) != n or set(text) - {"0", "1"}:
                raise LonParseError(f"{where}: bad config {text!r}")
            cfg.append(int(text, 2))
            fit.append(int(node["fitness"]))
            freq.append(int(node["freq"]))
            climb.append(_nan_or(node.get("n_climb"), where + ".n_climb"))
            pert.append(_nan_or(node.get("n_pert"), where + ".n_pert"))
            bsize.append(_nan_or(node.get("b_size"), where + ".b_size"))
        except KeyError as exc:
            raise LonParseError(f"{where}: missing field {exc}") from None
    src, dst, w = [], [], []
    for pos, e in enumerate(edges):
        where = f"{source}: edges[{pos}]"
        try:
            s, t, wt = int(e["src"]), int(e["dst"]), int(e["weight"])
        except KeyError as exc:
            raise LonParseError(f"{where}: missing field {exc}") from None
        if not (0 <= s < len(cfg) and 0 <= t < len(cfg)):
            raise LonParseError(f"{where}: endpoint refers to a missing node")
        src.append(s)
        dst.append(t)
        w.append(wt)
    try:
        lon = LON.build(n, cfg, fit, freq, climb, pert, bsize, src, dst, w, meta)
    except ValueError as exc:
        raise LonParseError(f"{source}: {exc}") from None
    if not np.array_equal(lon.configs, np.asarray(cfg, dtype=np.int64)):
        raise LonParseError(f"{source}: nodes are not sorted by configuration")
    return lon


def load_lon(path) -> LON:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise LonParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return lon_from_dict(data, str(path))


def export_csv(lon: LON, directory) -> tuple[Path, Path]:
    """Write ``nodes.csv`` and ``edges.csv`` with the JSON ordering."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    d = lon_to_dict(lon)
    nodes_path, edges_path = directory / "nodes.csv", directory / "edges.csv"
    cols = ["id", "config", "fitness", "freq", "n_climb", "n_pert", "b_size"]
    with nodes_path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for node in d["nodes"]:
            w.writerow(["" if node[c] is None else node[c] for c in cols])
    with edges_path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["src", "dst", "weight"])
        for e in d["edges"]:
            w.writerow([e["src"], e["dst"], e["weight"]])
    return nodes_path, edges_path
