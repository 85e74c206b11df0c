"""End-to-end pipeline stages behind the command line.

Every stage reads its inputs from the output tree and writes its artifacts
back into it, so the pipeline can resume at any stage boundary.  All
randomness is derived from ``master_seed``::

    instance seed   derive_path(master_seed, "instance", kind, n, idx)
    ILS seed        derive_path(master_seed, "sample", instance_id)
    basin seed      derive_path(master_seed, "basins", instance_id)
    walk seed       derive_path(master_seed, "embed", instance_id)
    SA seed         derive_path(master_seed, "sa", instance_id)

Work inside a stage is split per instance; results are collected in a fixed
order, so the output does not depend on the number of workers.
"""

from __future__ import annotations

import copy
import hashlib
import json
import logging
import math
import shutil
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__
from ._rng import MASK64, derive_path
from .embedding import instance_space, node_embed, project_2d, scatter_svg, wl_footprint
from .evaluation import (
    EXHAUSTIVE,
    SAMPLED_BEST,
    TOP_1,
    SaConfig,
    ert,
    ert_target,
    sim_vs_performance,
    success_rate,
)
from .exceptions import LonsimError
from .lon import compress_plateaus, load_lon, monotonic_filter, save_lon
from .metrics import (
    GRAPH_FEATURES,
    cdd,
    feature_fitness_correlations,
    feature_trajectories,
    graph_features,
    node_features,
    rcc,
    undirected_degrees,
)
from .problems import Kind, generate, load_instance, save_instance
from .sampling import ENUMERATION_MAX_N, IlsConfig, approximate_basins, exhaustive_best, sample_lon
from .similarity import SimilarityMatrix, block_summary, sim_matrix

log = logging.getLogger("lonsim")

STAGES = ("generate", "sample", "features", "embed", "sim", "eval", "report")

DEFAULT_CONFIG = {
    "problems": [
        {"kind": "npp", "dimensions": [8, 10, 12, 14], "instances": 10, "params": {}},
        {"kind": "maxsat", "dimensions": [8, 10, 12, 14], "instances": 10, "params": {}},
        {"kind": "kp", "dimensions": [8, 10, 12, 14], "instances": 10, "params": {}},
    ],
    "sampler": {"n_iter": 1000, "max_nimpr": 100, "perturbation_bits": 2, "basin_samples": 10000},
    "analysis": {"node_features": True, "cdd": True, "rcc": True},
    "embedding": {
        "wl_iterations": 3,
        "footprint_dim": 128,
        "node_dim": 32,
        "n_walks": 10,
        "walk_length": 40,
        "window": 5,
        "node_embed": "representative",
    },
    "sa": {"budget": 1000, "T0": 1000.0, "n_runs": 200, "kinds": ["npp"], "target": "optimum"},
    "master_seed": 0,
    "output": "lonsim-out",
}


class ConfigError(LonsimError):
    """Invalid pipeline configuration (exit code 2)."""


class MissingArtifactError(LonsimError):
    """An upstream stage has not been run (exit code 3)."""


# -- configuration -------------------------------------------------------------


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _int(value, name: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return value


def load_config(path=None, overrides: dict | None = None) -> dict:
    """Read a JSON config (missing keys take defaults), apply overrides and validate."""
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        try:
            user = json.loads(Path(path).read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError(f"{path}: top level must be an object")
        cfg = _merge(cfg, user)
    if overrides:
        cfg = _merge(cfg, {k: v for k, v in overrides.items() if v is not None})
    return validate_config(cfg)


def validate_config(cfg: dict) -> dict:
    unknown = set(cfg) - set(DEFAULT_CONFIG)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if not isinstance(cfg["problems"], list) or not cfg["problems"]:
        raise ConfigError("problems must be a non-empty list")
    seen = set()
    for i, p in enumerate(cfg["problems"]):
        where = f"problems[{i}]"
        if not isinstance(p, dict):
            raise ConfigError(f"{where} must be an object")
        try:
            kind = Kind(p.get("kind"))
        except ValueError:
            raise ConfigError(f"{where}: unknown kind {p.get('kind')!r}") from None
        if kind in seen:
            raise ConfigError(f"{where}: kind {kind.value} listed twice")
        seen.add(kind)
        dims = p.get("dimensions")
        if not isinstance(dims, list) or not dims:
            raise ConfigError(f"{where}: dimensions must be a non-empty list")
        for n in dims:
            _int(n, f"{where}.dimensions", 2)
        if len(set(dims)) != len(dims):
            raise ConfigError(f"{where}: duplicate dimensions")
        _int(p.get("instances"), f"{where}.instances", 1)
        if not isinstance(p.get("params", {}), dict):
            raise ConfigError(f"{where}.params must be an object")
        p.setdefault("params", {})
    s = cfg["sampler"]
    for key in ("n_iter", "max_nimpr", "perturbation_bits"):
        _int(s.get(key), f"sampler.{key}", 1)
    _int(s.get("basin_samples"), "sampler.basin_samples", 0)
    e = cfg["embedding"]
    _int(e.get("wl_iterations"), "embedding.wl_iterations", 0)
    for key in ("footprint_dim", "node_dim", "n_walks", "walk_length", "window"):
        _int(e.get(key), f"embedding.{key}", 1)
    if e.get("node_embed") not in ("representative", "all", "none"):
        raise ConfigError("embedding.node_embed must be 'representative', 'all' or 'none'")
    sa = cfg["sa"]
    _int(sa.get("budget"), "sa.budget", 0)
    _int(sa.get("n_runs"), "sa.n_runs", 1)
    if not isinstance(sa.get("T0"), (int, float)) or isinstance(sa.get("T0"), bool) or sa["T0"] <= 0:
        raise ConfigError("sa.T0 must be a positive number")
    if sa.get("target") not in ("optimum", "top1"):
        raise ConfigError("sa.target must be 'optimum' or 'top1'")
    for k in sa.get("kinds", []):
        if k not in {p["kind"] for p in cfg["problems"]}:
            raise ConfigError(f"sa.kinds: {k!r} is not a configured problem kind")
    seed = cfg["master_seed"]
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed <= MASK64:
        raise ConfigError(f"master_seed must be an unsigned 64-bit integer, got {seed!r}")
    if not isinstance(cfg["output"], str) or not cfg["output"]:
        raise ConfigError("output must be a non-empty path")
    return cfg


# -- helpers -------------------------------------------------------------------


def instance_id(kind: str, n: int, idx: int) -> str:
    return f"{kind}-n{n}-i{idx}"


def plan(cfg: dict) -> list[tuple[str, int, int, str]]:
    """``(kind, n, idx, id)`` for every configured instance, in canonical order."""
    out = []
    for p in cfg["problems"]:
        for n in p["dimensions"]:
            for idx in range(p["instances"]):
                out.append((p["kind"], n, idx, instance_id(p["kind"], n, idx)))
    return out


def _seed(cfg: dict, *path) -> int:
    return derive_path(cfg["master_seed"], *path)


def _out(cfg: dict) -> Path:
    return Path(cfg["output"])


def _instance_path(cfg, kind, n, idx) -> Path:
    return _out(cfg) / "instances" / kind / str(n) / f"{idx}.json"


def _lon_path(cfg, iid: str, tag: str) -> Path:
    return _out(cfg) / "lons" / f"{iid}.{tag}.json"


def _require(paths, stage: str) -> None:
    missing = [str(p) for p in paths if not Path(p).exists()]
    if missing:
        raise MissingArtifactError(f"stage '{stage}' has not been run: missing {missing[0]}" + (f" and {len(missing) - 1} more" if len(missing) > 1 else ""))


def _map(fn, tasks, jobs: int):
    tasks = list(tasks)
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def _write_csv(frame: pd.DataFrame, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n", na_rep="NA")


def _group_of(iid: str) -> tuple[str, int]:
    kind, n, _ = iid.split("-")
    return kind, int(n[1:])


# -- generate ------------------------------------------------------------------


def _generate_one(task):
    cfg, kind, n, idx, iid = task
    params = next(p["params"] for p in cfg["problems"] if p["kind"] == kind)
    inst = generate(kind, n, seed=_seed(cfg, "instance", kind, n, idx), id=iid, **params)
    save_instance(inst, _instance_path(cfg, kind, n, idx))
    return iid


def cmd_generate(cfg: dict, jobs: int = 1) -> list[str]:
    tasks = [(cfg, *t) for t in plan(cfg)]
    try:
        ids = _map(_generate_one, tasks, jobs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"instance generation failed: {exc}") from exc
    log.info("generate: %d instances", len(ids))
    return ids


# -- sample --------------------------------------------------------------------


def _load_instances(cfg):
    paths = [_instance_path(cfg, k, n, i) for k, n, i, _ in plan(cfg)]
    _require(paths, "generate")
    return paths


def _sample_one(task):
    cfg, kind, n, idx, iid = task
    inst = load_instance(_instance_path(cfg, kind, n, idx))
    s = cfg["sampler"]
    ils = IlsConfig(s["n_iter"], s["max_nimpr"], s["perturbation_bits"])
    lon = sample_lon(inst, ils, _seed(cfg, "sample", iid))
    if s["basin_samples"]:
        est = approximate_basins(inst, lon, s["basin_samples"], _seed(cfg, "basins", iid))
        lon = lon.with_basins(est.counts).with_metadata(basin_samples=s["basin_samples"], basin_unseen=est.n_unseen)
    lon.validate()
    mlon = monotonic_filter(lon)
    cm = compress_plateaus(mlon)
    if cm.n_nodes > mlon.n_nodes:
        raise LonsimError(f"{iid}: compressed LON is larger than its monotonic LON")
    for tag, g in (("raw", lon), ("mono", mlon), ("cmlon", cm)):
        save_lon(g, _lon_path(cfg, iid, tag))
    return iid, lon.n_nodes, mlon.n_nodes, cm.n_nodes


def cmd_sample(cfg: dict, jobs: int = 1):
    _load_instances(cfg)
    res = _map(_sample_one, [(cfg, *t) for t in plan(cfg)], jobs)
    log.info("sample: %d instances, %d LON nodes in total", len(res), sum(r[1] for r in res))
    return res


# -- features ------------------------------------------------------------------


def _lon_paths(cfg, tags=("raw", "mono", "cmlon")):
    paths = [_lon_path(cfg, iid, t) for *_, iid in plan(cfg) for t in tags]
    _require(paths, "sample")


def _features_one(task):
    cfg, kind, n, idx, iid = task
    mlon = load_lon(_lon_path(cfg, iid, "mono"))
    cm = load_lon(_lon_path(cfg, iid, "cmlon"))
    table = node_features(mlon)
    gf = graph_features(mlon, cm, table).to_dict()
    corr = feature_fitness_correlations(table)
    table.insert(0, "lon", iid)
    a = cfg["analysis"]
    return (
        table if a["node_features"] else None,
        {"lon": iid, "kind": kind, "n": n, **gf},
        [{"lon": iid, "feature": f, "spearman": v} for f, v in corr.items()],
        [(iid, k, v) for k, v in cdd(mlon)] if a["cdd"] else [],
        [(iid, k, v) for k, v in rcc(mlon)] if a["rcc"] else [],
    )


def cmd_features(cfg: dict, jobs: int = 1):
    _lon_paths(cfg, ("mono", "cmlon"))
    res = _map(_features_one, [(cfg, *t) for t in plan(cfg)], jobs)
    d = _out(cfg) / "features"
    if cfg["analysis"]["node_features"]:
        _write_csv(pd.concat([r[0] for r in res], ignore_index=True), d / "node_features.csv")
    graph = pd.DataFrame([r[1] for r in res], columns=["lon", "kind", "n", *GRAPH_FEATURES])
    _write_csv(graph, d / "graph_features.csv")
    _write_csv(feature_trajectories(graph), d / "trajectories.csv")
    _write_csv(pd.DataFrame([row for r in res for row in r[2]], columns=["lon", "feature", "spearman"]), d / "correlations.csv")
    if cfg["analysis"]["cdd"]:
        _write_csv(pd.DataFrame([row for r in res for row in r[3]], columns=["lon", "k", "value"]), d / "cdd.csv")
    if cfg["analysis"]["rcc"]:
        _write_csv(pd.DataFrame([row for r in res for row in r[4]], columns=["lon", "k", "value"]), d / "rcc.csv")
    log.info("features: %d LONs", len(res))
    return graph


# -- embed ---------------------------------------------------------------------


def _representatives(cfg) -> set[str]:
    mode = cfg["embedding"]["node_embed"]
    if mode == "none":
        return set()
    return {iid for _, _, idx, iid in plan(cfg) if mode == "all" or idx == 0}


def _embed_one(task):
    cfg, kind, n, idx, iid, node_level = task
    e = cfg["embedding"]
    mlon = load_lon(_lon_path(cfg, iid, "mono"))
    fp = wl_footprint(mlon, e["wl_iterations"], e["footprint_dim"]).vector
    if node_level and mlon.n_nodes >= 2:
        d = _out(cfg) / "embed" / "nodes"
        emb = node_embed(mlon, e["node_dim"], e["n_walks"], e["walk_length"], e["window"], _seed(cfg, "embed", iid))
        cols = [f"c{j}" for j in range(emb.shape[1])]
        frame = pd.DataFrame(emb, columns=cols)
        frame.insert(0, "id", np.arange(mlon.n_nodes))
        _write_csv(frame, d / f"{iid}.embedding.csv")
        xy = project_2d(emb)
        _write_csv(pd.DataFrame({"id": np.arange(mlon.n_nodes), "u": xy[:, 0], "v": xy[:, 1]}), d / f"{iid}.planar.csv")
        svg = scatter_svg(xy, undirected_degrees(mlon), mlon.fitness, mlon.sense)
        (d / f"{iid}.svg").write_text(svg)
    return fp


def cmd_embed(cfg: dict, jobs: int = 1):
    _lon_paths(cfg, ("mono",))
    reps = _representatives(cfg)
    items = plan(cfg)
    fps = _map(_embed_one, [(cfg, *t, t[3] in reps) for t in items], jobs)
    d = _out(cfg) / "embed"
    ids = [t[3] for t in items]
    mat = np.vstack(fps)
    frame = pd.DataFrame(mat, columns=[f"z{j}" for j in range(mat.shape[1])])
    frame.insert(0, "id", ids)
    _write_csv(frame, d / "footprints.csv")
    if len(ids) >= 2:
        xy = instance_space(mat)
        _write_csv(
            pd.DataFrame({"id": ids, "kind": [t[0] for t in items], "n": [t[1] for t in items], "u": xy[:, 0], "v": xy[:, 1]}),
            d / "instance_space.csv",
        )
    log.info("embed: %d footprints, %d node embeddings", len(ids), len(reps))
    return frame


# -- sim -----------------------------------------------------------------------


def read_footprints(cfg) -> tuple[list[str], np.ndarray]:
    path = _out(cfg) / "embed" / "footprints.csv"
    _require([path], "embed")
    frame = pd.read_csv(path, float_precision="round_trip")
    return frame["id"].tolist(), frame.drop(columns="id").to_numpy(dtype=np.float64)


def cmd_sim(cfg: dict, jobs: int = 1) -> SimilarityMatrix:
    ids, mat = read_footprints(cfg)
    if len(ids) < 2:
        raise ConfigError("similarity needs at least two instances")
    m = sim_matrix(list(mat), ids)
    d = _out(cfg) / "sim"
    m.to_csv(d / "similarity.csv")
    groups = {i: "{}-n{}".format(*_group_of(i)) for i in ids}
    rows = []
    for (g, h), v in block_summary(m, groups).items():
        rows.append({"group_i": g, "group_j": h, "mean_sim": v})
    _write_csv(pd.DataFrame(rows, columns=["group_i", "group_j", "mean_sim"]), d / "block_summary.csv")
    log.info("sim: %dx%d matrix", len(ids), len(ids))
    return m


# -- eval ----------------------------------------------------------------------


def _eval_one(task):
    cfg, kind, n, idx, iid = task
    inst = load_instance(_instance_path(cfg, kind, n, idx))
    s = cfg["sa"]
    sa = SaConfig(budget=s["budget"], T0=float(s["T0"]), n_runs=s["n_runs"])
    if s["target"] == "top1":
        target, prov = ert_target(load_lon(_lon_path(cfg, iid, "raw"))), TOP_1
    elif n <= min(20, ENUMERATION_MAX_N):
        target, prov = exhaustive_best(inst), EXHAUSTIVE
    else:
        raw = load_lon(_lon_path(cfg, iid, "raw"))
        target = int(raw.fitness.min() if raw.sense.value == "min" else raw.fitness.max())
        prov = SAMPLED_BEST
    rec = success_rate(inst, target, sa, _seed(cfg, "sa", iid), prov)
    return rec, ert(rec.results)


def _fit_row(level, target, res_rho, fit):
    row = {"level": level, "target": target, "spearman": res_rho}
    if fit is None:
        return {**row, "c0": math.nan, "c1": math.nan, "c2": math.nan, "R2": math.nan}
    return {**row, "c0": fit.c0, "c1": fit.c1, "c2": fit.c2, "R2": fit.r2}


def cmd_eval(cfg: dict, jobs: int = 1):
    kinds = cfg["sa"].get("kinds", [])
    items = [t for t in plan(cfg) if t[0] in kinds]
    _load_instances(cfg)
    sim_path = _out(cfg) / "sim" / "similarity.csv"
    _require([sim_path], "sim")
    d = _out(cfg) / "eval"
    res = _map(_eval_one, [(cfg, *t) for t in items], jobs)
    perf = pd.DataFrame(
        [
            {"instance": r.instance_id, "SR": r.SR, "n_runs": r.n_runs, "target": r.target, "provenance": r.provenance, "ERT": e}
            for r, e in res
        ],
        columns=["instance", "SR", "n_runs", "target", "provenance", "ERT"],
    )
    _write_csv(perf, d / "performance.csv")
    full = SimilarityMatrix.from_csv(sim_path)
    records = [r for r, _ in res]
    pair_frames, bars, fits = [], [], []
    for kind in kinds:
        ids = [t[3] for t in items if t[0] == kind]
        if len(ids) < 2:
            continue
        idx = [full.index(i) for i in ids]
        sub = SimilarityMatrix(tuple(ids), full.values[np.ix_(idx, idx)])
        inst = sim_vs_performance(sub, records)
        pair_frames.append(inst.pairs)
        levels = [("instance", inst)]
        dims = {i: _group_of(i)[1] for i in ids}
        if len(set(dims.values())) >= 3:
            grp = sim_vs_performance(sub, records, dims)
            levels.append(("dimension", grp))
            for _, row in grp.pairs.iterrows():
                bars.append({"kind": kind, "n_i": int(row["id_i"]), "n_j": int(row["id_j"]), "Sim": row["Sim"], "dSR": row["dSR"], "rhoSR": row["rhoSR"]})
        for level, r in levels:
            fits.append({"kind": kind, **_fit_row(level, "dSR", r.rho_delta, r.fit_delta)})
            fits.append({"kind": kind, **_fit_row(level, "rhoSR", r.rho_ratio, r.fit_ratio)})
    cols = ["id_i", "id_j", "Sim", "dSR", "rhoSR"]
    _write_csv(pd.concat(pair_frames, ignore_index=True) if pair_frames else pd.DataFrame(columns=cols), d / "pairs.csv")
    _write_csv(pd.DataFrame(bars, columns=["kind", "n_i", "n_j", "Sim", "dSR", "rhoSR"]), d / "bars.csv")
    _write_csv(pd.DataFrame(fits, columns=["kind", "level", "target", "spearman", "c0", "c1", "c2", "R2"]), d / "regression.csv")
    log.info("eval: %d instances", len(res))
    return perf


# -- report --------------------------------------------------------------------


REPORT_FILES = {
    "rq1_trajectories.csv": "features/trajectories.csv",
    "rq1_graph_features.csv": "features/graph_features.csv",
    "rq2_instance_space.csv": "embed/instance_space.csv",
    "rq3_similarity.csv": "sim/similarity.csv",
    "rq3_block_summary.csv": "sim/block_summary.csv",
    "rq4_performance.csv": "eval/performance.csv",
    "rq4_bars.csv": "eval/bars.csv",
    "rq4_regression.csv": "eval/regression.csv",
}


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def artifact_digests(root) -> dict[str, str]:
    """SHA-256 of every file under ``root`` except the manifest, keyed by relative path."""
    root = Path(root)
    out = {}
    for p in sorted(root.rglob("*")):
        rel = p.relative_to(root).as_posix()
        if p.is_file() and rel != "report/manifest.json":
            out[rel] = _sha256(p)
    return out


def _correlation_summary(cfg) -> pd.DataFrame:
    corr = pd.read_csv(_out(cfg) / "features" / "correlations.csv")
    kn = corr["lon"].map(_group_of)
    corr["kind"] = [k for k, _ in kn]
    corr["n"] = [n for _, n in kn]
    return corr.groupby(["kind", "n", "feature"], sort=True)["spearman"].mean().reset_index()


def cmd_report(cfg: dict, jobs: int = 1) -> dict:
    root = _out(cfg)
    needed = {
        "features": root / "features" / "graph_features.csv",
        "embed": root / "embed" / "footprints.csv",
        "sim": root / "sim" / "similarity.csv",
        "eval": root / "eval" / "performance.csv",
    }
    for stage, path in needed.items():
        _require([path], stage)
    rep = root / "report"
    rep.mkdir(parents=True, exist_ok=True)
    for name, src in REPORT_FILES.items():
        if (root / src).exists():
            shutil.copyfile(root / src, rep / name)
    _write_csv(_correlation_summary(cfg), rep / "rq1_feature_fitness_correlations.csv")
    snapshot = {k: v for k, v in cfg.items() if k != "output"}
    manifest = {
        "toolkit": "lonsim",
        "version": __version__,
        "config": snapshot,
        "digests": artifact_digests(root),
        "timestamps": {"created": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())},
    }
    (rep / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    log.info("report: %d artifacts digested", len(manifest["digests"]))
    return manifest


def run_all(cfg: dict, jobs: int = 1) -> dict:
    for stage in STAGES[:-1]:
        STAGE_FUNCS[stage](cfg, jobs)
    return cmd_report(cfg, jobs)


STAGE_FUNCS = {
    "generate": cmd_generate,
    "sample": cmd_sample,
    "features": cmd_features,
    "embed": cmd_embed,
    "sim": cmd_sim,
    "eval": cmd_eval,
    "report": cmd_report,
}


# -- verify --------------------------------------------------------------------


def cmd_verify(cfg: dict, jobs: int = 1, n: int = 8) -> list[tuple[str, bool, str]]:
    """Oracle cross-checks on small generated instances; returns ``(check, ok, detail)``."""
    from .landscape import build_landscape
    from .sampling import enumerate_lon, exact_basins, ils_trace_lon

    checks = []
    ils = IlsConfig(200, cfg["sampler"]["max_nimpr"], cfg["sampler"]["perturbation_bits"])
    for kind in sorted({p["kind"] for p in cfg["problems"]}):
        params = next(p["params"] for p in cfg["problems"] if p["kind"] == kind)
        inst = generate(kind, n, seed=_seed(cfg, "verify", kind), id=f"verify-{kind}", **params)
        seed = _seed(cfg, "verify-ils", kind)
        fast = sample_lon(inst, ils, seed)
        slow = ils_trace_lon(inst, ils, seed)
        checks.append((f"{kind}: table sampler equals scalar reference", fast == slow, ""))
        ex = enumerate_lon(inst)
        extra = np.setdiff1d(fast.configs, ex.configs).size
        checks.append((f"{kind}: sampled optima are local optima", extra == 0, f"{extra} extra"))
        mlon = monotonic_filter(fast)
        ex_edges = set(zip(ex.configs[ex.src].tolist(), ex.configs[ex.dst].tolist()))
        bad = sum((a, b) not in ex_edges for a, b in zip(mlon.configs[mlon.src].tolist(), mlon.configs[mlon.dst].tolist()))
        checks.append((f"{kind}: monotonic edges are escape edges", bad == 0, f"{bad} missing"))
        _, sizes = exact_basins(inst)
        feasible = int(build_landscape(inst).feasible.sum())
        checks.append((f"{kind}: basin sizes sum to feasible count", int(sizes.sum()) == feasible, f"{int(sizes.sum())} vs {feasible}"))
    out = _out(cfg) / "verify"
    out.mkdir(parents=True, exist_ok=True)
    (out / "checks.json").write_text(
        json.dumps([{"check": c, "ok": bool(ok), "detail": d} for c, ok, d in checks], indent=2) + "\n"
    )
    return checks
