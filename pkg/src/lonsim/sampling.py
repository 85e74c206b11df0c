"""Iterated local search sampling of local optima, and exhaustive oracles.

The acceptance loop of one ILS restart::

    x    <- random feasible solution
    lo   <- hill_climb(x)
    repeat until ``max_nimpr`` consecutive non-improving perturbations:
        lo2 <- hill_climb(perturb(lo))
        if lo2 != lo and f(lo2) is not worse than f(lo):
            record lo -> lo2, move to lo2
        reset the counter only if f(lo2) is strictly better than f(lo)

Equal-fitness moves are accepted but still count as non-improving.  This
bounds every restart: fitness can improve only finitely often, and at most
``max_nimpr`` perturbations separate two improvements.  Resetting on
equal-fitness moves instead lets walks circulate on plateaus of mutually
reachable optima indefinitely.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from . import _rng
from ._rng import Stream, as_stream, derive, derive_path
from .exceptions import BudgetError
from .landscape import TABLE_MAX_N, build_landscape
from .lon import LON, RAW, lon_from_records, merge_traces
from .problems import (
    BitString,
    Kind,
    ProblemInstance,
    better,
    feasible_int,
    fitness_int,
    not_worse,
    random_solution,
    repair_int,
)

ENUMERATION_MAX_N = 22


@dataclass(frozen=True)
class IlsConfig:
    n_iter: int = 1000
    max_nimpr: int = 100
    perturbation_bits: int = 2

    def __post_init__(self):
        if self.n_iter < 1:
            raise ValueError("n_iter must be >= 1")
        if self.max_nimpr < 1:
            raise ValueError("max_nimpr must be >= 1")
        if self.perturbation_bits < 1:
            raise ValueError("perturbation_bits must be >= 1")

    def check(self, n: int) -> None:
        if self.perturbation_bits > n:
            raise ValueError(f"perturbation_bits={self.perturbation_bits} exceeds dimension {n}")

    def to_dict(self) -> dict:
        return {"n_iter": self.n_iter, "max_nimpr": self.max_nimpr, "perturbation_bits": self.perturbation_bits}


@dataclass
class RunTrace:
    """Raw output of one ILS restart.

    ``visited`` holds ``(optimum, fitness, climb_steps)`` per arrival,
    ``transitions`` counts accepted ``(source, destination)`` moves and
    ``escape_effort`` holds ``(optimum, perturbations)`` per departure.
    """

    instance_id: str
    visited: list = field(default_factory=list)
    transitions: Counter = field(default_factory=Counter)
    escape_effort: list = field(default_factory=list)


def ils_stream(master_seed: int, iteration: int) -> Stream:
    """The random stream of ILS restart ``iteration``."""
    return Stream(derive_path(master_seed, "ils", iteration))


# -- scalar reference operators ------------------------------------------------


def hill_climb(instance: ProblemInstance, x: BitString) -> tuple[BitString, int]:
    """Best-improvement climbing with strict improvement and lowest-index ties."""
    n = instance.n
    sense = instance.sense
    cur = x.value
    if not feasible_int(instance, cur):
        raise ValueError(f"{x} is infeasible")
    fcur = fitness_int(instance, cur)
    steps = 0
    while True:
        best, fbest = cur, fcur
        for i in range(n):
            y = cur ^ (1 << (n - 1 - i))
            if not feasible_int(instance, y):
                continue
            fy = fitness_int(instance, y)
            if better(fy, fbest, sense):
                best, fbest = y, fy
        if best == cur:
            return BitString(cur, n), steps
        cur, fcur = best, fbest
        steps += 1


def perturb(instance: ProblemInstance, x: BitString, rng, bits: int = 2) -> BitString:
    """Flip ``bits`` distinct uniformly chosen positions, then repair (knapsack only)."""
    rng = as_stream(rng)
    n = instance.n
    pool = list(range(n))
    v = x.value
    for t in range(bits):
        j = t + rng.below(n - t)
        pool[t], pool[j] = pool[j], pool[t]
        v ^= 1 << (n - 1 - pool[t])
    return BitString(repair_int(instance, v, rng), n)


def ils_run(instance: ProblemInstance, config: IlsConfig, rng) -> RunTrace:
    config.check(instance.n)
    rng = as_stream(rng)
    sense = instance.sense
    trace = RunTrace(instance.id)
    lo, steps = hill_climb(instance, random_solution(instance, rng))
    f = fitness_int(instance, lo.value)
    trace.visited.append((lo, f, steps))
    fails = since = 0
    while fails < config.max_nimpr:
        cand, steps = hill_climb(instance, perturb(instance, lo, rng, config.perturbation_bits))
        since += 1
        f2 = fitness_int(instance, cand.value)
        if cand != lo and not_worse(f2, f, sense):
            trace.transitions[(lo, cand)] += 1
            trace.escape_effort.append((lo, since))
            trace.visited.append((cand, f2, steps))
            fails = 0 if better(f2, f, sense) else fails + 1
            lo, f, since = cand, f2, 0
        else:
            fails += 1
    return trace


# -- vectorised engine ---------------------------------------------------------


def _draw_below(keys, counters, idx, k):
    c = counters[idx]
    out = _rng.below_array(keys[idx], c, k)
    counters[idx] = c
    return out


def _repair_lanes(land, x, keys, counters, lanes):
    """Vectorised :func:`repair_int` over the given lanes (in place on ``x``)."""
    if land.instance.kind is not Kind.KP:
        return
    n = land.n
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    bad = lanes[~land.feasible[x[lanes]]]
    while bad.size:
        bits = (x[bad][:, None] >> shifts) & 1
        cum = np.cumsum(bits, axis=1)
        k = _draw_below(keys, counters, bad, cum[:, -1])
        pos = np.argmax(cum == (k + 1)[:, None], axis=1)
        x[bad] &= ~(np.int64(1) << (n - 1 - pos))
        bad = bad[~land.feasible[x[bad]]]


def _random_lanes(land, keys, counters):
    n = land.n
    u = _rng.u64_array(keys, counters)
    x = (u >> np.uint64(64 - n)).astype(np.int64)
    _repair_lanes(land, x, keys, counters, np.arange(x.size))
    return x


def _perturb_lanes(land, lo, keys, counters, lanes, bits):
    n = land.n
    m = lanes.size
    pool = np.tile(np.arange(n, dtype=np.int64), (m, 1))
    rows = np.arange(m)
    for t in range(bits):
        j = t + _draw_below(keys, counters, lanes, n - t)
        tmp = pool[rows, t].copy()
        pool[rows, t] = pool[rows, j]
        pool[rows, j] = tmp
    mask = np.zeros(m, dtype=np.int64)
    for t in range(bits):
        mask |= np.int64(1) << (n - 1 - pool[:, t])
    x = np.zeros(lo.size, dtype=np.int64)
    x[lanes] = lo[lanes] ^ mask
    _repair_lanes(land, x, keys, counters, lanes)
    return x[lanes]


def _ils_batch(instance: ProblemInstance, config: IlsConfig, keys: np.ndarray) -> dict:
    """Run one ILS restart per key in lock step; returns flat record arrays."""
    land = build_landscape(instance)
    key = land.key
    keys = np.asarray(keys, dtype=np.uint64)
    counters = np.zeros(keys.size, dtype=np.int64)
    x0 = _random_lanes(land, keys, counters)
    lo = land.target[x0]
    rec = {"arr_cfg": [lo.copy()], "arr_steps": [land.steps[x0]], "dep_cfg": [], "dep_pert": [], "src": [], "dst": []}
    fails = np.zeros(keys.size, dtype=np.int64)
    since = np.zeros(keys.size, dtype=np.int64)
    active = np.arange(keys.size)
    while active.size:
        xp = _perturb_lanes(land, lo, keys, counters, active, config.perturbation_bits)
        cand = land.target[xp]
        since[active] += 1
        cur = lo[active]
        acc = (cand != cur) & (key[cand] <= key[cur])
        improved = key[cand] < key[cur]
        a_lanes = active[acc]
        if a_lanes.size:
            rec["src"].append(cur[acc])
            rec["dst"].append(cand[acc])
            rec["dep_cfg"].append(cur[acc])
            rec["dep_pert"].append(since[a_lanes].copy())
            rec["arr_cfg"].append(cand[acc])
            rec["arr_steps"].append(land.steps[xp[acc]])
            lo[a_lanes] = cand[acc]
            since[a_lanes] = 0
        fails[active] = np.where(improved, 0, fails[active] + 1)
        active = active[fails[active] < config.max_nimpr]
    cat = lambda parts: np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)  # noqa: E731
    out = {k: cat(v) for k, v in rec.items()}
    out["arr_fit"] = land.fitness[out["arr_cfg"]]
    return out


def _lon_metadata(instance, config, master_seed, sampler="ils") -> dict:
    return {
        "instance_id": instance.id,
        "kind": instance.kind.value,
        "n": instance.n,
        "sense": instance.sense.value,
        "sampler": {"method": sampler, **config.to_dict()} if config else {"method": sampler},
        "master_seed": master_seed,
        "variant": RAW,
    }


def sample_lon(instance: ProblemInstance, config: IlsConfig, master_seed: int, chunk: int = 4096) -> LON:
    """Merge ``config.n_iter`` ILS restarts into a RAW LON.

    Restart ``i`` consumes :func:`ils_stream` ``(master_seed, i)``.  Dimensions
    up to ``TABLE_MAX_N`` use the lock-step table engine; larger ones fall back
    to the scalar reference loop.  Both give identical results.
    """
    config.check(instance.n)
    meta = _lon_metadata(instance, config, master_seed)
    if instance.n > TABLE_MAX_N:
        traces = [ils_run(instance, config, ils_stream(master_seed, i)) for i in range(config.n_iter)]
        return merge_traces(traces, instance, meta)
    base = derive(master_seed, "ils")
    parts = []
    for start in range(0, config.n_iter, chunk):
        idx = np.arange(start, min(start + chunk, config.n_iter))
        parts.append(_ils_batch(instance, config, _rng.derive_array(base, idx)))
    rec = {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}
    return lon_from_records(
        instance.n,
        rec["arr_cfg"],
        rec["arr_fit"],
        rec["arr_steps"],
        rec["dep_cfg"],
        rec["dep_pert"],
        rec["src"],
        rec["dst"],
        meta,
    )


# -- exhaustive oracles --------------------------------------------------------


def _guard(instance: ProblemInstance) -> None:
    if instance.n > ENUMERATION_MAX_N:
        raise BudgetError(f"exhaustive enumeration refused for n={instance.n} > {ENUMERATION_MAX_N}")


def exact_basins(instance: ProblemInstance) -> tuple[np.ndarray, np.ndarray]:
    """Local optima (ascending) and the number of feasible configurations climbing to each."""
    _guard(instance)
    land = build_landscape(instance)
    optima = land.local_optima()
    counts = np.bincount(land.target[land.feasible], minlength=land.fitness.size)
    return optima, counts[optima]


def exhaustive_best(instance: ProblemInstance) -> int:
    """Verified optimal fitness by scanning every feasible configuration."""
    _guard(instance)
    land = build_landscape(instance)
    fit = land.fitness[land.feasible]
    return int(fit.min() if instance.sense.value == "min" else fit.max())


def _repair_outcomes(instance: ProblemInstance, x: int) -> frozenset:
    """Every configuration the random knapsack repair can return from ``x``."""
    n = instance.n

    @lru_cache(maxsize=None)
    def go(v: int) -> frozenset:
        if feasible_int(instance, v):
            return frozenset([v])
        out = set()
        for i in range(n):
            bit = 1 << (n - 1 - i)
            if v & bit:
                out |= go(v & ~bit)
        return frozenset(out)

    return go(x)


def enumerate_lon(instance: ProblemInstance, perturbation_bits: int = 2) -> LON:
    """Exhaustive escape-edge LON.

    Nodes are all local optima.  From each optimum every ``perturbation_bits``
    flip mask is applied (for the knapsack, every possible repair outcome is
    taken) and climbed; each outcome reaching a different optimum adds weight 1
    to that edge.  ``freq`` and ``b_size`` hold the exact basin size,
    ``n_climb`` the mean climb length over the basin, and ``n_pert`` the
    expected number of perturbations until an accepted move.
    """
    _guard(instance)
    land = build_landscape(instance)
    n = instance.n
    optima = land.local_optima()
    basin = np.bincount(land.target[land.feasible], minlength=land.fitness.size)
    climb_sum = np.bincount(land.target[land.feasible], weights=land.steps[land.feasible], minlength=land.fitness.size)
    masks = np.array(
        [sum(1 << (n - 1 - i) for i in combo) for combo in combinations(range(n), perturbation_bits)],
        dtype=np.int64,
    )
    key = land.key
    pos = np.full(land.fitness.size, -1, dtype=np.int64)
    pos[optima] = np.arange(optima.size)
    src_list, dst_list = [], []
    totals = np.zeros(optima.size, dtype=np.int64)
    accepted = np.zeros(optima.size, dtype=np.int64)
    if instance.kind is not Kind.KP:
        xp = optima[:, None] ^ masks[None, :]
        v = land.target[xp]
        u = np.broadcast_to(optima[:, None], v.shape)
        totals[:] = masks.size
        move = v != u
        accepted[:] = (move & (key[v] <= key[u])).sum(axis=1)
        src_list.append(u[move])
        dst_list.append(v[move])
    else:
        for j, u in enumerate(optima.tolist()):
            outs = []
            for mask in masks.tolist():
                xp = u ^ mask
                if land.feasible[xp]:
                    outs.append(int(land.target[xp]))
                else:
                    outs.extend(int(land.target[y]) for y in sorted(_repair_outcomes(instance, xp)))
            outs = np.asarray(outs, dtype=np.int64)
            totals[j] = outs.size
            move = outs != u
            accepted[j] = int((move & (key[outs] <= key[u])).sum())
            src_list.append(np.full(int(move.sum()), u, dtype=np.int64))
            dst_list.append(outs[move])
    src = pos[np.concatenate(src_list)] if src_list else np.zeros(0, dtype=np.int64)
    dst = pos[np.concatenate(dst_list)] if dst_list else np.zeros(0, dtype=np.int64)
    size = optima.size
    if src.size:
        upair, w = np.unique(src * size + dst, return_counts=True)
        src, dst = upair // size, upair % size
    else:
        w = np.zeros(0, dtype=np.int64)
    with np.errstate(divide="ignore", invalid="ignore"):
        n_pert = np.where(accepted > 0, totals / np.maximum(accepted, 1), np.nan)
    b = basin[optima]
    meta = _lon_metadata(instance, None, None, sampler="exhaustive")
    meta["sampler"]["perturbation_bits"] = perturbation_bits
    return LON.build(n, optima, land.fitness[optima], b, climb_sum[optima] / b, n_pert, b.astype(float), src, dst, w, meta)


# -- basin estimation ----------------------------------------------------------


@dataclass(frozen=True)
class BasinEstimate:
    """Arrival counts per LON node from uniform feasible starting points.

    ``unseen`` counts arrivals at optima missing from the LON, keyed by
    configuration.
    """

    counts: np.ndarray
    unseen: dict
    n_samples: int

    @property
    def fractions(self) -> np.ndarray:
        return self.counts / self.n_samples

    @property
    def n_unseen(self) -> int:
        return int(sum(self.unseen.values()))


def approximate_basins(instance: ProblemInstance, lon: LON, n_samples: int, seed: int) -> BasinEstimate:
    """Hill-climb ``n_samples`` uniform feasible configurations and tally destinations.

    Infeasible draws are rejected and redrawn from the same stream, so the
    starting points are uniform over the feasible set.
    """
    if lon.instance_id is not None and lon.instance_id != instance.id:
        raise ValueError(f"LON of {lon.instance_id!r} used with instance {instance.id!r}")
    base = derive(seed, "basins")
    n = instance.n
    if n <= TABLE_MAX_N:
        land = build_landscape(instance)
        keys = _rng.derive_array(base, np.arange(n_samples))
        counters = np.zeros(n_samples, dtype=np.int64)
        x = (_rng.u64_array(keys, counters) >> np.uint64(64 - n)).astype(np.int64)
        bad = np.flatnonzero(~land.feasible[x])
        while bad.size:
            c = counters[bad]
            x[bad] = (_rng.u64_array(keys[bad], c) >> np.uint64(64 - n)).astype(np.int64)
            counters[bad] = c
            bad = bad[~land.feasible[x[bad]]]
        dest = land.target[x]
    else:
        dest = []
        for i in range(n_samples):
            rng = Stream(derive(base, i))
            v = rng.bits(n)
            while not feasible_int(instance, v):
                v = rng.bits(n)
            dest.append(hill_climb(instance, BitString(v, n))[0].value)
        dest = np.asarray(dest, dtype=np.int64)
    uniq, cnt = np.unique(dest, return_counts=True)
    counts = np.zeros(lon.n_nodes, dtype=np.int64)
    unseen = {}
    for cfg, c in zip(uniq.tolist(), cnt.tolist()):
        i = int(np.searchsorted(lon.configs, cfg))
        if i < lon.n_nodes and lon.configs[i] == cfg:
            counts[i] = c
        else:
            unseen[str(BitString(cfg, n))] = c
    return BasinEstimate(counts, unseen, n_samples)


def ils_trace_lon(instance: ProblemInstance, config: IlsConfig, master_seed: int) -> LON:
    """Scalar reference for :func:`sample_lon` (slow; used for cross-checks)."""
    traces = [ils_run(instance, config, ils_stream(master_seed, i)) for i in range(config.n_iter)]
    return merge_traces(traces, instance, _lon_metadata(instance, config, master_seed))

