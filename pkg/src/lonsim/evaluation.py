"""Simulated annealing performance and its relation to landscape similarity."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from . import _rng
from ._rng import Stream, as_stream, derive, derive_path
from .exceptions import RatioUndefinedError, RegressionError, UndefinedCorrelationError
from .landscape import TABLE_MAX_N, build_landscape
from .lon import LON
from .metrics import spearman
from .sampling import _repair_lanes
from .problems import ProblemInstance, Sense, feasible_int, fitness_int, not_worse, random_solution
from .similarity import SimilarityMatrix

EXHAUSTIVE, SAMPLED_BEST, TOP_1 = "EXHAUSTIVE", "SAMPLED-BEST", "TOP-1%"


@dataclass(frozen=True)
class SaConfig:
    """Annealing budget and geometric cooling ``T(i) = T0 * decay**(i / period)``."""

    budget: int = 1000
    T0: float = 1000.0
    n_runs: int = 200
    decay: float = 0.8
    period: float = 300.0

    def __post_init__(self):
        if self.budget < 0:
            raise ValueError("budget must be >= 0")
        if self.T0 <= 0:
            raise ValueError("T0 must be positive")
        if self.n_runs < 1:
            raise ValueError("n_runs must be >= 1")

    def temperature(self, i):
        return self.T0 * self.decay ** (np.asarray(i, dtype=np.float64) / self.period)

    def to_dict(self) -> dict:
        return {"budget": self.budget, "T0": self.T0, "n_runs": self.n_runs, "decay": self.decay, "period": self.period}


@dataclass(frozen=True)
class SaRunResult:
    success: bool
    fe_used: int
    best_fitness: int


@dataclass(frozen=True)
class PerfRecord:
    instance_id: str
    SR: float
    n_runs: int
    target: int
    provenance: str
    results: tuple = field(default=(), repr=False, compare=False)


def _accept_prob(delta: float, temp: float) -> float:
    return float(np.exp(np.array([-delta / temp]))[0])


def simulated_annealing(instance: ProblemInstance, target: int, config: SaConfig, rng) -> SaRunResult:
    """One annealing run with single-bit-flip proposals.

    Every iteration draws a flip position and an acceptance variate and
    charges one evaluation, including knapsack proposals rejected as
    infeasible.  The run stops when the current solution reaches ``target``.
    """
    rng = as_stream(rng)
    n = instance.n
    sense = instance.sense
    x = random_solution(instance, rng).value
    f = fitness_int(instance, x)
    best = f
    fe = 1
    if not_worse(f, target, sense):
        return SaRunResult(True, fe, best)
    for i in range(1, config.budget + 1):
        j = rng.below(n)
        u = rng.random()
        fe += 1
        y = x ^ (1 << (n - 1 - j))
        if not feasible_int(instance, y):
            continue
        fy = fitness_int(instance, y)
        worse = (fy - f) if sense is Sense.MIN else (f - fy)
        if worse <= 0 or u < _accept_prob(worse, float(config.temperature(i))):
            x, f = y, fy
            if not_worse(f, best, sense):
                best = f
            if not_worse(f, target, sense):
                return SaRunResult(True, fe, best)
    return SaRunResult(False, fe, best)


def _sa_batch(instance: ProblemInstance, target: int, config: SaConfig, keys: np.ndarray) -> list[SaRunResult]:
    """Lock-step version of :func:`simulated_annealing`, one lane per key."""
    land = build_landscape(instance)
    n = instance.n
    key_fit = land.key
    tkey = target if instance.sense is Sense.MIN else -target
    m = keys.size
    counters = np.zeros(m, dtype=np.int64)
    x = (_rng.u64_array(keys, counters) >> np.uint64(64 - n)).astype(np.int64)
    _repair_lanes(land, x, keys, counters, np.arange(m))
    f = key_fit[x]
    best = f.copy()
    fe = np.ones(m, dtype=np.int64)
    success = f <= tkey
    active = np.flatnonzero(~success)
    for i in range(1, config.budget + 1):
        if not active.size:
            break
        c = counters[active]
        k = active
        j = _rng.below_array(keys[k], c, n)
        u = _rng.random_array(keys[k], c)
        counters[k] = c
        fe[k] += 1
        y = x[k] ^ (np.int64(1) << (n - 1 - j))
        feas = land.feasible[y]
        fy = key_fit[y]
        worse = (fy - f[k]).astype(np.float64)
        prob = np.exp(-np.maximum(worse, 0.0) / float(config.temperature(i)))
        acc = feas & ((worse <= 0) | (u < prob))
        ka = k[acc]
        x[ka] = y[acc]
        f[ka] = fy[acc]
        best[ka] = np.minimum(best[ka], f[ka])
        hit = ka[f[ka] <= tkey]
        success[hit] = True
        active = active[~success[active]]
    sign = 1 if instance.sense is Sense.MIN else -1
    return [SaRunResult(bool(s), int(e), int(sign * b)) for s, e, b in zip(success, fe, best)]


def sa_stream(master_seed: int, run: int) -> Stream:
    return Stream(derive_path(master_seed, "sa", run))


def run_sa(instance: ProblemInstance, target: int, config: SaConfig, master_seed: int) -> list[SaRunResult]:
    """``config.n_runs`` independent runs; run ``r`` uses :func:`sa_stream` ``(master_seed, r)``."""
    if instance.n <= TABLE_MAX_N and instance.n <= 62:
        keys = _rng.derive_array(derive(master_seed, "sa"), np.arange(config.n_runs))
        return _sa_batch(instance, target, config, keys)
    return [simulated_annealing(instance, target, config, sa_stream(master_seed, r)) for r in range(config.n_runs)]


def success_rate(
    instance: ProblemInstance, target: int, config: SaConfig, master_seed: int, provenance: str = EXHAUSTIVE
) -> PerfRecord:
    results = run_sa(instance, target, config, master_seed)
    sr = sum(r.success for r in results) / config.n_runs
    return PerfRecord(instance.id, sr, config.n_runs, int(target), provenance, tuple(results))


def delta_sr(a: float, b: float) -> float:
    return abs(a - b)


def rho_sr(a: float, b: float) -> float:
    if b == 0:
        raise RatioUndefinedError("success-rate ratio undefined for SR_j = 0")
    return a / b


def symmetric_rho_sr(a: float, b: float) -> float:
    """``max(a/b, b/a)``; undefined when either rate is zero."""
    if a == 0 or b == 0:
        raise RatioUndefinedError("symmetric ratio undefined when a success rate is zero")
    return max(a / b, b / a)


def ert(results) -> float:
    """Total evaluations over all runs divided by the number of successes (``inf`` if none)."""
    results = list(results)
    succ = sum(1 for r in results if r.success)
    if succ == 0:
        return math.inf
    return sum(r.fe_used for r in results) / succ


def ert_target(lon: LON) -> int:
    """Fitness of the ``ceil(0.01 * N_node)``-th best sampled optimum."""
    if lon.n_nodes == 0:
        raise ValueError("empty LON")
    order = np.sort(lon.fitness) if lon.sense is Sense.MIN else np.sort(lon.fitness)[::-1]
    k = math.ceil(0.01 * lon.n_nodes)
    return int(order[k - 1])


# -- regression ----------------------------------------------------------------


@dataclass(frozen=True)
class PolyFit:
    coef: tuple[float, ...]
    r2: float

    @property
    def c0(self) -> float:
        return self.coef[0]

    @property
    def c1(self) -> float:
        return self.coef[1] if len(self.coef) > 1 else 0.0

    @property
    def c2(self) -> float:
        return self.coef[2] if len(self.coef) > 2 else 0.0

    def predict(self, x):
        x = np.asarray(x, dtype=np.float64)
        return sum(c * x**p for p, c in enumerate(self.coef))


def polynomial_fit(x, y, degree: int) -> PolyFit:
    """Least-squares polynomial fit with ``R^2 = 1 - SS_res / SS_tot``.

    A constant response gives ``R^2 = 0`` and a warning.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size != y.size:
        raise ValueError("length mismatch")
    if x.size < degree + 1:
        raise RegressionError(f"need at least {degree + 1} points for a degree-{degree} fit")
    design = np.vander(x, degree + 1, increasing=True)
    if np.linalg.matrix_rank(design) < degree + 1:
        raise RegressionError("degenerate design matrix")
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    ss_res = float(resid @ resid)
    dy = y - y.mean()
    ss_tot = float(dy @ dy)
    if ss_tot == 0.0:
        warnings.warn("constant response: R^2 reported as 0", RuntimeWarning, stacklevel=2)
        r2 = 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return PolyFit(tuple(float(c) for c in coef), r2)


def quadratic_regression(x, y) -> PolyFit:
    return polynomial_fit(x, y, 2)


# -- similarity versus performance ---------------------------------------------


@dataclass
class SimPerfResult:
    pairs: pd.DataFrame
    rho_delta: float
    rho_ratio: float
    fit_delta: PolyFit | None
    fit_ratio: PolyFit | None


def _safe_spearman(x, y, label: str) -> float:
    try:
        return spearman(x, y)
    except UndefinedCorrelationError as exc:
        warnings.warn(f"{label}: {exc}", RuntimeWarning, stacklevel=3)
        return math.nan


def _safe_fit(x, y, label: str):
    try:
        return quadratic_regression(x, y)
    except RegressionError as exc:
        warnings.warn(f"{label}: {exc}", RuntimeWarning, stacklevel=3)
        return None


def sim_vs_performance(matrix: SimilarityMatrix, records, grouping: dict | None = None) -> SimPerfResult:
    """Correlate pairwise Sim with success-rate differences and ratios.

    With ``grouping`` (id -> group) the analysis runs on group pairs
    ``g != h``: Sim is the mean over cross-group cells and SR the group mean.
    Pairs with an undefined Sim or ratio are skipped per statistic.
    """
    recs = {r.instance_id: r for r in records}
    missing = [i for i in matrix.ids if i not in recs]
    if missing:
        raise KeyError(f"no performance record for {missing[:5]}")
    rows = []
    if grouping is None:
        for a, b, s in matrix.pairs():
            rows.append((a, b, s, recs[a].SR, recs[b].SR))
    else:
        groups = sorted({grouping[i] for i in matrix.ids})
        members = {g: [i for i in matrix.ids if grouping[i] == g] for g in groups}
        sr = {g: float(np.mean([recs[i].SR for i in members[g]])) for g in groups}
        for gi, g in enumerate(groups):
            for h in groups[gi + 1 :]:
                cells = [matrix.get(a, b) for a in members[g] for b in members[h]]
                cells = [c for c in cells if not math.isnan(c)]
                s = float(np.mean(cells)) if cells else math.nan
                rows.append((str(g), str(h), s, sr[g], sr[h]))
    out = []
    for a, b, s, sa, sb in rows:
        try:
            ratio = symmetric_rho_sr(sa, sb)
        except RatioUndefinedError:
            ratio = math.nan
        out.append({"id_i": a, "id_j": b, "Sim": s, "dSR": delta_sr(sa, sb), "rhoSR": ratio})
    pairs = pd.DataFrame(out, columns=["id_i", "id_j", "Sim", "dSR", "rhoSR"])
    ok_d = pairs["Sim"].notna()
    ok_r = ok_d & pairs["rhoSR"].notna()
    sim_d, dsr = pairs.loc[ok_d, "Sim"].to_numpy(), pairs.loc[ok_d, "dSR"].to_numpy()
    sim_r, rsr = pairs.loc[ok_r, "Sim"].to_numpy(), pairs.loc[ok_r, "rhoSR"].to_numpy()
    return SimPerfResult(
        pairs=pairs,
        rho_delta=_safe_spearman(sim_d, dsr, "Spearman(Sim, dSR)"),
        rho_ratio=_safe_spearman(sim_r, rsr, "Spearman(Sim, rhoSR)"),
        fit_delta=_safe_fit(sim_d, dsr, "dSR ~ Sim"),
        fit_ratio=_safe_fit(sim_r, rsr, "rhoSR ~ Sim"),
    )
