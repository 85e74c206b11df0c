import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_lon
from lonsim.evaluation import (
    PerfRecord,
    SaConfig,
    SaRunResult,
    _accept_prob,
    delta_sr,
    ert,
    ert_target,
    polynomial_fit,
    quadratic_regression,
    rho_sr,
    run_sa,
    sa_stream,
    sim_vs_performance,
    simulated_annealing,
    success_rate,
    symmetric_rho_sr,
)
from lonsim.exceptions import RatioUndefinedError, RegressionError
from lonsim.problems import Kind, NppInstance, ProblemInstance, generate
from lonsim.sampling import exhaustive_best
from lonsim.similarity import SimilarityMatrix, sim_matrix

ALL_OPT = ProblemInstance(Kind.NPP, NppInstance((0, 0), 0.7), "zero")


def runs(fes, successes):
    return [SaRunResult(i < successes, fe, 0) for i, fe in enumerate(fes)]


# -- annealing -------------------------------------------------------------------


def test_all_optimal_instance():
    r = simulated_annealing(ALL_OPT, 0, SaConfig(budget=50, n_runs=1), sa_stream(0, 0))
    assert r.success and r.fe_used == 1
    for seed in range(5):
        assert success_rate(ALL_OPT, 0, SaConfig(budget=10, n_runs=20), seed).SR == 1.0


def test_zero_budget_unreachable_target():
    inst = generate("npp", 10, seed=3)
    rec = success_rate(inst, -1, SaConfig(budget=0, n_runs=10), 0)
    assert rec.SR == 0.0
    assert all(r.fe_used == 1 for r in rec.results)


def test_cold_acceptance_bound():
    assert _accept_prob(1.0, 1e-9) < 1e-9


def test_config_validation():
    with pytest.raises(ValueError):
        SaConfig(T0=0)
    with pytest.raises(ValueError):
        SaConfig(n_runs=0)


@pytest.mark.parametrize("kind", ["npp", "maxsat", "kp"])
def test_batch_matches_scalar_and_budget(kind):
    inst = generate(kind, 10, seed=6)
    cfg = SaConfig(budget=300, n_runs=25)
    target = exhaustive_best(inst)
    batch = run_sa(inst, target, cfg, 17)
    scalar = [simulated_annealing(inst, target, cfg, sa_stream(17, r)) for r in range(cfg.n_runs)]
    assert batch == scalar
    assert all(r.fe_used <= cfg.budget + 1 for r in batch)
    assert success_rate(inst, target, cfg, 17) == success_rate(inst, target, cfg, 17)


def test_kp_never_accepts_infeasible():
    inst = generate("kp", 12, seed=4)
    best = exhaustive_best(inst)
    # an unreachable target forces every run to spend its whole budget
    for r in run_sa(inst, best + 1, SaConfig(budget=2000, n_runs=40), 2):
        assert not r.success
        assert r.best_fitness <= best


# -- ratios and ERT --------------------------------------------------------------


def test_ratio_examples():
    assert delta_sr(0.8, 0.4) == pytest.approx(0.4)
    assert rho_sr(0.8, 0.4) == 2.0
    assert (delta_sr(0.3, 0.3), rho_sr(0.3, 0.3)) == (0.0, 1.0)
    assert delta_sr(0.0, 0.5) == 0.5
    with pytest.raises(RatioUndefinedError):
        rho_sr(0.5, 0.0)
    assert symmetric_rho_sr(0.4, 0.8) == 2.0
    with pytest.raises(RatioUndefinedError):
        symmetric_rho_sr(0.0, 0.8)


def test_ert_examples():
    assert ert(runs([100, 200, 300], 3)) == 200.0
    assert ert(runs([100, 200, 300], 2)) == 300.0
    assert ert(runs([100, 200, 300], 0)) == math.inf


@given(st.lists(st.integers(1, 1000), min_size=1, max_size=20), st.data())
def test_ert_monotone_in_successes(fes, data):
    k = data.draw(st.integers(0, len(fes) - 1))
    assert ert(runs(fes, k + 1)) <= ert(runs(fes, k))
    assert ert(runs(fes, len(fes))) == pytest.approx(sum(fes) / len(fes))


def test_ert_target_examples():
    fit = list(range(100, 0, -1))
    assert ert_target(make_lon(fit)) == 1
    assert ert_target(make_lon(list(range(250)))) == 2
    assert ert_target(make_lon([7, 7, 7])) == 7
    assert ert_target(make_lon([1, 9, 4], sense="max")) == 9


@given(st.lists(st.integers(0, 100), min_size=1, max_size=300))
def test_ert_target_monotone(fit):
    base = ert_target(make_lon(fit))
    assert ert_target(make_lon(fit + [min(fit) - 1])) <= base


# -- regression ------------------------------------------------------------------


def test_regression_examples():
    x = np.array([-2.0, -1.0, 0.0, 1.0, 3.0])
    fit = quadratic_regression(x, x**2)
    assert np.allclose(fit.coef, (0, 0, 1), atol=1e-12)
    assert fit.r2 == pytest.approx(1.0, abs=1e-12)
    lin = quadratic_regression([0, 1, 2], [2, 5, 8])
    assert np.allclose(lin.coef, (2, 3, 0), atol=1e-12) and lin.r2 == pytest.approx(1.0)
    with pytest.warns(RuntimeWarning):
        const = quadratic_regression(x, np.full(5, 4.0))
    assert const.r2 == 0.0 and abs(const.c1) < 1e-12 and abs(const.c2) < 1e-12
    with pytest.raises(RegressionError):
        quadratic_regression([1, 1, 1, 1], [1, 2, 3, 4])
    with pytest.raises(RegressionError):
        quadratic_regression([1, 2], [1, 2])


@given(st.lists(st.tuples(st.integers(-20, 20), st.integers(-50, 50)), min_size=4, max_size=30, unique_by=lambda t: t[0]))
def test_r2_bounds(points):
    x = np.array([p[0] for p in points], dtype=float)
    y = np.array([p[1] for p in points], dtype=float)
    if np.ptp(y) == 0:
        return
    q, lin = quadratic_regression(x, y), polynomial_fit(x, y, 1)
    assert -1e-12 <= q.r2 <= 1 + 1e-12
    assert q.r2 >= lin.r2 - 1e-12


# -- similarity versus performance -----------------------------------------------


def _records(srs):
    return [PerfRecord(str(i), sr, 10, 0, "EXHAUSTIVE") for i, sr in enumerate(srs)]


def test_monotone_corpus_gives_minus_one():
    ids = ("0", "1", "2", "3")
    v = np.full((4, 4), np.nan)
    for (i, j), s in {(0, 1): 0.9, (0, 2): 0.2, (0, 3): -0.3, (1, 2): 0.6, (1, 3): 0.0, (2, 3): 0.4}.items():
        v[i, j] = v[j, i] = s
    # SRs on a line; every pair's gap shrinks as its Sim grows
    res = sim_vs_performance(SimilarityMatrix(ids, v), _records([0.0, 0.1, 0.5, 0.95]))
    assert len(res.pairs) == 6
    assert res.rho_delta == -1.0


def test_identical_rates_give_absent_correlation():
    fps = [np.array([1.0, 2, 3, 4]), np.array([2.0, 1, 3, 4]), np.array([4.0, 3, 2, 1])]
    m = sim_matrix(fps, ["0", "1", "2"])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = sim_vs_performance(m, _records([0.5, 0.5, 0.5]))
    assert math.isnan(res.rho_delta)
    assert any("Spearman" in str(w.message) for w in caught)


def test_grouped_analysis():
    fps = [np.array(v, dtype=float) for v in ([1, 2, 3, 4], [1, 2, 4, 3], [4, 3, 2, 1], [3, 4, 2, 1], [2, 1, 4, 3], [1, 3, 2, 4])]
    m = sim_matrix(fps, [str(i) for i in range(6)])
    groups = {str(i): 8 + 2 * (i // 2) for i in range(6)}
    res = sim_vs_performance(m, _records([1, 0.8, 0.5, 0.5, 0.2, 0.0]), groups)
    assert res.pairs[["id_i", "id_j"]].values.tolist() == [["8", "10"], ["8", "12"], ["10", "12"]]
    assert res.pairs["dSR"].tolist() == pytest.approx([0.4, 0.8, 0.4])
    with pytest.raises(KeyError):
        sim_vs_performance(m, _records([1.0]))
