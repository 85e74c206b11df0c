"""scikit-learn style wrappers around the functional API.

The estimators hold configuration in ``__init__`` (so ``get_params`` /
``set_params`` / ``clone`` work), learn state in ``fit`` with trailing
underscore attributes, and expose ``transform`` or ``predict``.  Inputs are
problem instances or LONs rather than numeric arrays; only
:class:`PlanarProjection` consumes a plain matrix.
"""

from __future__ import annotations

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .embedding import (
    DEFAULT_DIM,
    DEFAULT_FOOTPRINT_DIM,
    DEFAULT_WL_ITERATIONS,
    node_embed,
    principal_axes,
    wl_footprint,
)
from .evaluation import EXHAUSTIVE, SAMPLED_BEST, SaConfig, success_rate
from .lon import compress_plateaus, monotonic_filter
from .metrics import GRAPH_FEATURES, graph_features, node_features
from .sampling import IlsConfig, approximate_basins, exhaustive_best, sample_lon
from .validation import check_instance, check_instances, check_lon, check_lons, check_positive_int


class LONSampler(BaseEstimator):
    """Sample the RAW, monotonic and compressed LONs of one instance.

    Parameters
    ----------
    n_iter : int, default=1000
        Number of ILS restarts.
    max_nimpr : int, default=100
        Consecutive non-improving perturbations before a restart ends.
    perturbation_bits : int, default=2
    n_basin_samples : int or None, default=None
        When set, basin sizes are estimated from this many uniform
        feasible starting points.
    seed : int, default=0
        Master seed.

    Attributes
    ----------
    lon_, mlon_, cmlon_ : LON
    """

    def __init__(self, n_iter=1000, max_nimpr=100, perturbation_bits=2, n_basin_samples=None, seed=0):
        self.n_iter = n_iter
        self.max_nimpr = max_nimpr
        self.perturbation_bits = perturbation_bits
        self.n_basin_samples = n_basin_samples
        self.seed = seed

    def _config(self) -> IlsConfig:
        return IlsConfig(
            n_iter=check_positive_int(self.n_iter, "n_iter"),
            max_nimpr=check_positive_int(self.max_nimpr, "max_nimpr"),
            perturbation_bits=check_positive_int(self.perturbation_bits, "perturbation_bits"),
        )

    def _sample(self, instance):
        lon = sample_lon(instance, self._config(), self.seed)
        if self.n_basin_samples:
            n_samples = check_positive_int(self.n_basin_samples, "n_basin_samples")
            est = approximate_basins(instance, lon, n_samples, self.seed)
            lon = lon.with_basins(est.counts)
        mlon = monotonic_filter(lon)
        return lon, mlon, compress_plateaus(mlon)

    def fit(self, X, y=None):
        """Sample the LONs of instance ``X``."""
        self.instance_id_ = check_instance(X).id
        self.lon_, self.mlon_, self.cmlon_ = self._sample(X)
        return self

    def transform(self, X, variant="MONOTONIC"):
        """Sample every instance in ``X`` and return one LON of ``variant`` each."""
        pick = {"RAW": 0, "MONOTONIC": 1, "CMLON": 2}[variant]
        return [self._sample(inst)[pick] for inst in check_instances(X)]

    def fit_transform(self, X, y=None, variant="MONOTONIC"):
        return self.transform(X, variant=variant)


class GraphFeatureTransformer(TransformerMixin, BaseEstimator):
    """Graph-level features of LONs as a ``(n_lons, 12)`` table.

    ``N_funnel`` counts the sinks of the plateau-compressed network derived
    from each input.

    Parameters
    ----------
    as_frame : bool, default=True
        Return a ``pandas.DataFrame`` (indexed by instance id) instead of an array.
    """

    def __init__(self, as_frame=True):
        self.as_frame = as_frame

    def fit(self, X, y=None):
        check_lons(X)
        self.feature_names_out_ = np.array(GRAPH_FEATURES, dtype=object)
        return self

    def transform(self, X):
        check_is_fitted(self, "feature_names_out_")
        rows, ids = [], []
        for lon in check_lons(X):
            cm = lon if lon.variant == "CMLON" else compress_plateaus(monotonic_filter(lon))
            table = node_features(lon) if lon.n_nodes else None
            rows.append(graph_features(lon, cm, table).as_array())
            ids.append(lon.instance_id)
        out = np.vstack(rows)
        if self.as_frame:
            return pd.DataFrame(out, columns=list(GRAPH_FEATURES), index=ids)
        return out

    def get_feature_names_out(self, input_features=None):
        return np.array(GRAPH_FEATURES, dtype=object)


class WLFootprintTransformer(TransformerMixin, BaseEstimator):
    """Hashed Weisfeiler-Lehman footprints of LONs.

    Parameters
    ----------
    iterations : int, default=3
    dim : int, default=128
    """

    def __init__(self, iterations=DEFAULT_WL_ITERATIONS, dim=DEFAULT_FOOTPRINT_DIM):
        self.iterations = iterations
        self.dim = dim

    def fit(self, X, y=None):
        check_positive_int(self.iterations, "iterations", minimum=0)
        self.n_features_out_ = check_positive_int(self.dim, "dim")
        return self

    def transform(self, X):
        """Return an ``(n_lons, dim)`` array of unit-norm rows."""
        check_is_fitted(self, "n_features_out_")
        return np.vstack([wl_footprint(l, self.iterations, self.dim).vector for l in check_lons(X)])


class NodeEmbedder(TransformerMixin, BaseEstimator):
    """Random-walk PPMI embedding of the nodes of one LON.

    Parameters
    ----------
    d : int, default=32
    n_walks : int, default=10
    walk_length : int, default=40
    window : int, default=5
    seed : int, default=0

    Attributes
    ----------
    embedding_ : ndarray of shape (n_nodes, d)
    """

    def __init__(self, d=DEFAULT_DIM, n_walks=10, walk_length=40, window=5, seed=0):
        self.d = d
        self.n_walks = n_walks
        self.walk_length = walk_length
        self.window = window
        self.seed = seed

    def fit(self, X, y=None):
        lon = check_lon(X)
        self.embedding_ = node_embed(
            lon,
            d=check_positive_int(self.d, "d"),
            n_walks=check_positive_int(self.n_walks, "n_walks"),
            walk_length=check_positive_int(self.walk_length, "walk_length"),
            window=check_positive_int(self.window, "window"),
            seed=self.seed,
        )
        return self

    def transform(self, X):
        return self.fit(X).embedding_


class PlanarProjection(TransformerMixin, BaseEstimator):
    """Project rows onto their top two principal directions.

    Each axis is oriented so its largest-magnitude loading is positive.

    Attributes
    ----------
    mean_ : ndarray of shape (n_features,)
    components_ : ndarray of shape (2, n_features)
    explained_variance_ : ndarray of shape (2,)
    """

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        axes = principal_axes(X, 2)
        self.mean_ = axes.mean
        self.components_ = axes.components
        self.explained_variance_ = axes.explained_variance
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "components_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, projection was fitted on {self.n_features_in_}")
        return (X - self.mean_) @ self.components_.T


class SimulatedAnnealingEvaluator(BaseEstimator):
    """Success rate of simulated annealing against each instance's exhaustive optimum.

    Parameters
    ----------
    budget : int, default=1000
    T0 : float, default=1000.0
    n_runs : int, default=200
    seed : int, default=0
    target_provenance : str, default="SAMPLED-BEST"
        Label recorded when targets are passed to ``fit``.

    Attributes
    ----------
    records_ : dict of str to PerfRecord
    """

    def __init__(self, budget=1000, T0=1000.0, n_runs=200, seed=0, target_provenance=SAMPLED_BEST):
        self.budget = budget
        self.T0 = T0
        self.n_runs = n_runs
        self.seed = seed
        self.target_provenance = target_provenance

    def fit(self, X, y=None):
        """Run SA on every instance; ``y`` optionally supplies target fitness values."""
        instances = check_instances(X)
        targets = [exhaustive_best(i) for i in instances] if y is None else [int(t) for t in y]
        if len(targets) != len(instances):
            raise ValueError("one target per instance is required")
        cfg = SaConfig(budget=self.budget, T0=float(self.T0), n_runs=self.n_runs)
        self.records_ = {
            inst.id: success_rate(inst, t, cfg, self.seed, EXHAUSTIVE if y is None else self.target_provenance)
            for inst, t in zip(instances, targets)
        }
        return self

    def predict(self, X):
        """Success rates of previously fitted instances, in input order."""
        check_is_fitted(self, "records_")
        return np.array([self.records_[i.id].SR for i in check_instances(X)])
