"""Local optima network construction, analysis and landscape similarity."""

__version__ = "0.1.0"

from .embedding import Footprint, instance_space, node_embed, project_2d, wl_footprint
from .estimators import (
    GraphFeatureTransformer,
    LONSampler,
    NodeEmbedder,
    PlanarProjection,
    SimulatedAnnealingEvaluator,
    WLFootprintTransformer,
)
from .evaluation import (
    PerfRecord,
    SaConfig,
    SaRunResult,
    delta_sr,
    ert,
    ert_target,
    quadratic_regression,
    rho_sr,
    sim_vs_performance,
    simulated_annealing,
    success_rate,
)
from .lon import CMLON, LON, MONOTONIC, RAW, compress_plateaus, find_sinks, load_lon, monotonic_filter, save_lon
from .metrics import cdd, graph_features, node_features, rcc, spearman
from .problems import BitString, Kind, ProblemInstance, Sense, evaluate, generate, load_instance, save_instance
from .sampling import IlsConfig, approximate_basins, enumerate_lon, hill_climb, ils_run, perturb, sample_lon
from .similarity import SimilarityMatrix, block_summary, sim, sim_matrix

__all__ = [
    "BitString",
    "CMLON",
    "Footprint",
    "GraphFeatureTransformer",
    "IlsConfig",
    "Kind",
    "LON",
    "LONSampler",
    "MONOTONIC",
    "NodeEmbedder",
    "PerfRecord",
    "PlanarProjection",
    "ProblemInstance",
    "RAW",
    "SaConfig",
    "SaRunResult",
    "Sense",
    "SimilarityMatrix",
    "SimulatedAnnealingEvaluator",
    "WLFootprintTransformer",
    "approximate_basins",
    "block_summary",
    "cdd",
    "compress_plateaus",
    "delta_sr",
    "enumerate_lon",
    "ert",
    "ert_target",
    "evaluate",
    "find_sinks",
    "generate",
    "graph_features",
    "hill_climb",
    "ils_run",
    "instance_space",
    "load_instance",
    "load_lon",
    "monotonic_filter",
    "node_embed",
    "node_features",
    "perturb",
    "project_2d",
    "quadratic_regression",
    "rcc",
    "rho_sr",
    "sample_lon",
    "save_instance",
    "save_lon",
    "sim",
    "sim_matrix",
    "sim_vs_performance",
    "simulated_annealing",
    "spearman",
    "success_rate",
    "wl_footprint",
]
