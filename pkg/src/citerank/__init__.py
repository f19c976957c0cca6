"""citerank: ranking nodes in growing citation networks.

Builds timestamped citation graphs, scores nodes by citation count and
PageRank on historical snapshots, removes the age bias of those scores by
rescaling against chronological neighborhoods, and benchmarks everything
against degree-preserving randomized ensembles.
"""

from .corpus import (
    CitationNetwork,
    CorpusFormatError,
    IngestionReport,
    NetworkView,
    load_corpus,
    read_id_list,
    snapshot,
    write_corpus,
)
from .centrality import (
    PageRankConfig,
    PageRankConvergenceError,
    ScoreVector,
    citation_count,
    pagerank,
    write_scores_csv,
)
from .rescale import DeltaClampWarning, RescaleConfig, rescale, window_bounds
from .nullmodel import (
    LayerDecomposition,
    RewiringError,
    build_layers,
    expected_edges,
    sample_randomized,
)
from .netstats import (
    CorrelationCurve,
    TimingStats,
    citation_timing,
    degree_histogram,
    ensemble_profile,
    mean_citation_count,
    neighbor_indegree_profile,
)
from .evaluate import (
    BiasProfile,
    EvaluationReport,
    NullComparison,
    RankVector,
    RatioResult,
    bias_profile,
    identification_rate,
    null_comparison,
    rank_nodes,
    ranking_ratio,
    temporal_evaluation,
    trajectory_export,
)

__version__ = "0.1.0"

__all__ = [
    "CitationNetwork",
    "CorpusFormatError",
    "IngestionReport",
    "NetworkView",
    "load_corpus",
    "read_id_list",
    "snapshot",
    "write_corpus",
    "PageRankConfig",
    "PageRankConvergenceError",
    "ScoreVector",
    "citation_count",
    "pagerank",
    "write_scores_csv",
    "DeltaClampWarning",
    "RescaleConfig",
    "rescale",
    "window_bounds",
    "LayerDecomposition",
    "RewiringError",
    "build_layers",
    "expected_edges",
    "sample_randomized",
    "CorrelationCurve",
    "TimingStats",
    "citation_timing",
    "degree_histogram",
    "ensemble_profile",
    "mean_citation_count",
    "neighbor_indegree_profile",
    "BiasProfile",
    "EvaluationReport",
    "NullComparison",
    "RankVector",
    "RatioResult",
    "bias_profile",
    "identification_rate",
    "null_comparison",
    "rank_nodes",
    "ranking_ratio",
    "temporal_evaluation",
    "trajectory_export",
    "__version__",
]
