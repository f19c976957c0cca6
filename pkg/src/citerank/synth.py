"""Synthetic growing citation networks with planted high-fitness nodes.

Nodes arrive on a uniform date grid; each newcomer cites earlier nodes
drawn without replacement with probability proportional to

    (in_degree + 1) ** attachment_exponent * fitness * exp(-age / decay)

where age is the candidate's age in days when the citation happens. A
random subset of nodes ("targets") carries a fitness multiplier, planting
nodes that deserve attention before their citation counts show it. With a
short decay the output develops the strong age bias that rescaled metrics
are supposed to remove, which makes these networks convenient acceptance
fixtures. Parameters are test fixtures, not claims about any real corpus.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from .corpus import CitationNetwork

__all__ = ["SynthConfig", "generate"]


@dataclass(frozen=True)
class SynthConfig:
    """Generator parameters; see the module docstring for the model."""

    n_nodes: int
    mean_out_degree: float = 3.0
    attachment_exponent: float = 1.0
    decay_days: float | None = None
    n_targets: int = 0
    fitness_multiplier: float = 1.0
    seed: int = 0
    start: dt.date = dt.date(2000, 1, 1)
    step_days: int = 1

    def __post_init__(self):
        if self.n_nodes < 10:
            raise ValueError("n_nodes must be >= 10")
        if self.mean_out_degree < 1:
            raise ValueError("mean_out_degree must be >= 1")
        if self.attachment_exponent < 0:
            raise ValueError("attachment_exponent must be >= 0")
        if self.decay_days is not None and self.decay_days <= 0:
            raise ValueError("decay_days must be positive")
        if not 0 <= self.n_targets <= self.n_nodes:
            raise ValueError("n_targets must be in [0, n_nodes]")
        if self.fitness_multiplier < 1:
            raise ValueError("fitness_multiplier must be >= 1")
        if self.step_days < 1:
            raise ValueError("step_days must be >= 1")


def _out_quota(n: int, mu: float) -> np.ndarray:
    """Integer out-degrees averaging ``mu``: floor((i+1)mu) - floor(i*mu)."""
    marks = np.floor(np.arange(n + 1) * mu).astype(np.int64)
    return np.diff(marks)


def generate(config: SynthConfig):
    """Grow one synthetic network; returns ``(network, target_indices)``.

    Node ids are "1".."N" in issue order, so the returned target indices
    address the built network directly. Same seed, same output. A node
    whose out-degree quota exceeds the nodes already issued cites all of
    them instead.
    """
    n = config.n_nodes
    rng = np.random.default_rng(config.seed)
    if config.n_targets:
        targets = np.sort(rng.choice(n, size=config.n_targets, replace=False))
    else:
        targets = np.empty(0, dtype=np.int64)

    start_ord = config.start.toordinal()
    dates = start_ord + np.arange(n, dtype=np.int64) * config.step_days
    # exp(-age/decay) = exp(-(t_i - t_j)/decay); the citing-side term is a
    # common shift that cancels in the sampling, so only date_j/decay stays
    static = np.zeros(n, dtype=np.float64)
    if config.decay_days is not None:
        static += dates / float(config.decay_days)
    if config.n_targets and config.fitness_multiplier > 1:
        static[targets] += np.log(config.fitness_multiplier)

    gamma = config.attachment_exponent
    indeg = np.zeros(n, dtype=np.int64)
    logdeg = np.zeros(n, dtype=np.float64)
    quota = _out_quota(n, config.mean_out_degree)

    citing_parts = []
    cited_parts = []
    for i in range(1, n):
        m = int(min(quota[i], i))
        if m == 0:
            continue
        if m == i:
            chosen = np.arange(i)
        else:
            # Gumbel top-k = weighted sampling without replacement
            keys = logdeg[:i] + static[:i] + rng.gumbel(size=i)
            chosen = np.argpartition(-keys, m - 1)[:m]
        citing_parts.append(np.full(m, i, dtype=np.int64))
        cited_parts.append(chosen.astype(np.int64))
        indeg[chosen] += 1
        logdeg[chosen] = gamma * np.log(indeg[chosen] + 1.0)

    if citing_parts:
        citing = np.concatenate(citing_parts)
        cited = np.concatenate(cited_parts)
    else:
        citing = np.empty(0, dtype=np.int64)
        cited = np.empty(0, dtype=np.int64)
    ids = [str(k + 1) for k in range(n)]
    net, report = CitationNetwork.build(ids, dates, citing, cited)
    if report.edges_dropped:
        raise AssertionError(
            f"internal error: generator produced {report.edges_dropped} "
            "invalid edges"
        )
    return net, targets
