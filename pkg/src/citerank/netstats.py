"""Descriptive statistics of citation networks.

Degree-degree correlation curves (mean in-degree of a node's neighbors as a
function of its own in-degree, in either direction), degree histograms, and
citation-timing statistics (how long a node takes to collect its first k
citations). Everything here is read-only analytics over immutable networks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .corpus import CitationNetwork, NetworkView

__all__ = [
    "CorrelationCurve",
    "TimingStats",
    "neighbor_indegree_profile",
    "ensemble_profile",
    "citation_timing",
    "degree_histogram",
    "mean_citation_count",
    "write_curve_csv",
    "write_timing_json",
]

DAYS_PER_YEAR = 365.25


@dataclass(eq=False)
class CorrelationCurve:
    """Mean neighbor in-degree vs own in-degree, raw and log-binned.

    ``direction`` states whose in-degree is averaged: "citing" looks at the
    nodes citing me, "cited" at the nodes I cite. Raw points carry one entry
    per distinct own-in-degree value; binned points use ``len(bin_lo)`` bins
    of equal width in log space. For a single network ``bin_count`` counts
    the nodes falling in each bin and ``bin_std`` is their population spread;
    for an ensemble (``n_realizations > 1``) the statistics are taken across
    realizations, ``bin_count`` counts the realizations contributing to the
    bin, and the raw arrays are empty.
    """

    direction: str
    raw_k: np.ndarray
    raw_mean: np.ndarray
    raw_count: np.ndarray
    bin_lo: np.ndarray
    bin_hi: np.ndarray
    bin_mean: np.ndarray
    bin_std: np.ndarray
    bin_count: np.ndarray
    n_realizations: int = 1

    def __post_init__(self):
        for name in ("raw_k", "raw_mean", "raw_count", "bin_lo", "bin_hi",
                     "bin_mean", "bin_std", "bin_count"):
            arr = np.asarray(getattr(self, name))
            try:
                arr.setflags(write=False)
            except ValueError:
                arr = arr.copy()
                arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_bins(self) -> int:
        return len(self.bin_lo)


@dataclass(frozen=True)
class TimingStats:
    """Mean time (in years) for a node to collect its first ``k`` citations.

    ``mean_years`` is ``None`` when no node qualifies (the empty-result
    marker); ``count`` is the number of qualifying nodes that entered the
    mean. ``subset_size`` records the size of the restriction, or ``None``
    when the whole network was eligible.
    """

    k: int
    mean_years: float | None
    count: int
    subset_size: int | None = None

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "mean_tau_years": self.mean_years,
            "n_nodes": self.count,
            "subset_size": self.subset_size,
        }


def _neighbor_means(view: NetworkView, direction: str):
    """Per-node (own in-degree, mean neighbor in-degree) for included nodes.

    Nodes with no neighbors in the requested direction are excluded, not
    counted as zero.
    """
    if direction not in ("citing", "cited"):
        raise ValueError("direction must be 'citing' or 'cited'")
    if view.n_nodes == 0:
        raise ValueError("view is empty")
    indeg = view.in_degrees
    citing = view.edge_citing
    cited = view.edge_cited
    if direction == "citing":
        # neighbors of i = the nodes citing i
        acc = np.bincount(cited, weights=indeg[citing].astype(np.float64),
                          minlength=view.n_nodes)
        deg = indeg
    else:
        # neighbors of i = the nodes i cites
        acc = np.bincount(citing, weights=indeg[cited].astype(np.float64),
                          minlength=view.n_nodes)
        deg = view.out_degrees
    has = deg > 0
    y = acc[has] / deg[has]
    x = indeg[has].astype(np.int64)
    return x, y


def _log_bin_edges(lo: int, hi: int, bins: int) -> np.ndarray:
    """``bins + 1`` edges, equal width in log space over [lo, hi]."""
    lo = max(1, int(lo))
    hi = max(lo, int(hi))
    if hi == lo:
        return np.full(bins + 1, float(lo))
    return np.exp(np.linspace(np.log(lo), np.log(hi), bins + 1))


def _assign_bins(x: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Bin index per x; in-degree 0 rides in the lowest bin, max in the last."""
    idx = np.searchsorted(edges, x, side="right") - 1
    return np.clip(idx, 0, len(edges) - 2)


def neighbor_indegree_profile(view: NetworkView, direction: str = "citing",
                              bins: int = 10) -> CorrelationCurve:
    """Degree-degree correlation curve of one network view.

    For every node with at least one neighbor in ``direction``, take the
    mean in-degree of those neighbors, then aggregate by the node's own
    in-degree: the raw curve averages over nodes sharing each in-degree
    value, and the binned curve averages over nodes falling in each of
    ``bins`` equal-log-width bins spanning the observed in-degree range
    (log bins start at 1; in-degree 0 lands in the lowest bin).
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    x, y = _neighbor_means(view, direction)
    if len(x) == 0:
        empty = np.array([], dtype=np.float64)
        return CorrelationCurve(direction, empty, empty, empty.astype(np.int64),
                                empty, empty, empty, empty,
                                np.array([], dtype=np.int64))

    raw_k, inv = np.unique(x, return_inverse=True)
    raw_count = np.bincount(inv)
    raw_mean = np.bincount(inv, weights=y) / raw_count

    edges = _log_bin_edges(x.min(), x.max(), bins)
    idx = _assign_bins(x, edges)
    count = np.bincount(idx, minlength=bins)
    total = np.bincount(idx, weights=y, minlength=bins)
    with np.errstate(invalid="ignore"):
        mean = np.where(count > 0, total / np.maximum(count, 1), np.nan)
        sq = np.bincount(idx, weights=y * y, minlength=bins)
        var = np.where(count > 0, sq / np.maximum(count, 1) - mean**2, np.nan)
    std = np.sqrt(np.clip(var, 0.0, None))
    return CorrelationCurve(direction, raw_k, raw_mean, raw_count,
                            edges[:-1].copy(), edges[1:].copy(),
                            mean, std, count)


def ensemble_profile(networks: list, direction: str = "citing",
                     bins: int = 10) -> CorrelationCurve:
    """Correlation curve aggregated over an ensemble of realizations.

    All networks must share the same node set (ids and dates). Bin edges are
    computed once from the combined in-degree range; per bin the mean and
    standard deviation are taken across the realizations that populate it.
    """
    if len(networks) < 2:
        raise ValueError("an ensemble needs at least two networks")
    ref = networks[0]
    for net in networks[1:]:
        if list(net.node_ids) != list(ref.node_ids) or not np.array_equal(
                net.dates, ref.dates):
            raise ValueError("ensemble networks have inconsistent node sets")

    per_net = [_neighbor_means(net.full_view(), direction) for net in networks]
    lo = min((x.min() for x, _ in per_net if len(x)), default=1)
    hi = max((x.max() for x, _ in per_net if len(x)), default=1)
    edges = _log_bin_edges(lo, hi, bins)

    rows = np.full((len(networks), bins), np.nan)
    for r, (x, y) in enumerate(per_net):
        if len(x) == 0:
            continue
        idx = _assign_bins(x, edges)
        count = np.bincount(idx, minlength=bins)
        total = np.bincount(idx, weights=y, minlength=bins)
        rows[r] = np.where(count > 0, total / np.maximum(count, 1), np.nan)

    filled = ~np.isnan(rows)
    count = filled.sum(axis=0)
    with np.errstate(invalid="ignore"):
        mean = np.where(count > 0, np.nansum(rows, axis=0) / np.maximum(count, 1),
                        np.nan)
        dev = np.where(filled, rows - mean, 0.0)
        var = np.where(count > 0, (dev * dev).sum(axis=0) / np.maximum(count, 1),
                       np.nan)
        # identical contributions have zero spread exactly, not rounding dust
        flat = np.nanmax(np.where(filled, rows, -np.inf), axis=0) == np.nanmin(
            np.where(filled, rows, np.inf), axis=0)
        var = np.where(flat & (count > 0), 0.0, var)
    std = np.sqrt(np.clip(var, 0.0, None))
    empty = np.array([], dtype=np.float64)
    return CorrelationCurve(direction, empty, empty,
                            np.array([], dtype=np.int64),
                            edges[:-1].copy(), edges[1:].copy(),
                            mean, std, count.astype(np.int64),
                            n_realizations=len(networks))


def citation_timing(network: CitationNetwork, k: int,
                    subset=None) -> TimingStats:
    """Mean years for nodes with final in-degree >= k to get k citations.

    The k-th citation arrives with the issue date of the k-th citing node in
    (citing date, citing id) order. With ``subset`` (node indices), only
    those nodes are eligible; nodes below the threshold never enter the mean.
    No qualifying node yields ``mean_years=None`` rather than an error.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    indeg = network.in_degrees
    eligible = np.flatnonzero(indeg >= k)
    subset_size = None
    if subset is not None:
        sub = np.unique(np.asarray(list(subset), dtype=np.int64))
        if len(sub) and (sub[0] < 0 or sub[-1] >= network.n_nodes):
            raise IndexError("subset index out of range")
        subset_size = int(len(sub))
        eligible = np.intersect1d(eligible, sub, assume_unique=True)
    if len(eligible) == 0:
        return TimingStats(k=k, mean_years=None, count=0,
                           subset_size=subset_size)
    # in-lists are sorted by citing index, i.e. chronologically with id
    # tie-break, so the k-th citer sits at offset k-1
    kth = network.in_indices[network.in_indptr[eligible] + (k - 1)]
    tau_days = network.dates[kth] - network.dates[eligible]
    mean_years = float(tau_days.mean() / DAYS_PER_YEAR)
    return TimingStats(k=k, mean_years=mean_years, count=int(len(eligible)),
                       subset_size=subset_size)


def degree_histogram(view: NetworkView, direction: str = "in") -> np.ndarray:
    """Node counts per degree value: ``hist[d]`` nodes have degree ``d``."""
    if direction == "in":
        deg = view.in_degrees
    elif direction == "out":
        deg = view.out_degrees
    else:
        raise ValueError("direction must be 'in' or 'out'")
    if len(deg) == 0:
        return np.zeros(1, dtype=np.int64)
    return np.bincount(deg).astype(np.int64)


def mean_citation_count(view: NetworkView, subset=None) -> float:
    """Mean in-degree over all nodes, or over ``subset`` (node indices)."""
    indeg = view.in_degrees
    if subset is not None:
        sub = np.asarray(list(subset), dtype=np.int64)
        if len(sub) == 0:
            raise ValueError("subset is empty")
        if sub.min() < 0 or sub.max() >= view.n_nodes:
            raise IndexError("subset index out of range")
        indeg = indeg[sub]
    if len(indeg) == 0:
        raise ValueError("view is empty")
    return float(indeg.mean())


def write_curve_csv(curve: CorrelationCurve, path) -> None:
    """Export the binned curve as ``bin_lo,bin_hi,mean,std,count`` CSV."""
    lines = ["bin_lo,bin_hi,mean,std,count"]
    for b in range(curve.n_bins):
        lines.append(
            f"{curve.bin_lo[b].item()!r},{curve.bin_hi[b].item()!r},"
            f"{curve.bin_mean[b].item()!r},{curve.bin_std[b].item()!r},"
            f"{int(curve.bin_count[b])}"
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_timing_json(stats: TimingStats, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(stats.to_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")
