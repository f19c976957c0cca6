"""Ranking metrics and the temporal evaluation harness.

Turns score vectors into rank vectors, measures how strongly a ranking
favors particular age groups, compares metrics through ranking ratios and
identification rates, and steps a network through time on a fixed snapshot
grid to trace how quickly each metric finds a designated set of target
nodes. A companion entry point compares the real network's curves against
randomized-network ensembles.
"""

from __future__ import annotations

import datetime as dt
import json
import os
import warnings
from dataclasses import dataclass, field

import numpy as np

from .centrality import PageRankConfig, ScoreVector, citation_count, pagerank
from .corpus import CitationNetwork
from .rescale import DeltaClampWarning, RescaleConfig, rescale

__all__ = [
    "RankVector",
    "BiasProfile",
    "RatioResult",
    "EvaluationReport",
    "NullComparison",
    "rank_nodes",
    "bias_profile",
    "ranking_ratio",
    "identification_rate",
    "temporal_evaluation",
    "null_comparison",
    "trajectory_export",
    "METRICS",
]

DAYS_PER_YEAR = 365.25
METRICS = ("c", "p", "R(c)", "R(p)")

TIE_RULE = "score desc, then chronological position, then node id"


@dataclass(eq=False)
class RankVector:
    """Per-node ranks 1..N (1 = best) for one metric on one view.

    Node indices are chronological positions, so the stable tie-break by
    index realizes "older first, then id" in one pass.
    """

    metric_name: str
    view_cutoff: dt.date
    ranks: np.ndarray
    tie_rule: str = TIE_RULE

    def __post_init__(self):
        arr = np.asarray(self.ranks, dtype=np.int64)
        try:
            arr.setflags(write=False)
        except ValueError:
            arr = arr.copy()
            arr.setflags(write=False)
        object.__setattr__(self, "ranks", arr)

    def __len__(self) -> int:
        return len(self.ranks)


def rank_nodes(scores: ScoreVector) -> RankVector:
    """Rank nodes by descending score; ties go to the chronologically older
    node (then smaller id), which is exactly ascending node index."""
    s = scores.scores
    order = np.argsort(-s, kind="stable")
    ranks = np.empty(len(s), dtype=np.int64)
    ranks[order] = np.arange(1, len(s) + 1)
    return RankVector(scores.metric_name, scores.view_cutoff, ranks)


def _top_cutoff(fraction: float, n: int) -> int:
    """Number of top slots for a fraction of n: round half to even, min 1."""
    return max(1, int(np.rint(fraction * n)))


@dataclass(eq=False)
class BiasProfile:
    """How the top-``f`` fraction of a ranking spreads over node age.

    Nodes are split by chronological position into ``n_groups`` equal-count
    groups (sizes differ by at most one, oldest group first). ``counts[g]``
    is how many of the top ``round(f*N)`` ranked nodes fall in group ``g``;
    an age-blind ranking would put about ``expected`` in each.
    """

    metric_name: str
    f: float
    counts: np.ndarray
    group_sizes: np.ndarray
    expected: float

    def __post_init__(self):
        for name in ("counts", "group_sizes"):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_groups(self) -> int:
        return len(self.counts)


def bias_profile(ranks: RankVector, f: float = 0.005,
                 n_groups: int = 40) -> BiasProfile:
    """Count top-``f`` nodes per age group (chronological equal-count split)."""
    if not 0.0 < f < 1.0:
        raise ValueError("f must be in (0, 1)")
    n = len(ranks)
    if n_groups < 1 or n_groups > max(n, 1):
        raise ValueError("n_groups must be in [1, n_nodes]")
    cutoff = _top_cutoff(f, n)
    in_top = ranks.ranks <= cutoff
    groups = np.array_split(np.arange(n), n_groups)
    counts = np.array([int(in_top[g].sum()) for g in groups], dtype=np.int64)
    sizes = np.array([len(g) for g in groups], dtype=np.int64)
    return BiasProfile(ranks.metric_name, f, counts, sizes,
                       expected=f * n / n_groups)


@dataclass(eq=False)
class RatioResult:
    """Per-target ranking ratios and their per-metric averages.

    ``ratios[m][j]`` is rank(target j under m) divided by the best rank of
    target j under any metric, so each target's minimum across metrics is
    exactly 1. Targets outside the ranked view (or explicitly excluded) do
    not contribute; ``n_absent`` reports how many were dropped for being
    absent.
    """

    metrics: tuple
    targets: np.ndarray
    ratios: dict
    averages: dict
    n_absent: int
    n_excluded: int


def ranking_ratio(rank_vectors: dict, targets, exclude=()) -> RatioResult:
    """Ranking ratios of targets across metrics.

    ``rank_vectors`` maps metric name to a RankVector over the same view.
    ``exclude`` drops specific node indices up front (robustness reruns
    without outliers); targets beyond the view are skipped and counted.
    """
    if not rank_vectors:
        raise ValueError("need at least one metric")
    names = tuple(rank_vectors)
    n = len(rank_vectors[names[0]])
    for name in names:
        if len(rank_vectors[name]) != n:
            raise ValueError("rank vectors cover different views")
    tgt = np.unique(np.asarray(list(targets), dtype=np.int64))
    if len(tgt) and tgt[0] < 0:
        raise IndexError("negative target index")
    excl = np.asarray(sorted(set(int(e) for e in exclude)), dtype=np.int64)
    kept = tgt[~np.isin(tgt, excl)]
    n_excluded = int(len(tgt) - len(kept))
    present = kept[kept < n]
    n_absent = int(len(kept) - len(present))
    rank_rows = {m: rank_vectors[m].ranks[present] for m in names}
    if len(present):
        best = np.minimum.reduce([rank_rows[m] for m in names])
    else:
        best = np.empty(0, dtype=np.int64)
    ratios = {m: rank_rows[m] / best if len(present) else np.empty(0)
              for m in names}
    averages = {m: (float(ratios[m].mean()) if len(present) else None)
                for m in names}
    return RatioResult(names, present, ratios, averages, n_absent, n_excluded)


def identification_rate(ranks: RankVector, targets, z: float):
    """Fraction of in-view targets ranked in the top round(z*N) (min 1).

    Returns ``None`` when no target is in the view (empty-result marker).
    """
    if not 0.0 < z < 1.0:
        raise ValueError("z must be in (0, 1)")
    n = len(ranks)
    tgt = np.unique(np.asarray(list(targets), dtype=np.int64))
    present = tgt[(tgt >= 0) & (tgt < n)]
    if len(present) == 0:
        return None
    cutoff = _top_cutoff(z, n)
    return float(np.mean(ranks.ranks[present] <= cutoff))


# ------------------------------------------------------------------ harness


def _cohort(network: CitationNetwork, targets, min_target_age_years: float):
    """Target indices old enough at corpus end, in ascending order."""
    if network.n_nodes == 0:
        raise ValueError("network is empty")
    tgt = np.unique(np.asarray(list(targets), dtype=np.int64))
    if len(tgt) and (tgt[0] < 0 or tgt[-1] >= network.n_nodes):
        raise IndexError("target index out of range")
    last = int(network.dates[-1])
    age_years = (last - network.dates[tgt]) / DAYS_PER_YEAR
    return tgt[age_years >= min_target_age_years]


def _snapshot_ranks(network: CitationNetwork, cadence_months: float,
                    pagerank_config: PageRankConfig,
                    rescale_config: RescaleConfig):
    """Yield ``(cutoff_ordinal, view, {metric: RankVector})`` on the grid.

    The grid starts at the first issue date, advances by
    ``cadence_months * 365.25 / 12`` days, and runs one step past the last
    issue date so the final view always contains the whole network. Views
    with no nodes (the t=first snapshot) are skipped. Shrunken-window
    warnings from rescaling small early snapshots are routine here and are
    suppressed.
    """
    step = cadence_months * DAYS_PER_YEAR / 12.0
    first = int(network.dates[0])
    last = int(network.dates[-1])
    k = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeltaClampWarning)
        while True:
            t = first + int(np.rint(k * step))
            k += 1
            view = network.snapshot(dt.date.fromordinal(t))
            if view.n_nodes == 0:
                if t > last:
                    return
                continue
            c = citation_count(view)
            p, _ = pagerank(view, pagerank_config)
            ranks = {
                "c": rank_nodes(c),
                "p": rank_nodes(p),
                "R(c)": rank_nodes(rescale(c, rescale_config)),
                "R(p)": rank_nodes(rescale(p, rescale_config)),
            }
            yield t, view, ranks
            if t > last:
                return


@dataclass
class EvaluationReport:
    """Aggregated temporal-evaluation curves.

    For every metric and target-age bin (bins are one snapshot cadence
    wide): the average ranking ratio, the identification rate, and the
    number of (target, snapshot) contributions. ``cohort_size`` is the
    number of targets old enough at corpus end to enter the evaluation.
    """

    metrics: tuple
    cadence_months: float
    step_days: float
    z: float
    min_target_age_years: float
    cited_only: bool
    cohort_size: int
    n_snapshots: int
    ratio_avg: dict = field(default_factory=dict)
    ident_rate: dict = field(default_factory=dict)
    bin_counts: dict = field(default_factory=dict)

    @property
    def bins(self) -> list:
        return sorted(self.bin_counts)

    def bin_years(self, b: int) -> float:
        """Lower edge of age bin ``b`` in years."""
        return b * self.step_days / DAYS_PER_YEAR

    def config_key(self) -> tuple:
        return (self.metrics, self.cadence_months, self.z,
                self.min_target_age_years, self.cited_only, self.cohort_size)

    def to_dict(self) -> dict:
        return {
            "metrics": list(self.metrics),
            "cadence_months": self.cadence_months,
            "step_days": self.step_days,
            "z": self.z,
            "min_target_age_years": self.min_target_age_years,
            "cited_only": self.cited_only,
            "cohort_size": self.cohort_size,
            "n_snapshots": self.n_snapshots,
            "bins": {
                str(b): {
                    "age_years": self.bin_years(b),
                    "n_targets": self.bin_counts[b],
                    "avg_ranking_ratio": {m: self.ratio_avg[m][b]
                                          for m in self.metrics},
                    "identification_rate": {m: self.ident_rate[m][b]
                                            for m in self.metrics},
                }
                for b in self.bins
            },
        }

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True, indent=2)
            fh.write("\n")

    def write_csv(self, path) -> None:
        """Tidy per-(metric, bin) rows for plotting."""
        lines = ["metric,age_bin_years,avg_ranking_ratio,identification_rate,"
                 "n_targets"]
        for m in self.metrics:
            for b in self.bins:
                lines.append(
                    f"{m},{self.bin_years(b)!r},{self.ratio_avg[m][b]!r},"
                    f"{self.ident_rate[m][b]!r},{self.bin_counts[b]}"
                )
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


def temporal_evaluation(network: CitationNetwork, targets, *,
                        cadence_months: float = 6.0, z: float = 0.005,
                        min_target_age_years: float = 0.0,
                        cited_only: bool = False,
                        pagerank_config: PageRankConfig | None = None,
                        rescale_config: RescaleConfig | None = None,
                        ) -> EvaluationReport:
    """Step through snapshots and trace how each metric treats the targets.

    At every grid snapshot, all four metrics are computed and ranked on the
    view; each cohort target already issued contributes its ranking ratio
    and top-z membership to the age bin ``floor((t - t_i) / step)``. With
    ``cited_only`` a target contributes only once it has at least one
    citation in the view. The cohort is fixed up front: targets at least
    ``min_target_age_years`` old at the end of the corpus.
    """
    if cadence_months <= 0:
        raise ValueError("cadence_months must be positive")
    if not 0.0 < z < 1.0:
        raise ValueError("z must be in (0, 1)")
    pr_cfg = pagerank_config or PageRankConfig()
    rs_cfg = rescale_config or RescaleConfig()
    cohort = _cohort(network, targets, min_target_age_years)
    step = cadence_months * DAYS_PER_YEAR / 12.0
    dates = network.dates

    ratio_sum = {m: {} for m in METRICS}
    hit_sum = {m: {} for m in METRICS}
    bin_counts = {}
    n_snapshots = 0
    for t, view, ranks in _snapshot_ranks(network, cadence_months,
                                          pr_cfg, rs_cfg):
        n_snapshots += 1
        n_t = view.n_nodes
        present = cohort[cohort < n_t]
        if cited_only and len(present):
            present = present[view.in_degrees[present] > 0]
        if len(present) == 0:
            continue
        cutoff = _top_cutoff(z, n_t)
        rows = {m: ranks[m].ranks[present] for m in METRICS}
        best = np.minimum.reduce([rows[m] for m in METRICS])
        bins = np.floor((t - dates[present]) / step).astype(np.int64)
        for j in range(len(present)):
            b = int(bins[j])
            bin_counts[b] = bin_counts.get(b, 0) + 1
            for m in METRICS:
                ratio_sum[m][b] = ratio_sum[m].get(b, 0.0) + rows[m][j] / best[j]
                hit_sum[m][b] = hit_sum[m].get(b, 0) + int(rows[m][j] <= cutoff)

    report = EvaluationReport(
        metrics=METRICS, cadence_months=float(cadence_months),
        step_days=step, z=float(z),
        min_target_age_years=float(min_target_age_years),
        cited_only=bool(cited_only), cohort_size=int(len(cohort)),
        n_snapshots=n_snapshots,
    )
    report.bin_counts = dict(sorted(bin_counts.items()))
    for m in METRICS:
        report.ratio_avg[m] = {b: float(ratio_sum[m][b] / bin_counts[b])
                               for b in report.bin_counts}
        report.ident_rate[m] = {b: float(hit_sum[m][b] / bin_counts[b])
                                for b in report.bin_counts}
    return report


@dataclass
class NullComparison:
    """Real-minus-randomized difference curves with ensemble standard errors.

    One row per (metric, age bin): the difference of the average ranking
    ratio and of the identification rate between the real report and the
    ensemble mean, each with the standard error of the ensemble mean
    (``std(ddof=1)/sqrt(R)``; 0 when the ensemble has one member). Bins
    present in every report are compared.
    """

    metrics: tuple
    n_realizations: int
    rows: list  # (metric, bin, age_years, d_ratio, se_ratio, d_rate, se_rate)

    def write_csv(self, path) -> None:
        lines = ["metric,age_bin_years,diff_ranking_ratio,se_ranking_ratio,"
                 "diff_identification_rate,se_identification_rate"]
        for (m, _b, years, d_ratio, se_ratio, d_rate, se_rate) in self.rows:
            lines.append(f"{m},{years!r},{d_ratio!r},{se_ratio!r},"
                         f"{d_rate!r},{se_rate!r}")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


def null_comparison(report_real: EvaluationReport,
                    reports_random: list) -> NullComparison:
    """Compare a real-network report against randomized-network reports."""
    if not reports_random:
        raise ValueError("need at least one randomized report")
    for rep in reports_random:
        if rep.config_key() != report_real.config_key():
            raise ValueError("reports were produced with different settings")
    common = set(report_real.bin_counts)
    for rep in reports_random:
        common &= set(rep.bin_counts)
    r = len(reports_random)
    rows = []
    for m in report_real.metrics:
        for b in sorted(common):
            ratios = np.array([rep.ratio_avg[m][b] for rep in reports_random])
            rates = np.array([rep.ident_rate[m][b] for rep in reports_random])
            d_ratio = report_real.ratio_avg[m][b] - float(ratios.mean())
            d_rate = report_real.ident_rate[m][b] - float(rates.mean())
            se_ratio = float(ratios.std(ddof=1) / np.sqrt(r)) if r >= 2 else 0.0
            se_rate = float(rates.std(ddof=1) / np.sqrt(r)) if r >= 2 else 0.0
            rows.append((m, b, report_real.bin_years(b),
                         d_ratio, se_ratio, d_rate, se_rate))
    return NullComparison(report_real.metrics, r, rows)


def trajectory_export(network: CitationNetwork, targets, out_dir, *,
                      cadence_months: float = 6.0,
                      min_target_age_years: float = 0.0,
                      pagerank_config: PageRankConfig | None = None,
                      rescale_config: RescaleConfig | None = None) -> list:
    """Write one normalized-rank time series CSV per cohort target.

    Rows are snapshots where the target exists; metric columns hold the
    normalized rank r/N(t), and ``uncited`` flags snapshots where the
    target has no citations yet (consumers conventionally drop those
    points). Returns the written paths. Rankings come from the same
    snapshot iterator as :func:`temporal_evaluation`, so the two can never
    disagree.
    """
    pr_cfg = pagerank_config or PageRankConfig()
    rs_cfg = rescale_config or RescaleConfig()
    cohort = _cohort(network, targets, min_target_age_years)
    dates = network.dates
    series = {int(i): [] for i in cohort}
    for t, view, ranks in _snapshot_ranks(network, cadence_months,
                                          pr_cfg, rs_cfg):
        n_t = view.n_nodes
        present = cohort[cohort < n_t]
        for i in present.tolist():
            age = (t - int(dates[i])) / DAYS_PER_YEAR
            uncited = int(view.in_degrees[i] == 0)
            norm = [float(ranks[m].ranks[i] / n_t) for m in METRICS]
            series[i].append((dt.date.fromordinal(t), age, n_t, uncited, norm))

    paths = []
    os.makedirs(out_dir, exist_ok=True)
    for i in cohort.tolist():
        node = network.node_ids[i]
        path = os.path.join(out_dir, f"trajectory_{node}.csv")
        lines = ["snapshot_date,age_years,n_nodes,uncited,"
                 + ",".join(METRICS)]
        for day, age, n_t, uncited, norm in series[i]:
            vals = ",".join(repr(v) for v in norm)
            lines.append(f"{day.isoformat()},{age!r},{n_t},{uncited},{vals}")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        paths.append(path)
    return paths
