"""Command-line interface: corpus files in, scores/reports/corpora out.

Every command stages its outputs in a temporary directory inside the output
directory and promotes them with ``os.replace`` only after the whole command
has succeeded, so an interrupted run never leaves partial outputs behind.
Each command also writes a ``<command>_manifest.json`` recording the full
parameter set, SHA-256 hashes of the input files, and the output names; the
manifest carries no timestamps, so rerunning with identical inputs and
configuration reproduces it byte for byte.
"""

from __future__ import annotations

import argparse
import datetime as dt
import hashlib
import json
import os
import shutil
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .centrality import (
    PageRankConfig,
    PageRankConvergenceError,
    citation_count,
    pagerank,
    score_order,
    write_scores_csv,
)
from .corpus import load_corpus, write_corpus
from .evaluate import null_comparison, temporal_evaluation
from .netstats import (
    citation_timing,
    degree_histogram,
    mean_citation_count,
    neighbor_indegree_profile,
    write_curve_csv,
)
from .nullmodel import RewiringError, sample_randomized
from .rescale import RescaleConfig, rescale
from .synth import SynthConfig, generate

__all__ = ["RunConfig", "build_parser", "main"]

METRIC_SLUGS = {"c": "c", "p": "p", "R(c)": "Rc", "R(p)": "Rp"}
TIMING_KS = (1, 2, 3, 5, 10)


@dataclass(frozen=True)
class RunConfig:
    """Everything a command run depends on besides the input file bytes."""

    nodes: str | None = None
    edges: str | None = None
    targets: str | None = None
    out_dir: str = "."
    alpha: float = 0.5
    epsilon: float = 1e-9
    delta: int = 15000
    layers: int = 100
    realizations: int = 12
    cadence_months: float = 6.0
    z: float = 0.005
    f: float = 0.005
    min_target_age: float = 20.0
    seed: int = 0
    exclude: tuple = ()
    threads: int | None = None

    def pagerank_config(self) -> PageRankConfig:
        return PageRankConfig(alpha=self.alpha, epsilon=self.epsilon)

    def rescale_config(self) -> RescaleConfig:
        return RescaleConfig(delta=self.delta)


_DEFAULTS = RunConfig()


class _Stage:
    """Output files collected in a temp dir, promoted together on success."""

    def __init__(self, out_dir):
        self.out_dir = out_dir
        os.makedirs(out_dir, exist_ok=True)
        self.tmp = tempfile.mkdtemp(prefix=".stage-", dir=out_dir)
        self.names = []

    def path(self, name: str) -> str:
        self.names.append(name)
        return os.path.join(self.tmp, name)

    def promote(self) -> None:
        for name in self.names:
            os.replace(os.path.join(self.tmp, name),
                       os.path.join(self.out_dir, name))
        os.rmdir(self.tmp)

    def discard(self) -> None:
        shutil.rmtree(self.tmp, ignore_errors=True)


@contextmanager
def _staged(out_dir):
    stage = _Stage(out_dir)
    try:
        yield stage
    except BaseException:
        stage.discard()
        raise
    stage.promote()


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(stage: _Stage, command: str, config: RunConfig,
                    inputs: dict, summary: dict) -> str:
    name = f"{command}_manifest.json"
    manifest = {
        "command": command,
        "package_version": __version__,
        "parameters": asdict(config),
        "inputs": {key: {"path": str(p), "sha256": _sha256(p)}
                   for key, p in inputs.items()},
        "outputs": sorted(stage.names + [name]),
        "summary": summary,
    }
    with open(stage.path(name), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return name


def _require(config: RunConfig, *fields):
    for field_name in fields:
        if getattr(config, field_name) is None:
            raise ValueError(f"--{field_name} is required for this command")


def _load_network(config: RunConfig):
    _require(config, "nodes", "edges")
    return load_corpus(config.nodes, config.edges)


def _read_target_ids(path) -> list:
    """One node id per line; blank lines and #-comments are skipped."""
    ids = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            token = line.strip()
            if token and not token.startswith("#"):
                ids.append(token)
    return ids


def _target_indices(network, target_ids, exclude_ids):
    """Map ids to chrono indices, dropping excluded and unknown ids."""
    excluded = set(exclude_ids)
    indices = []
    missing = 0
    for node_id in target_ids:
        if node_id in excluded:
            continue
        try:
            indices.append(network.index_of(node_id))
        except KeyError:
            missing += 1
    return np.unique(np.asarray(indices, dtype=np.int64)), missing


def _full_scores(network, config: RunConfig):
    """The four score vectors on the full network, keyed by metric name."""
    view = network.full_view()
    c = citation_count(view)
    p, iterations = pagerank(view, config.pagerank_config())
    rs = config.rescale_config()
    scores = {"c": c, "p": p, "R(c)": rescale(c, rs), "R(p)": rescale(p, rs)}
    return view, scores, iterations


def cmd_score(config: RunConfig, args) -> None:
    network, report = _load_network(config)
    view, scores, iterations = _full_scores(network, config)
    with _staged(config.out_dir) as stage:
        for name, vec in scores.items():
            write_scores_csv(vec, view, stage.path(f"scores_{METRIC_SLUGS[name]}.csv"))
        summary = {
            "n_nodes": network.n_nodes,
            "n_edges": network.n_edges,
            "pagerank_iterations": iterations,
            "ingestion": report.to_dict(),
        }
        _write_manifest(stage, "score", config,
                        {"nodes": config.nodes, "edges": config.edges}, summary)
    print(f"score: {network.n_nodes} nodes, {network.n_edges} edges; "
          f"pagerank converged in {iterations} iterations")
    print(f"score: wrote {len(stage.names)} files to {config.out_dir}")


def cmd_top(config: RunConfig, args) -> None:
    network, _ = _load_network(config)
    view, scores, _ = _full_scores(network, config)
    metric = args.metric
    vec = scores[metric]
    order = score_order(vec)[: max(0, args.k)]
    indegree = view.in_degrees
    ids = network.node_ids

    rows = []
    for rank, i in enumerate(order, start=1):
        rows.append((rank, ids[i], network.date_of(int(i)).isoformat(),
                     int(indegree[i]), float(vec.scores[i])))

    slug = METRIC_SLUGS[metric]
    with _staged(config.out_dir) as stage:
        lines = [f"rank,node_id,date,c,{slug}"]
        for rank, node_id, date, c, score in rows:
            lines.append(f"{rank},{node_id},{date},{c},{score!r}")
        with open(stage.path(f"top_{slug}.csv"), "w", encoding="utf-8",
                  newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        _write_manifest(stage, "top", config,
                        {"nodes": config.nodes, "edges": config.edges},
                        {"metric": metric, "k": args.k, "listed": len(rows)})

    width = max([7] + [len(r[1]) for r in rows])
    print(f"{'rank':>5}  {'node_id':<{width}}  {'date':<10}  {'c':>8}  {metric}")
    for rank, node_id, date, c, score in rows:
        print(f"{rank:>5}  {node_id:<{width}}  {date}  {c:>8}  {score:.6g}")


def _evaluation_report(network, config: RunConfig):
    _require(config, "targets")
    target_ids = _read_target_ids(config.targets)
    indices, missing = _target_indices(network, target_ids, config.exclude)
    report = temporal_evaluation(
        network,
        indices,
        cadence_months=config.cadence_months,
        z=config.z,
        min_target_age_years=config.min_target_age,
        pagerank_config=config.pagerank_config(),
        rescale_config=config.rescale_config(),
    )
    counts = {
        "targets_listed": len(target_ids),
        "targets_matched": int(len(indices)),
        "targets_missing": missing,
        "cohort_size": report.cohort_size,
    }
    return report, indices, counts


def cmd_evaluate(config: RunConfig, args) -> None:
    network, _ = _load_network(config)
    report, _indices, counts = _evaluation_report(network, config)
    with _staged(config.out_dir) as stage:
        report.write_json(stage.path("evaluation.json"))
        report.write_csv(stage.path("evaluation.csv"))
        _write_manifest(stage, "evaluate", config,
                        {"nodes": config.nodes, "edges": config.edges,
                         "targets": config.targets}, counts)
    print(f"evaluate: {counts['targets_matched']} targets "
          f"({counts['targets_missing']} missing), cohort of "
          f"{counts['cohort_size']} after the age filter, "
          f"{report.n_snapshots} snapshots")


def cmd_nullmodel(config: RunConfig, args) -> None:
    network, _ = _load_network(config)
    report_real, indices, counts = _evaluation_report(network, config)
    if config.realizations < 1:
        raise ValueError("--realizations must be >= 1")

    def one(i: int):
        randomized = sample_randomized(network, n_layers=config.layers,
                                       seed=config.seed + i)
        rep = temporal_evaluation(
            randomized,
            indices,
            cadence_months=config.cadence_months,
            z=config.z,
            min_target_age_years=config.min_target_age,
            pagerank_config=config.pagerank_config(),
            rescale_config=config.rescale_config(),
        )
        return randomized, rep

    workers = config.threads or 1
    with _staged(config.out_dir) as stage:
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(one, range(config.realizations)))
        else:
            results = [one(i) for i in range(config.realizations)]
        reports_random = []
        for i, (randomized, rep) in enumerate(results):
            write_corpus(randomized, stage.path(f"null_{i:03d}_nodes.tsv"),
                         stage.path(f"null_{i:03d}_edges.tsv"))
            rep.write_json(stage.path(f"null_{i:03d}_evaluation.json"))
            reports_random.append(rep)
        report_real.write_json(stage.path("evaluation.json"))
        report_real.write_csv(stage.path("evaluation.csv"))
        diff = null_comparison(report_real, reports_random)
        diff.write_csv(stage.path("null_comparison.csv"))
        counts["realizations"] = config.realizations
        _write_manifest(stage, "nullmodel", config,
                        {"nodes": config.nodes, "edges": config.edges,
                         "targets": config.targets}, counts)
    print(f"nullmodel: {config.realizations} realization(s) with "
          f"{config.layers} layers; wrote {len(stage.names)} files to "
          f"{config.out_dir}")


def cmd_stats(config: RunConfig, args) -> None:
    network, _ = _load_network(config)
    view = network.full_view()

    subset = None
    inputs = {"nodes": config.nodes, "edges": config.edges}
    if config.targets is not None:
        target_ids = _read_target_ids(config.targets)
        subset, _missing = _target_indices(network, target_ids, config.exclude)
        inputs["targets"] = config.targets

    timing = {"all": [citation_timing(network, k).to_dict()
                      for k in TIMING_KS]}
    if subset is not None and len(subset):
        timing["targets"] = [citation_timing(network, k, subset=subset).to_dict()
                             for k in TIMING_KS]

    with _staged(config.out_dir) as stage:
        for direction in ("citing", "cited"):
            curve = neighbor_indegree_profile(view, direction=direction)
            write_curve_csv(curve, stage.path(f"curve_{direction}.csv"))
        for direction in ("in", "out"):
            hist = degree_histogram(view, direction)
            lines = ["degree,count"]
            lines += [f"{d},{int(count)}" for d, count in enumerate(hist)]
            with open(stage.path(f"degree_hist_{direction}.csv"), "w",
                      encoding="utf-8", newline="\n") as fh:
                fh.write("\n".join(lines) + "\n")
        with open(stage.path("timing.json"), "w", encoding="utf-8",
                  newline="\n") as fh:
            json.dump(timing, fh, sort_keys=True, indent=2)
            fh.write("\n")
        summary = {
            "n_nodes": network.n_nodes,
            "n_edges": network.n_edges,
            "mean_citation_count": float(mean_citation_count(view)),
        }
        _write_manifest(stage, "stats", config, inputs, summary)
    print(f"stats: wrote {len(stage.names)} files to {config.out_dir}")


def cmd_synth(config: RunConfig, args) -> None:
    synth_config = SynthConfig(
        n_nodes=args.n_nodes,
        mean_out_degree=args.mean_out_degree,
        attachment_exponent=args.attachment_exponent,
        decay_days=args.decay_days,
        n_targets=args.n_targets,
        fitness_multiplier=args.multiplier,
        seed=config.seed,
        start=args.start_date,
        step_days=args.step_days,
    )
    network, targets = generate(synth_config)
    with _staged(config.out_dir) as stage:
        write_corpus(network, stage.path("nodes.tsv"), stage.path("edges.tsv"))
        with open(stage.path("targets.txt"), "w", encoding="utf-8",
                  newline="\n") as fh:
            for i in targets:
                fh.write(network.node_ids[int(i)] + "\n")
        summary = {
            "n_nodes": network.n_nodes,
            "n_edges": network.n_edges,
            "n_targets": int(len(targets)),
            "generator": {
                "mean_out_degree": synth_config.mean_out_degree,
                "attachment_exponent": synth_config.attachment_exponent,
                "decay_days": synth_config.decay_days,
                "fitness_multiplier": synth_config.fitness_multiplier,
                "start": synth_config.start.isoformat(),
                "step_days": synth_config.step_days,
            },
        }
        _write_manifest(stage, "synth", config, {}, summary)
    print(f"synth: {network.n_nodes} nodes, {network.n_edges} edges, "
          f"{len(targets)} targets -> {config.out_dir}")


_COMMANDS = {
    "score": cmd_score,
    "top": cmd_top,
    "evaluate": cmd_evaluate,
    "nullmodel": cmd_nullmodel,
    "stats": cmd_stats,
    "synth": cmd_synth,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="citerank",
        description="Temporal citation-network scoring and evaluation.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--nodes", help="node table (id<TAB>date)")
    common.add_argument("--edges", help="edge table (citing<TAB>cited)")
    common.add_argument("--targets", help="file with one target node id per line")
    common.add_argument("--out", help="output directory "
                        "(falls back to $CITERANK_OUT, then '.')")
    common.add_argument("--alpha", type=float, default=_DEFAULTS.alpha)
    common.add_argument("--epsilon", type=float, default=_DEFAULTS.epsilon)
    common.add_argument("--delta", type=int, default=_DEFAULTS.delta)
    common.add_argument("--layers", type=int, default=_DEFAULTS.layers)
    common.add_argument("--realizations", type=int,
                        default=_DEFAULTS.realizations)
    common.add_argument("--cadence-months", type=float,
                        default=_DEFAULTS.cadence_months)
    common.add_argument("--z", type=float, default=_DEFAULTS.z)
    common.add_argument("--f", type=float, default=_DEFAULTS.f)
    common.add_argument("--min-target-age", type=float,
                        default=_DEFAULTS.min_target_age)
    common.add_argument("--seed", type=int, default=_DEFAULTS.seed)
    common.add_argument("--exclude", action="append", default=[],
                        metavar="IDS", help="comma-separated node ids to "
                        "drop from the target list (repeatable)")
    common.add_argument("--threads", type=int, default=None,
                        help="worker-thread cap for ensemble commands")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("score", parents=[common],
                   help="write c, p, R(c), R(p) score CSVs")
    top = sub.add_parser("top", parents=[common],
                         help="print and write the top-k table for a metric")
    top.add_argument("metric", choices=sorted(METRIC_SLUGS))
    top.add_argument("-k", type=int, default=15)
    sub.add_parser("evaluate", parents=[common],
                   help="temporal target-identification report")
    sub.add_parser("nullmodel", parents=[common],
                   help="randomized ensemble plus difference curves")
    sub.add_parser("stats", parents=[common],
                   help="correlation curves, degree histograms, timing table")
    synth = sub.add_parser("synth", parents=[common],
                           help="write a synthetic corpus")
    synth.add_argument("--n-nodes", type=int, required=True)
    synth.add_argument("--mean-out-degree", type=float, default=3.0)
    synth.add_argument("--attachment-exponent", type=float, default=1.0)
    synth.add_argument("--decay-days", type=float, default=None)
    synth.add_argument("--n-targets", type=int, default=0)
    synth.add_argument("--multiplier", type=float, default=1.0)
    synth.add_argument("--step-days", type=int, default=1)
    synth.add_argument("--start-date", type=dt.date.fromisoformat,
                       default=dt.date(2000, 1, 1))
    return parser


def _config_from_args(args) -> RunConfig:
    out_dir = args.out or os.environ.get("CITERANK_OUT") or "."
    exclude = []
    for chunk in args.exclude:
        exclude.extend(tok for tok in chunk.split(",") if tok)
    return RunConfig(
        nodes=args.nodes,
        edges=args.edges,
        targets=args.targets,
        out_dir=out_dir,
        alpha=args.alpha,
        epsilon=args.epsilon,
        delta=args.delta,
        layers=args.layers,
        realizations=args.realizations,
        cadence_months=args.cadence_months,
        z=args.z,
        f=args.f,
        min_target_age=args.min_target_age,
        seed=args.seed,
        exclude=tuple(exclude),
        threads=args.threads,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = _config_from_args(args)
    try:
        _COMMANDS[args.command](config, args)
    except (ValueError, OSError, KeyError, PageRankConvergenceError,
            RewiringError) as exc:
        print(f"citerank: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
