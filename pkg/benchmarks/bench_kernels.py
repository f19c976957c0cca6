#!/usr/bin/env python3
"""Time the compiled kernels against the NumPy fallback.

Runs the two hot paths (PageRank power iteration, sliding window moments)
on synthetic inputs of a few sizes with both backends and prints a timing
table. Every row times the same public entry point the library uses, so
numbers include argument marshalling.

    python3 benchmarks/bench_kernels.py            # full sizes
    python3 benchmarks/bench_kernels.py --quick    # ~5x smaller, for CI
"""

import argparse
import time

import numpy as np

from citerank import kernels
from citerank.centrality import pagerank
from citerank.corpus import CitationNetwork

BASE_DATE = 693596  # 1900-01-01, one node issued per day


def random_citation_graph(rng, n, mu=8.0):
    """Uniform random growing DAG: node j cites ~Poisson(mu) earlier nodes."""
    quota = np.minimum(rng.poisson(mu, size=n), np.arange(n))
    citing = np.repeat(np.arange(n, dtype=np.int64), quota)
    cited = (rng.random(citing.size) * citing).astype(np.int64)
    ids = [str(i) for i in range(n)]
    net, _ = CitationNetwork.build(ids, BASE_DATE + np.arange(n), citing, cited)
    return net


def best_of(fn, repeats=3):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def bench_pagerank(rng, sizes, backends, rows):
    for n in sizes:
        view = random_citation_graph(rng, n).full_view()
        timings = {}
        for b in backends:
            pagerank(view, backend=b)  # warm up
            timings[b] = best_of(lambda: pagerank(view, backend=b))
        rows.append(("pagerank", f"N={n:,} E={view.n_edges:,}", timings))


def bench_sliding_moments(rng, sizes, backends, rows):
    for n, window in sizes:
        values = rng.poisson(3.0, size=n).astype(float)
        timings = {}
        for b in backends:
            kernels.sliding_moments(values, window, backend=b)  # warm up
            timings[b] = best_of(
                lambda: kernels.sliding_moments(values, window, backend=b),
                repeats=5,
            )
        rows.append(("sliding_moments", f"n={n:,} m={window:,}", timings))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--quick", action="store_true",
                        help="smaller inputs (roughly 5x faster)")
    args = parser.parse_args()

    backends = kernels.available_backends()
    if "native" not in backends:
        print("note: compiled extension not available; timing pure only")

    rng = np.random.default_rng(7)
    pr_sizes = (20_000, 100_000) if args.quick else (20_000, 200_000)
    sm_sizes = ((100_000, 1001), (200_000, 15_000)) if args.quick else (
        (100_000, 1001), (1_000_000, 1001), (1_000_000, 15_000))

    rows = []
    bench_pagerank(rng, pr_sizes, backends, rows)
    bench_sliding_moments(rng, sm_sizes, backends, rows)

    header = f"{'kernel':<17}{'input':<26}{'native':>10}{'pure':>10}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for kernel, label, timings in rows:
        native = timings.get("native")
        pure = timings.get("pure")
        native_ms = f"{native * 1e3:.1f}ms" if native is not None else "-"
        ratio = f"{pure / native:.1f}x" if native else ""
        print(f"{kernel:<17}{label:<26}{native_ms:>10}{pure * 1e3:>8.1f}ms{ratio:>9}")


if __name__ == "__main__":
    main()
