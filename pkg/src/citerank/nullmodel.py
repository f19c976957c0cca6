"""Degree-preserving temporal randomization (dynamic configuration model).

The corpus timespan is cut into ``n_layers`` equal-duration layers; each
edge belongs to the layer containing its *citing* node's issue date. Within
every layer the randomizer redraws who-cites-whom by shuffling the cited
stubs while keeping each node's per-layer in- and out-degree increments
exactly as observed. Forbidden outcomes (self-citations, duplicate pairs,
edges whose cited node is issued after the citing node) are repaired by
random pairwise swaps with a bounded retry budget.

Because increments are preserved exactly, final citation counts -- and
therefore the age-rescaled citation scores -- are identical between the
original network and every realization; what changes is *which* nodes are
connected, which is exactly what PageRank-style metrics respond to.

Expected edge multiplicities under stub matching are

    E_ij(n) = dk_in(i, n) * dk_out(j, n) / E(n)

for cited i, citing j in layer n with E(n) edges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import CitationNetwork

__all__ = [
    "LayerDecomposition",
    "RewiringError",
    "build_layers",
    "expected_edges",
    "sample_randomized",
]


class RewiringError(RuntimeError):
    """Repair budget exhausted; names the offending layer."""

    def __init__(self, layer: int, remaining: int):
        self.layer = layer
        self.remaining = remaining
        super().__init__(
            f"layer {layer}: could not repair {remaining} forbidden edge(s) "
            f"within the swap budget"
        )


@dataclass
class LayerDecomposition:
    """Edge partition by citing-node issue date into equal-duration layers.

    ``edge_ptr[n]:edge_ptr[n+1]`` slices the parent's canonical edge arrays
    to layer ``n`` (edges are sorted by citing index, whose dates are
    non-decreasing, so layers are contiguous runs).
    """

    network: CitationNetwork
    n_layers: int
    edge_ptr: np.ndarray

    @property
    def span_days(self) -> int:
        return int(self.network.dates[-1] - self.network.dates[0])

    @property
    def layer_duration_days(self) -> float:
        return self.span_days / self.n_layers

    def layer_of_ordinal(self, ordinal: int) -> int:
        """Layer index for an issue date; the last boundary is inclusive."""
        first = int(self.network.dates[0])
        span = self.span_days
        if span == 0:
            return 0
        lay = (int(ordinal) - first) * self.n_layers // span
        return min(int(lay), self.n_layers - 1)

    def edge_count(self, n: int) -> int:
        return int(self.edge_ptr[n + 1] - self.edge_ptr[n])

    def edge_slice(self, n: int) -> slice:
        return slice(int(self.edge_ptr[n]), int(self.edge_ptr[n + 1]))

    def delta_in(self, n: int) -> np.ndarray:
        """Per-node in-degree increment within layer ``n``."""
        sl = self.edge_slice(n)
        return np.bincount(self.network.edge_cited[sl], minlength=self.network.n_nodes)

    def delta_out(self, n: int) -> np.ndarray:
        sl = self.edge_slice(n)
        return np.bincount(self.network.edge_citing[sl], minlength=self.network.n_nodes)


def build_layers(network: CitationNetwork, n_layers: int = 100) -> LayerDecomposition:
    """Partition the network's edges into ``n_layers`` equal-duration layers."""
    if n_layers < 1:
        raise ValueError("n_layers must be >= 1")
    if network.n_nodes == 0:
        raise ValueError("cannot layer an empty network")
    first = int(network.dates[0])
    span = int(network.dates[-1]) - first
    citing_dates = network.dates[network.edge_citing]
    if span == 0:
        layers = np.zeros(network.n_edges, dtype=np.int64)
    else:
        layers = (citing_dates.astype(np.int64) - first) * n_layers // span
        np.minimum(layers, n_layers - 1, out=layers)
    # edges are citing-sorted hence layer-sorted; locate the runs
    edge_ptr = np.searchsorted(layers, np.arange(n_layers + 1), side="left")
    return LayerDecomposition(network, n_layers, edge_ptr.astype(np.int64))


def expected_edges(layers: LayerDecomposition, cited: int, citing: int, n: int) -> float:
    """Expected multiplicity of (citing -> cited) in layer ``n`` under stub
    matching; 0 for empty layers."""
    e_n = layers.edge_count(n)
    if e_n == 0:
        return 0.0
    return float(layers.delta_in(n)[cited]) * float(layers.delta_out(n)[citing]) / e_n


def _scan_layer(dates, citing_seg, seg):
    """Classify every position of a layer as a legal edge or a forbidden one.

    Returns ``(pairs, valid, bad)``: the set of committed (citing, cited)
    pairs, a validity flag per position, and the list of forbidden positions.
    """
    pairs: set[tuple[int, int]] = set()
    valid = np.zeros(len(seg), dtype=bool)
    bad: list[int] = []
    for k in range(len(seg)):
        a, b = int(citing_seg[k]), int(seg[k])
        if a != b and dates[b] <= dates[a] and (a, b) not in pairs:
            pairs.add((a, b))
            valid[k] = True
        else:
            bad.append(k)
    return pairs, valid, bad


def _repair_layer(rng, dates, citing_seg, seg, budget: int) -> int:
    """Fix forbidden pairings in one layer by random pairwise stub swaps.

    ``seg`` (the cited stubs, already shuffled) is repaired in place against
    the fixed ``citing_seg``. Each proposal anchors at a random forbidden
    position and draws a random partner; the swap is committed only when both
    resulting edges are legal: no self-citation, no duplicate within the
    layer, cited node issued no later than the citing node. A position can be
    unswappable on its own even though the layer as a whole is fixable
    (repairing it takes a rotation through several positions), so after a
    long run of proposals with no commit the whole segment is reshuffled and
    repair starts over. Every proposal costs one unit of ``budget``. Returns
    the number of still-forbidden positions when the budget runs out (0 on
    success).
    """
    e_n = len(seg)
    pairs, valid, bad = _scan_layer(dates, citing_seg, seg)
    stall = 0
    stall_limit = 10 * e_n

    while bad:
        if budget <= 0:
            return sum(1 for x in bad if not valid[x])
        if stall >= stall_limit:
            rng.shuffle(seg)
            pairs, valid, bad = _scan_layer(dates, citing_seg, seg)
            stall = 0
            continue
        idx = int(rng.integers(0, len(bad)))
        k = bad[idx]
        if valid[k]:  # repaired earlier as the partner of a committed swap
            bad[idx] = bad[-1]
            bad.pop()
            continue
        budget -= 1
        stall += 1
        j = int(rng.integers(0, e_n))
        if j == k:
            continue
        a_cit, a_ced = int(citing_seg[k]), int(seg[j])
        b_cit, b_ced = int(citing_seg[j]), int(seg[k])
        if a_cit == a_ced or b_cit == b_ced:
            continue
        if dates[a_ced] > dates[a_cit] or dates[b_ced] > dates[b_cit]:
            continue
        pa, pb = (a_cit, a_ced), (b_cit, b_ced)
        if pa == pb:
            continue
        old_j = (b_cit, int(seg[j]))
        if valid[j]:
            pairs.discard(old_j)
        if pa in pairs or pb in pairs:
            if valid[j]:
                pairs.add(old_j)
            continue
        # commit the swap
        seg[k], seg[j] = seg[j], seg[k]
        pairs.add(pa)
        pairs.add(pb)
        valid[k] = True
        valid[j] = True
        bad[idx] = bad[-1]
        bad.pop()
        stall = 0
    return 0


def sample_randomized(
    network: CitationNetwork, n_layers: int = 100, seed: int | None = 0
) -> CitationNetwork:
    """One randomized realization preserving per-layer degree increments.

    Seeded with numpy's PCG64 (``default_rng(seed)``): the same seed always
    yields the same network. Layers with one edge or fewer are passed
    through untouched. Raises :class:`RewiringError` if a layer cannot be
    repaired within ``100 * E(n)`` swap attempts.
    """
    layers = build_layers(network, n_layers)
    rng = np.random.default_rng(seed)
    dates = network.dates
    new_cited = network.edge_cited.copy()
    citing_all = network.edge_citing

    for n in range(n_layers):
        sl = layers.edge_slice(n)
        e_n = sl.stop - sl.start
        if e_n <= 1:
            continue
        seg = new_cited[sl]
        rng.shuffle(seg)
        remaining = _repair_layer(rng, dates, citing_all[sl], seg, budget=100 * e_n)
        if remaining:
            raise RewiringError(n, remaining)

    result, report = CitationNetwork.build(
        list(network.node_ids), network.dates, citing_all, new_cited
    )
    if report.edges_dropped:
        raise AssertionError(
            f"internal error: randomization produced {report.edges_dropped} invalid edges"
        )
    return result
