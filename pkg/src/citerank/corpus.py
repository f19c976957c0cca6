"""Timestamped citation networks: ingestion, validation, snapshots.

A corpus is a directed graph whose nodes carry day-resolution issue dates and
whose edges run citing -> cited. Nodes are stored internally in chronological
order (issue date ascending, ties broken by node id), so a node's integer
index doubles as its chronological position. Because validation guarantees
``date(citing) >= date(cited)``, the set of nodes issued strictly before a
cutoff is an index prefix ``[0, K)`` and the induced edge set is exactly the
edges whose citing index is ``< K`` -- snapshots are therefore O(log N)
bookkeeping over shared arrays, never copies.
"""

from __future__ import annotations

import datetime as dt
import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "CorpusFormatError",
    "IngestionReport",
    "CitationNetwork",
    "NetworkView",
    "load_corpus",
    "write_corpus",
    "read_id_list",
    "snapshot",
]


class CorpusFormatError(ValueError):
    """A structurally invalid input line. Carries file path and line number."""

    def __init__(self, path, line_no: int, message: str):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


@dataclass
class IngestionReport:
    """Counts of what ingestion kept and what it dropped, by reason.

    An edge that violates several rules is counted once, under the first
    matching reason in the order: unknown endpoint, self-citation,
    time violation (citing issued before cited), duplicate.
    """

    nodes_loaded: int = 0
    edges_kept: int = 0
    dropped_unknown_endpoint: int = 0
    dropped_self_citation: int = 0
    dropped_time_violation: int = 0
    dropped_duplicate: int = 0

    @property
    def edges_dropped(self) -> int:
        return (
            self.dropped_unknown_endpoint
            + self.dropped_self_citation
            + self.dropped_time_violation
            + self.dropped_duplicate
        )

    def to_dict(self) -> dict:
        return {
            "nodes_loaded": self.nodes_loaded,
            "edges_kept": self.edges_kept,
            "edges_dropped": self.edges_dropped,
            "dropped_unknown_endpoint": self.dropped_unknown_endpoint,
            "dropped_self_citation": self.dropped_self_citation,
            "dropped_time_violation": self.dropped_time_violation,
            "dropped_duplicate": self.dropped_duplicate,
        }


def _parse_iso_date(token: str) -> int:
    """Strict YYYY-MM-DD -> proleptic ordinal. Raises ValueError otherwise."""
    if len(token) != 10 or token[4] != "-" or token[7] != "-":
        raise ValueError(f"not a YYYY-MM-DD date: {token!r}")
    return dt.date.fromisoformat(token).toordinal()


def _chrono_sort_keys(node_ids: Sequence[str]):
    """Secondary sort key for same-day nodes.

    Numeric comparison when every id parses as an integer, else lexicographic
    on the raw token.
    """
    try:
        return np.array([int(t) for t in node_ids], dtype=np.int64)
    except (ValueError, OverflowError):
        return np.array(node_ids, dtype=str)


class CitationNetwork:
    """Immutable citation graph with adjacency compressed in both directions.

    Construction goes through :meth:`build`, which validates, drops bad
    edges, and canonicalizes ordering. All arrays are frozen afterwards;
    snapshots and scores only ever read them.

    Attributes
    ----------
    node_ids : list[str]
        Node identifiers, in chronological order.
    dates : np.ndarray (int64)
        Issue dates as proleptic ordinals, non-decreasing.
    edge_citing, edge_cited : np.ndarray (int32)
        Edge endpoints as node indices, sorted by (citing, cited).
    """

    __slots__ = (
        "node_ids",
        "dates",
        "edge_citing",
        "edge_cited",
        "in_indptr",
        "in_indices",
        "_id_index",
        "_out_degrees",
        "_in_degrees",
    )

    def __init__(self, node_ids, dates, edge_citing, edge_cited, in_indptr, in_indices):
        self.node_ids = node_ids
        self.dates = dates
        self.edge_citing = edge_citing
        self.edge_cited = edge_cited
        self.in_indptr = in_indptr
        self.in_indices = in_indices
        self._id_index = None
        self._out_degrees = None
        self._in_degrees = None
        for arr in (dates, edge_citing, edge_cited, in_indptr, in_indices):
            arr.flags.writeable = False

    # -- construction ------------------------------------------------------

    @classmethod
    def build(
        cls,
        node_ids: Sequence[str],
        dates: Iterable,
        citing: Iterable[int],
        cited: Iterable[int],
    ) -> tuple["CitationNetwork", IngestionReport]:
        """Validate raw node/edge arrays and build the canonical network.

        ``dates`` entries may be ``datetime.date`` or proleptic ordinals.
        ``citing``/``cited`` are indices into ``node_ids``. Self-citations,
        edges whose citing node is issued before the cited node, and
        duplicate pairs are dropped and counted; same-day citations are kept.
        """
        n = len(node_ids)
        date_ord = np.array(
            [d.toordinal() if isinstance(d, dt.date) else int(d) for d in dates],
            dtype=np.int64,
        )
        if date_ord.shape[0] != n:
            raise ValueError("node_ids and dates length mismatch")

        keys = _chrono_sort_keys(node_ids)
        order = np.lexsort((keys, date_ord))
        inv = np.empty(n, dtype=np.int64)
        inv[order] = np.arange(n, dtype=np.int64)

        sorted_ids = [node_ids[o] for o in order]
        sorted_dates = date_ord[order]

        report = IngestionReport(nodes_loaded=n)

        c_raw = np.asarray(citing, dtype=np.int64)
        d_raw = np.asarray(cited, dtype=np.int64)
        if c_raw.shape != d_raw.shape:
            raise ValueError("citing and cited length mismatch")
        c = inv[c_raw].astype(np.int32) if c_raw.size else c_raw.astype(np.int32)
        d = inv[d_raw].astype(np.int32) if d_raw.size else d_raw.astype(np.int32)

        self_mask = c == d
        report.dropped_self_citation = int(self_mask.sum())
        keep = ~self_mask

        time_mask = keep & (sorted_dates[c] < sorted_dates[d])
        report.dropped_time_violation = int(time_mask.sum())
        keep &= ~time_mask

        c, d = c[keep], d[keep]
        # canonical order = (citing, cited); duplicates become adjacent
        eorder = np.lexsort((d, c))
        c, d = c[eorder], d[eorder]
        if c.size:
            dup = np.zeros(c.size, dtype=bool)
            dup[1:] = (c[1:] == c[:-1]) & (d[1:] == d[:-1])
            report.dropped_duplicate = int(dup.sum())
            c, d = c[~dup], d[~dup]
        report.edges_kept = int(c.size)

        in_indptr, in_indices = cls._build_in_csr(n, c, d)
        net = cls(sorted_ids, sorted_dates, c, d, in_indptr, in_indices)
        return net, report

    @staticmethod
    def _build_in_csr(n, citing, cited):
        """Group citing endpoints by cited node; each segment sorted ascending."""
        order = np.lexsort((citing, cited))
        in_indices = citing[order].copy()
        counts = np.bincount(cited, minlength=n)
        in_indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=in_indptr[1:])
        return in_indptr, in_indices

    # -- basic accessors ---------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self.node_ids)

    @property
    def n_edges(self) -> int:
        return int(self.edge_citing.size)

    @property
    def chrono_order(self) -> np.ndarray:
        """Chronological permutation. Identity: nodes are stored pre-sorted."""
        return np.arange(self.n_nodes, dtype=np.int64)

    @property
    def first_date(self) -> dt.date:
        return dt.date.fromordinal(int(self.dates[0]))

    @property
    def last_date(self) -> dt.date:
        return dt.date.fromordinal(int(self.dates[-1]))

    @property
    def out_degrees(self) -> np.ndarray:
        if self._out_degrees is None:
            deg = np.bincount(self.edge_citing, minlength=self.n_nodes)
            deg.flags.writeable = False
            self._out_degrees = deg
        return self._out_degrees

    @property
    def in_degrees(self) -> np.ndarray:
        if self._in_degrees is None:
            deg = np.diff(self.in_indptr)
            deg.flags.writeable = False
            self._in_degrees = deg
        return self._in_degrees

    def index_of(self, node_id: str) -> int:
        if self._id_index is None:
            self._id_index = {s: i for i, s in enumerate(self.node_ids)}
        return self._id_index[node_id]

    def date_of(self, index: int) -> dt.date:
        return dt.date.fromordinal(int(self.dates[index]))

    def out_neighbors(self, index: int) -> np.ndarray:
        lo = np.searchsorted(self.edge_citing, index, side="left")
        hi = np.searchsorted(self.edge_citing, index, side="right")
        return self.edge_cited[lo:hi]

    def in_neighbors(self, index: int) -> np.ndarray:
        """Citing nodes of ``index``, ascending by chrono position."""
        return self.in_indices[self.in_indptr[index] : self.in_indptr[index + 1]]

    # -- snapshots ---------------------------------------------------------

    def snapshot(self, cutoff: dt.date) -> "NetworkView":
        """Sub-network of nodes issued strictly before ``cutoff``."""
        cut = cutoff.toordinal() if isinstance(cutoff, dt.date) else int(cutoff)
        k = int(np.searchsorted(self.dates, cut, side="left"))
        m = int(np.searchsorted(self.edge_citing, k, side="left"))
        return NetworkView(self, cut, k, m)

    def full_view(self) -> "NetworkView":
        """View containing every node (cutoff one day past the last issue date)."""
        if self.n_nodes == 0:
            raise ValueError("empty network has no full view")
        return self.snapshot(dt.date.fromordinal(int(self.dates[-1]) + 1))

    # -- equality / hashing (used for determinism checks) -------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, CitationNetwork):
            return NotImplemented
        return (
            self.node_ids == other.node_ids
            and np.array_equal(self.dates, other.dates)
            and np.array_equal(self.edge_citing, other.edge_citing)
            and np.array_equal(self.edge_cited, other.edge_cited)
        )

    __hash__ = None

    def content_digest(self) -> str:
        """SHA-256 over the canonical serialized form."""
        h = hashlib.sha256()
        for s in self.node_ids:
            h.update(s.encode())
            h.update(b"\x00")
        h.update(self.dates.tobytes())
        h.update(self.edge_citing.tobytes())
        h.update(self.edge_cited.tobytes())
        return h.hexdigest()


class NetworkView:
    """Nodes issued strictly before ``cutoff`` plus their induced edges.

    Views alias the parent's arrays; nothing is copied. The induced edge set
    is exactly the edges with citing index below ``n_nodes`` (their cited
    endpoints are always in the view because edges never point forward in
    time), which is a prefix of the parent's canonically sorted edge arrays.
    """

    __slots__ = ("parent", "cutoff_ord", "n_nodes", "n_edges", "_in_degrees")

    def __init__(self, parent: CitationNetwork, cutoff_ord: int, n_nodes: int, n_edges: int):
        self.parent = parent
        self.cutoff_ord = cutoff_ord
        self.n_nodes = n_nodes
        self.n_edges = n_edges
        self._in_degrees = None

    @property
    def cutoff(self) -> dt.date:
        return dt.date.fromordinal(self.cutoff_ord)

    @property
    def dates(self) -> np.ndarray:
        return self.parent.dates[: self.n_nodes]

    @property
    def edge_citing(self) -> np.ndarray:
        return self.parent.edge_citing[: self.n_edges]

    @property
    def edge_cited(self) -> np.ndarray:
        return self.parent.edge_cited[: self.n_edges]

    @property
    def out_degrees(self) -> np.ndarray:
        # every cited endpoint of an in-view citing node is itself in view,
        # so view out-degree equals full out-degree for view nodes
        return self.parent.out_degrees[: self.n_nodes]

    @property
    def in_degrees(self) -> np.ndarray:
        if self._in_degrees is None:
            deg = np.bincount(self.edge_cited, minlength=self.n_nodes)
            deg.flags.writeable = False
            self._in_degrees = deg
        return self._in_degrees

    def node_id(self, index: int) -> str:
        if index >= self.n_nodes:
            raise IndexError("node not in view")
        return self.parent.node_ids[index]


def snapshot(network: CitationNetwork, cutoff: dt.date) -> NetworkView:
    """Module-level alias for :meth:`CitationNetwork.snapshot`."""
    return network.snapshot(cutoff)


# -- file formats ----------------------------------------------------------


def load_corpus(nodes_path, edges_path) -> tuple[CitationNetwork, IngestionReport]:
    """Read a corpus from two TSV files.

    Nodes file: ``node_id<TAB>YYYY-MM-DD`` per line; an optional header is
    recognized on line 1 when the second field is not a date. Edges file:
    ``citing_id<TAB>cited_id``. Any structurally malformed line (wrong field
    count, bad date, repeated node id) raises :class:`CorpusFormatError`
    with the line number; an edge naming an unknown node is merely dropped
    and counted. Blank lines are ignored.
    """
    node_ids: list[str] = []
    ordinals: list[int] = []
    index: dict[str, int] = {}

    with open(nodes_path, encoding="utf-8", newline="") as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise CorpusFormatError(
                    nodes_path, line_no, f"expected 2 tab-separated fields, got {len(parts)}"
                )
            nid, tok = parts[0].strip(), parts[1].strip()
            try:
                o = _parse_iso_date(tok)
            except ValueError:
                if line_no == 1:
                    continue  # header row
                raise CorpusFormatError(nodes_path, line_no, f"bad date {tok!r}") from None
            if not nid:
                raise CorpusFormatError(nodes_path, line_no, "empty node id")
            if nid in index:
                raise CorpusFormatError(nodes_path, line_no, f"duplicate node id {nid!r}")
            index[nid] = len(node_ids)
            node_ids.append(nid)
            ordinals.append(o)

    citing: list[int] = []
    cited: list[int] = []
    unknown = 0
    with open(edges_path, encoding="utf-8", newline="") as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise CorpusFormatError(
                    edges_path, line_no, f"expected 2 tab-separated fields, got {len(parts)}"
                )
            a = index.get(parts[0].strip())
            b = index.get(parts[1].strip())
            if a is None or b is None:
                unknown += 1
                continue
            citing.append(a)
            cited.append(b)

    net, report = CitationNetwork.build(node_ids, ordinals, citing, cited)
    report.dropped_unknown_endpoint = unknown
    return net, report


def write_corpus(network: CitationNetwork, nodes_path, edges_path) -> None:
    """Serialize to the same TSV formats ingestion reads (UTF-8, LF, no header)."""
    with open(nodes_path, "w", encoding="utf-8", newline="\n") as fh:
        for nid, o in zip(network.node_ids, network.dates):
            fh.write(f"{nid}\t{dt.date.fromordinal(int(o)).isoformat()}\n")
    ids = network.node_ids
    with open(edges_path, "w", encoding="utf-8", newline="\n") as fh:
        for a, b in zip(network.edge_citing, network.edge_cited):
            fh.write(f"{ids[a]}\t{ids[b]}\n")


def read_id_list(path) -> list[str]:
    """One node id per line; blank lines ignored."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            tok = raw.strip()
            if tok:
                out.append(tok)
    return out


def resolve_ids(network: CitationNetwork, ids: Iterable[str]) -> tuple[np.ndarray, list[str]]:
    """Map node ids to indices; unknown ids are returned separately, not fatal."""
    found = []
    missing = []
    for s in ids:
        try:
            found.append(network.index_of(s))
        except KeyError:
            missing.append(s)
    return np.array(sorted(set(found)), dtype=np.int64), missing
