"""Hot-loop kernels with a compiled fast path and a NumPy fallback.

At import time the compiled extension (``citerank.kernels._native``) is
preferred when present; set ``CITERANK_PURE_PYTHON=1`` to force the NumPy
implementations. Every public function also takes ``backend=`` ("native" or
"pure") for explicit selection, which the tests and the benchmark use to
compare the two paths.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pure

try:  # pragma: no cover - depends on build environment
    from . import _native

    _HAVE_NATIVE = True
except ImportError:  # pragma: no cover
    _native = None
    _HAVE_NATIVE = False

if os.environ.get("CITERANK_PURE_PYTHON") == "1" or not _HAVE_NATIVE:
    DEFAULT_BACKEND = "pure"
else:
    DEFAULT_BACKEND = "native"

# re-export: the stepwise update used by conservation checks
pagerank_step = _pure.pagerank_step


def available_backends() -> tuple[str, ...]:
    return ("native", "pure") if _HAVE_NATIVE else ("pure",)


def _resolve(backend):
    b = backend or DEFAULT_BACKEND
    if b not in ("native", "pure"):
        raise ValueError(f"unknown kernel backend {b!r}")
    if b == "native" and not _HAVE_NATIVE:
        raise RuntimeError("compiled kernels are not available in this install")
    return b


def pagerank(
    n,
    out_degrees,
    in_indptr,
    in_indices,
    in_counts,
    edge_citing,
    edge_cited,
    alpha,
    epsilon,
    max_iterations,
    backend=None,
):
    """Run the power iteration on one snapshot's arrays.

    The native path walks the in-adjacency CSR (per-node visible prefixes);
    the pure path accumulates over the edge list. Both return
    ``(p, iterations, residual, converged)``.
    """
    b = _resolve(backend)
    if b == "native":
        return _native.pagerank_power(
            np.ascontiguousarray(in_indptr, dtype=np.int64),
            np.ascontiguousarray(in_indices, dtype=np.int32),
            np.ascontiguousarray(in_counts, dtype=np.int64),
            np.ascontiguousarray(out_degrees, dtype=np.int64),
            float(alpha),
            float(epsilon),
            int(max_iterations),
        )
    return _pure.pagerank_power(
        int(n),
        np.asarray(out_degrees, dtype=np.int64),
        np.asarray(edge_citing),
        np.asarray(edge_cited),
        float(alpha),
        float(epsilon),
        int(max_iterations),
    )


def sliding_moments(values, window, backend=None):
    """Per-position window mean and population std (see rescale module)."""
    b = _resolve(backend)
    if b == "native":
        return _native.sliding_moments(
            np.ascontiguousarray(values, dtype=np.float64), int(window)
        )
    return _pure.sliding_moments(values, window)
