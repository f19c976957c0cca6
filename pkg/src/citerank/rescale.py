"""Age rescaling: z-score each node against its chronological neighborhood.

A node's raw score is compared with the scores of the ``delta`` nodes
nearest to it in chronological order (its own score included):

    R_i = (s_i - mu_i) / sigma_i

where mu/sigma are the mean and *population* standard deviation over the
window. Interior windows are centered with the extra slot (even lengths) on
the older side; the ``delta/2`` nodes nearest either end of the corpus use
the first/last ``delta`` nodes. A window with zero variance maps to R = 0.

The transform is invariant under positive affine maps of the scores
(s -> a*s + b, a > 0), which is what makes R comparable across metrics.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .centrality import ScoreVector

__all__ = ["RescaleConfig", "DeltaClampWarning", "window_bounds", "rescale"]


class DeltaClampWarning(UserWarning):
    """delta exceeded the snapshot size and was clamped."""


@dataclass(frozen=True)
class RescaleConfig:
    delta: int = 15000
    # windows whose population std is <= sigma_floor yield R = 0; the default
    # flattens only exactly-constant windows
    sigma_floor: float = 0.0

    def __post_init__(self):
        if self.delta < 2:
            raise ValueError(f"delta must be >= 2, got {self.delta}")
        if self.sigma_floor < 0.0:
            raise ValueError("sigma_floor must be >= 0")


def window_bounds(position: int, delta: int, n: int) -> tuple[int, int]:
    """Half-open index range of the chronological window at ``position``.

    Length is exactly ``min(delta, n)``. Interior windows are centered
    (even lengths lean one slot toward the older side); positions too close
    to either end receive the first or last ``min(delta, n)`` positions.
    """
    if not 0 <= position < n:
        raise ValueError(f"position {position} out of range for n={n}")
    m = min(int(delta), int(n))
    lo = position - m // 2
    if lo < 0:
        lo = 0
    elif lo > n - m:
        lo = n - m
    return lo, lo + m


def rescale(
    scores: ScoreVector, config: RescaleConfig | None = None, backend: str | None = None
) -> ScoreVector:
    """Age-rescaled copy of ``scores``; metric name ``X`` becomes ``R(X)``.

    Scores must cover the full view in chronological order (which is how
    every producer in this package lays them out). When ``delta`` exceeds
    the view size it is clamped with a :class:`DeltaClampWarning`.
    """
    cfg = config or RescaleConfig()
    s = np.asarray(scores.scores, dtype=np.float64)
    n = s.shape[0]
    name = f"R({scores.metric_name})"
    if n == 0:
        return ScoreVector(scores.view_cutoff, name, np.empty(0))
    m = cfg.delta
    if m > n:
        warnings.warn(
            f"delta={cfg.delta} exceeds view size {n}; clamping to {n}",
            DeltaClampWarning,
            stacklevel=2,
        )
        m = n
    # global centering: mathematically a no-op for (s - mu)/sigma, but it
    # keeps the prefix-sum variance well conditioned under large offsets
    centered = s - s.mean()
    mu, sigma = kernels.sliding_moments(centered, m, backend=backend)
    r = np.zeros(n)
    ok = sigma > cfg.sigma_floor
    np.divide(centered - mu, sigma, out=r, where=ok)
    return ScoreVector(scores.view_cutoff, name, r)
