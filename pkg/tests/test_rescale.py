import datetime as dt

import numpy as np
import pytest

from citerank.centrality import ScoreVector
from citerank.rescale import DeltaClampWarning, RescaleConfig, rescale, window_bounds
from citerank import kernels

from oracles import brute_rescale, window_bounds_rule, window_members_sets

BACKENDS = kernels.available_backends()
CUT = dt.date(2020, 1, 1)


def _sv(values, name="c"):
    return ScoreVector(CUT, name, np.asarray(values, dtype=float))


def test_config_defaults_and_validation():
    cfg = RescaleConfig()
    assert cfg.delta == 15000
    with pytest.raises(ValueError):
        RescaleConfig(delta=1)


def test_window_bounds_examples():
    assert window_bounds(50, 10, 100) == (45, 55)
    assert window_bounds(2, 10, 100) == (0, 10)
    assert window_bounds(97, 10, 100) == (90, 100)


def test_window_bounds_exhaustive_against_rule_oracle():
    for n in range(2, 120):
        for delta in range(2, n + 1):
            for i in range(n):
                got = window_bounds(i, delta, n)
                assert got == window_bounds_rule(i, delta, n), (i, delta, n)
                lo, hi = got
                assert hi - lo == min(delta, n)
                assert lo <= i < hi


def test_window_rule_oracles_agree_with_membership_sets():
    for n in range(2, 40):
        for delta in range(2, n + 1):
            for i in range(n):
                lo, hi = window_bounds_rule(i, delta, n)
                assert list(range(lo, hi)) == window_members_sets(i, delta, n)


def test_window_bounds_position_validation():
    with pytest.raises(ValueError):
        window_bounds(5, 4, 5)


@pytest.mark.parametrize("backend", BACKENDS)
def test_rescale_frozen_example(backend):
    # window {0,0,0,4}: mu=1, population sigma=sqrt(3); the high node gets
    # R = 3/sqrt(3) = sqrt(3), the zeros get -1/sqrt(3)
    r = rescale(_sv([0, 0, 0, 4]), RescaleConfig(delta=4), backend=backend)
    assert r.metric_name == "R(c)"
    expect = [-1 / np.sqrt(3)] * 3 + [np.sqrt(3)]
    np.testing.assert_allclose(r.scores, expect, rtol=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_rescale_constant_scores_map_to_zero(backend):
    r = rescale(_sv([7.5] * 40), RescaleConfig(delta=10), backend=backend)
    assert np.all(r.scores == 0.0)


@pytest.mark.parametrize("backend", BACKENDS)
def test_rescale_matches_brute_force(rng, backend):
    for _ in range(12):
        n = int(rng.integers(2, 200))
        delta = int(rng.integers(2, n + 1))
        s = rng.normal(size=n) * 10.0 ** int(rng.integers(-6, 6))
        r = rescale(_sv(s), RescaleConfig(delta=delta), backend=backend)
        np.testing.assert_allclose(r.scores, brute_rescale(s, delta), rtol=1e-9, atol=1e-9)


@pytest.mark.parametrize("backend", BACKENDS)
def test_rescale_affine_invariance(rng, backend):
    for _ in range(10):
        n = int(rng.integers(5, 300))
        delta = int(rng.integers(2, n + 1))
        s = rng.normal(size=n)
        a = float(10 ** rng.uniform(-3, 3))
        # offsets up to 1e4x the (scaled) data spread; much beyond that the
        # rounding of a*s+b itself erases the signal float64 can carry
        b = float(rng.uniform(-1e4, 1e4)) * a
        r1 = rescale(_sv(s), RescaleConfig(delta=delta), backend=backend).scores
        r2 = rescale(_sv(a * s + b), RescaleConfig(delta=delta), backend=backend).scores
        scale = np.abs(r1).max() or 1.0
        assert np.max(np.abs(r1 - r2)) <= 1e-9 * scale


def test_rescale_metric_name_mapping():
    assert rescale(_sv([1, 2, 3], "p"), RescaleConfig(delta=3)).metric_name == "R(p)"


def test_rescale_delta_clamped_with_warning():
    with pytest.warns(DeltaClampWarning):
        r = rescale(_sv([1.0, 2.0, 3.0]), RescaleConfig(delta=100))
    np.testing.assert_allclose(r.scores, brute_rescale([1, 2, 3], 3), rtol=1e-12)


def test_rescale_deterministic_bit_identical(rng):
    s = rng.normal(size=500)
    for backend in BACKENDS:
        a = rescale(_sv(s), RescaleConfig(delta=50), backend=backend).scores
        b = rescale(_sv(s), RescaleConfig(delta=50), backend=backend).scores
        assert np.array_equal(a, b)


def test_backends_agree(rng):
    if len(BACKENDS) < 2:
        pytest.skip("compiled kernels unavailable")
    for _ in range(8):
        n = int(rng.integers(3, 400))
        delta = int(rng.integers(2, n + 1))
        s = rng.normal(size=n) * 1e3
        a = rescale(_sv(s), RescaleConfig(delta=delta), backend="native").scores
        b = rescale(_sv(s), RescaleConfig(delta=delta), backend="pure").scores
        np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-12)


def test_rescale_bias_suppression(rng):
    # block means of R over any contiguous block of >= delta nodes stay small
    n, delta = 4000, 200
    s = rng.exponential(scale=3.0, size=n)
    r = rescale(_sv(s), RescaleConfig(delta=delta)).scores
    bound = 4.0 / np.sqrt(delta)
    for start in range(0, n - delta, delta // 2):
        block = r[start : start + delta]
        assert abs(block.mean()) <= bound


def test_rescale_empty_and_single():
    assert len(rescale(_sv([]), RescaleConfig(delta=5)).scores) == 0
    with pytest.warns(DeltaClampWarning):
        r = rescale(_sv([42.0]), RescaleConfig(delta=5))
    assert r.scores.tolist() == [0.0]


@pytest.mark.parametrize("backend", BACKENDS)
def test_rescale_constant_windows_inside_varying_data(backend):
    # a window covering one repeated value must come out exactly 0 even
    # when the rest of the vector varies and a large offset stresses the
    # prefix-sum variance
    v = np.array([0, 0, 0, 0, 5, 7, 3, 3, 3, 3, 3, 9, 2, 0, 0, 0], float)
    for offset in (0.0, 1e6, -3e7):
        for delta in (2, 3, 4):
            r = rescale(_sv(v + offset), RescaleConfig(delta=delta),
                        backend=backend).scores
            b = brute_rescale(v, delta)
            assert np.array_equal(r == 0.0, b == 0.0)
            assert np.abs(r - b).max() < 1e-10
