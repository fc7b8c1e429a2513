import numpy as np
import pytest

import ptobs
from ptobs.errors import DimensionMismatch
from ptobs.gain import ScalingWindow, rate_ratio, stage_gain, varsigma, varsigma_clamped


@pytest.fixture
def window():
    return ScalingWindow(start=1.0, duration=0.2, exponent=2.01)


def test_varsigma_at_window_start(window):
    assert varsigma(window, 1.0) == pytest.approx(1.0)


def test_varsigma_midwindow(window):
    # halfway: (T / (T/2))^h = 2^2.01
    assert varsigma(window, 1.1) == pytest.approx(2.0**2.01, rel=1e-12)


def test_varsigma_outside_window(window):
    assert varsigma(window, 1.0 + 2 * 0.2) == 1.0
    assert varsigma(window, 0.5) == 1.0  # before the window also yields 1


def test_varsigma_at_least_one_and_nondecreasing(window):
    ts = np.linspace(window.start, window.end - 1e-6, 500)
    vals = [varsigma(window, t) for t in ts]
    assert all(v >= 1.0 for v in vals)
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert varsigma(window, window.end) == 1.0


def test_rate_ratio_at_window_start(window):
    assert rate_ratio(window, 1.0, guard=1e-6) == pytest.approx(2.01 / 0.2)


def test_rate_ratio_outside_window(window):
    assert rate_ratio(window, window.end, guard=1e-6) == 0.0
    assert rate_ratio(window, 0.0, guard=1e-6) == 0.0


def test_rate_ratio_guard_clamp(window):
    t = window.end - 1e-12
    assert rate_ratio(window, t, guard=1e-6) == pytest.approx(2.01e6)


def test_rate_ratio_nonnegative_increasing_then_clamped(window):
    guard = 1e-4
    ts = np.linspace(window.start, window.end - 2 * guard, 300)
    vals = [rate_ratio(window, t, guard) for t in ts]
    assert all(v >= 0 for v in vals)
    assert all(b > a for a, b in zip(vals, vals[1:]))
    clamped = rate_ratio(window, window.end - guard / 2, guard)
    assert clamped == pytest.approx(window.exponent / guard)


def test_rate_ratio_left_limit_binary_exact():
    # binary-exact window and offsets: equality must be exact, not approximate
    w = ScalingWindow(start=0.0, duration=0.25, exponent=2.01)
    for eps in (0.25 / 1024, 0.25 / 8192, 0.25 / 65536):
        assert rate_ratio(w, w.end - eps, guard=1e-9) == 2.01 / eps


def test_rate_ratio_left_limit_decimal_offsets(window):
    for frac in (1e-3, 1e-4, 1e-5):
        eps = frac * window.duration
        got = rate_ratio(window, window.end - eps, guard=1e-9)
        assert got == pytest.approx(window.exponent / eps, rel=1e-10)


def test_varsigma_clamped_matches_inside_and_saturates(window):
    guard = 1e-3
    t_in = window.end - 5 * guard
    assert varsigma_clamped(window, t_in, guard) == varsigma(window, t_in)
    sat = varsigma_clamped(window, window.end - guard / 10, guard)
    assert sat == pytest.approx((window.duration / guard) ** window.exponent)


def test_window_validation():
    with pytest.raises(DimensionMismatch):
        ScalingWindow(start=0.0, duration=0.0, exponent=2.01)
    with pytest.raises(DimensionMismatch):
        ScalingWindow(start=0.0, duration=1.0, exponent=2.0)


def test_cascade_stage_windows(cascade):
    # order 3, 0.2 s each: stage 3 = [0, 0.2), stage 2 = [0.2, 0.4), stage 1 = [0.4, 0.6)
    assert cascade.stage_start(3) == 0.0
    assert cascade.stage_start(2) == pytest.approx(0.2)
    assert cascade.stage_start(1) == pytest.approx(0.4)
    assert cascade.t_star == pytest.approx(0.6)


def test_cascade_boundaries_bitwise_consistent(cascade):
    # a window's end is the next window's start, as the same float
    for k in range(cascade.order, 1, -1):
        assert cascade.window(k).end == cascade.stage_start(k - 1)
    assert cascade.window(1).end == cascade.t_star
    assert cascade.boundaries()[0] == cascade.t0


def test_stage_windows_partition(cascade):
    rng = np.random.default_rng(5)
    for t in rng.uniform(cascade.t0, cascade.t_star, 200):
        owners = [
            k
            for k in range(1, cascade.order + 1)
            if cascade.window(k).start <= t < cascade.window(k).end
        ]
        assert len(owners) == 1


def test_stage_gain_before_window_is_zero(cascade):
    assert stage_gain(cascade, 1, 0.1, guard=1e-6) == 0.0


def test_stage_gain_inside_window(cascade):
    assert stage_gain(cascade, 3, 0.1, guard=1e-6) == pytest.approx(2.01 / 0.1)
    assert stage_gain(cascade, 3, 0.0, guard=1e-6) == pytest.approx(2.01 / 0.2)


def test_cascade_validation():
    with pytest.raises(DimensionMismatch):
        ptobs.CascadeSchedule(t0=0.0, stage_durations=(0.2, -0.1), exponent=2.01)
    with pytest.raises(DimensionMismatch):
        ptobs.CascadeSchedule(t0=0.0, stage_durations=(0.2,), exponent=1.5)
    with pytest.raises(DimensionMismatch):
        ptobs.CascadeSchedule(t0=0.0, stage_durations=(), exponent=2.01)
