"""Shared fixtures: reference signals and sampling grids used across suites."""

from __future__ import annotations

import numpy as np
import pytest

from polyident import Pole, SignalSpec

TWO_PI = 2.0 * np.pi


def two_mode_spec() -> SignalSpec:
    """Two lightly damped conjugate pairs with well-separated frequencies.

    Angular frequencies 0.08 and 0.11 rad/s, so 50 samples at step 5.6
    cover roughly four and six periods respectively.
    """
    return SignalSpec(modes=(
        (1.5, Pole(alpha=0.00555, f=0.08 / TWO_PI)),
        (3.5, Pole(alpha=0.00666, f=0.11 / TWO_PI)),
    ))


def single_mode_spec(beta: float = 1.0) -> SignalSpec:
    return SignalSpec(modes=((beta, Pole(alpha=0.01, f=0.08)),))


@pytest.fixture
def spec_two_mode() -> SignalSpec:
    return two_mode_spec()


@pytest.fixture
def uniform_times() -> np.ndarray:
    return 5.6 * np.arange(50, dtype=float)


def assert_pole_sets_close(estimated, truth, rtol: float) -> None:
    """Match each true pole to its nearest estimate and bound the error."""
    est = list(estimated)
    for p in truth:
        dists = [abs(complex(-q.alpha, TWO_PI * q.f) - complex(-p.alpha, TWO_PI * p.f))
                 for q in est]
        i = int(np.argmin(dists))
        q = est.pop(i)
        assert q.alpha == pytest.approx(p.alpha, rel=rtol, abs=rtol * abs(p.alpha))
        assert q.f == pytest.approx(p.f, rel=rtol, abs=rtol * abs(p.f))
