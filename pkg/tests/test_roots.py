import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phistab.roots import (BracketError, curve_csv, psi, region_curve, region_threshold, rho_star,
                           theta, theta_residual)


def test_psi_examples():
    assert psi(0.0) == pytest.approx(0.0, abs=1e-15)
    assert psi(0.2) > 0


def test_rho_star():
    res = rho_star(1e-8)
    assert abs(res.root - 0.461491) <= 1e-6
    assert abs(res.residual) <= 1e-10
    assert res.root == rho_star(1e-8).root
    assert res.bracket == (0.3, 0.6)


def test_rho_star_tolerance_floor():
    with pytest.raises(ValueError, match="tol"):
        rho_star(1e-16)


def test_psi_nonnegative_before_root():
    r = rho_star().root
    vals = np.array([psi(x) for x in np.linspace(0, r, 1000)])
    assert vals.min() >= -1e-12


def test_psi_unimodal_on_half_interval():
    vals = np.array([psi(x) for x in np.linspace(0, 0.5, 1000)])
    steps = np.sign(np.diff(vals))
    # one switch from increasing to decreasing
    peak = int(np.argmax(vals))
    assert np.all(steps[:peak] > 0) and np.all(steps[peak:] < 0)
    assert 0 < peak < 999


def test_theta_examples():
    assert theta(1.5).root == pytest.approx(0.25, abs=1e-12)
    for alpha in (1.2, 1.8):
        assert abs(theta(alpha).residual) <= 1e-10


def test_theta_domain():
    for alpha in (1.0, 2.0, 0.7, 2.5):
        with pytest.raises(ValueError, match="inside"):
            theta(alpha)


def test_theta_near_two():
    # the nontrivial root collapses towards 0 as alpha -> 2, so the region fills [0, 1]
    res = theta(1.999)
    assert 0 < res.root < 1e-2
    assert region_threshold(1.999) == pytest.approx(1.0, abs=1e-2)
    with pytest.raises(BracketError):
        theta(1.99999)


def test_theta_residual_grid():
    for alpha in np.linspace(1.01, 1.99, 100):
        res = theta(float(alpha))
        assert 0 < res.root < 1
        assert abs(theta_residual(res.root, float(alpha))) <= 1e-10, alpha


@given(st.floats(1.01, 1.99))
def test_threshold_in_unit_interval(alpha):
    t = region_threshold(alpha)
    assert 0 <= t <= 1 and math.isfinite(t)


def test_region_curve():
    rows = region_curve(1.01, 1.99, 99)
    assert len(rows) == 99
    thresholds = [r[1] for r in rows]
    assert all(0 <= t <= 1 for t in thresholds)
    assert all(b >= a for a, b in zip(thresholds, thresholds[1:]))
    assert region_curve(1.01, 1.99, 99, workers=4) == rows
    text = curve_csv(rows)
    assert text.splitlines()[0] == "alpha,rho_threshold"
    assert len(text.splitlines()) == 100
