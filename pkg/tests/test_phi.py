import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phistab.cube import BooleanFunction, dictator, noise_all
from phistab.phi import (PhiSpec, dictator_stability, ln_alpha, phi_entropy,
                         phi_mutual_information, phi_stability, stability_many)

SYM1 = PhiSpec(1.0, symmetric=True)
SYM2 = PhiSpec(2.0, symmetric=True)


def test_ln_alpha_limits():
    assert ln_alpha(2.0, 1.0) == pytest.approx(math.log(2.0))
    assert ln_alpha(2.0, 1 + 1e-9) == pytest.approx(math.log(2.0), rel=1e-8)
    assert ln_alpha(4.0, 2.0) == pytest.approx(3.0)
    with pytest.raises(ValueError):
        ln_alpha(0.0, 1.5)


def test_phi_examples():
    assert SYM2(0.5) == pytest.approx(-0.5)
    t = np.linspace(0, 1, 11)
    np.testing.assert_allclose(SYM2(t), 2 * t * t - 2 * t, atol=1e-15)
    assert SYM1(0.0) == 0.0 and SYM1(1.0) == 0.0


def test_dictator_closed_forms():
    assert dictator_stability(SYM1, 0.4) == pytest.approx(0.7 * math.log(0.7) + 0.3 * math.log(0.3))
    assert dictator_stability(SYM1, 0.4) == pytest.approx(-0.610864, abs=1e-6)
    for rho in (0.0, 0.3, 0.9):
        assert dictator_stability(SYM2, rho) == pytest.approx((rho * rho - 1) / 2)
    assert dictator_stability(SYM1, 0.0) == pytest.approx(SYM1(0.5))
    assert phi_stability(dictator(3, 1), SYM1, 0.4) == pytest.approx(-0.610864, abs=1e-6)


def test_equality_function_stability():
    f = BooleanFunction.from_callable(2, lambda x: int(x[0] == x[1]))
    expected = 0.5 * (SYM1(0.625) + SYM1(0.375))
    assert phi_stability(f, SYM1, 0.5) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(-0.66156, abs=1e-5)


def test_mutual_information():
    d = dictator(4, 2)
    for rho in (0.2, 0.7):
        mi = phi_mutual_information(d, SYM1, rho)
        # binary symmetric channel with crossover (1 - rho)/2, nats
        e = (1 - rho) / 2
        shannon = math.log(2) + e * math.log(e) + (1 - e) * math.log(1 - e)
        assert mi == pytest.approx(shannon, abs=1e-12)
        assert mi == pytest.approx(math.log(2) + dictator_stability(SYM1, rho), abs=1e-12)
    assert phi_mutual_information(d, SYM1, 0.0) == pytest.approx(0.0, abs=1e-15)
    one = BooleanFunction(3, np.ones(8))
    assert phi_mutual_information(one, SYM1, 0.8) == pytest.approx(0.0, abs=1e-15)
    zero = BooleanFunction(3, np.zeros(8))
    assert phi_stability(zero, SYM1, 0.6) == 0.0


def test_phi_entropy():
    assert phi_entropy([0.0, 1.0], SYM2) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        phi_entropy([0.2, 0.8], SYM2, probs=[0.5, 0.4])


def test_derivative_shapes():
    assert PhiSpec(1.0, True).derivative_shape() == "concave"
    assert PhiSpec(2.5, True).derivative_shape() == "convex"
    assert PhiSpec(5.0, True).derivative_shape() == "concave"
    assert PhiSpec(1.5, kind="power").derivative_shape() == "concave"
    assert PhiSpec(3.0, kind="power").derivative_shape() == "convex"
    assert PhiSpec(3.0, kind="power").reflect().derivative_shape() == "concave"
    assert PhiSpec(2.0, kind="power").derivative_shape() == "linear"


def test_prime_matches_finite_difference():
    t = np.linspace(0.05, 0.95, 19)
    h = 1e-6
    for spec in (SYM1, PhiSpec(2.5, True), PhiSpec(1.5, kind="power"), PhiSpec(3.0, kind="power").reflect()):
        fd = (spec(t + h) - spec(t - h)) / (2 * h)
        np.testing.assert_allclose(spec.prime(t), fd, rtol=1e-6, atol=1e-8)


specs = st.builds(PhiSpec, st.floats(1.01, 6.0), st.booleans(), st.sampled_from(["log", "power"]))


@given(specs, st.floats(0.0, 1.0))
def test_scalar_matches_vector(spec, t):
    assert spec.scalar(t) == pytest.approx(float(spec(t)), rel=1e-12, abs=1e-14)


@given(st.integers(1, 5), st.integers(0, 2**32 - 1), st.floats(0.0, 1.0), specs)
def test_stability_extremes(n, seed, rho, spec):
    table = np.random.default_rng(seed).integers(0, 2, 1 << n)
    f = BooleanFunction(n, table)
    a = f.mean
    assert phi_stability(f, spec, 1.0) == pytest.approx(a * spec(1.0) + (1 - a) * spec(0.0), abs=1e-12)
    assert phi_stability(f, spec, 0.0) == pytest.approx(spec(a), abs=1e-12)
    # Jensen: stability is at least Phi(mean)
    assert phi_stability(f, spec, rho) >= spec(a) - 1e-12
    direct = float(np.mean(spec(np.clip(noise_all(f, rho), 0, 1))))
    assert stability_many(table[None, :], spec, rho)[0] == pytest.approx(direct, abs=1e-12)


@given(specs)
def test_type_invariants(spec):
    t = np.linspace(0, 1, 1001)
    lo, hi = t[:-1], t[1:]
    gap = (spec(lo) + spec(hi)) / 2 - spec((lo + hi) / 2)
    assert np.all(gap >= -1e-16)
    # next to 0 the exact gap of t**5-like terms is below 1e-15 at this spacing
    inner = (lo >= 0.01) & (hi <= 0.99)
    assert np.all(gap[inner] > 1e-15)
    if spec.symmetric:
        s = np.linspace(0, 0.5, 101)
        np.testing.assert_allclose(spec(0.5 - s), spec(0.5 + s), atol=1e-14)
