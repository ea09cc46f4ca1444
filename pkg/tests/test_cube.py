import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phistab.cube import (BooleanFunction, DimensionError, EncodingError, decode, degree_weights,
                          dictator, encode, fwht, ifwht, inverse, noise_all, noise_operator_direct,
                          noise_operator_fourier, subcube_indicator, wht)


@st.composite
def boolean_functions(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    bits = draw(st.lists(st.integers(0, 1), min_size=1 << n, max_size=1 << n))
    return BooleanFunction(n, np.array(bits))


rhos = st.floats(0.0, 1.0, allow_nan=False)


def test_dictator_coefficients():
    c = wht(dictator(2, 1)).coeffs
    np.testing.assert_allclose(c, [0.5, 0.5, 0, 0], atol=1e-15)


def test_constant_one():
    c = wht(BooleanFunction(3, np.ones(8))).coeffs
    assert c[0] == 1 and np.all(c[1:] == 0)


def test_equality_function():
    f = BooleanFunction.from_callable(2, lambda x: int(x[0] == x[1]))
    spec = wht(f)
    assert spec[()] == 0.5 and spec[(1, 2)] == 0.5
    assert spec[(1,)] == 0 and spec[(2,)] == 0
    np.testing.assert_allclose(degree_weights(spec).w, [0.25, 0, 0.25])


def test_degree_weights_examples():
    np.testing.assert_allclose(degree_weights(wht(dictator(2, 1))).w, [0.25, 0.25, 0])
    assert np.all(degree_weights(wht(BooleanFunction(3, np.zeros(8)))).w == 0)
    assert degree_weights(wht(dictator(5, 3, -1)))[1] == pytest.approx(0.25)


def test_noise_examples():
    d = dictator(3, 1)
    for x in range(8):
        expected = 0.8 if x & 1 else 0.2
        assert noise_operator_fourier(d, 0.6, x) == pytest.approx(expected)
    assert noise_operator_direct(dictator(2, 1), 0.4, 0) == pytest.approx(0.3)
    eq = BooleanFunction.from_callable(2, lambda x: int(x[0] == x[1]))
    for x, sign in [(0, 1), (1, -1), (2, -1), (3, 1)]:
        assert noise_operator_direct(eq, 0.5, x) == pytest.approx((1 + 0.25 * sign) / 2)


def test_dictator_table():
    d = dictator(3, 2)
    assert list(d.table) == [(i >> 1) & 1 for i in range(8)]


def test_subcube():
    f = subcube_indicator(3, [(2, 1), (3, 1)])
    assert f.mean == 0.25
    assert np.all(subcube_indicator(4, []).table == 1)
    with pytest.raises(ValueError, match="duplicate"):
        subcube_indicator(3, [(1, 1), (1, -1)])


def test_validation_errors():
    with pytest.raises(ValueError, match="2\\*\\*n"):
        BooleanFunction(2, np.zeros(3))
    with pytest.raises(ValueError, match="0 or 1"):
        BooleanFunction(1, np.array([0, 2]))
    with pytest.raises(ValueError, match="rho"):
        noise_all(dictator(2, 1), 1.5)
    with pytest.raises(DimensionError):
        noise_operator_direct(BooleanFunction(13, np.zeros(1 << 13)), 0.5, 0)


@pytest.mark.parametrize("text, pos", [
    ("x:2;table:f", 0),
    ("n:2table:f", 10),
    ("n:2;table:zz", 10),
])
def test_decode_errors_report_position(text, pos):
    with pytest.raises(EncodingError) as info:
        decode(text)
    assert info.value.position == pos


@given(boolean_functions())
def test_encode_roundtrip(f):
    assert decode(encode(f)) == f
    assert BooleanFunction.from_int(f.n, f.to_int()) == f


@given(boolean_functions())
def test_parseval_and_inverse(f):
    c = fwht(f.table)
    assert abs(np.sum(c ** 2) - f.table.mean()) <= 1e-12
    assert inverse(wht(f)) == f
    np.testing.assert_allclose(ifwht(c), f.table, atol=1e-12)


@settings(max_examples=50)
@given(boolean_functions(max_n=5), rhos, st.integers(0, 31))
def test_fourier_matches_direct(f, rho, x):
    x %= 1 << f.n
    assert abs(noise_operator_fourier(f, rho, x) - noise_operator_direct(f, rho, x)) <= 1e-10


@given(boolean_functions(), rhos)
def test_noise_range_and_mean(f, rho):
    t = noise_all(f, rho)
    assert np.all(t >= -1e-9) and np.all(t <= 1 + 1e-9)
    assert t.mean() == pytest.approx(f.table.mean(), abs=1e-12)


@given(boolean_functions())
def test_extreme_correlations(f):
    np.testing.assert_allclose(noise_all(f, 1.0), f.table, atol=1e-12)
    np.testing.assert_allclose(noise_all(f, 0.0), f.table.mean(), atol=1e-12)
