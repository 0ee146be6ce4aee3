import numpy as np
import pytest
from hypothesis import given, strategies as st

from backflow import airy_ai, bessel_j0

from oracles import (AI_FIRST_ZERO, AI_TABLE, J0_FIRST_ZERO, J0_TABLE,
                     ai_series_oracle, bisect_zero, first_derivative,
                     j0_series_oracle, second_derivative)


def test_j0_matches_frozen_oracle_table():
    for x, want in J0_TABLE:
        assert abs(bessel_j0(x) - want) <= 1e-10, x


def test_ai_matches_frozen_oracle_table():
    for x, want in AI_TABLE:
        assert abs(airy_ai(x) - want) <= 1e-9, x


def test_j0_against_live_oracle():
    for x in (0.25, 3.7, 11.99, 12.01, 33.3):
        assert abs(bessel_j0(x) - float(j0_series_oracle(x))) <= 1e-10


def test_ai_against_live_oracle():
    for x in (-17.2, -6.51, -6.49, 0.77, 5.49, 5.51, 9.5):
        assert abs(airy_ai(x) - float(ai_series_oracle(x))) <= 1e-9


def test_first_zeros_from_bisection():
    z = bisect_zero(lambda x: float(j0_series_oracle(x)), 2.0, 3.0)
    assert z == pytest.approx(J0_FIRST_ZERO, abs=1e-12)
    assert abs(bessel_j0(z)) <= 1e-9

    z = bisect_zero(lambda x: float(ai_series_oracle(x)), -3.0, -2.0)
    assert z == pytest.approx(AI_FIRST_ZERO, abs=1e-12)
    assert abs(airy_ai(z)) <= 1e-7
    assert abs(airy_ai(-2.338107410)) <= 1e-7


def test_j0_at_zero_and_one():
    assert bessel_j0(0.0) == 1.0
    assert bessel_j0(1.0) == pytest.approx(0.7651976866, abs=1e-9)


def test_ai_at_zero_and_positive_decay():
    assert airy_ai(0.0) == pytest.approx(0.3550280539, abs=1e-9)
    assert airy_ai(5.0) > 0.0
    assert airy_ai(5.0) < airy_ai(4.0)


@given(st.floats(-50.0, 50.0))
def test_j0_even_and_bounded(x):
    v = bessel_j0(x)
    assert abs(v) <= 1.0 + 1e-12
    assert v == bessel_j0(-x)


def test_j0_asymptotic_envelope():
    # leading Hankel form: the deviation decays like x^(-3/2); the first
    # correction has amplitude sqrt(2/pi)/8 ~ 0.0997, so 0.11 covers it
    for x in np.linspace(20.0, 50.0, 121):
        dev = abs(bessel_j0(x) - np.sqrt(2.0 / (np.pi * x)) * np.cos(x - np.pi / 4.0))
        assert dev <= 0.11 * x**-1.5, x
    for x in np.linspace(31.0, 50.0, 77):
        dev = abs(bessel_j0(x) - np.sqrt(2.0 / (np.pi * x)) * np.cos(x - np.pi / 4.0))
        assert dev <= 0.02 / x, x


def test_j0_ode_residual():
    # x J'' + J' + x J = 0
    for x in np.linspace(0.5, 40.0, 80):
        r = (x * second_derivative(bessel_j0, x)
             + first_derivative(bessel_j0, x) + x * bessel_j0(x))
        assert abs(r) <= 1e-6, x


def test_ai_ode_residual():
    # Ai'' = x Ai
    for x in np.linspace(-10.0, 5.0, 151):
        r = second_derivative(airy_ai, x) - x * airy_ai(x)
        assert abs(r) <= 1e-4, x


def test_vectorized_matches_scalar():
    xs = np.array([-20.0, -3.0, 0.0, 2.0, 13.0, 47.0])
    assert np.allclose(bessel_j0(xs), [bessel_j0(float(x)) for x in xs], rtol=0, atol=0)
    xs = np.array([-25.0, -6.6, -1.0, 0.0, 4.0, 9.0])
    assert np.allclose(airy_ai(xs), [airy_ai(float(x)) for x in xs], rtol=0, atol=0)


def test_nonfinite_rejected():
    for bad in (np.nan, np.inf, -np.inf):
        with pytest.raises(ValueError):
            bessel_j0(bad)
        with pytest.raises(ValueError):
            airy_ai(bad)
