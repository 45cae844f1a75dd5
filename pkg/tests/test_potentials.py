import math

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st
from pydantic import ValidationError

from core.potentials import (
    Coulomb,
    Custom,
    Exponential,
    Funnel,
    Harmonic,
    Linear,
    Logarithmic,
    PowerLaw,
    SquareRoot,
    SumOfPowerLaws,
    Tabulated,
    Yukawa,
    combine,
    finite_difference_potential,
    natural_length,
    parse_potential,
    register_potential,
    registered_names,
    scaled,
)

POSITIVE_X = st.floats(min_value=0.05, max_value=20.0, allow_nan=False, allow_infinity=False)

ANALYTIC = [
    PowerLaw(a=1.3, lam=0.5),
    PowerLaw(a=0.7, lam=-1.5),
    SumOfPowerLaws(terms=[{"coefficient": 1.0, "lam": 1.0}, {"coefficient": -0.5, "lam": -1.0}]),
    Coulomb(g=0.8),
    Linear(a=2.0),
    Harmonic(a=0.5),
    Yukawa(g=1.2, beta=0.7),
    Exponential(g=1.0, beta=2.0),
    Logarithmic(a=1.0, b=2.0),
    SquareRoot(a=1.0, b=0.5),
    Funnel(a=0.2, b=0.4),
]


@pytest.mark.parametrize("pot", ANALYTIC, ids=lambda p: p.form)
@hyp_settings(max_examples=30, deadline=None)
@given(x=POSITIVE_X)
def test_derivatives_match_central_differences(pot, x):
    h = 1e-5 * x
    numeric = (float(pot.value(x + h)) - float(pot.value(x - h))) / (2 * h)
    assert float(pot.deriv(x)) == pytest.approx(numeric, rel=1e-5, abs=1e-7)
    numeric2 = (float(pot.deriv(x + h)) - float(pot.deriv(x - h))) / (2 * h)
    assert float(pot.deriv2(x)) == pytest.approx(numeric2, rel=1e-5, abs=1e-6)


def test_powerlaw_sign_convention():
    assert float(PowerLaw(a=2.0, lam=1.0).value(3.0)) == pytest.approx(6.0)
    assert float(PowerLaw(a=2.0, lam=-1.0).value(4.0)) == pytest.approx(-0.5)
    assert PowerLaw(a=1.0, lam=-1.0).short_range
    assert not PowerLaw(a=1.0, lam=2.0).short_range


def test_powerlaw_rejects_zero_exponent():
    with pytest.raises(ValidationError):
        PowerLaw(a=1.0, lam=0.0)


def test_values_are_vectorized():
    x = np.array([0.5, 1.0, 2.0])
    np.testing.assert_allclose(Coulomb(g=2.0).value(x), -2.0 / x)
    np.testing.assert_allclose(Yukawa(g=1.0, beta=1.0).value(x), -np.exp(-x) / x)


def test_short_range_flags():
    assert Yukawa(g=1.0, beta=1.0).short_range
    assert Exponential(g=1.0, beta=1.0).short_range
    assert Coulomb(g=1.0).short_range
    assert not Linear(a=1.0).short_range
    assert not Funnel(a=1.0, b=1.0).short_range


def test_parse_potential_uses_form_discriminator():
    pot = parse_potential({"form": "yukawa", "g": 2.0, "beta": 0.5})
    assert isinstance(pot, Yukawa)
    assert pot.beta == 0.5
    assert isinstance(parse_potential('{"form": "harmonic", "a": 1}'), Harmonic)


@pytest.mark.parametrize("data", [
    {"form": "unknown", "a": 1.0},
    {"form": "yukawa", "g": 1.0, "beta": -1.0},
    {"form": "linear", "a": 1.0, "extra": 3},
])
def test_parse_potential_rejects_invalid(data):
    with pytest.raises(ValidationError):
        parse_potential(data)


def test_tabulated_spline_reproduces_quadratic():
    x = np.linspace(0.1, 5.0, 40)
    pot = Tabulated(x=x.tolist(), y=(x ** 2).tolist())
    assert float(pot.value(2.3)) == pytest.approx(2.3 ** 2, rel=1e-10)
    assert float(pot.deriv(2.3)) == pytest.approx(4.6, rel=1e-8)
    assert float(pot.deriv2(2.3)) == pytest.approx(2.0, rel=1e-6)


def test_tabulated_requires_increasing_grid():
    with pytest.raises(ValidationError):
        Tabulated(x=[1.0, 0.5, 2.0, 3.0], y=[0.0, 1.0, 2.0, 3.0])


def test_registered_potential_round_trips_through_json():
    pot = register_potential("teste_cubo", lambda x: x ** 3, lambda x: 3 * x ** 2, lambda x: 6 * x, length=1.0)
    assert "teste_cubo" in registered_names()
    again = parse_potential({"form": "custom", "name": "teste_cubo"})
    assert isinstance(again, Custom)
    assert float(again.value(2.0)) == pytest.approx(8.0)
    assert pot.length_scales() == [1.0]


def test_unregistered_custom_is_rejected():
    with pytest.raises(ValidationError):
        Custom(name="nao_existe")


def test_finite_difference_potential_is_reduced_precision():
    pot = finite_difference_potential("teste_fd", lambda x: np.sqrt(x))
    assert pot.reduced_precision
    assert float(pot.deriv(4.0)) == pytest.approx(0.25, rel=1e-6)
    assert float(pot.deriv2(4.0)) == pytest.approx(-1.0 / 32.0, rel=1e-4)


def test_scaled_and_combine():
    base = Linear(a=1.0)
    pot = scaled(base, 2.0, 0.5)
    assert float(pot.value(4.0)) == pytest.approx(4.0)
    assert float(pot.deriv(4.0)) == pytest.approx(1.0)
    assert scaled(base, 1.0, 1.0) is base
    assert scaled(None, 2.0) is None
    assert scaled(base, 0.0) is None

    total = combine(Linear(a=1.0), None, Coulomb(g=1.0))
    assert float(total.value(2.0)) == pytest.approx(1.5)
    assert combine(None, None) is None


def test_natural_length_of_harmonic():
    # (1/(m a))^(1/4) para V = a x²
    lo, hi = natural_length(Harmonic(a=16.0), 1.0)
    assert lo == pytest.approx(0.5)
    assert hi == pytest.approx(0.5)


def test_natural_length_defaults_without_scale():
    assert natural_length(PowerLaw(a=0.0, lam=1.0), 1.0) == (1.0, 1.0)


def test_sqrt_potential_limits():
    pot = SquareRoot(a=2.0, b=0.0)
    assert float(pot.value(3.0)) == pytest.approx(6.0)
    assert float(SquareRoot(a=1.0, b=3.0).value(4.0)) == pytest.approx(5.0)


def test_logarithmic_value():
    assert float(Logarithmic(a=2.0, b=1.0).value(math.e)) == pytest.approx(2.0)
