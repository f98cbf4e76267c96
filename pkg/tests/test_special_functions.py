import cmath
from math import factorial

import mpmath
import numpy as np
import pytest
from scipy.special import loggamma

from heckezeros.errors import ContractError, DomainError
from heckezeros.models import DerivativeJet, PrecisionMode
from heckezeros.special_functions import (
    bell_polynomials,
    bell_ratio,
    incomplete_moments,
    integrate_decaying,
    jet_exp,
    jet_mul,
    jet_reciprocal,
    log_gamma,
    log_power_tail,
    log_weighted_incomplete,
    polygamma,
    polygamma_jet,
    rgamma_jet,
    sine_jet,
)

POINTS = [0.5 + 14j, 3.0 + 0.5j, 12.5 - 40j, -2.5 + 0.3j, 0.1 + 100j, 7.0]


@pytest.mark.parametrize("s", POINTS)
def test_log_gamma_matches_scipy(s) -> None:
    assert log_gamma(s) == pytest.approx(complex(loggamma(s)), abs=1e-11)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
@pytest.mark.parametrize("s", [0.5 + 14j, 2.0 + 1j, -3.5 + 2j])
def test_polygamma_matches_mpmath(n, s) -> None:
    expected = complex(mpmath.psi(n, s))
    assert polygamma(n, s) == pytest.approx(expected, rel=1e-11, abs=1e-13)


def test_gamma_poles_rejected() -> None:
    with pytest.raises(DomainError):
        log_gamma(-3.0)
    with pytest.raises(DomainError):
        polygamma(1, 0.0)


def test_polygamma_jet_refuses_negative_axis_sector() -> None:
    with pytest.raises(DomainError):
        polygamma_jet(-5.0 + 0.01j, 2)
    jet = polygamma_jet(-5.0 + 0.01j, 2, delta=None)
    assert jet.order == 2


def test_bell_ratio_of_a_quadratic_exponent() -> None:
    # F = exp(z^2) at z = 1: G' = 2, G'' = 2, G''' = 0
    jet = DerivativeJet(1.0, 3, np.array([1.0, 2.0, 2.0, 0.0], dtype=complex))
    assert bell_ratio(jet, 1) == pytest.approx(2.0)
    assert bell_ratio(jet, 2) == pytest.approx(6.0)
    assert bell_ratio(jet, 3) == pytest.approx(20.0)


def test_bell_ratio_needs_a_long_enough_jet() -> None:
    jet = DerivativeJet(0.0, 1, np.array([0.0, 1.0], dtype=complex))
    with pytest.raises(ContractError):
        bell_ratio(jet, 2)
    with pytest.raises(ContractError):
        bell_polynomials([1.0], 3)


def test_gamma_derivatives_against_finite_differences() -> None:
    z, h = 2.3 + 4.1j, 1e-3
    jet = jet_exp(polygamma_jet(z, 2))

    def gamma_at(x):
        return complex(mpmath.gamma(x))

    first = (gamma_at(z + h) - gamma_at(z - h)) / (2 * h)
    second = (gamma_at(z + h) - 2 * gamma_at(z) + gamma_at(z - h)) / h**2
    assert jet.values[0] == pytest.approx(gamma_at(z), rel=1e-11)
    assert jet.values[1] == pytest.approx(first, rel=1e-6)
    assert jet.values[2] == pytest.approx(second, rel=1e-5)


@pytest.mark.parametrize("z", [0.3 + 2j, 4.0 + 0.5j, -2.0 + 0j, -1.5 + 3j])
def test_reciprocal_gamma_jet_matches_mpmath(z) -> None:
    jet = rgamma_jet(z, 3)
    for r in range(4):
        expected = complex(mpmath.diff(mpmath.rgamma, mpmath.mpc(z), r))
        assert jet.values[r] == pytest.approx(expected, rel=1e-9, abs=1e-12)


def test_reciprocal_gamma_vanishes_at_poles_of_gamma() -> None:
    jet = rgamma_jet(-2.0, 1)
    assert abs(jet.values[0]) < 1e-12
    assert jet.values[1] == pytest.approx(2.0, rel=1e-10)


def test_jet_product_and_reciprocal() -> None:
    # e^(2z) at z = 0 has jet (1, 2, 4); its reciprocal e^(-2z) has (1, -2, 4)
    a = DerivativeJet(0.0, 2, np.array([1, 2, 4], dtype=complex))
    inv = jet_reciprocal(a)
    np.testing.assert_allclose(inv.values, [1, -2, 4])
    np.testing.assert_allclose(jet_mul(a, inv).values, [1, 0, 0], atol=1e-15)


def test_reciprocal_of_vanishing_jet_rejected() -> None:
    with pytest.raises(DomainError):
        jet_reciprocal(DerivativeJet(0.0, 1, np.array([0, 1], dtype=complex)))


def test_sine_jet() -> None:
    jet = sine_jet(0.25, 2)
    assert jet.values[0] == pytest.approx(np.sin(np.pi / 4))
    assert jet.values[1] == pytest.approx(np.pi * np.cos(np.pi / 4))
    assert jet.values[2] == pytest.approx(-np.pi**2 * np.sin(np.pi / 4))


def test_derivative_jet_validates_length() -> None:
    with pytest.raises(ContractError):
        DerivativeJet(0.0, 2, np.array([1.0, 2.0]))


@pytest.mark.parametrize("w", [6.0 + 3j, 0.5 + 0j, 12.0 - 2j])
def test_incomplete_moment_zero_is_upper_incomplete_gamma(w) -> None:
    x = 2 * np.pi
    values, errors, evaluations = incomplete_moments(w, x, 2)
    expected = complex(mpmath.gammainc(w, x) / mpmath.power(x, w))
    assert values[0] == pytest.approx(expected, rel=1e-12)
    assert errors[0] <= 1e-12 * abs(expected)
    assert evaluations > 0


def test_log_weighted_moments_match_direct_quadrature() -> None:
    w, x = 5.5 + 2j, 3 * np.pi
    for m in (1, 2, 3):
        expected = complex(
            mpmath.quad(lambda u: mpmath.log(u) ** m * u ** (w - 1) * mpmath.exp(-x * u), [1, mpmath.inf])
        )
        assert log_weighted_incomplete(w, x, m) == pytest.approx(expected, rel=1e-11)


def test_rotated_moments_match_mpmath() -> None:
    w, phi = 6.0 + 20j, 1.2
    x = 2 * np.pi * cmath.exp(1j * phi)
    values, _, _ = incomplete_moments(w, x, 1, phase=phi)
    with mpmath.workdps(25):
        expected = complex(
            mpmath.quad(
                lambda u: (mpmath.log(u) + 1j * phi) * u ** (w - 1) * mpmath.exp(-x * u),
                [1, 2, 3, 4, 6, 8, 12, 16, 24, mpmath.inf],
            )
        )
    assert values[1] == pytest.approx(expected, rel=1e-10)


def test_extended_precision_agrees_with_double() -> None:
    w, x = 6.0 + 5j, 2 * np.pi
    double, _, _ = incomplete_moments(w, x, 1)
    extended, _, _ = incomplete_moments(w, x, 1, precision=PrecisionMode.EXTENDED)
    np.testing.assert_allclose(extended, double, rtol=1e-12)


def test_incomplete_moments_need_decay() -> None:
    with pytest.raises(DomainError):
        incomplete_moments(6.0, -1.0, 0)
    with pytest.raises(ContractError):
        incomplete_moments(6.0, 1.0, -1)


def test_log_power_tail_closed_form() -> None:
    expected = float(mpmath.quad(lambda u: mpmath.log(u) ** 2 * u ** (-1.5), [100, mpmath.inf]))
    assert log_power_tail(100.0, 1.5, 2) == pytest.approx(expected, rel=1e-10)
    assert log_power_tail(1.0, 3.0, 0) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        log_power_tail(100.0, 1.0, 0)
    with pytest.raises(DomainError):
        log_power_tail(0.5, 2.0, 0)


def test_integrate_decaying_exponential_and_power() -> None:
    exp_result = integrate_decaying(lambda y: np.exp(-y))
    assert exp_result.converged
    assert exp_result.value == pytest.approx(np.exp(-1.0), rel=1e-10)

    power_result = integrate_decaying(lambda y: y**-3.0)
    assert power_result.converged
    assert power_result.value == pytest.approx(0.5, rel=1e-10)


def test_integrate_decaying_budget() -> None:
    with pytest.raises(ContractError):
        integrate_decaying(lambda y: np.exp(-y), budget=5)
    result = integrate_decaying(lambda y: np.sin(y) / y**1.5, budget=20, tol=1e-15)
    assert not result.converged
    assert result.evaluations <= 20


@pytest.mark.parametrize("s", [complex(x, y) for x in (-2.3, -0.7, 0.25, 0.5, 1.6, 3.3) for y in (0.0, 0.7, 2.5)])
def test_gamma_reflection(s) -> None:
    product = cmath.exp(log_gamma(s) + log_gamma(1 - s))
    assert product == pytest.approx(cmath.pi / cmath.sin(cmath.pi * s), rel=1e-11)


def cauchy_derivative(f, z0: complex, order: int, radius: float = 0.5, nodes: int = 64) -> complex:
    theta = 2 * np.pi * np.arange(nodes) / nodes
    values = np.array([f(z0 + radius * np.exp(1j * t)) for t in theta])
    return complex(factorial(order) * np.mean(values * np.exp(-1j * order * theta)) / radius ** order)


def test_bell_ratio_of_exp_sine() -> None:
    z = 0.7 + 0.3j
    derivatives = [cmath.sin(z), cmath.cos(z), -cmath.sin(z), -cmath.cos(z), cmath.sin(z)]
    jet = DerivativeJet(z, 4, np.array(derivatives, dtype=complex))
    expected = cauchy_derivative(lambda u: cmath.exp(cmath.sin(u)), z, 4) / cmath.exp(cmath.sin(z))
    assert bell_ratio(jet, 4) == pytest.approx(expected, rel=1e-10)

    flat = DerivativeJet(z, 3, np.zeros(4, dtype=complex))
    assert bell_ratio(flat, 0) == 1
    assert bell_ratio(flat, 3) == 0


@pytest.mark.parametrize("m", [0, 1, 3])
def test_moment_derivative_in_x_lowers_the_weight(m) -> None:
    w, x, h = 5.5 + 3j, 2 * np.pi, 1e-4
    slope = (log_weighted_incomplete(w, x + h, m) - log_weighted_incomplete(w, x - h, m)) / (2 * h)
    assert slope == pytest.approx(-log_weighted_incomplete(w + 1, x, m), rel=1e-6)
