"""Reference quantities for zero counts, densities and mean squares, and the
numerical integrals they are confronted with."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from math import e, factorial, log, pi

import numpy as np
from loguru import logger
from scipy.integrate import quad

from heckezeros.coefficients import rankin_constant
from heckezeros.errors import DomainError
from heckezeros.lfunction import LFunctionEvaluator
from heckezeros.models import (
    CoefficientTable,
    DensityReport,
    EnvelopeConstants,
    JensenReport,
    MeanSquareReport,
    RankinFit,
)
from heckezeros.special_functions import log_power_tail

CHUNK = 10.0


def main_term_formula(T: float, m: int, n_f: int) -> float:
    value = T / pi * log(T / (2 * pi * e))
    if m >= 1:
        value -= T / (2 * pi) * log(n_f)
    return value


def main_term_count(T: float, m: int, n_f: int) -> float:
    """(T/pi) log(T/(2 pi e)) - [m >= 1] (T/(2 pi)) log n_f."""
    if T < 2 * pi * e:
        raise DomainError(f"T = {T} below 2*pi*e; main term is meaningless")
    return main_term_formula(T, m, n_f)


# --- coefficient sums -------------------------------------------------------------

def power_integral(sigma: float, m: int, lower: float) -> float:
    """int_lower^inf (log u)^(2m) u^(-2 sigma) du."""
    return log_power_tail(lower, 2 * sigma, 2 * m)


def coefficient_power_sum(sigma: float, m: int, table: CoefficientTable, with_tail: bool = False):
    """sum lambda(n)^2 (log n)^(2m) n^(-2 sigma), tail from partial summation against C_f x.

    With with_tail=True returns (value, tail) so callers can report the estimated part.
    """
    if sigma <= 0.5:
        raise DomainError(f"sum diverges for sigma = {sigma} <= 1/2")
    N = table.length
    n = np.arange(1, N + 1, dtype=float)
    log_n = np.log(n)
    finite = float(np.sum(table.lam[1:] ** 2 * log_n ** (2 * m) * np.exp(-2 * sigma * log_n)))
    c_hat = rankin_constant(table, N)
    tail = c_hat * power_integral(sigma, m, N)
    if with_tail:
        return finite + tail, tail
    return finite + tail


def lad_ratio(sigma: float, m: int, table: CoefficientTable) -> float:
    """(2 sigma - 1)^(2m+1) S(sigma) n_f^(2 sigma) / ((2m)! n_f C_f); tends to 1 as sigma -> 1/2."""
    n_f = table.n_f
    c_hat = rankin_constant(table, table.length)
    s = coefficient_power_sum(sigma, m, table)
    return (2 * sigma - 1) ** (2 * m + 1) * s * n_f ** (2 * sigma) / (factorial(2 * m) * n_f * c_hat)


def rankin_fit(table: CoefficientTable, points: int = 60) -> RankinFit:
    """C_f from the longest partial sum and the growth exponent of |S(x) - C_f x|."""
    N = table.length
    low_confidence = N < 10_000
    if low_confidence:
        logger.warning("[asym] Rankin fit on a table of length {} is low-confidence", N)
    c_hat = float(table.rankin_partial[N] / N)

    xs = np.arange(1, N + 1)
    residual = np.abs(table.rankin_partial[1:] - c_hat * xs)
    envelope = np.maximum.accumulate(residual)
    # the residual is forced to 0 at x = N, so fit on the first half only
    grid = np.unique(np.geomspace(max(100, N // 100), N // 2, points).astype(int))
    env = envelope[grid - 1]
    if np.all(env <= 1e-12 * c_hat * grid):
        return RankinFit(c_hat, 0.0, N, low_confidence)
    keep = env > 0
    slope, _ = np.polyfit(np.log(grid[keep]), np.log(env[keep]), 1)
    return RankinFit(c_hat, float(slope), N, low_confidence)


# --- density ----------------------------------------------------------------

def zd_log_constant(m: int, constants: EnvelopeConstants) -> float:
    """log((2m)! n_f C_f / (|lambda(n_f)|^2 (log n_f)^(2m)))."""
    return log(
        factorial(2 * m) * constants.n_f * constants.c_f
        / (constants.lambda_nf ** 2 * log(constants.n_f) ** (2 * m))
    )


def zd2_envelope(sigma: float, T: float, m: int, constants: EnvelopeConstants) -> float:
    """Leading terms of the explicit density bound, without O-terms."""
    if sigma <= 0.5:
        raise DomainError(f"density bounds need sigma > 1/2, got {sigma}")
    x = sigma - 0.5
    return T / x / (2 * pi) * ((2 * m + 1) * log(1 / x) + zd_log_constant(m, constants))


def zd1_correction(sigma: float, T: float, m: int, constants: EnvelopeConstants) -> float:
    """(1/2pi) T/(sigma-1/2) log(1 + K X) with the three-case X."""
    x = sigma - 0.5
    K = constants.o_constant
    width = (2 * sigma - 1) ** (2 * m + 1)
    if sigma < 1:
        X = width * log(T) ** (2 * m) / T ** (2 * sigma - 1)
    elif sigma == 1:
        X = width * log(T) ** (2 * m + 2) / T
    else:
        X = width / T
    return T / x / (2 * pi) * log(1 + K * X)


def density_envelope(
    sigma: float,
    T: float,
    m: int,
    constants: EnvelopeConstants,
    empirical_count: int,
) -> DensityReport:
    """Confront an empirical N_{f,m}(sigma, T) with the explicit bound and its recorded slack."""
    envelope = zd2_envelope(sigma, T, m, constants)
    slack = constants.slack_factor * log(T)
    if sigma >= constants.sigma_right:
        bound = slack
    else:
        bound = envelope + slack + zd1_correction(sigma, T, m, constants)
    return DensityReport(
        m=m,
        sigma=sigma,
        T=T,
        empirical_count=empirical_count,
        envelope_zd2=envelope,
        explicit_bound_zd1=bound,
        slack_logT=slack,
        o_constant=constants.o_constant,
        passed=empirical_count <= bound,
    )


# --- mean squares ------------------------------------------------------------

def predicted_error_order(sigma: float, T: float, m: int) -> float:
    if sigma > 1:
        return 1.0
    if sigma == 1:
        return log(T) ** (2 * m + 2)
    return T ** (2 * (1 - sigma)) * log(T) ** (2 * m)


def mean_square_numeric(
    evaluator: LFunctionEvaluator,
    sigma: float,
    T: float,
    m: int,
    jobs: int = 1,
    rel_tol: float = 1e-6,
) -> MeanSquareReport:
    """int_1^T |L^(m)(sigma + it)|^2 dt against (T - 1) sum lambda^2 (log n)^2m n^-2sigma."""
    if sigma <= 0.5:
        raise DomainError(f"mean square reference diverges for sigma = {sigma}")
    if T < 1:
        raise DomainError(f"T = {T} below 1")

    edges = list(np.arange(1.0, T, CHUNK)) + [T]
    chunks = [(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]

    def integrand(t):
        return abs(evaluator.eval_precise(complex(sigma, t), m).value) ** 2

    def run(chunk):
        a, b = chunk
        out = quad(integrand, a, b, epsrel=rel_tol, epsabs=0.0, limit=200, full_output=1)
        # a fourth element (the warning message) is only present when quad gave up
        return out[0], out[1], len(out) > 3

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(run, chunks))

    numeric = float(sum(r[0] for r in results))
    quad_error = float(sum(r[1] for r in results))
    flagged = any(r[2] for r in results)
    reference = (T - 1) * coefficient_power_sum(sigma, m, evaluator.table)
    order = predicted_error_order(sigma, T, m)
    difference = numeric - reference
    if flagged:
        logger.warning("[asym] mean square quadrature unconverged at sigma={}, T={}", sigma, T)
    return MeanSquareReport(
        m=m,
        sigma=sigma,
        T=T,
        numeric_integral=numeric,
        reference_main=reference,
        difference=difference,
        predicted_error_order=order,
        normalized_difference=difference / order if order else 0.0,
        quadrature_error=quad_error,
        flagged=flagged,
    )


def jensen_check(
    evaluator: LFunctionEvaluator,
    sigma: float,
    T: float,
    m: int,
    mean_square: MeanSquareReport | None = None,
    rel_tol: float = 1e-6,
) -> JensenReport:
    """Mean of log|L^(m)|^2 over [1, T] never exceeds the log of the mean square."""
    if T <= 1:
        raise DomainError(f"T = {T} must exceed 1")
    if mean_square is None:
        mean_square = mean_square_numeric(evaluator, sigma, T, m, rel_tol=rel_tol)

    def integrand(t):
        return 2 * log(max(abs(evaluator.eval_precise(complex(sigma, t), m).value), 1e-300))

    edges = list(np.arange(1.0, T, CHUNK)) + [T]
    log_integral = sum(
        quad(integrand, a, b, epsabs=1e-8, limit=200)[0]
        for a, b in zip(edges[:-1], edges[1:])
        if b > a
    )
    mean_log = log_integral / (T - 1)
    log_mean = log(mean_square.numeric_integral / (T - 1))
    return JensenReport(
        m=m,
        sigma=sigma,
        T=T,
        mean_log=mean_log,
        log_mean=log_mean,
        passed=mean_log <= log_mean + 1e-6,
    )
