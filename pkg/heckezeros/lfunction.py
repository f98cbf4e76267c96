"""Evaluation of L_f^(m)(s) in three regimes.

series     Re s >= sigma_right - margin: truncated Dirichlet series whose
           divisor-majorant tail bound is reported as the error estimate.
completed  the strip: Mellin integral of f(iy) split at |y| = 1, taken along a
           ray rotated towards Im s so the gamma factor's exponential size
           appears in every term instead of emerging from cancellation.
reflected  Re s <= sigma_left: the differentiated functional equation.
"""
from __future__ import annotations

import threading
from collections import Counter
from functools import lru_cache
from math import comb, exp, log, pi

import numpy as np
from loguru import logger

from heckezeros.coefficients import primes_up_to
from heckezeros.errors import ContractError, DomainError, RegimeError
from heckezeros.models import (
    CoefficientTable,
    DerivativeJet,
    EvalResult,
    PrecisionMode,
    Regime,
)
from heckezeros.special_functions import (
    incomplete_moments,
    integrate_decaying,
    jet_exp,
    jet_mul,
    jet_reciprocal,
    jet_reflect,
    log_power_tail,
    polygamma_jet,
    rgamma_jet,
)

LOG_2PI = log(2 * pi)
# partial-summation density of the divisor function: log u + 2*gamma, rounded up
DIVISOR_DENSITY_SHIFT = 1.16
ROUNDING = 1e-16
EXTENDED_HEIGHT = 60.0
MAX_ABSCISSA = 60.0


def _leading_index(table: CoefficientTable, m: int) -> int:
    return 1 if m == 0 else table.n_f


def certified_abscissa(
    table: CoefficientTable,
    m: int,
    step: float = 0.05,
    start: float = 1.05,
    bound: float = 0.5,
) -> tuple[float, float]:
    """Smallest grid sigma with sum_{n > n0} |lambda(n)/lambda(n0)| (log n/log n0)^m (n0/n)^sigma <= bound.

    n0 is 1 for m = 0 and n_f otherwise; the finite part uses the table, the
    rest the Deligne majorant d(n) through its partial-summation density.
    Returns (sigma, majorant value at sigma). Beyond sigma the normalized
    function satisfies |F - 1| <= bound and has no zeros.
    """
    n0 = _leading_index(table, m)
    lead = abs(table.lam[n0])
    n = np.arange(n0 + 1, table.length + 1, dtype=float)
    ratio = np.abs(table.lam[n0 + 1:]) / lead
    logs = np.log(n) / log(n0) if m else np.ones_like(n)
    weights = ratio * logs ** m
    log_n_over = np.log(n / n0)
    N = float(table.length)

    sigma = start
    while sigma <= MAX_ABSCISSA:
        finite = float(np.sum(weights * np.exp(-sigma * log_n_over)))
        tail_scale = n0 ** sigma / (lead * (log(n0) ** m if m else 1.0))
        tail = tail_scale * (
            log_power_tail(N, sigma, m + 1) + DIVISOR_DENSITY_SHIFT * log_power_tail(N, sigma, m)
        )
        if finite + tail <= bound:
            return round(sigma, 10), finite + tail
        sigma += step
    raise ContractError(f"no abscissa up to {MAX_ABSCISSA} for m={m}; table too short")


@lru_cache(maxsize=4096)
def series_tail_bound(N: int, sigma: float, m: int) -> float:
    """Bound for sum_{n>N} d(n) (log n)^m n^-sigma via int_N^inf (log u + 1.16)(log u)^m u^-sigma du."""
    log_N = log(N)

    def integrand(y):
        log_u = log_N + np.log(y)
        return (log_u + DIVISOR_DENSITY_SHIFT) * log_u ** m * y ** (-sigma)

    result = integrate_decaying(integrand, tol=1e-6)
    if not result.converged:
        logger.warning("[lfunc] tail quadrature unconverged at N={}, sigma={}", N, sigma)
    return float(N ** (1.0 - sigma) * (result.value.real + result.error_estimate))


class LFunctionEvaluator:
    """Regime-dispatched L_f^(m)(s) for one coefficient table.

    Immutable after construction apart from the usage counters behind
    provenance().
    """

    def __init__(
        self,
        table: CoefficientTable,
        max_order: int = 4,
        margin: float = 0.25,
        sigma_left: float = 0.0,
        tol: float = 1e-12,
        precision: PrecisionMode = PrecisionMode.DOUBLE,
        sigma_right: tuple[float, ...] | None = None,
    ):
        self.table = table
        self.max_order = max_order
        self.margin = margin
        self.sigma_left = sigma_left
        self.tol = tol
        self.precision = precision
        self.center = table.spec.center
        self.sign = table.spec.sign
        # one order beyond max_order so Newton steps can use L^(m+1)
        orders = range(max_order + 2)
        if sigma_right is None:
            sigma_right = tuple(certified_abscissa(table, m)[0] for m in orders)
        if len(sigma_right) < max_order + 2 or min(sigma_right) <= 1:
            raise ContractError(f"sigma_right must exceed 1 for orders 0..{max_order + 1}")
        self.sigma_right = tuple(sigma_right)
        self.series_from = tuple(max(self.sigma_right[m] - margin, 1 + margin) for m in orders)
        self._stats: Counter = Counter()
        self._max_terms = 0
        self._lock = threading.Lock()
        logger.info(
            "[lfunc] weight {} evaluator: sigma_right={}, series from {}",
            table.weight,
            [round(v, 2) for v in self.sigma_right],
            [round(v, 2) for v in self.series_from],
        )

    # --- bookkeeping -------------------------------------------------------------

    def _record(self, regime: Regime, terms: int = 0) -> None:
        with self._lock:
            self._stats[regime.value] += 1
            self._max_terms = max(self._max_terms, terms)

    def provenance(self) -> dict:
        with self._lock:
            return {
                "weight": self.table.weight,
                "table_length": self.table.length,
                "regime_counts": dict(sorted(self._stats.items())),
                "max_terms": self._max_terms,
                "sigma_right": list(self.sigma_right),
                "series_from": list(self.series_from),
                "margin": self.margin,
                "sigma_left": self.sigma_left,
                "precision": self.precision.value,
            }

    def _check_order(self, m: int) -> None:
        if not 0 <= m <= self.max_order + 1:
            raise ContractError(f"derivative order {m} outside 0..{self.max_order + 1}")

    def _lead_scale(self, sigma: float, m: int) -> float:
        n0 = _leading_index(self.table, m)
        if m == 0:
            return 1.0
        return abs(self.table.lam[n0]) * log(n0) ** m * n0 ** (-sigma)

    # --- series regime ------------------------------------------------------------

    def dirichlet_eval(self, s: complex, m: int) -> EvalResult:
        """sum lambda(n) (-log n)^m n^-s, truncated where the tail bound meets tol."""
        s = complex(s)
        self._check_order(m)
        if s.real < 1 + self.margin:
            raise RegimeError(f"Re s = {s.real} below the series band {1 + self.margin}")
        target = self.tol * self._lead_scale(s.real, m)
        N = 64
        while N < self.table.length and series_tail_bound(N, round(s.real, 10), m) > target:
            N *= 2
        N = min(N, self.table.length)
        tail = series_tail_bound(N, round(s.real, 10), m)

        n = np.arange(1, N + 1, dtype=float)
        log_n = np.log(n)
        terms = self.table.lam[1:N + 1] * (-log_n) ** m * np.exp(-s * log_n)
        value = complex(np.sum(terms))
        error = tail + ROUNDING * float(np.sum(np.abs(terms))) * np.sqrt(N)
        self._record(Regime.SERIES, N)
        return EvalResult(value, error, Regime.SERIES, terms=N)

    def euler_product_eval(self, s: complex, P: int) -> EvalResult:
        """prod_{p<=P} (1 - lambda(p) p^-s + p^-2s)^-1 with a logarithmic tail estimate."""
        s = complex(s)
        if s.real < 1.5:
            raise RegimeError(f"Re s = {s.real} below the Euler-product band 1.5")
        if P < 2:
            raise ContractError(f"need at least one prime, got P={P}")
        if P > self.table.length:
            raise ContractError(f"P={P} exceeds table length {self.table.length}")
        primes = primes_up_to(P)
        p = primes.astype(float)
        lam_p = self.table.lam[primes]
        factors = 1.0 - lam_p * np.exp(-s * np.log(p)) + np.exp(-2 * s * np.log(p))
        value = complex(np.exp(-np.sum(np.log(factors))))
        sigma = s.real
        tail = 2 * P ** (1 - sigma) / ((sigma - 1) * log(P))
        return EvalResult(value, abs(value) * tail, Regime.SERIES, terms=len(primes))

    # --- gamma factors --------------------------------------------------------------

    def chi_jet(self, s: complex, r: int) -> DerivativeJet:
        """Jet of chi(s) = eps (2 pi)^(2s-1) Gamma(1-s+c)/Gamma(s+c)."""
        s = complex(s)
        c = self.center
        w, w_ref = s + c, 1 - s + c
        nearest = round(w_ref.real)
        if nearest <= 0 and abs(w_ref - nearest) < 1e-6:
            raise DomainError(f"chi has a pole at s = {s}")

        j = np.arange(r + 1)
        if w.real >= 0.5 and w_ref.real >= 0.5:
            log_values = (
                np.where(j == 0, (2 * s - 1) * LOG_2PI, np.where(j == 1, 2 * LOG_2PI, 0.0)).astype(complex)
                + jet_reflect(polygamma_jet(w_ref, r, delta=None), s).values
                - polygamma_jet(w, r, delta=None).values
            )
            jet = jet_exp(DerivativeJet(s, r, log_values))
            return DerivativeJet(s, r, self.sign * jet.values)

        power = DerivativeJet(s, r, self.sign * np.exp((2 * s - 1) * LOG_2PI) * (2 * LOG_2PI) ** j)
        if w_ref.real >= 0.5:
            numerator = jet_exp(jet_reflect(polygamma_jet(w_ref, r, delta=None), s))
        else:
            numerator = jet_reciprocal(jet_reflect(rgamma_jet(w_ref, r), s))
        denominator = DerivativeJet(s, r, rgamma_jet(w, r).values)
        return jet_mul(power, jet_mul(numerator, denominator))

    def _h_jet(self, s: complex, r: int) -> DerivativeJet:
        """Jet of (2 pi)^(s+c) / Gamma(s+c), so that L = H * Lambda."""
        w = s + self.center
        j = np.arange(r + 1)
        power = DerivativeJet(s, r, np.exp(w * LOG_2PI) * LOG_2PI ** j + 0j)
        return jet_mul(power, DerivativeJet(s, r, rgamma_jet(w, r).values))

    # --- completed regime ----------------------------------------------------------------

    def _rotation(self, s: complex) -> float:
        w = s.real + self.center
        w_ref = 1 - s.real + self.center
        a = max(w, w_ref, 1.0)
        if s.imag == 0:
            return 0.0
        theta = min(pi / 2, a / abs(s.imag))
        return float(np.sign(s.imag) * (pi / 2 - theta))

    def completed_jet(self, s: complex, r: int) -> tuple[np.ndarray, np.ndarray, int]:
        """Lambda^(j)(s) for j = 0..r, their error estimates and the number of terms used."""
        s = complex(s)
        c, eps = self.center, self.sign
        w, w_ref = s + c, 1 - s + c
        phi = self._rotation(s)
        rot, rot_ref = np.exp(1j * phi), np.exp(-1j * phi)
        pref = np.exp(1j * phi * w)
        pref_ref = eps * np.exp(-1j * phi * w_ref)
        signs = (-1.0) ** np.arange(r + 1)
        precision = (
            PrecisionMode.EXTENDED
            if self.precision is PrecisionMode.EXTENDED and abs(s.imag) > EXTENDED_HEIGHT
            else PrecisionMode.DOUBLE
        )

        cos_phi = np.cos(phi)
        b = max(w.real, w_ref.real, 0.0) + r
        growth = 1.0 + abs(phi)
        values = np.zeros(r + 1, dtype=complex)
        errors = np.zeros(r + 1)
        scale = 0.0
        n = 0
        while True:
            n += 1
            if n > self.table.length:
                raise ContractError(f"table of length {self.table.length} too short for s = {s}")
            rho = 2 * pi * n * cos_phi
            if rho > b + 2:
                # tail from n on, with |a(n)| <= 2 n^(c + 1/2)
                bound_n = 2 * n ** (c + 0.5) * growth ** r * exp(-rho) / (rho - b)
                bound_n *= abs(pref) + abs(pref_ref)
                q = exp(-2 * pi * cos_phi) * ((n + 1) / n) ** (c + 0.5)
                if q < 1:
                    tail = bound_n / (1 - q)
                    if tail <= ROUNDING * max(scale, 1e-300):
                        break
            a_n = float(self.table.a[n])
            if a_n == 0.0:
                continue
            x = 2 * pi * n
            J, J_err, _ = incomplete_moments(w, x * rot, r, phi, precision)
            K, K_err, _ = incomplete_moments(w_ref, x * rot_ref, r, -phi, precision)
            values += a_n * (pref * J + pref_ref * signs * K)
            errors += abs(a_n) * (abs(pref) * J_err + abs(pref_ref) * K_err)
            scale += abs(a_n) * (abs(pref) * np.abs(J).max() + abs(pref_ref) * np.abs(K).max())
        errors += ROUNDING * scale * np.sqrt(n) + tail
        return values, errors, n - 1

    def completed_derivative(self, s: complex, m: int) -> EvalResult:
        """Lambda^(m)(s) of the completed function (2 pi)^-(s+c) Gamma(s+c) L(s)."""
        self._check_order(m)
        values, errors, terms = self.completed_jet(s, m)
        return EvalResult(complex(values[m]), float(errors[m]), Regime.COMPLETED, terms=terms)

    def _completed_eval(self, s: complex, m: int) -> EvalResult:
        lam_values, lam_errors, terms = self.completed_jet(s, m)
        H = self._h_jet(s, m).values
        value = sum(comb(m, i) * H[m - i] * lam_values[i] for i in range(m + 1))
        error = sum(comb(m, i) * abs(H[m - i]) * lam_errors[i] for i in range(m + 1))
        self._record(Regime.COMPLETED, terms)
        return EvalResult(complex(value), float(error), Regime.COMPLETED, terms=terms)

    # --- reflected regime ---------------------------------------------------------------

    def _reflected_eval(self, s: complex, m: int) -> EvalResult:
        chi = self.chi_jet(s, m).values
        value = 0j
        error = 0.0
        terms = 0
        for r in range(m + 1):
            inner = self.eval_precise(1 - s, r)
            weight = comb(m, r) * (-1) ** r * chi[m - r]
            value += weight * inner.value
            error += abs(weight) * inner.error_estimate
            terms = max(terms, inner.terms)
        error += ROUNDING * abs(value)
        self._record(Regime.REFLECTED, terms)
        return EvalResult(complex(value), float(error), Regime.REFLECTED, terms=terms)

    # --- dispatch -------------------------------------------------------------------

    def regime_for(self, s: complex, m: int) -> Regime:
        if s.real >= self.series_from[m]:
            return Regime.SERIES
        if s.real <= self.sigma_left:
            return Regime.REFLECTED
        return Regime.COMPLETED

    def eval(self, s: complex, m: int) -> EvalResult:
        """L_f^(m)(s) anywhere in the plane, tagged with the regime used."""
        s = complex(s)
        self._check_order(m)
        if s.imag < 0:
            mirrored = self.eval(s.conjugate(), m)
            return EvalResult(
                mirrored.value.conjugate(), mirrored.error_estimate, mirrored.regime, mirrored.terms
            )

        regime = self.regime_for(s, m)
        if regime is Regime.SERIES:
            result = self.dirichlet_eval(s, m)
        elif regime is Regime.REFLECTED:
            result = self._reflected_eval(s, m)
        else:
            result = self._completed_eval(s, m)

        if s.imag == 0:
            # real coefficients: L^(m) is real on the real axis
            result = EvalResult(complex(result.value.real, 0.0), result.error_estimate, result.regime, result.terms)
        return result

    def eval_precise(self, s: complex, m: int) -> EvalResult:
        """eval(s, m), redone in the completed regime when the table is too short for the series to meet tol."""
        s = complex(s)
        result = self.eval(s, m)
        if result.regime is not Regime.SERIES or result.error_estimate <= self.tol * self._lead_scale(s.real, m):
            return result
        mirrored = self._completed_eval(s.conjugate() if s.imag < 0 else s, m)
        value = mirrored.value.conjugate() if s.imag < 0 else mirrored.value
        if s.imag == 0:
            value = complex(value.real, 0.0)
        return EvalResult(value, mirrored.error_estimate, Regime.COMPLETED, mirrored.terms)

    def eval_in(self, regime: Regime, s: complex, m: int) -> EvalResult:
        """L^(m)(s) forced through one regime, for cross-validation on overlaps."""
        s = complex(s)
        self._check_order(m)
        if regime is Regime.SERIES:
            return self.dirichlet_eval(s, m)
        if regime is Regime.REFLECTED:
            return self._reflected_eval(s, m)
        return self._completed_eval(s, m)

    def functional_equation_residual(self, s: complex, m: int) -> float:
        """Relative gap between L^(m)(s) and sum_r binom(m,r) (-1)^r chi^(m-r)(s) L^(r)(1-s).

        The left side comes from the dispatched regime (completed in place of
        the reflected one, and of a series that cannot meet tol). Every
        L^(r)(1-s) on the right is taken in the completed regime at 1 - s
        itself, so neither side is derived from the other.
        """
        s = complex(s)
        self._check_order(m)
        direct = (self.eval_precise(s, m) if s.real > self.sigma_left else self._completed_eval(s, m)).value
        chi = self.chi_jet(s, m).values
        reflected = sum(
            comb(m, r) * (-1) ** r * chi[m - r] * self._completed_eval(1 - s, r).value for r in range(m + 1)
        )
        return abs(direct - reflected) / max(abs(direct), abs(reflected), 1e-300)

    # --- normalization ------------------------------------------------------------------

    def normalization(self, s: complex, m: int) -> complex:
        """Factor turning L^(m)(s) into F(s): n_f^s / (lambda(n_f) (-log n_f)^m), or 1 for m = 0."""
        if m == 0:
            return 1.0 + 0j
        n_f = self.table.n_f
        return complex(np.exp(s * log(n_f)) / (self.table.lam[n_f] * (-log(n_f)) ** m))

    def eval_F(self, s: complex, m: int, precise: bool = False) -> EvalResult:
        s = complex(s)
        result = self.eval_precise(s, m) if precise else self.eval(s, m)
        factor = self.normalization(s, m)
        return EvalResult(result.value * factor, result.error_estimate * abs(factor), result.regime, result.terms)

    def normalized_F(self, s: complex, m: int) -> complex:
        """F(s); tends to 1 as Re s grows."""
        return self.eval_F(s, m).value
