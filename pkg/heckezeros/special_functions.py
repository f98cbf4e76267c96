"""Complex log-gamma, polygamma, derivative jets and the incomplete integrals
behind the completed L-function."""
from __future__ import annotations

import cmath
from functools import lru_cache
from math import comb, factorial, log, pi

import mpmath
import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq
from scipy.special import bernoulli, gamma, gammaincc

from heckezeros.errors import ContractError, DomainError
from heckezeros.models import DerivativeJet, PrecisionMode, QuadratureResult

SHIFT_THRESHOLD = 12.0
STIRLING_TERMS = 10
DEFAULT_DELTA = 0.1
HALF_LOG_2PI = 0.5 * log(2 * pi)

# B_2, B_4, ..., B_{2K}
_B2K = bernoulli(2 * STIRLING_TERMS)[2::2].astype(float)


def _check_pole(s: complex) -> None:
    nearest = round(s.real)
    if nearest <= 0 and abs(s - nearest) < 1e-14:
        raise DomainError(f"Gamma has a pole at {s}")


def _shift(s: complex) -> tuple[complex, np.ndarray]:
    """Smallest z = s + N with Re z >= threshold, and the skipped points s, ..., s+N-1."""
    steps = max(0, int(np.ceil(SHIFT_THRESHOLD - s.real)))
    return s + steps, s + np.arange(steps)


def log_gamma(s: complex) -> complex:
    """Principal-branch log Gamma, continuous on C minus (-inf, 0]."""
    s = complex(s)
    _check_pole(s)
    z, skipped = _shift(s)
    correction = np.sum(np.log(skipped)) if len(skipped) else 0.0
    inv = 1.0 / z
    inv2 = inv * inv
    series = 0.0
    power = inv
    for k, b in enumerate(_B2K, start=1):
        series += b / (2 * k * (2 * k - 1)) * power
        power *= inv2
    return complex((z - 0.5) * cmath.log(z) - z + HALF_LOG_2PI + series - correction)


def polygamma(n: int, s: complex) -> complex:
    """psi^(n)(s); n = 0 is the digamma function."""
    s = complex(s)
    _check_pole(s)
    z, skipped = _shift(s)
    inv = 1.0 / z
    inv2 = inv * inv
    if n == 0:
        value = cmath.log(z) - 0.5 * inv
        power = inv2
        for k, b in enumerate(_B2K, start=1):
            value -= b / (2 * k) * power
            power *= inv2
        shift_sum = np.sum(1.0 / skipped) if len(skipped) else 0.0
        return complex(value - shift_sum)

    total = factorial(n - 1) * inv ** n + factorial(n) / 2 * inv ** (n + 1)
    power = inv ** (n + 2)
    for k, b in enumerate(_B2K, start=1):
        total += b * factorial(2 * k + n - 1) / factorial(2 * k) * power
        power *= inv2
    value = (-1) ** (n + 1) * total
    if len(skipped):
        value -= (-1) ** n * factorial(n) * np.sum(skipped ** (-(n + 1)))
    return complex(value)


def polygamma_jet(s: complex, r: int, delta: float | None = DEFAULT_DELTA) -> DerivativeJet:
    """Jet of log Gamma at s: [log Gamma, psi, psi', ..., psi^(r-1)]."""
    s = complex(s)
    if delta is not None and abs(cmath.phase(s)) > pi - delta:
        raise DomainError(f"|arg {s}| exceeds pi - {delta}")
    values = [log_gamma(s)] + [polygamma(j - 1, s) for j in range(1, r + 1)]
    return DerivativeJet(center=s, order=r, values=np.array(values, dtype=complex))


# --- jet calculus ---------------------------------------------------------------

def bell_polynomials(g, r: int) -> np.ndarray:
    """Complete Bell polynomials B_0..B_r of g = (g_1, ..., g_r).

    B_{n+1} = sum_{i=0}^{n} C(n, i) B_{n-i} g_{i+1}.
    """
    g = np.asarray(g, dtype=complex)
    if len(g) < r:
        raise ContractError(f"need {r} derivatives, got {len(g)}")
    B = np.zeros(r + 1, dtype=complex)
    B[0] = 1.0
    for n in range(r):
        B[n + 1] = sum(comb(n, i) * B[n - i] * g[i] for i in range(n + 1))
    return B


def bell_ratio(jet: DerivativeJet, r: int) -> complex:
    """F^(r)/F given the jet of G = log F."""
    if jet.order < r:
        raise ContractError(f"jet of order {jet.order} cannot give derivative {r}")
    return complex(bell_polynomials(jet.values[1:r + 1], r)[r])


def jet_exp(log_jet: DerivativeJet) -> DerivativeJet:
    """Jet of exp(G) from the jet of G."""
    r = log_jet.order
    B = bell_polynomials(log_jet.values[1:], r)
    return DerivativeJet(log_jet.center, r, np.exp(log_jet.values[0]) * B)


def jet_mul(a: DerivativeJet, b: DerivativeJet) -> DerivativeJet:
    r = min(a.order, b.order)
    values = np.array(
        [sum(comb(n, i) * a.values[i] * b.values[n - i] for i in range(n + 1)) for n in range(r + 1)],
        dtype=complex,
    )
    return DerivativeJet(a.center, r, values)


def jet_reciprocal(a: DerivativeJet) -> DerivativeJet:
    if a.values[0] == 0:
        raise DomainError(f"reciprocal of a jet vanishing at {a.center}")
    h = np.zeros(a.order + 1, dtype=complex)
    h[0] = 1.0 / a.values[0]
    for n in range(1, a.order + 1):
        h[n] = -h[0] * sum(comb(n, i) * a.values[i] * h[n - i] for i in range(1, n + 1))
    return DerivativeJet(a.center, a.order, h)


def jet_reflect(jet: DerivativeJet, center: complex) -> DerivativeJet:
    """Jet of s -> G(c - s) at s = center, from the jet of G at c - center."""
    signs = (-1.0) ** np.arange(jet.order + 1)
    return DerivativeJet(complex(center), jet.order, jet.values * signs)


def sine_jet(z: complex, r: int) -> DerivativeJet:
    """Derivatives of sin(pi z)."""
    j = np.arange(r + 1)
    values = pi ** j * np.sin(pi * complex(z) + j * pi / 2)
    return DerivativeJet(complex(z), r, values.astype(complex))


def rgamma_jet(z: complex, r: int) -> DerivativeJet:
    """Jet of 1/Gamma at z; finite at the non-positive integers."""
    z = complex(z)
    if z.real >= 0.5:
        lg = polygamma_jet(z, r, delta=None)
        return jet_exp(DerivativeJet(z, r, -lg.values))
    # 1/Gamma(z) = Gamma(1 - z) sin(pi z) / pi
    reflected = jet_exp(jet_reflect(polygamma_jet(1 - z, r, delta=None), z))
    product = jet_mul(reflected, sine_jet(z, r))
    return DerivativeJet(z, r, product.values / pi)


# --- incomplete integrals ---------------------------------------------------------

@lru_cache(maxsize=None)
def gauss_rule(points: int) -> tuple[np.ndarray, np.ndarray]:
    return leggauss(points)


DECAY_MARGIN = 38.0
PANEL_VARIATION = 6.0


def _upper_limit(w: complex, x: complex, m: int, phase: float) -> float:
    """v where the integrand has decayed e^-38 below its peak on [0, inf)."""
    sigma, rho = w.real, x.real
    v_peak = log(sigma / rho) if sigma > rho else 0.0

    def log_mag(v):
        return sigma * v - rho * np.exp(v) + m * np.log1p(v + abs(phase))

    target = log_mag(v_peak) - DECAY_MARGIN

    def excess(v):
        return log_mag(v) - target

    hi = v_peak + 1.0
    while excess(hi) > 0:
        hi = 2 * hi + 1.0
    return brentq(excess, v_peak, hi, xtol=1e-6)


def _panel_breaks(w: complex, x: complex, V: float) -> np.ndarray:
    # equal shares of the total variation |w| v + |x| (e^v - 1)
    fine = np.linspace(0.0, V, 4001)
    variation = abs(w) * fine + abs(x) * np.expm1(fine)
    panels = max(4, int(np.ceil(variation[-1] / PANEL_VARIATION)))
    return np.interp(np.linspace(0.0, variation[-1], panels + 1), variation, fine)


def _moment_sums(w, x, m, phase, breaks, points):
    nodes, weights = gauss_rule(points)
    a, b = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (b - a)
    v = (a + b) / 2 + half * nodes[None, :]
    wt = half * weights[None, :]
    with np.errstate(under="ignore"):
        base = np.exp(w * v - x * np.exp(v)) * wt
    log_factor = v + 1j * phase
    sums = np.empty(m + 1, dtype=complex)
    mags = np.empty(m + 1)
    term = base
    for j in range(m + 1):
        sums[j] = term.sum()
        mags[j] = np.abs(term).sum()
        term = term * log_factor
    return sums, mags, v.size


def incomplete_moments(
    w: complex,
    x: complex,
    m: int,
    phase: float = 0.0,
    precision: PrecisionMode = PrecisionMode.DOUBLE,
) -> tuple[np.ndarray, np.ndarray, int]:
    """J_j = int_1^inf (log u + i phase)^j u^(w-1) e^(-x u) du for j = 0..m.

    Returns (values, error_estimates, evaluations). The substitution u = e^v
    turns the integrand into (v + i phase)^j exp(w v - x e^v) on [0, inf).
    """
    w, x = complex(w), complex(x)
    if x.real <= 0:
        raise DomainError(f"Re x must be positive, got {x}")
    if m < 0:
        raise ContractError(f"negative log power {m}")

    V = _upper_limit(w, x, m, phase)
    breaks = _panel_breaks(w, x, V)

    if precision is PrecisionMode.EXTENDED:
        return _moments_mpmath(w, x, m, phase, breaks)

    fine, mags, evals = _moment_sums(w, x, m, phase, breaks, 24)
    coarse, _, more = _moment_sums(w, x, m, phase, breaks, 16)
    errors = np.abs(fine - coarse) + 4e-16 * mags
    return fine, errors, evals + more


def _moments_mpmath(w, x, m, phase, breaks):
    points = [mpmath.mpf(float(b)) for b in breaks]
    values = np.empty(m + 1, dtype=complex)
    errors = np.empty(m + 1)
    with mpmath.workdps(30):
        mw, mx = mpmath.mpc(w), mpmath.mpc(x)
        for j in range(m + 1):
            def f(v, j=j):
                return (v + 1j * phase) ** j * mpmath.exp(mw * v - mx * mpmath.exp(v))

            val, err = mpmath.quad(f, points, error=True)
            values[j] = complex(val)
            errors[j] = float(err) + 1e-17 * abs(values[j])
    return values, errors, 0


def log_weighted_incomplete(
    w: complex,
    x: complex,
    m: int,
    phase: float = 0.0,
    precision: PrecisionMode = PrecisionMode.DOUBLE,
) -> complex:
    """I_m(w, x) = int_1^inf (log y)^m y^(w-1) e^(-x y) dy (phase 0)."""
    values, _, _ = incomplete_moments(w, x, m, phase, precision)
    return complex(values[m])


def log_power_tail(lower: float, exponent: float, j: int) -> float:
    """int_lower^inf (log u)^j u^-exponent du = Gamma(j+1, (exponent-1) log lower) / (exponent-1)^(j+1)."""
    if exponent <= 1:
        raise DomainError(f"integral diverges for exponent {exponent} <= 1")
    if lower < 1:
        raise DomainError(f"lower limit {lower} below 1")
    a = exponent - 1
    return float(gammaincc(j + 1, a * log(lower)) * gamma(j + 1) / a ** (j + 1))


# --- decaying integrands on [1, inf) ------------------------------------------------

EXP_SINH_TAU = 4.5


def integrate_decaying(
    integrand,
    budget: int = 4096,
    decay_rate: float = 1.0,
    tol: float = 1e-13,
    abs_tol: float = 0.0,
) -> QuadratureResult:
    """Exp-sinh quadrature of a vectorized integrand over [1, inf).

    y = 1 + exp(pi/2 sinh tau) / decay_rate, trapezoidal in tau with the step
    halved per level; each level reuses the previous sum.
    """
    def transformed(tau):
        g = np.exp(0.5 * pi * np.sinh(tau))
        y = 1.0 + g / decay_rate
        jac = 0.5 * pi * np.cosh(tau) * g / decay_rate
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            vals = np.asarray(integrand(y)) * jac
        return np.where(np.isfinite(vals), vals, 0.0)

    h = 1.0
    tau = np.arange(-EXP_SINH_TAU, EXP_SINH_TAU + h / 2, h)
    if len(tau) > budget:
        raise ContractError(f"budget {budget} below the first level ({len(tau)} points)")
    first = transformed(tau)
    raw = first.sum()
    evaluations = len(tau)
    estimate = h * raw
    # only one level so far: the L1 mass is the honest bound
    error = float(h * np.abs(first).sum())

    while True:
        h /= 2
        new_tau = np.arange(-EXP_SINH_TAU + h, EXP_SINH_TAU, 2 * h)
        if evaluations + len(new_tau) > budget:
            return QuadratureResult(estimate, error, evaluations, converged=False)
        raw = raw + transformed(new_tau).sum()
        evaluations += len(new_tau)
        previous, estimate = estimate, h * raw
        error = abs(estimate - previous)
        if error <= max(tol * abs(estimate), abs_tol):
            return QuadratureResult(estimate, error, evaluations, converged=True)
