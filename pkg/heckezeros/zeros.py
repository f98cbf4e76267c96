"""Zeros of L_f^(m): argument-principle counts, isolation, certification of the
zero-free regions, the real-axis scan and the two-sided Littlewood identity.

All phase tracking runs on the normalized function F (F = L for m = 0), which
has the same zeros as L^(m) and tends to 1 on the right.
"""
from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import ceil, floor, log, pi

import numpy as np
from loguru import logger
from scipy.integrate import quad
from scipy.optimize import brentq

from heckezeros.asymptotics import main_term_formula, zd2_envelope
from heckezeros.coefficients import rankin_constant
from heckezeros.errors import BoundaryZeroError, ContractError, DomainError
from heckezeros.lfunction import LFunctionEvaluator, certified_abscissa
from heckezeros.models import (
    CountReport,
    EnvelopeConstants,
    LittlewoodReport,
    Rectangle,
    WindingResult,
    ZeroFreeReport,
    ZeroMethod,
    ZeroRecord,
)
from heckezeros.ordering import merge_duplicates, order_zeros
from heckezeros.special_functions import gauss_rule

MAX_PHASE_STEP = pi / 2
MIN_SEGMENT = 1e-6
SMALL_VALUE = 1e-8  # relative to the neighbouring samples
UNRELIABLE = 0.25  # error estimate / |F| above which a sample cannot carry phase
PERTURBATIONS = (1e-3, 2e-3, 3e-3)
WINDING_TOLERANCE = 0.01
MIN_EDGE_SAMPLES = 8

NEWTON_ITERATIONS = 50
NEWTON_CELL = 0.5
NEWTON_XTOL = 1e-13
NEWTON_STALL = 1e-9
# well above MIN_SEGMENT, so cell edges never need sub-segment phase refinement
MIN_CELL = 1e-4
BISECTION_GRID = 5
BISECTION_ROUNDS = 60
BISECTION_XTOL = 1e-10
RESIDUAL_TOL = 1e-9
SPLIT_RATIOS = (0.5, 0.45, 0.55, 0.4, 0.6)

SCAN_STEP = 0.01
SCAN_XTOL = 1e-10
NEAR_ZERO = 1e-12

ARG_PANEL = 0.5
ARG_POINTS = 8
LOG_CHUNK = 10.0
LEFT_SEARCH_WIDTH = 10.0
LEFT_SHIFTS = 5
RIGHT_SCAN_WIDTH = 2.0
RIGHT_SCAN_STEP = 0.5


@dataclass(frozen=True)
class EdgeTrace:
    phase: float  # continuous change of arg F from start to end
    min_abs: float
    suspect: bool


class ZeroFinder:
    """Counting and locating zeros of one evaluator's L^(m).

    Edge samples are cached, so nested contours (subdivision cells, a grid of
    heights) only pay for the points they do not share.
    """

    def __init__(
        self,
        evaluator: LFunctionEvaluator,
        jobs: int = 1,
        t_floor: float = 0.1,
        max_height: float = 100.0,
        step: float = 0.25,
    ):
        if not 0 < t_floor < max_height:
            raise ContractError(f"need 0 < t_floor < max_height, got {t_floor}, {max_height}")
        self.evaluator = evaluator
        self.table = evaluator.table
        self.jobs = jobs
        self.t_floor = t_floor
        self.max_height = max_height
        self.step = step
        self._values: dict = {}
        self._traces: dict = {}
        self._certified: dict[int, ZeroFreeReport] = {}
        self._lock = threading.Lock()

    # --- sampling ---------------------------------------------------------------------

    @staticmethod
    def _key(z: complex) -> tuple[float, float]:
        return round(z.real, 12), round(z.imag, 12)

    def _sample(self, z: complex, m: int) -> tuple[complex, float]:
        key = (self._key(z), m)
        with self._lock:
            hit = self._values.get(key)
        if hit is not None:
            return hit
        result = self.evaluator.eval_F(z, m, precise=True)
        sample = (result.value, result.error_estimate)
        with self._lock:
            self._values[key] = sample
        return sample

    def _trace(self, z0: complex, z1: complex, m: int) -> EdgeTrace:
        """Phase change of F along the segment z0 -> z1, refined until each step is below pi/2."""
        key = (self._key(z0), self._key(z1), m)
        with self._lock:
            hit = self._traces.get(key)
        if hit is not None:
            return hit

        length = abs(z1 - z0)
        n = max(MIN_EDGE_SAMPLES, ceil(length / self.step))
        ts = np.linspace(0.0, 1.0, n + 1)
        samples = [self._sample(z0 + t * (z1 - z0), m) for t in ts]
        magnitudes = [abs(v) for v, _ in samples]
        suspect = any(err > UNRELIABLE * abs(v) for v, err in samples)
        for i in range(1, n):
            if magnitudes[i] < SMALL_VALUE * max(magnitudes[i - 1], magnitudes[i + 1]):
                suspect = True

        total = 0.0
        stack = [(ts[i], samples[i][0], ts[i + 1], samples[i + 1][0]) for i in range(n)]
        while stack:
            ta, va, tb, vb = stack.pop()
            if va == 0 or vb == 0:
                suspect = True
                continue
            d = float(np.angle(vb / va))
            if abs(d) <= MAX_PHASE_STEP:
                total += d
                continue
            if (tb - ta) * length < MIN_SEGMENT:
                suspect = True
                total += d
                continue
            tm = 0.5 * (ta + tb)
            vm, em = self._sample(z0 + tm * (z1 - z0), m)
            magnitudes.append(abs(vm))
            if em > UNRELIABLE * abs(vm) or abs(vm) < SMALL_VALUE * max(abs(va), abs(vb)):
                suspect = True
            stack.append((tm, vm, tb, vb))
            stack.append((ta, va, tm, vm))

        trace = EdgeTrace(total, min(magnitudes), suspect)
        with self._lock:
            self._traces[key] = trace
        return trace

    def _edges(self, rect: Rectangle, m: int) -> dict[str, EdgeTrace]:
        a = complex(rect.sigma_min, rect.t_min)
        b = complex(rect.sigma_max, rect.t_min)
        c = complex(rect.sigma_max, rect.t_max)
        d = complex(rect.sigma_min, rect.t_max)
        # horizontal edges run left to right, vertical ones bottom to top
        return {
            "bottom": self._trace(a, b, m),
            "right": self._trace(b, c, m),
            "top": self._trace(d, c, m),
            "left": self._trace(a, d, m),
        }

    @staticmethod
    def _perturb(rect: Rectangle, suspect: set[str], delta: float) -> Rectangle:
        return Rectangle(
            rect.sigma_min - (delta if "left" in suspect else 0.0),
            rect.sigma_max + (delta if "right" in suspect else 0.0),
            rect.t_min + (delta if "bottom" in suspect else 0.0),
            rect.t_max + (delta if "top" in suspect else 0.0),
        )

    # --- counting ---------------------------------------------------------------------

    def winding(self, rect: Rectangle, m: int, perturb: bool = True) -> WindingResult:
        """Zeros of L^(m) inside rect by the argument principle, with boundary perturbation."""
        deltas = (0.0,) + (PERTURBATIONS if perturb else ())
        current = rect
        moved: set[str] = set()  # every edge found suspect so far stays moved
        for delta in deltas:
            if delta:
                current = self._perturb(rect, moved, delta)
                logger.warning("[zeros] boundary zero suspected on {} of {}; retrying at {}", sorted(moved), rect, current)
            edges = self._edges(current, m)
            suspect = {name for name, e in edges.items() if e.suspect}
            if suspect:
                moved |= suspect
                continue
            total = edges["bottom"].phase + edges["right"].phase - edges["top"].phase - edges["left"].phase
            winding = total / (2 * pi)
            count = round(winding)
            residual = abs(winding - count)
            if residual > WINDING_TOLERANCE or count < 0:
                moved |= set(edges)
                continue
            return WindingResult(int(count), current, delta, residual)
        raise BoundaryZeroError(f"could not clear the boundary of {rect} for m={m}")

    def winding_count(self, rect: Rectangle, m: int) -> int:
        return self.winding(rect, m).count

    # --- isolation ----------------------------------------------------------------------

    @staticmethod
    def _split(rect: Rectangle, ratio: float) -> list[Rectangle]:
        sm = rect.sigma_min + ratio * rect.width
        tm = rect.t_min + ratio * rect.height
        return [
            Rectangle(rect.sigma_min, sm, rect.t_min, tm),
            Rectangle(sm, rect.sigma_max, rect.t_min, tm),
            Rectangle(rect.sigma_min, sm, tm, rect.t_max),
            Rectangle(sm, rect.sigma_max, tm, rect.t_max),
        ]

    def _subdivide(self, rect: Rectangle, count: int, m: int) -> list[tuple[Rectangle, int]]:
        for ratio in SPLIT_RATIOS:
            try:
                children = [(child, self.winding(child, m, perturb=False).count) for child in self._split(rect, ratio)]
            except BoundaryZeroError:
                logger.debug("[zeros] split {} of {} hits a zero; trying another ratio", ratio, rect)
                continue
            if sum(c for _, c in children) == count:
                return [(child, c) for child, c in children if c > 0]
        raise BoundaryZeroError(f"no clean subdivision of {rect} for m={m}")

    def _newton(self, start: complex, m: int, cell: Rectangle) -> complex | None:
        z = start
        previous = float("inf")
        for _ in range(NEWTON_ITERATIONS):
            f = self.evaluator.eval_precise(z, m).value
            df = self.evaluator.eval_precise(z, m + 1).value
            if df == 0:
                return None
            step = f / df
            z -= step
            if not cell.contains(z):
                return None
            scale = max(1.0, abs(z))
            if abs(step) <= NEWTON_XTOL * scale:
                return z
            # steps stopped shrinking at the evaluation noise floor
            if abs(step) >= previous and previous <= NEWTON_STALL * scale:
                return z
            previous = abs(step)
        return None

    def _bisect(self, cell: Rectangle, m: int) -> ZeroRecord:
        """Shrink a one-zero cell onto the minimum of |L^(m)|, halving it each round."""
        half_w, half_h = 0.5 * cell.width, 0.5 * cell.height
        center = cell.center
        offsets = np.linspace(-1.0, 1.0, BISECTION_GRID)
        for _ in range(BISECTION_ROUNDS):
            if np.hypot(half_w, half_h) <= BISECTION_XTOL * max(1.0, abs(center)):
                break
            nodes = [center + complex(dx * half_w, dy * half_h) for dx in offsets for dy in offsets]
            center = min(nodes, key=lambda z: abs(self._sample(z, m)[0]))
            half_w, half_h = 0.5 * half_w, 0.5 * half_h
        final = Rectangle(center.real - half_w, center.real + half_w, center.imag - half_h, center.imag + half_h)
        logger.warning("[zeros] Newton did not settle in {}; |L| bisection gives {}", cell, center)
        return self._record(center, m, final, ZeroMethod.BISECTION, flagged=True)

    def _record(self, z: complex, m: int, cell: Rectangle, method: ZeroMethod, multiplicity: int = 1, flagged: bool = False) -> ZeroRecord:
        residual = abs(self.evaluator.eval_precise(z, m).value)
        f_residual = residual * abs(self.evaluator.normalization(z, m))
        if f_residual > RESIDUAL_TOL:
            flagged = True
        return ZeroRecord(
            location=complex(z),
            m=m,
            residual=residual,
            isolation_radius=0.5 * cell.diameter,
            method=method,
            multiplicity=multiplicity,
            flagged=flagged,
        )

    def _process(self, item: tuple[Rectangle, int], m: int):
        """One frontier cell -> (records, children)."""
        cell, count = item
        if count == 1 and cell.diameter <= NEWTON_CELL:
            z = self._newton(cell.center, m, cell)
            if z is not None:
                return [self._record(z, m, cell, ZeroMethod.NEWTON)], []
            logger.debug("[zeros] Newton failed in {}; subdividing", cell)
        if cell.diameter < MIN_CELL:
            if count == 1:
                return [self._bisect(cell, m)], []
            logger.warning("[zeros] irreducible cell {} holds {} zeros", cell, count)
            return [self._record(cell.center, m, cell, ZeroMethod.SUBDIVISION, count, True)], []
        try:
            return [], self._subdivide(cell, count, m)
        except BoundaryZeroError:
            if count == 1:
                return [self._bisect(cell, m)], []
            logger.warning("[zeros] cell {} with {} zeros cannot be split cleanly", cell, count)
            return [self._record(cell.center, m, cell, ZeroMethod.SUBDIVISION, count, True)], []

    def _isolate(self, rect: Rectangle, count: int, m: int) -> list[ZeroRecord]:
        frontier = [(rect, count)] if count else []
        records: list[ZeroRecord] = []
        with ThreadPoolExecutor(max_workers=self.jobs) as pool:
            while frontier:
                results = list(pool.map(lambda item: self._process(item, m), frontier))
                frontier = []
                for found, children in results:
                    records.extend(found)
                    frontier.extend(children)
        records = merge_duplicates(records)
        total = sum(r.multiplicity for r in records)
        if total != count:
            logger.warning("[zeros] isolated {} zeros in {} but the winding count is {}", total, rect, count)
        return order_zeros(records)

    def isolate_zeros(self, rect: Rectangle, m: int) -> list[ZeroRecord]:
        """Every zero of L^(m) in rect, refined and sorted by height."""
        top = self.winding(rect, m)
        return self._isolate(top.rect, top.count, m)

    # --- strips and certification --------------------------------------------------------

    def default_alpha(self) -> float:
        return -floor(self.evaluator.center + 0.5) - 1.0

    def left_abscissa(self, m: int) -> float:
        report = self._certified.get(m)
        return report.alpha if report is not None else self.default_alpha()

    def strip(self, m: int, T: float, t_min: float | None = None) -> Rectangle:
        return Rectangle(self.left_abscissa(m), self.evaluator.sigma_right[m], self.t_floor if t_min is None else t_min, T)

    def envelope_constants(self, m: int) -> EnvelopeConstants:
        return EnvelopeConstants(
            n_f=self.table.n_f,
            c_f=rankin_constant(self.table, self.table.length),
            lambda_nf=self.table.lambda_nf,
            sigma_right=self.evaluator.sigma_right[m],
        )

    def _check_height(self, T: float) -> None:
        if not self.t_floor < T <= self.max_height:
            raise DomainError(f"T = {T} outside ({self.t_floor}, {self.max_height}]")

    def _report(self, m: int, T: float, result: WindingResult, sigma: float | None = None, envelope: float | None = None) -> CountReport:
        main = main_term_formula(T, m, self.table.n_f)
        deviation = result.count - main
        provenance = self.evaluator.provenance()
        provenance.update(
            {"alpha": result.rect.sigma_min, "sigma_right": result.rect.sigma_max, "t_floor": self.t_floor}
        )
        return CountReport(
            m=m,
            T=T,
            computed_count=result.count,
            main_term=main,
            deviation=deviation,
            deviation_over_logT=deviation / log(T),
            sigma=sigma,
            envelope=envelope,
            perturbation=result.perturbation,
            winding_residual=result.residual,
            provenance=provenance,
        )

    def count_heights(self, Ts, m: int) -> list[CountReport]:
        """N_{f,m}(T) for a grid of heights, sharing the vertical edges between them."""
        Ts = sorted(float(T) for T in Ts)
        if not Ts:
            raise ContractError("empty height grid")
        for T in Ts:
            self._check_height(T)
        alpha, sigma_right = self.left_abscissa(m), self.evaluator.sigma_right[m]
        bottom = self._trace(complex(alpha, self.t_floor), complex(sigma_right, self.t_floor), m)

        reports = []
        right = left = 0.0
        clean = not bottom.suspect
        previous = self.t_floor
        for T in Ts:
            r = self._trace(complex(sigma_right, previous), complex(sigma_right, T), m)
            l = self._trace(complex(alpha, previous), complex(alpha, T), m)
            right += r.phase
            left += l.phase
            clean = clean and not (r.suspect or l.suspect)
            previous = T
            top = self._trace(complex(alpha, T), complex(sigma_right, T), m)
            winding = (bottom.phase + right - top.phase - left) / (2 * pi)
            count = round(winding)
            if clean and not top.suspect and abs(winding - count) <= WINDING_TOLERANCE:
                result = WindingResult(int(count), self.strip(m, T), 0.0, abs(winding - count))
            else:
                result = self.winding(self.strip(m, T), m)
            reports.append(self._report(m, T, result))
            logger.info("[zeros] N_{{f,{}}}({}) = {}", m, T, result.count)
        return reports

    def count_to_height(self, T: float, m: int) -> CountReport:
        return self.count_heights([T], m)[0]

    def count_right_of(self, sigma: float, T: float, m: int) -> CountReport:
        """N_{f,m}(sigma, T) with the density envelope attached."""
        if sigma <= 0.5:
            raise DomainError(f"sigma = {sigma} must exceed 1/2")
        self._check_height(T)
        envelope = zd2_envelope(sigma, T, m, self.envelope_constants(m))
        sigma_right = self.evaluator.sigma_right[m]
        if sigma >= sigma_right:
            rect = Rectangle(sigma, sigma + 1.0, self.t_floor, T)
            return self._report(m, T, WindingResult(0, rect), sigma, envelope)
        result = self.winding(Rectangle(sigma, sigma_right, self.t_floor, T), m)
        return self._report(m, T, result, sigma, envelope)

    def _left_clear(self, alpha: float, m: int) -> tuple[bool, dict]:
        rect = Rectangle(alpha - LEFT_SEARCH_WIDTH, alpha, self.t_floor, self.max_height)
        complex_count = self.winding_count(rect, m)
        real = self.real_zero_scan(alpha - LEFT_SEARCH_WIDTH, alpha, m)
        per_interval = np.histogram(real, bins=np.arange(alpha - LEFT_SEARCH_WIDTH, alpha + 0.5, 1.0))[0]
        evidence = {"complex_count": complex_count, "real_zeros": len(real), "per_interval": per_interval.tolist()}
        return complex_count == 0 and bool(np.all(per_interval == 1)), evidence

    def zero_free_certify(self, m: int, t_grid_step: float = 1.0) -> ZeroFreeReport:
        """Right half-plane certificate plus an empirical left-region analogue.

        The right side is the majorant bound, checked against a sigma x t grid
        of |F - 1| from sigma_right outwards. The lowest zero in the strip is
        recorded as the empirical lower edge of the counting contour.
        """
        sigma_right, majorant = certified_abscissa(self.table, m)
        ts = np.arange(0.0, self.max_height + t_grid_step, t_grid_step)
        sigmas = sigma_right + np.arange(0.0, RIGHT_SCAN_WIDTH + 1e-9, RIGHT_SCAN_STEP)
        F = np.array([[self.evaluator.normalized_F(complex(sigma, t), m) for t in ts] for sigma in sigmas])
        evidence = {
            "majorant": majorant,
            "min_abs_F_on_sigma_right": float(np.abs(F[0]).min()),
            "max_abs_F_minus_1": float(np.abs(F - 1).max()),
            "grid_points": int(F.size),
            "t_grid_step": t_grid_step,
        }

        alpha = self.default_alpha()
        cleared = False
        for _ in range(LEFT_SHIFTS):
            cleared, left_evidence = self._left_clear(alpha, m)
            if cleared:
                break
            logger.debug("[zeros] left strip below {} not clean for m={}: {}", alpha, m, left_evidence)
            alpha -= 1.0
        evidence["left"] = left_evidence
        evidence["left_certified"] = cleared
        if not cleared:
            logger.warning("[zeros] no clean left strip found for m={}; alpha={} is uncertified", m, alpha)

        epsilon = self.t_floor
        inner = Rectangle(alpha, -epsilon, epsilon, self.max_height)
        stray = self.isolate_zeros(inner, m)
        left_radius = max((abs(r.location) for r in stray), default=0.0)
        evidence["left_region_zeros"] = [[r.location.real, r.location.imag] for r in stray]

        report = ZeroFreeReport(
            m=m,
            sigma_right=sigma_right,
            alpha=alpha,
            epsilon=epsilon,
            left_radius=left_radius,
            method="majorant+grid; winding+real-scan",
            evidence=evidence,
        )
        self._certified[m] = report
        report.first_zero_height = self.first_zero_height(m)
        logger.info(
            "[zeros] m={} zero-free for Re s >= {} and left of {}; first zero at height {}",
            m, sigma_right, alpha, report.first_zero_height,
        )
        return report

    def first_zero_height(self, m: int, increment: float = 10.0) -> float | None:
        """Height of the lowest complex zero in the strip, or None below max_height."""
        height = min(increment, self.max_height)
        while True:
            count = self.winding_count(self.strip(m, height), m)
            if count:
                zeros = self.isolate_zeros(self.strip(m, height), m)
                return min(r.location.imag for r in zeros)
            if height >= self.max_height:
                return None
            height = min(height + increment, self.max_height)

    # --- real axis ------------------------------------------------------------------------

    def _real_value(self, x: float, m: int) -> float:
        return self.evaluator.eval_precise(complex(x, 0.0), m).value.real

    def real_zero_scan(self, a: float, b: float, m: int) -> list[float]:
        """Sign changes of L^(m) on [a, b], step 0.01, refined to 1e-10."""
        if not a < b:
            raise ContractError(f"empty interval [{a}, {b}]")
        if b >= 0:
            raise DomainError(f"real scans run on the negative axis, got b = {b}")
        n = max(1, round((b - a) / SCAN_STEP))
        xs = np.linspace(a, b, n + 1)
        values = np.array([self._real_value(x, m) for x in xs])

        exact: list[float] = []
        for i in np.flatnonzero(np.abs(values) <= NEAR_ZERO * np.maximum(
            np.abs(np.roll(values, 1)), np.abs(np.roll(values, -1))
        )):
            # sample point landed on a zero: move it inside its cell
            shifted = xs[i] + SCAN_STEP / pi if i < n else xs[i] - SCAN_STEP / pi
            v = self._real_value(shifted, m)
            if abs(v) <= NEAR_ZERO * np.abs(values).max():
                exact.append(float(xs[i]))
                continue
            xs[i], values[i] = shifted, v

        roots = list(exact)
        for i in range(n):
            if values[i] * values[i + 1] < 0:
                roots.append(brentq(lambda x: self._real_value(x, m), xs[i], xs[i + 1], xtol=SCAN_XTOL))
        return sorted(roots)

    # --- Littlewood -----------------------------------------------------------------------

    def _log_abs_integral(self, sigma: float, t0: float, T: float, m: int) -> float:
        def integrand(t):
            return log(abs(self._sample(complex(sigma, t), m)[0]))

        edges = list(np.arange(t0, T, LOG_CHUNK)) + [T]
        return sum(quad(integrand, a, b, epsabs=1e-10, limit=200)[0] for a, b in zip(edges[:-1], edges[1:]) if b > a)

    def _arg_integral(self, t: float, sigma: float, sigma_right: float, m: int) -> float:
        """int_sigma^sigma_right arg F(u + it) du, arg continued leftwards from sigma_right."""
        x, w = gauss_rule(ARG_POINTS)
        panels = max(1, ceil((sigma_right - sigma) / ARG_PANEL))
        breaks = np.linspace(sigma, sigma_right, panels + 1)
        nodes = []
        for lo, hi in zip(breaks[:-1], breaks[1:]):
            half = 0.5 * (hi - lo)
            nodes.extend(zip(lo + half * (x + 1), half * w))
        nodes.sort(key=lambda node: -node[0])

        previous = complex(sigma_right, t)
        arg = float(np.angle(self._sample(previous, m)[0]))
        total = 0.0
        for u, weight in nodes:
            z = complex(u, t)
            trace = self._trace(z, previous, m)
            if trace.suspect:
                raise BoundaryZeroError(f"zero near the horizontal edge Im s = {t}")
            arg -= trace.phase
            total += weight * arg
            previous = z
        return total

    def littlewood_check(self, sigma: float, T: float, m: int, t0: float = 1.0) -> LittlewoodReport:
        """2 pi sum (Re rho - sigma) against the four boundary integrals of log F."""
        if sigma <= 0.5:
            raise DomainError(f"sigma = {sigma} must exceed 1/2")
        self._check_height(T)
        # any right edge inside the zero-free half-plane will do
        sigma_right = max(self.evaluator.sigma_right[m], sigma + 1.0)
        for delta in (0.0,) + PERTURBATIONS:
            # both horizontal edges move, since either may run through a zero
            bottom, height = t0 + delta, T + delta
            try:
                rect = Rectangle(sigma, sigma_right, bottom, height)
                top = self.winding(rect, m, perturb=False)
                zeros = self._isolate(rect, top.count, m)
                parts = {
                    "log_abs_left": self._log_abs_integral(sigma, bottom, height, m),
                    "log_abs_right": -self._log_abs_integral(sigma_right, bottom, height, m),
                    "arg_top": self._arg_integral(height, sigma, sigma_right, m),
                    "arg_bottom": -self._arg_integral(bottom, sigma, sigma_right, m),
                }
            except BoundaryZeroError:
                logger.warning("[zeros] Littlewood contour [{}, {}] touches a zero; perturbing", bottom, height)
                continue
            lhs = 2 * pi * sum(r.multiplicity * (r.location.real - sigma) for r in zeros)
            rhs = sum(parts.values())
            parts["perturbation"] = delta
            parts["t0"] = bottom
            return LittlewoodReport(
                m=m,
                sigma=sigma,
                T=height,
                sigma_right=sigma_right,
                lhs=lhs,
                rhs=rhs,
                parts=parts,
                discrepancy=abs(lhs - rhs),
                zeros_used=len(zeros),
            )
        raise BoundaryZeroError(f"Littlewood contour up to T={T} could not be cleared")

    def littlewood_density_bound(self, sigma: float, T: float, m: int) -> tuple[int, float]:
        """(N_{f,m}(sigma, T), sum_{Re rho >= s1} (Re rho - s1)/(sigma - s1)) with s1 = (sigma + 1/2)/2."""
        if sigma <= 0.5:
            raise DomainError(f"sigma = {sigma} must exceed 1/2")
        self._check_height(T)
        s1 = 0.5 * (sigma + 0.5)
        zeros = self.isolate_zeros(Rectangle(s1, self.evaluator.sigma_right[m], self.t_floor, T), m)
        count = sum(r.multiplicity for r in zeros if r.location.real >= sigma)
        bound = sum(r.multiplicity * (r.location.real - s1) for r in zeros) / (sigma - s1)
        return count, bound
