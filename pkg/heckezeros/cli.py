"""Command-line front end: coefficient caches, evaluations, zero campaigns and the verify suite."""
from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass
from math import log, pi
from pathlib import Path

import numpy as np
from loguru import logger

from heckezeros.asymptotics import (
    density_envelope,
    jensen_check,
    lad_ratio,
    mean_square_numeric,
    rankin_fit,
)
from heckezeros.coefficients import (
    deligne_check,
    hecke_violations,
    load_or_build,
    ramanujan_congruence_violations,
)
from heckezeros.config import load_config
from heckezeros.errors import ConfigError, DataIntegrityError, DomainError, HeckeZerosError
from heckezeros.lfunction import LFunctionEvaluator
from heckezeros.models import CoefficientTable, EigenformSpec, Regime, RunConfig
from heckezeros.reports import (
    atomic_write_text,
    generate_text_summary,
    write_csv,
    write_json,
    write_zero_list,
)
from heckezeros.series import build_delta, delta_via_eisenstein
from heckezeros.validators import validate_config
from heckezeros.zeros import ZeroFinder

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

COUNT_COLUMNS = ["m", "T", "count", "main_term", "deviation", "deviation_over_logT", "perturbation"]
DENSITY_COLUMNS = ["m", "sigma", "T", "empirical_count", "envelope_zd2", "explicit_bound_zd1", "slack_logT", "o_constant", "passed"]
MEANSQUARE_COLUMNS = [
    "m", "sigma", "T", "numeric_integral", "reference_main", "difference",
    "predicted_error_order", "normalized_difference", "quadrature_error", "flagged",
]


# ─── session ─────────────────────────────────────────────────────────────────

@dataclass
class Session:
    config: RunConfig
    table: CoefficientTable
    evaluator: LFunctionEvaluator
    finder: ZeroFinder

    @property
    def out(self) -> Path:
        return Path(self.config.out)

    @property
    def max_T(self) -> float:
        return max(self.config.t_grid)


def open_session(config: RunConfig) -> Session:
    spec = EigenformSpec.from_weight(config.weight)
    table = load_or_build(spec, config.table_length, config.cache)
    evaluator = LFunctionEvaluator(table, max_order=max(config.orders), precision=config.precision)
    finder = ZeroFinder(evaluator, jobs=config.jobs, t_floor=config.t_floor, max_height=config.max_height)
    return Session(config, table, evaluator, finder)


def configure_logging(level: str) -> None:
    logger.remove()
    logger.add(sys.stderr, level=level, format="{time:HH:mm:ss} | {level: <7} | {message}")


def parse_complex(raw: str) -> complex:
    try:
        return complex(raw.replace(" ", "").replace("i", "j"))
    except ValueError as e:
        raise ConfigError(f"cannot read {raw!r} as a complex number") from e


# ─── commands ────────────────────────────────────────────────────────────────

def cmd_eval(session: Session, s: complex, m: int) -> int:
    result = session.evaluator.eval(s, m)
    print(f"s              = {s}")
    print(f"m              = {m}")
    print(f"value          = {result.value!r}")
    print(f"error_estimate = {result.error_estimate:.3e}")
    print(f"regime         = {result.regime.value}")
    return EXIT_OK


def coefficient_report(table: CoefficientTable) -> dict:
    deligne = deligne_check(table)
    fit = rankin_fit(table)
    report = {
        "weight": table.weight,
        "length": table.length,
        "n_f": table.n_f,
        "lambda_nf": table.lambda_nf,
        "hecke_violations": len(hecke_violations(table)),
        "deligne_max_ratio": deligne.max_ratio,
        "deligne_argmax": deligne.argmax,
        "rankin_constant": fit.c_estimate,
        "rankin_drift_exponent": fit.drift_exponent,
        "rankin_low_confidence": fit.low_confidence,
    }
    if table.weight == 12:
        report["ramanujan_congruence_violations"] = len(ramanujan_congruence_violations(min(table.length, 100)))
    return report


def cmd_coeffs(session: Session) -> int:
    report = coefficient_report(session.table)
    for key, value in report.items():
        print(f"{key:<32} {value}")
    write_json(session.out / f"coeffs_k{session.table.weight}.json", report)
    return EXIT_OK


def cmd_zeros(session: Session) -> int:
    payload = {}
    for m in session.config.orders:
        zeros = session.finder.isolate_zeros(session.finder.strip(m, session.max_T), m)
        write_zero_list(session.out / f"zeros_k{session.table.weight}_m{m}.txt", zeros)
        payload[f"m{m}"] = {"count": sum(r.multiplicity for r in zeros), "flagged": sum(r.flagged for r in zeros)}
        logger.info("[cli] m={}: {} zeros up to T={}", m, len(zeros), session.max_T)
    payload["provenance"] = session.evaluator.provenance()
    write_json(session.out / f"zeros_k{session.table.weight}.json", payload)
    return EXIT_OK


def _count_rows(session: Session) -> list[dict]:
    rows = []
    for m in session.config.orders:
        for report in session.finder.count_heights(session.config.t_grid, m):
            row = asdict(report)
            row["count"] = report.computed_count
            rows.append(row)
    return rows


def cmd_count(session: Session) -> int:
    rows = _count_rows(session)
    write_csv(session.out / f"count_k{session.table.weight}.csv", rows, COUNT_COLUMNS)
    write_json(session.out / f"count_k{session.table.weight}.json", rows)
    return EXIT_OK


def _with_provenance(session: Session, row: dict) -> dict:
    row["provenance"] = session.evaluator.provenance()
    return row


def _density_rows(session: Session, orders, heights) -> list[dict]:
    rows = []
    for m in orders:
        constants = session.finder.envelope_constants(m)
        for T in heights:
            for sigma in session.config.sigma_grid:
                count = session.finder.count_right_of(sigma, T, m)
                report = density_envelope(sigma, T, m, constants, count.computed_count)
                rows.append(_with_provenance(session, asdict(report)))
    return rows


def cmd_density(session: Session) -> int:
    rows = _density_rows(session, session.config.orders, [session.max_T])
    write_csv(session.out / f"density_k{session.table.weight}.csv", rows, DENSITY_COLUMNS)
    write_json(session.out / f"density_k{session.table.weight}.json", rows)
    failed = [r for r in rows if not r["passed"]]
    for r in failed:
        logger.error("[cli] density bound exceeded at m={}, sigma={}, T={}", r["m"], r["sigma"], r["T"])
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def cmd_meansquare(session: Session) -> int:
    rows = []
    for m in session.config.orders:
        for sigma in session.config.sigma_grid:
            for T in session.config.t_grid:
                report = mean_square_numeric(session.evaluator, sigma, T, m, jobs=session.config.jobs)
                rows.append(_with_provenance(session, asdict(report)))
    write_csv(session.out / f"meansquare_k{session.table.weight}.csv", rows, MEANSQUARE_COLUMNS)
    write_json(session.out / f"meansquare_k{session.table.weight}.json", rows)
    return EXIT_OK


def cmd_littlewood(session: Session) -> int:
    reports = [
        _with_provenance(session, asdict(session.finder.littlewood_check(sigma, session.max_T, m)))
        for m in session.config.orders
        for sigma in session.config.sigma_grid
    ]
    write_json(session.out / f"littlewood_k{session.table.weight}.json", reports)
    return EXIT_OK


# ─── verify ──────────────────────────────────────────────────────────────────

def _check(passed: bool, detail: str, **observed) -> dict:
    return {"passed": bool(passed), "detail": detail, **observed}


def check_coefficients(session: Session) -> dict:
    N = min(session.table.length, 10_000)
    two_ways = build_delta(N) == delta_via_eisenstein(N)
    violations = hecke_violations(session.table, N)
    congruence = ramanujan_congruence_violations(100)
    passed = two_ways and not violations and not congruence
    return _check(
        passed,
        f"delta two ways to {N}: {two_ways}; Hecke violations {len(violations)}; mod-691 violations {len(congruence)}",
        hecke_violations=violations[:10],
    )


def check_deligne_rankin(session: Session) -> dict:
    try:
        deligne = deligne_check(session.table)
    except DataIntegrityError as e:
        return _check(False, str(e))
    fit = rankin_fit(session.table)
    passed = fit.c_estimate > 0 and fit.drift_exponent <= 0.6 + 0.1
    return _check(
        passed,
        f"max |lambda|/d = {deligne.max_ratio:.6f}; C_f = {fit.c_estimate:.6f}; drift exponent {fit.drift_exponent:.3f}",
        rankin=asdict(fit),
    )


def check_functional_equation(session: Session, points: int = 200) -> dict:
    rng = np.random.default_rng(session.config.seed)
    top = min(3, max(session.config.orders))
    worst = 0.0
    for _ in range(points):
        s = complex(rng.uniform(-2.0, 3.0), rng.uniform(-50.0, 50.0))
        m = int(rng.integers(0, top + 1))
        worst = max(worst, session.evaluator.functional_equation_residual(s, m))
    return _check(worst <= 1e-7, f"worst relative residual {worst:.2e} over {points} points", worst=worst)


def check_regimes(session: Session) -> dict:
    ev = session.evaluator
    worst_ratio = 0.0
    for m in session.config.orders:
        for sigma in (1.25, 1.375, 1.5):
            for t in np.linspace(0.0, 40.0, 41):
                s = complex(sigma, t)
                a, b = ev.eval_in(Regime.SERIES, s, m), ev.eval_in(Regime.COMPLETED, s, m)
                allowed = a.error_estimate + b.error_estimate + 1e-12 * abs(a.value)
                worst_ratio = max(worst_ratio, abs(a.value - b.value) / allowed)
        for sigma in (-0.5, -0.25, 0.0):
            for t in np.linspace(0.5, 40.0, 41):
                s = complex(sigma, t)
                a, b = ev.eval_in(Regime.COMPLETED, s, m), ev.eval_in(Regime.REFLECTED, s, m)
                allowed = a.error_estimate + b.error_estimate + 1e-9 * abs(a.value)
                worst_ratio = max(worst_ratio, abs(a.value - b.value) / allowed)
    grid = [complex(sigma, t) for sigma in np.linspace(-2.0, 3.0, 10) for t in np.linspace(1.0, 50.0, 10)]
    chi_gap = max(abs(ev.chi_jet(s, 0).values[0] * ev.chi_jet(1 - s, 0).values[0] - 1) for s in grid)
    return _check(
        worst_ratio <= 1.0 and chi_gap <= 1e-9,
        f"worst |difference| / summed error {worst_ratio:.3f}; |chi(s)chi(1-s) - 1| <= {chi_gap:.1e} on {len(grid)} points",
    )


def check_zero_free(session: Session) -> dict:
    details = []
    passed = True
    for m in [m for m in session.config.orders if m <= 2]:
        report = session.finder.zero_free_certify(m)
        deviation = report.evidence["max_abs_F_minus_1"]
        ok = deviation <= 0.5 + 1e-9 and report.evidence["left_certified"]
        if session.table.weight == 12:
            real = session.finder.real_zero_scan(-30.0, -10.0, m)
            per_interval = np.histogram(real, bins=np.arange(-30.0, -9.5, 1.0))[0]
            ok = ok and bool(np.all(per_interval == 1))
        passed = passed and ok
        first = "none" if report.first_zero_height is None else f"{report.first_zero_height:.6f}"
        details.append(
            f"m={m}: sigma={report.sigma_right}, alpha={report.alpha}, max|F-1|={deviation:.3f}"
            f" on {report.evidence['grid_points']} points, first zero at height {first}"
        )
    return _check(passed, "; ".join(details))


def check_counts(session: Session) -> dict:
    heights = [T for T in session.config.t_grid if T >= 2 * pi * np.e]
    if not heights:
        return _check(True, "no grid height above 2*pi*e")
    counts = {m: {r.T: r for r in session.finder.count_heights(heights, m)} for m in sorted(set(session.config.orders) | {0})}
    worst = 0.0
    gap = 0.0
    for m, by_T in counts.items():
        for T, report in by_T.items():
            worst = max(worst, abs(report.deviation_over_logT))
            if m >= 1:
                difference = counts[0][T].computed_count - report.computed_count
                gap = max(gap, abs(difference - T / (2 * pi) * log(session.table.n_f)) / log(T))
    return _check(worst <= 3 and gap <= 3, f"max |deviation|/log T = {worst:.3f}; max secondary gap / log T = {gap:.3f}")


def check_littlewood(session: Session) -> dict:
    T = min(40.0, session.max_T)
    cases = [(2.0, 0), (0.55, 0), (0.75, 0), (0.55, 1), (0.75, 1)]
    details, passed = [], True
    for sigma, m in cases:
        if m not in session.config.orders:
            continue
        report = session.finder.littlewood_check(sigma, T, m)
        ok = report.discrepancy <= 1e-5 * max(1.0, abs(report.rhs))
        passed = passed and ok
        details.append(f"(sigma={sigma}, m={m}) gap {report.discrepancy:.1e}")
    return _check(passed, "; ".join(details))


def check_mean_squares(session: Session) -> dict:
    heights = [T for T in (20.0, 40.0, 80.0) if T <= session.config.max_height]
    passed = True
    details = []
    for sigma, m in ((2.0, 0), (0.75, 1), (1.0, 1)):
        if m not in session.config.orders or not heights:
            continue
        reports = [mean_square_numeric(session.evaluator, sigma, T, m) for T in heights]
        normalized = [abs(r.normalized_difference) for r in reports]
        # bounded: the last value stays within a fixed multiple of the first
        ok = normalized[-1] <= 5 * normalized[0] + 1.0
        jensen = jensen_check(session.evaluator, sigma, heights[0], m, mean_square=reports[0])
        passed = passed and ok and jensen.passed
        details.append(
            f"sigma={sigma}, m={m}: {', '.join(f'{v:.3g}' for v in normalized)};"
            f" mean log {jensen.mean_log:.4f} <= log mean {jensen.log_mean:.4f}"
        )
    ratio = lad_ratio(0.51, 0, session.table)
    passed = passed and abs(ratio - 1) <= 0.1
    details.append(f"limit ratio at sigma=0.51: {ratio:.4f}")
    return _check(passed, "; ".join(details))


def check_density(session: Session) -> dict:
    orders = [m for m in (0, 1) if m in session.config.orders]
    heights = [T for T in (40.0, 80.0) if T <= session.config.max_height]
    rows = _density_rows(session, orders, heights)
    failed = [(r["m"], r["sigma"], r["T"]) for r in rows if not r["passed"]]
    # the zero-weighted bound N(sigma, T) <= sum (Re rho - s1) / (sigma - s1) behind the density estimate
    weighted = []
    for m in orders:
        for T in heights[:1]:
            count, bound = session.finder.littlewood_density_bound(0.75, T, m)
            weighted.append({"m": m, "T": T, "count": count, "bound": bound})
            if count > bound:
                failed.append((m, 0.75, T))
    return _check(
        not failed,
        f"{sum(r['passed'] for r in rows)}/{len(rows)} grid points under the explicit bound;"
        f" zero-weighted bound holds at {sum(w['count'] <= w['bound'] for w in weighted)}/{len(weighted)}",
        failures=failed,
        weighted_bounds=weighted,
    )


VERIFY_CHECKS = {
    "coefficients": check_coefficients,
    "deligne_rankin": check_deligne_rankin,
    "functional_equation": check_functional_equation,
    "regimes": check_regimes,
    "zero_free": check_zero_free,
    "counts": check_counts,
    "littlewood": check_littlewood,
    "mean_squares": check_mean_squares,
    "density": check_density,
}


def cmd_verify(session: Session) -> int:
    checks = {}
    for name, check in VERIFY_CHECKS.items():
        logger.info("[cli] verify: {}", name)
        try:
            checks[name] = check(session)
        except HeckeZerosError as e:
            logger.error("[cli] {} raised {}", name, e)
            checks[name] = _check(False, f"{type(e).__name__}: {e}")
    write_json(session.out / "verify.json", {"checks": checks, "config": asdict(session.config)})
    summary = generate_text_summary(checks)
    atomic_write_text(session.out / "verify.txt", summary + "\n")
    print(summary)
    return EXIT_OK if all(c["passed"] for c in checks.values()) else EXIT_CHECK_FAILED


# ─── argument parsing ────────────────────────────────────────────────────────

COMMANDS = ("eval", "coeffs", "zeros", "count", "density", "meansquare", "littlewood", "verify")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heckezeros", description=__doc__)
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--weight", type=int)
    parser.add_argument("--m", help="derivative order(s), comma separated")
    parser.add_argument("--T", dest="T", type=float, help="single height; overrides --grid")
    parser.add_argument("--grid", help="T grid, comma separated")
    parser.add_argument("--sigma", help="sigma grid, comma separated")
    parser.add_argument("--s", dest="s", help="evaluation point for `eval`, e.g. 0.5+14i")
    parser.add_argument("--precision", choices=("double", "extended"))
    parser.add_argument("--jobs", type=int)
    parser.add_argument("--out")
    parser.add_argument("--cache")
    parser.add_argument("--config", help="key=value configuration file")
    parser.add_argument("--log-level", dest="log_level")
    return parser


def overrides_from(args: argparse.Namespace) -> dict:
    overrides = {
        "weight": args.weight,
        "orders": args.m,
        "t_grid": args.grid,
        "sigma_grid": args.sigma,
        "precision": args.precision,
        "jobs": args.jobs,
        "out": args.out,
        "cache": args.cache,
        "log_level": args.log_level,
    }
    if args.T is not None:
        overrides["t_grid"] = (args.T,)
    return {k: v for k, v in overrides.items() if v is not None}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, overrides_from(args))
    except ConfigError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    configure_logging(config.log_level)

    ok, message = validate_config(config)
    if not ok:
        print(f"Error: {message}", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "eval" and args.s is None:
        print("Error: eval needs --s", file=sys.stderr)
        return EXIT_USAGE

    try:
        session = open_session(config)
        if args.command == "eval":
            return cmd_eval(session, parse_complex(args.s), config.orders[0])
        handler = {
            "coeffs": cmd_coeffs,
            "zeros": cmd_zeros,
            "count": cmd_count,
            "density": cmd_density,
            "meansquare": cmd_meansquare,
            "littlewood": cmd_littlewood,
            "verify": cmd_verify,
        }[args.command]
        return handler(session)
    except (ConfigError, DomainError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except HeckeZerosError as e:
        logger.error("[cli] {}: {}", type(e).__name__, e)
        return EXIT_CHECK_FAILED
