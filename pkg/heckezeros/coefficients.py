"""Exact Fourier coefficients of the level-1 eigenforms and their arithmetic checks."""
from __future__ import annotations

import hashlib
from math import isqrt
from pathlib import Path

import numpy as np
from loguru import logger

from heckezeros.errors import ContractError, DataIntegrityError, DomainError
from heckezeros.models import CoefficientTable, DeligneReport, EigenformSpec
from heckezeros.reports import atomic_write_text
from heckezeros.series import (
    IntegerSeries,
    build_delta,
    build_eisenstein,
    divisor_power_sum,
)

# S_k is spanned by Delta * E_4^a * E_6^b with 4a + 6b = k - 12.
EISENSTEIN_EXPONENTS = {
    12: (0, 0),
    16: (1, 0),
    18: (0, 1),
    20: (2, 0),
    22: (1, 1),
    26: (2, 1),
}

_tables: dict[tuple[int, int], CoefficientTable] = {}


def divisor_count(N: int) -> np.ndarray:
    """d(n) for 0 <= n <= N, with d(0) = 0."""
    d = np.zeros(N + 1, dtype=np.int64)
    for i in range(1, N + 1):
        d[i::i] += 1
    return d


def primes_up_to(N: int) -> np.ndarray:
    if N < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(N + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, isqrt(N) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.flatnonzero(sieve)


def smallest_prime_factor(N: int) -> np.ndarray:
    spf = np.arange(N + 1, dtype=np.int64)
    for p in range(2, isqrt(N) + 1):
        if spf[p] == p:
            block = spf[p * p::p]
            untouched = block == np.arange(p * p, N + 1, p)
            block[untouched] = p
    return spf


def _normalize(a: list[int], weight: int) -> np.ndarray:
    # a / n^((k-1)/2) split as an exact int quotient and one sqrt to keep full precision
    half = (weight - 2) // 2
    lam = np.zeros(len(a), dtype=float)
    for n in range(1, len(a)):
        if a[n]:
            lam[n] = (a[n] / n ** half) / np.sqrt(n)
    return lam


def _first_nonzero(a) -> int:
    for n in range(2, len(a)):
        if a[n] != 0:
            return n
    raise ContractError("table too short: no nonzero coefficient beyond n = 1")


def table_from_coefficients(spec: EigenformSpec, a) -> CoefficientTable:
    """Wrap exact coefficients a[0..N] (a[0] = 0) into a CoefficientTable."""
    a = tuple(int(c) for c in a)
    if len(a) < 3:
        raise ContractError(f"need coefficients up to n >= 2, got length {len(a) - 1}")
    lam = _normalize(list(a), spec.weight)
    return CoefficientTable(
        spec=spec,
        length=len(a) - 1,
        a=a,
        lam=lam,
        n_f=_first_nonzero(a),
        rankin_partial=np.cumsum(lam ** 2),
    )


def build_eigenform(spec: EigenformSpec, N: int) -> CoefficientTable:
    """Normalized eigenform of weight spec.weight to q^N, with Hecke relations verified."""
    if N < 2:
        raise DomainError(f"N must be >= 2, got {N}")
    e4_power, e6_power = EISENSTEIN_EXPONENTS[spec.weight]
    form: IntegerSeries = build_delta(N)
    if e4_power:
        form = form * build_eisenstein(4, N) ** e4_power
    if e6_power:
        form = form * build_eisenstein(6, N) ** e6_power
    if form[1] != 1:
        raise DataIntegrityError(f"leading coefficient {form[1]} != 1 for weight {spec.weight}")

    table = table_from_coefficients(spec, form.coeffs)
    violations = hecke_violations(table)
    if violations:
        raise DataIntegrityError(
            f"weight {spec.weight}: {len(violations)} Hecke violations, first at n={violations[0][0]}"
        )
    logger.info("[coeffs] built weight {} to N={} (n_f={})", spec.weight, N, table.n_f)
    return table


def hecke_violations(table: CoefficientTable, limit: int | None = None) -> list[tuple[int, str]]:
    """Every n <= limit where multiplicativity or the prime-power recurrence fails.

    Checking a(p^e q) = a(p^e) a(q) with p the smallest prime of n covers all
    coprime pairs by induction.
    """
    a = table.a
    limit = table.length if limit is None else min(limit, table.length)
    spf = smallest_prime_factor(limit)
    out = []
    if a[1] != 1:
        out.append((1, "normalization"))
    for n in range(2, limit + 1):
        p = int(spf[n])
        q = n
        while q % p == 0:
            q //= p
        if q > 1:
            if a[n] != a[n // q] * a[q]:
                out.append((n, "multiplicative"))
        elif n != p:
            pk = p ** (table.weight - 1)
            if a[n] != a[p] * a[n // p] - pk * a[n // (p * p)]:
                out.append((n, "recurrence"))
    return out


def ramanujan_congruence_violations(N: int) -> list[int]:
    """n <= N with tau(n) != sigma_11(n) mod 691."""
    tau = build_delta(N)
    sig = divisor_power_sum(N, 11)
    return [n for n in range(1, N + 1) if (tau[n] - sig[n]) % 691]


def satake(table: CoefficientTable, p: int) -> tuple[complex, complex]:
    """Roots alpha, beta of X^2 - lambda(p) X + 1."""
    if p < 2 or p > table.length:
        raise ContractError(f"p={p} outside table range 2..{table.length}")
    if any(p % d == 0 for d in range(2, isqrt(p) + 1)):
        raise DomainError(f"{p} is not prime")
    lam_p = float(table.lam[p])
    root = np.sqrt(complex(lam_p * lam_p - 4.0))
    alpha = (lam_p + root) / 2
    beta = (lam_p - root) / 2
    return complex(alpha), complex(beta)


def deligne_ratios(table: CoefficientTable) -> np.ndarray:
    """|lambda(n)| / d(n) for 1 <= n <= length (index 0 unused)."""
    d = divisor_count(table.length)
    ratios = np.zeros(table.length + 1)
    ratios[1:] = np.abs(table.lam[1:]) / d[1:]
    return ratios


def deligne_check(table: CoefficientTable) -> DeligneReport:
    ratios = deligne_ratios(table)
    argmax = int(np.argmax(ratios))
    max_ratio = float(ratios[argmax])
    if max_ratio > 1 + 1e-12:
        raise DataIntegrityError(
            f"Deligne bound violated at n={argmax}: |lambda|/d = {max_ratio:.6g}"
        )
    return DeligneReport(length=table.length, max_ratio=max_ratio, argmax=argmax)


def rankin_constant(table: CoefficientTable, x: int) -> float:
    """Running estimate sum_{n<=x} lambda(n)^2 / x."""
    if not 1 <= x <= table.length:
        raise ContractError(f"x={x} outside 1..{table.length}")
    if x < 100:
        logger.warning("[coeffs] Rankin estimate at x={} is low-confidence", x)
    return float(table.rankin_partial[x] / x)


def detect_nf(table: CoefficientTable) -> int:
    return _first_nonzero(table.a)


# --- cache file ---------------------------------------------------------------

def _records(a) -> str:
    return "\n".join(f"{n} {a[n]}" for n in range(1, len(a)))


def _checksum(body: str) -> str:
    return hashlib.sha256(body.encode("ascii")).hexdigest()


def cache_file(spec: EigenformSpec, N: int, cache_dir: str | Path) -> Path:
    return Path(cache_dir) / f"weight{spec.weight}_N{N}.txt"


def write_cache(table: CoefficientTable, path: str | Path) -> None:
    body = _records(table.a)
    header = "\n".join(
        [
            f"# weight={table.weight}",
            f"# label={table.spec.label}",
            f"# length={table.length}",
            f"# checksum={_checksum(body)}",
        ]
    )
    atomic_write_text(path, header + "\n" + body + "\n")


def read_cache(spec: EigenformSpec, N: int, path: str | Path) -> CoefficientTable:
    """Parse and verify a cache file; any mismatch raises DataIntegrityError."""
    header = {}
    a = [0]
    for line in Path(path).read_text(encoding="ascii").splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            header[key] = value
        elif line.strip():
            n, value = line.split()
            if int(n) != len(a):
                raise DataIntegrityError(f"cache record {n} out of sequence")
            a.append(int(value))

    expected = {"weight": str(spec.weight), "label": spec.label, "length": str(N)}
    for key, value in expected.items():
        if header.get(key) != value:
            raise DataIntegrityError(f"cache header {key}={header.get(key)!r}, expected {value!r}")
    if header.get("checksum") != _checksum(_records(a)):
        raise DataIntegrityError("cache checksum mismatch")
    return table_from_coefficients(spec, a)


def load_or_build(spec: EigenformSpec, N: int, cache_dir: str | Path | None = None) -> CoefficientTable:
    """Table for (spec, N): in-process cache, then the cache file, then a fresh build."""
    key = (spec.weight, N)
    if key in _tables:
        return _tables[key]

    table = None
    path = cache_file(spec, N, cache_dir) if cache_dir else None
    if path is not None and path.exists():
        try:
            table = read_cache(spec, N, path)
            logger.info("[cache] hit {}", path)
        except (DataIntegrityError, ValueError) as e:
            logger.warning("[cache] {} rejected ({}); rebuilding", path, e)

    if table is None:
        table = build_eigenform(spec, N)
        if path is not None:
            write_cache(table, path)
            logger.info("[cache] wrote {}", path)

    _tables[key] = table
    return table
