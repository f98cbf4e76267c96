"""Exact truncated q-expansions.

Products use Kronecker substitution: a series is packed into one Python
integer with a fixed slot width per coefficient, the packed integers are
multiplied with CPython's big-integer multiplication, and the slots are
unpacked with signed-digit carry propagation.
"""
from __future__ import annotations

import numpy as np
from loguru import logger

from heckezeros.errors import ContractError, DataIntegrityError, DomainError


class IntegerSeries:
    """Truncated power series sum_{n<=order} c_n q^n with exact integer coefficients."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs, order: int):
        if order < 0:
            raise ContractError(f"negative truncation order {order}")
        coeffs = [int(c) for c in coeffs[: order + 1]]
        coeffs.extend([0] * (order + 1 - len(coeffs)))
        self.coeffs = coeffs
        self.order = order

    def __len__(self) -> int:
        return self.order + 1

    def __getitem__(self, n):
        return self.coeffs[n]

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntegerSeries):
            return NotImplemented
        order = min(self.order, other.order)
        return self.coeffs[: order + 1] == other.coeffs[: order + 1]

    def __repr__(self) -> str:
        head = ", ".join(str(c) for c in self.coeffs[:6])
        return f"IntegerSeries([{head}{', ...' if self.order > 5 else ''}], order={self.order})"

    def __add__(self, other: "IntegerSeries") -> "IntegerSeries":
        order = min(self.order, other.order)
        return IntegerSeries(
            [a + b for a, b in zip(self.coeffs[: order + 1], other.coeffs[: order + 1])],
            order,
        )

    def __neg__(self) -> "IntegerSeries":
        return IntegerSeries([-c for c in self.coeffs], self.order)

    def __sub__(self, other: "IntegerSeries") -> "IntegerSeries":
        return self + (-other)

    def scale(self, factor: int) -> "IntegerSeries":
        return IntegerSeries([factor * c for c in self.coeffs], self.order)

    def exact_div(self, divisor: int) -> "IntegerSeries":
        out = []
        for n, c in enumerate(self.coeffs):
            q, r = divmod(c, divisor)
            if r:
                raise DataIntegrityError(
                    f"coefficient {n} = {c} not divisible by {divisor}"
                )
            out.append(q)
        return IntegerSeries(out, self.order)

    def shift(self, places: int) -> "IntegerSeries":
        """Multiply by q^places, keeping order + places as the new truncation."""
        return IntegerSeries([0] * places + self.coeffs, self.order + places)

    def __mul__(self, other: "IntegerSeries") -> "IntegerSeries":
        order = min(self.order, other.order)
        return IntegerSeries(_kronecker_product(self.coeffs, other.coeffs, order), order)

    def __pow__(self, exponent: int) -> "IntegerSeries":
        if exponent < 0:
            raise DomainError("negative powers are not supported")
        result = IntegerSeries([1], self.order)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result


def _slot_bytes(a: list[int], b: list[int]) -> int:
    max_a = max((abs(c) for c in a), default=0)
    max_b = max((abs(c) for c in b), default=0)
    bound = max_a * max_b * max(1, min(len(a), len(b)))
    return (bound.bit_length() + 2 + 7) // 8


def _pack(coeffs: list[int], nbytes: int) -> int:
    pos = b"".join((c if c > 0 else 0).to_bytes(nbytes, "little") for c in coeffs)
    neg = b"".join((-c if c < 0 else 0).to_bytes(nbytes, "little") for c in coeffs)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _unpack(value: int, nbytes: int, count: int) -> list[int]:
    width = 8 * nbytes
    value &= (1 << (width * count)) - 1
    data = value.to_bytes(nbytes * count, "little")
    half = 1 << (width - 1)
    full = 1 << width
    out = []
    carry = 0
    for i in range(count):
        u = int.from_bytes(data[i * nbytes:(i + 1) * nbytes], "little") + carry
        if u >= half:
            out.append(u - full)
            carry = 1
        else:
            out.append(u)
            carry = 0
    return out


def _kronecker_product(a: list[int], b: list[int], order: int) -> list[int]:
    a = a[: order + 1]
    b = b[: order + 1]
    nbytes = _slot_bytes(a, b)
    product = _pack(a, nbytes) * _pack(b, nbytes)
    return _unpack(product, nbytes, order + 1)


def divisor_power_sum(N: int, power: int) -> list[int]:
    """sigma_power(n) for 0 <= n <= N (sigma(0) = 0), exact."""
    sig = np.zeros(N + 1, dtype=object)
    for d in range(1, N + 1):
        sig[d::d] += d ** power
    return [int(v) for v in sig]


def eta_cube(order: int) -> IntegerSeries:
    """prod (1 - q^n)^3 = sum_j (-1)^j (2j+1) q^{j(j+1)/2} (Jacobi)."""
    coeffs = [0] * (order + 1)
    j = 0
    while j * (j + 1) // 2 <= order:
        coeffs[j * (j + 1) // 2] = (-1) ** j * (2 * j + 1)
        j += 1
    return IntegerSeries(coeffs, order)


def build_delta(N: int) -> IntegerSeries:
    """q-expansion of Delta = q prod (1 - q^n)^24 up to q^N, as the 8th power of eta^3."""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    body = eta_cube(N - 1) ** 8
    logger.debug("[coeffs] Delta built to N={} via eta-cube powers", N)
    return body.shift(1)


def build_eisenstein(weight: int, N: int) -> IntegerSeries:
    """E_4 = 1 + 240 sum sigma_3(n) q^n, E_6 = 1 - 504 sum sigma_5(n) q^n."""
    if weight not in (4, 6):
        raise DomainError(f"only weights 4 and 6 are supported, got {weight}")
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    factor = 240 if weight == 4 else -504
    sig = divisor_power_sum(N, weight - 1)
    coeffs = [1] + [factor * s for s in sig[1:]]
    return IntegerSeries(coeffs, N)


def delta_via_eisenstein(N: int) -> IntegerSeries:
    """Independent route to Delta: (E_4^3 - E_6^2)/1728."""
    e4 = build_eisenstein(4, N)
    e6 = build_eisenstein(6, N)
    return (e4 ** 3 - e6 ** 2).exact_div(1728)
