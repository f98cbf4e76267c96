from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from heckezeros.errors import ContractError, DomainError

# Weights k for which the space of level-1 cusp forms is one-dimensional.
ADMISSIBLE_WEIGHTS = (12, 16, 18, 20, 22, 26)


class Regime(Enum):
    SERIES = "series"
    COMPLETED = "completed"
    REFLECTED = "reflected"


class ZeroMethod(Enum):
    NEWTON = "newton"
    SUBDIVISION = "subdivision"
    BISECTION = "bisection"


class PrecisionMode(Enum):
    DOUBLE = "double"
    EXTENDED = "extended"


@dataclass(frozen=True)
class EigenformSpec:
    weight: int
    label: str
    sign: int

    def __post_init__(self):
        if self.weight not in ADMISSIBLE_WEIGHTS:
            raise DomainError(
                f"weight {self.weight} is not one of {ADMISSIBLE_WEIGHTS}"
            )
        expected = 1 if self.weight % 4 == 0 else -1
        if self.sign != expected:
            raise ContractError(
                f"sign {self.sign} inconsistent with weight {self.weight}"
            )

    @classmethod
    def from_weight(cls, weight: int) -> "EigenformSpec":
        sign = 1 if weight % 4 == 0 else -1
        return cls(weight=weight, label=f"1.{weight}.a", sign=sign)

    @property
    def center(self) -> float:
        """(k - 1)/2, the shift between the analytic and arithmetic normalizations."""
        return (self.weight - 1) / 2


@dataclass(frozen=True)
class CoefficientTable:
    spec: EigenformSpec
    length: int
    a: tuple  # exact integers, a[n] for 0 <= n <= length, a[0] = 0
    lam: np.ndarray  # normalized coefficients, lam[0] = 0
    n_f: int
    rankin_partial: np.ndarray  # rankin_partial[x] = sum_{n<=x} lam(n)^2

    def __post_init__(self):
        if len(self.a) != self.length + 1 or len(self.lam) != self.length + 1:
            raise ContractError("coefficient arrays must cover 0..length")
        self.lam.setflags(write=False)
        self.rankin_partial.setflags(write=False)

    @property
    def weight(self) -> int:
        return self.spec.weight

    @property
    def lambda_nf(self) -> float:
        return float(self.lam[self.n_f])


@dataclass(frozen=True)
class DerivativeJet:
    center: complex
    order: int
    values: np.ndarray  # G(s), G'(s), ..., G^(order)(s)

    def __post_init__(self):
        if len(self.values) != self.order + 1:
            raise ContractError(
                f"jet of order {self.order} needs {self.order + 1} values, got {len(self.values)}"
            )
        if not np.all(np.isfinite(self.values)):
            raise DomainError(f"non-finite jet entries at {self.center}")


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error_estimate: float
    evaluations: int
    converged: bool = True


@dataclass(frozen=True)
class EvalResult:
    value: complex
    error_estimate: float
    regime: Regime
    terms: int = 0


@dataclass(frozen=True)
class Rectangle:
    sigma_min: float
    sigma_max: float
    t_min: float
    t_max: float

    def __post_init__(self):
        if not (self.sigma_min < self.sigma_max and self.t_min < self.t_max):
            raise ContractError(f"degenerate rectangle {self}")

    @property
    def width(self) -> float:
        return self.sigma_max - self.sigma_min

    @property
    def height(self) -> float:
        return self.t_max - self.t_min

    @property
    def center(self) -> complex:
        return complex(
            0.5 * (self.sigma_min + self.sigma_max), 0.5 * (self.t_min + self.t_max)
        )

    @property
    def diameter(self) -> float:
        return float(np.hypot(self.width, self.height))

    def contains(self, z: complex) -> bool:
        return (
            self.sigma_min <= z.real <= self.sigma_max
            and self.t_min <= z.imag <= self.t_max
        )


@dataclass
class ZeroRecord:
    location: complex
    m: int
    residual: float
    isolation_radius: float
    method: ZeroMethod
    multiplicity: int = 1
    flagged: bool = False


@dataclass
class CountReport:
    m: int
    T: float
    computed_count: int
    main_term: float
    deviation: float
    deviation_over_logT: float
    sigma: Optional[float] = None
    envelope: Optional[float] = None
    perturbation: float = 0.0
    winding_residual: float = 0.0
    provenance: dict = field(default_factory=dict)


@dataclass
class ZeroFreeReport:
    m: int
    sigma_right: float
    alpha: float
    epsilon: float
    left_radius: float
    method: str
    evidence: dict = field(default_factory=dict)
    first_zero_height: Optional[float] = None  # lowest zero in the strip, None below max_height


@dataclass
class DeligneReport:
    length: int
    max_ratio: float
    argmax: int


@dataclass
class RankinFit:
    c_estimate: float
    drift_exponent: float
    x_max: int
    low_confidence: bool = False


@dataclass(frozen=True)
class EnvelopeConstants:
    """Form-dependent inputs and recorded slack for the zero-density bounds."""
    n_f: int
    c_f: float
    lambda_nf: float
    sigma_right: float
    slack_factor: float = 5.0  # slack_logT = slack_factor * log T
    o_constant: float = 1.0


@dataclass
class DensityReport:
    m: int
    sigma: float
    T: float
    empirical_count: int
    envelope_zd2: float
    explicit_bound_zd1: float
    slack_logT: float
    o_constant: float
    passed: bool


@dataclass
class MeanSquareReport:
    m: int
    sigma: float
    T: float
    numeric_integral: float
    reference_main: float
    difference: float
    predicted_error_order: float
    normalized_difference: float
    quadrature_error: float = 0.0
    flagged: bool = False


@dataclass
class LittlewoodReport:
    m: int
    sigma: float
    T: float
    sigma_right: float
    lhs: float
    rhs: float
    parts: dict
    discrepancy: float
    zeros_used: int


@dataclass
class RunConfig:
    weight: int = 12
    orders: tuple = (0, 1, 2)
    t_grid: tuple = (20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0)
    sigma_grid: tuple = (0.55, 0.65, 0.75, 0.85, 0.95)
    precision: PrecisionMode = PrecisionMode.DOUBLE
    jobs: int = 1
    out: str = "reports"
    cache: str = ".heckezeros-cache"
    table_length: int = 100_000
    seed: int = 20240601
    t_floor: float = 0.1
    max_height: float = 100.0
    log_level: str = "INFO"


@dataclass
class JensenReport:
    m: int
    sigma: float
    T: float
    mean_log: float  # (1/(T-1)) int_1^T log|L^(m)(sigma+it)|^2 dt
    log_mean: float  # log of the mean square over the same range
    passed: bool


@dataclass(frozen=True)
class WindingResult:
    count: int
    rect: Rectangle  # the contour actually traced, after any perturbation
    perturbation: float = 0.0
    residual: float = 0.0  # distance of the total phase / 2 pi from count
