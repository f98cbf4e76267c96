class HeckeZerosError(Exception):
    """Base class for every error raised by heckezeros."""


class DomainError(HeckeZerosError, ValueError):
    """Input lies outside the domain of an operation (poles, sigma <= 1/2, x <= 0, ...)."""


class RegimeError(HeckeZerosError):
    """An evaluation regime was asked for a point outside its validity band."""


class ContractError(HeckeZerosError, ValueError):
    """A precondition on the shape of the input failed (jet too short, table too short)."""


class DataIntegrityError(HeckeZerosError):
    """Coefficient data violates an arithmetic identity it must satisfy."""


class BoundaryZeroError(HeckeZerosError):
    """A contour could not be cleared of zeros after the allowed perturbations."""


class ConfigError(HeckeZerosError, ValueError):
    """Invalid run configuration (CLI exit code 2)."""
