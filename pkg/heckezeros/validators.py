from heckezeros.models import ADMISSIBLE_WEIGHTS, RunConfig

MAX_ORDER = 4
LOG_LEVELS = ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL")


def validate_config(config: RunConfig) -> tuple[bool, str | None]:
    """Check a run configuration.

    Returns (is_valid, error_message_or_None).
    """
    if config.weight not in ADMISSIBLE_WEIGHTS:
        return False, f"weight must be one of {ADMISSIBLE_WEIGHTS}, got {config.weight}."

    if not config.orders:
        return False, "orders must not be empty."
    if any(m < 0 or m > MAX_ORDER for m in config.orders):
        return False, f"derivative orders must lie in 0..{MAX_ORDER}."

    if not config.t_grid:
        return False, "T grid must not be empty."
    if any(T <= 0 or T > config.max_height for T in config.t_grid):
        return False, f"T grid values must lie in (0, {config.max_height}]."

    if not config.sigma_grid:
        return False, "sigma grid must not be empty."
    if any(s <= 0.5 for s in config.sigma_grid):
        return False, "sigma grid values must exceed 1/2."

    if config.jobs < 1:
        return False, "jobs must be at least 1."
    if config.table_length < 100:
        return False, "table_length must be at least 100."
    if not 0 < config.t_floor < config.max_height:
        return False, "t_floor must lie in (0, max_height)."
    if config.log_level not in LOG_LEVELS:
        return False, f"log level must be one of {', '.join(LOG_LEVELS)}."

    return True, None
