from heckezeros.models import ZeroRecord


def order_zeros(records: list[ZeroRecord], digits: int = 9) -> list[ZeroRecord]:
    """Sort zeros by height, then real part.

    Coordinates are rounded to `digits` decimals for the key so zeros found
    by different workers in a different order merge to the same list.
    """
    def sort_key(r: ZeroRecord):
        return (round(r.location.imag, digits), round(r.location.real, digits))

    return sorted(records, key=sort_key)


def merge_duplicates(records: list[ZeroRecord], tol: float = 1e-7) -> list[ZeroRecord]:
    """Drop zeros reported twice by neighbouring cells; keep the smaller residual."""
    ordered = order_zeros(records)
    merged: list[ZeroRecord] = []
    for r in ordered:
        if merged and abs(merged[-1].location - r.location) < tol:
            if r.residual < merged[-1].residual:
                merged[-1] = r
            continue
        merged.append(r)
    return merged
