from heckezeros.models import ZeroMethod, ZeroRecord
from heckezeros.ordering import merge_duplicates, order_zeros


def _zero(z: complex, residual: float = 1e-12) -> ZeroRecord:
    return ZeroRecord(location=z, m=0, residual=residual, isolation_radius=0.1, method=ZeroMethod.NEWTON)


def test_order_by_height_then_real_part() -> None:
    records = [_zero(0.7 + 20j), _zero(0.5 + 9j), _zero(0.2 + 20j)]
    assert [r.location for r in order_zeros(records)] == [0.5 + 9j, 0.2 + 20j, 0.7 + 20j]


def test_order_ignores_noise_below_rounding() -> None:
    a, b = _zero(0.6 + 10.0j), _zero(0.4 + 10.0000000000001j)
    assert [r.location for r in order_zeros([a, b])] == [b.location, a.location]


def test_merge_keeps_smaller_residual() -> None:
    first = _zero(0.5 + 9.22j, residual=1e-10)
    twin = _zero(0.5 + 9.22j + 1e-9j, residual=1e-13)
    other = _zero(0.5 + 13.9j)
    merged = merge_duplicates([first, other, twin])
    assert len(merged) == 2
    assert merged[0].residual == 1e-13
    assert merged[1] is other
