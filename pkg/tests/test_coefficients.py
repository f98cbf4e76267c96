import numpy as np
import pytest

from heckezeros import coefficients
from heckezeros.coefficients import (
    build_eigenform,
    cache_file,
    deligne_check,
    deligne_ratios,
    detect_nf,
    divisor_count,
    hecke_violations,
    load_or_build,
    primes_up_to,
    ramanujan_congruence_violations,
    rankin_constant,
    read_cache,
    satake,
    smallest_prime_factor,
    table_from_coefficients,
    write_cache,
)
from heckezeros.errors import ContractError, DataIntegrityError, DomainError
from heckezeros.models import ADMISSIBLE_WEIGHTS, EigenformSpec


def test_delta_normalized_coefficients(delta_table) -> None:
    assert delta_table.a[:4] == (0, 1, -24, 252)
    assert delta_table.lam[2] == pytest.approx(-24 / 2**5.5, rel=1e-15)
    assert delta_table.n_f == 2
    assert delta_table.lam[0] == 0.0


@pytest.mark.parametrize("weight", ADMISSIBLE_WEIGHTS)
def test_every_weight_is_a_hecke_eigenform(weight) -> None:
    table = build_eigenform(EigenformSpec.from_weight(weight), 500)
    assert table.a[1] == 1
    assert hecke_violations(table) == []
    assert deligne_check(table).max_ratio <= 1.0
    assert table.n_f == 2


def test_build_rejects_tiny_tables() -> None:
    with pytest.raises(DomainError):
        build_eigenform(EigenformSpec.from_weight(12), 1)


def test_inadmissible_weight_rejected() -> None:
    with pytest.raises(DomainError):
        EigenformSpec.from_weight(14)


def test_hecke_violation_detected(delta_table) -> None:
    a = list(delta_table.a[:50])
    a[6] += 1
    broken = table_from_coefficients(delta_table.spec, a)
    assert (6, "multiplicative") in hecke_violations(broken)


def test_ramanujan_congruence_holds() -> None:
    assert ramanujan_congruence_violations(100) == []


def test_sieves() -> None:
    assert divisor_count(12).tolist() == [0, 1, 2, 2, 3, 2, 4, 2, 4, 3, 4, 2, 6]
    assert primes_up_to(20).tolist() == [2, 3, 5, 7, 11, 13, 17, 19]
    assert primes_up_to(1).size == 0
    assert smallest_prime_factor(15).tolist()[2:] == [2, 3, 2, 5, 2, 7, 2, 3, 2, 11, 2, 13, 2, 3]


def test_satake_parameters_on_unit_circle(delta_table) -> None:
    for p in (2, 3, 5, 7, 97):
        alpha, beta = satake(delta_table, p)
        assert abs(alpha) == pytest.approx(1.0, abs=1e-12)
        assert alpha * beta == pytest.approx(1.0, abs=1e-12)
        assert (alpha + beta).real == pytest.approx(delta_table.lam[p], abs=1e-12)


def test_satake_rejects_composites_and_range(delta_table) -> None:
    with pytest.raises(DomainError):
        satake(delta_table, 9)
    with pytest.raises(ContractError):
        satake(delta_table, delta_table.length + 1)


def test_deligne_ratio_peaks_below_one(delta_table) -> None:
    ratios = deligne_ratios(delta_table)
    assert ratios[1] == 1.0
    assert ratios.max() <= 1.0


def test_deligne_violation_raises(delta_table) -> None:
    a = list(delta_table.a[:20])
    a[2] = 10**8
    with pytest.raises(DataIntegrityError):
        deligne_check(table_from_coefficients(delta_table.spec, a))


def test_rankin_constant_positive_and_warns_early(delta_table, log_messages) -> None:
    assert rankin_constant(delta_table, delta_table.length) > 0
    rankin_constant(delta_table, 50)
    assert any("low-confidence" in m for m in log_messages)
    with pytest.raises(ContractError):
        rankin_constant(delta_table, 0)


def test_detect_nf_requires_a_second_coefficient(delta_table) -> None:
    assert detect_nf(delta_table) == 2
    with pytest.raises(ContractError):
        table_from_coefficients(delta_table.spec, [0, 1, 0, 0])


def test_cache_round_trip_and_checksum(tmp_path, delta_table) -> None:
    table = build_eigenform(delta_table.spec, 200)
    path = cache_file(table.spec, 200, tmp_path)
    write_cache(table, path)
    assert read_cache(table.spec, 200, path).a == table.a

    text = path.read_text().replace("\n2 -24\n", "\n2 -25\n")
    path.write_text(text)
    with pytest.raises(DataIntegrityError):
        read_cache(table.spec, 200, path)


def test_corrupted_cache_is_rebuilt(tmp_path, monkeypatch, log_messages) -> None:
    monkeypatch.setattr(coefficients, "_tables", {})
    spec = EigenformSpec.from_weight(12)
    load_or_build(spec, 150, tmp_path)
    path = cache_file(spec, 150, tmp_path)
    path.write_text(path.read_text().replace("\n3 252\n", "\n3 253\n"))

    monkeypatch.setattr(coefficients, "_tables", {})
    table = load_or_build(spec, 150, tmp_path)
    assert table.a[3] == 252
    assert any("rejected" in m for m in log_messages)
    assert read_cache(spec, 150, path).a[3] == 252


def test_rankin_partial_sums_are_cumulative(delta_table) -> None:
    np.testing.assert_allclose(
        delta_table.rankin_partial[10], np.sum(delta_table.lam[1:11] ** 2), rtol=1e-14
    )
