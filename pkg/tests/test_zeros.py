import numpy as np
import pytest

from heckezeros.errors import ContractError, DomainError
from heckezeros.models import Rectangle, ZeroMethod
from heckezeros.zeros import PERTURBATIONS, EdgeTrace, ZeroFinder

# first four ordinates of L(Delta, s) on the critical line
DELTA_ORDINATES = (9.22237939992110, 13.9075498613, 17.4427769782, 19.6565131419)


def test_no_zeros_right_of_critical_line(finder) -> None:
    result = finder.winding(Rectangle(2.0, 3.0, 1.0, 5.0), 0)
    assert result.count == 0
    assert result.perturbation == 0.0
    assert result.residual <= 0.01


def test_isolates_first_zero(finder) -> None:
    zeros = finder.isolate_zeros(Rectangle(0.0, 1.0, 8.0, 11.0), 0)
    assert len(zeros) == 1
    zero = zeros[0]
    assert zero.location.real == pytest.approx(0.5, abs=1e-9)
    assert zero.location.imag == pytest.approx(DELTA_ORDINATES[0], abs=1e-9)
    assert zero.residual <= 1e-9
    assert zero.method is ZeroMethod.NEWTON
    assert zero.multiplicity == 1
    assert not zero.flagged


def test_isolation_returns_zeros_sorted_by_height(finder) -> None:
    zeros = finder.isolate_zeros(Rectangle(0.0, 1.0, 5.0, 20.0), 0)
    assert [z.location.imag for z in zeros] == pytest.approx(list(DELTA_ORDINATES), abs=1e-8)


def test_winding_is_additive_under_uneven_split(finder) -> None:
    parent = Rectangle(0.0, 1.0, 5.0, 20.0)
    children = ZeroFinder._split(parent, 0.37)
    counts = [finder.winding_count(child, 0) for child in children]
    assert sum(counts) == finder.winding_count(parent, 0) == 4


def test_counts_up_to_height(finder) -> None:
    assert finder.count_to_height(5.0, 0).computed_count == 0
    report = finder.count_to_height(20.0, 0)
    assert report.computed_count == 4
    assert report.deviation == pytest.approx(4 - report.main_term)
    assert report.provenance["alpha"] == finder.left_abscissa(0)


def test_count_heights_sorts_and_counts(finder) -> None:
    reports = finder.count_heights([20.0, 12.0], 0)
    assert [r.T for r in reports] == [12.0, 20.0]
    assert [r.computed_count for r in reports] == [1, 4]


def test_default_alpha(finder) -> None:
    # trivial zeros of weight 12 sit at -6.5, -7.5, ...
    assert finder.default_alpha() == -7.0


def test_first_zero_height(finder) -> None:
    assert finder.first_zero_height(0) == pytest.approx(DELTA_ORDINATES[0], abs=1e-9)


def test_count_right_of_zero_free_line(finder) -> None:
    sigma = finder.evaluator.sigma_right[0] + 0.5
    report = finder.count_right_of(sigma, 30.0, 0)
    assert report.computed_count == 0
    assert report.envelope is not None
    with pytest.raises(DomainError):
        finder.count_right_of(0.5, 30.0, 0)


def test_no_zeros_right_of_half_for_delta(finder) -> None:
    assert finder.count_right_of(0.6, 30.0, 0).computed_count == 0


def test_height_outside_range(finder) -> None:
    with pytest.raises(DomainError):
        finder.count_to_height(finder.max_height + 1.0, 0)
    with pytest.raises(ContractError):
        finder.count_heights([], 0)


def test_finder_rejects_bad_floor(evaluator) -> None:
    with pytest.raises(ContractError):
        ZeroFinder(evaluator, t_floor=0.0)
    with pytest.raises(ContractError):
        ZeroFinder(evaluator, t_floor=10.0, max_height=5.0)


def test_trivial_zeros_on_real_axis(finder) -> None:
    roots = finder.real_zero_scan(-12.0, -10.0, 0)
    np.testing.assert_allclose(roots, [-11.5, -10.5], atol=1e-8)


def test_real_scan_domain(finder) -> None:
    with pytest.raises(DomainError):
        finder.real_zero_scan(-1.0, 0.0, 0)
    with pytest.raises(ContractError):
        finder.real_zero_scan(-3.0, -4.0, 0)


def test_littlewood_without_zeros(finder) -> None:
    report = finder.littlewood_check(2.0, 10.0, 0)
    assert report.zeros_used == 0
    assert report.lhs == 0.0
    assert abs(report.rhs) <= 1e-6
    assert set(report.parts) >= {"log_abs_left", "log_abs_right", "arg_top", "arg_bottom"}


def test_littlewood_just_right_of_critical_line(finder) -> None:
    report = finder.littlewood_check(0.55, 20.0, 0)
    assert report.zeros_used == 0
    assert report.discrepancy <= 1e-5 * max(1.0, abs(report.rhs))


def test_littlewood_domain(finder) -> None:
    with pytest.raises(DomainError):
        finder.littlewood_check(0.5, 10.0, 0)


@pytest.mark.slow
def test_zero_free_certificate(finder) -> None:
    report = finder.zero_free_certify(0)
    assert report.evidence["min_abs_F_on_sigma_right"] >= 0.5 - 1e-6
    assert report.evidence["max_abs_F_minus_1"] <= 0.5
    assert report.evidence["grid_points"] == 5 * 61
    assert report.first_zero_height == pytest.approx(DELTA_ORDINATES[0], abs=1e-9)
    assert report.evidence["majorant"] <= 0.5
    assert report.evidence["left_certified"]
    assert report.alpha <= finder.default_alpha()
    assert report.left_radius == 0.0
    assert finder.left_abscissa(0) == report.alpha


@pytest.mark.slow
@pytest.mark.parametrize("m", [0, 1])
def test_one_real_zero_per_unit_interval(finder, m) -> None:
    roots = finder.real_zero_scan(-30.0, -10.0, m)
    per_interval = np.histogram(roots, bins=np.arange(-30.0, -9.5, 1.0))[0]
    assert np.all(per_interval == 1)


@pytest.mark.slow
def test_littlewood_for_first_derivative(finder) -> None:
    report = finder.littlewood_check(0.55, 40.0, 1)
    assert report.discrepancy <= 1e-5 * max(1.0, abs(report.rhs))


@pytest.mark.slow
def test_littlewood_density_bound(finder) -> None:
    count, bound = finder.littlewood_density_bound(0.6, 40.0, 1)
    assert count <= bound
    assert count == finder.count_right_of(0.6, 40.0, 1).computed_count


@pytest.mark.slow
def test_secondary_term_of_derivative_counts(finder) -> None:
    heights = [30.0, 45.0, 60.0]
    plain = finder.count_heights(heights, 0)
    first = finder.count_heights(heights, 1)
    for a, b in zip(plain, first):
        assert abs(a.deviation_over_logT) <= 3
        assert abs(b.deviation_over_logT) <= 3


def test_isolates_derivative_zero_right_of_one(finder) -> None:
    zeros = finder.isolate_zeros(Rectangle(0.95, 1.1, 25.9, 26.05), 1)
    assert len(zeros) == 1
    zero = zeros[0]
    assert abs(zero.location - (1.027939 + 25.97734j)) <= 1e-5
    assert zero.multiplicity == 1
    assert zero.m == 1


def test_bisection_fallback_closes_in_on_the_zero(finder) -> None:
    record = finder._bisect(Rectangle(0.45, 0.55, 9.17, 9.27), 0)
    assert record.method is ZeroMethod.BISECTION
    assert record.flagged
    assert abs(record.location - (0.5 + 1j * DELTA_ORDINATES[0])) <= 1e-8
    assert record.isolation_radius <= 1e-8


def test_edges_found_suspect_stay_moved(finder, monkeypatch) -> None:
    rect = Rectangle(2.0, 3.0, 1.0, 5.0)
    traced = []
    clean = EdgeTrace(0.0, 1.0, False)
    dirty = EdgeTrace(0.0, 0.0, True)

    def edges(current, m):
        traced.append(current)
        result = dict.fromkeys(("bottom", "right", "top", "left"), clean)
        if len(traced) == 1:
            result["bottom"] = dirty
        elif len(traced) == 2:
            result["top"] = dirty
        return result

    monkeypatch.setattr(finder, "_edges", edges)
    result = finder.winding(rect, 0)
    assert result.count == 0
    assert result.perturbation == PERTURBATIONS[1]
    assert result.rect.t_min == pytest.approx(1.0 + PERTURBATIONS[1])
    assert result.rect.t_max == pytest.approx(5.0 + PERTURBATIONS[1])
    assert (result.rect.sigma_min, result.rect.sigma_max) == (2.0, 3.0)


def test_littlewood_is_additive_in_height(finder) -> None:
    whole = finder.littlewood_check(0.75, 20.0, 0)
    lower = finder.littlewood_check(0.75, 10.0, 0)
    upper = finder.littlewood_check(0.75, 20.0, 0, t0=10.0)
    assert [r.parts["perturbation"] for r in (whole, lower, upper)] == [0.0, 0.0, 0.0]
    assert whole.lhs == lower.lhs + upper.lhs == 0.0
    assert whole.rhs == pytest.approx(lower.rhs + upper.rhs, abs=1e-6)
