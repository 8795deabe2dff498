import math

import numpy as np
import pytest
from pydantic import ValidationError

from app.core.config import Settings
from app.core.exceptions import InvalidInputError, NearCoincidentRootsError, UnstableEquationError
from app.models.schemas import ConjectureProbeReport, EqualRootSpec, InitialCondition, RealRootSet
from app.services.root_bounds_service import RootBoundsService


def root_set(lo, hi, *roots):
    return RealRootSet(declared_band=(lo, hi), roots=roots)


# ==================== 임펄스 해 ====================

def test_impulse_solution_matches_recurrence(bounds, recurrence):
    roots = root_set(-0.5, 0.9, -0.3, 0.5, 0.8)
    eq = recurrence.coefficients_from_roots(roots.roots)
    x = recurrence.simulate(eq, InitialCondition.impulse(3), 40).samples
    for k in range(41):
        assert bounds.impulse_solution_distinct_roots(roots, k) == pytest.approx(x[k], rel=1e-10, abs=1e-14)


def test_impulse_solution_rejects_near_coincident_roots(bounds):
    with pytest.raises(NearCoincidentRootsError) as info:
        bounds.impulse_solution_distinct_roots(root_set(0.0, 0.9, 0.5, 0.5 + 1e-9), 10)
    assert info.value.min_gap <= 1e-8


def test_root_set_must_lie_in_band():
    with pytest.raises(ValidationError):
        root_set(0.8, 0.95, 0.7, 0.9)


# ==================== 하한 ====================

def test_lower_bound_holds(bounds):
    report = bounds.check_lower_bound(root_set(0.8, 0.95, 0.8, 0.9, 0.95), horizon=500)
    assert report.side == 'lower'
    assert report.rho == 0.8
    assert report.holds
    assert report.violation_k is None
    assert report.min_slack >= 0
    assert report.max_ratio <= 1.0


def test_lower_bound_equality_for_equal_roots(bounds):
    report = bounds.check_lower_bound(root_set(0.75, 0.75, 0.75, 0.75, 0.75), horizon=100)
    assert report.holds
    assert abs(report.min_slack) <= 1e-9
    assert report.max_ratio == pytest.approx(1.0, rel=1e-9)
    assert report.beta_peak == pytest.approx(math.comb(8, 2) * 0.75 ** 6)


def test_lower_bound_requires_roots_above_rho(bounds):
    with pytest.raises(InvalidInputError):
        bounds.check_lower_bound(root_set(0.5, 0.95, 0.6, 0.9), horizon=100, rho=0.7)


def test_lower_bound_random_real_roots(bounds):
    rng = np.random.default_rng(4)
    for _ in range(200):
        n = int(rng.integers(1, 7))
        rho = float(rng.uniform(0.2, 0.9))
        roots = tuple(float(r) for r in rng.uniform(rho, 0.99, n))
        report = bounds.check_lower_bound(root_set(rho, 0.99, *roots), horizon=500)
        assert report.holds, roots
        assert report.min_slack >= -1e-10


# ==================== 상한 ====================

def test_upper_bound_holds_mixed_signs(bounds):
    report = bounds.check_upper_bound(root_set(-0.3, 0.3, -0.3, 0.1, 0.3), horizon=500)
    assert report.rho == 0.3
    assert report.holds
    assert report.max_ratio <= 1.0 + 1e-10


def test_upper_bound_holds_repeated_opposite_roots(bounds):
    report = bounds.check_upper_bound(root_set(-0.75, 0.75, -0.75, 0.75, -0.75, 0.75), horizon=500)
    assert report.holds
    assert report.peak_value <= report.beta_peak


def test_upper_bound_equality_for_equal_roots(bounds):
    report = bounds.check_upper_bound(root_set(-0.5, 0.5, 0.5, 0.5, 0.5, 0.5), horizon=100)
    assert report.holds
    assert abs(report.min_slack) <= 1e-9


def test_upper_bound_requires_roots_within_rho(bounds):
    with pytest.raises(InvalidInputError):
        bounds.check_upper_bound(root_set(-0.9, 0.9, -0.9, 0.2), horizon=100, rho=0.5)


def test_upper_bound_random_real_roots(bounds):
    rng = np.random.default_rng(5)
    for _ in range(200):
        n = int(rng.integers(1, 7))
        rho = float(rng.uniform(0.2, 0.95))
        roots = tuple(float(r) for r in rng.uniform(-rho, rho, n))
        report = bounds.check_upper_bound(root_set(-rho, rho, *roots), horizon=500, rho=rho)
        assert report.holds, roots
        assert report.min_slack >= -1e-10


def test_sandwich_between_band_edges(bounds):
    rng = np.random.default_rng(6)
    for _ in range(200):
        n = int(rng.integers(1, 7))
        lo, hi = sorted(float(v) for v in rng.uniform(0.1, 0.95, 2))
        roots = tuple(float(r) for r in rng.uniform(lo, hi, n))
        band = root_set(lo, hi, *roots)
        lower = bounds.check_lower_bound(band, horizon=500, rho=lo)
        upper = bounds.check_upper_bound(band, horizon=500, rho=hi)
        assert lower.holds and upper.holds, roots
        assert lower.peak_value == upper.peak_value
        assert lower.beta_peak <= upper.peak_value * (1 + 1e-10) or lower.beta_peak == 1.0
        assert upper.peak_value <= upper.beta_peak * (1 + 1e-10)


# ==================== 피크 존재 판정 ====================

def test_necessary_coefficient_conditions(bounds):
    assert bounds.necessary_coefficient_conditions(root_set(0.8, 0.95, 0.8, 0.9, 0.95))
    assert bounds.necessary_coefficient_conditions(root_set(0.75, 0.75, 0.75, 0.75, 0.75))
    with pytest.raises(InvalidInputError):
        bounds.necessary_coefficient_conditions(root_set(0.5, 0.9, 0.6), rho=0.7)


def test_peak_exists_coefficient_sum(bounds, equal_root_eq):
    assert bounds.peak_exists_coefficient_sum(equal_root_eq(2, 0.5))
    assert not bounds.peak_exists_coefficient_sum(equal_root_eq(2, 0.3))
    # 경계 sum |a_i| = 1 은 피크가 아님
    assert not bounds.peak_exists_coefficient_sum(equal_root_eq(2, math.sqrt(2) - 1))
    assert not bounds.peak_exists_coefficient_sum(equal_root_eq(3, 2 ** (1 / 3) - 1))


def test_peak_exists_requires_stability(bounds, recurrence):
    with pytest.raises(UnstableEquationError):
        bounds.peak_exists_coefficient_sum(recurrence.coefficients_from_roots([1.2, 0.5]))


def test_peak_sufficient_root_sum(bounds):
    assert bounds.peak_sufficient_root_sum([0.6, 0.6])
    assert not bounds.peak_sufficient_root_sum([0.4, 0.4])
    assert not bounds.peak_sufficient_root_sum([0.9, -0.9])
    with pytest.raises(UnstableEquationError):
        bounds.peak_sufficient_root_sum([1.2, 0.1])


# ==================== 추측 탐색 ====================

@pytest.mark.parametrize("n, rho", [(2, 0.5), (3, 0.75)])
def test_conjecture_probe_finds_no_counterexample(bounds, equal_roots, n, rho):
    report = bounds.conjecture_probe(n, rho, samples=300, seed=42)
    assert report.samples_tested == 300
    assert report.counterexample is None
    assert report.reference_peak == equal_roots.alpha_n(EqualRootSpec(order=n, rho=rho))
    assert report.max_observed_peak <= report.reference_peak * (1 + 1e-9)


def test_conjecture_probe_zero_samples(bounds):
    report = bounds.conjecture_probe(2, 0.5, samples=0, seed=0)
    assert report.max_observed_peak == report.reference_peak == 1.25


def test_conjecture_probe_is_independent_of_workers():
    single = RootBoundsService(Settings(workers=1, sample_chunks=4)).conjecture_probe(3, 0.8, samples=40, seed=9)
    pooled = RootBoundsService(Settings(workers=2, sample_chunks=4)).conjecture_probe(3, 0.8, samples=40, seed=9)
    assert single == pooled


def test_conjecture_probe_order_range(bounds):
    with pytest.raises(InvalidInputError):
        bounds.conjecture_probe(9, 0.5, samples=10, seed=0)


def test_conjecture_grid_second_order(bounds):
    report = bounds.conjecture_grid(0.5, 0.01)
    assert report.max_observed_peak == pytest.approx(1.25, rel=1e-9)
    assert report.counterexample is None
    assert report.samples_tested == 101 * 102 // 2


def test_probe_report_requires_counterexample_when_exceeded():
    with pytest.raises(ValidationError):
        ConjectureProbeReport(n=2, rho=0.5, samples_tested=1, seed=0,
                              max_observed_peak=1.3, reference_peak=1.25)


def test_necessary_coefficient_conditions_random(bounds):
    rng = np.random.default_rng(8)
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        rho = float(rng.uniform(0.05, 0.95))
        roots = tuple(float(r) for r in rng.uniform(rho, 1.0, n))
        assert bounds.necessary_coefficient_conditions(root_set(rho, 1.0, *roots)), roots


def test_conjecture_reference_below_peak_threshold(bounds):
    report = bounds.conjecture_probe(2, 0.3, samples=100, seed=1)
    assert report.reference_peak == 1.0
    assert report.counterexample is None
