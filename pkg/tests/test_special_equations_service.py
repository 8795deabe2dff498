import math

import numpy as np
import pytest

from app.core.config import Settings
from app.core.exceptions import InvalidInputError, UnstableEquationError
from app.models.schemas import InitialCondition, TrinomialEquation
from app.services.special_equations_service import (
    MARKOV_INIT,
    SpecialEquationsService,
    schur_cohn_stable,
    trinomial_polys,
)


# ==================== Markov 예제 ====================

def test_markov_equation_coefficients(special):
    assert special.markov_equation(1.0).coefficients == (2.0, 3.0, 2.0, 1.0)
    np.testing.assert_allclose(special.markov_equation(0.5).coefficients, (1.0, 0.75, 0.25, 0.0625))


@pytest.mark.parametrize("rho", [0.5, 0.9, 0.99])
def test_markov_closed_form_matches_simulation(special, recurrence, rho):
    x = recurrence.simulate(special.markov_equation(rho), MARKOV_INIT, 500).samples
    for k in range(501):
        # k = 3m 에서는 0 이므로 이웃 샘플의 크기로 절대 오차를 잡음
        scale = abs(k - 1) * rho ** (k - 2) if k >= 2 else 1.0
        assert x[k] == pytest.approx(special.markov_closed_form(rho, k), rel=1e-9, abs=1e-9 * scale)
        if k % 3 == 0:
            assert special.markov_closed_form(rho, k) == 0.0


def test_markov_peak_near_unit_rho(special):
    report = special.markov_peak(0.99)
    assert report.peak_value == pytest.approx(99 * 0.99 ** 98, rel=1e-9)
    assert report.peak_value == pytest.approx(36.973, abs=1e-3)
    assert report.peak_instants == (100, 101)
    assert report.peak_instant == 100
    estimates = special.markov_peak_estimates(0.99)
    assert estimates.K_est == pytest.approx(100)
    assert estimates.eta_est == pytest.approx(37.1595, abs=1e-4)


def test_markov_half_rho_has_no_peak(special):
    report = special.markov_peak(0.5)
    assert not report.has_peak
    assert report.peak_value == pytest.approx(3 * 0.5 ** 2, rel=1e-12)
    assert report.overall_max == 1.0


def test_markov_peak_threshold(special):
    assert not special.markov_peak(0.55).has_peak
    assert special.markov_peak(0.60).has_peak
    assert special.markov_peak_threshold() == pytest.approx(1 / math.sqrt(3), abs=1e-9)


def test_markov_unit_rho_is_unstable(special):
    with pytest.raises(UnstableEquationError):
        special.markov_peak(1.0)


def test_markov_summary(special):
    summary = special.markov_summary(0.99)
    assert summary.peak_instant == 100
    assert summary.has_peak
    assert summary.rho_star == pytest.approx(0.57735, abs=1e-5)


# ==================== 삼항 방정식 ====================

def test_trinomial_to_equation(special):
    eq = special.trinomial_to_equation(TrinomialEquation(delay_order=3, a=1.1, b=0.2))
    assert eq.coefficients == (-1.1, 0.0, 0.0, 0.2)


def test_classify_points(special):
    peak = special.classify_point(1, 1.99, 0.995)
    assert peak.in_stability and peak.in_peak_domain and not peak.in_cohn
    inner = special.classify_point(2, 0.3, 0.2)
    assert inner.in_stability and inner.in_cohn and not inner.in_peak_domain
    outside = special.classify_point(2, 2.5, 0.5)
    assert not outside.in_stability and not outside.in_peak_domain


def test_first_order_peak_example(special, recurrence):
    eq = special.trinomial_to_equation(TrinomialEquation(delay_order=1, a=1.99, b=0.995))
    report = recurrence.peak(eq, InitialCondition.impulse(2))
    assert report.has_peak
    assert report.peak_value > 10


def test_cohn_rhombus_inside_stability_region(special):
    rng = np.random.default_rng(17)
    for n in range(1, 6):
        for _ in range(30):
            a, b = rng.uniform(-1, 1, 2)
            scale = rng.uniform(0.0, 0.99) / (abs(a) + abs(b))
            sample = special.classify_point(n, float(a * scale), float(b * scale))
            assert sample.in_cohn and sample.in_stability


def test_schur_cohn_agrees_with_root_finder(special):
    rng = np.random.default_rng(23)
    for n in (1, 2, 4, 7):
        a = rng.uniform(-2.2, 2.2, 100)
        b = rng.uniform(-1.2, 1.2, 100)
        stable = schur_cohn_stable(trinomial_polys(n, a, b))
        for ai, bi, si in zip(a, b, stable):
            radius = special.trinomial_radius(n, float(ai), float(bi))
            if abs(radius - 1.0) > 1e-6:
                assert bool(si) == (radius < 1.0), (n, ai, bi)


def test_schur_cohn_simple_cases():
    assert schur_cohn_stable(np.array([[1.0, -0.5], [1.0, -1.5]])).tolist() == [True, False]
    quadratics = np.array([[1.0, -1.5, 0.5625], [1.0, 0.0, -1.0], [1.0, -2.0, 1.0]])
    assert schur_cohn_stable(quadratics).tolist() == [True, False, False]


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_stability_boundary_points_have_unit_radius(special, n):
    boundary = special.stability_boundary(n, 120)
    assert boundary.n == n
    assert len(boundary.points) > 0
    for point in boundary.points[::7]:
        assert 0.0 <= point.omega <= math.pi
        assert abs(special.trinomial_radius(n, point.a, point.b) - 1.0) <= 1e-6


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_stability_boundary_cusp_at_small_omega(special, n):
    boundary = special.stability_boundary(n, 400)
    curve = [p for p in boundary.points if 0.0 < p.omega < math.pi]
    assert curve
    nearest = min(curve, key=lambda p: p.omega)
    assert nearest.omega == pytest.approx(math.pi / 800)
    assert nearest.a == pytest.approx((n + 1) / n, abs=1e-3)
    assert nearest.b == pytest.approx(1.0 / n, abs=1e-3)


def test_stability_boundary_skips_singular_samples(special):
    # omega = pi (i + 0.5) / 3 이 pi/2 를 지나므로 n = 2 에서 sin(2 omega) = 0
    boundary = special.stability_boundary(2, 3)
    assert boundary.skipped_singular == 1


def test_region_areas_deterministic():
    single = SpecialEquationsService(Settings(workers=1)).region_areas(2, 20_000, seed=3)
    pooled = SpecialEquationsService(Settings(workers=2)).region_areas(2, 20_000, seed=3)
    assert single == pooled


def test_region_areas_first_order(special):
    areas = special.region_areas(1, 50_000, seed=1)
    assert areas.samples == 50_000
    assert areas.area_S == pytest.approx(4.0, abs=0.15)
    assert areas.area_C == pytest.approx(2.0, abs=0.15)
    assert areas.area_P <= areas.area_S


@pytest.mark.slow
def test_region_areas_ratio_first_order(special):
    areas = special.region_areas(1, 1_000_000, seed=7)
    assert areas.ratio == pytest.approx(0.5, abs=0.02)
    assert areas.stderr_ratio < 0.01


def test_region_areas_ratio_shrinks_with_order(special):
    areas = special.region_areas(7, 200_000, seed=7)
    assert areas.ratio < 0.04


def test_region_areas_minimum_samples(special):
    with pytest.raises(InvalidInputError):
        special.region_areas(1, 100, seed=0)


def test_region_grid(special):
    samples = special.region_grid(3, 20)
    assert len(samples) == 400
    for sample in samples:
        if sample.in_peak_domain:
            assert sample.in_stability
        if abs(sample.a) + abs(sample.b) < 1.0:
            assert sample.in_stability and sample.in_cohn


# ==================== 이중근 / 램프 ====================

def test_double_root_family(special):
    family = special.double_root_family(3, 1.1)
    assert family.rho == pytest.approx(0.825)
    assert family.b2 == pytest.approx(1.1 ** 4 * 27 / 256, rel=1e-12)
    assert family.in_band
    assert family.negative_root is None


def test_double_root_family_even_order_negative_root(special):
    family = special.double_root_family(2, 1.2)
    assert family.negative_root is not None
    r = family.negative_root
    assert r < 0
    assert r ** 3 - 1.2 * r ** 2 + family.b2 == pytest.approx(0.0, abs=1e-10)


def test_double_root_family_outside_band(special):
    assert not special.double_root_family(3, 1.5).in_band


def test_ramp_solution(special, recurrence):
    solution = special.ramp_solution(3, 1.1)
    assert solution.K == (5,)
    rho = 0.825
    assert solution.eta_normalized == pytest.approx(5 * rho ** 5 / (3 * rho ** 3), rel=1e-9)
    eq = special.trinomial_to_equation(TrinomialEquation(delay_order=3, a=1.1, b=solution.b))
    x = recurrence.simulate(eq, special.ramp_init(3, 1.1), 60)
    for k in range(61):
        assert x[k] == pytest.approx(solution.value(k), rel=1e-9, abs=1e-12)


def test_ramp_solution_tie(special):
    solution = special.ramp_solution(3, 3.2 / 3)
    assert solution.K == (4, 5)


def test_standard_init_bound(special):
    bound = special.standard_init_peak(3, 1.1)
    assert bound.lower_bound == pytest.approx(1.331)
    assert bound.report.peak_value >= bound.lower_bound * (1 - 1e-12)
    assert bound.cap == pytest.approx(math.e)


def test_standard_init_preconditions(special):
    with pytest.raises(InvalidInputError):
        special.standard_init_lower_bound(3, 0.9)
    with pytest.raises(UnstableEquationError):
        special.standard_init_lower_bound(1, 1.5, 0.1)


def test_standard_init_bound_negative_a(special):
    b = special.double_root_family(3, 1.1).b2
    assert special.trinomial_radius(3, -1.1, b) < 1.0
    bound = special.standard_init_peak(3, -1.1, b)
    assert bound.lower_bound == pytest.approx(1.331)
    assert bound.report.peak_value >= bound.lower_bound * (1 - 1e-12)


def test_ramp_normalization_uses_initial_sup_norm(special):
    rho = 0.825
    assert special.ramp_init(3, 1.1).sup_norm == pytest.approx(3 * rho ** 3, rel=1e-12)
