import logging
import math

import numpy as np
import pytest

from app.core.exceptions import DimensionMismatchError, InvalidInputError
from app.models.schemas import EqualRootSpec, InitialCondition
from app.services.equal_roots_service import log_binomial, scaled_binomial, scaled_integer

# rho = 1 - 1/n 에서의 (beta_n, alpha_n, K_beta, K_alpha)
TABLE = {
    2: (1.0, 1.25, (1, 2), (2,)),
    3: (2.9630, 7.0014, (5, 6), (6,)),
    4: (16.519, 78.002, (11, 12), (12,)),
    5: (136.37, 1292.5, (19, 20), (20,)),
    6: (1493.8, 28408, (29, 30), (30,)),
    7: (20405, 778120, (41, 42), (42,)),
}


def spec(n, rho):
    return EqualRootSpec(order=n, rho=rho)


# ==================== 보조 함수 ====================

def test_log_binomial_matches_comb():
    assert log_binomial(50, 7) == pytest.approx(math.log(math.comb(50, 7)), rel=1e-12)


def test_scaled_integer_falls_back_to_log_domain():
    huge = 3 ** 60
    assert scaled_integer(huge, 100, 0.5) == pytest.approx(huge * 0.5 ** 100, rel=1e-12)
    assert scaled_integer(-(2 ** 70), 1100, 0.5) == pytest.approx(-(2.0 ** -1030), rel=1e-12)
    assert scaled_integer(0, 5, 0.5) == 0.0


def test_scaled_binomial_large_k():
    k = 2_000_000
    expected = math.exp(log_binomial(k, 2) + (k - 2) * math.log(1 - 1e-6))
    assert scaled_binomial(k, 2, k - 2, 1 - 1e-6) == pytest.approx(expected, rel=1e-9)
    assert scaled_binomial(5, 7, 0, 0.5) == 0.0


# ==================== Lagrange 기저 ====================

@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_lagrange_basis_interpolates(equal_roots, n):
    for i in range(n):
        for m in range(n):
            assert equal_roots.lagrange_basis(n, i, m) == (1.0 if i == m else 0.0)


def test_lagrange_basis_second_order(equal_roots):
    for k in range(0, 20):
        assert equal_roots.lagrange_basis(2, 0, k) == -(k - 1)
        assert equal_roots.lagrange_basis(2, 1, k) == k


def test_lagrange_basis_signs_alternate(equal_roots):
    assert [np.sign(equal_roots.lagrange_basis(4, i, 6)) for i in range(4)] == [-1, 1, -1, 1]
    for n in range(2, 8):
        for k in range(n, 60):
            for i in range(n):
                assert np.sign(equal_roots.lagrange_basis_int(n, i, k)) == (-1) ** (n - 1 - i)


def test_lagrange_basis_index_range(equal_roots):
    with pytest.raises(InvalidInputError):
        equal_roots.lagrange_basis(3, 3, 5)


# ==================== 닫힌 해 ====================

def test_closed_form_third_order_formula(equal_roots):
    rho = 0.6
    init = InitialCondition(values=(0.3, -0.7, 0.9))
    x0, x1, x2 = init.values
    for k in range(0, 30):
        expected = (x0 * (k - 1) * (k - 2) / 2 * rho ** k
                    - x1 * k * (k - 2) * rho ** (k - 1)
                    + x2 * k * (k - 1) / 2 * rho ** (k - 2))
        assert equal_roots.closed_form_solution(spec(3, rho), init, k) == pytest.approx(expected, rel=1e-12, abs=1e-15)


def test_closed_form_reproduces_initial_values(equal_roots):
    init = InitialCondition(values=(0.25, -1.0, 0.5, 0.75))
    for k, x in enumerate(init.values):
        assert equal_roots.closed_form_solution(spec(4, 0.8), init, k) == pytest.approx(x, rel=1e-12)


def test_closed_form_impulse_peak(equal_roots):
    value = equal_roots.closed_form_solution(spec(4, 0.75), InitialCondition.impulse(4), 12)
    assert value == pytest.approx(math.comb(12, 3) * 0.75 ** 9, rel=1e-12)


def test_closed_form_dimension_mismatch(equal_roots):
    with pytest.raises(DimensionMismatchError):
        equal_roots.closed_form_solution(spec(3, 0.5), InitialCondition.impulse(2), 4)


def test_closed_form_agrees_with_recurrence(equal_roots, recurrence):
    rng = np.random.default_rng(2024)
    horizon = 300
    for case in range(10):
        n = int(rng.integers(1, 9))
        s = spec(n, float(rng.uniform(0.3, 0.7)))
        eq = equal_roots.equation(s)
        basis = np.array([[equal_roots.basis_term(s, i, k) for i in range(n)] for k in range(horizon + 1)])
        for _ in range(5):
            init = InitialCondition(values=tuple(rng.uniform(-1, 1, n)))
            simulated = np.array(recurrence.simulate(eq, init, horizon).samples)
            closed = basis @ np.array(init.values)
            scale = max(1.0, float(np.abs(simulated).max()))
            assert np.abs(simulated - closed).max() <= 1e-9 * scale


# ==================== alpha / beta ====================

def test_alpha_beta_second_order(equal_roots):
    rho = 0.7
    for k in range(2, 30):
        assert equal_roots.alpha(k, spec(2, rho)) == pytest.approx((k - 1) * rho ** k + k * rho ** (k - 1), rel=1e-12)
        assert equal_roots.beta(k, spec(2, rho)) == pytest.approx(k * rho ** (k - 1), rel=1e-12)


def test_beta_third_order_and_boundary(equal_roots):
    rho = 0.7
    for k in range(3, 30):
        assert equal_roots.beta(k, spec(3, rho)) == pytest.approx(k * (k - 1) / 2 * rho ** (k - 2), rel=1e-12)
    for n in range(1, 8):
        assert equal_roots.beta(n - 1, spec(n, rho)) == 1.0


def test_alpha_table_value(equal_roots):
    assert equal_roots.alpha(2, spec(2, 0.5)) == 1.25


def test_alpha_domain(equal_roots):
    with pytest.raises(InvalidInputError):
        equal_roots.alpha(2, spec(3, 0.5))
    with pytest.raises(InvalidInputError):
        equal_roots.beta(1, spec(3, 0.5))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6])
def test_alpha_dominates_beta(equal_roots, n):
    for point in equal_roots.curve(spec(n, 0.8), 80):
        if n == 1:
            assert point.alpha == pytest.approx(point.beta)
        else:
            assert point.alpha > point.beta > 0


@pytest.mark.parametrize("n", [2, 3, 4])
def test_alternating_init_attains_alpha(equal_roots, recurrence, n):
    s = spec(n, 0.75)
    trajectory = recurrence.simulate(equal_roots.equation(s), InitialCondition.alternating(n), 40)
    for k in range(n, 41):
        assert trajectory[k] == pytest.approx(equal_roots.alpha(k, s), rel=1e-10)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_alpha_matches_worst_case_sensitivity(equal_roots, recurrence, n):
    s = spec(n, 0.6)
    basis = recurrence.basis_trajectories(equal_roots.equation(s), 30)
    for k in range(n, 31):
        assert np.abs(basis[k]).sum() == pytest.approx(equal_roots.alpha(k, s), rel=1e-10)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_alpha_beta_ratio_near_unit_rho(equal_roots, n):
    s = spec(n, 0.99)
    k = int(20 * n / (1 - s.rho))
    ratio = equal_roots.alpha(k, s) / equal_roots.beta(k, s)
    assert ratio == pytest.approx(2 ** (n - 1), rel=0.1)


# ==================== 피크 시점 ====================

def brute_force_k_beta(n, rho):
    top = int(10 * n / (1 - rho)) + 10
    values = {k: math.comb(k, n - 1) * rho ** (k - n + 1) for k in range(n - 1, top)}
    peak = max(values.values())
    return tuple(sorted(k for k, v in values.items() if v >= peak * (1 - 1e-9))), peak


def test_k_beta_matches_brute_force_grid(equal_roots):
    for n in range(1, 9):
        for rho in np.linspace(0.05, 0.95, 25):
            s = spec(n, float(rho))
            expected, peak = brute_force_k_beta(n, float(rho))
            assert equal_roots.k_beta(s) == expected, (n, rho)
            assert equal_roots.beta_n(s) == pytest.approx(peak, rel=1e-12)
            # 피크 존재 <=> rho > 1/n
            if abs(rho - 1 / n) > 1e-9:
                assert (peak > 1.0) == (rho > 1 / n), (n, rho)


def test_k_beta_table_ties(equal_roots):
    assert equal_roots.k_beta(spec(2, 0.5)) == (1, 2)
    assert equal_roots.k_beta(spec(3, 2 / 3)) == (5, 6)
    assert equal_roots.k_beta(spec(4, 0.75)) == (11, 12)


def test_k_alpha_examples(equal_roots):
    assert equal_roots.k_alpha(spec(3, 2 / 3)) == (6,)
    assert equal_roots.k_alpha(spec(6, 5 / 6)) == (30,)


@pytest.mark.parametrize("rho", [0.5, 0.7, 0.9, 0.95])
def test_k_alpha_second_order_stationary_point(equal_roots, rho):
    stationary = equal_roots.k_alpha_stationary(rho)
    k = equal_roots.k_alpha(spec(2, rho))[0]
    assert k in (max(2, math.floor(stationary)), max(2, math.ceil(stationary)))


# ==================== 임계값 / 점근 ====================

def test_peak_threshold_beta(equal_roots):
    assert equal_roots.peak_threshold_beta(2) == 0.5
    assert equal_roots.peak_threshold_beta(1) == 1.0
    assert equal_roots.peak_threshold_beta(10) == pytest.approx(0.1)
    assert equal_roots.beta_n(spec(2, 0.6)) > 1.0
    assert equal_roots.beta_n(spec(2, 0.4)) == 1.0


def test_peak_threshold_alpha(equal_roots):
    assert equal_roots.peak_threshold_alpha(1) == 1.0
    assert equal_roots.peak_threshold_alpha(2) == pytest.approx(math.sqrt(2) - 1, rel=1e-12)
    rho_star = equal_roots.peak_threshold_alpha(3)
    assert rho_star == pytest.approx(0.2599, abs=1e-4)
    assert rho_star ** 3 + 3 * rho_star ** 2 + 3 * rho_star - 1 == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_peak_threshold_alpha_by_roots(equal_roots, n):
    assert equal_roots.peak_threshold_alpha_by_roots(n) == pytest.approx(equal_roots.peak_threshold_alpha(n), abs=1e-12)


def test_peak_threshold_alpha_cross_check_is_quiet(equal_roots, caplog):
    with caplog.at_level(logging.WARNING, logger="app.services.equal_roots_service"):
        for n in range(1, 9):
            equal_roots.peak_threshold_alpha(n)
    assert not [r for r in caplog.records if "불일치" in r.getMessage()]


def test_asymptotic_second_order(equal_roots):
    s = spec(2, 0.99)
    estimates = equal_roots.asymptotic_estimates(s)
    assert estimates.beta_est == pytest.approx(1 / (math.e * 0.01), rel=1e-9)
    assert equal_roots.beta_n(s) == pytest.approx(estimates.beta_est, rel=0.05)
    assert equal_roots.alpha_n(s) == pytest.approx(estimates.alpha_est, rel=0.05)
    assert estimates.K_beta_est == pytest.approx(100, rel=1e-9)


def test_asymptotic_third_order(equal_roots):
    estimates = equal_roots.asymptotic_estimates(spec(3, 0.99))
    assert estimates.K_alpha_est == pytest.approx(200, rel=1e-9)
    assert estimates.alpha_est == pytest.approx(8 / (math.e ** 2 * 1e-4), rel=1e-9)
    assert equal_roots.beta_n(spec(3, 0.99)) == pytest.approx(estimates.beta_est, rel=0.05)


def test_asymptotic_far_from_unit_rho(equal_roots):
    estimates = equal_roots.asymptotic_estimates(spec(2, 0.5))
    assert estimates.alpha_est == pytest.approx(1.4715, abs=1e-4)
    assert equal_roots.alpha_n(spec(2, 0.5)) == 1.25


def test_asymptotic_generic_order(equal_roots):
    estimates = equal_roots.asymptotic_estimates(spec(5, 0.9))
    assert estimates.K_alpha_est == pytest.approx(40)
    assert estimates.alpha_est is None


# ==================== 표 ====================

@pytest.mark.parametrize("n", sorted(TABLE))
def test_table1_rows(equal_roots, n):
    beta_n, alpha_n, k_beta, k_alpha = TABLE[n]
    row = equal_roots.table1_row(n)
    assert row.beta_n == pytest.approx(beta_n, rel=5e-4)
    assert row.alpha_n == pytest.approx(alpha_n, rel=5e-4)
    assert row.K_beta == k_beta
    assert row.K_alpha == k_alpha


def test_table1_beta_closed_form_matches_scan(equal_roots):
    for n in range(2, 8):
        row = equal_roots.table1_row(n)
        assert row.beta_n == pytest.approx(equal_roots.beta_n(spec(n, 1 - 1 / n)), rel=1e-12)


def test_table1_requires_second_order(equal_roots):
    with pytest.raises(InvalidInputError):
        equal_roots.table1_row(1)


def test_summary(equal_roots):
    summary = equal_roots.summary(spec(3, 2 / 3))
    assert summary.K_beta == (5, 6)
    assert summary.K_alpha == (6,)
    assert summary.alpha_n >= summary.beta_n
    assert summary.rho_star_beta == pytest.approx(1 / 3)


@pytest.mark.parametrize("n, rho", [(2, 0.3), (3, 0.2), (1, 0.5), (5, 0.1), (1, 0.95)])
def test_summary_without_peak(equal_roots, n, rho):
    summary = equal_roots.summary(spec(n, rho))
    assert summary.alpha_n == 1.0
    assert summary.beta_n == 1.0
    assert n - 1 in summary.K_alpha
    assert n - 1 in summary.K_beta


def test_alpha_n_switches_at_threshold(equal_roots):
    for n in range(2, 7):
        threshold = equal_roots.peak_threshold_alpha(n)
        assert equal_roots.alpha_n(spec(n, threshold * 0.95)) == 1.0
        assert equal_roots.alpha_n(spec(n, min(threshold * 1.05, 0.99))) > 1.0
        assert min(equal_roots.k_alpha(spec(n, min(threshold * 1.05, 0.99)))) >= n
