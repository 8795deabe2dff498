"""
같은 근 방정식 서비스 모듈

모든 근이 rho 인 방정식의 닫힌 해(Lagrange 기저), alpha/beta 피크 곡선,
정확한 피크 시점, 피크 임계값, 점근 추정, 그리고 rho = 1 - 1/n 표 재현을 담당합니다.
"""

import logging
import math
from typing import List, Tuple

from scipy.special import gammaln

from app.core.config import Settings, settings
from app.core.exceptions import DimensionMismatchError, HorizonExhaustedError, InvalidInputError
from app.models.schemas import (
    AsymptoticEstimates,
    DifferenceEquation,
    EqualRootSpec,
    EqualRootSummary,
    InitialCondition,
    PeakCurvePoint,
    Table1Row,
)
from app.services.root_finder import PolynomialRootFinder

# 로거 설정
logger = logging.getLogger(__name__)

_INT64_LIMIT = 2 ** 63


# ==================== 정수/로그 영역 보조 함수 ====================

def log_binomial(p: int, q: int) -> float:
    """log C_p^q (gammaln 기반)"""
    return float(gammaln(p + 1) - gammaln(q + 1) - gammaln(p - q + 1))


def scaled_integer(value: int, exponent: int, rho: float) -> float:
    """
    정수 * rho^exponent 를 계산

    정수가 64비트 범위 안이고 거듭제곱이 정상 범위면 그대로 곱하고,
    그렇지 않으면 로그 영역에서 더합니다.
    """
    if value == 0:
        return 0.0
    power = rho ** exponent
    if abs(value) < _INT64_LIMIT and power != 0.0 and math.isfinite(power):
        return float(value) * power
    sign = 1.0 if value > 0 else -1.0
    return sign * math.exp(math.log(abs(value)) + exponent * math.log(rho))


def scaled_binomial(p: int, q: int, exponent: int, rho: float) -> float:
    """C_p^q * rho^exponent (64비트를 넘으면 gammaln 로그 영역)"""
    if q < 0 or q > p:
        return 0.0
    if p < 1_000_000:
        return scaled_integer(math.comb(p, q), exponent, rho)
    return math.exp(log_binomial(p, q) + exponent * math.log(rho))


class EqualRootsService:
    """
    같은 근 방정식 서비스 클래스

    P_i(k) = prod_{j != i} (k - j) / (i - j) 는 정수 k 에서 정수이므로
    분자와 분모를 정수로 계산한 뒤 한 번만 나눕니다.
    """

    def __init__(self, config: Settings = settings, finder: PolynomialRootFinder = None):
        self.config = config
        self.finder = finder or PolynomialRootFinder(config)

    # ==================== 방정식 / 기저 ====================

    def equation(self, spec: EqualRootSpec) -> DifferenceEquation:
        """a_i = (-1)^i C_n^i rho^i"""
        n, rho = spec.order, spec.rho
        return DifferenceEquation(
            coefficients=tuple((-1) ** i * math.comb(n, i) * rho ** i for i in range(1, n + 1))
        )

    def lagrange_basis_int(self, n: int, i: int, k: int) -> int:
        """P_i(k) 의 정확한 정수값"""
        if not 0 <= i <= n - 1:
            raise InvalidInputError(f'i={i} 는 [0, {n - 1}] 범위여야 합니다.')
        numerator = 1
        for j in range(n):
            if j != i:
                numerator *= k - j
        denominator = math.factorial(i) * math.factorial(n - 1 - i) * (-1) ** (n - 1 - i)
        quotient, remainder = divmod(numerator, denominator)
        assert remainder == 0, "Lagrange 기저는 정수점에서 정수여야 합니다"
        return quotient

    def lagrange_basis(self, n: int, i: int, k: int) -> float:
        """
        Lagrange 기저 P_i(k)

        Example:
            >>> service.lagrange_basis(2, 0, 5)
            -4.0
        """
        return float(self.lagrange_basis_int(n, i, k))

    def basis_term(self, spec: EqualRootSpec, i: int, k: int) -> float:
        """P_i(k) rho^{k-i}"""
        return scaled_integer(self.lagrange_basis_int(spec.order, i, k), k - i, spec.rho)

    def closed_form_solution(self, spec: EqualRootSpec, init: InitialCondition, k: int) -> float:
        """x_k = sum_i x_i P_i(k) rho^{k-i}"""
        if init.length != spec.order:
            raise DimensionMismatchError(f'초기조건 길이 {init.length} 이 차수 {spec.order} 와 다릅니다.')
        if k < 0:
            raise InvalidInputError(f'k={k} 는 0 이상이어야 합니다.')
        return float(sum(x * self.basis_term(spec, i, k) for i, x in enumerate(init.values) if x != 0.0))

    # ==================== alpha / beta 곡선 ====================

    def alpha(self, k: int, spec: EqualRootSpec) -> float:
        """alpha_{k,n} = sum_i |P_i(k)| rho^{k-i} (단위 박스 위 x_k 의 최대값)"""
        if k < spec.order:
            raise InvalidInputError(f'alpha 는 k >= n 에서 정의됩니다 (k={k}, n={spec.order}).')
        return float(sum(abs(self.basis_term(spec, i, k)) for i in range(spec.order)))

    def beta(self, k: int, spec: EqualRootSpec) -> float:
        """beta_{k,n} = C_k^{n-1} rho^{k-n+1} (임펄스 초기조건의 해)"""
        n = spec.order
        if k < n - 1:
            raise InvalidInputError(f'beta 는 k >= n-1 에서 정의됩니다 (k={k}, n={n}).')
        return scaled_binomial(k, n - 1, k - n + 1, spec.rho)

    def curve(self, spec: EqualRootSpec, k_max: int) -> List[PeakCurvePoint]:
        """k = n, ..., k_max 의 (alpha, beta)"""
        return [
            PeakCurvePoint(k=k, alpha=self.alpha(k, spec), beta=self.beta(k, spec))
            for k in range(spec.order, k_max + 1)
        ]

    # ==================== 피크 시점 ====================

    def _ties(self, values: dict) -> Tuple[int, ...]:
        peak = max(values.values())
        return tuple(sorted(k for k, v in values.items() if v >= peak * (1.0 - self.config.tie_tolerance)))

    def k_beta(self, spec: EqualRootSpec) -> Tuple[int, ...]:
        """
        K_beta = floor((n-1)/(1-rho)) 와 동률 짝

        (n-1)/(1-rho) 가 정수이면 beta_{K-1} = beta_K 이므로 두 시점을 모두 돌려줍니다.
        """
        n, rho = spec.order, spec.rho
        x = (n - 1) / (1.0 - rho)
        nearest = round(x)
        center = nearest if abs(x - nearest) <= 1e-9 * max(1.0, x) else math.floor(x)
        candidates = [k for k in (center - 1, center, center + 1) if k >= n - 1]
        return self._ties({k: self.beta(k, spec) for k in candidates})

    def _alpha_scan(self, spec: EqualRootSpec) -> dict:
        """
        k = n-1, n, ... 의 alpha_{k,n}

        k = n-1 에서는 마지막 초기값 하나만 남으므로 alpha = 1 이고, beta 와 같은 범위를 씁니다.
        일반적인 추정치 (n-1)/(1-rho) 를 지난 뒤 2n 스텝 연속 감소하면 멈춥니다.

        Raises:
            HorizonExhaustedError: 구간 상한 안에서 멈추지 못한 경우
        """
        n, rho = spec.order, spec.rho
        estimate = (n - 1) / (1.0 - rho)
        values = {n - 1: 1.0}
        previous = None
        decreasing = 0
        k = n
        while True:
            value = self.alpha(k, spec)
            values[k] = value
            decreasing = decreasing + 1 if previous is not None and value < previous else 0
            if k > estimate and decreasing >= 2 * n:
                break
            if k >= self.config.horizon_cap:
                raise HorizonExhaustedError(horizon=k, what='K_alpha')
            previous = value
            k += 1
        logger.debug(f"alpha 탐색 완료: n={n}, rho={rho}, 탐색 {k - n + 1}스텝")
        return values

    def k_alpha(self, spec: EqualRootSpec) -> Tuple[int, ...]:
        """
        K_alpha = argmax_k alpha_{k,n} (수치 탐색, 동률 포함)

        피크가 없으면 (alpha_n = 1) K_alpha 는 n-1 을 포함합니다.
        """
        return self._ties(self._alpha_scan(spec))

    def k_alpha_stationary(self, rho: float) -> float:
        """n=2 에서 alpha_{k,2} = rho^{k-1}(k(1+rho) - rho) 의 실수 정상점"""
        log_rho = math.log(rho)
        return (rho * log_rho - 1.0 - rho) / ((1.0 + rho) * log_rho)

    def alpha_n(self, spec: EqualRootSpec) -> float:
        return max(self._alpha_scan(spec).values())

    def beta_n(self, spec: EqualRootSpec) -> float:
        return self.beta(self.k_beta(spec)[0], spec)

    # ==================== 임계값 / 점근 ====================

    def peak_threshold_beta(self, n: int) -> float:
        """rho* = 1/n (임펄스 초기조건의 피크 임계값)"""
        if n < 1:
            raise InvalidInputError(f'n={n} 은 1 이상이어야 합니다.')
        return 1.0 / n

    def peak_threshold_alpha(self, n: int) -> float:
        """rho* = 2^{1/n} - 1 ((1+rho)^n - 1 = 1 의 근, 즉 sum |a_i| = 1)"""
        if n < 1:
            raise InvalidInputError(f'n={n} 은 1 이상이어야 합니다.')
        threshold = 2.0 ** (1.0 / n) - 1.0
        by_roots = self.peak_threshold_alpha_by_roots(n)
        if abs(by_roots - threshold) > 1e-9:
            logger.warning(f"alpha 임계값 불일치: 닫힌 형태 {threshold!r}, 근 찾기 {by_roots!r} (n={n})")
        return threshold

    def peak_threshold_alpha_by_roots(self, n: int) -> float:
        """(1+rho)^n - 2 = 0 의 가장 큰 실근 (근 찾기로 교차 확인)"""
        poly = [float(math.comb(n, j)) for j in range(n + 1)]
        poly[-1] -= 2.0
        real_roots = [c.value.real for c in self.finder.find_roots(poly) if c.value.imag == 0.0]
        return max(real_roots)

    def asymptotic_estimates(self, spec: EqualRootSpec) -> AsymptoticEstimates:
        """
        rho -> 1 점근 추정

        n=2, 3 은 alpha/beta 추정식을 함께 주고, 그 외에는 K ~ (n-1)/(1-rho) 만 줍니다.
        """
        n, rho = spec.order, spec.rho
        gap = 1.0 - rho
        generic = (n - 1) / gap
        if n == 2:
            return AsymptoticEstimates(
                K_alpha_est=1.0 / gap,
                alpha_est=2.0 / (math.e * gap),
                K_beta_est=1.0 / gap,
                beta_est=1.0 / (math.e * gap),
                K_alpha_stationary=self.k_alpha_stationary(rho),
                K_beta_stationary=-1.0 / math.log(rho)
            )
        if n == 3:
            return AsymptoticEstimates(
                K_alpha_est=2.0 / gap,
                alpha_est=8.0 / (math.e ** 2 * gap ** 2),
                K_beta_est=2.0 / gap,
                beta_est=2.0 / (math.e ** 2 * gap ** 2)
            )
        return AsymptoticEstimates(K_alpha_est=generic, K_beta_est=generic)

    # ==================== 요약 / 표 ====================

    def summary(self, spec: EqualRootSpec) -> EqualRootSummary:
        """alpha_n, beta_n, K_alpha, K_beta, 두 임계값"""
        alphas = self._alpha_scan(spec)
        k_alpha = self._ties(alphas)
        k_beta = self.k_beta(spec)
        return EqualRootSummary(
            order=spec.order,
            rho=spec.rho,
            alpha_n=max(alphas.values()),
            beta_n=self.beta(k_beta[0], spec),
            K_alpha=k_alpha,
            K_beta=k_beta,
            rho_star_beta=self.peak_threshold_beta(spec.order),
            rho_star_alpha=self.peak_threshold_alpha(spec.order)
        )

    def table1_row(self, n: int) -> Table1Row:
        """
        rho = 1 - 1/n 에서의 표 한 줄

        beta_n 은 닫힌 식 C_{n^2-n-1}^{n^2-2n} (1-1/n)^{n^2-2n} 로,
        alpha_n 과 K_alpha 는 수치 탐색으로 구합니다.
        """
        if n < 2:
            raise InvalidInputError(f'n={n} 은 2 이상이어야 합니다.')
        spec = EqualRootSpec(order=n, rho=1.0 - 1.0 / n)
        alphas = self._alpha_scan(spec)
        row = Table1Row(
            n=n,
            beta_n=scaled_binomial(n * n - n - 1, n * n - 2 * n, n * n - 2 * n, spec.rho),
            alpha_n=max(alphas.values()),
            K_beta=self.k_beta(spec),
            K_alpha=self._ties(alphas)
        )
        logger.info(f"표 행 계산: n={n}, beta_n={row.beta_n:.5g}, alpha_n={row.alpha_n:.5g}")
        return row

    def table1(self, n_max: int, n_min: int = 2) -> List[Table1Row]:
        return [self.table1_row(n) for n in range(n_min, n_max + 1)]


# 전역 서비스 인스턴스
equal_roots_service = EqualRootsService()
