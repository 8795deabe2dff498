"""
실근 상/하한 서비스 모듈

실근 방정식의 임펄스 해에 대한 beta 곡선 상/하한 검사, 피크 존재 판정,
그리고 최악 근 배치 추측의 수치 탐색을 담당합니다.
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.core.config import Settings, settings
from app.core.exceptions import InvalidInputError, NearCoincidentRootsError, UnstableEquationError
from app.models.schemas import (
    BoundCheckReport,
    ConjectureCounterexample,
    ConjectureProbeReport,
    DifferenceEquation,
    EqualRootSpec,
    InitialCondition,
    RealRootSet,
)
from app.services.equal_roots_service import EqualRootsService
from app.services.recurrence_service import RecurrenceService
from app.services.sampling import run_chunked

# 로거 설정
logger = logging.getLogger(__name__)

MIN_ROOT_GAP = 1e-8
MAX_PROBE_ORDER = 8
COEFFICIENT_SUM_TOLERANCE = 1e-12
# beta_k 가 이보다 작으면 상대 여유를 이 값 기준으로 계산
_BETA_FLOOR = 1e-250


def _draw_roots(rng: np.random.Generator, n: int, rho: float) -> List[complex]:
    """반경 rho 원판 안의 근 배치 (실근과 켤레쌍을 반반 확률로 섞음)"""
    roots: List[complex] = []
    while len(roots) < n:
        if n - len(roots) >= 2 and rng.random() < 0.5:
            radius = rho * math.sqrt(rng.random())
            angle = math.pi * rng.random()
            z = radius * complex(math.cos(angle), math.sin(angle))
            roots.extend((z, z.conjugate()))
        else:
            roots.append(complex(rng.uniform(-rho, rho), 0.0))
    return roots


def _probe_chunk(job) -> Tuple[float, Optional[Tuple[complex, ...]], Optional[Tuple[float, ...]]]:
    """한 청크의 근 배치를 평가해 (최대 피크, 그때의 근, 초기조건) 반환"""
    size, seed_seq, (n, rho, config) = job
    service = RecurrenceService(config)
    rng = np.random.default_rng(seed_seq)
    best_value, best_roots, best_init = -1.0, None, None
    for _ in range(size):
        roots = _draw_roots(rng, n, rho)
        eq = service.coefficients_from_roots(roots)
        radius = max(abs(r) for r in roots)
        result = service.worst_case_peak(eq, radius=radius)
        if result.report.peak_value > best_value:
            best_value = result.report.peak_value
            best_roots = tuple(roots)
            best_init = result.init.values
    return best_value, best_roots, best_init


class RootBoundsService:
    """
    실근 상/하한 서비스 클래스

    Example:
        >>> roots = RealRootSet(declared_band=(0.8, 0.99), roots=(0.8, 0.9, 0.95))
        >>> service.check_lower_bound(roots, horizon=200).holds
        True
    """

    def __init__(self, config: Settings = settings,
                 recurrence: Optional[RecurrenceService] = None,
                 equal_roots: Optional[EqualRootsService] = None):
        self.config = config
        self.recurrence = recurrence or RecurrenceService(config)
        self.equal_roots = equal_roots or EqualRootsService(config, self.recurrence.finder)

    # ==================== 임펄스 해 ====================

    def impulse_solution_distinct_roots(self, roots: RealRootSet, k: int) -> float:
        """
        서로 다른 근에 대한 임펄스 해 x_k = sum_i lambda_i^k / prod_{j != i} (lambda_i - lambda_j)

        Raises:
            NearCoincidentRootsError: 근 사이 최소 간격이 1e-8 이하 (simulate 사용)
        """
        if k < 0:
            raise InvalidInputError(f'k={k} 는 0 이상이어야 합니다.')
        lam = np.asarray(roots.roots, dtype=float)
        if lam.size > 1:
            gaps = np.abs(lam[:, None] - lam[None, :])[np.triu_indices(lam.size, 1)]
            min_gap = float(gaps.min())
            if min_gap <= MIN_ROOT_GAP:
                raise NearCoincidentRootsError(min_gap, MIN_ROOT_GAP)

        total = 0.0
        for i, li in enumerate(lam):
            denominator = np.prod([li - lj for j, lj in enumerate(lam) if j != i])
            total += li ** k / denominator
        return float(total)

    # ==================== 상/하한 검사 ====================

    def _impulse_trajectory(self, roots: RealRootSet, horizon: int) -> np.ndarray:
        eq = self.recurrence.coefficients_from_roots(roots.roots)
        n = roots.order
        if horizon < n:
            raise InvalidInputError(f'horizon({horizon}) 은 차수 {n} 이상이어야 합니다.')
        return self.recurrence.run(eq.coefficients, np.array(InitialCondition.impulse(n).values), horizon)

    def _beta_curve(self, spec: EqualRootSpec, horizon: int) -> np.ndarray:
        return np.array([self.equal_roots.beta(k, spec) for k in range(spec.order, horizon + 1)])

    def check_lower_bound(self, roots: RealRootSet, horizon: int, rho: Optional[float] = None) -> BoundCheckReport:
        """
        모든 근이 [rho, 1) 에 있을 때 임펄스 해가 x_k >= beta_{k,n}(rho) 인지 검사

        rho 를 주지 않으면 declared_band 의 하한을 씁니다.
        """
        rho = roots.declared_band[0] if rho is None else rho
        if not 0.0 < rho < 1.0:
            raise InvalidInputError(f'rho={rho} 는 (0, 1) 안에 있어야 합니다.')
        if min(roots.roots) < rho or max(roots.roots) >= 1.0:
            raise InvalidInputError(f'모든 근이 [{rho}, 1) 안에 있어야 합니다: {roots.roots}')

        n = roots.order
        spec = EqualRootSpec(order=n, rho=rho)
        x = self._impulse_trajectory(roots, horizon)[n:]
        beta = self._beta_curve(spec, horizon)
        slack = (x - beta) / np.maximum(beta, _BETA_FLOOR)
        with np.errstate(divide='ignore'):
            ratio = np.where(x > 0, beta / np.where(x > 0, x, 1.0), np.inf)
        return self._report('lower', spec, horizon, slack, float(ratio.max()), float(np.abs(x).max()))

    def check_upper_bound(self, roots: RealRootSet, horizon: int, rho: Optional[float] = None) -> BoundCheckReport:
        """
        모든 |lambda_i| <= rho 일 때 임펄스 해가 |x_k| <= beta_{k,n}(rho) 인지 검사

        rho 를 주지 않으면 max(|lo|, |hi|) 를 씁니다.
        """
        lo, hi = roots.declared_band
        rho = max(abs(lo), abs(hi)) if rho is None else rho
        if not 0.0 < rho < 1.0:
            raise InvalidInputError(f'rho={rho} 는 (0, 1) 안에 있어야 합니다.')
        if max(abs(r) for r in roots.roots) > rho:
            raise InvalidInputError(f'모든 근의 절대값이 {rho} 이하여야 합니다: {roots.roots}')

        n = roots.order
        spec = EqualRootSpec(order=n, rho=rho)
        x = np.abs(self._impulse_trajectory(roots, horizon)[n:])
        beta = self._beta_curve(spec, horizon)
        floor = np.maximum(beta, _BETA_FLOOR)
        slack = (beta - x) / floor
        return self._report('upper', spec, horizon, slack, float((x / floor).max()), float(x.max()))

    def _report(self, side: str, spec: EqualRootSpec, horizon: int, slack: np.ndarray,
                max_ratio: float, peak_value: float) -> BoundCheckReport:
        n = spec.order
        tol = self.config.bound_tolerance
        worst = int(np.argmin(slack))
        violations = np.nonzero(slack < -tol)[0]
        violation_k = int(violations[0]) + n if violations.size else None
        if violation_k is not None:
            logger.warning(f"{side} 한계 위반: k={violation_k}, slack={float(slack[violations[0]]):.3g}")
        return BoundCheckReport(
            side=side,
            rho=spec.rho,
            horizon=horizon,
            holds=violation_k is None,
            min_slack=float(slack[worst]),
            worst_k=worst + n,
            max_ratio=max_ratio,
            violation_k=violation_k,
            peak_value=peak_value,
            beta_peak=self.equal_roots.beta_n(spec)
        )

    # ==================== 피크 존재 판정 ====================

    def necessary_coefficient_conditions(self, roots: RealRootSet, rho: Optional[float] = None) -> bool:
        """
        모든 근이 rho 이상일 때의 계수 필요조건 (-1)^i a_i >= C_n^i rho^i

        (-1)^i a_i 는 근의 i차 기본대칭식이므로 같은 근에서 등호가 성립합니다.
        """
        rho = roots.declared_band[0] if rho is None else rho
        if not rho > 0.0:
            raise InvalidInputError(f'rho={rho} 는 양수여야 합니다.')
        if min(roots.roots) < rho:
            raise InvalidInputError(f'모든 근이 rho={rho} 이상이어야 합니다: {roots.roots}')

        n = roots.order
        poly = np.poly(np.asarray(roots.roots, dtype=float))
        for i in range(1, n + 1):
            symmetric = (-1) ** i * poly[i]
            required = math.comb(n, i) * rho ** i
            if symmetric < required * (1.0 - COEFFICIENT_SUM_TOLERANCE):
                logger.debug(f"필요조건 위반: i={i}, e_i={symmetric!r} < {required!r}")
                return False
        return True

    def peak_exists_coefficient_sum(self, eq: DifferenceEquation) -> bool:
        """
        단위 박스 최악 초기조건에 대해 피크가 있는지 (sum |a_i| > 1)

        sum |a_i| = 1 인 경계는 피크가 아닙니다. 부동소수점 경계 잡음은 1e-12 상대 허용오차로 흡수합니다.
        """
        self.recurrence.require_stable(eq)
        return eq.coefficient_sum > 1.0 + COEFFICIENT_SUM_TOLERANCE

    def peak_sufficient_root_sum(self, roots: Sequence[complex]) -> bool:
        """|sum lambda_i| > 1 (임펄스 초기조건 피크의 충분조건, 양의 근이면 필요충분)"""
        values = [complex(r) for r in roots]
        if not values:
            raise InvalidInputError('근 목록이 비어 있습니다.')
        radius = max(abs(r) for r in values)
        if not radius < 1.0:
            raise UnstableEquationError(radius)
        return abs(sum(values)) > 1.0

    # ==================== 최악 근 배치 추측 ====================

    def conjecture_probe(self, n: int, rho: float, samples: int, seed: int) -> ConjectureProbeReport:
        """
        반경 rho 원판 안의 근 배치를 표본 추출해 최악 피크를 같은 근 alpha_n 과 비교

        표본 예산은 고정 청크로 나뉘고 청크마다 하위 시드를 쓰므로 작업자 수와 관계없이 결정적입니다.
        같은 근 배치 자체가 기준값이므로 samples=0 이면 관측 최대값 = 기준값입니다.
        """
        if not 1 <= n <= MAX_PROBE_ORDER:
            raise InvalidInputError(f'n={n} 은 1 이상 {MAX_PROBE_ORDER} 이하여야 합니다.')
        if not 0.0 < rho < 1.0:
            raise InvalidInputError(f'rho={rho} 는 (0, 1) 안에 있어야 합니다.')
        if samples < 0:
            raise InvalidInputError(f'samples={samples} 는 0 이상이어야 합니다.')

        reference = self.equal_roots.alpha_n(EqualRootSpec(order=n, rho=rho))
        chunks = run_chunked(_probe_chunk, samples, seed, payload=(n, rho, self.config),
                             config=self.config, desc="conjecture")
        best_value, best_roots, best_init = reference, None, None
        for value, roots, init in chunks:
            if value > best_value:
                best_value, best_roots, best_init = value, roots, init

        report = self._probe_report(n, rho, samples, seed, reference, best_value, best_roots, best_init)
        logger.info(f"추측 탐색 완료: n={n}, rho={rho}, 표본 {samples}개, 최대 {best_value:.6g} (기준 {reference:.6g})")
        return report

    def conjecture_grid(self, rho: float, step: float) -> ConjectureProbeReport:
        """
        n=2 의 모든 실근 쌍 (lambda_1 <= lambda_2) 을 격자 위에서 전수 탐색

        Example:
            >>> service.conjecture_grid(0.5, 0.01).max_observed_peak
            1.25
        """
        if not 0.0 < rho < 1.0:
            raise InvalidInputError(f'rho={rho} 는 (0, 1) 안에 있어야 합니다.')
        if not 0.0 < step <= rho:
            raise InvalidInputError(f'step={step} 는 (0, rho] 안에 있어야 합니다.')

        reference = self.equal_roots.alpha_n(EqualRootSpec(order=2, rho=rho))
        grid = np.linspace(-rho, rho, int(round(2 * rho / step)) + 1)
        best_value, best_roots, best_init = -1.0, None, None
        tested = 0
        for i, first in enumerate(grid):
            for second in grid[i:]:
                roots = (complex(first), complex(second))
                eq = self.recurrence.coefficients_from_roots(roots)
                result = self.recurrence.worst_case_peak(eq, radius=max(abs(first), abs(second)))
                tested += 1
                if result.report.peak_value > best_value:
                    best_value, best_roots, best_init = result.report.peak_value, roots, result.init.values
        logger.info(f"격자 탐색 완료: rho={rho}, step={step}, 쌍 {tested}개, 최대 {best_value:.6g} at {best_roots}")
        return self._probe_report(2, rho, tested, 0, reference, best_value, best_roots, best_init)

    def _probe_report(self, n, rho, samples, seed, reference, value, roots, init) -> ConjectureProbeReport:
        counterexample = None
        if value > reference * (1.0 + 1e-9):
            counterexample = ConjectureCounterexample(
                roots=tuple((float(r.real), float(r.imag)) for r in roots),
                init=tuple(init),
                value=value
            )
            logger.warning(f"추측 반례 후보 발견: n={n}, rho={rho}, value={value!r} > {reference!r}")
        return ConjectureProbeReport(
            n=n,
            rho=rho,
            samples_tested=samples,
            seed=seed,
            max_observed_peak=max(value, 0.0),
            reference_peak=reference,
            counterexample=counterexample
        )


# 전역 서비스 인스턴스
root_bounds_service = RootBoundsService()
