"""
점화식 핵심 서비스 모듈

스칼라 선형 차분방정식의 정확한 시뮬레이션, Schur 안정성 판정,
그리고 단위 박스 초기조건에 대한 정확한 최악 피크 계산을 담당합니다.
"""

import logging
import math
from typing import List, Optional, Sequence

import numpy as np

from app.core.config import Settings, settings
from app.core.exceptions import (
    DimensionMismatchError,
    InvalidInputError,
    NumericalOverflowError,
    UnstableEquationError,
)
from app.models.schemas import (
    DifferenceEquation,
    InitialCondition,
    PeakReport,
    ResidualReport,
    Trajectory,
    WorstCaseResult,
)
from app.services.root_finder import PolynomialRootFinder, RootCluster

# 로거 설정
logger = logging.getLogger(__name__)

RESIDUAL_TOLERANCE = 1e-12


class RecurrenceService:
    """
    점화식 핵심 서비스 클래스

    모든 메서드는 입력만의 순수 함수이며, 설정값(구간 정책, 허용오차)은 생성 시 주입됩니다.
    """

    def __init__(self, config: Settings = settings, finder: Optional[PolynomialRootFinder] = None):
        self.config = config
        self.finder = finder or PolynomialRootFinder(config)

    # ==================== 시뮬레이션 ====================

    def run(self, coefficients: Sequence[float], initial: np.ndarray, horizon: int,
            forcing: Optional[np.ndarray] = None) -> np.ndarray:
        """
        점화식을 여러 초기조건 열에 대해 동시에 전개

        x_k = -sum_i a_i x_{k-i} (+ v_k) 를 k = n, ..., horizon 에 대해 계산합니다.

        Args:
            coefficients: (a_1, ..., a_n)
            initial (np.ndarray): (n,) 또는 (n, m) 초기값
            horizon (int): 마지막 인덱스
            forcing (np.ndarray, optional): 길이 horizon+1 의 외력 (인덱스 k 에 v_k)

        Returns:
            np.ndarray: (horizon+1,) 또는 (horizon+1, m) 궤적

        Raises:
            NumericalOverflowError: 유한하지 않은 값이 처음 나온 인덱스와 함께 보고
        """
        a = np.asarray(coefficients, dtype=float)
        n = a.size
        x0 = np.asarray(initial, dtype=float)
        squeeze = x0.ndim == 1
        if squeeze:
            x0 = x0[:, None]
        if x0.shape[0] != n:
            raise DimensionMismatchError(f'초기조건 길이 {x0.shape[0]} 이 방정식 차수 {n} 과 다릅니다.')
        if horizon < n - 1:
            raise InvalidInputError(f'horizon({horizon}) 은 n-1({n - 1}) 이상이어야 합니다.')

        out = np.empty((horizon + 1, x0.shape[1]))
        out[:n] = x0
        weights = -a[::-1]
        with np.errstate(over='ignore', invalid='ignore'):
            for k in range(n, horizon + 1):
                value = weights @ out[k - n:k]
                if forcing is not None:
                    value = value + forcing[k]
                if not np.all(np.isfinite(value)):
                    bad = value[~np.isfinite(value)][0]
                    logger.error(f"시뮬레이션 오버플로: k={k}")
                    raise NumericalOverflowError(index=k, value=float(bad))
                out[k] = value
        return out[:, 0] if squeeze else out

    def simulate(self, eq: DifferenceEquation, init: InitialCondition, horizon: int) -> Trajectory:
        """
        초기조건으로부터 x_0, ..., x_horizon 계산

        Example:
            >>> eq = DifferenceEquation(coefficients=(-0.5,))
            >>> service.simulate(eq, InitialCondition(values=(1.0,)), 3).samples
            (1.0, 0.5, 0.25, 0.125)
        """
        if init.length != eq.order:
            raise DimensionMismatchError(f'초기조건 길이 {init.length} 이 방정식 차수 {eq.order} 와 다릅니다.')
        samples = self.run(eq.coefficients, np.array(init.values), horizon)
        return Trajectory(start_index=0, samples=tuple(float(x) for x in samples))

    def basis_trajectories(self, eq: DifferenceEquation, horizon: int) -> np.ndarray:
        """
        표준 기저 초기조건 e_i 에 대한 궤적 행렬 s_{k,i} (shape (horizon+1, n))

        선형성에 의해 x_k = sum_i s_{k,i} x_i^(0) 입니다.
        마지막 열(e_{n-1})은 임펄스 초기조건의 궤적입니다.
        """
        return self.run(eq.coefficients, np.eye(eq.order), horizon)

    def recurrence_residual(self, eq: DifferenceEquation, trajectory: Trajectory) -> ResidualReport:
        """궤적이 점화식을 만족하는지 재검증"""
        x = np.asarray(trajectory.samples, dtype=float)
        n = eq.order
        if x.size < n:
            raise DimensionMismatchError(f'궤적 길이 {x.size} 이 방정식 차수 {n} 보다 짧습니다.')
        weights = np.asarray(eq.coefficients, dtype=float)[::-1]
        worst, worst_k = 0.0, None
        for k in range(n, x.size):
            residual = abs(x[k] + weights @ x[k - n:k]) / (1.0 + abs(x[k]))
            if residual > worst or worst_k is None:
                worst, worst_k = float(residual), k
        return ResidualReport(
            max_residual=worst,
            worst_index=worst_k,
            ok=worst <= RESIDUAL_TOLERANCE
        )

    # ==================== 근 / 계수 변환 ====================

    def coefficients_from_roots(self, roots: Sequence[complex]) -> DifferenceEquation:
        """
        근으로부터 실계수 방정식 구성 (p(lambda) = prod (lambda - lambda_i))

        Raises:
            InvalidInputError: 켤레쌍이 없는 복소근이 있는 경우
        """
        values = [complex(r) for r in roots]
        if not values:
            raise InvalidInputError('근 목록이 비어 있습니다.')
        tol = self.config.imag_tolerance

        unmatched = []
        pending = [r for r in values if abs(r.imag) > tol * max(1.0, abs(r))]
        while pending:
            r = pending.pop()
            match = next(
                (j for j, s in enumerate(pending) if abs(s - r.conjugate()) <= tol * max(1.0, abs(r))),
                None
            )
            if match is None:
                unmatched.append(r)
            else:
                pending.pop(match)
        if unmatched:
            raise InvalidInputError(f'켤레쌍이 없는 복소근이 있습니다: {unmatched}')

        poly = np.poly(np.array(values, dtype=complex))
        residue = float(np.max(np.abs(np.imag(poly))))
        if residue > tol * max(1.0, float(np.max(np.abs(np.real(poly))))):
            raise InvalidInputError(f'계수의 허수부 잔차가 너무 큽니다: {residue!r}')
        return DifferenceEquation(coefficients=tuple(float(c) for c in np.real(poly)[1:]))

    def find_roots(self, eq: DifferenceEquation) -> List[RootCluster]:
        """특성다항식의 근과 중복도"""
        return self.finder.find_roots(eq.characteristic_polynomial())

    def spectral_radius(self, eq: DifferenceEquation) -> float:
        """특성근 절대값의 최대값"""
        return self.finder.max_modulus(eq.characteristic_polynomial())

    def is_schur_stable(self, eq: DifferenceEquation, margin: Optional[float] = None) -> bool:
        """spectral_radius < 1 - margin 여부 (margin 기본값은 설정값)"""
        margin = self.config.stability_margin if margin is None else margin
        return self.spectral_radius(eq) < 1.0 - margin

    def require_stable(self, eq: DifferenceEquation) -> float:
        """안정하지 않으면 UnstableEquationError, 안정하면 spectral radius 반환"""
        radius = self.spectral_radius(eq)
        if not radius < 1.0 - self.config.stability_margin:
            raise UnstableEquationError(radius, self.config.stability_margin)
        return radius

    # ==================== 피크 ====================

    def initial_horizon(self, order: int, radius: float) -> int:
        """H0 = ceil(scale * n / (1 - rho)), 상한으로 잘림"""
        h0 = math.ceil(self.config.horizon_scale * order / (1.0 - radius))
        return int(min(max(h0, 2 * order), self.config.horizon_cap))

    def peak(self, eq: DifferenceEquation, init: InitialCondition,
             horizon: Optional[int] = None, radius: Optional[float] = None) -> PeakReport:
        """
        주어진 초기조건의 피크 eta(x^(0)) = max_{k >= n} |x_k|

        horizon 을 주지 않으면 H0 에서 시작해 후행 윈도우가 충분히 작아질 때까지 두 배씩 늘립니다.

        Raises:
            UnstableEquationError: 안정하지 않은 방정식
        """
        if init.length != eq.order:
            raise DimensionMismatchError(f'초기조건 길이 {init.length} 이 방정식 차수 {eq.order} 와 다릅니다.')
        values = np.array(init.values)
        return self._adaptive(
            eq, horizon,
            lambda h: np.abs(self.run(eq.coefficients, values, h)),
            radius
        )[0]

    def worst_case_peak(self, eq: DifferenceEquation, horizon: Optional[int] = None,
                        radius: Optional[float] = None) -> WorstCaseResult:
        """
        단위 박스 ||x^(0)||_inf <= 1 위의 정확한 최악 피크

        근을 이미 아는 호출자는 radius 를 넘겨 근 찾기를 건너뛸 수 있습니다.

        x_k 가 초기조건의 선형함수이므로 max over box |x_k| = sum_i |s_{k,i}| 이고,
        부호 벡터 sign(s_{K,i}) 에서 달성됩니다. 꼭짓점 열거가 필요 없습니다.
        """
        basis = {}

        def envelope(h):
            s = self.basis_trajectories(eq, h)
            basis['s'] = s
            return np.abs(s).sum(axis=1)

        report, _ = self._adaptive(eq, horizon, envelope, radius)
        row = basis['s'][report.peak_instant]
        signs = np.where(row >= 0, 1.0, -1.0)
        init = InitialCondition(values=tuple(float(s) for s in signs))
        logger.debug(f"최악 피크 계산 완료: n={eq.order}, eta={report.peak_value:.6g}, K={report.peak_instants}")
        return WorstCaseResult(init=init, report=report)

    def summarize(self, magnitudes: np.ndarray, order: int, certified: bool) -> PeakReport:
        """|x_k| 배열에서 k >= n 구간의 최대값과 동률 argmax 집합 계산"""
        horizon = magnitudes.size - 1
        window = magnitudes[order:]
        if window.size == 0:
            raise InvalidInputError(f'horizon({horizon}) 이 차수 {order} 보다 작아 피크를 정의할 수 없습니다.')
        peak = float(window.max())
        if peak == 0.0:
            instants = (order,)
        else:
            hits = np.nonzero(window >= peak * (1.0 - self.config.tie_tolerance))[0]
            instants = tuple(int(i) + order for i in hits)
        return PeakReport(
            peak_value=peak,
            peak_instants=instants,
            horizon_used=int(horizon),
            certified=bool(certified),
            overall_max=float(magnitudes.max())
        )

    def _adaptive(self, eq: DifferenceEquation, horizon: Optional[int], magnitudes_for,
                  radius: Optional[float] = None):
        if radius is None:
            radius = self.require_stable(eq)
        elif not radius < 1.0 - self.config.stability_margin:
            raise UnstableEquationError(radius, self.config.stability_margin)
        n = eq.order
        fixed = horizon is not None
        h = horizon if fixed else self.initial_horizon(n, radius)
        if h < n:
            raise InvalidInputError(f'horizon({h}) 은 차수 {n} 이상이어야 합니다.')

        while True:
            mags = magnitudes_for(h)
            peak = float(mags[n:].max())
            tail = float(mags[max(n, h - n + 1):].max())
            certified = tail == 0.0 or tail < self.config.decay_tolerance * peak
            if certified or fixed or h >= self.config.horizon_cap:
                break
            logger.debug(f"구간 확장: {h} -> {min(2 * h, self.config.horizon_cap)} (tail/peak={tail / peak:.3g})")
            h = min(2 * h, self.config.horizon_cap)

        if not certified:
            logger.warning(f"피크가 인증되지 않았습니다: horizon={h}, tail={tail:.3g}, peak={peak:.3g}")
        return self.summarize(mags, n, certified), h


# 전역 서비스 인스턴스
recurrence_service = RecurrenceService()
