"""
유계 잡음 자기회귀 서비스 모듈

x_k + a_1 x_{k-1} + ... + a_n x_{k-n} = v_k, |v_k| <= epsilon 에서
초기조건과 잡음에 대한 박스 제약 max x_t 를 민감도 분해로 정확히 계산합니다.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np

from app.core.config import Settings, settings
from app.core.exceptions import DimensionMismatchError, InvalidInputError
from app.models.schemas import (
    BoundSweepRow,
    BoxLPResult,
    DifferenceEquation,
    EqualRootSpec,
    InitialCondition,
    NoiseBand,
    NoiseSequence,
    Trajectory,
)
from app.services.equal_roots_service import EqualRootsService, scaled_binomial
from app.services.recurrence_service import RecurrenceService

# 로거 설정
logger = logging.getLogger(__name__)


def _signs(values: np.ndarray) -> np.ndarray:
    """0 은 +1 로 취급하는 부호"""
    return np.where(values >= 0, 1.0, -1.0)


class NoiseService:
    """
    유계 잡음 자기회귀 서비스 클래스

    x_t = sum_i s_{t,i} x_i^(0) + sum_k h_{t,k} v_k 이고 h_{t,k} = g_{t-k} 는
    임펄스 초기조건 궤적을 n-1 만큼 당긴 값입니다. 박스 위 최대값은 두 계수 절대값 합의 가중합입니다.
    """

    def __init__(self, config: Settings = settings,
                 recurrence: Optional[RecurrenceService] = None,
                 equal_roots: Optional[EqualRootsService] = None):
        self.config = config
        self.recurrence = recurrence or RecurrenceService(config)
        self.equal_roots = equal_roots or EqualRootsService(config, self.recurrence.finder)

    # ==================== 시뮬레이션 ====================

    def simulate_noisy(self, eq: DifferenceEquation, init: InitialCondition,
                       noise: NoiseSequence, horizon: int) -> Trajectory:
        """
        x_k = -sum_i a_i x_{k-i} + v_k (k = n, ..., horizon)

        noise.values[0] 이 v_n 입니다.

        Raises:
            DimensionMismatchError: 초기조건 길이가 차수와 다르거나 잡음이 [n, horizon] 을 덮지 못하는 경우
        """
        n = eq.order
        if init.length != n:
            raise DimensionMismatchError(f'초기조건 길이 {init.length} 이 방정식 차수 {n} 와 다릅니다.')
        needed = horizon - n + 1
        if len(noise.values) < needed:
            raise DimensionMismatchError(f'잡음 길이 {len(noise.values)} 가 필요한 {needed} 보다 짧습니다.')

        forcing = np.zeros(horizon + 1)
        if needed > 0:
            forcing[n:] = noise.values[:needed]
        samples = self.recurrence.run(eq.coefficients, np.array(init.values), horizon, forcing)
        return Trajectory(start_index=0, samples=tuple(float(x) for x in samples))

    def constant_noise_trajectories(self, eq: DifferenceEquation, init: InitialCondition,
                                    epsilons: Sequence[float], horizon: int) -> np.ndarray:
        """v_k = epsilon 상수 잡음의 궤적 (열마다 epsilon 하나, shape (horizon+1, len(epsilons)))"""
        n = eq.order
        if init.length != n:
            raise DimensionMismatchError(f'초기조건 길이 {init.length} 이 방정식 차수 {n} 와 다릅니다.')
        eps = np.asarray(epsilons, dtype=float)
        initial = np.repeat(np.asarray(init.values, dtype=float)[:, None], eps.size, axis=1)
        forcing = np.zeros((horizon + 1, eps.size))
        forcing[n:] = eps
        return self.recurrence.run(eq.coefficients, initial, horizon, forcing)

    # ==================== 민감도 ====================

    def noise_sensitivities(self, eq: DifferenceEquation, t: int) -> np.ndarray:
        """h_{t,k} (k = n, ..., t): v_k 단위 잡음이 x_t 에 주는 영향"""
        n = eq.order
        if t < n:
            raise InvalidInputError(f't={t} 는 차수 {n} 이상이어야 합니다.')
        impulse = self.recurrence.basis_trajectories(eq, t)[n - 1:, n - 1]
        return impulse[:t - n + 1][::-1].copy()

    def box_lp_max(self, eq: DifferenceEquation, band: NoiseBand, t: int) -> BoxLPResult:
        """
        max x_t subject to ||x^(0)||_inf <= 1, |v_k| <= epsilon

        최적값은 sum_i |s_{t,i}| + epsilon sum_k |h_{t,k}| 이며 부호 꼭짓점에서 달성됩니다.

        Raises:
            UnstableEquationError: 안정하지 않은 방정식
        """
        self.recurrence.require_stable(eq)
        n = eq.order
        if t < n:
            raise InvalidInputError(f't={t} 는 차수 {n} 이상이어야 합니다.')

        basis = self.recurrence.basis_trajectories(eq, t)
        state = basis[t]
        sensitivity = basis[n - 1:, n - 1][:t - n + 1][::-1]
        value = float(np.abs(state).sum() + band.epsilon * np.abs(sensitivity).sum())
        noise = band.epsilon * _signs(sensitivity) + 0.0
        return BoxLPResult(
            t=t,
            value=value,
            argmax_init=InitialCondition(values=tuple(float(s) for s in _signs(state))),
            argmax_noise=NoiseSequence(values=tuple(float(v) for v in noise))
        )

    # ==================== 같은 근 닫힌 식 ====================

    def convolution_sum(self, n: int, rho: float, t: int) -> float:
        """sum_{k=n}^{t} C_{t-k+n-1}^{n-1} rho^{t-k}"""
        return float(sum(scaled_binomial(j + n - 1, n - 1, j, rho) for j in range(t - n + 1)))

    def noise_convolution_bound(self, n: int, rho: float, band: NoiseBand, t: int) -> float:
        """alpha_{t,n} + epsilon sum_{k=n}^{t} C_{t-k+n-1}^{n-1} rho^{t-k} (같은 근 방정식의 정확한 최대값)"""
        if t < n:
            raise InvalidInputError(f't={t} 는 n={n} 이상이어야 합니다.')
        spec = EqualRootSpec(order=n, rho=rho)
        return self.equal_roots.alpha(t, spec) + band.epsilon * self.convolution_sum(n, rho, t)

    def tail_series(self, n: int, rho: float, terms: int) -> float:
        """
        부분합 sum_{i=n-1}^{n-2+terms} C_i^{n-1} rho^{i-n+1}

        극한은 S_n = (1-rho)^{-n} 이며 S_n - rho S_n = S_{n-1}, S_0 = 1 입니다.
        """
        if n == 0:
            return 1.0
        if n < 0 or terms < 0:
            raise InvalidInputError(f'n={n}, terms={terms} 는 0 이상이어야 합니다.')
        return float(sum(scaled_binomial(j + n - 1, n - 1, j, rho) for j in range(terms)))

    def geometric_tail_bound(self, n: int, rho: float, band: NoiseBand) -> float:
        """alpha_n + epsilon (1-rho)^{-n} (모든 t 에서 box_lp_max 의 엄격한 상한)"""
        if not 0.0 < rho < 1.0:
            raise InvalidInputError(f'rho={rho} 는 (0, 1) 안에 있어야 합니다.')
        spec = EqualRootSpec(order=n, rho=rho)
        return self.equal_roots.alpha_n(spec) + band.epsilon * (1.0 - rho) ** (-n)

    def steady_state(self, n: int, rho: float, band: NoiseBand) -> float:
        """상수 잡음 v_k = epsilon 의 극한 x* = epsilon / (1-rho)^n (초기조건과 무관)"""
        if not 0.0 < rho < 1.0:
            raise InvalidInputError(f'rho={rho} 는 (0, 1) 안에 있어야 합니다.')
        return band.epsilon / (1.0 - rho) ** n

    def bound_sweep(self, n: int, rho: float, band: NoiseBand, t_max: int,
                    t_min: Optional[int] = None) -> List[BoundSweepRow]:
        """
        t = t_min..t_max 에 대해 box_lp_max, 닫힌 식, 꼬리 상한을 함께 계산

        기저 궤적을 t_max 까지 한 번만 계산하고 누적합으로 모든 t 의 최적값을 얻습니다.
        """
        spec = EqualRootSpec(order=n, rho=rho)
        t_min = n if t_min is None else t_min
        if t_min < n or t_max < t_min:
            raise InvalidInputError(f'잘못된 t 범위입니다: [{t_min}, {t_max}] (n={n})')

        eq = self.equal_roots.equation(spec)
        self.recurrence.require_stable(eq)
        basis = self.recurrence.basis_trajectories(eq, t_max)
        state_sums = np.abs(basis).sum(axis=1)
        impulse_sums = np.cumsum(np.abs(basis[n - 1:, n - 1]))
        tail = self.geometric_tail_bound(n, rho, band)

        rows = [
            BoundSweepRow(
                t=t,
                box_lp_max=float(state_sums[t] + band.epsilon * impulse_sums[t - n]),
                convolution_bound=self.noise_convolution_bound(n, rho, band, t),
                tail_bound=tail
            )
            for t in range(t_min, t_max + 1)
        ]
        logger.info(f"잡음 상한 스윕 완료: n={n}, rho={rho}, eps={band.epsilon}, t={t_min}..{t_max}")
        return rows


# 전역 서비스 인스턴스
noise_service = NoiseService()
