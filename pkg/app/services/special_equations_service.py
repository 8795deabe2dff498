"""
특수 방정식 서비스 모듈

복소 중근을 갖는 4차 Markov 예제와, 삼항 방정식 x_{k+1} - a x_k + b x_{k-n} = 0 의
안정/피크 영역(D-분할 경계, Cohn 마름모, Monte Carlo 면적), 이중근 계열과 램프 해를 다룹니다.
"""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from app.core.config import Settings, settings
from app.core.exceptions import InvalidInputError, NumericalError, UnstableEquationError
from app.models.schemas import (
    BoundaryPoint,
    DifferenceEquation,
    DoubleRootFamily,
    InitialCondition,
    MarkovEstimates,
    MarkovSummary,
    PeakReport,
    RampSolution,
    RegionAreas,
    RegionSample,
    StabilityBoundary,
    StandardInitBound,
    TrinomialEquation,
)
from app.services.recurrence_service import RecurrenceService
from app.services.sampling import run_chunked

# 로거 설정
logger = logging.getLogger(__name__)

MARKOV_INIT = InitialCondition(values=(0.0, 0.0, -1.0, 0.0))
MARKOV_RHO_STAR = 1.0 / math.sqrt(3.0)

# Monte Carlo 면적 추정 경계 상자 (모든 n 의 안정 영역을 포함)
AREA_BOX_A = (-2.2, 2.2)
AREA_BOX_B = (-1.2, 1.2)

BOUNDARY_TOLERANCE = 1e-6
SINGULAR_TOLERANCE = 1e-6
DOUBLE_ROOT_TOLERANCE = 1e-10


# ==================== 벡터화 Schur-Cohn 판정 ====================

def schur_cohn_stable(polys: np.ndarray) -> np.ndarray:
    """
    다항식 여러 개의 Schur 안정성을 한 번에 판정 (Schur-Cohn 축소)

    각 단계에서 반사계수 k = 상수항 / 최고차항 을 구해 |k| < 1 인지 보고,
    (A - k A*) / z 로 차수를 하나 줄입니다. 모든 반사계수가 |k| < 1 이면 모든 근이 단위원 안에 있습니다.

    Args:
        polys (np.ndarray): shape (m, d+1), 각 행은 최고차항부터의 계수

    Returns:
        np.ndarray: shape (m,) bool
    """
    p = np.atleast_2d(np.asarray(polys, dtype=float)).copy()
    stable = p[:, 0] != 0.0
    p[~stable] = 0.0
    p[~stable, 0] = 1.0
    p = p / p[:, :1]

    while p.shape[1] > 1:
        k = p[:, -1]
        stable &= np.abs(k) < 1.0
        # 이미 불안정한 행은 계산이 발산하지 않도록 k = 0 으로 둠
        k = np.where(stable, k, 0.0)
        reduced = p[:, :-1] - k[:, None] * p[:, :0:-1]
        p = reduced / reduced[:, :1]
    return stable


def trinomial_polys(n: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """lambda^{n+1} - a lambda^n + b 의 계수 행렬"""
    a = np.asarray(a, dtype=float)
    polys = np.zeros((a.size, n + 2))
    polys[:, 0] = 1.0
    polys[:, 1] = -a
    polys[:, -1] = np.asarray(b, dtype=float)
    return polys


def _area_chunk(job) -> Tuple[int, int, int, int]:
    """한 청크의 (표본 수, S, C, P 개수)"""
    size, seed_seq, n = job
    rng = np.random.default_rng(seed_seq)
    a = rng.uniform(*AREA_BOX_A, size)
    b = rng.uniform(*AREA_BOX_B, size)
    in_s = schur_cohn_stable(trinomial_polys(n, a, b))
    outside_cohn = np.abs(a) + np.abs(b) > 1.0
    return size, int(in_s.sum()), int((~outside_cohn).sum()), int((in_s & outside_cohn).sum())


class SpecialEquationsService:
    """
    특수 방정식 서비스 클래스

    Example:
        >>> service.markov_closed_form(0.99, 100)
        36.97...
    """

    def __init__(self, config: Settings = settings, recurrence: Optional[RecurrenceService] = None):
        self.config = config
        self.recurrence = recurrence or RecurrenceService(config)

    # ==================== Markov 예제 ====================

    def markov_equation(self, rho: float) -> DifferenceEquation:
        """
        (2 rho, 3 rho^2, 2 rho^3, rho^4) - 근은 rho e^{+-j 2pi/3} 의 이중근

        rho = 1 은 역사적 사례로 만들 수는 있지만 불안정합니다.
        """
        if not 0.0 < rho <= 1.0:
            raise InvalidInputError(f'rho={rho} 는 (0, 1] 안에 있어야 합니다.')
        if rho == 1.0:
            logger.warning("rho=1 Markov 방정식은 안정하지 않습니다 (피크 계산 불가).")
        return DifferenceEquation(coefficients=(2 * rho, 3 * rho ** 2, 2 * rho ** 3, rho ** 4))

    def markov_closed_form(self, rho: float, k: int) -> float:
        """x_0 = x_1 = x_3 = 0, x_2 = -1 의 해 (k = 3m 에서 정확히 0)"""
        if k < 0:
            raise InvalidInputError(f'k={k} 는 0 이상이어야 합니다.')
        residue = k % 3
        if residue == 0:
            return 0.0
        magnitude = (k - 1) * rho ** (k - 2)
        return magnitude if residue == 1 else -magnitude

    def markov_peak_estimates(self, rho: float) -> MarkovEstimates:
        """K ~ 1/(1-rho), eta ~ 1/(e rho (1-rho)), rho* = 1/sqrt(3)"""
        if not 0.0 < rho < 1.0:
            raise InvalidInputError(f'rho={rho} 는 (0, 1) 안에 있어야 합니다.')
        return MarkovEstimates(
            K_est=1.0 / (1.0 - rho),
            eta_est=1.0 / (math.e * rho * (1.0 - rho)),
            rho_star=MARKOV_RHO_STAR
        )

    def markov_peak(self, rho: float) -> PeakReport:
        """Markov 초기조건 궤적의 피크 (spectral radius 는 rho)"""
        if not rho < 1.0:
            raise UnstableEquationError(rho)
        return self.recurrence.peak(self.markov_equation(rho), MARKOV_INIT, radius=rho)

    def markov_summary(self, rho: float) -> MarkovSummary:
        report = self.markov_peak(rho)
        estimates = self.markov_peak_estimates(rho)
        return MarkovSummary(
            rho=rho,
            peak_instant=report.peak_instant,
            peak_instants=report.peak_instants,
            peak=report.peak_value,
            has_peak=report.has_peak,
            certified=report.certified,
            K_est=estimates.K_est,
            eta_est=estimates.eta_est,
            rho_star=estimates.rho_star
        )

    def markov_peak_threshold(self, lo: float = 0.05, hi: float = 0.95, tol: float = 1e-12) -> float:
        """시뮬레이션 피크가 1 을 넘는 최소 rho 를 이분법으로 탐색"""
        if self.markov_peak(lo).has_peak or not self.markov_peak(hi).has_peak:
            raise InvalidInputError(f'[{lo}, {hi}] 구간이 피크 임계값을 감싸지 않습니다.')
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if self.markov_peak(mid).has_peak:
                hi = mid
            else:
                lo = mid
        return hi

    # ==================== 삼항 방정식 ====================

    def trinomial_to_equation(self, tri: TrinomialEquation) -> DifferenceEquation:
        """(-a, 0, ..., 0, b) (차수 n+1)"""
        n = tri.delay_order
        return DifferenceEquation(coefficients=(-tri.a,) + (0.0,) * (n - 1) + (tri.b,))

    def trinomial_radius(self, n: int, a: float, b: float) -> float:
        return self.recurrence.spectral_radius(self.trinomial_to_equation(TrinomialEquation(delay_order=n, a=a, b=b)))

    def classify_point(self, n: int, a: float, b: float) -> RegionSample:
        """
        (a, b) 의 안정 영역(S), Cohn 마름모(C), 피크 영역(P) 소속

        안정성은 근 찾기 spectral radius 로 판정하고, 피크 영역은 안정이면서 |a| + |b| > 1 인 점입니다.
        """
        if not (math.isfinite(a) and math.isfinite(b)):
            raise InvalidInputError(f'(a, b)=({a}, {b}) 는 유한해야 합니다.')
        stable = self.trinomial_radius(n, a, b) < 1.0
        coefficient_sum = abs(a) + abs(b)
        return RegionSample(
            a=a,
            b=b,
            in_stability=stable,
            in_cohn=coefficient_sum <= 1.0,
            in_peak_domain=stable and coefficient_sum > 1.0
        )

    def stability_boundary(self, n: int, resolution: int) -> StabilityBoundary:
        """
        D-분할로 얻은 안정 영역 경계

        단위원 위의 근 e^{j omega} 는 a = sin((n+1) omega) / sin(n omega), b = sin(omega) / sin(n omega) 를 주고,
        실근 lambda = 1, -1 은 직선 b = a - 1, b = (-1)^n (1 + a) 를 줍니다.
        모든 후보는 spectral radius 가 1 +- 1e-6 인지 확인한 뒤에만 내보냅니다.
        """
        if n < 1 or resolution < 2:
            raise InvalidInputError(f'n={n} >= 1, resolution={resolution} >= 2 이어야 합니다.')

        candidates: List[Tuple[float, float, float]] = []
        skipped = 0
        for i in range(resolution):
            omega = math.pi * (i + 0.5) / resolution
            denominator = math.sin(n * omega)
            if abs(denominator) < SINGULAR_TOLERANCE:
                skipped += 1
                continue
            candidates.append((omega, math.sin((n + 1) * omega) / denominator, math.sin(omega) / denominator))

        sign = (-1.0) ** n
        for a in np.linspace(AREA_BOX_A[0], AREA_BOX_A[1], resolution):
            candidates.append((0.0, float(a), float(a) - 1.0))
            candidates.append((math.pi, float(a), sign * (1.0 + float(a))))

        points = []
        dropped = 0
        for omega, a, b in candidates:
            radius = self.trinomial_radius(n, a, b)
            if abs(radius - 1.0) <= BOUNDARY_TOLERANCE:
                points.append(BoundaryPoint(omega=omega, a=a, b=b))
            else:
                dropped += 1

        if skipped:
            logger.warning(f"sin(n omega) ~ 0 근처 샘플 {skipped}개를 건너뛰었습니다 (n={n}, resolution={resolution})")
        logger.info(f"경계 계산 완료: n={n}, 점 {len(points)}개, 버림 {dropped}개")
        return StabilityBoundary(n=n, points=tuple(points), skipped_singular=skipped, dropped_off_boundary=dropped)

    def region_areas(self, n: int, samples: int, seed: int) -> RegionAreas:
        """
        경계 상자 a in [-2.2, 2.2], b in [-1.2, 1.2] 위의 Monte Carlo 면적 추정

        표준오차는 이항분포 근사이며, 비율 A(P)/A(S) 의 오차는 S 안의 조건부 비율로 계산합니다.
        """
        if n < 1:
            raise InvalidInputError(f'n={n} 은 1 이상이어야 합니다.')
        if samples < 10_000:
            raise InvalidInputError(f'samples={samples} 는 10000 이상이어야 합니다.')

        counts = np.array(run_chunked(_area_chunk, samples, seed, payload=n, config=self.config,
                                      desc="region areas")).sum(axis=0)
        total, in_s, in_c, in_p = (int(c) for c in counts)
        box = (AREA_BOX_A[1] - AREA_BOX_A[0]) * (AREA_BOX_B[1] - AREA_BOX_B[0])

        def area(count):
            share = count / total
            return box * share, box * math.sqrt(share * (1.0 - share) / total)

        area_s, stderr_s = area(in_s)
        area_c, _ = area(in_c)
        area_p, stderr_p = area(in_p)
        ratio = in_p / in_s if in_s else 0.0
        stderr_ratio = math.sqrt(ratio * (1.0 - ratio) / in_s) if in_s else 0.0
        logger.info(f"면적 추정 완료: n={n}, A(S)={area_s:.4f}, A(P)={area_p:.4f}, ratio={ratio:.4f}")
        return RegionAreas(
            n=n, samples=total, seed=seed,
            area_S=area_s, area_C=area_c, area_P=area_p, ratio=ratio,
            stderr_S=stderr_s, stderr_P=stderr_p, stderr_ratio=stderr_ratio
        )

    def region_grid(self, n: int, resolution: int) -> List[RegionSample]:
        """경계 상자 위 resolution x resolution 격자의 영역 판정 (플롯용 데이터)"""
        if resolution < 2:
            raise InvalidInputError(f'resolution={resolution} 은 2 이상이어야 합니다.')
        a, b = np.meshgrid(np.linspace(*AREA_BOX_A, resolution), np.linspace(*AREA_BOX_B, resolution))
        a, b = a.ravel(), b.ravel()
        stable = schur_cohn_stable(trinomial_polys(n, a, b))
        coefficient_sum = np.abs(a) + np.abs(b)
        return [
            RegionSample(
                a=float(ai), b=float(bi),
                in_stability=bool(si),
                in_cohn=bool(ci <= 1.0),
                in_peak_domain=bool(si and ci > 1.0)
            )
            for ai, bi, si, ci in zip(a, b, stable, coefficient_sum)
        ]

    # ==================== 이중근 계열 / 램프 해 ====================

    def double_root_family(self, n: int, a: float) -> DoubleRootFamily:
        """
        b_2 = a^{n+1} n^n / (n+1)^{n+1}, rho = a n / (n+1)

        1 < a < 1 + 1/n 밖이면 경고만 남깁니다. n 이 짝수이면 절대값이 가장 작은 음의 실근도 돌려줍니다.

        Raises:
            NumericalError: p(rho) = p'(rho) = 0 검사 실패
        """
        if n < 1:
            raise InvalidInputError(f'n={n} 은 1 이상이어야 합니다.')
        in_band = 1.0 < a < 1.0 + 1.0 / n
        if not in_band:
            logger.warning(f"a={a} 가 이중근 계열 구간 (1, 1 + 1/{n}) 밖에 있습니다.")

        b2 = a ** (n + 1) * n ** n / (n + 1) ** (n + 1)
        rho = a * n / (n + 1)
        value = rho ** (n + 1) - a * rho ** n + b2
        slope = (n + 1) * rho ** n - a * n * rho ** (n - 1)
        if abs(value) > DOUBLE_ROOT_TOLERANCE or abs(slope) > DOUBLE_ROOT_TOLERANCE:
            raise NumericalError(f'이중근 검사 실패: p(rho)={value!r}, p\'(rho)={slope!r}')

        negative_root = None
        if n % 2 == 0:
            eq = self.trinomial_to_equation(TrinomialEquation(delay_order=n, a=a, b=b2))
            negatives = [c.value.real for c in self.recurrence.find_roots(eq)
                         if c.value.imag == 0.0 and c.value.real < 0.0]
            if negatives:
                negative_root = max(negatives)
        return DoubleRootFamily(n=n, a=a, b2=b2, rho=rho, in_band=in_band, negative_root=negative_root)

    def ramp_solution(self, n: int, a: float) -> RampSolution:
        """
        램프 초기조건 (0, rho, 2 rho^2, ..., n rho^n) 의 해 x_k = k rho^k

        K = floor(1/(1-rho)) 이고, 1/(1-rho) 가 정수이면 K-1 과 동률입니다.
        피크는 ||x^(0)||_inf = n rho^n 으로 정규화합니다.
        """
        family = self.double_root_family(n, a)
        rho = family.rho
        if not rho < 1.0:
            raise UnstableEquationError(rho)
        x = 1.0 / (1.0 - rho)
        nearest = round(x)
        if abs(x - nearest) <= 1e-9 * x:
            instants = (nearest - 1, nearest)
        else:
            instants = (math.floor(x),)
        K = instants[-1]
        scale = self.ramp_init(n, a).sup_norm
        return RampSolution(
            n=n,
            a=a,
            b=family.b2,
            rho=rho,
            K=instants,
            eta_normalized=K * rho ** K / scale,
            eta_lower_estimate=rho ** x * x / scale,
            eta_asymptotic=1.0 / (n * math.e * (1.0 - rho))
        )

    def ramp_init(self, n: int, a: float) -> InitialCondition:
        return InitialCondition.ramp(n + 1, self.double_root_family(n, a).rho)

    def standard_init_lower_bound(self, n: int, a: float, b: Optional[float] = None) -> float:
        """
        표준 초기조건 (0, ..., 0, 1) 피크의 하한 |a|^n (x_k = a^{k-n}, k = n+1..2n)

        b 를 주지 않으면 이중근 계열의 b_2 를 씁니다.
        """
        if not abs(a) > 1.0:
            raise InvalidInputError(f'|a|={abs(a)} 는 1 보다 커야 합니다.')
        b = self.double_root_family(n, a).b2 if b is None else b
        radius = self.trinomial_radius(n, a, b)
        if not radius < 1.0:
            raise UnstableEquationError(radius)
        return abs(a) ** n

    def standard_init_peak(self, n: int, a: float, b: Optional[float] = None) -> StandardInitBound:
        """표준 초기조건의 시뮬레이션 피크와 하한 a^n, 상한 e 를 함께 보고"""
        b = self.double_root_family(n, a).b2 if b is None else b
        bound = self.standard_init_lower_bound(n, a, b)
        eq = self.trinomial_to_equation(TrinomialEquation(delay_order=n, a=a, b=b))
        report = self.recurrence.peak(eq, InitialCondition.impulse(n + 1))
        return StandardInitBound(n=n, a=a, b=b, lower_bound=bound, cap=math.e, report=report)


# 전역 서비스 인스턴스
special_equations_service = SpecialEquationsService()
