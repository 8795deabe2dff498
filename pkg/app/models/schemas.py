"""
도메인 타입 스키마 정의

이 모듈은 Peak Analyzer의 모든 값 타입(방정식, 초기조건, 궤적, 리포트)을 정의합니다.
Pydantic을 사용하여 불변식 검증과 JSON 직렬화를 한 곳에서 처리합니다.
모든 모델은 생성 후 변경할 수 없으므로(frozen) 스레드/프로세스 간에 그대로 넘길 수 있습니다.
"""

import math
from typing import Optional, Tuple, Literal
from pydantic import BaseModel, Field, validator


def _check_finite(values, name: str):
    """모든 원소가 유한한지 검사"""
    for i, v in enumerate(values):
        if not math.isfinite(v):
            raise ValueError(f'{name}[{i}] 값이 유한하지 않습니다: {v!r}')
    return values


class FrozenModel(BaseModel):
    """불변 모델 공통 기반"""

    class Config:
        """Pydantic 설정"""
        frozen = True


# ==================== 점화식 핵심 스키마 ====================

class DifferenceEquation(FrozenModel):
    """
    n차 스칼라 선형 차분방정식

    x_k + a_1 x_{k-1} + ... + a_n x_{k-n} = 0 의 계수 (a_1, ..., a_n)를 담습니다.
    차수 n은 계수 개수로 정해집니다.
    """
    coefficients: Tuple[float, ...] = Field(
        ...,
        description="계수 (a_1, ..., a_n)",
        min_length=1
    )

    @validator('coefficients')
    def validate_coefficients(cls, v):
        """계수 유한성 검증"""
        return _check_finite(v, 'coefficients')

    @property
    def order(self) -> int:
        """방정식 차수 n"""
        return len(self.coefficients)

    @property
    def coefficient_sum(self) -> float:
        """계수 절대값 합 sum |a_i|"""
        return float(sum(abs(a) for a in self.coefficients))

    def characteristic_polynomial(self) -> Tuple[float, ...]:
        """특성다항식 lambda^n + a_1 lambda^{n-1} + ... + a_n 의 계수 (최고차항부터)"""
        return (1.0,) + tuple(self.coefficients)

    class Config:
        """Pydantic 설정"""
        frozen = True
        json_schema_extra = {
            "example": {
                "coefficients": [-1.5, 0.5625]
            }
        }


class InitialCondition(FrozenModel):
    """
    초기조건 벡터 x^(0) = (x_0, ..., x_{n-1})

    자주 쓰는 초기조건은 클래스 메서드로 만들 수 있습니다.
    """
    values: Tuple[float, ...] = Field(
        ...,
        description="초기값 (x_0, ..., x_{n-1})",
        min_length=1
    )

    @validator('values')
    def validate_values(cls, v):
        """초기값 유한성 검증"""
        return _check_finite(v, 'values')

    @property
    def length(self) -> int:
        return len(self.values)

    @property
    def sup_norm(self) -> float:
        """||x^(0)||_inf"""
        return float(max(abs(x) for x in self.values))

    def negated(self) -> "InitialCondition":
        return InitialCondition(values=tuple(-x for x in self.values))

    # ==================== 프리셋 ====================
    @classmethod
    def impulse(cls, order: int) -> "InitialCondition":
        """(0, ..., 0, 1)"""
        return cls(values=(0.0,) * (order - 1) + (1.0,))

    @classmethod
    def alternating(cls, order: int) -> "InitialCondition":
        """((-1)^{n-1}, ..., -1, 1) - 같은 근 방정식의 최악 초기조건"""
        return cls(values=tuple(float((-1) ** (order - 1 - i)) for i in range(order)))

    @classmethod
    def geometric(cls, order: int, rho: float) -> "InitialCondition":
        """(1, rho, ..., rho^{n-1})"""
        return cls(values=tuple(rho ** i for i in range(order)))

    @classmethod
    def ones(cls, order: int) -> "InitialCondition":
        """(1, ..., 1)"""
        return cls(values=(1.0,) * order)

    @classmethod
    def ramp(cls, order: int, rho: float) -> "InitialCondition":
        """(0, rho, 2 rho^2, ..., (order-1) rho^{order-1})"""
        return cls(values=tuple(i * rho ** i for i in range(order)))

    @classmethod
    def from_preset(cls, name: str, order: int, rho: Optional[float] = None) -> "InitialCondition":
        """
        이름으로 프리셋 초기조건 생성

        Args:
            name (str): impulse / alternating / geometric / ones / ramp
            order (int): 방정식 차수
            rho (float, optional): geometric, ramp 에 필요한 비율

        Returns:
            InitialCondition: 생성된 초기조건
        """
        if name in ('impulse', 'alternating', 'ones'):
            return getattr(cls, name)(order)
        if name in ('geometric', 'ramp'):
            if rho is None:
                raise ValueError(f"'{name}' 프리셋에는 rho 가 필요합니다.")
            return getattr(cls, name)(order, rho)
        raise ValueError(f'지원하지 않는 초기조건 프리셋입니다: {name}')


INIT_PRESETS = ('impulse', 'alternating', 'geometric', 'ones', 'ramp')


class Trajectory(FrozenModel):
    """
    계산된 해 x_0, ..., x_H

    처음 n개 샘플은 초기조건과 같고, 이후 샘플은 점화식을 만족합니다.
    """
    start_index: int = Field(
        default=0,
        description="첫 샘플의 인덱스"
    )
    samples: Tuple[float, ...] = Field(
        ...,
        description="샘플 x_0, ..., x_H",
        min_length=1
    )

    @property
    def horizon(self) -> int:
        """마지막 인덱스 H"""
        return self.start_index + len(self.samples) - 1

    def __getitem__(self, k: int) -> float:
        return self.samples[k - self.start_index]

    def __len__(self) -> int:
        return len(self.samples)


class PeakReport(FrozenModel):
    """
    피크 리포트

    eta = max_{n <= k <= horizon_used} |x_k| 와 그 argmax 집합(동률 포함)을 담습니다.
    """
    peak_value: float = Field(
        ...,
        description="피크 값 eta",
        ge=0.0
    )
    peak_instants: Tuple[int, ...] = Field(
        ...,
        description="피크 시점 K (동률이면 여러 개)",
        min_length=1
    )
    horizon_used: int = Field(
        ...,
        description="실제로 탐색한 마지막 인덱스"
    )
    certified: bool = Field(
        ...,
        description="후행 윈도우 감쇠 기준 충족 여부"
    )
    overall_max: Optional[float] = Field(
        default=None,
        description="초기 구간 k < n 까지 포함한 max |x_k|",
        ge=0.0
    )

    @property
    def peak_instant(self) -> int:
        """대표 피크 시점 (가장 이른 시점)"""
        return min(self.peak_instants)

    @property
    def has_peak(self) -> bool:
        """eta > 1 이면 피크가 있다고 봄 (경계값은 피크 아님)"""
        return self.peak_value > 1.0


class WorstCaseResult(FrozenModel):
    """단위 박스 최악 초기조건과 그 피크 리포트"""
    init: InitialCondition
    report: PeakReport


class ResidualReport(FrozenModel):
    """궤적 재검증 결과"""
    max_residual: float = Field(..., ge=0.0, description="max |x_k + sum a_i x_{k-i}| / (1 + |x_k|)")
    worst_index: Optional[int] = Field(default=None, description="잔차가 가장 큰 인덱스")
    ok: bool


# ==================== 같은 근 스키마 ====================

class EqualRootSpec(FrozenModel):
    """모든 근이 rho 인 n차 방정식"""
    order: int = Field(..., description="차수 n", ge=1)
    rho: float = Field(..., description="공통 근 rho", gt=0.0, lt=1.0)


class PeakCurvePoint(FrozenModel):
    """alpha_{k,n}, beta_{k,n} 곡선의 한 점"""
    k: int
    alpha: float
    beta: float


class AsymptoticEstimates(FrozenModel):
    """rho -> 1 점근 추정값 (n=2, 3 만 alpha/beta 식 제공)"""
    K_alpha_est: float
    alpha_est: Optional[float] = None
    K_beta_est: float
    beta_est: Optional[float] = None
    K_alpha_stationary: Optional[float] = Field(default=None, description="n=2 에서 alpha_{k,2} 의 실수 정상점")
    K_beta_stationary: Optional[float] = Field(default=None, description="n=2 에서 beta_{k,2} 의 실수 정상점")


class EqualRootSummary(FrozenModel):
    """같은 근 방정식의 피크 요약"""
    order: int
    rho: float
    alpha_n: float
    beta_n: float
    K_alpha: Tuple[int, ...]
    K_beta: Tuple[int, ...]
    rho_star_beta: float
    rho_star_alpha: float

    @validator('beta_n')
    def validate_beta_n(cls, v, values):
        """alpha_n >= beta_n 검증"""
        alpha_n = values.get('alpha_n')
        if alpha_n is not None and v > alpha_n * (1 + 1e-12):
            raise ValueError('alpha_n 은 beta_n 이상이어야 합니다.')
        return v


class Table1Row(FrozenModel):
    """rho = 1 - 1/n 에서의 (beta_n, alpha_n, K_beta, K_alpha)"""
    n: int
    beta_n: float
    alpha_n: float
    K_beta: Tuple[int, ...]
    K_alpha: Tuple[int, ...]


# ==================== 실근 상/하한 스키마 ====================

class RealRootSet(FrozenModel):
    """
    실근 집합과 선언된 구간

    모든 근이 declared_band = [lo, hi] 안에 있어야 합니다.
    """
    declared_band: Tuple[float, float] = Field(
        ...,
        description="근이 놓이는 구간 [lo, hi]"
    )
    roots: Tuple[float, ...] = Field(
        ...,
        description="실근 목록",
        min_length=1
    )

    @validator('declared_band')
    def validate_band(cls, v):
        """구간 검증"""
        lo, hi = v
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
            raise ValueError(f'잘못된 구간입니다: {v}')
        return v

    @validator('roots')
    def validate_roots(cls, v, values):
        """근이 선언된 구간 안에 있는지 검증"""
        _check_finite(v, 'roots')
        band = values.get('declared_band')
        if band is not None:
            lo, hi = band
            outside = [r for r in v if r < lo or r > hi]
            if outside:
                raise ValueError(f'선언된 구간 [{lo}, {hi}] 밖의 근이 있습니다: {outside}')
        return v

    @property
    def order(self) -> int:
        return len(self.roots)


class BoundCheckReport(FrozenModel):
    """상한/하한 검사 결과"""
    side: Literal['lower', 'upper']
    rho: float
    horizon: int
    holds: bool
    min_slack: float = Field(..., description="min_k 상대 여유 (음수면 위반)")
    worst_k: int = Field(..., description="여유가 가장 작은 k")
    max_ratio: float = Field(..., description="upper: max |x_k|/beta_k, lower: max beta_k/x_k")
    violation_k: Optional[int] = Field(default=None, description="첫 위반 시점")
    peak_value: float = Field(..., description="구간 안의 max |x_k|")
    beta_peak: float = Field(..., description="beta_n(rho)")


class ConjectureCounterexample(FrozenModel):
    """추측의 반례 후보"""
    roots: Tuple[Tuple[float, float], ...] = Field(..., description="근 (실수부, 허수부)")
    init: Tuple[float, ...]
    value: float


class ConjectureProbeReport(FrozenModel):
    """Worst-case 추측 수치 탐색 결과"""
    n: int
    rho: float
    samples_tested: int
    seed: int
    max_observed_peak: float
    reference_peak: float
    counterexample: Optional[ConjectureCounterexample] = None

    @validator('counterexample', always=True)
    def validate_counterexample(cls, v, values):
        """반례 존재 <=> max_observed_peak > reference_peak (1 + 1e-9)"""
        observed = values.get('max_observed_peak')
        reference = values.get('reference_peak')
        if observed is not None and reference is not None:
            exceeded = observed > reference * (1 + 1e-9)
            if exceeded != (v is not None):
                raise ValueError('반례 필드와 관측 최대값이 일치하지 않습니다.')
        return v


# ==================== 잡음 자기회귀 스키마 ====================

class NoiseBand(FrozenModel):
    """|v_k| <= epsilon"""
    epsilon: float = Field(..., description="잡음 한계", ge=0.0)


class NoiseSequence(FrozenModel):
    """잡음 v_n, ..., v_H"""
    values: Tuple[float, ...] = Field(default=(), description="잡음 값")

    @validator('values')
    def validate_values(cls, v):
        return _check_finite(v, 'values')

    def within(self, band: NoiseBand, tol: float = 1e-12) -> bool:
        """모든 값이 band 안에 있는지"""
        return all(abs(v) <= band.epsilon * (1 + tol) for v in self.values)

    @classmethod
    def constant(cls, value: float, length: int) -> "NoiseSequence":
        return cls(values=(float(value),) * length)


class BoxLPResult(FrozenModel):
    """박스 제약 선형계획 max x_t 의 해"""
    t: int
    value: float
    argmax_init: InitialCondition
    argmax_noise: NoiseSequence


class BoundSweepRow(FrozenModel):
    """t 별 잡음 상한 비교"""
    t: int
    box_lp_max: float
    convolution_bound: float
    tail_bound: float


# ==================== 특수 방정식 스키마 ====================

class TrinomialEquation(FrozenModel):
    """
    삼항 방정식 x_{k+1} - a x_k + b x_{k-n} = 0

    차수 n+1 의 DifferenceEquation (a_1 = -a, a_{n+1} = b) 에 해당합니다.
    """
    delay_order: int = Field(..., description="지연 차수 n", ge=1)
    a: float
    b: float

    @validator('a', 'b')
    def validate_finite(cls, v):
        if not math.isfinite(v):
            raise ValueError(f'유한하지 않은 계수입니다: {v!r}')
        return v


class RegionSample(FrozenModel):
    """(a, b) 평면의 한 점에 대한 영역 판정"""
    a: float
    b: float
    in_stability: bool
    in_cohn: bool
    in_peak_domain: bool

    @validator('in_peak_domain')
    def validate_peak_domain(cls, v, values):
        """피크 영역은 안정 영역의 부분집합"""
        if v and not values.get('in_stability', False):
            raise ValueError('피크 영역 점은 안정 영역 안에 있어야 합니다.')
        return v


class BoundaryPoint(FrozenModel):
    """안정 영역 경계 위의 점 (omega=0: lambda=1 직선, omega=pi: lambda=-1 직선)"""
    omega: float
    a: float
    b: float


class StabilityBoundary(FrozenModel):
    """D-분할 경계 곡선"""
    n: int
    points: Tuple[BoundaryPoint, ...]
    skipped_singular: int = Field(..., description="sin(n omega) ~ 0 이라 건너뛴 샘플 수")
    dropped_off_boundary: int = Field(..., description="안정 영역 경계가 아니라서 버린 후보 수")


class RegionAreas(FrozenModel):
    """Monte Carlo 면적 추정 결과"""
    n: int
    samples: int
    seed: int
    area_S: float
    area_C: float
    area_P: float
    ratio: float
    stderr_S: float
    stderr_P: float
    stderr_ratio: float


class DoubleRootFamily(FrozenModel):
    """이중근 계열 파라미터"""
    n: int
    a: float
    b2: float
    rho: float
    in_band: bool = Field(..., description="1 < a < 1 + 1/n 여부")
    negative_root: Optional[float] = Field(default=None, description="n 짝수일 때의 음의 실근")


class RampSolution(FrozenModel):
    """램프 초기조건에 대한 닫힌 해 x_k = k rho^k"""
    n: int
    a: float
    b: float
    rho: float
    K: Tuple[int, ...]
    eta_normalized: float
    eta_lower_estimate: float
    eta_asymptotic: float

    def value(self, k: int) -> float:
        """x_k = k rho^k"""
        return k * self.rho ** k


class StandardInitBound(FrozenModel):
    """표준 초기조건 (0, ..., 0, 1) 의 피크 하한"""
    n: int
    a: float
    b: float
    lower_bound: float
    cap: float
    report: Optional[PeakReport] = None


class MarkovEstimates(FrozenModel):
    """Markov 예제의 점근 추정"""
    K_est: float
    eta_est: float
    rho_star: float


class MarkovSummary(FrozenModel):
    """Markov 예제 CLI 출력"""
    rho: float
    peak_instant: int
    peak_instants: Tuple[int, ...]
    peak: float
    has_peak: bool
    certified: bool
    K_est: float
    eta_est: float
    rho_star: float


# ==================== 실행 설정 스키마 ====================

class RunConfig(FrozenModel):
    """
    CLI 실행 설정

    방정식 소스는 정확히 하나만 지정해야 합니다.
    """
    command: str = Field(..., description="서브커맨드 이름")
    coefficients: Optional[Tuple[float, ...]] = None
    roots: Optional[Tuple[Tuple[float, float], ...]] = None
    equal_roots: Optional[Tuple[int, float]] = None
    trinomial: Optional[Tuple[int, float, float]] = None
    markov: Optional[float] = None
    init: Optional[str] = Field(default=None, description="프리셋 이름 또는 쉼표로 구분한 값")
    horizon: Optional[int] = Field(default=None, ge=0)
    epsilon: Optional[float] = Field(default=None, ge=0.0)
    out: Optional[str] = None
    format: Literal['csv', 'json'] = 'csv'
    seed: int = Field(default=0, ge=0, lt=2 ** 64)

    @validator('seed', always=True)
    def validate_seed(cls, v, values):
        """방정식 소스가 정확히 하나인지 검증 (마지막 필드에서 한 번에 확인)"""
        sources = [values.get(name) for name in ('coefficients', 'roots', 'equal_roots', 'trinomial', 'markov')]
        given = sum(s is not None for s in sources)
        if given != 1:
            raise ValueError(f'방정식 소스는 정확히 하나여야 합니다 (현재 {given}개).')
        return v

    @property
    def source(self) -> str:
        for name in ('coefficients', 'roots', 'equal_roots', 'trinomial', 'markov'):
            if getattr(self, name) is not None:
                return name
        raise ValueError('방정식 소스가 없습니다.')
