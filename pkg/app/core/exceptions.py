"""
예외 정의 모듈

서비스 계층이 발생시키는 예외와 CLI 종료 코드의 대응 관계를 정의합니다.
입력 검증 실패는 종료 코드 2, 수치 계산 실패(수렴 실패, 오버플로 등)는 종료 코드 3입니다.
"""

from typing import Optional

# ==================== 종료 코드 ====================

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


class PeakAnalysisError(Exception):
    """모든 분석 예외의 기반 클래스"""
    exit_code: int = EXIT_UNEXPECTED


# ==================== 입력 검증 오류 (exit 2) ====================

class InvalidInputError(PeakAnalysisError, ValueError):
    """잘못된 입력 또는 전제조건 위반"""
    exit_code = EXIT_VALIDATION


class DimensionMismatchError(InvalidInputError):
    """초기조건/잡음 길이가 방정식 차수나 구간과 맞지 않음"""


class UnstableEquationError(InvalidInputError):
    """안정성이 필요한 연산에 불안정한 방정식이 들어옴"""

    def __init__(self, spectral_radius: float, margin: float = 0.0):
        self.spectral_radius = spectral_radius
        self.margin = margin
        super().__init__(
            f"방정식이 Schur 안정이 아닙니다: spectral radius={spectral_radius!r}, margin={margin!r}"
        )


class NearCoincidentRootsError(InvalidInputError):
    """Vandermonde 공식을 쓰기에는 근이 너무 가까움 (simulate 사용 필요)"""

    def __init__(self, min_gap: float, threshold: float):
        self.min_gap = min_gap
        self.threshold = threshold
        super().__init__(
            f"근 사이 최소 간격 {min_gap!r} 이 임계값 {threshold!r} 이하입니다. simulate 를 사용하세요."
        )


# ==================== 수치 계산 오류 (exit 3) ====================

class NumericalError(PeakAnalysisError, ArithmeticError):
    """수치 계산 실패"""
    exit_code = EXIT_NUMERICAL


class NumericalOverflowError(NumericalError):
    """시뮬레이션 중 유한하지 않은 값 발생"""

    def __init__(self, index: int, value: Optional[float] = None):
        self.index = index
        self.value = value
        super().__init__(f"k={index} 에서 유한하지 않은 값이 발생했습니다 (value={value!r})")


class RootFinderConvergenceError(NumericalError):
    """근 찾기 반복이 예산 안에 수렴하지 않음"""

    def __init__(self, iterations: int, degree: int):
        self.iterations = iterations
        self.degree = degree
        super().__init__(f"{degree}차 다항식의 근 찾기가 {iterations}회 반복 후에도 수렴하지 않았습니다")


class HorizonExhaustedError(NumericalError):
    """구간 상한에 도달할 때까지 결과를 확정하지 못함"""

    def __init__(self, horizon: int, what: str = "peak"):
        self.horizon = horizon
        self.what = what
        super().__init__(f"{what} 계산이 구간 상한 {horizon} 안에서 확정되지 않았습니다")
