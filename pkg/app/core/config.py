"""
애플리케이션 설정 관리 모듈

이 모듈은 Peak Analyzer의 모든 수치 설정을 중앙에서 관리합니다.
시뮬레이션 구간(horizon) 정책, 근 찾기 허용오차, 샘플링 병렬화, 출력 형식 등을 포함합니다.
"""

import logging
from pydantic import Field, validator
from pydantic_settings import BaseSettings
from dotenv import load_dotenv

# 환경 변수 로드
load_dotenv()

class Settings(BaseSettings):
    """
    애플리케이션 설정 클래스

    모든 설정값은 PEAK_ 접두사가 붙은 환경 변수나 .env 파일에서 로드됩니다.
    기본값만으로 table1, Markov 예제, 영역 면적 계산을 그대로 돌릴 수 있습니다.
    """

    # ==================== 기본 정보 ====================
    app_name: str = Field(
        default="Peak Analyzer",
        description="애플리케이션 이름"
    )
    app_version: str = Field(
        default="1.0.0",
        description="애플리케이션 버전"
    )
    log_level: str = Field(
        default="WARNING",
        description="CLI 로그 레벨 (DEBUG/INFO/WARNING/ERROR)"
    )

    # ==================== 피크 탐색 구간 설정 ====================
    horizon_scale: float = Field(
        default=10.0,
        description="초기 구간 H0 = ceil(scale * n / (1 - rho)) 의 배율",
        gt=0.0
    )
    horizon_cap: int = Field(
        default=1_000_000,
        description="적응형 구간의 최대 스텝 수",
        ge=1
    )
    decay_tolerance: float = Field(
        default=1e-9,
        description="후행 윈도우 인증 기준 (꼬리 최대값 / 현재 최대값)",
        gt=0.0,
        lt=1.0
    )
    tie_tolerance: float = Field(
        default=1e-9,
        description="argmax 동률 판정 상대 허용오차",
        ge=0.0,
        lt=1e-3
    )
    stability_margin: float = Field(
        default=0.0,
        description="Schur 안정성 판정 여유값 (rho < 1 - margin)",
        ge=0.0,
        lt=1.0
    )

    # ==================== 근 찾기 설정 ====================
    root_tolerance: float = Field(
        default=1e-14,
        description="동시 반복법의 상대 스텝 허용오차",
        gt=0.0
    )
    root_max_iterations: int = Field(
        default=500,
        description="재시작 1회당 최대 반복 횟수",
        ge=10
    )
    root_restarts: int = Field(
        default=5,
        description="정체 시 무작위 섭동 재시작 횟수",
        ge=0
    )
    root_seed: int = Field(
        default=20240607,
        description="재시작 섭동용 난수 시드",
        ge=0
    )
    cluster_search_radius: float = Field(
        default=0.1,
        description="중근 후보 묶음 반경 (max(1, |z|) 기준 상대값)",
        gt=0.0,
        lt=1.0
    )
    multiplicity_tolerance: float = Field(
        default=1e-12,
        description="중근으로 인정하는 스케일된 도함수 잔차 상한",
        gt=0.0
    )
    imag_tolerance: float = Field(
        default=1e-10,
        description="실수로 잘라내는 허수부 잔차",
        gt=0.0
    )

    # ==================== 검증 / 샘플링 설정 ====================
    bound_tolerance: float = Field(
        default=1e-10,
        description="정리 기반 상/하한 검사에서 허용하는 상대 여유",
        ge=0.0
    )
    workers: int = Field(
        default=1,
        description="샘플링 계산에 사용할 프로세스 수 (1이면 현재 프로세스)",
        ge=1,
        le=256
    )
    sample_chunks: int = Field(
        default=8,
        description="샘플 예산을 나누는 고정 청크 수 (청크마다 하위 시드 사용)",
        ge=1
    )
    show_progress: bool = Field(
        default=False,
        description="긴 샘플링 작업에서 tqdm 진행 표시 여부"
    )

    # ==================== 출력 설정 ====================
    float_digits: int = Field(
        default=17,
        description="CSV/JSON 실수 출력 유효숫자",
        ge=6,
        le=17
    )

    # ==================== 검증 메서드 ====================
    @validator('log_level')
    def validate_log_level(cls, v):
        """로그 레벨 검증"""
        level = v.upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f'지원하지 않는 로그 레벨입니다: {v}')
        return level

    class Config:
        """Pydantic 설정"""
        env_prefix = "PEAK_"
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = False

# 전역 설정 인스턴스
settings = Settings()
