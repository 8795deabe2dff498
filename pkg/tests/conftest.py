"""
공통 테스트 fixture

서비스는 기본 설정(Settings())으로 새로 만들어 전역 인스턴스와 상태를 공유하지 않습니다.
"""

import pytest

from app.core.config import Settings
from app.models.schemas import EqualRootSpec
from app.services.equal_roots_service import EqualRootsService
from app.services.export_service import ExportService
from app.services.noise_service import NoiseService
from app.services.recurrence_service import RecurrenceService
from app.services.root_bounds_service import RootBoundsService
from app.services.root_finder import PolynomialRootFinder
from app.services.special_equations_service import SpecialEquationsService


@pytest.fixture
def config():
    return Settings(workers=1, show_progress=False)


@pytest.fixture
def finder(config):
    return PolynomialRootFinder(config)


@pytest.fixture
def recurrence(config, finder):
    return RecurrenceService(config, finder)


@pytest.fixture
def equal_roots(config, finder):
    return EqualRootsService(config, finder)


@pytest.fixture
def bounds(config, recurrence, equal_roots):
    return RootBoundsService(config, recurrence, equal_roots)


@pytest.fixture
def noise(config, recurrence, equal_roots):
    return NoiseService(config, recurrence, equal_roots)


@pytest.fixture
def special(config, recurrence):
    return SpecialEquationsService(config, recurrence)


@pytest.fixture
def exporter(config):
    return ExportService(config)


@pytest.fixture
def equal_root_eq(equal_roots):
    """(n, rho) -> 같은 근 방정식"""
    def make(n, rho):
        return equal_roots.equation(EqualRootSpec(order=n, rho=rho))
    return make
