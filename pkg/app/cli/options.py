"""
CLI 공통 옵션 모듈

방정식 소스(계수 / 근 / 같은 근 / 삼항 / Markov), 초기조건 프리셋, 출력 옵션을
여러 커맨드가 같은 방식으로 받도록 데코레이터와 변환 함수를 모아 둡니다.
"""

import logging
import math
from pathlib import Path
from typing import Callable, Optional, Tuple

import click
from pydantic import BaseModel

from app.core.exceptions import InvalidInputError
from app.models.schemas import (
    INIT_PRESETS,
    DifferenceEquation,
    EqualRootSpec,
    InitialCondition,
    RunConfig,
    TrinomialEquation,
)
from app.services.equal_roots_service import equal_roots_service
from app.services.export_service import export_service
from app.services.recurrence_service import recurrence_service
from app.services.special_equations_service import special_equations_service

# 로거 설정
logger = logging.getLogger(__name__)

EQUATION_SOURCES = ('coefficients', 'roots', 'equal_roots', 'trinomial', 'markov')


# ==================== 파싱 ====================

def parse_floats(text: str, name: str = 'value') -> Tuple[float, ...]:
    """'0.5,-0.25' -> (0.5, -0.25)"""
    try:
        return tuple(float(token) for token in text.split(',') if token.strip())
    except ValueError:
        raise click.BadParameter(f"쉼표로 구분한 실수여야 합니다: {text!r}", param_hint=name)


def parse_roots(text: str) -> Tuple[Tuple[float, float], ...]:
    """'0.5,0.6+0.1j,0.6-0.1j' -> ((0.5, 0.0), (0.6, 0.1), (0.6, -0.1))"""
    try:
        values = [complex(token.strip().replace(' ', '')) for token in text.split(',') if token.strip()]
    except ValueError:
        raise click.BadParameter(f"쉼표로 구분한 (복소)수여야 합니다: {text!r}", param_hint='--roots')
    return tuple((z.real, z.imag) for z in values)


# ==================== 데코레이터 ====================

def _stack(*decorators) -> Callable:
    def apply(f):
        for decorator in reversed(decorators):
            f = decorator(f)
        return f
    return apply


equation_options = _stack(
    click.option('--coefficients', help="계수 a_1,...,a_n (예: -1.5,0.5625)"),
    click.option('--roots', help="특성근 목록, 복소근은 켤레쌍으로 (예: 0.5,0.6+0.1j,0.6-0.1j)"),
    click.option('--equal-roots', help="같은 근 방정식 n,rho (예: 4,0.75)"),
    click.option('--trinomial', help="삼항 방정식 n,a,b (예: 3,1.1,0.154432)"),
    click.option('--markov', type=float, help="Markov 예제의 rho"),
)

init_option = click.option(
    '--init', default='impulse', show_default=True,
    help=f"초기조건 프리셋 ({', '.join(INIT_PRESETS)}) 또는 쉼표로 구분한 값"
)


def output_options(default_format: str) -> Callable:
    return _stack(
        click.option('--out', type=click.Path(dir_okay=False), help="출력 파일 (없으면 표준 출력)"),
        click.option('--format', 'fmt', type=click.Choice(['csv', 'json']), default=default_format,
                     show_default=True, help="출력 형식"),
    )


seed_option = click.option('--seed', type=click.IntRange(0, 2 ** 64 - 1), default=0, show_default=True,
                           help="난수 시드 (u64)")


# ==================== 설정 / 방정식 구성 ====================

def build_run_config(command: str, coefficients=None, roots=None, equal_roots=None, trinomial=None,
                     markov=None, init=None, horizon=None, epsilon=None, out=None, fmt='csv',
                     seed=0) -> RunConfig:
    """CLI 인자를 RunConfig 로 검증 (방정식 소스는 정확히 하나)"""
    equal = parse_floats(equal_roots, '--equal-roots') if equal_roots else None
    tri = parse_floats(trinomial, '--trinomial') if trinomial else None
    if equal is not None and len(equal) != 2:
        raise click.BadParameter("n,rho 두 값이 필요합니다.", param_hint='--equal-roots')
    if tri is not None and len(tri) != 3:
        raise click.BadParameter("n,a,b 세 값이 필요합니다.", param_hint='--trinomial')
    return RunConfig(
        command=command,
        coefficients=parse_floats(coefficients, '--coefficients') if coefficients else None,
        roots=parse_roots(roots) if roots else None,
        equal_roots=(int(equal[0]), equal[1]) if equal else None,
        trinomial=(int(tri[0]), tri[1], tri[2]) if tri else None,
        markov=markov,
        init=init,
        horizon=horizon,
        epsilon=epsilon,
        out=out,
        format=fmt,
        seed=seed
    )


def equation_from_config(config: RunConfig) -> Tuple[DifferenceEquation, Optional[float]]:
    """
    RunConfig 의 방정식 소스를 DifferenceEquation 으로

    Returns:
        (방정식, 프리셋용 rho) - rho 는 소스에서 자연스럽게 정해지는 근의 크기 (없으면 None)
    """
    source = config.source
    if source == 'coefficients':
        return DifferenceEquation(coefficients=config.coefficients), None
    if source == 'roots':
        roots = [complex(re, im) for re, im in config.roots]
        return recurrence_service.coefficients_from_roots(roots), max(abs(r) for r in roots)
    if source == 'equal_roots':
        n, rho = config.equal_roots
        return equal_roots_service.equation(EqualRootSpec(order=n, rho=rho)), rho
    if source == 'trinomial':
        n, a, b = config.trinomial
        eq = special_equations_service.trinomial_to_equation(TrinomialEquation(delay_order=n, a=a, b=b))
        # 이중근 곡선 b = b_2 위에서만 a n / (n+1) 이 근의 크기
        b2 = a ** (n + 1) * n ** n / (n + 1) ** (n + 1)
        on_double_root_curve = math.isclose(b, b2, rel_tol=1e-6)
        return eq, (a * n / (n + 1) if on_double_root_curve else None)
    return special_equations_service.markov_equation(config.markov), config.markov


def init_from_config(config: RunConfig, eq: DifferenceEquation, rho: Optional[float]) -> InitialCondition:
    """프리셋 이름 또는 쉼표 목록을 초기조건으로 (geometric/ramp 의 rho 는 소스에서, 없으면 spectral radius)"""
    text = config.init or 'impulse'
    if text in INIT_PRESETS:
        if text in ('geometric', 'ramp') and rho is None:
            rho = recurrence_service.spectral_radius(eq)
        try:
            return InitialCondition.from_preset(text, eq.order, rho)
        except ValueError as e:
            raise InvalidInputError(str(e))
    return InitialCondition(values=parse_floats(text, '--init'))


# ==================== 출력 ====================

def render(payload, fmt: str, csv_writer: Optional[Callable[[], str]] = None) -> str:
    """json 이면 pydantic 직렬화, csv 면 전용 writer 또는 레코드 한 줄"""
    if fmt == 'json':
        return export_service.to_json(payload)
    if csv_writer is not None:
        return csv_writer()
    if isinstance(payload, BaseModel):
        return export_service.record_csv(payload)
    raise click.BadParameter("이 결과는 CSV 로 낼 수 없습니다.", param_hint='--format')


def emit(text: str, out: Optional[str]) -> None:
    """파일 또는 표준 출력으로 결과 쓰기 (로그는 stderr 로만)"""
    if out:
        Path(out).write_text(text, encoding='utf-8')
        logger.info(f"결과 저장: {out}")
    else:
        click.echo(text, nl=False)
