"""
실근 상/하한 CLI 커맨드

bounds-check 와 conjecture 커맨드를 정의합니다.
"""

import logging

import click

from app.cli.options import emit, output_options, parse_floats, render, seed_option
from app.core.exceptions import InvalidInputError
from app.models.schemas import RealRootSet
from app.services.root_bounds_service import root_bounds_service

# 로거 설정
logger = logging.getLogger(__name__)


@click.command('bounds-check')
@click.option('--roots', required=True, help="실근 목록 (예: 0.8,0.9,0.95)")
@click.option('--side', type=click.Choice(['lower', 'upper']), required=True, help="하한(근 >= rho) 또는 상한(|근| <= rho)")
@click.option('--rho', type=float, help="기준 rho (없으면 lower: 최소 근, upper: 최대 |근|)")
@click.option('--horizon', type=click.IntRange(min=1), default=500, show_default=True, help="검사할 마지막 k")
@output_options('json')
def bounds_check(roots, side, rho, horizon, out, fmt):
    """
    실근 방정식의 임펄스 해를 beta_{k,n}(rho) 와 비교

    하한 검사에서는 계수 필요조건 결과도 로그로 남깁니다.

    \b
    예시:
      bounds-check --roots 0.8,0.9,0.95 --side lower --rho 0.8
      bounds-check --roots -0.3,0.1,0.3 --side upper
    """
    values = parse_floats(roots, '--roots')
    if not values:
        raise InvalidInputError('근 목록이 비어 있습니다.')
    if side == 'lower':
        rho = min(values) if rho is None else rho
        root_set = RealRootSet(declared_band=(rho, max(max(values), rho)), roots=values)
        report = root_bounds_service.check_lower_bound(root_set, horizon, rho)
        necessary = root_bounds_service.necessary_coefficient_conditions(root_set, rho)
        logger.info(f"계수 필요조건: {'성립' if necessary else '위반'}")
    else:
        rho = max(abs(v) for v in values) if rho is None else rho
        root_set = RealRootSet(declared_band=(-rho, rho), roots=values)
        report = root_bounds_service.check_upper_bound(root_set, horizon, rho)
    emit(render(report, fmt), out)


@click.command('conjecture')
@click.option('--n', 'order', type=click.IntRange(1, 8), default=3, show_default=True, help="차수 n")
@click.option('--rho', type=float, required=True, help="원판 반경 rho")
@click.option('--samples', type=click.IntRange(min=0), default=10_000, show_default=True, help="표본 수")
@click.option('--grid-step', type=float, help="n=2 실근 쌍 격자 전수 탐색 간격 (주면 표본 추출 대신 사용)")
@seed_option
@output_options('json')
def conjecture(order, rho, samples, grid_step, seed, out, fmt):
    """
    최악 근 배치 추측의 수치 탐색

    \b
    예시:
      conjecture --n 3 --rho 0.75 --samples 10000 --seed 42
      conjecture --n 2 --rho 0.5 --grid-step 0.01
    """
    if grid_step is not None:
        if order != 2:
            raise InvalidInputError('격자 탐색은 n=2 에서만 지원합니다.')
        report = root_bounds_service.conjecture_grid(rho, grid_step)
    else:
        report = root_bounds_service.conjecture_probe(order, rho, samples, seed)
    emit(render(report, fmt), out)
