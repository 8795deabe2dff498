"""
점화식 핵심 CLI 커맨드

simulate, peak, worst-case, verify 커맨드를 정의합니다.
"""

import logging

import click

from app.cli.options import (
    build_run_config,
    emit,
    equation_from_config,
    equation_options,
    init_from_config,
    init_option,
    output_options,
    render,
)
from app.core.exceptions import NumericalError
from app.services.export_service import export_service
from app.services.recurrence_service import recurrence_service

# 로거 설정
logger = logging.getLogger(__name__)


@click.command('simulate')
@equation_options
@init_option
@click.option('--horizon', type=click.IntRange(min=0), default=40, show_default=True, help="마지막 인덱스 H")
@output_options('csv')
def simulate(init, horizon, out, fmt, **sources):
    """
    궤적 x_0, ..., x_H 계산

    \b
    예시:
      simulate --equal-roots 4,0.75 --init impulse --horizon 40 --out impulse.csv
    """
    config = build_run_config('simulate', init=init, horizon=horizon, out=out, fmt=fmt, **sources)
    eq, rho = equation_from_config(config)
    trajectory = recurrence_service.simulate(eq, init_from_config(config, eq, rho), horizon)
    logger.info(f"시뮬레이션 완료: n={eq.order}, H={horizon}")
    emit(render(trajectory, fmt, lambda: export_service.trajectory_csv(trajectory)), out)


@click.command('peak')
@equation_options
@init_option
@click.option('--horizon', type=click.IntRange(min=1), help="고정 구간 (없으면 적응형)")
@output_options('json')
def peak(init, horizon, out, fmt, **sources):
    """주어진 초기조건의 피크 eta 와 피크 시점 K"""
    config = build_run_config('peak', init=init, horizon=horizon, out=out, fmt=fmt, **sources)
    eq, rho = equation_from_config(config)
    report = recurrence_service.peak(eq, init_from_config(config, eq, rho), horizon)
    emit(render(report, fmt), out)


@click.command('worst-case')
@equation_options
@click.option('--horizon', type=click.IntRange(min=1), help="고정 구간 (없으면 적응형)")
@output_options('json')
def worst_case(horizon, out, fmt, **sources):
    """단위 박스 초기조건 위의 정확한 최악 피크와 최악 초기조건"""
    config = build_run_config('worst-case', horizon=horizon, out=out, fmt=fmt, **sources)
    eq, _ = equation_from_config(config)
    emit(render(recurrence_service.worst_case_peak(eq, horizon), fmt), out)


@click.command('verify')
@equation_options
@click.option('--trajectory', 'path', type=click.Path(exists=True, dir_okay=False), required=True,
              help="simulate 가 쓴 k,x_k CSV")
@output_options('json')
def verify(path, out, fmt, **sources):
    """
    저장된 궤적이 점화식을 만족하는지 재검증

    잔차가 허용오차를 넘으면 수치 오류(종료 코드 3)로 끝납니다.
    """
    config = build_run_config('verify', out=out, fmt=fmt, **sources)
    eq, _ = equation_from_config(config)
    report = recurrence_service.recurrence_residual(eq, export_service.read_trajectory_csv(path))
    emit(render(report, fmt), out)
    if not report.ok:
        raise NumericalError(f"궤적 잔차 {report.max_residual!r} 가 허용오차를 넘습니다 (k={report.worst_index})")
