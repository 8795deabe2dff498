"""
같은 근 방정식 CLI 커맨드

equal-roots (alpha/beta 곡선, K, 임계값) 와 table1 커맨드를 정의합니다.
"""

import logging

import click

from app.cli.options import emit, output_options, render
from app.models.schemas import EqualRootSpec
from app.services.equal_roots_service import equal_roots_service
from app.services.export_service import export_service

# 로거 설정
logger = logging.getLogger(__name__)


@click.command('equal-roots')
@click.option('--n', 'order', type=click.IntRange(min=1), required=True, help="차수 n")
@click.option('--rho', type=float, required=True, help="공통 근 rho (0 < rho < 1)")
@click.option('--curve', 'k_max', type=click.IntRange(min=1), help="k = n..K_MAX 의 alpha/beta 곡선을 CSV 로")
@output_options('json')
def equal_roots(order, rho, k_max, out, fmt):
    """
    같은 근 방정식의 alpha_n, beta_n, K_alpha, K_beta, 임계값, 점근 추정

    \b
    예시:
      equal-roots --n 3 --rho 0.75
      equal-roots --n 4 --rho 0.75 --curve 40 --format csv
    """
    spec = EqualRootSpec(order=order, rho=rho)
    if k_max is not None:
        curve = equal_roots_service.curve(spec, k_max)
        emit(render(curve, fmt, lambda: export_service.curve_csv(curve)), out)
        return

    summary = equal_roots_service.summary(spec)
    if fmt == 'csv':
        emit(render(summary, fmt), out)
        return
    payload = {
        'summary': summary.model_dump(mode='json'),
        'asymptotic': equal_roots_service.asymptotic_estimates(spec).model_dump(mode='json'),
    }
    emit(export_service.to_json(payload), out)


@click.command('table1')
@click.option('--n-max', type=click.IntRange(min=2), default=7, show_default=True, help="마지막 n")
@click.option('--n-min', type=click.IntRange(min=2), default=2, show_default=True, help="첫 n")
@output_options('csv')
def table1(n_max, n_min, out, fmt):
    """
    rho = 1 - 1/n 에서의 (beta_n, alpha_n, K_beta, K_alpha) 표

    \b
    예시:
      table1 --n-max 7
    """
    rows = equal_roots_service.table1(n_max, n_min)
    emit(render(rows, fmt, lambda: export_service.table1_csv(rows)), out)
