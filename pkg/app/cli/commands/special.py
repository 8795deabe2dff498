"""
특수 방정식 CLI 커맨드

markov 커맨드와 trinomial 그룹(boundary, classify, areas, ramp, regions, standard-init)을 정의합니다.
"""

import logging

import click

from app.cli.options import emit, output_options, render, seed_option
from app.services.export_service import export_service
from app.services.special_equations_service import special_equations_service

# 로거 설정
logger = logging.getLogger(__name__)


@click.command('markov')
@click.option('--rho', type=float, required=True, help="근의 크기 rho (0 < rho < 1)")
@click.option('--threshold', is_flag=True, help="피크가 생기는 최소 rho 를 이분법으로 함께 계산")
@output_options('json')
def markov(rho, threshold, out, fmt):
    """
    Markov 4차 예제의 시뮬레이션 피크와 점근 추정

    \b
    예시:
      markov --rho 0.99
    """
    summary = special_equations_service.markov_summary(rho)
    if not threshold:
        emit(render(summary, fmt), out)
        return
    payload = summary.model_dump(mode='json')
    payload['rho_star_scanned'] = special_equations_service.markov_peak_threshold()
    if fmt == 'csv':
        emit(export_service.to_csv(list(payload), [[_cell(v) for v in payload.values()]]), out)
    else:
        emit(export_service.to_json(payload), out)


def _cell(value):
    if isinstance(value, (list, tuple)):
        return export_service.instants(value)
    return value


@click.group('trinomial')
def trinomial():
    """삼항 방정식 x_{k+1} - a x_k + b x_{k-n} = 0 의 안정/피크 영역"""


@trinomial.command('boundary')
@click.option('--n', 'order', type=click.IntRange(min=1), required=True, help="지연 차수 n")
@click.option('--resolution', type=click.IntRange(min=2), default=400, show_default=True, help="omega 샘플 수")
@output_options('csv')
def boundary(order, resolution, out, fmt):
    """D-분할 안정 영역 경계 (omega,a,b)"""
    result = special_equations_service.stability_boundary(order, resolution)
    emit(render(result, fmt, lambda: export_service.boundary_csv(result)), out)


@trinomial.command('classify')
@click.option('--n', 'order', type=click.IntRange(min=1), required=True, help="지연 차수 n")
@click.option('--a', type=float, required=True)
@click.option('--b', type=float, required=True)
@output_options('json')
def classify(order, a, b, out, fmt):
    """(a, b) 의 S / C / P 소속"""
    emit(render(special_equations_service.classify_point(order, a, b), fmt), out)


@trinomial.command('areas')
@click.option('--n', 'order', type=click.IntRange(min=1), required=True, help="지연 차수 n")
@click.option('--samples', type=click.IntRange(min=10_000), default=1_000_000, show_default=True, help="표본 수")
@seed_option
@output_options('json')
def areas(order, samples, seed, out, fmt):
    """
    Monte Carlo 면적 A(S), A(C), A(P) 와 비율 A(P)/A(S)

    \b
    예시:
      trinomial areas --n 1 --samples 1000000 --seed 7
    """
    emit(render(special_equations_service.region_areas(order, samples, seed), fmt), out)


@trinomial.command('regions')
@click.option('--n', 'order', type=click.IntRange(min=1), required=True, help="지연 차수 n")
@click.option('--resolution', type=click.IntRange(min=2), default=200, show_default=True, help="축당 격자 점 수")
@output_options('csv')
def regions(order, resolution, out, fmt):
    """격자 위 영역 판정 (a,b,in_S,in_C,in_P)"""
    samples = special_equations_service.region_grid(order, resolution)
    emit(render(samples, fmt, lambda: export_service.region_csv(samples)), out)


@trinomial.command('ramp')
@click.option('--n', 'order', type=click.IntRange(min=1), required=True, help="지연 차수 n")
@click.option('--a', type=float, required=True, help="1 < a < 1 + 1/n")
@output_options('json')
def ramp(order, a, out, fmt):
    """이중근 계열과 램프 초기조건의 닫힌 해 x_k = k rho^k, K, 정규화 피크"""
    solution = special_equations_service.ramp_solution(order, a)
    if fmt == 'csv':
        emit(render(solution, fmt), out)
        return
    payload = {
        'family': special_equations_service.double_root_family(order, a).model_dump(mode='json'),
        'ramp': solution.model_dump(mode='json'),
    }
    emit(export_service.to_json(payload), out)


@trinomial.command('standard-init')
@click.option('--n', 'order', type=click.IntRange(min=1), required=True, help="지연 차수 n")
@click.option('--a', type=float, required=True, help="|a| > 1")
@click.option('--b', type=float, help="없으면 이중근 계열의 b_2")
@output_options('json')
def standard_init(order, a, b, out, fmt):
    """표준 초기조건 (0, ..., 0, 1) 의 피크와 하한 a^n"""
    emit(render(special_equations_service.standard_init_peak(order, a, b), fmt), out)
