"""
유계 잡음 자기회귀 CLI 커맨드

noise 그룹 아래 sweep, trajectory, steady-state, box-lp 커맨드를 정의합니다.
"""

import logging

import click

from app.cli.options import (
    build_run_config,
    emit,
    equation_from_config,
    equation_options,
    init_from_config,
    output_options,
    parse_floats,
    render,
)
from app.models.schemas import NoiseBand, NoiseSequence
from app.services.export_service import export_service
from app.services.noise_service import noise_service

# 로거 설정
logger = logging.getLogger(__name__)


@click.group('noise')
def noise():
    """유계 잡음 |v_k| <= epsilon 자기회귀 분석"""


@noise.command('sweep')
@click.option('--n', 'order', type=click.IntRange(min=1), required=True, help="차수 n (같은 근)")
@click.option('--rho', type=float, required=True, help="공통 근 rho")
@click.option('--epsilon', type=click.FloatRange(min=0.0), required=True, help="잡음 한계")
@click.option('--t-max', type=click.IntRange(min=1), default=200, show_default=True, help="마지막 t")
@click.option('--t-min', type=click.IntRange(min=1), help="첫 t (기본 n)")
@output_options('csv')
def sweep(order, rho, epsilon, t_max, t_min, out, fmt):
    """
    t 별 박스 LP 최대값, 닫힌 식, 꼬리 상한 비교

    \b
    예시:
      noise sweep --n 4 --rho 0.75 --epsilon 0.2 --t-max 200
    """
    rows = noise_service.bound_sweep(order, rho, NoiseBand(epsilon=epsilon), t_max, t_min)
    emit(render(rows, fmt, lambda: export_service.sweep_csv(rows)), out)


@noise.command('trajectory')
@equation_options
@click.option('--init', default='alternating', show_default=True, help="초기조건 프리셋 또는 쉼표로 구분한 값")
@click.option('--epsilon', 'epsilons', default='0.4', show_default=True,
              help="상수 잡음 v_k = epsilon, 여러 개면 쉼표로 (예: 0,0.2,0.4,0.6,0.8,1.0)")
@click.option('--horizon', type=click.IntRange(min=0), default=60, show_default=True, help="마지막 인덱스 H")
@output_options('csv')
def trajectory(init, epsilons, horizon, out, fmt, **sources):
    """
    상수 잡음 궤적 (잡음 수준 하나면 k,x_k,v_k, 여러 개면 수준마다 한 열)

    \b
    예시:
      noise trajectory --equal-roots 4,0.75 --init alternating --epsilon 0,0.2,0.4,0.6,0.8,1.0
    """
    levels = parse_floats(epsilons, '--epsilon')
    config = build_run_config('noise trajectory', init=init, horizon=horizon,
                              epsilon=levels[0] if len(levels) == 1 else None, out=out, fmt=fmt, **sources)
    eq, rho = equation_from_config(config)
    initial = init_from_config(config, eq, rho)

    if len(levels) == 1:
        values = NoiseSequence.constant(levels[0], max(horizon - eq.order + 1, 0))
        result = noise_service.simulate_noisy(eq, initial, values, horizon)
        emit(render(result, fmt, lambda: export_service.trajectory_csv(result, values, eq.order)), out)
        return

    samples = noise_service.constant_noise_trajectories(eq, initial, levels, horizon)
    if fmt == 'json':
        payload = {f"{e!r}": [float(x) for x in samples[:, j]] for j, e in enumerate(levels)}
        emit(export_service.to_json(payload), out)
    else:
        emit(export_service.multi_trajectory_csv(samples, levels), out)


@noise.command('steady-state')
@click.option('--n', 'order', type=click.IntRange(min=1), required=True, help="차수 n")
@click.option('--rho', type=float, required=True, help="공통 근 rho")
@click.option('--epsilon', type=click.FloatRange(min=0.0), required=True, help="상수 잡음 값")
@output_options('json')
def steady_state(order, rho, epsilon, out, fmt):
    """상수 잡음 극한 x* = epsilon / (1-rho)^n 과 꼬리 상한"""
    band = NoiseBand(epsilon=epsilon)
    payload = {
        'n': order,
        'rho': rho,
        'epsilon': epsilon,
        'steady_state': noise_service.steady_state(order, rho, band),
        'tail_bound': noise_service.geometric_tail_bound(order, rho, band),
    }
    if fmt == 'csv':
        emit(export_service.to_csv(list(payload), [list(payload.values())]), out)
    else:
        emit(export_service.to_json(payload), out)


@noise.command('box-lp')
@equation_options
@click.option('--epsilon', type=click.FloatRange(min=0.0), required=True, help="잡음 한계")
@click.option('--t', 't', type=click.IntRange(min=1), required=True, help="목표 시점 t")
@output_options('json')
def box_lp(epsilon, t, out, fmt, **sources):
    """
    max x_t over ||x^(0)||_inf <= 1, |v_k| <= epsilon 의 정확한 해와 최적 인자

    \b
    예시:
      noise box-lp --equal-roots 4,0.75 --epsilon 0.2 --t 30
    """
    config = build_run_config('noise box-lp', epsilon=epsilon, out=out, fmt=fmt, **sources)
    eq, _ = equation_from_config(config)
    emit(render(noise_service.box_lp_max(eq, NoiseBand(epsilon=epsilon), t), fmt), out)
