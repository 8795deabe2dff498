"""
CLI 그룹 설정

이 모듈은 Peak Analyzer의 모든 커맨드를 하나의 click 그룹으로 묶습니다.
--config 로 받은 JSON 파일은 각 커맨드의 기본값이 되고, 명령줄 플래그가 그 값을 덮어씁니다.
"""

import json
import logging

import click

from app.cli.commands import bounds, equal_roots, noise, recurrence, special
from app.core.config import settings

# 로거 설정
logger = logging.getLogger(__name__)


def _flatten(value):
    """JSON 배열은 CLI 가 받는 쉼표 문자열로"""
    if isinstance(value, list):
        return ','.join(str(v) for v in value)
    return value


def load_config_file(path: str, group: click.Group) -> dict:
    """
    JSON 설정 파일을 click default_map 으로 변환

    파일의 키는 옵션 이름(밑줄 또는 하이픈)이며 모든 커맨드와 하위 커맨드에 똑같이 적용됩니다.
    해당 커맨드에 없는 키는 무시됩니다.
    """
    try:
        with open(path, encoding='utf-8') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise click.BadParameter(f"설정 파일을 읽을 수 없습니다: {e}", param_hint='--config')
    if not isinstance(data, dict):
        raise click.BadParameter("설정 파일은 JSON 객체여야 합니다.", param_hint='--config')

    params = {key.replace('-', '_'): _flatten(value) for key, value in data.items()}
    if 'format' in params:
        params['fmt'] = params.pop('format')
    if 'n' in params:
        params.setdefault('order', params['n'])

    def for_command(command):
        if isinstance(command, click.Group):
            return {name: for_command(sub) for name, sub in command.commands.items()}
        return dict(params)

    return {name: for_command(command) for name, command in group.commands.items()}


def create_cli() -> click.Group:
    """
    CLI 그룹 생성

    Returns:
        click.Group: 모든 커맨드가 등록된 그룹
    """

    @click.group(name='peak-analyzer', context_settings={'help_option_names': ['-h', '--help']})
    @click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False),
                  help="JSON 설정 파일 (명령줄 플래그가 우선)")
    @click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False),
                  help="로그 레벨 (기본: PEAK_LOG_LEVEL)")
    @click.version_option(settings.app_version, prog_name=settings.app_name)
    @click.pass_context
    def cli(ctx, config_path, log_level):
        """안정 선형 차분방정식의 피크 효과 계산, 상한/하한, 수치 검증"""
        if log_level:
            logging.getLogger().setLevel(log_level.upper())
        if config_path:
            ctx.default_map = load_config_file(config_path, ctx.command)
            logger.debug(f"설정 파일 로드: {config_path}")

    # 커맨드 등록
    for command in (
        recurrence.simulate,
        recurrence.peak,
        recurrence.worst_case,
        recurrence.verify,
        equal_roots.equal_roots,
        equal_roots.table1,
        bounds.bounds_check,
        bounds.conjecture,
        noise.noise,
        special.markov,
        special.trinomial,
    ):
        cli.add_command(command)

    return cli
