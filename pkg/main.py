"""
Peak Analyzer - 안정 선형 차분방정식 피크 효과 분석기

점근적으로 안정한 스칼라 선형 차분방정식에서 나타나는 큰 과도 편차(피크)를
계산하고, 상한/하한으로 감싸고, 수치적으로 검증하는 CLI 입니다.

주요 기능:
- 정확한 시뮬레이션과 단위 박스 최악 피크
- 같은 근 방정식의 alpha/beta 곡선과 피크 시점
- 실근 상/하한 검사와 최악 근 배치 추측 탐색
- 유계 잡음 자기회귀의 정확한 최대값
- Markov 예제와 삼항 방정식의 안정/피크 영역

종료 코드: 0 성공, 2 입력 검증 오류, 3 수치 계산 오류, 1 예기치 않은 오류
"""

import logging
import sys
from typing import List, Optional

import click
from pydantic import ValidationError

from app.cli.cli import create_cli
from app.core.config import settings
from app.core.exceptions import EXIT_OK, EXIT_UNEXPECTED, EXIT_VALIDATION, PeakAnalysisError

# 로깅 설정 (표준 출력은 결과 전용이므로 stderr 로)
logging.basicConfig(
    level=settings.log_level,
    stream=sys.stderr,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def run(argv: Optional[List[str]] = None) -> int:
    """
    CLI 실행

    서비스 예외를 종료 코드로 바꾸고 한 줄 진단을 stderr 에 씁니다.

    Args:
        argv (List[str], optional): 인자 목록 (없으면 sys.argv[1:])

    Returns:
        int: 종료 코드
    """
    cli = create_cli()
    try:
        result = cli.main(args=argv, prog_name='peak-analyzer', standalone_mode=False)
        return result if isinstance(result, int) else EXIT_OK
    except click.ClickException as e:
        e.show()
        return EXIT_VALIDATION
    except click.Abort:
        click.echo("중단되었습니다.", err=True)
        return EXIT_UNEXPECTED
    except ValidationError as e:
        click.echo(f"입력 검증 오류: {e.errors()[0].get('msg', e)}", err=True)
        return EXIT_VALIDATION
    except PeakAnalysisError as e:
        logger.debug("분석 오류", exc_info=True)
        click.echo(f"{type(e).__name__}: {e}", err=True)
        return e.exit_code
    except Exception as e:
        logger.exception(f"예기치 않은 오류: {str(e)}")
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(run())
