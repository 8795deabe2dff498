"""
결과 내보내기 서비스 모듈

분석 결과를 CSV/JSON 문자열로 직렬화하고, simulate 가 쓴 궤적 CSV 를 다시 읽습니다.
CSV 는 '.' 소수점, 천 단위 구분자 없음, 유효숫자 17자리(설정값)를 씁니다.
JSON 은 pydantic 직렬화를 그대로 써서 실수를 왕복 가능한 최단 표현으로 냅니다.
"""

import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel

from app.core.config import Settings, settings
from app.core.exceptions import InvalidInputError
from app.models.schemas import (
    BoundSweepRow,
    NoiseSequence,
    PeakCurvePoint,
    RegionSample,
    StabilityBoundary,
    Table1Row,
    Trajectory,
)

# 로거 설정
logger = logging.getLogger(__name__)


class ExportService:
    """CSV/JSON 직렬화 서비스 클래스"""

    def __init__(self, config: Settings = settings):
        self.config = config

    # ==================== 기본 포맷 ====================

    def number(self, value: Union[float, int, bool]) -> str:
        """정수/불리언은 그대로, 실수는 설정된 유효숫자로"""
        if isinstance(value, (bool, np.bool_)):
            return '1' if value else '0'
        if isinstance(value, (int, np.integer)):
            return str(int(value))
        return f"{float(value):.{self.config.float_digits}g}"

    def instants(self, values: Sequence[int]) -> str:
        """동률 시점 집합은 ';' 로 연결"""
        return ';'.join(str(v) for v in values)

    def to_csv(self, header: Sequence[str], rows: Iterable[Sequence]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([cell if isinstance(cell, str) else self.number(cell) for cell in row])
        return buffer.getvalue()

    def to_json(self, payload: Union[BaseModel, Sequence[BaseModel], dict]) -> str:
        """모델 하나, 모델 목록, 또는 dict 를 JSON 으로 (실수는 CSV 와 같은 유효숫자)"""
        if isinstance(payload, BaseModel):
            data = payload.model_dump(mode='json')
        elif isinstance(payload, dict):
            data = payload
        else:
            data = [item.model_dump(mode='json') for item in payload]
        return json.dumps(self._rounded(data), indent=2, ensure_ascii=False) + '\n'

    def _rounded(self, value):
        if isinstance(value, dict):
            return {key: self._rounded(item) for key, item in value.items()}
        if isinstance(value, (list, tuple)):
            return [self._rounded(item) for item in value]
        if isinstance(value, float):
            # JSON 에는 inf/nan 이 없으므로 null
            return float(self.number(value)) if math.isfinite(value) else None
        return value

    def record_csv(self, record: BaseModel) -> str:
        """레코드 하나를 헤더 한 줄 + 값 한 줄로 (중첩 필드는 점으로 이어 붙인 이름)"""
        flat = {}

        def walk(prefix, value):
            if isinstance(value, dict):
                for key, item in value.items():
                    walk(f"{prefix}.{key}" if prefix else key, item)
            elif isinstance(value, (list, tuple)):
                flat[prefix] = ';'.join(
                    json.dumps(v) if isinstance(v, (list, tuple, dict)) else (v if isinstance(v, str) else self.number(v))
                    for v in value
                )
            elif value is None:
                flat[prefix] = ''
            else:
                flat[prefix] = value

        walk('', record.model_dump())
        return self.to_csv(list(flat), [list(flat.values())])

    # ==================== 결과별 CSV ====================

    def trajectory_csv(self, trajectory: Trajectory, noise: Optional[NoiseSequence] = None, order: int = 0) -> str:
        """k,x_k (잡음이 있으면 k,x_k,v_k; v_k 는 k >= order 에서만 채움)"""
        if noise is None:
            rows = ((trajectory.start_index + i, x) for i, x in enumerate(trajectory.samples))
            return self.to_csv(('k', 'x_k'), rows)

        def noise_at(k):
            j = k - order
            return noise.values[j] if 0 <= j < len(noise.values) else 0.0

        rows = ((k, x, noise_at(k)) for k, x in enumerate(trajectory.samples, start=trajectory.start_index))
        return self.to_csv(('k', 'x_k', 'v_k'), rows)

    def multi_trajectory_csv(self, samples: np.ndarray, epsilons: Sequence[float]) -> str:
        """k,x_k@eps=... 열이 잡음 수준마다 하나"""
        header = ['k'] + [f"x_k@eps={self.number(e)}" for e in epsilons]
        rows = ([k] + [float(v) for v in row] for k, row in enumerate(samples))
        return self.to_csv(header, rows)

    def curve_csv(self, points: Sequence[PeakCurvePoint]) -> str:
        return self.to_csv(('k', 'alpha', 'beta'), ((p.k, p.alpha, p.beta) for p in points))

    def table1_csv(self, rows: Sequence[Table1Row]) -> str:
        return self.to_csv(
            ('n', 'beta_n', 'alpha_n', 'K_beta', 'K_alpha'),
            ((r.n, r.beta_n, r.alpha_n, self.instants(r.K_beta), self.instants(r.K_alpha)) for r in rows)
        )

    def sweep_csv(self, rows: Sequence[BoundSweepRow]) -> str:
        return self.to_csv(
            ('t', 'box_lp_max', 'convolution_bound', 'tail_bound'),
            ((r.t, r.box_lp_max, r.convolution_bound, r.tail_bound) for r in rows)
        )

    def boundary_csv(self, boundary: StabilityBoundary) -> str:
        return self.to_csv(('omega', 'a', 'b'), ((p.omega, p.a, p.b) for p in boundary.points))

    def region_csv(self, samples: Sequence[RegionSample]) -> str:
        return self.to_csv(
            ('a', 'b', 'in_S', 'in_C', 'in_P'),
            ((s.a, s.b, s.in_stability, s.in_cohn, s.in_peak_domain) for s in samples)
        )

    # ==================== 읽기 ====================

    def read_trajectory_csv(self, path: Union[str, Path]) -> Trajectory:
        """
        k,x_k 로 시작하는 CSV 를 궤적으로 읽음 (추가 열은 무시)

        Raises:
            InvalidInputError: 헤더가 없거나 k 가 연속이 아닌 경우
        """
        with open(path, newline='', encoding='utf-8') as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if not header or header[:2] != ['k', 'x_k']:
                raise InvalidInputError(f'궤적 CSV 헤더는 k,x_k 로 시작해야 합니다: {header}')
            ks: List[int] = []
            xs: List[float] = []
            for line, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    ks.append(int(row[0]))
                    xs.append(float(row[1]))
                except (ValueError, IndexError):
                    raise InvalidInputError(f'궤적 CSV {line}번째 줄을 읽을 수 없습니다: {row}')

        if not ks:
            raise InvalidInputError(f'궤적 CSV 에 샘플이 없습니다: {path}')
        if ks != list(range(ks[0], ks[0] + len(ks))):
            raise InvalidInputError('궤적 CSV 의 k 가 연속적이지 않습니다.')
        logger.debug(f"궤적 CSV 로드: {path}, 샘플 {len(xs)}개")
        return Trajectory(start_index=ks[0], samples=tuple(xs))


# 전역 서비스 인스턴스
export_service = ExportService()
