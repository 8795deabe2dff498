"""
표본 추출 실행 모듈

표본 예산을 고정된 수의 청크로 나누고, 청크마다 SeedSequence 에서 파생한 하위 시드를 줍니다.
청크 결과는 항상 청크 순서대로 돌려주므로 작업자 수와 관계없이 결과가 같습니다.
"""

import logging
from multiprocessing import Pool
from typing import Any, Callable, List, Tuple

import numpy as np
from tqdm import tqdm

from app.core.config import Settings, settings

# 로거 설정
logger = logging.getLogger(__name__)

ChunkTask = Callable[[Tuple[int, np.random.SeedSequence, Any]], Any]


def split_budget(samples: int, chunks: int) -> List[int]:
    """samples 를 chunks 개로 최대한 고르게 나눔 (앞 청크가 1개 더 많을 수 있음)"""
    base, extra = divmod(samples, chunks)
    return [base + (1 if i < extra else 0) for i in range(chunks)]


def run_chunked(task: ChunkTask, samples: int, seed: int, payload: Any = None,
                config: Settings = settings, desc: str = "sampling") -> List[Any]:
    """
    청크 단위 표본 작업 실행

    Args:
        task: (청크 크기, 하위 SeedSequence, payload) 튜플을 받는 모듈 수준 함수
        samples (int): 전체 표본 수
        seed (int): 최상위 시드
        payload: 모든 청크에 같이 넘길 값 (피클 가능해야 함)
        config (Settings): workers, sample_chunks, show_progress 설정
        desc (str): 진행 표시 이름

    Returns:
        List[Any]: 청크 순서대로의 결과
    """
    sizes = split_budget(samples, config.sample_chunks)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(size, child, payload) for size, child in zip(sizes, children) if size > 0]
    if not jobs:
        return []

    logger.debug(f"{desc}: 표본 {samples}개, 청크 {len(jobs)}개, 작업자 {config.workers}개")
    progress = dict(total=len(jobs), desc=desc, disable=not config.show_progress)
    if config.workers > 1:
        with Pool(processes=min(config.workers, len(jobs))) as pool:
            return list(tqdm(pool.imap(task, jobs), **progress))
    return [task(job) for job in tqdm(jobs, **progress)]
