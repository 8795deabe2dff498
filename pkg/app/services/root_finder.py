"""
다항식 근 찾기 모듈

Aberth-Ehrlich 동시 반복법으로 모든 근을 한 번에 구합니다.
같은 근이 여러 개인 경우(이 분석의 핵심 사례)는 Newton 법이 느려지므로,
반복이 끝난 뒤 근 후보를 묶고 (m-1)차 도함수의 단순근으로 중심을 다시 정제합니다.
"""

import logging
from typing import List, NamedTuple, Sequence

import numpy as np

from app.core.config import Settings, settings
from app.core.exceptions import RootFinderConvergenceError

# 로거 설정
logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps


class RootCluster(NamedTuple):
    """근과 그 중복도"""
    value: complex
    multiplicity: int


class PolynomialRootFinder:
    """
    동시 반복 다항식 근 찾기 클래스

    계수는 최고차항부터 주어지는 실수 다항식을 가정합니다.
    반환값은 중복도가 붙은 근 목록이며 절대값 내림차순으로 정렬됩니다.
    """

    def __init__(self, config: Settings = settings):
        self.config = config

    # ==================== 공개 메서드 ====================

    def find_roots(self, poly: Sequence[float]) -> List[RootCluster]:
        """
        다항식의 모든 근 계산

        Args:
            poly (Sequence[float]): 최고차항부터의 계수

        Returns:
            List[RootCluster]: 근과 중복도 목록

        Raises:
            RootFinderConvergenceError: 재시작 예산을 모두 써도 수렴하지 않는 경우

        Example:
            >>> finder.find_roots([1.0, -1.5, 0.5625])
            [RootCluster(value=(0.75+0j), multiplicity=2)]
        """
        p = np.trim_zeros(np.asarray(poly, dtype=float), 'f')
        if p.size == 0:
            raise ValueError('영 다항식의 근은 정의되지 않습니다.')
        p = p / p[0]

        # 상수항이 0이면 lambda = 0 근을 분리
        zero_count = 0
        while p.size > 1 and p[-1] == 0.0:
            p = p[:-1]
            zero_count += 1

        clusters: List[RootCluster] = []
        if zero_count:
            clusters.append(RootCluster(0j, zero_count))

        degree = p.size - 1
        if degree == 1:
            clusters.append(RootCluster(complex(-p[1]), 1))
        elif degree > 1:
            approx = self._iterate(p)
            clusters.extend(self._group(p, approx))

        clusters = [RootCluster(self._clean(c.value), c.multiplicity) for c in clusters]
        clusters.sort(key=lambda c: (-abs(c.value), -c.value.imag))
        return clusters

    def roots(self, poly: Sequence[float]) -> np.ndarray:
        """중복도만큼 반복된 근 배열"""
        return np.array(
            [c.value for c in self.find_roots(poly) for _ in range(c.multiplicity)],
            dtype=complex
        )

    def max_modulus(self, poly: Sequence[float]) -> float:
        """근의 최대 절대값"""
        clusters = self.find_roots(poly)
        if not clusters:
            return 0.0
        return float(max(abs(c.value) for c in clusters))

    # ==================== 동시 반복 ====================

    def _iterate(self, p: np.ndarray) -> np.ndarray:
        """Aberth 반복 (정체 시 무작위 섭동으로 재시작)"""
        degree = p.size - 1
        radius = max(abs(p[k]) ** (1.0 / k) for k in range(1, degree + 1))
        radius = radius if radius > 0 else 1.0
        rng = np.random.default_rng(self.config.root_seed)

        total = 0
        for attempt in range(self.config.root_restarts + 1):
            if attempt == 0:
                angles = 2 * np.pi * np.arange(degree) / degree + 0.4
                start = radius * np.exp(1j * angles)
            else:
                angles = 2 * np.pi * np.arange(degree) / degree + rng.uniform(0, 2 * np.pi)
                start = radius * (1 + 0.5 * rng.random(degree)) * np.exp(1j * angles)
                logger.debug(f"근 찾기 재시작 {attempt}회차 (차수 {degree})")

            z, iterations, converged = self._aberth(p, start)
            total += iterations
            if converged:
                logger.debug(f"근 찾기 수렴: 차수 {degree}, 반복 {iterations}회, 재시작 {attempt}회")
                return z

        logger.error(f"근 찾기 실패: 차수 {degree}, 누적 반복 {total}회")
        raise RootFinderConvergenceError(iterations=total, degree=degree)

    def _aberth(self, p: np.ndarray, z: np.ndarray):
        degree = p.size - 1
        dp = np.polyder(p)
        abs_p = np.abs(p)
        active = np.ones(degree, dtype=bool)
        z = z.astype(complex)

        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            for it in range(1, self.config.root_max_iterations + 1):
                pz = np.polyval(p, z)
                # 평가 잡음 수준 이하면 더 이상 움직이지 않음
                noise = 4 * degree * _EPS * np.polyval(abs_p, np.abs(z))
                active &= ~(np.abs(pz) <= noise)
                if not active.any():
                    return z, it, True

                diff = z[:, None] - z[None, :]
                np.fill_diagonal(diff, 1.0)
                inv = 1.0 / diff
                np.fill_diagonal(inv, 0.0)
                step = pz / (np.polyval(dp, z) - pz * inv.sum(axis=1))
                step[~active] = 0.0
                if not np.all(np.isfinite(step)):
                    return z, it, False

                z = z - step
                active &= ~(np.abs(step) <= self.config.root_tolerance * np.maximum(1.0, np.abs(z)))
                if not active.any():
                    return z, it, True

        return z, self.config.root_max_iterations, False

    # ==================== 중근 묶기 ====================

    def _group(self, p: np.ndarray, z: np.ndarray) -> List[RootCluster]:
        """단일 연결로 후보를 묶고, 각 묶음을 중근인지 검증"""
        clusters: List[RootCluster] = []
        for group in self._link(z):
            clusters.extend(self._resolve(p, z, group))
        return clusters

    def _link(self, z: np.ndarray) -> List[List[int]]:
        n = z.size
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i in range(n):
            for j in range(i + 1, n):
                scale = max(1.0, abs(z[i]), abs(z[j]))
                if abs(z[i] - z[j]) <= self.config.cluster_search_radius * scale:
                    parent[find(i)] = find(j)

        groups = {}
        for i in range(n):
            groups.setdefault(find(i), []).append(i)
        return list(groups.values())

    def _resolve(self, p: np.ndarray, z: np.ndarray, group: List[int]) -> List[RootCluster]:
        group = list(group)
        dropped: List[int] = []
        while len(group) > 1:
            m = len(group)
            center = self._refine_center(p, complex(np.mean(z[group])), m)
            if center is not None and self._is_multiple(p, center, m):
                result = [RootCluster(center, m)]
                if dropped:
                    result.extend(self._group(p, z[dropped]))
                return result
            # 중심에서 가장 먼 후보를 떼어내고 다시 시도
            mean = np.mean(z[group])
            far = max(group, key=lambda i: abs(z[i] - mean))
            group.remove(far)
            dropped.append(far)

        result = [RootCluster(self._polish(p, complex(z[group[0]])), 1)]
        if dropped:
            if len(dropped) == 1:
                result.append(RootCluster(self._polish(p, complex(z[dropped[0]])), 1))
            else:
                result.extend(self._group(p, z[dropped]))
        return result

    def _refine_center(self, p: np.ndarray, c: complex, m: int):
        """p^{(m-1)} 의 단순근으로 묶음 중심 정제"""
        q = np.polyder(p, m - 1)
        dq = np.polyder(q)
        start = c
        limit = self.config.cluster_search_radius * max(1.0, abs(c))
        for _ in range(50):
            dqc = np.polyval(dq, c)
            if dqc == 0:
                break
            step = np.polyval(q, c) / dqc
            c = c - step
            if abs(step) <= _EPS * max(1.0, abs(c)):
                break
        if not np.isfinite(c) or abs(c - start) > limit:
            return None
        return complex(c)

    def _is_multiple(self, p: np.ndarray, c: complex, m: int) -> bool:
        """j < m 인 모든 도함수의 스케일된 잔차가 허용오차 이하인지"""
        for j in range(m):
            q = np.polyder(p, j) if j else p
            scale = np.polyval(np.abs(q), abs(c))
            if scale == 0:
                continue
            if abs(np.polyval(q, c)) / scale > self.config.multiplicity_tolerance:
                return False
        return True

    def _polish(self, p: np.ndarray, z: complex) -> complex:
        """단순근 Newton 정제 (잔차가 줄어들 때만 채택)"""
        dp = np.polyder(p)
        best, best_res = z, abs(np.polyval(p, z))
        for _ in range(3):
            d = np.polyval(dp, best)
            if d == 0:
                break
            candidate = best - np.polyval(p, best) / d
            res = abs(np.polyval(p, candidate))
            if not res < best_res:
                break
            best, best_res = complex(candidate), res
        return best

    def _clean(self, value: complex) -> complex:
        """허용오차 이하의 허수부 제거"""
        if abs(value.imag) <= self.config.imag_tolerance * max(1.0, abs(value)):
            return complex(value.real, 0.0)
        return complex(value)
