"""
정확한 유리수 선형대수
가우스 소거 (정방 시스템) 와 Bland 규칙 2단계 심플렉스
"""
import logging
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from app.core.exceptions import DegenerateSystem, InfeasibleState

logger = logging.getLogger(__name__)

Matrix = List[List[Fraction]]


def solve_exact(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> List[Fraction]:
    """
    정방 선형계 A x = b 를 Fraction 가우스 소거로 풀이

    Raises:
        DegenerateSystem: 특이 행렬
    """
    n = len(A)
    aug = [[Fraction(v) for v in row] + [Fraction(rhs)] for row, rhs in zip(A, b)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise DegenerateSystem(f"특이 행렬 (열 {col})")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        piv = aug[col][col]
        aug[col] = [v / piv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [v - factor * pv for v, pv in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def null_vector(A: Sequence[Sequence[Fraction]]) -> Optional[List[Fraction]]:
    """A d = 0 의 영이 아닌 해 하나 (열 수 > 계수 일 때), 없으면 None"""
    rows = [[Fraction(v) for v in row] for row in A]
    n_cols = len(rows[0]) if rows else 0
    pivots: List[int] = []
    r = 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        piv = rows[r][c]
        rows[r] = [v / piv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [v - factor * pv for v, pv in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    free = [c for c in range(n_cols) if c not in pivots]
    if not free:
        return None
    f = free[0]
    d = [Fraction(0)] * n_cols
    d[f] = Fraction(1)
    for i, c in enumerate(pivots):
        d[c] = -rows[i][f]
    return d


class ExactSimplex:
    """
    표준형 LP: max c·x  s.t.  A x = b, x ≥ 0 (b ≥ 0 으로 정렬)

    1단계에서 인공변수로 실현 가능 기저를 찾고 2단계에서 목적함수를 최적화.
    진입/이탈 변수는 Bland 규칙 (가장 작은 번호) 으로 선택해 순환을 막는다.
    """

    def __init__(
            self,
            A: Sequence[Sequence[Fraction]],
            b: Sequence[Fraction],
            c: Sequence[Fraction]
    ):
        self.m = len(A)
        self.n = len(c)
        self.A: Matrix = [[Fraction(v) for v in row] for row in A]
        self.b: List[Fraction] = [Fraction(v) for v in b]
        self.c: List[Fraction] = [Fraction(v) for v in c]
        for i in range(self.m):
            if self.b[i] < 0:
                self.A[i] = [-v for v in self.A[i]]
                self.b[i] = -self.b[i]

    def _pivot(self, T: Matrix, basis: List[int], row: int, col: int) -> None:
        piv = T[row][col]
        T[row] = [v / piv for v in T[row]]
        for i in range(len(T)):
            if i != row and T[i][col] != 0:
                factor = T[i][col]
                T[i] = [v - factor * pv for v, pv in zip(T[i], T[row])]
        basis[row] = col

    def _optimize(self, T: Matrix, basis: List[int], allowed: int) -> None:
        """마지막 행이 감소 비용 (최대화: 음수 항목이 개선 방향)"""
        obj = len(T) - 1
        while True:
            col = next((j for j in range(allowed) if T[obj][j] < 0), None)
            if col is None:
                return
            best: Optional[Tuple[Fraction, int, int]] = None
            for i in range(obj):
                if T[i][col] > 0:
                    ratio = T[i][-1] / T[i][col]
                    key = (ratio, basis[i], i)
                    if best is None or key < best:
                        best = key
            if best is None:
                raise InfeasibleState("LP 가 유계가 아닙니다")
            self._pivot(T, basis, best[2], col)

    def solve(self) -> Tuple[Fraction, List[Fraction]]:
        """
        Returns:
            (최적값, x)

        Raises:
            InfeasibleState: 실현 가능 해 없음
        """
        m, n = self.m, self.n
        # 1단계: 인공변수 n..n+m-1
        T: Matrix = []
        for i in range(m):
            row = self.A[i] + [Fraction(1) if k == i else Fraction(0) for k in range(m)]
            T.append(row + [self.b[i]])
        phase1 = [Fraction(0)] * (n + m + 1)
        for i in range(m):
            for j in range(n + m + 1):
                if j < n or j == n + m:
                    phase1[j] -= T[i][j]
        T.append(phase1)
        basis = list(range(n, n + m))
        self._optimize(T, basis, n + m)
        if T[-1][-1] != 0:
            raise InfeasibleState(f"LP 실현 불가 (1단계 잔차 {-T[-1][-1]})")

        # 기저에 남은 인공변수를 원 변수로 교체 (불가하면 중복 제약)
        for i in range(m):
            if basis[i] >= n:
                col = next((j for j in range(n) if T[i][j] != 0), None)
                if col is not None:
                    self._pivot(T, basis, i, col)

        # 2단계
        T = [row[:n] + [row[-1]] for row in T[:-1]]
        objective = [-cj for cj in self.c] + [Fraction(0)]
        for i, j in enumerate(basis):
            if j < n and objective[j] != 0:
                factor = objective[j]
                objective = [v - factor * pv for v, pv in zip(objective, T[i])]
        T.append(objective)
        self._optimize(T, basis, n)

        x = [Fraction(0)] * n
        for i, j in enumerate(basis):
            if j < n:
                x[j] = T[i][-1]
        value = sum((cj * xj for cj, xj in zip(self.c, x)), Fraction(0))
        logger.debug(f"정확 LP 해: 값={value}, 지지점 {sum(1 for v in x if v)}개")
        return value, x
