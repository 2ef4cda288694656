"""
격자 오라클
이산화된 (p, w) 격자 위 벨만 연산자 T, 가치 반복, 해석해와의 비교
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from app.config.config import get_settings
from app.core.exceptions import HullFailure, InfeasibleState, MaxItersExceeded
from app.models.problem import Problem
from app.models.results import ConvergenceReport, OracleComparison, SupportPoint
from app.solver.envelopes import Envelopes
from app.solver.simplex import ExactSimplex, null_vector

logger = logging.getLogger(__name__)

_NEGATIVE_SLACK = 1e-8
_MONOTONE_SLACK = 1e-9


@dataclass
class Grid:
    """
    V[i][j] 표

    p_i = i/N_p, w_ij = m(p_i) + (j/N_w)(M(p_i) - m(p_i)).
    """

    n_p: int
    n_w: int
    p: np.ndarray
    w: np.ndarray
    values: np.ndarray
    deltas: List[float] = field(default_factory=list)

    def column(self, i: int) -> Tuple[np.ndarray, np.ndarray]:
        return self.w[i], self.values[i]


@dataclass
class Candidates:
    """분할 후보 (사후 믿음, 약속, 행동) 와 LP 계수 k, g"""

    index: np.ndarray          # 사후 믿음 격자 번호 i
    p: np.ndarray
    promised: np.ndarray
    k: np.ndarray              # (1-δ)u(a, p) + δw
    g: np.ndarray              # (1-δ)v(a, p) + δV
    target: np.ndarray         # a* 여부


class GridOracle:
    """
    벨만 연산자 T 의 격자 근사

    각 상태 (p, w) 의 LP  max Σλg  s.t. Σλ = 1, Σλp = p, Σλk ≥ w
    값은 (p, k, g) 후보 점들의 상부 볼록 껍질 (k 방향 자유 처분 포함) 을 (p, w) 에서
    평가한 값과 같다. 후보 행동은 a* 와 정적 최선 반응으로 제한한다.
    """

    def __init__(
            self,
            problem: Problem,
            env: Envelopes,
            n_p: Optional[int] = None,
            n_w: Optional[int] = None,
            threads: Optional[int] = None,
            chunk_size: Optional[int] = None
    ):
        settings = get_settings()
        self.problem = problem
        self.env = env
        self.n_p = n_p or settings.ORACLE_NP
        self.n_w = n_w or settings.ORACLE_NW
        self.threads = threads or settings.THREADS
        self.chunk_size = chunk_size or settings.ORACLE_CHUNK_SIZE
        self.delta = float(problem.discount)

        ps = [Fraction(i, self.n_p) for i in range(self.n_p + 1)]
        self.p_exact = ps
        self.p = np.array([float(x) for x in ps])
        self.m = np.array([float(env.eval(x)) for x in ps])
        self.M = np.array([float(env.eval_M(x)) for x in ps])
        self.u_star = np.array([float(env.eval_u_star(x)) for x in ps])
        self.v_star = np.array([float(env.eval_v_star(x)) for x in ps])
        self.w_bold = np.array([float(env.bold_w(problem.discount, x)) for x in ps])
        self.best_reply = [env.best_reply(x) for x in ps]

        fractions = np.linspace(0.0, 1.0, self.n_w + 1)
        self.w = self.m[:, None] + fractions[None, :] * (self.M - self.m)[:, None]

    # ========================================
    # 격자
    # ========================================

    def empty_grid(self) -> Grid:
        """V ≡ 0"""
        return Grid(
            n_p=self.n_p,
            n_w=self.n_w,
            p=self.p,
            w=self.w,
            values=np.zeros_like(self.w),
        )

    def candidates(self, values: np.ndarray) -> Candidates:
        """현재 V 에서 후보 점 구성"""
        d = self.delta
        n_rows, n_cols = self.w.shape
        idx = np.repeat(np.arange(n_rows), n_cols)
        p = self.p[idx]
        w = self.w.reshape(-1)
        v = values.reshape(-1)

        # 최선 반응: IC 항상 성립, 주체 흐름 0
        k_br = (1 - d) * self.m[idx] + d * w
        g_br = d * v

        # a*: w ≥ 𝐰(p) 일 때만 IC
        ic = w >= self.w_bold[idx] - 1e-12
        k_star = (1 - d) * self.u_star[idx] + d * w
        g_star = (1 - d) * self.v_star[idx] + d * v

        # 무차별 약속 𝐰(p_i) 에서의 a* 후보 (열 안 선형 보간)
        bold_idx, bold_w, bold_v = [], [], []
        for i in range(n_rows):
            span = self.M[i] - self.m[i]
            if span <= 0:
                continue
            wb = self.w_bold[i]
            if self.m[i] <= wb <= self.M[i]:
                bold_idx.append(i)
                bold_w.append(wb)
                bold_v.append(np.interp(wb, self.w[i], values[i]))
        bold_idx = np.array(bold_idx, dtype=int)
        bold_w = np.array(bold_w)
        bold_v = np.array(bold_v)
        k_bold = (1 - d) * self.u_star[bold_idx] + d * bold_w
        g_bold = (1 - d) * self.v_star[bold_idx] + d * bold_v

        index = np.concatenate([idx, idx[ic], bold_idx])
        promised = np.concatenate([w, w[ic], bold_w])
        k = np.concatenate([k_br, k_star[ic], k_bold])
        g = np.concatenate([g_br, g_star[ic], g_bold])
        target = np.concatenate([
            np.zeros(idx.size, dtype=bool),
            np.ones(int(ic.sum()), dtype=bool),
            np.ones(bold_idx.size, dtype=bool),
        ])

        # k 방향 자유 처분: 같은 (p, g) 를 k 하한으로 복사
        k_floor = k.min() - 1.0
        return Candidates(
            index=np.concatenate([index, index]),
            p=np.concatenate([self.p[index], self.p[index]]),
            promised=np.concatenate([promised, promised]),
            k=np.concatenate([k, np.full(k.size, k_floor)]),
            g=np.concatenate([g, g]),
            target=np.concatenate([target, target]),
        )

    # ========================================
    # 상부 껍질
    # ========================================

    def _hull(self, cands: Candidates) -> Tuple[np.ndarray, np.ndarray]:
        """
        상부 면의 평면 계수 (g = a·p + b·k + c) 와 상부 꼭짓점 번호

        Raises:
            HullFailure: qhull 이 조이글(QJ) 재시도까지 실패
        """
        points = np.column_stack([cands.p, cands.k, cands.g])
        try:
            hull = ConvexHull(points)
        except QhullError as e:
            logger.warning(f"볼록 껍질 실패, 조이글 입력으로 재시도: {e}")
            try:
                hull = ConvexHull(points, qhull_options="QJ")
            except QhullError as e2:
                raise HullFailure(f"볼록 껍질 계산 실패: {e2}")

        eq = hull.equations
        upper = eq[:, 2] > 1e-12
        if not upper.any():
            raise HullFailure("상부 면이 없습니다")
        eq = eq[upper]
        planes = np.column_stack([-eq[:, 0] / eq[:, 2], -eq[:, 1] / eq[:, 2], -eq[:, 3] / eq[:, 2]])
        vertices = np.unique(hull.simplices[upper].reshape(-1))
        return planes, vertices

    def _envelope(self, planes: np.ndarray, query: np.ndarray) -> np.ndarray:
        """query (N, 2) 의 (p, w) 에서 min_facet (a·p + b·w + c)"""
        def evaluate(start: int) -> np.ndarray:
            block = query[start:start + self.chunk_size]
            vals = block @ planes[:, :2].T + planes[:, 2][None, :]
            return vals.min(axis=1)

        starts = range(0, query.shape[0], self.chunk_size)
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            parts = list(pool.map(evaluate, starts))
        return np.concatenate(parts)

    # ========================================
    # 벨만 연산자
    # ========================================

    def bellman_apply(self, grid: Grid) -> Grid:
        """
        T(V) 를 모든 격자 상태에서 평가

        Raises:
            InfeasibleState: 약속 이행을 만족하는 후보가 없는 상태
        """
        cands = self.candidates(grid.values)
        planes, _ = self._hull(cands)
        query = np.column_stack([np.repeat(self.p, self.n_w + 1), self.w.reshape(-1)])
        values = self._envelope(planes, query)
        if not np.all(np.isfinite(values)) or values.min() < -_NEGATIVE_SLACK:
            bad = int(np.argmin(np.where(np.isfinite(values), values, -np.inf)))
            raise InfeasibleState(
                "약속 이행을 만족하는 후보가 없습니다 (격자가 M(p) 근처에서 너무 거칠 수 있음)",
                p=float(query[bad, 0]),
                w=float(query[bad, 1]),
            )
        values = np.maximum(values, 0.0).reshape(self.w.shape)
        return Grid(
            n_p=grid.n_p,
            n_w=grid.n_w,
            p=grid.p,
            w=grid.w,
            values=values,
            deltas=list(grid.deltas),
        )

    def value_iterate(
            self,
            grid: Optional[Grid] = None,
            tol: Optional[float] = None,
            max_iters: Optional[int] = None
    ) -> Tuple[Grid, ConvergenceReport]:
        """
        sup-norm 변화가 tol 미만이 될 때까지 T 를 반복

        Raises:
            MaxItersExceeded: max_iters 안에 수렴하지 않음
        """
        settings = get_settings()
        tol = tol if tol is not None else settings.ORACLE_TOL
        max_iters = max_iters or settings.ORACLE_MAX_ITERS
        grid = grid or self.empty_grid()

        iterations = 0
        monotone = True
        deltas: List[float] = []
        while True:
            new = self.bellman_apply(grid)
            diff = new.values - grid.values
            change = float(np.abs(diff).max())
            if diff.min() < -_MONOTONE_SLACK:
                monotone = False
            if change < tol:
                grid = new
                break
            iterations += 1
            deltas.append(change)
            grid = new
            logger.debug(f"가치 반복 {iterations}: Δ={change:.3e}")
            if iterations >= max_iters:
                raise MaxItersExceeded(
                    f"{max_iters} 회 반복 안에 수렴하지 않았습니다 (Δ={change:.3e})",
                    iterations=iterations,
                )

        grid.deltas = deltas
        modulus = None
        if len(deltas) >= 3:
            ratios = [b / a for a, b in zip(deltas, deltas[1:]) if a > 0]
            if ratios:
                modulus = float(np.median(ratios[-5:]))
        report = ConvergenceReport(
            iterations=iterations,
            converged=True,
            tol=tol,
            deltas=deltas,
            observed_modulus=modulus,
            monotone=monotone,
        )
        logger.info(
            f"가치 반복 수렴: {iterations} 회, 관측 수축률={modulus}, 단조={monotone} "
            f"(N_p={self.n_p}, N_w={self.n_w})"
        )
        return grid, report

    def value_at(self, grid: Grid, p: Fraction, w: Fraction) -> float:
        """격자 밖 상태 (p, w) 에서 T(V)(p, w)"""
        planes, _ = self._hull(self.candidates(grid.values))
        query = np.array([[float(p), float(w)]])
        value = float(self._envelope(planes, query)[0])
        if not np.isfinite(value) or value < -_NEGATIVE_SLACK:
            raise InfeasibleState(f"상태 ({p}, {w}) 에서 실현 가능한 분할이 없습니다", p=p, w=w)
        return max(value, 0.0)

    # ========================================
    # 지지점 추출
    # ========================================

    def optimal_support(self, grid: Grid, p: Fraction, w: Fraction) -> List[SupportPoint]:
        """
        (p, w) 에서 T(V) 의 최적 분할

        상부 껍질 꼭짓점 위에서 정확 유리수 LP 를 풀고 지지점을 3개 이하로 줄인다.
        """
        cands = self.candidates(grid.values)
        _, vertices = self._hull(cands)

        def exact(x: float) -> Fraction:
            return Fraction(x).limit_denominator(10 ** 12)

        cols_p = [self.p_exact[int(cands.index[c])] for c in vertices]
        cols_k = [exact(cands.k[c]) for c in vertices]
        cols_g = [exact(cands.g[c]) for c in vertices]
        n = len(vertices)

        # 여유 변수 s: Σλk - s = w
        A = [
            [Fraction(1)] * n + [Fraction(0)],
            cols_p + [Fraction(0)],
            cols_k + [Fraction(-1)],
        ]
        b = [Fraction(1), Fraction(p), Fraction(w)]
        c = cols_g + [Fraction(0)]
        value, x = ExactSimplex(A, b, c).solve()

        weights = caratheodory_support(x[:n], list(zip(cols_p, cols_k)), cols_g)
        support = []
        for weight, col in zip(weights, vertices):
            if weight == 0:
                continue
            i = int(cands.index[col])
            action = self.env.target if cands.target[col] else self.best_reply[i]
            support.append(SupportPoint(
                weight=weight,
                posterior=float(self.p[i]),
                promised_w=float(cands.promised[col]),
                action=action,
                branch_value=float(cands.g[col]),
            ))
        logger.debug(f"오라클 최적 분할 ({p}, {w}): 값≈{float(value):.6f}, 지지점 {len(support)}개")
        return support


# ============================================================
# 카라테오도리 축소
# ============================================================

def caratheodory_support(
        weights: Sequence[Fraction],
        points: Sequence[Tuple[Fraction, Fraction]],
        values: Sequence[Fraction]
) -> List[Fraction]:
    """
    [1; p; k] 제약을 유지하며 양의 가중치를 3개 이하로 줄인다

    영공간 방향 d 로 이동하되 목적 Σλg 가 줄지 않는 쪽을 택하고, 어떤 가중치가
    0 이 될 때까지 움직인다. 입력이 최적이면 목적값은 그대로다.
    """
    lam = [Fraction(x) for x in weights]
    while True:
        support = [i for i, x in enumerate(lam) if x > 0]
        if len(support) <= 3:
            return lam
        rows = [
            [Fraction(1) for _ in support],
            [points[i][0] for i in support],
            [points[i][1] for i in support],
        ]
        d = null_vector(rows)
        if d is None:
            return lam
        gain = sum((values[i] * di for i, di in zip(support, d)), Fraction(0))
        if gain < 0:
            d = [-di for di in d]
        steps = [lam[i] / -di for i, di in zip(support, d) if di < 0]
        t = min(steps)
        # 정확 연산이므로 최소 비율 항은 정확히 0 이 된다
        for i, di in zip(support, d):
            lam[i] += t * di


# ============================================================
# 해석해 비교
# ============================================================

def compare_with_exact(
        problem: Problem,
        env: Envelopes,
        exact_value: Fraction,
        n_p: Optional[int] = None,
        n_w: Optional[int] = None,
        tol: Optional[float] = None,
        max_iters: Optional[int] = None,
        refine: bool = True,
        budget: float = 0.01
) -> Tuple[OracleComparison, Grid]:
    """
    (p₀, m(p₀)) 에서 격자 고정점과 해석해 V_{q*} 비교

    refine 이면 해상도를 두 배로 올려 격차가 줄어드는지 확인한다.
    """
    p0 = problem.prior
    w0 = env.eval(p0)
    oracle = GridOracle(problem, env, n_p, n_w)
    grid, report = oracle.value_iterate(tol=tol, max_iters=max_iters)
    grid_value = oracle.value_at(grid, p0, w0)
    gap = abs(grid_value - float(exact_value))

    refined_gap = None
    if refine:
        fine = GridOracle(problem, env, oracle.n_p * 2, oracle.n_w * 2)
        fine_grid, _ = fine.value_iterate(tol=tol, max_iters=max_iters)
        refined_gap = abs(fine.value_at(fine_grid, p0, w0) - float(exact_value))

    within = gap <= budget
    if refined_gap is not None:
        within = within and refined_gap <= max(0.6 * gap, 1e-4)
    comparison = OracleComparison(
        n_p=oracle.n_p,
        n_w=oracle.n_w,
        grid_value=grid_value,
        exact_value=exact_value,
        gap=gap,
        refined_gap=refined_gap,
        budget=budget,
        within_budget=within,
        convergence=report,
    )
    logger.info(f"오라클 비교: 격자={grid_value:.6f}, 해석해={float(exact_value):.6f}, 격차={gap:.2e}")
    return comparison, grid
