"""
최적성 검증
유리수 격자에서 V_q 의 중점 오목성, w 단조 감소, Q¹ 부등식을 확인
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from app.config.config import get_settings
from app.core.exceptions import PersuasionError
from app.models.problem import Problem
from app.models.results import CheckResult, VerificationReport
from app.solver.envelopes import Envelopes
from app.solver.thresholds import ThresholdLadder
from app.solver.value import ValueFunction

logger = logging.getLogger(__name__)

State = Tuple[Fraction, Fraction]


class _Tally:
    """검사 항목별 위반 집계"""

    def __init__(self, name: str):
        self.name = name
        self.checked = 0
        self.violations = 0
        self.worst = Fraction(0)
        self.location: Optional[str] = None

    def record(self, gap: Fraction, tol: Fraction, location: str) -> None:
        self.checked += 1
        if gap > tol:
            self.violations += 1
            if gap > self.worst:
                self.worst = gap
                self.location = location

    def merge(self, other: "_Tally") -> None:
        self.checked += other.checked
        self.violations += other.violations
        if other.worst > self.worst:
            self.worst = other.worst
            self.location = other.location

    def result(self) -> CheckResult:
        return CheckResult(
            name=self.name,
            passed=self.violations == 0,
            checked=self.checked,
            violations=self.violations,
            worst_violation=self.worst,
            location=self.location,
        )


class OptimalityVerifier:
    """
    최적성 조건 검사기 (오목성, Q¹ 부등식, w 단조성)

    상태 격자: p_i = i/N_p, w_ij = m(p_i) + (j/N_w)(M(p_i) - m(p_i)).
    """

    def __init__(
            self,
            problem: Problem,
            env: Envelopes,
            ladder: ThresholdLadder,
            q: Fraction,
            grid_p: Optional[int] = None,
            grid_w: Optional[int] = None,
            tol: Fraction = Fraction(0),
            threads: Optional[int] = None
    ):
        settings = get_settings()
        self.problem = problem
        self.env = env
        self.ladder = ladder
        self.q = Fraction(q)
        self.grid_p = grid_p or settings.VERIFY_GRID_P
        self.grid_w = grid_w or settings.VERIFY_GRID_W
        self.tol = Fraction(tol)
        self.threads = threads or settings.THREADS
        self.delta = problem.discount
        self.vf: Optional[ValueFunction] = None
        self._values: Dict[State, Fraction] = {}

    def _state(self, i: int, j: int) -> State:
        p = Fraction(i, self.grid_p)
        lo, hi = self.env.eval(p), self.env.eval_M(p)
        return p, lo + Fraction(j, self.grid_w) * (hi - lo)

    def _value(self, state: State) -> Fraction:
        v = self._values.get(state)
        if v is None:
            v = self.vf.value(*state)
            self._values[state] = v
        return v

    # ========================================
    # 열 단위 검사
    # ========================================

    def _check_column(self, i: int) -> Dict[str, _Tally]:
        tallies = {name: _Tally(name) for name in ("concavity", "monotone_w", "q1_inequality")}
        n_w = self.grid_w
        column = [self._state(i, j) for j in range(n_w + 1)]
        values = [self._value(s) for s in column]

        for j in range(n_w):
            gap = values[j + 1] - values[j]
            tallies["monotone_w"].record(gap, self.tol, f"p={column[j][0]}, w={column[j + 1][1]}")

        # w 방향 중점
        for j in range(1, n_w):
            gap = (values[j - 1] + values[j + 1]) / 2 - values[j]
            tallies["concavity"].record(gap, self.tol, f"w-midpoint ({column[j][0]}, {column[j][1]})")

        # p 방향과 대각선 중점 (두 끝점의 평균 상태는 𝒲 안에 있다)
        if 0 < i < self.grid_p:
            left = [self._state(i - 1, j) for j in range(n_w + 1)]
            right = [self._state(i + 1, j) for j in range(n_w + 1)]
            for j in range(n_w + 1):
                for jr in {j, j + 1, j - 1}:
                    if not 0 <= jr <= n_w:
                        continue
                    a, b = left[j], right[jr]
                    mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
                    if not self.env.in_W(*mid):
                        continue
                    gap = (self._value(a) + self._value(b)) / 2 - self.vf.value(*mid)
                    tallies["concavity"].record(gap, self.tol, f"midpoint ({mid[0]}, {mid[1]})")

        p = column[0][0]
        q_low, q_high = self.ladder.q1
        if q_low <= p <= q_high:
            w_bold = self.env.bold_w(self.delta, p)
            rhs = (1 - self.delta) * self.env.eval_v_star(p) + self.delta * self.vf.value(p, w_bold)
            tallies["q1_inequality"].record(rhs - values[0], self.tol, f"p={p}")
        return tallies

    def run(self) -> VerificationReport:
        q_low, q_high = self.ladder.q1
        if not q_low <= self.q <= q_high:
            msg = f"q={self.q} 가 Q¹=[{q_low}, {q_high}] 밖입니다"
            logger.warning(f"검증 전제 위반: {msg}")
            return VerificationReport(
                q=self.q, grid_p=self.grid_p, grid_w=self.grid_w, passed=False, error=msg
            )

        try:
            self.vf = ValueFunction(self.problem, self.env, self.ladder, self.q)
        except PersuasionError as e:
            return VerificationReport(
                q=self.q, grid_p=self.grid_p, grid_w=self.grid_w, passed=False, error=e.message
            )

        logger.info(f"최적성 검증 시작: q={self.q}, 격자 {self.grid_p + 1}×{self.grid_w + 1}")
        totals = {name: _Tally(name) for name in ("concavity", "monotone_w", "q1_inequality")}
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            for tallies in pool.map(self._check_column, range(self.grid_p + 1)):
                for name, tally in tallies.items():
                    totals[name].merge(tally)

        checks: List[CheckResult] = [t.result() for t in totals.values()]
        passed = all(c.passed for c in checks)
        logger.info(f"최적성 검증 {'통과' if passed else '실패'}: " + ", ".join(
            f"{c.name}={c.violations}/{c.checked}" for c in checks
        ))
        return VerificationReport(
            q=self.q, grid_p=self.grid_p, grid_w=self.grid_w, passed=passed, checks=checks
        )


def verify_optimality(
        problem: Problem,
        env: Envelopes,
        ladder: ThresholdLadder,
        q: Fraction,
        grid_p: Optional[int] = None,
        grid_w: Optional[int] = None,
        tol: Fraction = Fraction(0)
) -> VerificationReport:
    """V_q 가 최적성 조건을 만족하는지 격자에서 검사 (실패는 보고서 내용)"""
    return OptimalityVerifier(problem, env, ladder, q, grid_p, grid_w, tol).run()
