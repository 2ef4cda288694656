"""
솔버 퍼사드
문제 준비 → 포락선 → 사다리 → q* → τ_{q*} 와 V_{q*}
"""
import logging
from fractions import Fraction
from typing import Optional

from app.core.exceptions import EmptyQ1
from app.models.problem import Problem
from app.models.results import SolveResult, VerificationReport
from app.solver.envelopes import Envelopes, build_envelopes
from app.solver.policy import PolicyTau
from app.solver.problem import prepare
from app.solver.thresholds import ThresholdLadder, compute_Q1, compute_ladder
from app.solver.value import ValueFunction, compute_q_star
from app.solver.verification import verify_optimality

logger = logging.getLogger(__name__)


class PersuasionSolver:
    """
    한 문제 인스턴스의 해법

    모든 믿음과 구간은 정규화된 라벨 기준이다 (relabeled 이면 원래 라벨의 1-p).
    """

    def __init__(self, problem: Problem, normalized: bool = False):
        self.problem = problem if normalized else prepare(problem)
        self.env: Envelopes = build_envelopes(self.problem)
        self.ladder: Optional[ThresholdLadder] = None
        self.q_star: Optional[Fraction] = None
        self._empty_q1 = False
        self._values = {}

        if self.problem.trivial:
            logger.info("trivial 인스턴스: 사다리 계산 생략")
            return
        try:
            self.ladder = compute_ladder(self.env, self.problem.discount)
        except EmptyQ1:
            self._empty_q1 = True
            logger.warning("Q¹ = ∅: a*를 유도할 수 없어 모든 정책의 값이 0 입니다")
            return
        self.q_star = compute_q_star(self.problem, self.env, self.ladder)

    @property
    def solvable(self) -> bool:
        """τ_q 정책족이 정의되는지 (trivial 도 Q¹ 공집합도 아님)"""
        return self.ladder is not None

    def _require_ladder(self) -> ThresholdLadder:
        if self.ladder is None:
            raise EmptyQ1("τ_q 정책족이 정의되지 않는 인스턴스입니다")
        return self.ladder

    # ========================================
    # 정책 / 가치
    # ========================================

    def policy(self, q: Optional[Fraction] = None) -> PolicyTau:
        """τ_q (기본 q*)"""
        ladder = self._require_ladder()
        return PolicyTau(self.problem, self.env, ladder, self.q_star if q is None else q)

    def value_function(self, q: Optional[Fraction] = None) -> ValueFunction:
        """V_q (q 별로 캐시)"""
        ladder = self._require_ladder()
        q = self.q_star if q is None else Fraction(q)
        if q not in self._values:
            self._values[q] = ValueFunction(self.problem, self.env, ladder, q)
        return self._values[q]

    def value(self, p: Fraction, w: Optional[Fraction] = None, q: Optional[Fraction] = None) -> Fraction:
        """V_q(p, w) (w 생략 시 m(p)), trivial/Q¹ 공집합 인스턴스도 처리"""
        p = Fraction(p)
        w = self.env.eval(p) if w is None else Fraction(w)
        if self.problem.trivial:
            self.env.check_state(p, w)
            return self.env.eval_v_star(p)
        if self._empty_q1:
            self.env.check_state(p, w)
            return Fraction(0)
        return self.value_function(q).value(p, w)

    def t_delta(self, p: Fraction) -> Optional[int]:
        if not self.solvable:
            return None
        return self.policy().t_delta(Fraction(p))

    def verify(
            self,
            q: Optional[Fraction] = None,
            grid_p: Optional[int] = None,
            grid_w: Optional[int] = None,
            tol: Fraction = Fraction(0)
    ) -> VerificationReport:
        ladder = self._require_ladder()
        q = self.q_star if q is None else Fraction(q)
        return verify_optimality(self.problem, self.env, ladder, q, grid_p, grid_w, tol)

    # ========================================
    # 요약
    # ========================================

    def solve(self) -> SolveResult:
        """사전 믿음 p₀ 에서의 해법 요약"""
        problem = self.problem
        p0 = problem.prior
        m0 = self.env.eval(p0)

        if problem.trivial:
            return SolveResult(
                prior=p0,
                relabeled=problem.relabeled,
                trivial=True,
                q1=compute_Q1(self.env, problem.discount),
                q_star=None,
                q_inf=self.env.P,
                static_interval=self.env.P,
                k_star=None,
                value=self.env.eval_v_star(p0),
                agent_value=m0,
                t_delta=None,
                notice="a*가 모든 믿음에서 정적 최적: 정보 공개 없이 a*를 계속 추천 (상수 정책)",
            )
        if self._empty_q1:
            return SolveResult(
                prior=p0,
                relabeled=problem.relabeled,
                trivial=False,
                q1=None,
                q_star=None,
                q_inf=None,
                static_interval=self.env.P,
                k_star=None,
                value=Fraction(0),
                agent_value=m0,
                t_delta=None,
                notice="Q¹ = ∅: 모든 정책이 최적 (주체 값 0)",
            )

        ladder = self.ladder
        value = self.value(p0)
        t_delta = self.t_delta(p0)
        result = SolveResult(
            prior=p0,
            relabeled=problem.relabeled,
            trivial=False,
            q1=ladder.q1,
            q_star=self.q_star,
            q_inf=ladder.q_inf,
            static_interval=self.env.P,
            k_star=ladder.k_star,
            value=value,
            agent_value=self.value_function().agent_value(p0),
            t_delta=t_delta,
        )
        logger.info(f"해법: q*={self.q_star}, V={value}, T_δ={t_delta}")
        return result
