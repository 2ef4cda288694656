"""
공개 정책 기본 클래스
τ_q, 무작위 공개, 지연 공개 정책이 공유하는 상태 전이 인터페이스
"""
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Tuple

from app.models.policy import PolicyStep, SplitOutcome
from app.models.problem import Problem
from app.solver.envelopes import Envelopes


class DisclosurePolicy(ABC):
    """(p, w) 상태 위의 정책"""

    name: str = "policy"

    def __init__(self, problem: Problem, env: Envelopes):
        self.problem = problem
        self.env = env
        self.delta = problem.discount

    @abstractmethod
    def initial_state(self, p: Fraction) -> Tuple[Fraction, Fraction]:
        """사전 믿음 p 에서 시작 상태 (p, w₀)"""
        pass

    @abstractmethod
    def step(self, p: Fraction, w: Fraction) -> PolicyStep:
        """상태 (p, w) 에서 한 기간 분할"""
        pass

    def is_absorbed(self, p: Fraction, w: Fraction) -> bool:
        """더 이상 정보를 공개하지 않는 상태인지"""
        if p == 0 or p == 1:
            return True
        return self.env.in_P(p) and w == self.env.eval(p)

    def stationary_step(self, p: Fraction, w: Fraction) -> PolicyStep:
        """흡수 상태: 같은 상태에 머물며 정적 행동을 반복"""
        outcome = SplitOutcome(
            prob=Fraction(1),
            posterior=p,
            promised_w=w,
            action=self.env.static_action(p),
        )
        return PolicyStep(p=p, w=w, outcomes=[outcome], absorbed=True)

    # ========================================
    # 유틸리티
    # ========================================

    def flow(self, action: str, p: Fraction) -> Tuple[Fraction, Fraction]:
        """(주체 기대 흐름 v(a,p), 대리인 기대 흐름 u(a,p))"""
        return self.problem.v(action, p), self.problem.u(action, p)

    def continuation(self, outcome: SplitOutcome) -> Fraction:
        """(1-δ)u(a, p_s) + δw_s"""
        return (1 - self.delta) * self.problem.u(outcome.action, outcome.posterior) \
            + self.delta * outcome.promised_w
