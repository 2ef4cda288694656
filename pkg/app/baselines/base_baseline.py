"""
기준 정책 기본 클래스
"""
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Any, Dict, Optional

from app.core.exceptions import PriorOutsideQ1
from app.models.problem import Problem
from app.models.results import BaselineResult
from app.solver.base_policy import DisclosurePolicy
from app.solver.envelopes import Envelopes, build_envelopes
from app.solver.thresholds import compute_Q1


class BaseBaseline(ABC):
    """비교 정책 기본 클래스 (정규화된 문제 기준)"""

    name: str = "baseline"

    def __init__(self, problem: Problem, env: Optional[Envelopes] = None):
        self.problem = problem
        self.env = env or build_envelopes(problem)
        self.delta = problem.discount
        self.p0 = problem.prior

    @abstractmethod
    def calculate(self) -> BaselineResult:
        """
        기준 정책의 (주체 값, 대리인 값, 파라미터)

        Returns:
            BaselineResult
        """
        pass

    def as_policy(self) -> Optional[DisclosurePolicy]:
        """시뮬레이션 가능한 정책 (없으면 None)"""
        return None

    # ========================================
    # 공통 유틸리티
    # ========================================

    def require_q1(self) -> None:
        """
        p₀ ∈ Q¹ 확인

        Raises:
            PriorOutsideQ1: 정책이 실현 불가능
        """
        q1 = compute_Q1(self.env, self.delta)
        if q1 is None or not q1[0] <= self.p0 <= q1[1]:
            raise PriorOutsideQ1(
                f"{self.name}: p₀={self.p0} 가 Q¹ 밖이라 정책이 실현 불가능합니다",
                prior=self.p0,
                q1=q1,
            )

    def v0_if_optimal_at_zero(self) -> Fraction:
        """ω₀ 가 드러난 뒤의 주체 흐름: a*가 p=0 에서 최적이면 v(a*,ω₀), 아니면 0"""
        if self.env.in_P(Fraction(0)):
            return self.problem.principal_payoff[0]
        return Fraction(0)

    def get_result(
            self,
            principal_value: Fraction,
            agent_value: Fraction,
            parameters: Optional[Dict[str, Any]] = None,
            note: Optional[str] = None
    ) -> BaselineResult:
        return BaselineResult(
            policy=self.name,
            principal_value=principal_value,
            agent_value=agent_value,
            parameters=parameters or {},
            note=note,
        )
