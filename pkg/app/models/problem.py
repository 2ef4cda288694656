"""
설득 문제 인스턴스 모델
보수 표, 목표 행동, 할인율, 사전 믿음
"""
from fractions import Fraction
from typing import Dict, List, Tuple

from pydantic import BaseModel, ConfigDict

from app.models.base import ExactScalar


class Problem(BaseModel):
    """
    이진 상태 {ω₀, ω₁} 반복 설득 문제

    믿음 p는 항상 P(ω₁). 대리인 보수 u(a, ω), 주체 보수는 목표 행동 a*에서만
    양수 v(a*, ω)이고 나머지 행동에서는 0 (저장하지 않음).
    """

    model_config = ConfigDict(frozen=True)

    actions: List[str]
    target_action: str
    agent_payoff: Dict[str, Tuple[ExactScalar, ExactScalar]]
    principal_payoff: Tuple[ExactScalar, ExactScalar]
    discount: ExactScalar
    prior: ExactScalar

    # 정규화/검증 결과 태그
    relabeled: bool = False
    trivial: bool = False

    def u(self, action: str, p: Fraction) -> Fraction:
        """대리인 기대 보수 u(a, p) = (1-p)u(a,ω₀) + p·u(a,ω₁)"""
        u0, u1 = self.agent_payoff[action]
        return (1 - p) * u0 + p * u1

    def u_star(self, p: Fraction) -> Fraction:
        """u(a*, p)"""
        return self.u(self.target_action, p)

    def v_star(self, p: Fraction) -> Fraction:
        """v(a*, p)"""
        v0, v1 = self.principal_payoff
        return (1 - p) * v0 + p * v1

    def v(self, action: str, p: Fraction) -> Fraction:
        """주체 기대 보수 (a ≠ a* 이면 0)"""
        if action != self.target_action:
            return Fraction(0)
        return self.v_star(p)

    def v_state(self, action: str, omega: int) -> Fraction:
        """상태 ω에서 실현된 주체 보수"""
        if action != self.target_action:
            return Fraction(0)
        return self.principal_payoff[omega]

    def u_state(self, action: str, omega: int) -> Fraction:
        """상태 ω에서 실현된 대리인 보수"""
        return self.agent_payoff[action][omega]

    @property
    def target_index(self) -> int:
        return self.actions.index(self.target_action)

    def columns(self) -> Tuple[Dict[str, Fraction], Dict[str, Fraction]]:
        """상태별 보수 열 (ω₀ 열, ω₁ 열)"""
        col0 = {a: pay[0] for a, pay in self.agent_payoff.items()}
        col1 = {a: pay[1] for a, pay in self.agent_payoff.items()}
        return col0, col1
