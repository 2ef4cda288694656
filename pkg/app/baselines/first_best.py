"""
완화 문제 (first best)
상태별 a* 빈도 (α₀, α₁) 를 대리인 참여 제약 하나만으로 선택
"""
import logging
from fractions import Fraction
from typing import Tuple

from app.models.results import BaselineResult

from .base_baseline import BaseBaseline

logger = logging.getLogger(__name__)


class FirstBest(BaseBaseline):
    """
    max  p·α₁·v(a*,1) + (1-p)·α₀·v(a*,0)
    s.t. p·α₁·c₁ + (1-p)·α₀·c₀ ≤ M(p) - m(p),  c_ω = m(ω) - u(a*,ω)

    정규화 후 c₁/v₁ ≥ c₀/v₀ 이므로 ω₀ 쪽을 먼저 채운다.
    """

    name = "first_best"

    def costs(self) -> Tuple[Fraction, Fraction]:
        env = self.env
        zero, one = Fraction(0), Fraction(1)
        return env.eval(zero) - env.eval_u_star(zero), env.eval(one) - env.eval_u_star(one)

    def alphas(self, p: Fraction) -> Tuple[Fraction, Fraction]:
        env = self.env
        c0, c1 = self.costs()
        surplus = env.eval_M(p) - env.eval(p)
        if c0 == 0:
            return Fraction(1), min(Fraction(1), surplus / (p * c1))
        ratio = surplus / ((1 - p) * c0)
        if ratio <= 1:
            return ratio, Fraction(0)
        alpha1 = 1 - (env.eval(p) - env.eval_u_star(p)) / (p * c1)
        return Fraction(1), min(Fraction(1), max(Fraction(0), alpha1))

    def calculate(self) -> BaselineResult:
        p = self.p0
        v0, v1 = self.problem.principal_payoff
        c0, c1 = self.costs()
        alpha0, alpha1 = self.alphas(p)
        value = p * alpha1 * v1 + (1 - p) * alpha0 * v0
        agent = self.env.eval_M(p) - p * alpha1 * c1 - (1 - p) * alpha0 * c0
        logger.info(f"완화 문제: α=({alpha0}, {alpha1}), 값={value}")
        return self.get_result(
            value,
            agent,
            parameters={"alpha0": alpha0, "alpha1": alpha1},
            note="완화 문제 상한 (시뮬레이션 불가)",
        )
