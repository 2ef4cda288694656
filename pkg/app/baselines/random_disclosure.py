"""
무작위 완전 공개 정책
매 기간 a*를 추천하고 확률 α 로 상태를 완전히 공개
"""
import logging
from fractions import Fraction
from typing import Optional, Tuple

from app.core.exceptions import OutsideW
from app.models.policy import PolicyStep, SplitOutcome
from app.models.results import BaselineResult
from app.solver.base_policy import DisclosurePolicy

from .base_baseline import BaseBaseline

logger = logging.getLogger(__name__)


class RandomDisclosure(BaseBaseline):
    """
    α* = (𝐰(p) - m(p)) / (M(p) - m(p))

    V = [(1-δ)v(a*,p) + δα(1-p)v(a*,0)·1{0 ∈ P}] / (1 - δ + δα)
    """

    name = "random"

    def alpha(self, p: Optional[Fraction] = None) -> Fraction:
        p = self.p0 if p is None else p
        env = self.env
        return (env.bold_w(self.delta, p) - env.eval(p)) / (env.eval_M(p) - env.eval(p))

    def calculate(self) -> BaselineResult:
        self.require_q1()
        p, d = self.p0, self.delta
        alpha = self.alpha()
        v = self.env.eval_v_star(p)
        value = ((1 - d) * v + d * alpha * (1 - p) * self.v0_if_optimal_at_zero()) / (1 - d + d * alpha)
        logger.info(f"무작위 공개: α={alpha}, 값={value}")
        return self.get_result(
            value,
            self.env.eval(p),
            parameters={"alpha": alpha, "promise": self.env.bold_w(d, p)},
        )

    def as_policy(self) -> Optional[DisclosurePolicy]:
        return RandomDisclosurePolicy(self)


class RandomDisclosurePolicy(DisclosurePolicy):
    """상태 w ∈ {m(p), 𝐰(p)} 두 가지"""

    name = "random"

    def __init__(self, baseline: RandomDisclosure):
        super().__init__(baseline.problem, baseline.env)
        self.baseline = baseline

    def initial_state(self, p: Fraction) -> Tuple[Fraction, Fraction]:
        return p, self.env.eval(p)

    def step(self, p: Fraction, w: Fraction) -> PolicyStep:
        env = self.env
        env.check_state(p, w)
        if self.is_absorbed(p, w):
            return self.stationary_step(p, w)

        w_bold = env.bold_w(self.delta, p)
        if w == env.eval(p):
            outcomes = [SplitOutcome(prob=Fraction(1), posterior=p, promised_w=w_bold, action=env.target)]
        elif w == w_bold:
            alpha = self.baseline.alpha(p)
            outcomes = [
                SplitOutcome(prob=1 - alpha, posterior=p, promised_w=w_bold, action=env.target),
                SplitOutcome(
                    prob=alpha * (1 - p),
                    posterior=Fraction(0),
                    promised_w=env.eval(Fraction(0)),
                    action=env.static_action(Fraction(0)),
                ),
                SplitOutcome(
                    prob=alpha * p,
                    posterior=Fraction(1),
                    promised_w=env.eval(Fraction(1)),
                    action=env.static_action(Fraction(1)),
                ),
            ]
        else:
            raise OutsideW(f"무작위 공개 정책의 상태가 아닙니다: ({p}, {w})", p=p, w=w)
        return PolicyStep(p=p, w=w, outcomes=[o for o in outcomes if o.prob != 0])
