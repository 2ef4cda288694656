"""
일회성 설득 (KG) 정책
첫 기간에만 정보를 공개하고 이후 정적 최선 반응
"""
import logging
from fractions import Fraction
from typing import List, Optional, Tuple

from app.models.policy import PolicyStep, SplitOutcome
from app.models.results import BaselineResult
from app.solver.base_policy import DisclosurePolicy

from .base_baseline import BaseBaseline

logger = logging.getLogger(__name__)

Point = Tuple[Fraction, Fraction]


class KGBaseline(BaseBaseline):
    """
    정적 오목화

    f(p) = v(a*,p)·1{p ∈ P} 의 오목 껍질을 p₀ 에서 평가한다. f 의 후보 꼭짓점은
    {0, p̲, p̄, 1} 뿐이다.
    """

    name = "kg"

    def _points(self) -> List[Point]:
        env = self.env
        xs = {Fraction(0), Fraction(1)}
        if env.P is not None:
            xs |= set(env.P)
        return [(x, env.eval_v_star(x) if env.in_P(x) else Fraction(0)) for x in sorted(xs)]

    def split(self, p: Fraction) -> List[Tuple[Fraction, Fraction]]:
        """
        p 의 최적 분할 [(λ, p_s)]

        분할하지 않는 경우가 최적이면 [(1, p)] (동률이면 분할하지 않음).
        """
        env = self.env
        best_value = env.eval_v_star(p) if env.in_P(p) else Fraction(0)
        best: List[Tuple[Fraction, Fraction]] = [(Fraction(1), p)]
        points = self._points()
        for i, (xa, fa) in enumerate(points):
            for xb, fb in points[i + 1:]:
                if not xa < p < xb:
                    continue
                lam_b = (p - xa) / (xb - xa)
                value = (1 - lam_b) * fa + lam_b * fb
                if value > best_value:
                    best_value = value
                    best = [(1 - lam_b, xa), (lam_b, xb)]
        return best

    def value_at(self, p: Fraction) -> Fraction:
        env = self.env
        return sum(
            (lam * (env.eval_v_star(x) if env.in_P(x) else Fraction(0)) for lam, x in self.split(p)),
            Fraction(0),
        )

    def calculate(self) -> BaselineResult:
        split = self.split(self.p0)
        value = self.value_at(self.p0)
        agent = sum((lam * self.env.eval(x) for lam, x in split), Fraction(0))
        logger.info(f"KG: 값={value}, 분할={[(str(l), str(x)) for l, x in split]}")
        return self.get_result(
            value,
            agent,
            parameters={"split": [{"prob": lam, "posterior": x} for lam, x in split]},
            note=None if self.env.P is not None else "a*가 정적으로 최적인 믿음이 없음",
        )

    def as_policy(self) -> Optional[DisclosurePolicy]:
        return KGPolicy(self)


class KGPolicy(DisclosurePolicy):
    """첫 분할 후 모든 사후 믿음이 흡수 상태 ({0,1} 또는 P)"""

    name = "kg"

    def __init__(self, baseline: KGBaseline):
        super().__init__(baseline.problem, baseline.env)
        self.baseline = baseline

    def initial_state(self, p: Fraction) -> Tuple[Fraction, Fraction]:
        return p, self.env.eval(p)

    def step(self, p: Fraction, w: Fraction) -> PolicyStep:
        self.env.check_state(p, w)
        if self.is_absorbed(p, w):
            return self.stationary_step(p, w)
        split = self.baseline.split(p)
        if len(split) == 1:
            return self.stationary_step(p, w)
        outcomes = [
            SplitOutcome(
                prob=lam,
                posterior=x,
                promised_w=self.env.eval(x),
                action=self.env.static_action(x),
            )
            for lam, x in split
        ]
        return PolicyStep(p=p, w=w, outcomes=outcomes)
