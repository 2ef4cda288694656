"""
지연 완전 공개 정책
T* 기간 동안 a*를 추천한 뒤 상태를 완전히 공개
"""
import logging
import math
from fractions import Fraction
from typing import Optional, Tuple

from app.config.config import get_settings
from app.core.exceptions import OutsideW
from app.models.policy import PolicyStep, SplitOutcome
from app.models.results import BaselineResult
from app.solver.base_policy import DisclosurePolicy

from .base_baseline import BaseBaseline

logger = logging.getLogger(__name__)


class DelayedDisclosure(BaseBaseline):
    """
    T* = max{T : (1-δ^T)u(a*,p₀) + δ^T M(p₀) ≥ m(p₀)} = max{T : δ^T ≥ r}

    r = (m(p₀) - u(a*,p₀)) / (M(p₀) - u(a*,p₀)).
    """

    name = "delayed"

    def ratio(self, p: Optional[Fraction] = None) -> Fraction:
        p = self.p0 if p is None else p
        env = self.env
        u = env.eval_u_star(p)
        return (env.eval(p) - u) / (env.eval_M(p) - u)

    def periods(self, p: Optional[Fraction] = None) -> Optional[int]:
        """T* (p ∈ P 이면 None: 보상 없이 무한히 a*)"""
        r = self.ratio(p)
        if r <= 0:
            return None
        d = self.delta
        # 로그로 추정 후 정확히 보정
        t = max(int(math.floor(math.log(r) / math.log(d))), 0)
        while d ** (t + 1) >= r:
            t += 1
        while t > 0 and d ** t < r:
            t -= 1
        return t

    def promise(self, n: int, p: Optional[Fraction] = None) -> Fraction:
        """n 기간 남았을 때의 약속 w_n = (1-δ^n)u(a*,p) + δ^n M(p)"""
        p = self.p0 if p is None else p
        dn = self.delta ** n
        return (1 - dn) * self.env.eval_u_star(p) + dn * self.env.eval_M(p)

    def calculate(self) -> BaselineResult:
        self.require_q1()
        p = self.p0
        v = self.env.eval_v_star(p)
        t = self.periods()
        if t is None:
            cap = get_settings().DELAYED_T_CAP
            return self.get_result(
                v,
                self.env.eval(p),
                parameters={"T": cap, "ratio": Fraction(0)},
                note=f"p₀ ∈ P: 공개 없이 a*를 계속 추천 (T* 는 상한 {cap} 으로 표시)",
            )
        dt = self.delta ** t
        value = (1 - dt) * v + dt * (1 - p) * self.v0_if_optimal_at_zero()
        logger.info(f"지연 공개: T*={t}, 값={value}")
        return self.get_result(
            value,
            self.promise(t),
            parameters={"T": t, "ratio": self.ratio()},
        )

    def as_policy(self) -> Optional[DisclosurePolicy]:
        return DelayedDisclosurePolicy(self)


class DelayedDisclosurePolicy(DisclosurePolicy):
    """약속 사다리 w_T > w_{T-1} ... 아래로, w_0 = M(p) 에서 공개"""

    name = "delayed"

    def __init__(self, baseline: DelayedDisclosure):
        super().__init__(baseline.problem, baseline.env)
        self.baseline = baseline
        self._cap = get_settings().DELAYED_T_CAP

    def initial_state(self, p: Fraction) -> Tuple[Fraction, Fraction]:
        t = self.baseline.periods(p)
        if t is None:
            return p, self.env.eval(p)
        return p, self.baseline.promise(t, p)

    def _remaining(self, p: Fraction, w: Fraction) -> int:
        """w = w_n 인 n"""
        for n in range(self._cap + 1):
            w_n = self.baseline.promise(n, p)
            if w_n == w:
                return n
            if w_n < w:
                break
        raise OutsideW(f"지연 공개 정책의 약속 사다리 위 상태가 아닙니다: ({p}, {w})", p=p, w=w)

    def step(self, p: Fraction, w: Fraction) -> PolicyStep:
        env = self.env
        env.check_state(p, w)
        if self.is_absorbed(p, w):
            return self.stationary_step(p, w)
        n = self._remaining(p, w)
        if n > 0:
            outcomes = [SplitOutcome(
                prob=Fraction(1),
                posterior=p,
                promised_w=self.baseline.promise(n - 1, p),
                action=env.target,
            )]
        else:
            zero, one = Fraction(0), Fraction(1)
            outcomes = [
                SplitOutcome(prob=1 - p, posterior=zero, promised_w=env.eval(zero), action=env.static_action(zero)),
                SplitOutcome(prob=p, posterior=one, promised_w=env.eval(one), action=env.static_action(one)),
            ]
        return PolicyStep(p=p, w=w, outcomes=outcomes)
