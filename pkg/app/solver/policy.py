"""
최적 정책족 τ_q
영역 분류 (W1-W4, 흡수), 한 기간 분할, 학습 시간 T_δ
"""
import logging
from fractions import Fraction
from typing import List, Optional, Tuple

from app.config.config import get_settings
from app.core.exceptions import DegenerateSystem, InvalidCutoffs, LadderDiverged
from app.models.policy import PolicyStep, Region, SplitOutcome
from app.models.problem import Problem
from app.solver.base_policy import DisclosurePolicy
from app.solver.envelopes import Envelopes, chord, m_bar
from app.solver.simplex import solve_exact
from app.solver.thresholds import ThresholdLadder, split_phi_lambda

logger = logging.getLogger(__name__)


class PolicyTau(DisclosurePolicy):
    """
    절단점 q 를 가진 정책 τ_q

    Args:
        problem: 정규화된 문제
        env: 포락선
        ladder: 임계값 사다리 (Q¹ 비어 있지 않음)
        q: 절단점, q ∈ [q̲¹, q̄¹]
    """

    name = "optimal"

    def __init__(self, problem: Problem, env: Envelopes, ladder: ThresholdLadder, q: Fraction):
        super().__init__(problem, env)
        self.ladder = ladder
        self.q = Fraction(q)
        self.q_low, self.q_high = ladder.q1
        if not self.q_low <= self.q <= self.q_high:
            raise InvalidCutoffs(
                f"q={self.q} 가 Q¹=[{self.q_low}, {self.q_high}] 밖입니다",
                q=self.q,
            )
        self.m_bar = m_bar(env, self.q_low, self.q)

        self._pt0 = (Fraction(0), env.eval(Fraction(0)))
        self._pt1 = (Fraction(1), env.eval(Fraction(1)))
        self._pt_low = (self.q_low, env.eval(self.q_low))
        self._pt_q = (self.q, env.eval(self.q))
        self.action0 = env.best_reply(Fraction(0))
        self.action1 = env.best_reply(Fraction(1))

    def initial_state(self, p: Fraction) -> Tuple[Fraction, Fraction]:
        return p, self.env.eval(p)

    def in_Q_inf(self, p: Fraction) -> bool:
        q_inf = self.ladder.q_inf
        return q_inf is not None and q_inf[0] <= p <= q_inf[1]

    # ========================================
    # 영역 분류
    # ========================================

    def classify(self, p: Fraction, w: Fraction) -> Region:
        """
        (p, w) ∈ 𝒲 의 영역

        Raises:
            OutsideW: 상태가 𝒲 밖
        """
        self.env.check_state(p, w)
        if self.is_absorbed(p, w):
            return Region.ABSORBED
        if p < self.q_low and w <= chord(self._pt0, self._pt_low, p):
            return Region.W1
        upper_w2 = chord(self._pt_low, self._pt1, p)
        if self.q_low <= p <= self.q:
            return Region.W2 if w <= upper_w2 else Region.W4
        if p > self.q:
            if w <= chord(self._pt_q, self._pt1, p):
                return Region.W3
            if w <= upper_w2:
                return Region.W2
        return Region.W4

    # ========================================
    # 한 기간 분할
    # ========================================

    def _target(self, prob: Fraction, posterior: Fraction) -> SplitOutcome:
        return SplitOutcome(
            prob=prob,
            posterior=posterior,
            promised_w=self.env.bold_w(self.delta, posterior),
            action=self.env.target,
        )

    def _reveal(self, prob: Fraction, state: int) -> SplitOutcome:
        pt = self._pt1 if state else self._pt0
        return SplitOutcome(
            prob=prob,
            posterior=pt[0],
            promised_w=pt[1],
            action=self.action1 if state else self.action0,
        )

    def step(self, p: Fraction, w: Fraction) -> PolicyStep:
        """
        τ_q 의 한 기간 분할 (확률 0 분기는 제거)

        Raises:
            OutsideW: 상태가 𝒲 밖
            DegenerateSystem: W4 3×3 계가 특이 (q̲¹ ∈ (0,1) 이면 발생하지 않음)
        """
        region = self.classify(p, w)
        if region == Region.ABSORBED:
            return self.stationary_step(p, w)

        outcomes: List[SplitOutcome]
        if region == Region.W1:
            lo = self.q_low
            outcomes = [self._reveal((lo - p) / lo, 0), self._target(p / lo, lo)]
        elif region == Region.W2:
            split = split_phi_lambda(self.m_bar, p, w)
            outcomes = [self._target(split.lam, split.phi), self._reveal(1 - split.lam, 1)]
        elif region == Region.W3:
            q = self.q
            outcomes = [self._target((1 - p) / (1 - q), q), self._reveal((p - q) / (1 - q), 1)]
        else:
            lam0, lam_low, lam1 = self._solve_w4(p, w)
            outcomes = [
                self._reveal(lam0, 0),
                self._target(lam_low, self.q_low),
                self._reveal(lam1, 1),
            ]

        kept = [o for o in outcomes if o.prob != 0]
        logger.debug(f"τ_q 분할 ({p}, {w}) ∈ {region.value}: {len(kept)} 분기")
        return PolicyStep(p=p, w=w, region=region, outcomes=kept)

    def _solve_w4(self, p: Fraction, w: Fraction) -> Tuple[Fraction, Fraction, Fraction]:
        """λ₀(0, m(0)) + λ_q̲(q̲¹, m(q̲¹)) + λ₁(1, m(1)) = (p, w), Σλ = 1"""
        (x0, y0), (xl, yl), (x1, y1) = self._pt0, self._pt_low, self._pt1
        lam = solve_exact(
            [[x0, xl, x1], [y0, yl, y1], [Fraction(1), Fraction(1), Fraction(1)]],
            [p, w, Fraction(1)],
        )
        if any(x < 0 for x in lam):
            raise DegenerateSystem(f"W4 분할 확률이 음수입니다: {lam}", p=p, w=w)
        return lam[0], lam[1], lam[2]

    # ========================================
    # 학습 시간
    # ========================================

    def descent(self, p: Fraction) -> List[PolicyStep]:
        """
        (p, m(p)) 에서 a* 분기를 따라가는 분할 열

        a* 분기가 없어지거나, 흡수 상태, P 또는 Q^∞ 에 들어가면 멈춘다.
        """
        cap = get_settings().LADDER_MAX_LEVELS + 4
        steps: List[PolicyStep] = []
        state = self.initial_state(p)
        for _ in range(cap):
            step = self.step(*state)
            steps.append(step)
            if step.absorbed:
                return steps
            star = step.target_outcomes(self.env.target)
            if not star:
                return steps
            nxt = star[0]
            if self.env.in_P(nxt.posterior) or self.in_Q_inf(nxt.posterior):
                return steps
            state = (nxt.posterior, nxt.promised_w)
        raise LadderDiverged(f"p={p} 에서 하강이 {cap} 단계 안에 끝나지 않았습니다")

    def t_delta(self, p: Fraction) -> Optional[int]:
        """
        상태가 0 또는 1 로 드러나기 전 대리인이 a* 를 따르는 기간 수

        Returns:
            기간 수 (p ∈ {0,1} 이면 0), Q^∞ 또는 P 로 점근 흡수되면 None
        """
        if p == 0 or p == 1:
            return 0
        if self.env.in_P(p) or self.in_Q_inf(p):
            return None
        count = 0
        for step in self.descent(p):
            star = step.target_outcomes(self.env.target)
            if step.absorbed or not star:
                break
            count += 1
            posterior = star[0].posterior
            if self.env.in_P(posterior) or self.in_Q_inf(posterior):
                return None
        logger.debug(f"T_δ({p}) = {count}")
        return count
