"""
τ_q 의 가치 함수 V_q 와 최적 절단점 q*
"""
import logging
import threading
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from app.config.config import get_settings
from app.core.exceptions import EmptyQ1, LadderDiverged
from app.core.scalar import simplest_between
from app.models.problem import Problem
from app.solver.envelopes import Envelopes, m_bar
from app.solver.thresholds import ThresholdLadder, split_phi_lambda

logger = logging.getLogger(__name__)


class ValueFunction:
    """
    V_q(p, w)

    그래프 위 값 g(p) = V_q(p, m̄_q(p)) 를 메모하고, 나머지 상태는
    m̄_q 위의 분할 λ·g(φ) 로 환원한다.
    """

    def __init__(self, problem: Problem, env: Envelopes, ladder: ThresholdLadder, q: Fraction):
        self.problem = problem
        self.env = env
        self.ladder = ladder
        self.q = Fraction(q)
        self.delta = problem.discount
        self.q_low = ladder.q1[0]
        self.m_bar = m_bar(env, self.q_low, self.q)
        self._cap = get_settings().LADDER_MAX_LEVELS * 2 + 8

        self._memo: Dict[Fraction, Fraction] = {}
        self._lock = threading.Lock()

        # Q^∞ 닫힌 형태의 계수 v(a*,1)/(m(1)-u(a*,1))
        one = Fraction(1)
        self._q_inf_coef = env.v_star_line[1] / (env.eval(one) - env.eval_u_star(one))

    # ========================================
    # 그래프 위 값
    # ========================================

    def _in_Q_inf(self, p: Fraction) -> bool:
        q_inf = self.ladder.q_inf
        return q_inf is not None and q_inf[0] <= p <= q_inf[1]

    def _transition(self, p: Fraction) -> Tuple[Fraction, Fraction, Optional[Fraction]]:
        """g(p) = a + b·g(next) 의 (a, b, next); next 가 None 이면 g(p) = a"""
        env = self.env
        zero = Fraction(0)
        if env.in_P(p):
            return env.eval_v_star(p), zero, None
        if p == 0 or p == 1:
            return zero, zero, None
        if p < self.q_low:
            # W1: 0 쪽 값은 0 (0 ∉ P)
            return zero, p / self.q_low, self.q_low
        if p > self.q:
            return zero, (1 - p) / (1 - self.q), self.q
        if self._in_Q_inf(p):
            closed = env.eval_v_star(p) - (env.eval(p) - env.eval_u_star(p)) * self._q_inf_coef
            return closed, zero, None

        split = split_phi_lambda(self.m_bar, p, env.bold_w(self.delta, p))
        return (1 - self.delta) * env.eval_v_star(p), self.delta * split.lam, split.phi

    def graph_value(self, p: Fraction) -> Fraction:
        """g(p) = V_q(p, m̄_q(p))"""
        p = Fraction(p)
        with self._lock:
            if p in self._memo:
                return self._memo[p]

        chain: List[Tuple[Fraction, Fraction, Fraction]] = []
        current: Optional[Fraction] = p
        tail = Fraction(0)
        for _ in range(self._cap):
            with self._lock:
                cached = self._memo.get(current)
            if cached is not None:
                tail = cached
                break
            a, b, nxt = self._transition(current)
            chain.append((current, a, b))
            if nxt is None:
                break
            current = nxt
        else:
            raise LadderDiverged(f"V_q({p}, m̄(p)) 재귀가 {self._cap} 단계 안에 끝나지 않았습니다")

        value = tail
        with self._lock:
            for point, a, b in reversed(chain):
                value = a + b * value
                self._memo[point] = value
        return value

    # ========================================
    # 일반 상태
    # ========================================

    def value(self, p: Fraction, w: Fraction) -> Fraction:
        """
        V_q(p, w)

        Raises:
            OutsideW: 상태가 𝒲 밖
        """
        p, w = Fraction(p), Fraction(w)
        self.env.check_state(p, w)
        if p == 0 or p == 1:
            return self.graph_value(p)
        if self.env.in_P(p) and w == self.env.eval(p):
            return self.env.eval_v_star(p)
        if w <= self.m_bar(p):
            return self.graph_value(p)
        split = split_phi_lambda(self.m_bar, p, w)
        return split.lam * self.graph_value(split.phi)

    def value_at_prior(self, p: Fraction) -> Fraction:
        """V_q(p, m(p))"""
        return self.value(p, self.env.eval(p))

    def agent_value(self, p: Fraction, w: Optional[Fraction] = None) -> Fraction:
        """τ_q 하 대리인 값 max(w, m̄_q(p)): W1/W3 에서만 지대가 남는다"""
        w = self.env.eval(p) if w is None else Fraction(w)
        return max(w, self.m_bar(p))

    def curve(self, points: List[Fraction]) -> List[Dict[str, Fraction]]:
        """가치 곡선 p ↦ V_q(p, m(p)) 와 g(p) = V/(1-p) (오목화 진단용)"""
        rows = []
        for p in points:
            v = self.value_at_prior(p)
            rows.append({
                "p": p,
                "value": v,
                "ratio": v / (1 - p) if p != 1 else None,
            })
        return rows


# ============================================================
# q*
# ============================================================

def _probe_holds(vf: ValueFunction, p: Fraction, eta: Fraction) -> bool:
    """V(p, m(p) + η·(m(1) - u(a*,1))) ≤ V(p, m(p)) (w 방향 우미분이 0 이하)"""
    env = vf.env
    one = Fraction(1)
    base_w = env.eval(p)
    probe_w = min(base_w + eta * (env.eval(one) - env.eval_u_star(one)), env.eval_M(p))
    if probe_w == base_w:
        return True
    return vf.value(p, probe_w) <= vf.value(p, base_w)


def _candidates(env: Envelopes, ladder: ThresholdLadder, scan_points: int) -> List[Fraction]:
    """[q̲¹, q̄¹] 안의 후보점: m 의 꺾임점, 사다리/P/Q^∞ 끝점, 균등 격자"""
    q_low, q_high = ladder.q1
    points = set(env.m.xs)
    for interval in (*ladder.levels, ladder.P, ladder.q_inf):
        if interval is not None:
            points.update(interval)
    step = (q_high - q_low) / scan_points
    points.update(q_low + step * i for i in range(scan_points + 1))
    return sorted(p for p in points if q_low <= p <= q_high and p < 1)


def _refine(vf: ValueFunction, a: Fraction, b: Fraction, depth: int, eta0: Fraction) -> List[Fraction]:
    """[a, b] 안에서 탐침이 성립에서 실패로 바뀌는 곳 근처의 후보 두 개"""
    lo, hi = a, b
    for _ in range(depth):
        mid = (lo + hi) / 2
        if _probe_holds(vf, mid, min(eta0, (hi - lo) ** 2)):
            lo = mid
        else:
            hi = mid
    width = hi - lo
    return [lo, simplest_between(max(a, lo - width), hi)]


def compute_q_star(
        problem: Problem,
        env: Envelopes,
        ladder: ThresholdLadder,
        depth: Optional[int] = None,
        eta: Optional[Fraction] = None
) -> Fraction:
    """
    q* = sup{p ∈ Q¹ : V_{q̄¹}(p, m(p)) ≥ V_{q̄¹}(p, w) ∀w}

    w > m(p) 이면 V_{q̄¹}(p, w) = (1-p)·r(φ) (φ ≤ p, r(x) = V_{q̄¹}(x, m(x))/(1-x)) 이므로
    조건은 r(p) 가 [q̲¹, p] 위 최대값이라는 것과 같고, q* 는 Q¹ 위 r 의 가장 큰 최대점이다.

    후보점 (m 의 꺾임점, 사다리 끝점, 균등 격자) 에서 r 을 정확히 비교한 뒤
    최대점 양옆 칸을 w 방향 유한 차분 탐침의 이분 탐색으로 다듬는다.
    반환값은 평가한 모든 후보 중 r 이 가장 크고, 같으면 가장 오른쪽인 점이다.

    Raises:
        EmptyQ1: Q¹ = ∅
    """
    if not ladder.levels:
        raise EmptyQ1("Q¹ 가 비어 있습니다")
    settings = get_settings()
    depth = depth or settings.Q_STAR_BISECTION_DEPTH
    eta0 = eta if eta is not None else settings.q_star_probe_eta

    vf = ValueFunction(problem, env, ladder, ladder.q1[1])
    ratios: Dict[Fraction, Fraction] = {}

    def best_of(points: List[Fraction]) -> Fraction:
        for p in points:
            if p not in ratios:
                ratios[p] = vf.value_at_prior(p) / (1 - p)
        return max(ratios, key=lambda p: (ratios[p], p))

    points = _candidates(env, ladder, settings.Q_STAR_SCAN_POINTS)
    best = best_of(points)

    i = points.index(best)
    refined: List[Fraction] = []
    if i > 0:
        refined += _refine(vf, points[i - 1], best, depth, eta0)
    if i + 1 < len(points):
        refined += _refine(vf, best, points[i + 1], depth, eta0)
    q_star = best_of(refined)

    logger.info(f"q* = {q_star} (후보 {len(ratios)}개, 격자 최대점 {best})")
    return q_star
