"""
구간별 선형 포락선
m(p), M(p), 정적 최적 구간 P, 무차별 약속 𝐰(p), 수정 포락선 m̄_q
"""
import bisect
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from app.core.exceptions import InvalidCutoffs, NonConvexEnvelope, OutOfDomain, OutsideW
from app.models.problem import Problem

logger = logging.getLogger(__name__)

Point = Tuple[Fraction, Fraction]
Interval = Tuple[Fraction, Fraction]


def _slope(a: Point, b: Point) -> Fraction:
    return (b[1] - a[1]) / (b[0] - a[0])


def _simplify(points: Sequence[Point]) -> List[Point]:
    """x 중복 제거 후 같은 기울기로 이어지는 중간 꺾임점 제거"""
    deduped: List[Point] = []
    for x, y in sorted(points):
        if deduped and deduped[-1][0] == x:
            continue
        deduped.append((x, y))
    out: List[Point] = []
    for pt in deduped:
        while len(out) >= 2 and _slope(out[-2], out[-1]) == _slope(out[-1], pt):
            out.pop()
        out.append(pt)
    return out


def chord(a: Point, b: Point, p: Fraction) -> Fraction:
    """두 점을 잇는 직선의 p 에서의 값"""
    (x0, y0), (x1, y1) = a, b
    return y0 + (y1 - y0) * (p - x0) / (x1 - x0)


@dataclass(frozen=True)
class PiecewiseLinearConvex:
    """
    [0,1] 위 볼록 구간별 선형 함수 (꺾임점 표현)

    kinks: (p_i, value_i), p_0 = 0, p_last = 1, p 증가
    labels: 조각별 최대화 행동 (없으면 빈 튜플)
    """

    kinks: Tuple[Point, ...]
    labels: Tuple[Optional[str], ...] = ()
    xs: Tuple[Fraction, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        kinks = self.kinks
        if len(kinks) < 2 or kinks[0][0] != 0 or kinks[-1][0] != 1:
            raise InvalidCutoffs("꺾임점은 0에서 시작해 1에서 끝나야 합니다")
        for a, b in zip(kinks, kinks[1:]):
            if not a[0] < b[0]:
                raise InvalidCutoffs(f"꺾임점 순서 오류: {a[0]} ≥ {b[0]}")
        slopes = self.slopes()
        for s0, s1 in zip(slopes, slopes[1:]):
            if s1 < s0:
                raise NonConvexEnvelope(f"기울기 감소: {s0} → {s1}")
        object.__setattr__(self, "xs", tuple(x for x, _ in kinks))

    def slopes(self) -> List[Fraction]:
        return [_slope(a, b) for a, b in zip(self.kinks, self.kinks[1:])]

    def piece_index(self, p: Fraction) -> int:
        """p 를 포함하는 조각 번호 (꺾임점에서는 오른쪽 조각, p=1 은 마지막 조각)"""
        i = bisect.bisect_right(self.xs, p) - 1
        return min(max(i, 0), len(self.kinks) - 2)

    def __call__(self, p: Fraction) -> Fraction:
        if p < 0 or p > 1:
            raise OutOfDomain(f"p={p} 는 [0,1] 밖입니다", p=p)
        i = self.piece_index(p)
        return chord(self.kinks[i], self.kinks[i + 1], p)

    def interior_kinks(self, lo: Fraction, hi: Fraction) -> List[Fraction]:
        """열린 구간 (lo, hi) 안의 꺾임점"""
        return [x for x in self.xs if lo < x < hi]


@dataclass(frozen=True)
class Envelopes:
    """정규화된 문제의 포락선 묶음"""

    m: PiecewiseLinearConvex
    M_line: Tuple[Fraction, Fraction]
    u_star_line: Tuple[Fraction, Fraction]
    v_star_line: Tuple[Fraction, Fraction]
    P: Optional[Interval]
    lines: Dict[str, Tuple[Fraction, Fraction]]
    actions: Tuple[str, ...]
    target: str

    # ========================================
    # 평가
    # ========================================

    @staticmethod
    def _check(p: Fraction) -> None:
        if p < 0 or p > 1:
            raise OutOfDomain(f"p={p} 는 [0,1] 밖입니다", p=p)

    def eval(self, p: Fraction) -> Fraction:
        """m(p)"""
        return self.m(p)

    def eval_M(self, p: Fraction) -> Fraction:
        """M(p) = (1-p)M(0) + p·M(1)"""
        self._check(p)
        return (1 - p) * self.M_line[0] + p * self.M_line[1]

    def eval_u_star(self, p: Fraction) -> Fraction:
        """u(a*, p)"""
        self._check(p)
        return (1 - p) * self.u_star_line[0] + p * self.u_star_line[1]

    def eval_v_star(self, p: Fraction) -> Fraction:
        """v(a*, p)"""
        self._check(p)
        return (1 - p) * self.v_star_line[0] + p * self.v_star_line[1]

    def bold_w(self, delta: Fraction, p: Fraction) -> Fraction:
        """𝐰(p): (1-δ)u(a*,p) + δ𝐰(p) = m(p)"""
        return bold_w(self, delta, p)

    # ========================================
    # 정적 최적 / 최선 반응
    # ========================================

    def in_P(self, p: Fraction) -> bool:
        return self.P is not None and self.P[0] <= p <= self.P[1]

    def best_reply(self, p: Fraction) -> str:
        """p 에서의 정적 최선 반응 (동점이면 앞선 행동)"""
        target = self.eval(p)
        for a in self.actions:
            u0, u1 = self.lines[a]
            if (1 - p) * u0 + p * u1 == target:
                return a
        raise OutOfDomain(f"최선 반응을 찾지 못했습니다 (p={p})")

    def static_action(self, p: Fraction) -> str:
        """p ∈ P 이면 a*, 아니면 정적 최선 반응"""
        if self.in_P(p):
            return self.target
        return self.best_reply(p)

    # ========================================
    # 𝒲 (실현 가능 상태 집합)
    # ========================================

    def in_W(self, p: Fraction, w: Fraction) -> bool:
        if p < 0 or p > 1:
            return False
        return self.eval(p) <= w <= self.eval_M(p)

    def check_state(self, p: Fraction, w: Fraction) -> None:
        """(p, w) ∈ 𝒲 확인"""
        if not self.in_W(p, w):
            raise OutsideW(f"상태 ({p}, {w}) 가 𝒲 밖입니다", p=p, w=w)

    def kink_table(self) -> List[Dict[str, object]]:
        """꺾임점 목록 (p, m, M, u*, 라벨)"""
        rows = []
        for i, (x, y) in enumerate(self.m.kinks):
            label = self.m.labels[min(i, len(self.m.labels) - 1)] if self.m.labels else None
            rows.append({
                "p": x,
                "m": y,
                "M": self.eval_M(x),
                "u_star": self.eval_u_star(x),
                "action_right": label,
            })
        return rows


# ============================================================
# 연산
# ============================================================

def build_envelopes(problem: Problem) -> Envelopes:
    """
    정규화된 문제에서 포락선 구성

    m 은 |A| 개 직선의 상부 포락선. 후보 꺾임점은 {0,1} 과 (0,1) 안의 직선 교점,
    각 조각은 중점에서의 argmax 행동으로 라벨링한다.
    """
    lines = {a: tuple(problem.agent_payoff[a]) for a in problem.actions}
    actions = tuple(problem.actions)

    def line_at(a: str, p: Fraction) -> Fraction:
        u0, u1 = lines[a]
        return (1 - p) * u0 + p * u1

    def upper(p: Fraction) -> Fraction:
        return max(line_at(a, p) for a in actions)

    candidates = {Fraction(0), Fraction(1)}
    for i, a in enumerate(actions):
        for b in actions[i + 1:]:
            sa = lines[a][1] - lines[a][0]
            sb = lines[b][1] - lines[b][0]
            if sa == sb:
                continue
            x = (lines[b][0] - lines[a][0]) / (sa - sb)
            if 0 < x < 1:
                candidates.add(x)

    xs = sorted(candidates)
    points = _simplify([(x, upper(x)) for x in xs])

    labels = []
    for (x0, _), (x1, _) in zip(points, points[1:]):
        mid = (x0 + x1) / 2
        best = upper(mid)
        labels.append(next(a for a in actions if line_at(a, mid) == best))

    m = PiecewiseLinearConvex(kinks=tuple(points), labels=tuple(labels))

    target = problem.target_action
    touching = [x for x in xs if line_at(target, x) == upper(x)]
    P = (min(touching), max(touching)) if touching else None

    env = Envelopes(
        m=m,
        M_line=(points[0][1], points[-1][1]),
        u_star_line=lines[target],
        v_star_line=tuple(problem.principal_payoff),
        P=P,
        lines=lines,
        actions=actions,
        target=target,
    )
    logger.debug(f"포락선 구성: 꺾임점 {len(points)}개, P={P}")
    return env


def bold_w(env: Envelopes, delta: Fraction, p: Fraction) -> Fraction:
    """𝐰(p) = (m(p) - (1-δ)u(a*,p)) / δ"""
    return (env.eval(p) - (1 - delta) * env.eval_u_star(p)) / delta


def m_bar(env: Envelopes, q_low: Fraction, q: Fraction) -> PiecewiseLinearConvex:
    """
    수정 포락선 m̄_q

    [0, q̲¹] 에서는 (0,m(0))-(q̲¹,m(q̲¹)) 현, (q̲¹, q] 에서는 m, [q, 1] 에서는
    (q,m(q))-(1,m(1)) 현.

    Raises:
        InvalidCutoffs: 0 ≤ q̲¹ ≤ q ≤ 1 이 아닐 때
    """
    if not 0 <= q_low <= q <= 1:
        raise InvalidCutoffs(f"잘못된 절단점: q̲¹={q_low}, q={q}", q_low=q_low, q=q)
    m = env.m
    points = [(Fraction(0), m(Fraction(0))), (q_low, m(q_low))]
    points += [(x, m(x)) for x in m.interior_kinks(q_low, q)]
    points += [(q, m(q)), (Fraction(1), m(Fraction(1)))]
    return PiecewiseLinearConvex(kinks=tuple(_simplify(points)))
