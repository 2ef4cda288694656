"""
임계값 사다리
Q¹, Q^k 사다리, Q^∞, 분할 해 (λ, φ)
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Tuple

from app.config.config import get_settings
from app.core.exceptions import (
    DegenerateLine,
    EmptyQ1,
    LadderDiverged,
    NoIntersection,
    OutsideW,
)
from app.solver.envelopes import Envelopes, PiecewiseLinearConvex, chord

logger = logging.getLogger(__name__)

Interval = Tuple[Fraction, Fraction]


@dataclass(frozen=True)
class Split:
    """(p, w) 를 φ 와 1 로 나누는 분할: λφ + (1-λ) = p"""

    lam: Fraction
    phi: Fraction


@dataclass(frozen=True)
class ThresholdLadder:
    """
    Q^k 사다리

    levels: 비어 있지 않은 Q¹ … Q^{k_stop}
    k_star: Q^{k*+1} = ∅ 로 끝난 경우 마지막 비어있지 않은 k
    fixed_point: Q^{k+1} = Q^k 로 멈춘 경우
    converged: P ≠ ∅ 에서 폭 변화가 step bound 미만으로 멈춘 경우
    """

    levels: Tuple[Interval, ...]
    k_star: Optional[int]
    fixed_point: bool
    converged: bool
    q_inf: Optional[Interval]
    P: Optional[Interval]

    @property
    def q1(self) -> Interval:
        return self.levels[0]

    def band_index(self, p: Fraction) -> Optional[int]:
        """p ∈ Q^k \\ Q^{k+1} 인 k (Q¹ 밖이면 None, 마지막 수준 안이면 그 수준)"""
        k_found = None
        for k, (lo, hi) in enumerate(self.levels, start=1):
            if lo <= p <= hi:
                k_found = k
            else:
                break
        return k_found

    def first_level_within(self, eps: Fraction) -> Optional[int]:
        """Q^k ⊆ Q^∞ ∪ [p̲-ε, q̄^∞+ε] 가 처음 성립하는 k (진단용)"""
        if self.q_inf is None:
            return None
        lo_inf, hi_inf = self.q_inf
        for k, (lo, hi) in enumerate(self.levels, start=1):
            if lo >= lo_inf - eps and hi <= hi_inf + eps:
                return k
        return None


# ============================================================
# 오목 구간별 선형 함수의 초수준 집합
# ============================================================

def _superlevel(
        f: Callable[[Fraction], Fraction],
        breakpoints: Iterable[Fraction],
        a: Fraction,
        b: Fraction
) -> Optional[Interval]:
    """
    [a, b] 에서 오목 구간별 선형 f 의 {f ≥ 0}

    꺾임점에서 f 를 평가해 최대점을 찾고, 양쪽으로 부호가 바뀌는 조각에서
    선형 보간으로 근을 구한다.
    """
    xs = sorted({a, b} | {x for x in breakpoints if a < x < b})
    vals = [f(x) for x in xs]
    i_max = max(range(len(xs)), key=lambda i: vals[i])
    if vals[i_max] < 0:
        return None

    i = i_max
    while i > 0 and vals[i - 1] >= 0:
        i -= 1
    if i == 0:
        left = xs[0]
    else:
        x0, x1, v0, v1 = xs[i - 1], xs[i], vals[i - 1], vals[i]
        left = x0 + (x1 - x0) * (-v0) / (v1 - v0)

    j = i_max
    while j < len(xs) - 1 and vals[j + 1] >= 0:
        j += 1
    if j == len(xs) - 1:
        right = xs[-1]
    else:
        x0, x1, v0, v1 = xs[j], xs[j + 1], vals[j], vals[j + 1]
        right = x0 + (x1 - x0) * v0 / (v0 - v1)
    return (left, right)


# ============================================================
# Q¹, 사다리, Q^∞
# ============================================================

def compute_Q1(env: Envelopes, delta: Fraction) -> Optional[Interval]:
    """
    Q¹ = {p : (1-δ)u(a*,p) + δM(p) ≥ m(p)}

    Returns:
        [q̲¹, q̄¹] 또는 None (공집합)
    """
    def f(p: Fraction) -> Fraction:
        return (1 - delta) * env.eval_u_star(p) + delta * env.eval_M(p) - env.eval(p)

    q1 = _superlevel(f, env.m.xs, Fraction(0), Fraction(1))
    logger.debug(f"Q¹ = {q1}")
    return q1


def compute_Q_inf(env: Envelopes, delta: Fraction) -> Optional[Interval]:
    """
    Q^∞ = [p̲, q̄^∞]

    q̄^∞ 는 m(q) = (1-δ)u(a*,q) + δ[(p̲,m(p̲))-(1,m(1)) 현](q) 의 해. P = ∅ 이면 None.
    """
    if env.P is None:
        return None
    p_low = env.P[0]
    anchor = (p_low, env.eval(p_low))
    top = (Fraction(1), env.eval(Fraction(1)))
    if p_low == 1:
        return (p_low, p_low)

    def f(p: Fraction) -> Fraction:
        return (1 - delta) * env.eval_u_star(p) + delta * chord(anchor, top, p) - env.eval(p)

    q_inf = _superlevel(f, env.m.xs, p_low, Fraction(1))
    logger.debug(f"Q^∞ = {q_inf}")
    return q_inf


def compute_ladder(
        env: Envelopes,
        delta: Fraction,
        max_levels: Optional[int] = None,
        step_bound: Optional[Fraction] = None
) -> ThresholdLadder:
    """
    Q^{k+1} = {q ∈ Q^k : (1-δ)u(a*,q) + δU^k(q) ≥ m(q)}

    U^k 는 (q̲^k, m(q̲^k)) 에서 (1, m(1)) 로 가는 현.

    Raises:
        EmptyQ1: Q¹ = ∅
        LadderDiverged: 수준 상한 도달
    """
    settings = get_settings()
    max_levels = max_levels or settings.LADDER_MAX_LEVELS
    step_bound = step_bound if step_bound is not None else settings.ladder_step_bound

    q1 = compute_Q1(env, delta)
    if q1 is None:
        raise EmptyQ1("Q¹ 가 비어 있습니다: 모든 정책이 최적입니다")

    top = (Fraction(1), env.eval(Fraction(1)))
    levels: List[Interval] = [q1]
    k_star: Optional[int] = None
    fixed_point = False
    converged = False

    while True:
        if len(levels) >= max_levels:
            raise LadderDiverged(f"사다리가 {max_levels} 수준 안에 멈추지 않았습니다")
        lo_k, hi_k = levels[-1]
        anchor = (lo_k, env.eval(lo_k))

        def f(p: Fraction, anchor=anchor) -> Fraction:
            return (1 - delta) * env.eval_u_star(p) + delta * chord(anchor, top, p) - env.eval(p)

        nxt = _superlevel(f, env.m.xs, lo_k, hi_k)
        if nxt is None:
            k_star = len(levels)
            break
        if nxt == (lo_k, hi_k):
            fixed_point = True
            break
        shrink = (hi_k - lo_k) - (nxt[1] - nxt[0])
        levels.append(nxt)
        if env.P is not None and shrink < step_bound:
            converged = True
            break

    q_inf = compute_Q_inf(env, delta)
    ladder = ThresholdLadder(
        levels=tuple(levels),
        k_star=k_star,
        fixed_point=fixed_point,
        converged=converged,
        q_inf=q_inf,
        P=env.P,
    )
    logger.info(
        f"사다리 구성: {len(levels)} 수준, k*={k_star}, "
        f"fixed={fixed_point}, converged={converged}, Q^∞={q_inf}"
    )
    return ladder


# ============================================================
# 분할 (λ, φ)
# ============================================================

def split_phi_lambda(env: PiecewiseLinearConvex, p: Fraction, w: Fraction) -> Split:
    """
    (p, w) 와 (1, f(1)) 을 잇는 직선이 f 의 그래프와 p 왼쪽에서 만나는 점 φ

    f 는 m 또는 m̄_q. w = f(p) 이면 (1, p).

    Raises:
        OutsideW: w < f(p)
        DegenerateLine: p = 1, w > f(1)
        NoIntersection: 직선이 (0, f(0)) 위를 지나 교점이 없을 때
    """
    fp = env(p)
    if w == fp:
        return Split(lam=Fraction(1), phi=p)
    if w < fp:
        raise OutsideW(f"w={w} < f(p)={fp}", p=p, w=w)
    if p == 1:
        raise DegenerateLine(f"p = 1 에서 w={w} > f(1)", w=w)

    f1 = env(Fraction(1))

    def gap(x: Fraction) -> Fraction:
        return env(x) - (f1 + (w - f1) * (1 - x) / (1 - p))

    right_x, right_d = p, fp - w
    for x in reversed([x for x in env.xs if x < p]):
        d = gap(x)
        if d >= 0:
            phi = x + (right_x - x) * d / (d - right_d)
            return Split(lam=(1 - p) / (1 - phi), phi=phi)
        right_x, right_d = x, d
    raise NoIntersection(f"({p}, {w}) 에서 f 와의 교점이 없습니다", p=p, w=w)
