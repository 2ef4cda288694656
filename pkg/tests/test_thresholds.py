"""
Q¹, Q^k 사다리, Q^∞, 분할 (λ, φ) 테스트
"""
import random
from fractions import Fraction

import pytest

from app.core.exceptions import DegenerateLine, EmptyQ1, LadderDiverged, OutsideW
from app.models.problem import Problem
from app.solver import build_envelopes, compute_Q1, compute_Q_inf, compute_ladder, prepare, split_phi_lambda
from app.solver.envelopes import chord

from tests.conftest import DISCOUNTS, random_instances


F = Fraction
HALF = F(1, 2)


def test_example1_q1(example1):
    env = build_envelopes(example1)
    assert compute_Q1(env, HALF) == (F(1, 6), F(1, 2))


def test_example1_ladder(example1):
    ladder = compute_ladder(build_envelopes(example1), HALF)
    assert ladder.levels == (
        (F(1, 6), F(1, 2)),
        (F(9, 34), F(11, 26)),
        (F(61, 186), F(13, 38)),
    )
    assert ladder.k_star == 3
    assert not ladder.fixed_point
    assert ladder.q_inf is None
    assert ladder.first_level_within(F(1, 100)) is None


def test_ladder_is_nested(example1):
    ladder = compute_ladder(build_envelopes(example1), HALF)
    for (lo, hi), (lo2, hi2) in zip(ladder.levels, ladder.levels[1:]):
        assert lo <= lo2 <= hi2 <= hi


def test_band_index(example1):
    ladder = compute_ladder(build_envelopes(example1), HALF)
    assert ladder.band_index(F(1, 3)) == 3
    assert ladder.band_index(F(1, 5)) == 1
    assert ladder.band_index(F(1, 10)) is None


def test_ladder_level_cap(example1):
    with pytest.raises(LadderDiverged):
        compute_ladder(build_envelopes(example1), HALF, max_levels=2)


def test_empty_q1(example1):
    impatient = prepare(example1.model_copy(update={"discount": F(1, 100)}))
    env = build_envelopes(impatient)
    assert compute_Q1(env, impatient.discount) is None
    with pytest.raises(EmptyQ1):
        compute_ladder(env, impatient.discount)


def test_example2_fixed_point(example2):
    env = build_envelopes(example2)
    ladder = compute_ladder(env, HALF)
    assert ladder.q1 == (F(0), F(2, 3))
    assert ladder.fixed_point
    assert compute_Q_inf(env, HALF) == (F(0), F(2, 3))


def test_split_on_m(example1):
    env = build_envelopes(example1)
    split = split_phi_lambda(env.m, F(1, 3), F(5, 6))
    assert split.phi == F(3, 11)
    assert split.lam == F(11, 12)
    # 평균 믿음 보존
    assert split.lam * split.phi + (1 - split.lam) == F(1, 3)


def test_split_on_graph_is_trivial(example1):
    env = build_envelopes(example1)
    split = split_phi_lambda(env.m, F(1, 4), env.eval(F(1, 4)))
    assert (split.lam, split.phi) == (F(1), F(1, 4))


def test_split_errors(example1):
    env = build_envelopes(example1)
    with pytest.raises(OutsideW):
        split_phi_lambda(env.m, F(1, 3), F(1, 2))
    with pytest.raises(DegenerateLine):
        split_phi_lambda(env.m, F(1), F(3))


# ============================================================
# Q^∞ 와 하강
# ============================================================

def _zero_in_P(seed: int):
    """ω₀ 에서 a* 가 정적 최적인 무작위 문제 (P 가 0 을 포함)"""
    rng = random.Random(seed)
    A = F(rng.randint(2, 9), rng.randint(1, 3))
    B = F(rng.randint(2, 9), rng.randint(1, 3))
    return prepare(Problem(
        actions=["a_star", "a1", "a2"],
        target_action="a_star",
        agent_payoff={
            "a_star": (A, B * F(rng.randint(0, 9), 10)),
            "a1": (F(0), B),
            "a2": (A * F(rng.randint(1, 9), 10), B * F(rng.randint(1, 9), 10)),
        },
        principal_payoff=(F(rng.randint(1, 9)), F(rng.randint(1, 9))),
        discount=rng.choice(DISCOUNTS),
        prior=HALF,
    ))


def _interior_P(seed: int):
    """a* 가 중간 믿음에서만 정적 최적인 무작위 문제"""
    rng = random.Random(seed)
    A = F(rng.randint(2, 9), rng.randint(1, 3))
    B = F(rng.randint(2, 9), rng.randint(1, 3))
    x = F(rng.randint(3, 9), 10)
    y = F(rng.randint(11 - int(x * 10), 9), 10)
    return prepare(Problem(
        actions=["a0", "a1", "a_star"],
        target_action="a_star",
        agent_payoff={"a0": (A, F(0)), "a1": (F(0), B), "a_star": (A * x, B * y)},
        principal_payoff=(F(rng.randint(1, 9)), F(rng.randint(1, 9))),
        discount=rng.choice(DISCOUNTS),
        prior=HALF,
    ))


def _ladder_gap(env, delta, anchor_p):
    anchor = (anchor_p, env.eval(anchor_p))
    top = (F(1), env.eval(F(1)))
    return lambda p: (1 - delta) * env.eval_u_star(p) + delta * chord(anchor, top, p) - env.eval(p)


@pytest.mark.parametrize("seed", range(12))
def test_q_inf_matches_ladder_when_zero_in_P(seed):
    problem = _zero_in_P(seed)
    env = build_envelopes(problem)
    assert env.P[0] == 0
    ladder = compute_ladder(env, problem.discount)
    assert ladder.fixed_point
    assert ladder.levels[-1] == ladder.q_inf == compute_Q_inf(env, problem.discount)


@pytest.mark.parametrize("seed", range(12))
def test_q_inf_is_a_fixed_point(seed):
    problem = _interior_P(seed)
    env = build_envelopes(problem)
    delta = problem.discount
    q_inf = compute_Q_inf(env, delta)
    assert env.P is not None and q_inf is not None
    lo, hi = q_inf
    assert lo == env.P[0]
    assert env.P[1] <= hi

    # p̲ 에 닻을 둔 사다리 한 단계가 Q^∞ 를 그대로 돌려준다
    gap = _ladder_gap(env, delta, lo)
    assert all(gap(lo + (hi - lo) * F(i, 10)) >= 0 for i in range(11))
    if hi < 1:
        assert gap(hi + (1 - hi) / 100) < 0

    # Q^∞ 안에서 φ(p, 𝐰(p)) 도 Q^∞ 에 남는다
    for i in range(1, 10):
        p = lo + (hi - lo) * F(i, 10)
        if env.in_P(p):
            continue
        phi = split_phi_lambda(env.m, p, env.bold_w(delta, p)).phi
        assert lo <= phi <= hi, (p, phi)


def test_descent_moves_one_band_down(example1):
    problems = [prepare(example1)] + random_instances(4, start=200)
    for problem in problems:
        env = build_envelopes(problem)
        delta = problem.discount
        ladder = compute_ladder(env, delta)
        if ladder.k_star is None:
            # Q^∞ 로 수렴하는 사다리는 마지막 수준 아래가 정해지지 않는다
            continue
        lo, hi = ladder.q1
        for i in range(1, 20):
            p = lo + (hi - lo) * F(i, 20)
            if env.in_P(p):
                continue
            k = ladder.band_index(p)
            phi = split_phi_lambda(env.m, p, env.bold_w(delta, p)).phi
            floor = ladder.levels[k - 2][0] if k >= 2 else F(0)
            assert floor <= phi < ladder.levels[k - 1][0], (problem, p, k, phi)
