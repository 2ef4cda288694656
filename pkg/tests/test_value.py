"""
가치 함수 V_q, q*, 솔버 요약 테스트
"""
from fractions import Fraction

import pytest

from app.core.exceptions import OutsideW
from app.solver import PersuasionSolver, compute_q_star, prepare

from tests.conftest import random_instances


F = Fraction


def test_example1_optimal_value(solver1):
    assert solver1.value(F(1, 3)) == F(1285, 1536)
    # V(p, m(p)) = (1-δ)v(a*,p) + δV(p, 𝐰(p))
    assert solver1.value(F(1, 3), F(5, 6)) == 2 * F(1285, 1536) - 1


def test_example1_q_star(solver1):
    assert solver1.ladder.q1 == (F(1, 6), F(1, 2))
    assert solver1.q_star == F(1, 3)


def test_upper_cutoff_is_not_optimal(solver1):
    # τ_{q̄¹} 는 p = 1/2 에서 τ_{1/3} 보다 나쁘다
    assert solver1.value(F(1, 2), q=F(1, 2)) == F(1, 2)
    assert solver1.value(F(1, 2)) == F(1285, 2048)
    assert solver1.value(F(1, 3), q=F(1, 2)) == F(1285, 1536)


def test_value_is_zero_at_revealed_states(solver1):
    assert solver1.value(F(0)) == 0
    assert solver1.value(F(1)) == 0


def test_value_outside_w(solver1):
    with pytest.raises(OutsideW):
        solver1.value(F(1, 3), F(1, 2))


def test_example1_solve_summary(solver1):
    result = solver1.solve()
    assert result.value == F(1285, 1536)
    assert result.q_star == F(1, 3)
    assert result.k_star == 3
    assert result.t_delta == 4
    assert result.agent_value == F(2, 3)
    assert not result.trivial


@pytest.mark.parametrize("p", [F(i, 10) for i in range(11)])
def test_example2_closed_form(solver2, p):
    assert solver2.value(p) == min(F(1), 2 * (1 - p))


def test_example2_q_star(solver2):
    assert solver2.q_star == F(2, 3)


def test_q_star_is_stable_under_probe_size(solver1):
    q = compute_q_star(solver1.problem, solver1.env, solver1.ladder, eta=F(1, 1 << 30))
    assert q == F(1, 3)


def test_value_is_monotone_in_w(solver1):
    vf = solver1.value_function()
    env = solver1.env
    for p in (F(1, 5), F(1, 3), F(2, 5), F(3, 4)):
        ws = [env.eval(p) + F(j, 10) * (env.eval_M(p) - env.eval(p)) for j in range(11)]
        values = [vf.value(p, w) for w in ws]
        assert all(a >= b for a, b in zip(values, values[1:]))


def test_agent_value_rents(solver1):
    vf = solver1.value_function()
    env = solver1.env
    assert vf.agent_value(F(1, 3)) == F(2, 3)
    assert vf.agent_value(F(1, 3), F(1)) == F(1)
    assert vf.agent_value(F(3, 4)) == env.eval(F(3, 4))


def test_value_curve_rows(solver1):
    rows = solver1.value_function().curve([F(0), F(1, 3), F(1)])
    assert rows[1]["value"] == F(1285, 1536)
    assert rows[1]["ratio"] == F(1285, 1024)
    assert rows[2]["ratio"] is None


def test_trivial_instance(example1):
    trivial = example1.model_copy(update={
        "agent_payoff": {"a0": (F(1), F(0)), "a1": (F(0), F(2)), "a_star": (F(1), F(2))},
    })
    solver = PersuasionSolver(trivial)
    result = solver.solve()
    assert result.trivial
    assert result.value == F(1)
    assert result.notice


def test_empty_q1_instance(example1):
    solver = PersuasionSolver(example1.model_copy(update={"discount": F(1, 100)}))
    assert not solver.solvable
    result = solver.solve()
    assert result.value == 0
    assert result.q1 is None


def test_relabeled_instance_matches(example1):
    swapped = example1.model_copy(update={
        "agent_payoff": {"a0": (F(0), F(1)), "a1": (F(2), F(0)), "a_star": (F(1, 2), F(1, 2))},
        "prior": F(2, 3),
    })
    solver = PersuasionSolver(swapped)
    assert solver.problem.relabeled
    assert solver.solve().value == F(1285, 1536)
    assert prepare(swapped).prior == F(1, 3)


# ============================================================
# 벨만 일관성과 q* 의 최적성
# ============================================================

def _bellman_rhs(problem, policy, vf, p, w):
    d = problem.discount
    step = policy.step(p, w)
    return sum(
        (o.prob * ((1 - d) * problem.v(o.action, o.posterior) + d * vf.value(o.posterior, o.promised_w))
         for o in step.outcomes),
        F(0),
    )


def test_bellman_consistency_example1(solver1):
    policy, vf = solver1.policy(), solver1.value_function()
    assert vf.value(F(1, 3), F(2, 3)) == F(1, 2) * 1 + F(1, 2) * vf.value(F(1, 3), F(5, 6))
    for p, w in [(F(1, 3), F(5, 6)), (F(3, 11), F(21, 22)), (F(7, 39), F(89, 78)),
                 (F(1, 12), F(11, 12)), (F(3, 4), F(3, 2))]:
        assert vf.value(p, w) == _bellman_rhs(solver1.problem, policy, vf, p, w), (p, w)


def test_bellman_consistency_random_instances():
    tol = F(1, 10 ** 12)
    for problem in random_instances(3, start=40):
        solver = PersuasionSolver(problem, normalized=True)
        policy, vf = solver.policy(), solver.value_function()
        env = solver.env
        for i in range(1, 12):
            p = F(i, 12)
            for t in (F(0), F(1, 3), F(1)):
                w = env.eval(p) + t * (env.eval_M(p) - env.eval(p))
                if policy.step(p, w).absorbed:
                    continue
                assert abs(vf.value(p, w) - _bellman_rhs(problem, policy, vf, p, w)) <= tol, (problem, p, w)


def test_q_star_maximises_value_ratio(solver1):
    # r(p) = V_{q̄¹}(p, m(p))/(1-p) 의 가장 큰 최대점
    points = [F(1, 6) + F(i, 48) for i in range(17)]
    rows = {row["p"]: row["ratio"] for row in solver1.value_function(F(1, 2)).curve(points)}
    best = rows[F(1, 3)]
    assert all(best >= r for r in rows.values())
    assert all(best > r for p, r in rows.items() if p > F(1, 3))


def test_q_star_beats_every_scanned_cutoff():
    for problem in random_instances(5, start=500):
        solver = PersuasionSolver(problem, normalized=True)
        lo, hi = solver.ladder.q1
        q_star = solver.q_star
        ratio = solver.value_function(hi)
        r = {p: ratio.value_at_prior(p) / (1 - p)
             for p in [lo + (hi - lo) * F(i, 32) for i in range(33)] + [x for x in solver.env.m.xs if lo <= x <= hi]
             if p < 1}
        r_star = ratio.value_at_prior(q_star) / (1 - q_star)
        assert all(r_star >= v for v in r.values()), problem
        assert all(r_star > v for p, v in r.items() if p > q_star), problem

        best = solver.value(problem.prior)
        cutoffs = [lo + (hi - lo) * F(i, 16) for i in range(17)]
        cutoffs += [x for x in solver.env.m.xs if lo <= x <= hi]
        for q in cutoffs:
            assert float(best) >= float(solver.value(problem.prior, q=q)) - 1e-9, (problem, q)


def test_q_star_dominates_upper_cutoff_pointwise(solver1):
    for i in range(1, 24):
        p = F(i, 24)
        assert solver1.value(p) >= solver1.value(p, q=F(1, 2)), p
