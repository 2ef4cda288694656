"""
포락선 m, M, 𝐰, m̄_q 테스트
"""
from fractions import Fraction

import pytest

from app.core.exceptions import InvalidCutoffs, NonConvexEnvelope, OutOfDomain, OutsideW
from app.solver import PersuasionSolver, PiecewiseLinearConvex, build_envelopes, m_bar

from tests.conftest import random_instances


F = Fraction


@pytest.fixture(scope="module")
def env1(example1):
    return build_envelopes(example1)


def test_example1_static_envelope(env1):
    assert env1.m.kinks == ((F(0), F(1)), (F(1, 3), F(2, 3)), (F(1), F(2)))
    assert env1.m.labels == ("a0", "a1")
    assert env1.eval(F(1, 6)) == F(5, 6)
    assert env1.eval_M(F(1, 3)) == F(4, 3)
    assert env1.eval_u_star(F(1, 3)) == F(1, 2)
    assert env1.P is None


def test_best_reply_and_static_action(env1):
    assert env1.best_reply(F(0)) == "a0"
    assert env1.best_reply(F(1)) == "a1"
    assert env1.static_action(F(1, 2)) == "a1"


def test_bold_w_values(env1):
    delta = F(1, 2)
    assert env1.bold_w(delta, F(1, 3)) == F(5, 6)
    assert env1.bold_w(delta, F(3, 11)) == F(21, 22)


def test_bold_w_makes_agent_indifferent(env1):
    delta = F(1, 2)
    for p in (F(1, 5), F(2, 7), F(5, 9)):
        w = env1.bold_w(delta, p)
        assert (1 - delta) * env1.eval_u_star(p) + delta * w == env1.eval(p)


def test_feasible_states(env1):
    assert env1.in_W(F(1, 3), F(2, 3))
    assert env1.in_W(F(1, 3), F(4, 3))
    assert not env1.in_W(F(1, 3), F(1, 2))
    with pytest.raises(OutsideW):
        env1.check_state(F(1, 3), F(3, 2))


def test_out_of_domain(env1):
    with pytest.raises(OutOfDomain):
        env1.eval(F(3, 2))


def test_example2_static_interval(example2):
    env = build_envelopes(example2)
    assert env.P == (F(0), F(1, 2))
    assert env.in_P(F(1, 4))
    assert env.static_action(F(1, 4)) == "a_star"


def test_m_bar_chords(env1):
    bar = m_bar(env1, F(1, 6), F(1, 2))
    # [q, 1] 에서는 (1/2, 1)-(1, 2) 현
    assert bar(F(3, 4)) == F(3, 2)
    assert bar(F(1, 3)) == F(2, 3)
    assert bar(F(1, 12)) == env1.eval(F(1, 12))
    for p in (F(i, 24) for i in range(25)):
        assert bar(p) >= env1.eval(p)


def test_m_bar_rejects_bad_cutoffs(env1):
    with pytest.raises(InvalidCutoffs):
        m_bar(env1, F(1, 2), F(1, 6))


def test_convexity_is_enforced():
    with pytest.raises(NonConvexEnvelope):
        PiecewiseLinearConvex(kinks=((F(0), F(0)), (F(1, 2), F(1)), (F(1), F(1))))
    with pytest.raises(InvalidCutoffs):
        PiecewiseLinearConvex(kinks=((F(0), F(0)), (F(1, 2), F(1))))


def test_kink_table(env1):
    rows = env1.kink_table()
    assert [row["p"] for row in rows] == [F(0), F(1, 3), F(1)]
    assert rows[-1]["M"] == F(2)


def test_envelope_ordering_on_q1():
    for problem in random_instances(4, start=300):
        solver = PersuasionSolver(problem, normalized=True)
        env, delta = solver.env, problem.discount
        lo, hi = solver.ladder.q1
        bar = m_bar(env, lo, solver.q_star)
        for i in range(41):
            p = F(i, 40)
            assert env.eval(p) <= bar(p) <= env.eval_M(p), (problem, p)
        for i in range(21):
            p = lo + (hi - lo) * F(i, 20)
            assert env.eval(p) <= env.bold_w(delta, p) <= env.eval_M(p), (problem, p)
