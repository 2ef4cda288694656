"""
기준 정책 (KG, 무작위/지연 공개, 완화 문제) 테스트
"""
from fractions import Fraction

import pytest

from app.baselines import (
    BaselineComparison,
    DelayedDisclosure,
    FirstBest,
    KGBaseline,
    RandomDisclosure,
    get_policy,
    kg_matches_optimal,
)
from app.core.exceptions import PriorOutsideQ1
from app.solver import PersuasionSolver

from tests.conftest import random_instances


F = Fraction


def _baseline(cls, solver):
    return cls(solver.problem, solver.env)


def test_example1_random_disclosure(solver1):
    baseline = _baseline(RandomDisclosure, solver1)
    assert baseline.alpha() == F(1, 4)
    result = baseline.calculate()
    assert result.principal_value == F(4, 5)
    assert result.agent_value == F(2, 3)
    assert result.parameters["alpha"] == F(1, 4)


def test_example1_delayed_disclosure(solver1):
    baseline = _baseline(DelayedDisclosure, solver1)
    assert baseline.ratio() == F(1, 5)
    assert baseline.periods() == 2
    result = baseline.calculate()
    assert result.principal_value == F(3, 4)
    assert result.agent_value == F(17, 24)
    assert result.parameters["T"] == 2


def test_example1_kg(solver1):
    result = _baseline(KGBaseline, solver1).calculate()
    assert result.principal_value == 0
    assert result.agent_value == F(2, 3)
    assert result.note


def test_example1_first_best(solver1):
    baseline = _baseline(FirstBest, solver1)
    assert baseline.costs() == (F(1, 2), F(3, 2))
    assert baseline.alphas(F(1, 3)) == (F(1), F(2, 3))
    result = baseline.calculate()
    assert result.principal_value == F(8, 9)
    # 참여 제약이 등호로 성립
    assert result.agent_value == F(2, 3)


def test_symmetric_costs_coincide(symmetric):
    solver = PersuasionSolver(symmetric)
    random_value = _baseline(RandomDisclosure, solver).calculate().principal_value
    first_best = _baseline(FirstBest, solver).calculate().principal_value
    assert random_value == first_best == solver.value(symmetric.prior) == F(4, 3)


def test_prior_outside_q1(solver2):
    with pytest.raises(PriorOutsideQ1):
        _baseline(RandomDisclosure, solver2).calculate()
    with pytest.raises(PriorOutsideQ1):
        _baseline(DelayedDisclosure, solver2).calculate()


def test_example2_kg_split(solver2):
    kg = _baseline(KGBaseline, solver2)
    assert kg.split(F(3, 4)) == [(F(1, 2), F(1, 2)), (F(1, 2), F(1))]
    assert kg.split(F(1, 4)) == [(F(1), F(1, 4))]
    assert kg.value_at(F(3, 4)) == F(1, 2)


def test_kg_matches_optimal_with_two_actions(example2):
    rows = kg_matches_optimal(example2, [F(i, 10) for i in range(11)])
    assert len(rows) == 11
    assert all(row["equal"] for row in rows)
    assert rows[8]["kg"] == F(2, 5)


def test_comparison_table(solver1):
    comparison = BaselineComparison(solver1.problem, solver1)
    results = comparison.compare()
    values = {r.policy: r.principal_value for r in results}
    assert values == {
        "optimal": F(1285, 1536),
        "kg": F(0),
        "random": F(4, 5),
        "delayed": F(3, 4),
        "first_best": F(8, 9),
    }
    assert all(comparison.check_ordering(results).values())

    frame = comparison.to_frame(results, digits=6)
    assert list(frame["policy"]) == ["optimal", "kg", "random", "delayed", "first_best"]
    assert frame.loc[0, "principal_value"] == "1285/1536"
    assert frame.loc[2, "parameters"].startswith("alpha=1/4")


def test_comparison_records_skipped_baselines(solver2):
    comparison = BaselineComparison(solver2.problem, solver2)
    results = comparison.compare()
    assert {r.policy for r in results} == {"optimal", "kg", "first_best"}
    assert set(comparison.errors) == {"random", "delayed"}


def test_simulable_policies(solver1):
    assert get_policy("optimal", solver1).name == "optimal"
    assert get_policy("random", solver1).name == "random"
    with pytest.raises(KeyError):
        get_policy("first_best", solver1)


@pytest.mark.slow
def test_ordering_on_random_instances():
    for problem in random_instances(50, start=500):
        comparison = BaselineComparison(problem, PersuasionSolver(problem, normalized=True))
        results = comparison.compare()
        assert comparison.errors == {}
        assert all(comparison.check_ordering(results).values()), problem


def test_ordering_on_a_few_random_instances():
    for problem in random_instances(5, start=500):
        solver = PersuasionSolver(problem, normalized=True)
        comparison = BaselineComparison(problem, solver)
        results = comparison.compare()
        values = {r.policy: r.principal_value for r in results}
        assert values["kg"] <= values["optimal"], problem
        assert all(comparison.check_ordering(results).values()), problem
