"""
IC / 약속 이행 / 마팅게일 감사 테스트
"""
from fractions import Fraction

import numpy as np
import pytest

from app.baselines import get_policy
from app.models.policy import PolicyStep
from app.services import AuditService, SimulationService, get_audit_service
from app.solver import PolicyTau


F = Fraction


class ShortchangingPolicy(PolicyTau):
    """a* 분기의 약속을 1/1000 만큼 깎는 정책"""

    def step(self, p: Fraction, w: Fraction) -> PolicyStep:
        step = super().step(p, w)
        if step.absorbed:
            return step
        outcomes = [
            o.model_copy(update={"promised_w": o.promised_w - F(1, 1000)}) if o.action == self.env.target else o
            for o in step.outcomes
        ]
        return step.model_copy(update={"outcomes": outcomes})


def test_optimal_policy_is_incentive_compatible(solver1):
    audit = AuditService(solver1.problem, solver1.policy(), check_indifference=True)
    report = audit.audit_ic(depth=10)
    assert report.passed, report.violations
    assert report.nodes > 0
    assert report.details["policy"] == "optimal"


@pytest.mark.parametrize("name", ["random", "delayed", "kg"])
def test_baselines_are_incentive_compatible(solver1, name):
    report = get_audit_service(solver1.problem, get_policy(name, solver1)).audit_ic(depth=8)
    assert report.passed, report.violations


def test_shortchanged_promises_are_flagged(solver1):
    policy = ShortchangingPolicy(solver1.problem, solver1.env, solver1.ladder, solver1.q_star)
    report = AuditService(solver1.problem, policy).audit_ic(depth=6)
    assert not report.passed
    kinds = {v.kind for v in report.violations}
    assert "ic" in kinds
    assert "promise" in kinds
    assert all(v.magnitude > 0 for v in report.violations)


def test_martingale_tree(solver1):
    report = AuditService(solver1.problem, solver1.policy()).audit_martingale_tree(depth=10)
    assert report.passed
    assert report.kind == "martingale-tree"


def test_martingale_paths(solver1):
    policy = solver1.policy()
    _, _, beliefs = SimulationService(solver1.problem, policy, threads=2).monte_carlo(
        n_paths=20_000, horizon=20, seed=9,
    )
    report = AuditService(solver1.problem, policy).audit_martingale_paths(beliefs)
    assert report.passed, report.details
    assert len(report.details["means"]) == 5


def test_biased_paths_fail(solver1):
    beliefs = np.full((1000, 3), 0.5)
    beliefs[:, 0] = 1 / 3
    report = AuditService(solver1.problem, solver1.policy()).audit_martingale_paths(beliefs)
    assert not report.passed
    assert len(report.violations) == 2
