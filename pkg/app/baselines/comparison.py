"""
기준 정책 종합 비교
τ_{q*}, KG, 무작위 공개, 지연 공개, 완화 문제
"""
import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Optional

import pandas as pd

from app.core.exceptions import PriorOutsideQ1
from app.core.scalar import format_scalar, to_decimal
from app.models.problem import Problem
from app.models.results import BaselineResult
from app.solver.base_policy import DisclosurePolicy
from app.solver.solver import PersuasionSolver

from .base_baseline import BaseBaseline
from .delayed_disclosure import DelayedDisclosure
from .first_best import FirstBest
from .kg_policy import KGBaseline
from .random_disclosure import RandomDisclosure

logger = logging.getLogger(__name__)

BASELINES = {
    "kg": KGBaseline,
    "random": RandomDisclosure,
    "delayed": DelayedDisclosure,
    "first_best": FirstBest,
}


class BaselineComparison:
    """
    다섯 정책 비교

    1. optimal (τ_{q*})
    2. kg (일회성 설득)
    3. random (무작위 완전 공개)
    4. delayed (지연 완전 공개)
    5. first_best (완화 문제 상한)
    """

    def __init__(self, problem: Problem, solver: Optional[PersuasionSolver] = None):
        """
        Args:
            problem: 원래 문제 (solver 가 주어지면 무시)
            solver: 이미 구성된 솔버
        """
        self.solver = solver or PersuasionSolver(problem)
        self.problem = self.solver.problem
        self.env = self.solver.env
        self.errors: Dict[str, str] = {}

    def baseline(self, name: str) -> BaseBaseline:
        if name not in BASELINES:
            raise KeyError(name)
        return BASELINES[name](self.problem, self.env)

    def optimal(self) -> BaselineResult:
        summary = self.solver.solve()
        return BaselineResult(
            policy="optimal",
            principal_value=summary.value,
            agent_value=summary.agent_value,
            parameters={"q_star": summary.q_star, "T_delta": summary.t_delta},
            note=summary.notice,
        )

    def compare(self) -> List[BaselineResult]:
        """실현 가능한 정책들의 결과 (Q¹ 밖이라 불가능한 정책은 errors 에 기록)"""
        logger.info(f"기준 정책 비교 시작: p₀={self.problem.prior}")
        results = [self.optimal()]
        for name in BASELINES:
            try:
                results.append(self.baseline(name).calculate())
            except PriorOutsideQ1 as e:
                logger.warning(f"{name} 생략: {e.message}")
                self.errors[name] = e.message
        return results

    def check_ordering(self, results: Optional[List[BaselineResult]] = None) -> Dict[str, bool]:
        """KG ≤ V* ≤ first best, random ≤ V*, delayed ≤ random"""
        results = results or self.compare()
        values = {r.policy: r.principal_value for r in results}
        checks: Dict[str, bool] = {}
        optimal = values["optimal"]
        checks["kg<=optimal"] = values["kg"] <= optimal
        checks["optimal<=first_best"] = optimal <= values["first_best"]
        if "random" in values:
            checks["random<=optimal"] = values["random"] <= optimal
        if "random" in values and "delayed" in values:
            checks["delayed<=random"] = values["delayed"] <= values["random"]
        return checks

    def to_frame(self, results: Optional[List[BaselineResult]] = None, digits: int = 12) -> pd.DataFrame:
        """정책 | 주체 값 | 대리인 값 | 파라미터 표"""
        results = results or self.compare()
        rows = []
        for r in results:
            rows.append({
                "policy": r.policy,
                "principal_value": format_scalar(r.principal_value),
                "principal_decimal": to_decimal(r.principal_value, digits),
                "agent_value": format_scalar(r.agent_value),
                "agent_decimal": to_decimal(r.agent_value, digits),
                "parameters": _format_parameters(r.parameters),
            })
        return pd.DataFrame(rows)


def _format_parameters(parameters: Dict) -> str:
    parts = []
    for key, value in parameters.items():
        if isinstance(value, Fraction):
            value = format_scalar(value)
        elif isinstance(value, list):
            value = " + ".join(
                f"{format_scalar(item['prob'])}@{format_scalar(item['posterior'])}" for item in value
            )
        parts.append(f"{key}={value}")
    return "; ".join(parts)


def get_policy(name: str, solver: PersuasionSolver) -> DisclosurePolicy:
    """시뮬레이션용 정책 (optimal | kg | random | delayed)"""
    if name == "optimal":
        return solver.policy()
    baseline = BASELINES[name](solver.problem, solver.env)
    policy = baseline.as_policy()
    if policy is None:
        raise KeyError(f"{name} 은(는) 시뮬레이션할 수 없는 정책입니다")
    return policy


def kg_matches_optimal(problem: Problem, priors: Iterable[Fraction]) -> List[Dict[str, object]]:
    """
    행동이 두 개인 문제에서 KG 값과 V_{q*}(p, m(p)) 비교

    Returns:
        [{"p", "kg", "optimal", "equal"}]
    """
    solver = PersuasionSolver(problem)
    kg = KGBaseline(solver.problem, solver.env)
    rows = []
    for p in priors:
        p = Fraction(p)
        kg_value = kg.value_at(p)
        optimal = solver.value(p)
        rows.append({"p": p, "kg": kg_value, "optimal": optimal, "equal": kg_value == optimal})
    if len(solver.problem.actions) != 2:
        logger.warning("행동이 두 개가 아닌 문제: KG 와 최적값의 일치는 보장되지 않습니다")
    return rows
