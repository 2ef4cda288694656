"""
결과 모델
해법 요약, 기준 정책, 검증/오라클/시뮬레이션/감사 보고서
"""
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_serializer

from app.models.base import ExactScalar, jsonable
from app.models.policy import Absorption


# ============================================================
# 해법 요약
# ============================================================

class SolveResult(BaseModel):
    """τ_{q*} 해법 요약 (정규화된 방향 기준, relabeled 이면 믿음은 1-p 로 보고)"""

    model_config = ConfigDict(frozen=True)

    prior: ExactScalar
    relabeled: bool
    trivial: bool
    q1: Optional[Tuple[ExactScalar, ExactScalar]]
    q_star: Optional[ExactScalar]
    q_inf: Optional[Tuple[ExactScalar, ExactScalar]]
    static_interval: Optional[Tuple[ExactScalar, ExactScalar]]
    k_star: Optional[int]
    value: ExactScalar
    agent_value: ExactScalar
    t_delta: Optional[int]
    notice: Optional[str] = None


# ============================================================
# 기준 정책
# ============================================================

class BaselineResult(BaseModel):
    """기준 정책 결과"""

    model_config = ConfigDict(frozen=True)

    policy: str
    principal_value: ExactScalar
    agent_value: ExactScalar
    parameters: Dict[str, Any] = Field(default_factory=dict)
    note: Optional[str] = None

    @field_serializer("parameters")
    def _serialize_parameters(self, parameters: Dict[str, Any]) -> Dict[str, Any]:
        return jsonable(parameters)


# ============================================================
# 최적성 검증
# ============================================================

class CheckResult(BaseModel):
    """검증 항목 하나"""

    name: str
    passed: bool
    checked: int = 0
    violations: int = 0
    worst_violation: ExactScalar = 0
    location: Optional[str] = None


class VerificationReport(BaseModel):
    """최적성 조건 검증 보고서"""

    q: ExactScalar
    grid_p: int
    grid_w: int
    passed: bool
    checks: List[CheckResult] = Field(default_factory=list)
    error: Optional[str] = None

    def check(self, name: str) -> Optional[CheckResult]:
        for c in self.checks:
            if c.name == name:
                return c
        return None


# ============================================================
# 그리드 오라클
# ============================================================

class ConvergenceReport(BaseModel):
    """가치 반복 수렴 보고서"""

    iterations: int
    converged: bool
    tol: float
    deltas: List[float] = Field(default_factory=list)
    observed_modulus: Optional[float] = None
    monotone: bool = True


class SupportPoint(BaseModel):
    """오라클 최적 분할의 지지점"""

    weight: ExactScalar
    posterior: float
    promised_w: float
    action: str
    branch_value: float


class OracleComparison(BaseModel):
    """해석해 대비 그리드 값 비교"""

    n_p: int
    n_w: int
    grid_value: float
    exact_value: ExactScalar
    gap: float
    refined_gap: Optional[float] = None
    budget: float = 0.01
    within_budget: bool = True
    convergence: Optional[ConvergenceReport] = None


# ============================================================
# 시뮬레이션
# ============================================================

class PeriodRecord(BaseModel):
    """한 기간 기록"""

    period: int
    belief_before: ExactScalar
    promised_before: ExactScalar
    signal: int
    belief_after: ExactScalar
    promised_w: ExactScalar
    action: str
    principal_flow: ExactScalar
    agent_flow: ExactScalar


class Trajectory(BaseModel):
    """실현된 경로 하나"""

    omega: int
    records: List[PeriodRecord] = Field(default_factory=list)
    principal_total: ExactScalar
    agent_total: ExactScalar
    absorption: Absorption
    absorbed_at: Optional[int] = None
    tail_bound: ExactScalar = 0
    warning: Optional[str] = None


class MonteCarloSummary(BaseModel):
    """몬테카를로 추정 요약"""

    policy: str
    n_paths: int
    horizon: int
    seed: int
    principal_mean: float
    principal_stderr: float
    agent_mean: float
    agent_stderr: float
    absorption_counts: Dict[str, int] = Field(default_factory=dict)
    max_absorption_period: Optional[int] = None
    tail_bound: float = 0.0


# ============================================================
# 감사
# ============================================================

class AuditViolation(BaseModel):
    """감사 위반 한 건"""

    p: ExactScalar
    w: ExactScalar
    kind: str
    magnitude: ExactScalar
    detail: Optional[str] = None


class AuditReport(BaseModel):
    """IC / 약속 이행 / 마팅게일 감사 보고서"""

    kind: str
    nodes: int
    passed: bool
    violations: List[AuditViolation] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)

    @field_serializer("details")
    def _serialize_details(self, details: Dict[str, Any]) -> Dict[str, Any]:
        return jsonable(details)
