from .base import ExactScalar, jsonable
from .problem import Problem
from .policy import Region, Absorption, StatePoint, SplitOutcome, PolicyStep
from .results import (
    SolveResult,
    BaselineResult,
    CheckResult,
    VerificationReport,
    ConvergenceReport,
    SupportPoint,
    OracleComparison,
    PeriodRecord,
    Trajectory,
    MonteCarloSummary,
    AuditViolation,
    AuditReport,
)
from .run_config import RunConfig

__all__ = [
    "ExactScalar",
    "jsonable",
    "Problem",
    "Region",
    "Absorption",
    "StatePoint",
    "SplitOutcome",
    "PolicyStep",
    "SolveResult",
    "BaselineResult",
    "CheckResult",
    "VerificationReport",
    "ConvergenceReport",
    "SupportPoint",
    "OracleComparison",
    "PeriodRecord",
    "Trajectory",
    "MonteCarloSummary",
    "AuditViolation",
    "AuditReport",
    "RunConfig",
]
