"""
Solver package
포락선, 임계값 사다리, τ_q 정책, 가치 함수, 검증, 격자 오라클
"""
from .problem import (
    parse_problem,
    load_problem,
    dump_problem,
    validate,
    normalize,
    prepare,
    cost_ratios,
    report_belief,
    report_interval,
)
from .envelopes import PiecewiseLinearConvex, Envelopes, build_envelopes, bold_w, m_bar
from .thresholds import (
    Split,
    ThresholdLadder,
    compute_Q1,
    compute_ladder,
    compute_Q_inf,
    split_phi_lambda,
)
from .base_policy import DisclosurePolicy
from .policy import PolicyTau
from .value import ValueFunction, compute_q_star
from .verification import OptimalityVerifier, verify_optimality
from .oracle import Grid, GridOracle, caratheodory_support, compare_with_exact
from .solver import PersuasionSolver

__all__ = [
    "parse_problem",
    "load_problem",
    "dump_problem",
    "validate",
    "normalize",
    "prepare",
    "cost_ratios",
    "report_belief",
    "report_interval",
    "PiecewiseLinearConvex",
    "Envelopes",
    "build_envelopes",
    "bold_w",
    "m_bar",
    "Split",
    "ThresholdLadder",
    "compute_Q1",
    "compute_ladder",
    "compute_Q_inf",
    "split_phi_lambda",
    "DisclosurePolicy",
    "PolicyTau",
    "ValueFunction",
    "compute_q_star",
    "OptimalityVerifier",
    "verify_optimality",
    "Grid",
    "GridOracle",
    "caratheodory_support",
    "compare_with_exact",
    "PersuasionSolver",
]
