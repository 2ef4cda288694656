"""
문제 로딩, 검증, 정규화
"""
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from pydantic import ValidationError

from app.core.exceptions import (
    DiscountOutOfRange,
    DuplicateAction,
    MissingPayoff,
    NonPositivePrincipalPayoff,
    ParseError,
    PriorOutOfRange,
    TargetActionMissing,
    TooFewActions,
)
from app.models.problem import Problem

logger = logging.getLogger(__name__)


# ============================================================
# 입력
# ============================================================

def parse_problem(data: Dict[str, Any]) -> Problem:
    """
    딕셔너리(JSON 문서) → Problem

    Raises:
        ParseError: 필드 누락, 형식 오류, 분모 0
    """
    if not isinstance(data, dict):
        raise ParseError("문제 문서는 JSON 객체여야 합니다")
    try:
        return Problem.model_validate(data)
    except ValidationError as e:
        raise ParseError(f"문제 형식 오류: {e.errors()[0].get('msg', e)}", detail=str(e))


def load_problem(path: Union[str, Path]) -> Problem:
    """문제 파일 로드 (검증/정규화 전)"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"문제 파일을 읽을 수 없습니다: {path} ({e})", path=path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"JSON 파싱 실패: {path} ({e})", path=path)
    problem = parse_problem(data)
    logger.debug(f"문제 로드: {path} (actions={problem.actions})")
    return problem


def dump_problem(problem: Problem) -> str:
    """Problem → JSON 문자열 (유리수는 "num/den")"""
    return problem.model_dump_json(indent=2)


# ============================================================
# 검증
# ============================================================

def _static_max(problem: Problem) -> Tuple[Fraction, Fraction]:
    """(m(0), m(1)) = 상태별 최대 대리인 보수"""
    col0, col1 = problem.columns()
    return max(col0.values()), max(col1.values())


def validate(problem: Problem) -> Problem:
    """
    문제 인스턴스 불변식 검사

    a*가 p=0, p=1 모두에서 정적 최적이면 (P = [0,1]) trivial 태그를 붙인다.

    Returns:
        trivial 태그가 반영된 Problem

    Raises:
        TooFewActions, DuplicateAction, TargetActionMissing, MissingPayoff,
        NonPositivePrincipalPayoff, DiscountOutOfRange, PriorOutOfRange
    """
    actions = problem.actions
    if len(actions) < 2:
        raise TooFewActions(f"행동이 2개 이상이어야 합니다 (현재 {len(actions)})")
    if len(set(actions)) != len(actions):
        duplicates = sorted({a for a in actions if actions.count(a) > 1})
        raise DuplicateAction(f"중복 행동: {duplicates}", actions=duplicates)
    if problem.target_action not in actions:
        raise TargetActionMissing(
            f"목표 행동 '{problem.target_action}' 이 actions에 없습니다",
            target=problem.target_action,
        )
    missing = [a for a in actions if a not in problem.agent_payoff]
    extra = [a for a in problem.agent_payoff if a not in actions]
    if missing or extra:
        raise MissingPayoff(f"보수 표 불일치: 누락={missing}, 미정의={extra}")

    v0, v1 = problem.principal_payoff
    if v0 <= 0 or v1 <= 0:
        raise NonPositivePrincipalPayoff(
            f"v(a*,ω)는 양수여야 합니다: ({v0}, {v1})", v0=v0, v1=v1
        )
    if not 0 < problem.discount < 1:
        raise DiscountOutOfRange(f"δ ∈ (0,1) 이어야 합니다: {problem.discount}")
    if not 0 < problem.prior < 1:
        raise PriorOutOfRange(f"p₀ ∈ (0,1) 이어야 합니다: {problem.prior}")

    m0, m1 = _static_max(problem)
    u0, u1 = problem.agent_payoff[problem.target_action]
    trivial = u0 >= m0 and u1 >= m1
    if trivial:
        logger.warning("a*가 모든 믿음에서 정적 최적입니다 (P = [0,1]): 상수 정책")
    return problem.model_copy(update={"trivial": trivial})


# ============================================================
# 정규화
# ============================================================

def cost_ratios(problem: Problem) -> Tuple[Fraction, Fraction]:
    """((m(0)-u(a*,0))/v(a*,0), (m(1)-u(a*,1))/v(a*,1))"""
    m0, m1 = _static_max(problem)
    u0, u1 = problem.agent_payoff[problem.target_action]
    v0, v1 = problem.principal_payoff
    return (m0 - u0) / v0, (m1 - u1) / v1


def normalize(problem: Problem) -> Problem:
    """
    ω₁ 쪽 비용 비율이 ω₀ 쪽 이상이 되도록 상태 라벨 정렬

    비율이 같으면 원래 라벨 유지. 뒤집으면 보수 열을 바꾸고 p₀ → 1 - p₀,
    relabeled 플래그를 토글한다.
    """
    ratio0, ratio1 = cost_ratios(problem)
    if ratio1 >= ratio0:
        return problem

    swapped = {a: (pay[1], pay[0]) for a, pay in problem.agent_payoff.items()}
    v0, v1 = problem.principal_payoff
    logger.info(f"상태 라벨 교환: 비용 비율 ω₀={ratio0}, ω₁={ratio1}")
    return problem.model_copy(update={
        "agent_payoff": swapped,
        "principal_payoff": (v1, v0),
        "prior": 1 - problem.prior,
        "relabeled": not problem.relabeled,
    })


def prepare(problem: Problem) -> Problem:
    """검증 후 정규화"""
    return normalize(validate(problem))


# ============================================================
# 보고용 라벨 복원
# ============================================================

def report_belief(problem: Problem, p: Optional[Fraction]) -> Optional[Fraction]:
    """정규화된 믿음 → 원래 라벨 기준 P(ω₁)"""
    if p is None:
        return None
    return 1 - p if problem.relabeled else p


def report_interval(
        problem: Problem,
        interval: Optional[Tuple[Fraction, Fraction]]
) -> Optional[Tuple[Fraction, Fraction]]:
    """정규화된 구간 → 원래 라벨 기준 구간"""
    if interval is None:
        return None
    lo, hi = interval
    if problem.relabeled:
        return (1 - hi, 1 - lo)
    return (lo, hi)
