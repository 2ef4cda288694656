"""
솔버 예외 계층
모든 예외는 CLI 종료 코드와 안정적인 오류 코드 문자열을 가진다

ValueError를 상속하지 않으므로 pydantic 검증기 안에서 발생해도 그대로 전파된다.
"""
from typing import Any, Dict


class PersuasionError(Exception):
    """솔버 예외 최상위 클래스"""

    exit_code: int = 3
    code: str = "persuasion_error"

    def __init__(self, message: str = "", **context: Any):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.context = context

    def to_dict(self) -> Dict[str, Any]:
        """JSON 응답/출력용 딕셔너리"""
        return {
            "error": self.code,
            "message": self.message,
            "context": {k: str(v) for k, v in self.context.items()},
        }


# ============================================================
# 입력 오류 (exit 1)
# ============================================================

class InputError(PersuasionError):
    exit_code = 1
    code = "input_error"


class ParseError(InputError):
    code = "parse_error"


class UsageError(InputError):
    code = "usage_error"


class HorizonTooSmall(InputError):
    code = "horizon_too_small"


# ============================================================
# 문제 정의 오류 (exit 2)
# ============================================================

class InvalidProblemError(PersuasionError):
    exit_code = 2
    code = "invalid_problem"


class NonPositivePrincipalPayoff(InvalidProblemError):
    code = "non_positive_principal_payoff"


class DiscountOutOfRange(InvalidProblemError):
    code = "discount_out_of_range"


class PriorOutOfRange(InvalidProblemError):
    code = "prior_out_of_range"


class DuplicateAction(InvalidProblemError):
    code = "duplicate_action"


class TargetActionMissing(InvalidProblemError):
    code = "target_action_missing"


class TooFewActions(InvalidProblemError):
    code = "too_few_actions"


class MissingPayoff(InvalidProblemError):
    code = "missing_payoff"


# ============================================================
# 정의역 오류 (exit 2)
# ============================================================

class DomainError(PersuasionError):
    exit_code = 2
    code = "domain_error"


class OutOfDomain(DomainError):
    code = "out_of_domain"


class OutsideW(DomainError):
    code = "outside_w"


class InvalidCutoffs(DomainError):
    code = "invalid_cutoffs"


class NoIntersection(DomainError):
    code = "no_intersection"


class DegenerateLine(DomainError):
    code = "degenerate_line"


class EmptyQ1(DomainError):
    code = "empty_q1"


class PriorOutsideQ1(DomainError):
    code = "prior_outside_q1"


# ============================================================
# 계산 오류 (exit 3)
# ============================================================

class ComputationError(PersuasionError):
    exit_code = 3
    code = "computation_error"


class LadderDiverged(ComputationError):
    code = "ladder_diverged"


class DegenerateSystem(ComputationError):
    code = "degenerate_system"


class NonConvexEnvelope(ComputationError):
    code = "non_convex_envelope"


class InfeasibleState(ComputationError):
    code = "infeasible_state"


class MaxItersExceeded(ComputationError):
    code = "max_iters_exceeded"


class HullFailure(ComputationError):
    code = "hull_failure"


class VerificationFailed(PersuasionError):
    exit_code = 3
    code = "verification_failed"
