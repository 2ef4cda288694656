"""
정책 상태/분할 모델
상태 (p, w), 신호 분기, 한 기간 분할, 영역 태그
"""
from enum import Enum
from fractions import Fraction
from typing import List, Optional

from pydantic import BaseModel, ConfigDict

from app.models.base import ExactScalar


class Region(str, Enum):
    """τ_q 하의 𝒲 분할 영역"""
    W1 = "W1"
    W2 = "W2"
    W3 = "W3"
    W4 = "W4"
    ABSORBED = "Absorbed"


class Absorption(str, Enum):
    """경로 흡수 태그"""
    DEGENERATE_0 = "degenerate-0"
    DEGENERATE_1 = "degenerate-1"
    P_ABSORBED = "P-absorbed"
    HORIZON = "horizon-truncated"


class StatePoint(BaseModel):
    """믿음 p와 약속 효용 w"""

    model_config = ConfigDict(frozen=True)

    p: ExactScalar
    w: ExactScalar


class SplitOutcome(BaseModel):
    """신호 하나: (확률, 사후 믿음, 약속 효용, 추천 행동)"""

    model_config = ConfigDict(frozen=True)

    prob: ExactScalar
    posterior: ExactScalar
    promised_w: ExactScalar
    action: str


class PolicyStep(BaseModel):
    """상태 (p, w)에서의 한 기간 분할"""

    model_config = ConfigDict(frozen=True)

    p: ExactScalar
    w: ExactScalar
    region: Optional[Region] = None
    outcomes: List[SplitOutcome]
    absorbed: bool = False

    def target_outcomes(self, target_action: str) -> List[SplitOutcome]:
        """a*를 추천하는 분기들"""
        return [o for o in self.outcomes if o.action == target_action]

    def total_prob(self) -> Fraction:
        return sum((o.prob for o in self.outcomes), Fraction(0))

    def mean_posterior(self) -> Fraction:
        return sum((o.prob * o.posterior for o in self.outcomes), Fraction(0))
