"""
Baselines 패키지
비교 정책

Policies:
- KGBaseline: 일회성 설득 (정적 오목화)
- RandomDisclosure: 무작위 완전 공개
- DelayedDisclosure: 지연 완전 공개
- FirstBest: 완화 문제 상한
- BaselineComparison: 종합 비교
"""
from .base_baseline import BaseBaseline
from .kg_policy import KGBaseline, KGPolicy
from .random_disclosure import RandomDisclosure, RandomDisclosurePolicy
from .delayed_disclosure import DelayedDisclosure, DelayedDisclosurePolicy
from .first_best import FirstBest
from .comparison import BASELINES, BaselineComparison, get_policy, kg_matches_optimal

__all__ = [
    "BaseBaseline",
    "KGBaseline",
    "KGPolicy",
    "RandomDisclosure",
    "RandomDisclosurePolicy",
    "DelayedDisclosure",
    "DelayedDisclosurePolicy",
    "FirstBest",
    "BASELINES",
    "BaselineComparison",
    "get_policy",
    "kg_matches_optimal",
]
