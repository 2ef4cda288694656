"""
Core package
정확한 스칼라, 예외 계층, 로깅 설정
"""
from .scalar import (
    Scalar,
    to_scalar,
    format_scalar,
    to_decimal,
    scalar_pair,
    simplest_between,
    interval_str,
)
from .logging_config import setup_logging

__all__ = [
    "Scalar",
    "to_scalar",
    "format_scalar",
    "to_decimal",
    "scalar_pair",
    "simplest_between",
    "interval_str",
    "setup_logging",
]
