"""
정확한 유리수 스칼라 유틸리티
"num/den" 문자열, 정수, 소수 문자열을 Fraction으로 변환하고 다시 출력
"""
import math
from decimal import ROUND_HALF_EVEN, Decimal, InvalidOperation, localcontext
from fractions import Fraction
from typing import Any, Tuple, Union

from app.core.exceptions import ParseError

Scalar = Fraction
ScalarLike = Union[int, str, Fraction]


def to_scalar(raw: Any, field: str = "value") -> Fraction:
    """
    입력 값을 정확한 유리수로 변환

    Args:
        raw: 정수, Fraction, "num/den" 또는 소수 문자열 ("0.25")
        field: 오류 메시지에 표시할 필드명

    Returns:
        기약분수 형태의 Fraction

    Raises:
        ParseError: 형식 오류 또는 분모 0
    """
    if isinstance(raw, bool):
        raise ParseError(f"{field}: 불리언은 스칼라가 아닙니다", value=raw)
    if isinstance(raw, Fraction):
        return raw
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, float):
        if not math.isfinite(raw):
            raise ParseError(f"{field}: 유한한 값이 아닙니다", value=raw)
        # JSON 실수는 표기 그대로의 소수로 해석
        return Fraction(Decimal(repr(raw)))
    if isinstance(raw, str):
        text = raw.strip()
        if "/" in text:
            num, _, den = text.partition("/")
            try:
                numerator = int(num.strip())
                denominator = int(den.strip())
            except ValueError:
                raise ParseError(f"{field}: 유리수 형식 오류 '{raw}'", value=raw)
            if denominator == 0:
                raise ParseError(f"{field}: 분모가 0입니다 '{raw}'", value=raw)
            return Fraction(numerator, denominator)
        try:
            return Fraction(Decimal(text))
        except (InvalidOperation, ValueError):
            raise ParseError(f"{field}: 숫자 형식 오류 '{raw}'", value=raw)
    raise ParseError(f"{field}: 지원하지 않는 타입 {type(raw).__name__}", value=raw)


def format_scalar(x: Fraction) -> str:
    """Fraction → "num/den" (정수면 "num")"""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def to_decimal(x: Fraction, digits: int = 12) -> str:
    """
    소수점 아래 digits 자리 십진 표기 (round-half-even)

    Args:
        x: 정확한 값
        digits: 소수 자릿수 (1~50)
    """
    x = Fraction(x)
    integer_digits = len(str(abs(x.numerator) // x.denominator))
    with localcontext() as ctx:
        ctx.prec = integer_digits + digits + 10
        value = Decimal(x.numerator) / Decimal(x.denominator)
        quantum = Decimal(1).scaleb(-digits)
        return str(value.quantize(quantum, rounding=ROUND_HALF_EVEN))


def scalar_pair(x: Fraction, digits: int = 12) -> dict:
    """정확한 값과 십진 근사값을 함께 반환"""
    return {"exact": format_scalar(x), "decimal": to_decimal(x, digits)}


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """
    닫힌 구간 [lo, hi] 안에서 분모가 가장 작은 유리수 (Stern-Brocot)

    연분수 전개를 따라 내려가며, 구간 안에 정수가 있으면 그 정수를 택한다.
    lo ≥ 0 을 가정한다.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        lo, hi = hi, lo
    # (정수부, 역수 구간) 스택으로 반복 전개
    prefix: list = []
    while True:
        floor_lo = lo.numerator // lo.denominator
        if floor_lo == lo:
            result = Fraction(floor_lo)
            break
        if floor_lo < hi.numerator // hi.denominator:
            result = Fraction(floor_lo + 1)
            break
        prefix.append(floor_lo)
        lo, hi = 1 / (hi - floor_lo), 1 / (lo - floor_lo)
    for integer_part in reversed(prefix):
        result = integer_part + 1 / result
    return result


def interval_str(interval: Tuple[Fraction, Fraction] | None) -> str:
    """구간 표기 ("∅" 또는 "[a, b]")"""
    if interval is None:
        return "∅"
    return f"[{format_scalar(interval[0])}, {format_scalar(interval[1])}]"
