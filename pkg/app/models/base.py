"""
모델 공통 타입
정확한 유리수 필드 (입력: "num/den"/정수/소수 문자열, 출력: "num/den")
"""
from fractions import Fraction
from typing import Annotated, Any

from pydantic import PlainSerializer, PlainValidator, WithJsonSchema

from app.core.scalar import format_scalar, to_scalar


def _validate_scalar(value: Any) -> Fraction:
    return to_scalar(value)


ExactScalar = Annotated[
    Fraction,
    PlainValidator(_validate_scalar),
    PlainSerializer(format_scalar, return_type=str),
    WithJsonSchema({"type": "string", "examples": ["1/3", "2"]}),
]


def jsonable(obj: Any) -> Any:
    """Fraction을 "num/den" 문자열로 바꾸며 재귀 변환"""
    if isinstance(obj, Fraction):
        return format_scalar(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return obj
