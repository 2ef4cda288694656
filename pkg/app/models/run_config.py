"""
CLI 실행 설정 모델
"""
from typing import Literal, Optional

from pydantic import BaseModel, Field


class RunConfig(BaseModel):
    """명령 하나의 실행 설정 (그리드 ≥ 8, 자릿수 1~50)"""

    command: Literal["solve", "trace", "compare", "verify", "simulate"]
    problem_path: str
    output_format: Literal["text", "json", "csv"] = "text"
    digits: int = Field(12, ge=1, le=50)
    seed: int = 0

    # 검증 / 오라클
    grid_p: int = Field(257, ge=8)
    grid_w: int = Field(65, ge=8)
    oracle: bool = False
    oracle_np: int = Field(120, ge=8)
    oracle_nw: int = Field(40, ge=8)
    dump_grid: Optional[str] = None
    q: Optional[str] = None

    # 추적
    ladder: bool = False
    envelope: bool = False
    values: bool = False

    # 시뮬레이션
    policy: Literal["optimal", "kg", "random", "delayed"] = "optimal"
    paths: int = Field(10000, ge=1)
    horizon: int = Field(60, ge=1)
    tree_depth: Optional[int] = Field(None, ge=0)
    out_csv: Optional[str] = None
    threads: int = Field(4, ge=1)
