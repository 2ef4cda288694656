"""
Solver API Router
문제 JSON 을 받아 해법 요약, 사다리/포락선, 한 기간 분할 반환
"""
import logging
from fractions import Fraction
from typing import Any, Dict, Optional

from fastapi import APIRouter, HTTPException
from pydantic import BaseModel

from app.core.exceptions import InputError, PersuasionError
from app.core.scalar import to_scalar
from app.models.base import jsonable
from app.solver import PersuasionSolver, parse_problem

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/solver", tags=["Solver"])


class StepRequest(BaseModel):
    """상태 (p, w) 에서의 분할 요청 (정규화된 라벨 기준)"""

    problem: Dict[str, Any]
    p: str
    w: Optional[str] = None
    q: Optional[str] = None


def to_http_error(e: PersuasionError) -> HTTPException:
    """입력 오류 400, 그 외 솔버 오류 422"""
    status = 400 if isinstance(e, InputError) else 422
    return HTTPException(status_code=status, detail=e.to_dict())


def build_solver(data: Dict[str, Any]) -> PersuasionSolver:
    return PersuasionSolver(parse_problem(data))


# ============================================================
# 엔드포인트
# ============================================================

@router.post("/solve")
async def solve(problem: Dict[str, Any]):
    """
    임계값, q*, 최적값, T_δ

    Examples:
        - POST /api/solver/solve  (body: 문제 JSON)
    """
    try:
        return build_solver(problem).solve().model_dump(mode="json")
    except PersuasionError as e:
        logger.error(f"해법 계산 실패: {e.message}")
        raise to_http_error(e)
    except Exception as e:
        logger.error(f"해법 계산 실패: {e}")
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/trace")
async def trace(problem: Dict[str, Any]):
    """Q^k 사다리와 m 의 꺾임점"""
    try:
        solver = build_solver(problem)
        ladder = solver.ladder
        return jsonable({
            "kinks": solver.env.kink_table(),
            "P": solver.env.P,
            "ladder": [list(level) for level in ladder.levels] if ladder else [],
            "k_star": ladder.k_star if ladder else None,
            "q_inf": ladder.q_inf if ladder else None,
            "q_star": solver.q_star,
        })
    except PersuasionError as e:
        logger.error(f"사다리 계산 실패: {e.message}")
        raise to_http_error(e)
    except Exception as e:
        logger.error(f"사다리 계산 실패: {e}")
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/step")
async def step(request: StepRequest):
    """
    상태 (p, w) 의 영역과 분할

    w 생략 시 m(p), q 생략 시 q*.
    """
    try:
        solver = build_solver(request.problem)
        p = to_scalar(request.p, "p")
        w = to_scalar(request.w, "w") if request.w is not None else solver.env.eval(p)
        q: Optional[Fraction] = to_scalar(request.q, "q") if request.q is not None else None
        policy = solver.policy(q)
        result = policy.step(p, w).model_dump(mode="json")
        result["value"] = jsonable(solver.value(p, w, q))
        return result
    except PersuasionError as e:
        logger.error(f"분할 계산 실패: {e.message}")
        raise to_http_error(e)
    except Exception as e:
        logger.error(f"분할 계산 실패: {e}")
        raise HTTPException(status_code=500, detail=str(e))
