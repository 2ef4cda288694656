"""
Baselines API Router
τ_{q*} 와 기준 정책 비교
"""
import logging
from typing import Any, Dict

from fastapi import APIRouter, HTTPException

from app.baselines import BASELINES, BaselineComparison
from app.core.exceptions import PersuasionError
from app.routers.solver import to_http_error
from app.solver import parse_problem

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/baselines", tags=["Baselines"])


@router.post("/compare")
async def compare(problem: Dict[str, Any]):
    """
    다섯 정책 비교표

    Examples:
        - POST /api/baselines/compare  (body: 문제 JSON)
    """
    try:
        comparison = BaselineComparison(parse_problem(problem))
        results = comparison.compare()
        return {
            "results": [r.model_dump(mode="json") for r in results],
            "ordering": comparison.check_ordering(results),
            "skipped": comparison.errors,
        }
    except PersuasionError as e:
        logger.error(f"기준 정책 비교 실패: {e.message}")
        raise to_http_error(e)
    except Exception as e:
        logger.error(f"기준 정책 비교 실패: {e}")
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/{policy}")
async def single_baseline(policy: str, problem: Dict[str, Any]):
    """kg | random | delayed | first_best 하나"""
    if policy not in BASELINES:
        raise HTTPException(status_code=404, detail=f"알 수 없는 정책: {policy}")
    try:
        comparison = BaselineComparison(parse_problem(problem))
        return comparison.baseline(policy).calculate().model_dump(mode="json")
    except PersuasionError as e:
        logger.error(f"{policy} 계산 실패: {e.message}")
        raise to_http_error(e)
    except Exception as e:
        logger.error(f"{policy} 계산 실패: {e}")
        raise HTTPException(status_code=500, detail=str(e))
