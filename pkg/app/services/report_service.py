"""
보고서 서비스
사다리, 꺾임점, 가치 곡선, 격자, 경로, 트리를 DataFrame / CSV 로 출력
"""
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Union

import pandas as pd

from app.config.config import get_settings
from app.core.scalar import format_scalar, to_decimal
from app.models.results import Trajectory
from app.services.simulation_service import TreeNode
from app.solver.envelopes import Envelopes
from app.solver.oracle import Grid
from app.solver.thresholds import ThresholdLadder

logger = logging.getLogger(__name__)


class ReportService:
    """표 형식 출력 (정확값은 "num/den", 근사값은 digits 자리 십진)"""

    def __init__(self, digits: Optional[int] = None):
        self.digits = digits or get_settings().DEFAULT_DIGITS

    def _pair(self, row: dict, key: str, value) -> None:
        if value is None:
            row[key] = None
            row[f"{key}_decimal"] = None
            return
        row[key] = format_scalar(value)
        row[f"{key}_decimal"] = to_decimal(value, self.digits)

    # ============================================================
    # 해법 구조
    # ============================================================

    def ladder_frame(self, ladder: ThresholdLadder) -> pd.DataFrame:
        """k | q̲^k | q̄^k"""
        rows = []
        for k, (lo, hi) in enumerate(ladder.levels, start=1):
            row = {"k": k}
            self._pair(row, "lower", lo)
            self._pair(row, "upper", hi)
            rows.append(row)
        return pd.DataFrame(rows)

    def kink_frame(self, env: Envelopes) -> pd.DataFrame:
        rows = []
        for kink in env.kink_table():
            row = {"action_right": kink["action_right"]}
            for key in ("p", "m", "M", "u_star"):
                self._pair(row, key, kink[key])
            rows.append(row)
        return pd.DataFrame(rows)

    def value_curve_frame(self, curve: List[dict]) -> pd.DataFrame:
        """ValueFunction.curve 결과"""
        rows = []
        for point in curve:
            row: dict = {}
            for key in ("p", "value", "ratio"):
                self._pair(row, key, point[key])
            rows.append(row)
        return pd.DataFrame(rows)

    def grid_frame(self, grid: Grid) -> pd.DataFrame:
        """격자 값 덤프 (i, j, p, w, V)"""
        records = []
        for i in range(grid.n_p + 1):
            for j in range(grid.n_w + 1):
                records.append({
                    "i": i,
                    "j": j,
                    "p": float(grid.p[i]),
                    "w": float(grid.w[i][j]),
                    "value": float(grid.values[i][j]),
                })
        return pd.DataFrame(records)

    # ============================================================
    # 시뮬레이션
    # ============================================================

    def trajectories_frame(self, trajectories: Iterable[Trajectory]) -> pd.DataFrame:
        """경로별 기간 기록"""
        rows = []
        for path, traj in enumerate(trajectories):
            for rec in traj.records:
                rows.append({
                    "path": path,
                    "omega": traj.omega,
                    "period": rec.period,
                    "belief_before": format_scalar(rec.belief_before),
                    "promised_before": format_scalar(rec.promised_before),
                    "signal": rec.signal,
                    "belief_after": format_scalar(rec.belief_after),
                    "promised_w": format_scalar(rec.promised_w),
                    "action": rec.action,
                    "principal_flow": format_scalar(rec.principal_flow),
                    "agent_flow": format_scalar(rec.agent_flow),
                })
        return pd.DataFrame(rows)

    def tree_frame(self, nodes: Iterable[TreeNode]) -> pd.DataFrame:
        """도달 가능 트리 (노드 × 분기)"""
        rows = []
        for node in nodes:
            for s, o in enumerate(node.step.outcomes):
                rows.append({
                    "depth": node.depth,
                    "p": format_scalar(node.p),
                    "w": format_scalar(node.w),
                    "reach_prob": format_scalar(node.prob),
                    "region": node.step.region.value if node.step.region else None,
                    "absorbed": node.step.absorbed,
                    "signal": s,
                    "prob": format_scalar(o.prob),
                    "posterior": format_scalar(o.posterior),
                    "promised_w": format_scalar(o.promised_w),
                    "action": o.action,
                })
        return pd.DataFrame(rows)

    # ============================================================
    # 출력
    # ============================================================

    def write_csv(self, frame: pd.DataFrame, path: Optional[Union[str, Path]] = None) -> str:
        """CSV 문자열 반환, path 가 있으면 파일로도 저장"""
        text = frame.to_csv(index=False)
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
            logger.info(f"CSV 저장: {path} ({len(frame)}행)")
        return text


def get_report_service(digits: Optional[int] = None) -> ReportService:
    """ReportService 생성"""
    return ReportService(digits)
