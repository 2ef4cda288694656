"""
로깅 설정
텍스트(기본) 또는 JSON 포맷으로 루트 로거를 구성
"""
import logging
import sys
from typing import Optional

from pythonjsonlogger import jsonlogger

from app.config.config import get_settings

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(level: Optional[str] = None, fmt: Optional[str] = None) -> None:
    """
    루트 로거 초기화 (CLI, API 시작 시 1회 호출)

    Args:
        level: 로그 레벨 (기본: settings.LOG_LEVEL)
        fmt: "text" 또는 "json" (기본: settings.LOG_FORMAT)
    """
    settings = get_settings()
    level = (level or settings.LOG_LEVEL).upper()
    fmt = (fmt or settings.LOG_FORMAT).lower()

    # 출력 스트림(stdout)은 결과 전용, 로그는 stderr
    handler = logging.StreamHandler(sys.stderr)
    if fmt == "json":
        handler.setFormatter(jsonlogger.JsonFormatter(LOG_FORMAT))
    else:
        handler.setFormatter(logging.Formatter(LOG_FORMAT))

    root = logging.getLogger()
    root.handlers = [handler]
    root.setLevel(level)
