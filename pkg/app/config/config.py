"""
Oldtown 프로젝트 환경 설정
이진 상태 반복 설득(persuasion) 계약 솔버
"""
from fractions import Fraction
from functools import lru_cache

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """애플리케이션 설정"""

    # ============================================================
    # 프로젝트 기본 정보
    # ============================================================
    PROJECT_NAME: str = "Oldtown"
    VERSION: str = "1.0.0"
    DESCRIPTION: str = "Exact solver for binary-state repeated persuasion contracts"

    # ============================================================
    # 임계값 사다리 (Q^k) 설정
    # ============================================================
    LADDER_MAX_LEVELS: int = 10000
    LADDER_STEP_BOUND: str = "1/1099511627776"  # 2^-40, 폭 변화가 이보다 작으면 Q^∞로 전환

    # ============================================================
    # q* 탐색 설정
    # ============================================================
    Q_STAR_BISECTION_DEPTH: int = 40
    Q_STAR_PROBE_ETA: str = "1/1048576"  # 2^-20, 기울기 탐침 오프셋
    Q_STAR_SCAN_POINTS: int = 32  # Q¹ 균등 후보 격자 칸 수

    # ============================================================
    # 최적성 검증 그리드
    # ============================================================
    VERIFY_GRID_P: int = 257
    VERIFY_GRID_W: int = 65

    # ============================================================
    # 그리드 오라클 (가치 반복)
    # ============================================================
    ORACLE_NP: int = 120
    ORACLE_NW: int = 40
    ORACLE_TOL: float = 1e-6
    ORACLE_MAX_ITERS: int = 500
    ORACLE_CHUNK_SIZE: int = 1024  # 평면 최소값 계산 시 상태 묶음 크기

    # ============================================================
    # 시뮬레이션
    # ============================================================
    DEFAULT_SEED: int = 20240607
    DEFAULT_PATHS: int = 10000
    DEFAULT_HORIZON: int = 60
    DELAYED_T_CAP: int = 10000  # p₀ ∈ P 일 때 T* 대신 보고하는 상한

    # 병렬 작업자 수 (오라클 스윕)
    THREADS: int = 4

    # ============================================================
    # 출력 설정
    # ============================================================
    DEFAULT_DIGITS: int = 12

    # ============================================================
    # 로깅 설정
    # ============================================================
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "text"  # text | json

    # ============================================================
    # API 설정
    # ============================================================
    API_HOST: str = "0.0.0.0"
    API_PORT: int = 8200
    API_RELOAD: bool = False

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = True
        extra = "ignore"

    # ============================================================
    # 유틸리티 프로퍼티
    # ============================================================

    @property
    def ladder_step_bound(self) -> Fraction:
        """사다리 수렴 판정 폭 (정확한 유리수)"""
        return Fraction(self.LADDER_STEP_BOUND)

    @property
    def q_star_probe_eta(self) -> Fraction:
        """q* 탐침 오프셋 η (정확한 유리수)"""
        return Fraction(self.Q_STAR_PROBE_ETA)


@lru_cache()
def get_settings() -> Settings:
    """설정 객체 반환 (캐싱)"""
    return Settings()
