from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict


class BaseAppSettings(BaseSettings):
    """공통 애플리케이션 설정.

    모든 필드는 ``REVPART_`` 접두사 환경변수로 덮어쓸 수 있습니다.
    (예: ``REVPART_TOL=1e-8`` -> ``tol``)
    """

    environment: Literal["development", "production", "test"] = "test"
    debug: bool = False
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    project_name: str = "revpart"

    # 수치 허용오차 (Tolerance 기본값)
    tol: float | None = None
    rank_gap: float = 1e-7
    iter_max: int = 10_000
    conv_tol: float = 1e-12

    # 재현성 및 리포트
    seed: int = 0
    report_k_cap: int = 6
    schwarz_samples: int = 100
    pure_state_samples: int = 200

    model_config = SettingsConfigDict(
        env_prefix="REVPART_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )
