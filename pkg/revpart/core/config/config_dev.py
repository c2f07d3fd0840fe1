from typing import Literal

from pydantic_settings import SettingsConfigDict

from .base import BaseAppSettings


class DevSettings(BaseAppSettings):
    """개발 환경 설정.

    DEBUG 로그를 켜고 표본 검사 횟수를 줄여 반복 실행을 빠르게 합니다.
    """

    environment: Literal["development", "production", "test"] = "development"
    debug: bool = True
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "DEBUG"
    schwarz_samples: int = 20
    pure_state_samples: int = 50

    model_config = SettingsConfigDict(env_file=(".env", ".env.dev", ".env.development"))
