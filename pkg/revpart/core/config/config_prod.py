from typing import Literal

from pydantic_settings import SettingsConfigDict

from .base import BaseAppSettings


class ProdSettings(BaseAppSettings):
    """배치 분석 설정 (기본값)."""

    environment: Literal["development", "production", "test"] = "production"
    debug: bool = False

    model_config = SettingsConfigDict(env_file=(".env.prod", ".env.production"))
