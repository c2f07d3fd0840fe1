"""
설정(REVPART_* 환경변수) 테스트

실행 방법:
    uv run pytest tests/test_config.py -v
"""

from unittest.mock import patch

import numpy as np
import pytest

from revpart import algebra
from revpart.core.config import BaseAppSettings, DevSettings, ProdSettings, get_settings
from revpart.numerics import Tolerance


@pytest.fixture(autouse=True)
def fresh_settings():
    """각 테스트 전후로 settings 캐시를 비웁니다."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


class TestEnvironment:
    """REVPART_ENVIRONMENT 에 따른 설정 클래스 선택"""

    @pytest.mark.parametrize(
        "environment, expected",
        [
            ("development", DevSettings),
            ("production", ProdSettings),
            ("test", BaseAppSettings),
        ],
    )
    def test_settings_class(self, monkeypatch, environment, expected):
        monkeypatch.setenv("REVPART_ENVIRONMENT", environment)
        assert type(get_settings()) is expected

    def test_dev_enables_debug(self, monkeypatch):
        monkeypatch.setenv("REVPART_ENVIRONMENT", "development")
        monkeypatch.delenv("REVPART_DEBUG", raising=False)
        assert get_settings().debug is True


class TestToleranceSettings:
    """허용오차 기본값과 환경변수 덮어쓰기"""

    def test_defaults(self, monkeypatch):
        for name in ("REVPART_TOL", "REVPART_RANK_GAP", "REVPART_ITER_MAX", "REVPART_CONV_TOL"):
            monkeypatch.delenv(name, raising=False)
        assert Tolerance.from_settings() == Tolerance()

    def test_env_tol(self, monkeypatch):
        monkeypatch.setenv("REVPART_TOL", "1e-8")
        assert Tolerance.from_settings().eq_tol == 1e-8

    def test_override_beats_env(self, monkeypatch):
        monkeypatch.setenv("REVPART_TOL", "1e-8")
        monkeypatch.setenv("REVPART_ITER_MAX", "500")
        tol = Tolerance.from_settings(eq_tol=1e-7)
        assert tol.eq_tol == 1e-7
        assert tol.iter_max == 500

    def test_invalid_env_value(self, monkeypatch):
        monkeypatch.setenv("REVPART_SEED", "not-a-number")
        with pytest.raises(ValueError):
            get_settings()


class TestEnvironmentDefaults:
    """환경별 기본값과 표본 수 설정"""

    def test_dev_uses_lighter_sampling(self, monkeypatch):
        monkeypatch.setenv("REVPART_ENVIRONMENT", "development")
        for name in ("REVPART_SCHWARZ_SAMPLES", "REVPART_PURE_STATE_SAMPLES"):
            monkeypatch.delenv(name, raising=False)
        settings = get_settings()
        assert settings.environment == "development"
        assert settings.schwarz_samples < ProdSettings().schwarz_samples
        assert settings.pure_state_samples < ProdSettings().pure_state_samples

    def test_prod_reports_its_environment(self, monkeypatch):
        monkeypatch.delenv("REVPART_ENVIRONMENT", raising=False)
        settings = get_settings()
        assert type(settings) is ProdSettings
        assert settings.environment == "production"
        assert settings.project_name == "revpart"

    def test_pure_state_samples_reach_abelian_effective(self, monkeypatch, dephasing_q):
        monkeypatch.setenv("REVPART_PURE_STATE_SAMPLES", "7")
        with patch(
            "revpart.algebra.sample_pure_states", wraps=algebra.sample_pure_states
        ) as sampler:
            a = algebra.abelian_effective(dephasing_q, np.random.default_rng(0))

        assert a.dim == 2
        assert sampler.call_args.args[2] == 7
