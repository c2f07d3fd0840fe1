"""
공통 pytest fixture

다섯 개의 고정 예제 시스템과 시드 고정 난수 생성기를 제공합니다.
Qds 는 내부 lru_cache 키이므로 session 범위로 한 번만 만듭니다.
"""

import numpy as np
import pytest

from revpart import fixtures
from revpart.qds import Qds, from_system

RANDOM_DRAWS = 50


def build(system) -> Qds:
    return from_system(system, rng=np.random.default_rng(0))


@pytest.fixture(scope="session")
def dephasing_q() -> Qds:
    """Φ(a) = ½a + ½diag(a), ρ = diag(0.6, 0.4)."""
    return build(fixtures.dephasing(p=0.5, rho=(0.6, 0.4)))


@pytest.fixture(scope="session")
def unitary_q() -> Qds:
    """Φ(a) = U*aU, U = diag(1, e^{i})."""
    return build(fixtures.unitary(phase=1.0, rho=(0.6, 0.4)))


@pytest.fixture(scope="session")
def classical_q() -> Qds:
    """P = [[0.9, 0.1], [0.3, 0.7]], π = (0.75, 0.25)."""
    return build(fixtures.classical(((0.9, 0.1), (0.3, 0.7))))


@pytest.fixture(scope="session")
def shift_q() -> Qds:
    """순환 이동 ∘ dephasing (d = 3)."""
    return build(fixtures.shift_dephase(3))


@pytest.fixture(scope="session")
def covariant_q() -> Qds:
    return build(fixtures.random_covariant(d=3, rng=np.random.default_rng(11)))


@pytest.fixture(scope="session")
def all_fixtures(dephasing_q, unitary_q, classical_q, shift_q, covariant_q) -> dict[str, Qds]:
    return {
        "dephasing": dephasing_q,
        "unitary": unitary_q,
        "classical": classical_q,
        "shift_dephase": shift_q,
        "random_covariant": covariant_q,
    }


@pytest.fixture(scope="session")
def random_draws() -> list[Qds]:
    """시드 고정 random_covariant 표본 50 개 (d ∈ {2, 3, 4})."""
    rng = np.random.default_rng(2024)
    return [
        build(fixtures.random_covariant(d=2 + (i % 3), rng=rng, include_classical=i % 4 != 0))
        for i in range(RANDOM_DRAWS)
    ]


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
