"""
고정 예제 시스템과 dilation 빌더

`revpart gen` 의 각 family 는 SystemFile 을 만들며, 결과는 항상 validate 를 통과합니다.
파라미터가 제약을 어기면 InvalidParams 를 던집니다.
"""

from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from revpart.core.errors import InvalidParams, PreconditionViolated
from revpart.dynamics import ReversibleSystem
from revpart.numerics import CMat, adjoint, matrix_unit, random_unitary, vec
from revpart.qds import Qds
from revpart.schemas.system import SystemFile

FAMILIES = ("dephasing", "unitary", "classical", "shift_dephase", "random_covariant")

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

MatrixLike = Sequence[Sequence[float]] | np.ndarray


# ============================================================
# 파라미터 검증
# ============================================================
def _spectrum(rho: Sequence[float], dim: int | None = None) -> np.ndarray:
    r = np.asarray(rho, dtype=float)
    if r.ndim != 1 or r.size == 0:
        raise InvalidParams("rho must be a list of eigenvalues")
    if dim is not None and r.size != dim:
        raise InvalidParams(f"rho has {r.size} entries but d = {dim}")
    if np.any(r <= 0):
        raise InvalidParams("rho must be strictly positive (faithful state)")
    if abs(r.sum() - 1.0) > 1e-12:
        raise InvalidParams(f"rho must sum to 1 (got {r.sum():.15g})")
    return r


def _probability(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise InvalidParams(f"p must satisfy 0 <= p <= 1 (got {p})")
    return float(p)


def _stochastic(p: MatrixLike) -> np.ndarray:
    m = np.asarray(p, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidParams("transition matrix must be square")
    if np.any(m < 0):
        raise InvalidParams("transition matrix has negative entries")
    if np.max(np.abs(m.sum(axis=1) - 1.0)) > 1e-12:
        raise InvalidParams("transition matrix rows must sum to 1")
    return m


# ============================================================
# 고전 Markov chain 보조 함수
# ============================================================
def stationary_distribution(p: MatrixLike) -> np.ndarray:
    """πP = π, Σπ = 1 의 최소제곱 해."""
    m = _stochastic(p)
    n = m.shape[0]
    system = np.vstack([m.T - np.eye(n), np.ones((1, n))])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    pi, *_ = sla.lstsq(system, rhs)
    if np.linalg.norm(system @ pi - rhs) > 1e-10:
        raise InvalidParams("no stationary distribution found")
    return pi


def reversed_chain(p: MatrixLike, pi: Sequence[float]) -> np.ndarray:
    """시간 역전 chain P̂_ij = π_j P_ji / π_i."""
    m = _stochastic(p)
    weights = np.asarray(pi, dtype=float)
    return (m.T * weights[None, :]) / weights[:, None]


def classical_kraus(p: np.ndarray) -> list[CMat]:
    """K_ij = √P_ij E_ji, Φ(a) = Σ_i (Σ_j P_ij a_jj) E_ii."""
    n = p.shape[0]
    return [
        np.sqrt(p[i, j]) * matrix_unit(n, j, i)
        for i in range(n)
        for j in range(n)
        if p[i, j] > 0
    ]


# ============================================================
# gen families
# ============================================================
def dephasing(p: float = 0.5, rho: Sequence[float] = (0.6, 0.4)) -> SystemFile:
    """Φ(a) = p·a + (1−p)·diag(a) (ρ 의 고유기저)."""
    p = _probability(p)
    r = _spectrum(rho)
    d = r.size
    if d == 2:
        kraus = [np.sqrt((1 + p) / 2) * np.eye(2, dtype=complex), np.sqrt((1 - p) / 2) * SIGMA_Z]
    else:
        kraus = [np.sqrt(p) * np.eye(d, dtype=complex)] + [
            np.sqrt(1 - p) * matrix_unit(d, i, i) for i in range(d)
        ]
    return SystemFile.from_arrays(np.diag(r).astype(complex), kraus=kraus)


def unitary(phase: float = 1.0, rho: Sequence[float] = (0.6, 0.4)) -> SystemFile:
    """Φ(a) = U*aU, U = diag(e^{i·k·phase})."""
    r = _spectrum(rho)
    u = np.diag(np.exp(1j * phase * np.arange(r.size)))
    return SystemFile.from_arrays(np.diag(r).astype(complex), kraus=[u])


def classical(p: MatrixLike = ((0.9, 0.1), (0.3, 0.7))) -> SystemFile:
    """전이행렬 P 를 대각 대수에 심은 채널, ρ = diag(π)."""
    m = _stochastic(p)
    pi = stationary_distribution(m)
    if np.any(pi <= 1e-12):
        raise InvalidParams("stationary distribution is not strictly positive")
    return SystemFile.from_arrays(np.diag(pi).astype(complex), kraus=classical_kraus(m))


def shift_dephase(d: int = 3) -> SystemFile:
    """K_i = E_{σ(i),i} (σ: 순환 이동), Φ(a) = Σ a_{σ(i)σ(i)} E_ii, ρ = I/d."""
    if d < 2:
        raise InvalidParams("shift_dephase needs d >= 2")
    kraus = [matrix_unit(d, (i + 1) % d, i) for i in range(d)]
    return SystemFile.from_arrays(np.eye(d, dtype=complex) / d, kraus=kraus)


def _reversible_stochastic(rng: np.random.Generator, pi: np.ndarray) -> np.ndarray:
    """상세균형 S_ij = S_ji, Σ_j S_ij = π_i 로 만든 가역 chain P = S/π."""
    n = pi.size
    u = rng.uniform(size=(n, n))
    s = np.triu(u, 1)
    s = (s + s.T) * np.minimum.outer(pi, pi) / n
    np.fill_diagonal(s, pi - s.sum(axis=1))
    return s / pi[:, None]


def random_covariant(
    d: int = 2, rng: np.random.Generator | None = None, include_classical: bool = True
) -> SystemFile:
    """
    모듈러 공변 채널의 무작위 볼록 결합

    (i) ρ 와 가환인 대각 유니터리, (ii) ρ 의 고유기저 dephasing (p ≤ 0.8),
    (iii) π = (ρ 의 고유값) 를 정상분포로 갖는 가역 고전 chain 을 섞고,
    전체를 무작위 유니터리로 회전합니다.
    """
    if d < 2:
        raise InvalidParams("random_covariant needs d >= 2")
    rng = rng or np.random.default_rng(0)
    r = 0.5 * rng.dirichlet(np.ones(d)) + 0.5 / d
    parts = 3 if include_classical else 2
    w = 0.5 * rng.dirichlet(np.ones(parts)) + 0.5 / parts

    diag_u = np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, size=d)))
    p = rng.uniform(0.0, 0.8)
    kraus: list[CMat] = [np.sqrt(w[0]) * diag_u]
    kraus.append(np.sqrt(w[1] * p) * np.eye(d, dtype=complex))
    kraus += [np.sqrt(w[1] * (1 - p)) * matrix_unit(d, i, i) for i in range(d)]
    if include_classical:
        chain = _reversible_stochastic(rng, r)
        kraus += [np.sqrt(w[2]) * k for k in classical_kraus(chain)]

    v = random_unitary(rng, d)
    rotated = [v @ k @ adjoint(v) for k in kraus]
    rho = v @ np.diag(r).astype(complex) @ adjoint(v)
    rho = 0.5 * (rho + adjoint(rho))
    return SystemFile.from_arrays(rho, kraus=rotated)


def amplitude_damping(gamma: float = 0.3, rho: Sequence[float] = (0.6, 0.4)) -> SystemFile:
    """불변 상태가 |0⟩⟨0| 인 채널. faithful ρ 와 짝지으면 검증에서 거부됩니다."""
    gamma = _probability(gamma)
    r = _spectrum(rho, 2)
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return SystemFile.from_arrays(np.diag(r).astype(complex), kraus=[k0, k1])


# ============================================================
# dilation 빌더
# ============================================================
@dataclass(frozen=True, eq=False)
class DilationFixture:
    hat: ReversibleSystem
    embed: CMat
    expect: CMat


def superop_of(f: Callable[[CMat], CMat], d_in: int, d_out: int) -> CMat:
    """선형 사상 f: M_{d_in} → M_{d_out} 의 superoperator."""
    s = np.zeros((d_out * d_out, d_in * d_in), dtype=complex)
    for i in range(d_in):
        for j in range(d_in):
            s[:, i + d_in * j] = vec(f(matrix_unit(d_in, i, j)))
    return s


def _rotation(theta: float) -> CMat:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def dephasing_dilation(p: float = 0.5, rho: Sequence[float] = (0.6, 0.4)) -> DilationFixture:
    """
    단일 단계 Stinespring dilation (d = 2, 보조계 2차원)

    W = P₀⊗R(θ) + P₁⊗R(−θ), cos θ = √((1+p)/2),
    i(a) = a⊗I, E(X) = (I⊗⟨0|) X (I⊗|0⟩), ρ̂ = ρ⊗|0⟩⟨0|.
    """
    p = _probability(p)
    r = _spectrum(rho, 2)
    theta = float(np.arccos(np.sqrt((1 + p) / 2)))
    p0, p1 = matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)
    w = np.kron(p0, _rotation(theta)) + np.kron(p1, _rotation(-theta))
    ancilla = np.array([[1.0], [0.0]], dtype=complex)
    v = np.kron(np.eye(2, dtype=complex), ancilla)
    rho_hat = np.kron(np.diag(r).astype(complex), ancilla @ adjoint(ancilla))
    return DilationFixture(
        hat=ReversibleSystem(dim=4, unitary=w, rho=rho_hat),
        embed=superop_of(lambda a: np.kron(a, np.eye(2)), 2, 4),
        expect=superop_of(lambda x: adjoint(v) @ x @ v, 4, 2),
    )


def trivial_dilation(q: Qds) -> DilationFixture:
    """유니터리 채널 자체를 dilation 으로 (D = d, i = E = id)."""
    kraus = q.channel.kraus
    if kraus is None or len(kraus) != 1:
        raise PreconditionViolated("trivial dilation needs a single-Kraus unitary channel")
    eye = np.eye(q.dim * q.dim, dtype=complex)
    return DilationFixture(
        hat=ReversibleSystem(dim=q.dim, unitary=kraus[0], rho=q.state.rho),
        embed=eye,
        expect=eye.copy(),
    )


def corrupt_embedding(d: int = 2, ancilla: int = 2) -> CMat:
    """a ↦ ½(a⊗I) + ½(aᵀ⊗I): unital 이지만 곱셈적이지 않은 embedding."""
    eye = np.eye(ancilla)
    return superop_of(lambda a: 0.5 * np.kron(a, eye) + 0.5 * np.kron(a.T, eye), d, d * ancilla)


def generate(family: str, **params: object) -> SystemFile:
    """이름으로 family 를 호출합니다."""
    builders: dict[str, Callable[..., SystemFile]] = {
        "dephasing": dephasing,
        "unitary": unitary,
        "classical": classical,
        "shift_dephase": shift_dephase,
        "random_covariant": random_covariant,
    }
    if family not in builders:
        raise InvalidParams(f"unknown family '{family}' (choose from {', '.join(FAMILIES)})")
    return builders[family](**{k: v for k, v in params.items() if v is not None})
