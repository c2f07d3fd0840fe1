"""
양자 동역학계 (M, Φ, φ)

채널/상태 모델, 표준 가정 검증, φ-adjoint Φ♯, Φ_k 와 τ_k.

Φ 는 Heisenberg 그림의 unital CP 사상입니다: Φ(a) = Σ K_i* a K_i.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg as sla
from loguru import logger

from revpart.core.errors import (
    DimensionMismatch,
    NoModularCommutation,
    NotCP,
    NotInvariantState,
    NotSchwarz,
    NotUnital,
)
from revpart.numerics import (
    CMat,
    InnerProduct,
    OperatorSubspace,
    Tolerance,
    adjoint,
    apply_superop,
    as_cmat,
    check_density,
    hermitian_part,
    left_multiplication,
    matrix_unit,
    opnorm,
    random_cmat,
    right_multiplication,
    span_coords,
    transpose_permutation,
)
from revpart.numerics import superop as sandwich
from revpart.schemas.system import SystemFile


@dataclass(frozen=True, eq=False)
class Channel:
    """d×d 행렬 대수 위의 선형 사상 (superoperator 는 항상 존재)."""

    dim: int
    superop: CMat
    kraus: tuple[CMat, ...] | None = None

    @classmethod
    def from_kraus(cls, kraus: Sequence[CMat]) -> Channel:
        if not kraus:
            raise DimensionMismatch("Kraus list is empty")
        ops = tuple(as_cmat(k) for k in kraus)
        dim = ops[0].shape[0]
        for k in ops:
            if k.shape != (dim, dim):
                raise DimensionMismatch(f"Kraus operator shape {k.shape} != ({dim}, {dim})")
        s = sum(sandwich(adjoint(k), k) for k in ops)
        return cls(dim, np.asarray(s, dtype=complex), ops)

    @classmethod
    def from_superop(cls, s: CMat) -> Channel:
        s = as_cmat(s)
        dim = int(round(np.sqrt(s.shape[0])))
        if s.shape != (dim * dim, dim * dim):
            raise DimensionMismatch(f"superoperator shape {s.shape} is not d^2 x d^2")
        return cls(dim, s)

    @classmethod
    def identity(cls, dim: int) -> Channel:
        return cls(dim, np.eye(dim * dim, dtype=complex))

    def apply(self, x: CMat) -> CMat:
        return apply_superop(self.superop, x)

    def __call__(self, x: CMat) -> CMat:
        return self.apply(x)

    def compose(self, other: Channel) -> Channel:
        """self ∘ other."""
        return Channel(self.dim, self.superop @ other.superop)

    def power(self, n: int) -> Channel:
        if n < 0:
            raise ValueError("negative powers are taken through the φ-adjoint")
        return Channel(self.dim, np.linalg.matrix_power(self.superop, n))

    def choi(self) -> CMat:
        d = self.dim
        c = np.zeros((d * d, d * d), dtype=complex)
        for i in range(d):
            for j in range(d):
                e = matrix_unit(d, i, j)
                c += np.kron(e, self.apply(e))
        return c

    def min_choi_eigenvalue(self) -> float:
        return float(sla.eigvalsh(hermitian_part(self.choi()))[0])

    def unit_residual(self) -> float:
        eye = np.eye(self.dim, dtype=complex)
        return opnorm(self.apply(eye) - eye)

    def trace_dual(self) -> Channel:
        """trace(Φ_*(x)·y) = trace(x·Φ(y)) 인 Schrödinger 그림 사상."""
        p = transpose_permutation(self.dim)
        return Channel(self.dim, p @ self.superop.T @ p)

    def in_frame(self, geometry: InnerProduct) -> CMat:
        return geometry.to_frame(self.superop)

    def restrict(self, space: OperatorSubspace) -> CMat:
        """불변 부분공간 위에서의 행렬 (space 의 정규직교 좌표)."""
        g = self.in_frame(space.geometry)
        return adjoint(space.coords) @ g @ space.coords

    def image(self, space: OperatorSubspace, tol: Tolerance) -> OperatorSubspace:
        g = self.in_frame(space.geometry)
        return span_coords(space.geometry, g @ space.coords, tol)


@dataclass(frozen=True, eq=False)
class SystemState:
    """faithful 밀도행렬 ρ 와 모듈러 데이터."""

    rho: CMat
    eigvals: np.ndarray
    eigvecs: CMat
    geometry: InnerProduct

    @classmethod
    def from_rho(cls, rho: CMat, tol: Tolerance | None = None) -> SystemState:
        tol = tol or Tolerance()
        rho = as_cmat(rho)
        w, v = check_density(rho, tol)
        geometry = InnerProduct("phi", rho.shape[0], w, v.astype(complex))
        return cls(hermitian_part(rho), w, v.astype(complex), geometry)

    @property
    def dim(self) -> int:
        return int(self.rho.shape[0])

    @cached_property
    def log_rho(self) -> CMat:
        v = self.eigvecs
        return v @ np.diag(np.log(self.eigvals)) @ adjoint(v)

    @cached_property
    def rho_inv(self) -> CMat:
        v = self.eigvecs
        return v @ np.diag(1.0 / self.eigvals) @ adjoint(v)

    def phi(self, x: CMat) -> complex:
        return complex(np.trace(self.rho @ x))

    def rho_power(self, z: complex) -> CMat:
        v = self.eigvecs
        return v @ np.diag(self.eigvals.astype(complex) ** z) @ adjoint(v)

    def sigma(self, x: CMat, t: float) -> CMat:
        """σ_t(x) = ρ^{it} x ρ^{−it}."""
        return self.rho_power(1j * t) @ x @ self.rho_power(-1j * t)

    def modular_generator(self) -> CMat:
        """ad_H (H = log ρ) 의 superoperator: x ↦ Hx − xH."""
        h = self.log_rho
        return left_multiplication(h) - right_multiplication(h)

    def delta_superop(self) -> CMat:
        """Δ: x ↦ ρ x ρ⁻¹."""
        return sandwich(self.rho, self.rho_inv)


@dataclass(frozen=True)
class ValidationFlags:
    invariant: bool
    modular_commuting: bool


@dataclass(frozen=True, eq=False)
class Qds:
    """검증을 통과한 양자 동역학계."""

    channel: Channel
    state: SystemState
    adjoint_channel: Channel
    tol: Tolerance
    flags: ValidationFlags
    residuals: dict[str, float] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.channel.dim

    @property
    def geometry(self) -> InnerProduct:
        return self.state.geometry


def _pairing_residual(s: CMat, s_sharp: CMat, rho: CMat) -> float:
    """max |φ(b·Φ(a)) − φ(Φ♯(b)·a)| over matrix units a, b."""
    p = transpose_permutation(rho.shape[0])
    lr = left_multiplication(rho)
    lhs = lr.T @ p @ s
    rhs = s_sharp.T @ lr.T @ p
    return float(np.max(np.abs(lhs - rhs)))


def _schwarz_residual(
    channel: Channel, rng: np.random.Generator, samples: int
) -> float:
    worst = 0.0
    for _ in range(samples):
        a = random_cmat(rng, channel.dim)
        a = a / opnorm(a)
        gap = channel(adjoint(a) @ a) - channel(adjoint(a)) @ channel(a)
        worst = min(worst, float(sla.eigvalsh(hermitian_part(gap))[0]))
    return worst


def validate(
    channel: Channel,
    state: SystemState,
    tol: Tolerance | None = None,
    rng: np.random.Generator | None = None,
    schwarz_samples: int = 100,
) -> Qds:
    """표준 가정을 모두 확인하고 Φ♯ 를 구성합니다.

    Raises:
        DimensionMismatch, NotUnital, NotCP, NotSchwarz,
        NotInvariantState, NoModularCommutation
    """
    tol = tol or Tolerance()
    rng = rng or np.random.default_rng(0)
    if channel.dim != state.dim:
        raise DimensionMismatch(
            f"channel acts on M_{channel.dim} but rho is {state.dim}x{state.dim}"
        )
    residuals: dict[str, float] = {}

    residuals["unital"] = channel.unit_residual()
    if residuals["unital"] > tol.eq_tol:
        raise NotUnital(residuals["unital"])

    choi_min = channel.min_choi_eigenvalue()
    residuals["choi_min_eigenvalue"] = choi_min
    if choi_min < -tol.eq_tol:
        raise NotCP(-choi_min)

    if channel.kraus is None:
        worst = _schwarz_residual(channel, rng, schwarz_samples)
        residuals["schwarz_min_eigenvalue"] = worst
        if worst < -tol.eq_tol:
            raise NotSchwarz(-worst)

    dual = channel.trace_dual()
    residuals["invariance"] = opnorm(dual(state.rho) - state.rho)
    if residuals["invariance"] > tol.eq_tol:
        raise NotInvariantState(residuals["invariance"])

    ad = state.modular_generator()
    commutator = channel.superop @ ad - ad @ channel.superop
    residuals["modular_commutation"] = opnorm(commutator)
    if residuals["modular_commutation"] > tol.eq_tol * max(1.0, opnorm(ad)):
        raise NoModularCommutation(residuals["modular_commutation"])

    s_sharp = (
        left_multiplication(state.rho_inv)
        @ dual.superop
        @ left_multiplication(state.rho)
    )
    sharp = Channel(channel.dim, s_sharp)
    sharp_choi = sharp.min_choi_eigenvalue()
    residuals["sharp_choi_min_eigenvalue"] = sharp_choi
    residuals["sharp_unital"] = sharp.unit_residual()
    residuals["sharp_pairing"] = _pairing_residual(channel.superop, s_sharp, state.rho)
    worst_sharp = max(-sharp_choi, residuals["sharp_unital"], residuals["sharp_pairing"])
    if worst_sharp > tol.eq_tol:
        raise NoModularCommutation(worst_sharp, "phi-adjoint is not a unital CP map")

    logger.debug(f"validation residuals: {residuals}")
    return Qds(
        channel=channel,
        state=state,
        adjoint_channel=sharp,
        tol=tol,
        flags=ValidationFlags(invariant=True, modular_commuting=True),
        residuals=residuals,
    )


def phi_sharp(q: Qds) -> Channel:
    """Φ♯(b) = ρ⁻¹·Φ_*(ρb)."""
    return q.adjoint_channel


def phi_k(q: Qds, k: int) -> Channel:
    """Φ_k = Φ^k (k ≥ 0), Φ♯^|k| (k < 0)."""
    if k >= 0:
        return q.channel.power(k)
    return q.adjoint_channel.power(-k)


def tau_k(q: Qds, k: int) -> Channel:
    """τ_k = Φ_{−k} ∘ Φ_k."""
    return phi_k(q, -k).compose(phi_k(q, k))


def sk_form(q: Qds, k: int, a: CMat, b: CMat) -> CMat:
    """S_k(a, b) = Φ_k(a*b) − Φ_k(a*)Φ_k(b)."""
    m = phi_k(q, k)
    return m(adjoint(a) @ b) - m(adjoint(a)) @ m(b)


def modular_orbit(q: Qds, x: CMat, t: float) -> CMat:
    return q.state.sigma(x, t)


def from_system(
    system: SystemFile,
    eq_tol: float | None = None,
    rng: np.random.Generator | None = None,
    schwarz_samples: int = 100,
) -> Qds:
    """SystemFile → 검증된 Qds (허용오차: 기본값 < REVPART_* < 파일 < eq_tol)."""
    tol = system.resolve_tolerance(eq_tol)
    kraus = system.kraus_matrices()
    if kraus is not None:
        channel = Channel.from_kraus(kraus)
    else:
        channel = Channel.from_superop(system.superop_matrix())
    state = SystemState.from_rho(system.rho_matrix(), tol)
    return validate(channel, state, tol, rng=rng, schwarz_samples=schwarz_samples)
