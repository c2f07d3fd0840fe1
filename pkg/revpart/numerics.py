"""
복소 행렬 커널, φ-가중 내적, 부분공간 대수

다른 모든 모듈이 이 위에서 동작합니다.

규약:
    - 벡터화는 column-stacking: vec(x)[i + d*j] = x[i, j]
    - x ↦ A x B 의 superoperator 는 kron(B.T, A)
    - φ-좌표: ρ 의 고유기저에서 {E_ij / √r_j} 가 정규직교 기저
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np
import numpy.typing as npt
import scipy.linalg as sla
from pydantic import BaseModel, ConfigDict, Field, model_validator

from revpart.core.errors import DimensionMismatch, InputError, NotFaithful

CMat = npt.NDArray[np.complex128]
InnerProductTag = Literal["hs", "phi"]


class Tolerance(BaseModel):
    """수치 판정에 쓰이는 허용오차 묶음."""

    model_config = ConfigDict(frozen=True)

    eq_tol: float = Field(
        default=1e-9,
        gt=0,
        description="상대 동치 판정 임계값",
    )
    rank_gap: float = Field(
        default=1e-7,
        gt=0,
        description="rank 판정용 특이값 비율",
    )
    iter_max: int = Field(
        default=10_000,
        gt=0,
        description="연산자 극한 반복 상한",
    )
    conv_tol: float = Field(
        default=1e-12,
        gt=0,
        description="반복 정지 임계값",
    )

    @model_validator(mode="after")
    def _check_order(self) -> Tolerance:
        if self.eq_tol <= self.conv_tol:
            raise ValueError("eq_tol must be larger than conv_tol")
        return self

    @classmethod
    def from_settings(cls, **overrides: float | int | None) -> Tolerance:
        """설정(REVPART_*)에서 기본값을 읽고, None 이 아닌 override 를 덮어씁니다."""
        from revpart.core.config import get_settings

        settings = get_settings()
        values: dict[str, float | int] = {
            "rank_gap": settings.rank_gap,
            "iter_max": settings.iter_max,
            "conv_tol": settings.conv_tol,
        }
        if settings.tol is not None:
            values["eq_tol"] = settings.tol
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


# ============================================================
# 행렬 커널
# ============================================================
def as_cmat(x: npt.ArrayLike) -> CMat:
    arr = np.asarray(x, dtype=np.complex128)
    if not np.all(np.isfinite(arr)):
        raise InputError("non-finite matrix entries")
    return arr


def adjoint(x: CMat) -> CMat:
    return x.conj().T


def vec(x: CMat) -> CMat:
    return np.asarray(x).reshape(-1, order="F")


def unvec(v: CMat, dim: int | None = None) -> CMat:
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    return np.asarray(v).reshape((dim, dim), order="F")


def superop(a: CMat, b: CMat) -> CMat:
    """x ↦ a·x·b 의 superoperator."""
    return np.kron(b.T, a)


def left_multiplication(a: CMat) -> CMat:
    return superop(a, np.eye(a.shape[0], dtype=complex))


def right_multiplication(b: CMat) -> CMat:
    return superop(np.eye(b.shape[0], dtype=complex), b)


def apply_superop(s: CMat, x: CMat) -> CMat:
    return unvec(s @ vec(x), x.shape[0])


def transpose_permutation(dim: int) -> CMat:
    """P·vec(x) = vec(x.T) 인 치환 행렬 (대칭, involution)."""
    p = np.zeros((dim * dim, dim * dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            p[j + dim * i, i + dim * j] = 1.0
    return p


def matrix_unit(dim: int, i: int, j: int) -> CMat:
    e = np.zeros((dim, dim), dtype=complex)
    e[i, j] = 1.0
    return e


def matrix_units(dim: int) -> list[CMat]:
    return [matrix_unit(dim, i, j) for i in range(dim) for j in range(dim)]


def opnorm(x: CMat) -> float:
    return float(np.linalg.norm(x, 2)) if x.size else 0.0


def hermitian_part(x: CMat) -> CMat:
    return 0.5 * (x + adjoint(x))


def random_cmat(rng: np.random.Generator, dim: int) -> CMat:
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


def random_unitary(rng: np.random.Generator, dim: int) -> CMat:
    q, r = np.linalg.qr(random_cmat(rng, dim))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def spectral_projections(
    h: CMat, tol: Tolerance
) -> list[tuple[float, CMat]]:
    """Hermitian h 의 고유공간을 (고유값, d×m isometry) 목록으로 반환합니다."""
    w, v = sla.eigh(hermitian_part(h))
    scale = max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0
    groups: list[list[int]] = []
    for idx in range(len(w)):
        if groups and w[idx] - w[groups[-1][-1]] <= tol.rank_gap * scale:
            groups[-1].append(idx)
        else:
            groups.append([idx])
    return [(float(np.mean(w[g])), v[:, g]) for g in groups]


def check_density(rho: CMat, tol: Tolerance) -> tuple[np.ndarray, CMat]:
    """ρ 가 faithful density matrix 인지 확인하고 고유분해를 반환합니다."""
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionMismatch(f"rho must be square, got shape {rho.shape}")
    herm_residual = opnorm(rho - adjoint(rho))
    if herm_residual > tol.eq_tol:
        raise NotFaithful(herm_residual, "rho is not Hermitian")
    trace_residual = abs(np.trace(rho) - 1.0)
    if trace_residual > tol.eq_tol:
        raise NotFaithful(trace_residual, "rho does not have unit trace")
    w, v = sla.eigh(hermitian_part(rho))
    if w[0] <= tol.rank_gap * w[-1]:
        raise NotFaithful(float(w[0]), "rho is not positive definite")
    return w, v


def phi_inner(x: CMat, y: CMat, rho: CMat, tol: Tolerance | None = None) -> complex:
    """φ(x*y) = trace(ρ·x*·y). x 에 대해 conjugate-linear."""
    tol = tol or Tolerance()
    if not (x.shape == y.shape == rho.shape):
        raise DimensionMismatch(
            f"shapes differ: x {x.shape}, y {y.shape}, rho {rho.shape}"
        )
    check_density(rho, tol)
    return complex(np.trace(rho @ adjoint(x) @ y))


# ============================================================
# 내적 기하 (HS 또는 φ)
# ============================================================
@dataclass(frozen=True, eq=False)
class InnerProduct:
    """행렬 ↔ 정규직교 좌표 변환.

    tag == "phi" 이면 좌표는 GNS 좌표와 동일합니다:
    ρ 의 고유기저로 회전한 뒤 j 번째 열에 √r_j 를 곱합니다.
    """

    tag: InnerProductTag
    dim: int
    weights: np.ndarray
    frame: CMat

    @classmethod
    def hs(cls, dim: int) -> InnerProduct:
        return cls("hs", dim, np.ones(dim), np.eye(dim, dtype=complex))

    @classmethod
    def phi(cls, rho: CMat, tol: Tolerance | None = None) -> InnerProduct:
        w, v = check_density(as_cmat(rho), tol or Tolerance())
        return cls("phi", rho.shape[0], w, v.astype(complex))

    @cached_property
    def scale(self) -> np.ndarray:
        return np.repeat(np.sqrt(self.weights), self.dim)

    @cached_property
    def _rotation(self) -> CMat:
        # x ↦ V* x V
        return superop(adjoint(self.frame), self.frame)

    @cached_property
    def _rotation_inv(self) -> CMat:
        return superop(self.frame, adjoint(self.frame))

    def coords(self, x: CMat) -> CMat:
        return self.scale * vec(adjoint(self.frame) @ x @ self.frame)

    def matrix(self, c: CMat) -> CMat:
        return self.frame @ unvec(c / self.scale, self.dim) @ adjoint(self.frame)

    def coords_matrix(self, xs: Sequence[CMat]) -> CMat:
        if not xs:
            return np.zeros((self.dim * self.dim, 0), dtype=complex)
        return np.column_stack([self.coords(x) for x in xs])

    def to_frame(self, s: CMat) -> CMat:
        """vec 좌표의 superoperator 를 이 기하의 정규직교 좌표로 옮깁니다."""
        return (self.scale[:, None] * (self._rotation @ s @ self._rotation_inv)) / (
            self.scale[None, :]
        )

    def from_frame(self, g: CMat) -> CMat:
        core = (g / self.scale[:, None]) * self.scale[None, :]
        return self._rotation_inv @ core @ self._rotation

    def inner(self, x: CMat, y: CMat) -> complex:
        return complex(np.vdot(self.coords(x), self.coords(y)))

    def norm(self, x: CMat) -> float:
        return float(np.linalg.norm(self.coords(x)))

    def same_as(self, other: InnerProduct) -> bool:
        if self.tag != other.tag or self.dim != other.dim:
            return False
        if self is other or self.tag == "hs":
            return True
        return bool(
            np.allclose(self.weights, other.weights)
            and np.allclose(self.frame, other.frame)
        )


@dataclass(frozen=True, eq=False)
class OperatorSubspace:
    """정규직교 기저로 표현한 M_d 의 부분공간."""

    geometry: InnerProduct
    coords: CMat

    @classmethod
    def zero(cls, geometry: InnerProduct) -> OperatorSubspace:
        return cls(geometry, np.zeros((geometry.dim**2, 0), dtype=complex))

    @classmethod
    def full(cls, geometry: InnerProduct) -> OperatorSubspace:
        return cls(geometry, np.eye(geometry.dim**2, dtype=complex))

    @property
    def ambient_dim(self) -> int:
        return self.geometry.dim

    @property
    def inner_product_tag(self) -> InnerProductTag:
        return self.geometry.tag

    @property
    def dim(self) -> int:
        return int(self.coords.shape[1])

    @cached_property
    def basis(self) -> tuple[CMat, ...]:
        return tuple(self.geometry.matrix(self.coords[:, k]) for k in range(self.dim))

    def gram(self) -> CMat:
        return adjoint(self.coords) @ self.coords

    def projector(self) -> CMat:
        return self.coords @ adjoint(self.coords)

    def project(self, x: CMat) -> CMat:
        c = self.geometry.coords(x)
        return self.geometry.matrix(self.coords @ (adjoint(self.coords) @ c))

    def residual(self, x: CMat) -> float:
        """span 까지의 상대 거리."""
        c = self.geometry.coords(x)
        size = float(np.linalg.norm(c))
        if size == 0.0:
            return 0.0
        rest = c - self.coords @ (adjoint(self.coords) @ c)
        return float(np.linalg.norm(rest)) / size

    def contains(self, x: CMat, tol: Tolerance) -> bool:
        return self.residual(x) <= tol.eq_tol

    def containment_residual(self, other: OperatorSubspace) -> float:
        """other ⊆ self 의 최악 잔차."""
        if other.dim == 0:
            return 0.0
        rest = other.coords - self.coords @ (adjoint(self.coords) @ other.coords)
        return opnorm(rest)

    def distance(self, other: OperatorSubspace) -> float:
        """정사영 연산자 차이의 operator norm."""
        if self.geometry.dim != other.geometry.dim:
            raise DimensionMismatch("subspaces live in different ambient algebras")
        return opnorm(self.projector() - other.projector())

    def complement(self) -> OperatorSubspace:
        if self.dim == 0:
            return OperatorSubspace.full(self.geometry)
        return OperatorSubspace(self.geometry, sla.null_space(adjoint(self.coords)))


def span_coords(
    geometry: InnerProduct, c: CMat, tol: Tolerance
) -> OperatorSubspace:
    """좌표 열들의 span 을 rank-revealing SVD 로 정규직교화합니다."""
    if c.size == 0 or c.shape[1] == 0:
        return OperatorSubspace.zero(geometry)
    u, s, _ = sla.svd(c, full_matrices=False)
    if s[0] <= np.finfo(float).tiny:
        return OperatorSubspace.zero(geometry)
    rank = int(np.sum(s > tol.rank_gap * s[0]))
    return OperatorSubspace(geometry, u[:, :rank])


def span_in(
    geometry: InnerProduct, vectors: Sequence[CMat], tol: Tolerance
) -> OperatorSubspace:
    for x in vectors:
        if x.shape != (geometry.dim, geometry.dim):
            raise DimensionMismatch(
                f"expected {geometry.dim}x{geometry.dim} matrices, got {x.shape}"
            )
        if not np.all(np.isfinite(x)):
            raise InputError("non-finite matrix entries")
    return span_coords(geometry, geometry.coords_matrix(list(vectors)), tol)


def orthonormalize(
    vectors: Sequence[CMat],
    rho: CMat | None,
    tol: Tolerance | None = None,
) -> OperatorSubspace:
    """φ-내적(rho 가 None 이면 HS 내적)에 대한 정규직교 기저."""
    tol = tol or Tolerance()
    if rho is None:
        dim = vectors[0].shape[0] if vectors else 1
        geometry = InnerProduct.hs(dim)
    else:
        geometry = InnerProduct.phi(rho, tol)
    return span_in(geometry, vectors, tol)


def rebase(
    space: OperatorSubspace, geometry: InnerProduct, tol: Tolerance
) -> OperatorSubspace:
    """같은 span 을 다른 내적으로 다시 표현합니다."""
    if space.geometry.same_as(geometry):
        return space
    return span_in(geometry, list(space.basis), tol)


def subspace_intersect(
    a: OperatorSubspace, b: OperatorSubspace, tol: Tolerance | None = None
) -> OperatorSubspace:
    """[Q_A, −Q_B] 의 nullspace 로 교집합을 구합니다."""
    tol = tol or Tolerance()
    if not a.geometry.same_as(b.geometry):
        raise DimensionMismatch("subspaces carry different inner products")
    if a.dim == 0 or b.dim == 0:
        return OperatorSubspace.zero(a.geometry)
    kernel = sla.null_space(np.hstack([a.coords, -b.coords]), rcond=tol.rank_gap)
    if kernel.shape[1] == 0:
        return OperatorSubspace.zero(a.geometry)
    return span_coords(a.geometry, a.coords @ kernel[: a.dim], tol)


def subspace_sum(
    a: OperatorSubspace, b: OperatorSubspace, tol: Tolerance
) -> OperatorSubspace:
    if not a.geometry.same_as(b.geometry):
        raise DimensionMismatch("subspaces carry different inner products")
    return span_coords(a.geometry, np.hstack([a.coords, b.coords]), tol)


def commutant(
    s: Sequence[CMat], tol: Tolerance | None = None, dim: int | None = None
) -> OperatorSubspace:
    """{X : XB = BX, B ∈ S} 를 HS 정규직교 기저로 반환합니다.

    S 가 비어 있으면 전체 공간입니다 (dim 필요).
    """
    tol = tol or Tolerance()
    if not s:
        if dim is None:
            raise DimensionMismatch("commutant of an empty set needs an explicit dim")
        return OperatorSubspace.full(InnerProduct.hs(dim))
    dim = s[0].shape[0]
    geometry = InnerProduct.hs(dim)
    eye = np.eye(dim, dtype=complex)
    stacked = np.vstack([np.kron(b.T, eye) - np.kron(eye, b) for b in s])
    return OperatorSubspace(geometry, sla.null_space(stacked, rcond=tol.rank_gap))
