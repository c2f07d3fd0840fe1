"""
GNS 표현과 Sz.-Nagy–Foias 분해

(M, φ) 의 GNS 공간은 ρ 의 고유기저에서 {E_ij/√r_j} 를 정규직교 기저로 갖습니다.
이 기저에서 모든 연산자는 d²×d² 행렬이고, GNS adjoint 는 켤레전치입니다.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np
import scipy.linalg as sla
from loguru import logger

from revpart.algebra import (
    certificate_tol,
    d_infinity,
    e_infinity,
    intersect_domains,
    perp_space,
)
from revpart.core.errors import CertificateFailure, ConvergenceFailure, NotContraction
from revpart.numerics import (
    CMat,
    InnerProduct,
    OperatorSubspace,
    Tolerance,
    adjoint,
    hermitian_part,
    left_multiplication,
    matrix_units,
    opnorm,
    subspace_intersect,
)
from revpart.qds import Qds, phi_k

GnsTag = Literal[
    "U",
    "U_k",
    "defect",
    "V_plus",
    "V_minus",
    "projection",
    "modular_J",
    "modular_Delta",
    "flat_isometry",
]


@dataclass(frozen=True, eq=False)
class GnsSpace:
    """H_φ 와 순환 벡터 Ω = I."""

    geometry: InnerProduct

    @property
    def dim(self) -> int:
        return self.geometry.dim**2

    @property
    def omega(self) -> CMat:
        return self.geometry.coords(np.eye(self.geometry.dim, dtype=complex))

    def vector(self, a: CMat) -> CMat:
        """π_φ(a)Ω_φ 의 좌표."""
        return self.geometry.coords(a)

    def element(self, c: CMat) -> CMat:
        return self.geometry.matrix(c)

    def operator(self, s: CMat) -> CMat:
        return self.geometry.to_frame(s)

    def left(self, a: CMat) -> CMat:
        """π_φ(a): 왼쪽 곱셈."""
        return self.operator(left_multiplication(a))


@dataclass(frozen=True, eq=False)
class GnsOperator:
    """GNS 정규직교 기저에서의 연산자."""

    matrix: CMat
    tag: GnsTag
    antilinear: bool = False

    def apply(self, c: CMat) -> CMat:
        return self.matrix @ (c.conj() if self.antilinear else c)

    def adjoint(self) -> GnsOperator:
        return GnsOperator(adjoint(self.matrix), self.tag, self.antilinear)

    @property
    def norm(self) -> float:
        return opnorm(self.matrix)


def gns_space(q: Qds) -> GnsSpace:
    return GnsSpace(q.geometry)


# ============================================================
# 축약 U 와 결함 연산자
# ============================================================
@lru_cache(maxsize=64)
def contraction(q: Qds) -> GnsOperator:
    """U: aΩ ↦ Φ(a)Ω."""
    u = q.channel.in_frame(q.geometry)
    norm = opnorm(u)
    if norm > 1.0 + q.tol.eq_tol:
        raise NotContraction(f"GNS operator of Phi has norm {norm:.12f}")
    return GnsOperator(u, "U")


def u_k(q: Qds, k: int) -> GnsOperator:
    """U_k = U^k (k ≥ 0), U*^{−k} (k < 0)."""
    u = contraction(q).matrix
    if k >= 0:
        return GnsOperator(np.linalg.matrix_power(u, k), "U_k")
    return GnsOperator(np.linalg.matrix_power(adjoint(u), -k), "U_k")


def _positive_root(gap: CMat) -> CMat:
    w, v = sla.eigh(hermitian_part(gap))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ adjoint(v)


def defect_residuals(t: GnsOperator, root: CMat, tol: Tolerance) -> dict[str, float]:
    """T·D_T = D_{T*}·T 와 ker D_T = {ξ : ‖Tξ‖ = ‖ξ‖} 잔차."""
    m = t.matrix
    root_star = _positive_root(np.eye(m.shape[0]) - m @ adjoint(m))
    w, v = sla.eigh(hermitian_part(root))
    kernel = v[:, w <= np.sqrt(2.0 * tol.rank_gap)]
    _, s, vh = np.linalg.svd(m)
    isometric = adjoint(vh)[:, np.abs(s - 1.0) <= tol.rank_gap]
    return {
        "intertwining": opnorm(m @ root - root_star @ m),
        "kernel": opnorm(kernel @ adjoint(kernel) - isometric @ adjoint(isometric)),
    }


def defect(t: GnsOperator, tol: Tolerance | None = None) -> GnsOperator:
    """D_T = √(I − T*T)."""
    tol = tol or Tolerance()
    if t.norm > 1.0 + tol.eq_tol:
        raise NotContraction(f"operator norm {t.norm:.12f} exceeds 1")
    root = _positive_root(np.eye(t.matrix.shape[0]) - adjoint(t.matrix) @ t.matrix)
    residuals = defect_residuals(t, root, tol)
    # 제곱근은 I − T*T 의 반올림 오차를 √ 로 키웁니다.
    if max(residuals.values()) > np.sqrt(certificate_tol(tol)):
        raise CertificateFailure(f"defect operator certificate failed: {residuals}")
    return GnsOperator(root, "defect")


def isometric_membership(q: Qds, a: CMat) -> bool:
    """‖UaΩ‖ = ‖aΩ‖ 이고 ‖Ua*Ω‖ = ‖a*Ω‖ 이면 a ∈ D_Φ."""
    u = contraction(q).matrix
    limit = certificate_tol(q.tol)
    for x in (a, adjoint(a)):
        c = q.geometry.coords(x)
        size = float(np.linalg.norm(c))
        if size and abs(np.linalg.norm(u @ c) - size) > limit * size:
            return False
    return True


# ============================================================
# V± 극한
# ============================================================
@dataclass(frozen=True, eq=False)
class VLimits:
    v_minus: GnsOperator
    v_plus: GnsOperator
    iterations: dict[str, int]
    residuals: dict[str, float]
    limit_residual: float


def _iterate_limit(
    u: CMat, forward: bool, tol: Tolerance, label: str
) -> tuple[CMat, int, float]:
    a = np.eye(u.shape[0], dtype=complex)
    diff = float("inf")
    for n in range(1, tol.iter_max + 1):
        nxt = adjoint(u) @ a @ u if forward else u @ a @ adjoint(u)
        diff = opnorm(nxt - a)
        a = nxt
        if diff < tol.conv_tol:
            logger.debug(f"{label} converged after {n} iterations (step {diff:.2e})")
            return hermitian_part(a), n, diff
    raise ConvergenceFailure(f"{label} iteration did not converge", diff, tol.iter_max)


def _contractive_limit_residual(q: Qds, v_minus: CMat, n: int) -> float:
    """max |φ(S_n(a,b)) − ⟨aΩ, (I − V₋)bΩ⟩| over matrix units."""
    m = q.channel.power(n)
    geometry = q.geometry
    gap = np.eye(v_minus.shape[0]) - v_minus
    worst = 0.0
    units = matrix_units(q.dim)
    coords = [geometry.coords(x) for x in units]
    images = [m(x) for x in units]
    for a, ca, ma in zip(units, coords, images, strict=True):
        for b, cb, mb in zip(units, coords, images, strict=True):
            s = m(adjoint(a) @ b) - adjoint(ma) @ mb
            lhs = q.state.phi(s)
            rhs = np.vdot(ca, gap @ cb)
            worst = max(worst, abs(lhs - rhs))
    return worst


@lru_cache(maxsize=64)
def v_limits(q: Qds) -> VLimits:
    """V₋ = lim U*ⁿUⁿ, V₊ = lim UⁿU*ⁿ (직접 반복)."""
    u = contraction(q).matrix
    v_minus, n_minus, r_minus = _iterate_limit(u, True, q.tol, "V_minus")
    v_plus, n_plus, r_plus = _iterate_limit(u, False, q.tol, "V_plus")
    limit_residual = _contractive_limit_residual(q, v_minus, n_minus)
    if limit_residual > certificate_tol(q.tol):
        raise CertificateFailure(
            f"V_minus does not reproduce lim phi(S_n) (residual {limit_residual:.2e})"
        )
    return VLimits(
        v_minus=GnsOperator(v_minus, "V_minus"),
        v_plus=GnsOperator(v_plus, "V_plus"),
        iterations={"minus": n_minus, "plus": n_plus},
        residuals={"minus": r_minus, "plus": r_plus},
        limit_residual=limit_residual,
    )


# ============================================================
# Sz.-Nagy–Foias 분해
# ============================================================
@dataclass(frozen=True, eq=False)
class NagyFoias:
    h0: OperatorSubspace
    h1: OperatorSubspace
    unitary_part: GnsOperator
    cnu_part: GnsOperator
    agreement_residual: float
    residuals: dict[str, float] = field(default_factory=dict)


def _fixed_space(v: CMat, geometry: InnerProduct, tol: Tolerance) -> OperatorSubspace:
    """양의 축약 V 의 ker(I − V)."""
    w, vecs = sla.eigh(hermitian_part(v))
    return OperatorSubspace(geometry, vecs[:, w >= 1.0 - tol.rank_gap])


def _reducing_residual(u: CMat, space: OperatorSubspace) -> float:
    p = space.projector()
    return opnorm(p @ u - u @ p)


def _isometry_residual(z: CMat) -> float:
    """‖Z*Z − I_m‖, Z 는 n×m."""
    if z.size == 0:
        return 0.0
    return opnorm(adjoint(z) @ z - np.eye(z.shape[1]))


def _unitarity_residual(block: CMat) -> float:
    """정사각 블록의 ‖B*B − I‖, ‖BB* − I‖ 중 큰 값."""
    if block.size == 0:
        return 0.0
    return max(_isometry_residual(block), _isometry_residual(adjoint(block)))


def _cnu_certificate(u: CMat, h1: OperatorSubspace, tol: Tolerance) -> None:
    """H₁ 위 제한에 U, U* 모두에 대해 등거리인 단위원 고유벡터가 없어야 합니다."""
    if h1.dim == 0:
        return
    block = adjoint(h1.coords) @ u @ h1.coords
    w, vecs = sla.eig(block)
    limit = certificate_tol(tol)
    for lam, v in zip(w, vecs.T, strict=True):
        if abs(lam) < 1.0 - tol.rank_gap:
            continue
        psi = h1.coords @ v
        psi = psi / np.linalg.norm(psi)
        if (
            abs(np.linalg.norm(u @ psi) - 1.0) <= limit
            and abs(np.linalg.norm(adjoint(u) @ psi) - 1.0) <= limit
        ):
            raise CertificateFailure(
                f"H1 carries a unitary direction (eigenvalue {lam:.6f})"
            )


@lru_cache(maxsize=64)
def nagy_foias(q: Qds) -> NagyFoias:
    """H₀ = ker(I−V₊) ∩ ker(I−V₋), H₁ = H₀^⊥."""
    limits = v_limits(q)
    u = contraction(q).matrix
    h0 = subspace_intersect(
        _fixed_space(limits.v_plus.matrix, q.geometry, q.tol),
        _fixed_space(limits.v_minus.matrix, q.geometry, q.tol),
        q.tol,
    )
    h1 = h0.complement()
    unitary_block = adjoint(h0.coords) @ u @ h0.coords
    cnu_block = adjoint(h1.coords) @ u @ h1.coords
    residuals = {
        "reducing": _reducing_residual(u, h0),
        "unitary": _unitarity_residual(unitary_block),
    }
    limit = certificate_tol(q.tol)
    if max(residuals.values()) > limit:
        raise CertificateFailure(f"H0 does not reduce U to a unitary: {residuals}")
    _cnu_certificate(u, h1, q.tol)

    domains = h0_via_domains(q)
    agreement = h0.distance(domains)
    if agreement > q.tol.rank_gap:
        raise CertificateFailure(
            f"H0 from V_plus/V_minus and from domain closures differ ({agreement:.2e})"
        )
    logger.debug(f"Nagy-Foias: dim H0 = {h0.dim}, dim H1 = {h1.dim}")
    return NagyFoias(
        h0=h0,
        h1=h1,
        unitary_part=GnsOperator(unitary_block, "U"),
        cnu_part=GnsOperator(cnu_block, "U"),
        agreement_residual=agreement,
        residuals=residuals,
    )


def h0_via_domains(q: Qds, intertwining_steps: int = 3) -> OperatorSubspace:
    """H₀ = ⋂_k closure(π(D_{Φ_k})Ω)."""
    u = contraction(q).matrix
    limit = certificate_tol(q.tol)

    def verify(space: OperatorSubspace) -> bool:
        block = adjoint(space.coords) @ u @ space.coords
        return (
            max(_reducing_residual(u, space), _unitarity_residual(block)) <= limit
        )

    space, _ = intersect_domains(q, (1, -1), verify, "H0")
    worst = 0.0
    for k in range(1, intertwining_steps + 1):
        uk = np.linalg.matrix_power(u, k)
        m = phi_k(q, k)
        for a in matrix_units(q.dim):
            left = uk @ q.geometry.to_frame(left_multiplication(a)) @ space.coords
            right = q.geometry.to_frame(left_multiplication(m(a))) @ uk @ space.coords
            worst = max(worst, opnorm(left - right))
    if worst > limit:
        raise CertificateFailure(
            f"U^k pi(a) xi_0 != pi(Phi^k(a)) U^k xi_0 on H0 (residual {worst:.2e})"
        )
    return space


# ============================================================
# H∞ / K∞, flat isometry, 모듈러 연산자
# ============================================================
@dataclass(frozen=True, eq=False)
class HInfinity:
    h_inf: OperatorSubspace
    k_inf: OperatorSubspace
    p_inf: GnsOperator
    residuals: dict[str, float] = field(default_factory=dict)


def h_infinity(q: Qds) -> HInfinity:
    """H∞ = D∞Ω, K∞ = D∞^⊥φ Ω, H_φ = H∞ ⊕ K∞."""
    d_inf = d_infinity(q)
    h_inf = d_inf.space
    k_inf = perp_space(d_inf, q)
    p_inf = h_inf.projector()
    commutation = max(
        (opnorm(p_inf @ gns_space(q).left(d) - gns_space(q).left(d) @ p_inf) for d in d_inf.basis),
        default=0.0,
    )
    residuals = {
        "orthogonality": opnorm(adjoint(h_inf.coords) @ k_inf.coords)
        if k_inf.dim and h_inf.dim
        else 0.0,
        "completeness": float(abs(h_inf.dim + k_inf.dim - q.dim**2)),
        "commutation": commutation,
        "contained_in_h0": nagy_foias(q).h0.containment_residual(h_inf),
    }
    if max(residuals.values()) > certificate_tol(q.tol):
        raise CertificateFailure(f"H_inf certificate failed: {residuals}")
    return HInfinity(h_inf, k_inf, GnsOperator(p_inf, "projection"), residuals)


@dataclass(frozen=True, eq=False)
class FlatIsometry:
    """Z: H♭ → H_φ, [a] ↦ E∞(a)Ω. H♭ 는 H∞ 좌표로 구체화합니다."""

    isometry: GnsOperator
    u_flat: CMat
    u: CMat
    qds: Qds

    def embed(self, a: CMat) -> CMat:
        return self.qds.geometry.coords(e_infinity(self.qds)(a))

    def isometry_residual(self) -> float:
        z = self.isometry.matrix
        return _isometry_residual(z)

    def intertwining_residual(self, n_max: int = 5) -> float:
        """max_n ‖Z·U♭ⁿ − Uⁿ·Z‖."""
        z = self.isometry.matrix
        worst = 0.0
        for n in range(n_max + 1):
            lhs = z @ np.linalg.matrix_power(self.u_flat, n)
            rhs = np.linalg.matrix_power(self.u, n) @ z
            worst = max(worst, opnorm(lhs - rhs))
        return worst


def flat_isometry(q: Qds) -> FlatIsometry:
    d_inf = d_infinity(q)
    z = d_inf.space.coords
    u = contraction(q).matrix
    flat = FlatIsometry(
        isometry=GnsOperator(z, "flat_isometry"),
        u_flat=adjoint(z) @ u @ z,
        u=u,
        qds=q,
    )
    worst = max(flat.isometry_residual(), flat.intertwining_residual())
    if worst > certificate_tol(q.tol):
        raise CertificateFailure(f"flat isometry certificate failed ({worst:.2e})")
    return flat


@dataclass(frozen=True, eq=False)
class ModularOperators:
    delta: GnsOperator
    j: GnsOperator
    residuals: dict[str, float] = field(default_factory=dict)


def modular_ops(q: Qds) -> ModularOperators:
    """Δ: x ↦ ρxρ⁻¹, J: x ↦ ρ^{1/2} x* ρ^{−1/2} (반선형)."""
    geometry = q.geometry
    delta = geometry.to_frame(q.state.delta_superop())
    half = q.state.rho_power(0.5)
    half_inv = q.state.rho_power(-0.5)
    n = q.dim**2
    j = np.zeros((n, n), dtype=complex)
    eye = np.eye(n, dtype=complex)
    for k in range(n):
        x = geometry.matrix(eye[:, k])
        j[:, k] = geometry.coords(half @ adjoint(x) @ half_inv)

    delta_half = _positive_root(delta)
    polar = 0.0
    for k in range(n):
        x = geometry.matrix(eye[:, k])
        lhs = j @ (delta_half @ eye[:, k]).conj()
        polar = max(polar, float(np.linalg.norm(lhs - geometry.coords(adjoint(x)))))
    u = contraction(q).matrix
    residuals = {
        "polar": polar,
        "u_delta": opnorm(u @ delta - delta @ u),
        "u_j": opnorm(u @ j - j @ u.conj()),
        "j_involution": opnorm(j @ j.conj() - eye),
    }
    if max(residuals.values()) > certificate_tol(q.tol) * max(1.0, opnorm(delta)):
        raise CertificateFailure(f"modular operator certificate failed: {residuals}")
    return ModularOperators(
        delta=GnsOperator(delta, "modular_Delta"),
        j=GnsOperator(j, "modular_J", antilinear=True),
        residuals=residuals,
    )
