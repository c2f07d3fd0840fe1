"""
동역학: 에르고딕 계층, Cesàro 평균, 극한 사상, 궤적, dilation 검증

분류는 스펙트럼으로 결정하고, 상관 평균과 궤적 감쇠는 교차 검증으로만 사용합니다.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np
import scipy.linalg as sla
from loguru import logger

from revpart.algebra import (
    ConditionalExpectation,
    certificate_tol,
    conditional_expectation,
    d_infinity,
    d_infinity_plus,
    decompose,
    e_infinity,
    multiplicative_domain,
)
from revpart.core.errors import CertificateFailure, InvalidParams, PreconditionViolated
from revpart.gns import contraction, h_infinity, v_limits
from revpart.numerics import (
    CMat,
    adjoint,
    apply_superop,
    as_cmat,
    matrix_units,
    opnorm,
    unvec,
)
from revpart.qds import Channel, Qds, tau_k
from revpart.schemas.report import (
    Classification,
    DilationCheck,
    DilationReport,
    Residual,
    ZMeanSummary,
)

Direction = Literal["forward", "adjoint"]

CORRELATION_STEPS = 200

WEAK_MIXING_NOTE = (
    "weakly_mixing equals mixing: in finite dimensions both criteria exclude "
    "every peripheral eigenvalue other than a simple 1"
)


# ============================================================
# 분류
# ============================================================
def _peripheral_mask(w: np.ndarray, q: Qds) -> np.ndarray:
    return np.abs(w) >= 1.0 - q.tol.rank_gap


@lru_cache(maxsize=64)
def _spectrum(q: Qds) -> np.ndarray:
    return sla.eigvals(q.channel.superop)


def second_modulus(q: Qds) -> float:
    """주변 스펙트럼 밖 고유값의 최대 절댓값 (없으면 0)."""
    w = _spectrum(q)
    rest = np.abs(w[~_peripheral_mask(w, q)])
    return float(rest.max()) if rest.size else 0.0


@lru_cache(maxsize=64)
def _eigvec_condition(q: Qds) -> float:
    _, v = sla.eig(contraction(q).matrix)
    kappa = float(np.linalg.cond(v))
    return kappa if np.isfinite(kappa) else float("inf")


def _reversible_part(q: Qds) -> tuple[bool, bool]:
    """D∞ 위 제한(유니터리)의 (ergodic, mixing)."""
    z = d_infinity(q).space.coords
    block = adjoint(z) @ contraction(q).matrix @ z
    w = sla.eigvals(block)
    ergodic = int(np.sum(np.abs(w - 1.0) <= q.tol.rank_gap)) == 1
    return ergodic, len(w) == 1


def correlation_mean(q: Qds, a: CMat, b: CMat, n: int) -> complex:
    """(1/(N+1)) Σ_{k≤N} [φ(aΦ^k(b)) − φ(a)φ(b)]."""
    a, b = as_cmat(a), as_cmat(b)
    base = q.state.phi(a) * q.state.phi(b)
    total = 0j
    current = b
    for _ in range(n + 1):
        total += q.state.phi(a @ current) - base
        current = q.channel(current)
    return total / (n + 1)


def correlation_defect(q: Qds, n: int = CORRELATION_STEPS) -> float:
    """행렬 단위 쌍에 대한 max |correlation_mean|.

    b 에 대해 선형이므로 b 마다 궤적 평균을 한 번만 계산합니다.
    """
    units = matrix_units(q.dim)
    worst = 0.0
    for b in units:
        mean = np.zeros_like(b)
        current = b
        for _ in range(n + 1):
            mean += current
            current = q.channel(current)
        mean /= n + 1
        phi_b = q.state.phi(b)
        for a in units:
            worst = max(worst, abs(q.state.phi(a @ mean) - q.state.phi(a) * phi_b))
    return float(worst)


def classify(q: Qds) -> Classification:
    """
    에르고딕 계층 분류

    - ergodic: Φ 의 고정점 공간이 ℂ1
    - mixing: 주변 스펙트럼이 단순 고유값 1 하나
    - completely_irreversible: D∞ = ℂ1
    - asymptotic_equilibrium: mixing 이고 궤적이 second_modulusⁿ 로 감쇠

    D∞ 위로 제한한 가역 부분의 분류와 교차 검증하고,
    행렬 단위 쌍의 상관 평균 (N = 200) 최댓값을 residuals 에 남깁니다.
    ergodic 이면 이 값은 O(1/N) 로 작아집니다.
    """
    u = contraction(q).matrix
    eye = np.eye(u.shape[0])
    fixed_dim = int(sla.null_space(u - eye, rcond=q.tol.rank_gap).shape[1])
    w = _spectrum(q)
    peripheral = int(np.sum(_peripheral_mask(w, q)))
    dim_d_inf = d_infinity(q).dim

    ergodic = fixed_dim == 1
    mixing = peripheral == 1
    rev_ergodic, rev_mixing = _reversible_part(q)
    if (ergodic, mixing) != (rev_ergodic, rev_mixing):
        raise CertificateFailure(
            f"classification disagrees with the reversible part: "
            f"(ergodic, mixing) = {(ergodic, mixing)} vs {(rev_ergodic, rev_mixing)}"
        )

    equilibrium = False
    if mixing:
        equilibrium = all(
            evolve(q, a, max(4 * q.dim**2, 20)).decay_ok for a in matrix_units(q.dim)
        )

    result = Classification(
        ergodic=ergodic,
        weakly_mixing=mixing,
        mixing=mixing,
        completely_irreversible=dim_d_inf == 1,
        asymptotic_equilibrium=equilibrium,
        second_modulus=second_modulus(q),
        dim_d_infinity=dim_d_inf,
        residuals={"correlation_defect": correlation_defect(q, CORRELATION_STEPS)},
        notes=[WEAK_MIXING_NOTE],
    )
    if not result.implications_hold():
        raise CertificateFailure(f"classification violates the implication chain: {result}")
    logger.debug(
        f"classification: fixed {fixed_dim}, peripheral {peripheral}, dim D_inf {dim_d_inf}"
    )
    return result


def tau_ergodic(q: Qds, k: int = 1) -> bool:
    """F(τ_k) = ℂ1 여부."""
    return multiplicative_domain(q, k).dim == 1


# ============================================================
# 궤적
# ============================================================
@dataclass(frozen=True, eq=False)
class EvolutionResult:
    trajectory: list[CMat]
    norms: list[float]
    residuals: list[float] | None = None
    decay_ok: bool | None = None
    second_modulus: float = 0.0


def evolve(
    q: Qds, a: CMat, n: int, direction: Direction = "forward"
) -> EvolutionResult:
    """[a, Φ(a), …, Φⁿ(a)] (direction="adjoint" 이면 Φ♯).

    D∞ = ℂ1 이면 ‖Φʲ(a) − φ(a)I‖ 도 보고하고,
    GNS 노름에서 10·κ·sʲ 상한으로 감쇠를 판정합니다 (κ: U 고유벡터 조건수).
    """
    if n < 0:
        raise InvalidParams("number of steps must be non-negative")
    a = as_cmat(a)
    channel = q.channel if direction == "forward" else q.adjoint_channel
    trajectory = [a]
    for _ in range(n):
        trajectory.append(channel(trajectory[-1]))
    norms = [opnorm(x) for x in trajectory]
    s = second_modulus(q)
    if d_infinity(q).dim != 1:
        return EvolutionResult(trajectory, norms, second_modulus=s)

    eye = np.eye(q.dim, dtype=complex)
    mean = q.state.phi(a) * eye
    residuals = [opnorm(x - mean) for x in trajectory]
    g0 = q.geometry.norm(a - mean)
    kappa = _eigvec_condition(q)
    slack = certificate_tol(q.tol) * max(1.0, g0)
    decay_ok = all(
        q.geometry.norm(x - mean) <= 10.0 * kappa * s**j * g0 + slack
        for j, x in enumerate(trajectory)
    )
    return EvolutionResult(trajectory, norms, residuals, decay_ok, s)


# ============================================================
# Cesàro 평균과 조건부 기댓값
# ============================================================
@dataclass(frozen=True, eq=False)
class CesaroResult:
    k: int
    n: int
    expectation: ConditionalExpectation
    residual: float
    history: list[float] = field(default_factory=list)
    norms: list[float] = field(default_factory=list)
    consistency: float = 0.0


def _column_residual(diff: CMat, dim: int) -> float:
    """max over matrix units E_ij 의 operator norm."""
    return max(opnorm(unvec(diff[:, c], dim)) for c in range(diff.shape[1]))


def expectation_of_domain(q: Qds, k: int) -> ConditionalExpectation:
    """E_k: M → D_{Φ_k}."""
    return conditional_expectation(multiplicative_domain(q, k), q)


def _consistency(q: Qds, k: int, e_k: ConditionalExpectation) -> float:
    """max_h ‖E_h∘E_k − E_k‖ (h 는 k 와 같은 부호, |h| ≤ |k|)."""
    if k == 0:
        return 0.0
    sign = 1 if k > 0 else -1
    g_k = q.geometry.to_frame(e_k.matrix)
    worst = 0.0
    for h in range(1, abs(k) + 1):
        g_h = q.geometry.to_frame(expectation_of_domain(q, sign * h).matrix)
        worst = max(worst, opnorm(g_h @ g_k - g_k))
    return worst


def cesaro_expectation(q: Qds, k: int, n: int) -> CesaroResult:
    """S_{N,k} = (1/(N+1)) Σ_{j≤N} τ_kʲ 와 E_k 의 거리.

    residual 은 행렬 단위 기저에서의 max ‖S_{N,k}(a) − E_k(a)‖ 이고,
    history 는 N = 1..n 에 대한 같은 값입니다.
    """
    if n < 1:
        raise InvalidParams("Cesaro means need N >= 1")
    e_k = expectation_of_domain(q, k)
    t = tau_k(q, k).superop
    size = t.shape[0]
    power = np.eye(size, dtype=complex)
    acc = np.eye(size, dtype=complex)
    history: list[float] = []
    norms: list[float] = []
    for m in range(1, n + 1):
        power = power @ t
        acc = acc + power
        mean = acc / (m + 1)
        history.append(_column_residual(mean - e_k.matrix, q.dim))
        norms.append(_column_residual(mean, q.dim))
    consistency = _consistency(q, k, e_k)
    if consistency > certificate_tol(q.tol):
        raise CertificateFailure(
            f"E_h o E_k != E_k for k = {k} (residual {consistency:.2e})"
        )
    logger.debug(f"Cesaro k={k}: residual {history[-1]:.3e} at N={n}")
    return CesaroResult(
        k=k,
        n=n,
        expectation=e_k,
        residual=history[-1],
        history=history,
        norms=norms,
        consistency=consistency,
    )


def e_plus_distances(q: Qds, k_max: int | None = None) -> list[float]:
    """‖E_k − E₊‖ (GNS operator norm), k = 1..k_max."""
    k_max = k_max or max(q.dim**2, 2)
    g_plus = q.geometry.to_frame(conditional_expectation(d_infinity_plus(q), q).matrix)
    return [
        opnorm(q.geometry.to_frame(expectation_of_domain(q, k).matrix) - g_plus)
        for k in range(1, k_max + 1)
    ]


def e_plus(q: Qds) -> ConditionalExpectation:
    """E₊: M → D∞⁺, {E_k} 의 극한이며 φ 를 보존합니다."""
    e = conditional_expectation(d_infinity_plus(q), q)
    limit = certificate_tol(q.tol)
    distances = e_plus_distances(q)
    drift = max(
        abs(q.state.phi(e(x)) - q.state.phi(x)) for x in matrix_units(q.dim)
    )
    if distances[-1] > limit or drift > limit:
        raise CertificateFailure(
            f"E_plus is not the limit of E_k or not phi-preserving "
            f"(distance {distances[-1]:.2e}, drift {drift:.2e})"
        )
    return e


@dataclass(frozen=True, eq=False)
class ZMeanResult:
    n: int
    superop: CMat
    limit_superop: CMat
    residual: float
    envelope: float
    limit_residual: float
    split_residual: float
    strong_decay: bool

    def summary(self, tol: float) -> ZMeanSummary:
        return ZMeanSummary(
            n=self.n,
            residual=self.residual,
            envelope=self.envelope,
            limit_residual=Residual.measure(self.limit_residual, tol),
            split_residual=Residual.measure(self.split_residual, tol),
            strong_decay=self.strong_decay,
        )


def z_mean(q: Qds, n: int) -> ZMeanResult:
    """Z_N = (1/(2N+1)) Σ_{|k|≤N} τ_k 와 극한 Z = ½(V₊ + V₋).

    GNS 에서 τ_k 는 U*ᵏUᵏ (k > 0), UᵏU*ᵏ (k < 0) 입니다.
    strong decay (V± = P∞) 이면 Z = E∞ 를 확인합니다.
    """
    if n < 0:
        raise InvalidParams("symmetric means need N >= 0")
    u = contraction(q).matrix
    limits = v_limits(q)
    z = 0.5 * (limits.v_plus.matrix + limits.v_minus.matrix)
    eye = np.eye(u.shape[0], dtype=complex)
    acc = eye.copy()
    envelope = opnorm(eye - z)
    power = eye.copy()
    for _ in range(n):
        power = u @ power
        forward = adjoint(power) @ power
        backward = power @ adjoint(power)
        acc = acc + forward + backward
        envelope += opnorm(forward - z) + opnorm(backward - z)
    z_n = acc / (2 * n + 1)
    residual = opnorm(z_n - z)

    p_inf = h_infinity(q).p_inf.matrix
    limit = certificate_tol(q.tol)
    strong = (
        opnorm(limits.v_plus.matrix - p_inf) <= limit
        and opnorm(limits.v_minus.matrix - p_inf) <= limit
    )
    e_inf = e_infinity(q)
    limit_residual = opnorm(z - q.geometry.to_frame(e_inf.matrix))
    if strong and limit_residual > limit:
        raise CertificateFailure(
            f"strong decay holds but Z != E_inf (residual {limit_residual:.2e})"
        )

    z_superop = q.geometry.from_frame(z)
    split = 0.0
    for a in matrix_units(q.dim):
        parts = decompose(a, e_inf)
        lhs = apply_superop(z_superop, a)
        rhs = parts.par + apply_superop(z_superop, parts.perp)
        split = max(split, opnorm(lhs - rhs))
    return ZMeanResult(
        n=n,
        superop=q.geometry.from_frame(z_n),
        limit_superop=z_superop,
        residual=residual,
        envelope=envelope / (2 * n + 1),
        limit_residual=limit_residual,
        split_residual=split,
        strong_decay=strong,
    )


# ============================================================
# 가역 dilation 검증
# ============================================================
@dataclass(frozen=True, eq=False)
class ReversibleSystem:
    """Φ̂(X) = W*XW 와 상태 ρ̂ 를 갖는 M_D 위의 가역계."""

    dim: int
    unitary: CMat
    rho: CMat

    def channel(self) -> Channel:
        return Channel.from_kraus([self.unitary])


def _named(name: str, residual: float, tol: float, passed: bool | None = None) -> DilationCheck:
    ok = residual <= tol if passed is None else passed
    return DilationCheck(name=name, passed=bool(ok), residual=float(residual), tol=float(tol))


def _monomorphism_residual(embed: CMat, d: int, big: int) -> float:
    units = matrix_units(d)
    eye_big = np.eye(big, dtype=complex)

    def i(x: CMat) -> CMat:
        return unvec(embed @ x.reshape(-1, order="F"), big)

    worst = opnorm(i(np.eye(d, dtype=complex)) - eye_big)
    for a in units:
        worst = max(worst, opnorm(i(adjoint(a)) - adjoint(i(a))))
        for b in units:
            worst = max(worst, opnorm(i(a @ b) - i(a) @ i(b)))
    s = sla.svdvals(embed)
    if s.size == 0 or s[-1] <= np.finfo(float).eps * max(s[0], 1.0):
        worst = max(worst, 1.0)
    return worst


def verify_dilation(
    q: Qds,
    hat: ReversibleSystem,
    embed: CMat,
    expect: CMat,
    n: int = 1,
) -> DilationReport:
    """(M_D, Φ̂, φ̂) 가 embed/expect 를 통해 q 의 dilation 인지 검사합니다.

    embed 는 d²→D² superoperator, expect 는 D²→d² superoperator 입니다.
    """
    d, big = q.dim, hat.dim
    if embed.shape != (big * big, d * d) or expect.shape != (d * d, big * big):
        raise PreconditionViolated(
            f"embed/expect shapes {embed.shape}, {expect.shape} do not match d={d}, D={big}"
        )
    unitary_res = opnorm(adjoint(hat.unitary) @ hat.unitary - np.eye(big))
    if unitary_res > certificate_tol(q.tol):
        raise PreconditionViolated("dilation dynamics must be a unitary conjugation")

    eq, limit = q.tol.eq_tol, certificate_tol(q.tol)
    hat_channel = hat.channel()
    units = matrix_units(d)

    def i(x: CMat) -> CMat:
        return unvec(embed @ x.reshape(-1, order="F"), big)

    def e(x: CMat) -> CMat:
        return unvec(expect @ x.reshape(-1, order="F"), d)

    checks = [
        _named("hat_unitary", unitary_res, limit),
        _named("embed_monomorphism", _monomorphism_residual(embed, d, big), limit),
        _named(
            "state_compatible",
            max(abs(np.trace(hat.rho @ i(a)) - q.state.phi(a)) for a in units),
            limit,
        ),
    ]

    step_residuals: list[float] = []
    current = list(units)
    lifted = [i(a) for a in units]
    for _ in range(n):
        lifted = [hat_channel(x) for x in lifted]
        current = [q.channel(x) for x in current]
        step_residuals.append(
            max(opnorm(e(x) - y) for x, y in zip(lifted, current, strict=True))
        )
    checks.append(_named("dilation_identity", max(step_residuals, default=0.0), limit))

    module = 0.0
    for a in units:
        for x in matrix_units(big):
            module = max(module, opnorm(e(i(a) @ x) - a @ e(x)))
    checks.append(_named("module_identity", module, limit))

    def lift_defect(a: CMat) -> float:
        return opnorm(hat_channel(i(a)) - i(q.channel(a))) / max(opnorm(a), 1e-300)

    domain = multiplicative_domain(q, 1)
    inside = max((lift_defect(b) for b in domain.basis), default=0.0)
    outside_space = domain.space.complement()
    margin = max((lift_defect(b) for b in outside_space.basis), default=0.0)
    separates = inside <= limit and (outside_space.dim == 0 or margin > 10 * eq)
    checks.append(_named("biconditional", inside, limit, passed=separates))

    for c in checks:
        if not c.passed:
            logger.debug(f"dilation check {c.name} failed (residual {c.residual:.2e})")
    return DilationReport(checks=checks, steps=n, step_residuals=step_residuals, margin=margin)


def dilation_steps(report: DilationReport) -> Sequence[bool]:
    """단계별 dilation identity 성립 여부."""
    tol = report.check("dilation_identity").tol
    return [r <= tol for r in report.step_residuals]
