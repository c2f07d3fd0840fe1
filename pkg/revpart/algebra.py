"""
대수 코어

고정점 대수, 곱셈 영역 D_{Φ_k}, D∞⁺, 곱셈 코어 C_Φ, 유효 관측량 대수 D∞,
φ-직교 보공간, 조건부 기댓값, 분해 M = D∞ ⊕ D∞^⊥φ, 중심, 가환 대수 A,
flat 곱 (Banach 대수 M♭).

D_{Φ_k} 는 2차 방정식 대신 τ_k 의 고정점 공간 F(τ_k) 로 계산하고,
정의식(곱셈성)은 사후 인증에만 사용합니다.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt

import numpy as np
import scipy.linalg as sla
from loguru import logger

from revpart.core.config import get_settings
from revpart.core.errors import (
    CertificateFailure,
    CoreMismatch,
    DegenerateRandomElement,
    DimensionMismatch,
    ModularInvarianceFailure,
    PreconditionViolated,
    StabilizationFailure,
)
from revpart.numerics import (
    CMat,
    InnerProduct,
    OperatorSubspace,
    Tolerance,
    adjoint,
    commutant,
    hermitian_part,
    left_multiplication,
    opnorm,
    random_cmat,
    rebase,
    right_multiplication,
    span_in,
    spectral_projections,
    subspace_intersect,
    unvec,
)
from revpart.qds import Channel, Qds, phi_k, tau_k


def certificate_tol(tol: Tolerance) -> float:
    """대수 인증(닫힘, 곱셈성)에 쓰는 임계값."""
    return 10 * tol.eq_tol


# ============================================================
# 도메인 타입
# ============================================================
@dataclass(frozen=True)
class AlgebraCertificate:
    has_identity: bool
    star_closed: bool
    product_closed: bool
    residual: float = 0.0

    @property
    def ok(self) -> bool:
        return self.has_identity and self.star_closed and self.product_closed


@dataclass(frozen=True, eq=False)
class SubAlgebra:
    """인증된 M_d 의 *-부분대수."""

    space: OperatorSubspace
    certified: AlgebraCertificate

    @classmethod
    def certify(cls, space: OperatorSubspace, tol: Tolerance) -> SubAlgebra:
        worst, _ = _closure_residuals(space)
        limit = certificate_tol(tol)
        identity_res = space.residual(np.eye(space.ambient_dim, dtype=complex))
        certificate = AlgebraCertificate(
            has_identity=identity_res <= limit,
            star_closed=worst["star"] <= limit,
            product_closed=worst["product"] <= limit,
            residual=max(identity_res, worst["star"], worst["product"]),
        )
        return cls(space, certificate)

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def basis(self) -> tuple[CMat, ...]:
        return self.space.basis


@dataclass(frozen=True, eq=False)
class ConditionalExpectation:
    """φ-보존 조건부 기댓값 E: M → target."""

    target: SubAlgebra
    matrix: CMat

    def apply(self, x: CMat) -> CMat:
        return unvec(self.matrix @ x.reshape(-1, order="F"), x.shape[0])

    def __call__(self, x: CMat) -> CMat:
        return self.apply(x)


@dataclass(frozen=True, eq=False)
class FlatElement:
    """M♭ 의 원소: par ∈ D∞, perp ∈ D∞^⊥φ."""

    par: CMat
    perp: CMat
    expectation: ConditionalExpectation

    @property
    def value(self) -> CMat:
        return self.par + self.perp


@dataclass(frozen=True)
class BlockInfo:
    dim: int
    multiplicity: int


def _closure_residuals(space: OperatorSubspace) -> tuple[dict[str, float], np.ndarray]:
    """star/product 닫힘 잔차와 기저 원소별 최악 잔차."""
    basis = space.basis
    per_element = np.zeros(len(basis))
    worst = {"star": 0.0, "product": 0.0}
    for i, b in enumerate(basis):
        r = space.residual(adjoint(b))
        worst["star"] = max(worst["star"], r)
        per_element[i] = max(per_element[i], r)
    for i, bi in enumerate(basis):
        for j, bj in enumerate(basis):
            r = space.residual(bi @ bj)
            worst["product"] = max(worst["product"], r)
            per_element[i] = max(per_element[i], r)
            per_element[j] = max(per_element[j], r)
    return worst, per_element


def _shrink_to_algebra(space: OperatorSubspace, tol: Tolerance) -> SubAlgebra:
    """곱에 닫히지 않는 기저를 결정적 순서로 제거해 최대 인증 부분대수로 줄입니다."""
    candidate = SubAlgebra.certify(space, tol)
    while not candidate.certified.ok and candidate.dim > 1:
        _, per_element = _closure_residuals(candidate.space)
        drop = int(np.argmax(per_element))
        logger.debug(
            f"shrinking candidate algebra: dim {candidate.dim}, "
            f"dropping basis element {drop} (residual {per_element[drop]:.2e})"
        )
        keep = [k for k in range(candidate.dim) if k != drop]
        candidate = SubAlgebra.certify(
            OperatorSubspace(space.geometry, candidate.space.coords[:, keep]), tol
        )
    return candidate


# ============================================================
# 고정점 대수와 곱셈 영역
# ============================================================
def fixed_point_algebra(t: Channel, q: Qds) -> SubAlgebra:
    """자기 φ-adjoint 인 T 의 고유값 1 고유공간."""
    g = t.in_frame(q.geometry)
    asymmetry = opnorm(g - adjoint(g))
    if asymmetry > certificate_tol(q.tol):
        raise PreconditionViolated(
            f"map is not self-phi-adjoint (asymmetry {asymmetry:.2e})"
        )
    w, v = sla.eigh(hermitian_part(g))
    mask = np.abs(w - 1.0) <= q.tol.rank_gap
    algebra = _shrink_to_algebra(OperatorSubspace(q.geometry, v[:, mask]), q.tol)
    if not algebra.certified.ok:
        raise CertificateFailure(
            f"fixed points do not form a *-algebra (residual {algebra.certified.residual:.2e})"
        )
    return algebra


def full_algebra(q: Qds) -> SubAlgebra:
    return SubAlgebra.certify(OperatorSubspace.full(q.geometry), q.tol)


def multiplicativity_residual(m: Channel, x: CMat) -> float:
    """max(‖S(x,x)‖, ‖S(x*,x*)‖) / ‖x‖²."""
    size = opnorm(x) ** 2
    if size == 0.0:
        return 0.0
    left = m(adjoint(x) @ x) - m(adjoint(x)) @ m(x)
    right = m(x @ adjoint(x)) - m(x) @ m(adjoint(x))
    return max(opnorm(left), opnorm(right)) / size


@lru_cache(maxsize=256)
def _domain(q: Qds, k: int) -> SubAlgebra:
    if k == 0:
        return full_algebra(q)
    algebra = fixed_point_algebra(tau_k(q, k), q)
    m = phi_k(q, k)
    worst = max((multiplicativity_residual(m, b) for b in algebra.basis), default=0.0)
    if worst > certificate_tol(q.tol):
        raise CertificateFailure(
            f"F(tau_{k}) failed the multiplicative-domain test (residual {worst:.2e})"
        )
    logger.debug(f"D_(Phi_{k}) has dimension {algebra.dim}")
    return algebra


def multiplicative_domain(q: Qds, k: int) -> SubAlgebra:
    """D_{Φ_k} = F(τ_k), 정의식으로 교차 검증."""
    return _domain(q, k)


def intersect_domains(
    q: Qds,
    signs: Sequence[int],
    verify: Callable[[OperatorSubspace], bool],
    label: str,
) -> tuple[OperatorSubspace, int]:
    """⋂_n D_{Φ_{s·n}} 를 안정화 규칙으로 계산합니다.

    차원이 변하지 않은 첫 단계에서 verify 를 시도하고,
    실패하면 상한 d² 까지 계속합니다.
    """
    current = OperatorSubspace.full(q.geometry)
    previous_dim: int | None = None
    cap = max(q.dim**2, 2)
    for n in range(1, cap + 1):
        for s in signs:
            current = subspace_intersect(current, _domain(q, s * n).space, q.tol)
        logger.debug(f"{label}: step {n}, dimension {current.dim}")
        if current.dim == previous_dim and verify(current):
            return current, n
        previous_dim = current.dim
    raise StabilizationFailure(f"{label} did not stabilize within {cap} steps")


def _invariance_residual(m: Channel, space: OperatorSubspace) -> float:
    if space.dim == 0:
        return 0.0
    g = m.in_frame(space.geometry)
    image = g @ space.coords
    rest = image - space.coords @ (adjoint(space.coords) @ image)
    return opnorm(rest)


def d_infinity_plus(q: Qds) -> SubAlgebra:
    """D∞⁺ = ⋂_{n≥1} D_{Φⁿ}."""

    def verify(space: OperatorSubspace) -> bool:
        return _invariance_residual(q.channel, space) <= certificate_tol(q.tol)

    space, steps = intersect_domains(q, (1,), verify, "D_inf_plus")
    algebra = SubAlgebra.certify(space, q.tol)
    if not algebra.certified.ok:
        raise CertificateFailure("D_inf_plus failed the *-algebra certificate")
    logger.debug(f"D_inf_plus stabilized after {steps} steps (dim {algebra.dim})")
    return algebra


def multiplicative_core(q: Qds) -> SubAlgebra:
    """C_Φ = ⋂_n Φⁿ(D∞⁺)."""
    current = d_infinity_plus(q).space
    cap = max(q.dim**2, 2)
    for n in range(1, cap + 1):
        image = q.channel.image(current, q.tol)
        following = subspace_intersect(current, image, q.tol)
        logger.debug(f"C_Phi: step {n}, dimension {following.dim}")
        if following.dim == current.dim and image.dim == current.dim:
            break
        current = following
    else:
        raise StabilizationFailure(f"C_Phi did not stabilize within {cap} steps")
    algebra = SubAlgebra.certify(current, q.tol)
    if not algebra.certified.ok:
        raise CertificateFailure("C_Phi failed the *-algebra certificate")
    return algebra


def automorphism_residual(q: Qds, space: OperatorSubspace) -> float:
    """Φ(D) = D 와 Φ♯Φ = ΦΦ♯ = id 의 최악 잔차."""
    worst = max(
        _invariance_residual(q.channel, space),
        _invariance_residual(q.adjoint_channel, space),
    )
    for b in space.basis:
        size = max(opnorm(b), 1e-300)
        worst = max(
            worst,
            opnorm(q.adjoint_channel(q.channel(b)) - b) / size,
            opnorm(q.channel(q.adjoint_channel(b)) - b) / size,
        )
    return worst


@lru_cache(maxsize=64)
def d_infinity(q: Qds) -> SubAlgebra:
    """D∞ = ⋂_{k∈ℤ} D_{Φ_k}, C_Φ 와 일치해야 합니다."""

    def verify(space: OperatorSubspace) -> bool:
        return automorphism_residual(q, space) <= certificate_tol(q.tol)

    space, steps = intersect_domains(q, (1, -1), verify, "D_inf")
    algebra = SubAlgebra.certify(space, q.tol)
    if not algebra.certified.ok:
        raise CertificateFailure("D_inf failed the *-algebra certificate")
    core = multiplicative_core(q)
    gap = algebra.space.distance(core.space)
    if gap > q.tol.rank_gap:
        raise CoreMismatch(f"D_inf and C_Phi differ (distance {gap:.2e})")
    logger.debug(f"D_inf stabilized after {steps} steps (dim {algebra.dim})")
    return algebra


def domain_stabilization_index(q: Qds) -> int:
    """D∞ 교집합이 안정화된 |k|."""

    def verify(space: OperatorSubspace) -> bool:
        return automorphism_residual(q, space) <= certificate_tol(q.tol)

    _, steps = intersect_domains(q, (1, -1), verify, "D_inf")
    return steps


def peripheral_oracle(q: Qds) -> SubAlgebra:
    """|λ| ≥ 1 − rank_gap 인 고유값의 불변 부분공간 (Schur 분해)."""
    threshold = 1.0 - q.tol.rank_gap
    _, z, sdim = sla.schur(
        q.channel.superop, output="complex", sort=lambda x: abs(x) >= threshold
    )
    mats = [unvec(z[:, k], q.dim) for k in range(sdim)]
    return SubAlgebra.certify(span_in(q.geometry, mats, q.tol), q.tol)


# ============================================================
# 보공간, 조건부 기댓값, 분해
# ============================================================
def perp_space(r: SubAlgebra, q: Qds) -> OperatorSubspace:
    """R^⊥φ = {a : φ(a*x) = 0, x ∈ R}."""
    return rebase(r.space, q.geometry, q.tol).complement()


def _expectation_matrix(space: OperatorSubspace, geometry: InnerProduct) -> CMat:
    return geometry.from_frame(space.projector())


def conditional_expectation(r: SubAlgebra, q: Qds) -> ConditionalExpectation:
    """R 위로의 φ-직교 사영을 조건부 기댓값으로 인증합니다."""
    space = rebase(r.space, q.geometry, q.tol)
    matrix = _expectation_matrix(space, q.geometry)
    expectation = ConditionalExpectation(SubAlgebra(space, r.certified), matrix)
    limit = certificate_tol(q.tol)

    eye = np.eye(q.dim, dtype=complex)
    idempotent = opnorm(matrix @ matrix - matrix)
    unital = opnorm(expectation(eye) - eye)
    if max(idempotent, unital) > limit:
        raise CertificateFailure(
            f"projection is not a unital idempotent (residual {max(idempotent, unital):.2e})"
        )

    choi = Channel(q.dim, matrix).min_choi_eigenvalue()
    module = 0.0
    for x in space.basis:
        size = max(opnorm(x), 1e-300)
        lx, rx = left_multiplication(x), right_multiplication(x)
        module = max(
            module,
            opnorm(matrix @ lx - lx @ matrix) / size,
            opnorm(matrix @ rx - rx @ matrix) / size,
        )
    if choi < -limit or module > limit:
        raise ModularInvarianceFailure(
            f"expectation is not positive or not bimodular "
            f"(choi {choi:.2e}, module {module:.2e})"
        )
    return expectation


def expectation_commutes(
    e: ConditionalExpectation, q: Qds, ks: Sequence[int] = (1, -1, 2, -2)
) -> dict[int, float]:
    """E∘Φ_k − Φ_k∘E 의 GNS operator norm."""
    g_e = q.geometry.to_frame(e.matrix)
    residuals: dict[int, float] = {}
    for k in ks:
        g_k = phi_k(q, k).in_frame(q.geometry)
        residuals[k] = opnorm(g_e @ g_k - g_k @ g_e)
    return residuals


@lru_cache(maxsize=64)
def e_infinity(q: Qds) -> ConditionalExpectation:
    """E∞: M → D∞, Φ_k 와 가환하고 D∞^⊥φ 를 보존합니다."""
    d_inf = d_infinity(q)
    e = conditional_expectation(d_inf, q)
    limit = certificate_tol(q.tol)
    commutation = expectation_commutes(e, q)
    perp = perp_space(d_inf, q)
    for k, residual in commutation.items():
        leak = _invariance_residual(phi_k(q, k), perp)
        if residual > limit or leak > limit:
            raise CertificateFailure(
                f"E_inf does not commute with Phi_{k} "
                f"(commutator {residual:.2e}, perp leak {leak:.2e})"
            )
    return e


def decompose(a: CMat, e: ConditionalExpectation) -> FlatElement:
    """a = a∥ + a⊥ (a∥ = E(a))."""
    if a.shape != (e.target.space.ambient_dim,) * 2:
        raise DimensionMismatch(f"operator shape {a.shape} does not match the algebra")
    par = e(a)
    return FlatElement(par=par, perp=a - par, expectation=e)


def _same_expectation(x: FlatElement, y: FlatElement) -> bool:
    if x.expectation is y.expectation:
        return True
    return bool(np.allclose(x.expectation.matrix, y.expectation.matrix))


def flat_product(x: FlatElement, y: FlatElement) -> FlatElement:
    """a×b = a∥b∥ + a∥b⊥ + a⊥b∥ (a⊥×b⊥ = 0)."""
    if not _same_expectation(x, y):
        raise DimensionMismatch("flat elements were decomposed by different expectations")
    return FlatElement(
        par=x.par @ y.par,
        perp=x.par @ y.perp + x.perp @ y.par,
        expectation=x.expectation,
    )


def flat_apply(channel: Channel, x: FlatElement) -> FlatElement:
    """M♭ 위의 Φ (flat 곱에 대한 준동형)."""
    return decompose(channel(x.value), x.expectation)


def pythagoras_residual(x: FlatElement, geometry: InnerProduct) -> float:
    """|‖aΩ‖² − ‖a∥Ω‖² − ‖a⊥Ω‖²|."""
    whole = geometry.norm(x.value) ** 2
    return abs(whole - geometry.norm(x.par) ** 2 - geometry.norm(x.perp) ** 2)


# ============================================================
# 중심, 가환 유효 대수 A, 블록 구조
# ============================================================
def random_hermitian(
    basis: Sequence[CMat], rng: np.random.Generator, dim: int
) -> CMat:
    """span(basis) 의 Hermitian 원소를 무작위 실계수로 만듭니다 (*-닫힌 span 가정)."""
    h = np.zeros((dim, dim), dtype=complex)
    for b in basis:
        h += rng.standard_normal() * hermitian_part(b)
        h += rng.standard_normal() * hermitian_part(1j * b)
    return h


def center(r: SubAlgebra, tol: Tolerance | None = None) -> SubAlgebra:
    """Z(R) = R ∩ R′."""
    tol = tol or Tolerance()
    comm = commutant(list(r.basis), tol, dim=r.space.ambient_dim)
    comm = rebase(comm, r.space.geometry, tol)
    z = SubAlgebra.certify(subspace_intersect(r.space, comm, tol), tol)
    for a in z.basis:
        for b in z.basis:
            if opnorm(a @ b - b @ a) > certificate_tol(tol) * max(
                opnorm(a) * opnorm(b), 1e-300
            ):
                raise CertificateFailure("center is not abelian")
    return z


def sample_pure_states(
    r: SubAlgebra, rng: np.random.Generator, count: int, tol: Tolerance
) -> list[CMat]:
    """R 위의 순수 상태를 벡터 ξ 로 샘플링합니다.

    R′ 의 최소 사영 range 안의 단위 벡터는 R 위에서 순수 상태를 줍니다.
    """
    comm = commutant(list(r.basis), tol, dim=r.space.ambient_dim)
    h = random_hermitian(comm.basis, rng, r.space.ambient_dim)
    blocks = spectral_projections(h, tol)
    vectors: list[CMat] = []
    for _ in range(count):
        _, w = blocks[int(rng.integers(len(blocks)))]
        c = rng.standard_normal(w.shape[1]) + 1j * rng.standard_normal(w.shape[1])
        xi = w @ c
        vectors.append(xi / np.linalg.norm(xi))
    return vectors


def pure_state_residual(a: SubAlgebra, vectors: Sequence[CMat]) -> float:
    """A ⊆ D_ω 검사: |ω(z*z) − |ω(z)|²| 의 최댓값."""
    worst = 0.0
    for xi in vectors:
        for z in a.basis:
            omega_z = np.vdot(xi, z @ xi)
            size = max(opnorm(z) ** 2, 1e-300)
            left = np.vdot(xi, adjoint(z) @ z @ xi) - abs(omega_z) ** 2
            right = np.vdot(xi, z @ adjoint(z) @ xi) - abs(omega_z) ** 2
            worst = max(worst, abs(left) / size, abs(right) / size)
    return float(worst)


def abelian_effective(
    q: Qds, rng: np.random.Generator | None = None, samples: int | None = None
) -> SubAlgebra:
    """A = Z(D∞), Φ(A) ⊆ A 와 순수 상태 샘플로 검증합니다.

    samples 가 None 이면 REVPART_PURE_STATE_SAMPLES 를 씁니다.
    """
    rng = rng or np.random.default_rng(0)
    if samples is None:
        samples = get_settings().pure_state_samples
    d_inf = d_infinity(q)
    a = center(d_inf, q.tol)
    limit = certificate_tol(q.tol)
    leak = _invariance_residual(q.channel, a.space)
    if leak > limit:
        raise CertificateFailure(f"Phi(A) is not contained in A (residual {leak:.2e})")
    residual = pure_state_residual(a, sample_pure_states(d_inf, rng, samples, q.tol))
    logger.debug(f"pure-state oracle residual on A: {residual:.2e}")
    if residual > limit:
        raise CertificateFailure(
            f"A is not multiplicative for sampled pure states (residual {residual:.2e})"
        )
    return a


def effective_expectation(
    q: Qds, rng: np.random.Generator | None = None, samples: int | None = None
) -> ConditionalExpectation:
    """A 위로의 φ-보존 조건부 기댓값."""
    return conditional_expectation(abelian_effective(q, rng, samples), q)


def structure_report(
    r: SubAlgebra,
    rng: np.random.Generator | None = None,
    tol: Tolerance | None = None,
    attempts: int = 5,
) -> list[BlockInfo]:
    """무작위 중심 Hermitian 원소의 스펙트럼 사영으로 Wedderburn 블록을 읽습니다."""
    rng = rng or np.random.default_rng(0)
    tol = tol or Tolerance()
    z = center(r, tol)
    hs = InnerProduct.hs(r.space.ambient_dim)
    for attempt in range(attempts):
        h = random_hermitian(z.basis, rng, r.space.ambient_dim)
        projections = spectral_projections(h, tol)
        if len(projections) != z.dim:
            logger.debug(f"degenerate central element on attempt {attempt + 1}")
            continue
        blocks: list[BlockInfo] = []
        for _, w in projections:
            p = w @ adjoint(w)
            n2 = span_in(hs, [p @ b @ p for b in r.basis], tol).dim
            n = isqrt(n2)
            if n * n != n2 or n == 0 or w.shape[1] % n:
                break
            blocks.append(BlockInfo(dim=n, multiplicity=w.shape[1] // n))
        else:
            if sum(b.dim**2 for b in blocks) == r.dim:
                return sorted(blocks, key=lambda b: (-b.dim, -b.multiplicity))
        logger.debug(f"inconsistent block reading on attempt {attempt + 1}")
    raise DegenerateRandomElement(
        f"no generic central element found in {attempts} draws"
    )


def projection_spot_check(
    q: Qds, rng: np.random.Generator | None = None, ks: Sequence[int] = (1, -1, 2, -2)
) -> float:
    """D∞ 의 스펙트럼 사영 p 에 대해 Φ_k(p) 가 여전히 사영인지 확인합니다."""
    rng = rng or np.random.default_rng(0)
    d_inf = d_infinity(q)
    h = random_hermitian(d_inf.basis, rng, q.dim)
    worst = 0.0
    for _, w in spectral_projections(h, q.tol):
        p = w @ adjoint(w)
        for k in ks:
            image = phi_k(q, k)(p)
            worst = max(worst, opnorm(image @ image - image))
    return worst


def chain_residual(q: Qds, n_max: int = 4) -> float:
    """span(D_{Φ^{n+1}}) ⊆ span(D_{Φⁿ}) 의 최악 잔차."""
    worst = 0.0
    for n in range(1, n_max + 1):
        outer = multiplicative_domain(q, n).space
        inner = multiplicative_domain(q, n + 1).space
        worst = max(worst, outer.containment_residual(inner))
    return worst


# ============================================================
# M♭ 노름과 표본 검사
# ============================================================
def flat_norm(x: FlatElement) -> float:
    """‖[[a∥, a⊥], [0, a∥]]‖: × 에 대해 submultiplicative 인 M♭ 노름.

    M 의 operator norm 은 × 에 대해 submultiplicative 가 아닙니다.
    """
    zero = np.zeros_like(x.par)
    return opnorm(np.block([[x.par, x.perp], [zero, x.par]]))


def flat_checks(
    q: Qds, rng: np.random.Generator | None = None, samples: int = 100
) -> dict[str, float]:
    """무작위 원소쌍에서 M♭ 의 대수 법칙을 측정합니다."""
    rng = rng or np.random.default_rng(0)
    e = e_infinity(q)
    worst = {
        "submultiplicativity": 0.0,
        "operator_norm_ratio": 0.0,
        "associativity": 0.0,
        "perp_product": 0.0,
        "homomorphism": 0.0,
        "pythagoras": 0.0,
    }
    for _ in range(samples):
        a, b, c = (decompose(random_cmat(rng, q.dim), e) for _ in range(3))
        ab = flat_product(a, b)
        worst["submultiplicativity"] = max(
            worst["submultiplicativity"], flat_norm(ab) - flat_norm(a) * flat_norm(b)
        )
        worst["operator_norm_ratio"] = max(
            worst["operator_norm_ratio"],
            opnorm(ab.value) / (opnorm(a.value) * opnorm(b.value)),
        )
        left = flat_product(ab, c).value
        right = flat_product(a, flat_product(b, c)).value
        worst["associativity"] = max(
            worst["associativity"], opnorm(left - right) / max(opnorm(left), 1.0)
        )
        a_perp = FlatElement(np.zeros_like(a.par), a.perp, e)
        b_perp = FlatElement(np.zeros_like(b.par), b.perp, e)
        worst["perp_product"] = max(
            worst["perp_product"], opnorm(flat_product(a_perp, b_perp).value)
        )
        image = flat_apply(q.channel, ab).value
        product = flat_product(flat_apply(q.channel, a), flat_apply(q.channel, b)).value
        worst["homomorphism"] = max(
            worst["homomorphism"], opnorm(image - product) / max(opnorm(image), 1.0)
        )
        worst["pythagoras"] = max(
            worst["pythagoras"],
            pythagoras_residual(a, q.geometry) / max(q.geometry.norm(a.value) ** 2, 1.0),
        )
    return worst
