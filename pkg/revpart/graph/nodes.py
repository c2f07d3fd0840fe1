"""
analyze 파이프라인의 노드(Node) 정의

이 파일에서 정의하는 노드:
    1. validate_node: 표준 가정 검증과 Φ♯ 구성
    2. algebra_node: D_{Φ_k}, D∞, E∞, 블록 구조, M♭ 표본 검사
    3. gns_node: V±, Nagy–Foias, H∞, 모듈러 연산자, flat isometry
    4. dynamics_node: 분류, Cesàro 표, Z_N, E₊
    5. report_node: AnalysisReport 조립

검증 이후 단계의 오류는 diagnostics 에 쌓이고, 리포트는 그대로 출력됩니다.
"""

import numpy as np
from loguru import logger

from revpart.algebra import (
    abelian_effective,
    center,
    certificate_tol,
    d_infinity,
    d_infinity_plus,
    domain_stabilization_index,
    e_infinity,
    expectation_commutes,
    flat_checks,
    multiplicative_core,
    multiplicative_domain,
    peripheral_oracle,
    projection_spot_check,
    structure_report,
)
from revpart.core.config import get_settings
from revpart.core.errors import HypothesisError, RevpartError
from revpart.dynamics import cesaro_expectation, classify, e_plus, e_plus_distances, z_mean
from revpart.gns import flat_isometry, h_infinity, modular_ops, nagy_foias, v_limits
from revpart.graph.state import AnalysisState
from revpart.numerics import opnorm
from revpart.qds import Qds, from_system
from revpart.schemas.report import (
    AlgebraSection,
    AnalysisReport,
    BlockModel,
    CesaroRow,
    Diagnostic,
    DynamicsSection,
    GnsSection,
    Residual,
    Stage,
    ToleranceReport,
    ValidationSection,
)
from revpart.schemas.system import encode_matrix

CESARO_STEPS = (1, 10, 100)
Z_MEAN_STEPS = 100
FLAT_SAMPLES = 100

_STAGE_STREAM = {"validate": 0, "algebra": 1, "gns": 2, "dynamics": 3}

# shape 불일치 등 numpy 가 던지는 ValueError 도 diagnostics 로 보냅니다.
STAGE_ERRORS = (RevpartError, np.linalg.LinAlgError, ValueError)


def _rng(state: AnalysisState, stage: Stage) -> np.random.Generator:
    """단계마다 독립적인 시드 스트림."""
    return np.random.default_rng([state["seed"], _STAGE_STREAM[stage]])


def _diagnostic(stage: Stage, exc: Exception) -> dict:
    logger.error(f"[{stage.capitalize()}] {type(exc).__name__}: {exc}")
    return {"diagnostics": [Diagnostic(stage=stage, error=type(exc).__name__, message=str(exc))]}


def _k_range(q: Qds) -> int:
    steps = domain_stabilization_index(q)
    cap = get_settings().report_k_cap
    logger.debug(f"domain intersections computed up to |k| = {steps}")
    return max(1, min(steps + 1, cap))


# ============================================================
# 🔍 Validate Node
# ============================================================
def validate_node(state: AnalysisState) -> dict:
    """
    🔍 검증 노드: 가정 위반이면 qds=None 과 위반 가정 이름을 남깁니다.

    입력/스키마 오류(InputError)는 그대로 전파되어 CLI 가 exit 1 로 처리합니다.
    """
    logger.info("🔍 [Validate] 표준 가정 검증 시작")
    system = state["system"]
    tol = system.resolve_tolerance(state["eq_tol"])
    try:
        q = from_system(
            system,
            state["eq_tol"],
            rng=_rng(state, "validate"),
            schwarz_samples=get_settings().schwarz_samples,
        )
    except HypothesisError as exc:
        logger.warning(f"🔍 [Validate] 거부: {exc}")
        return {
            "tol": tol,
            "qds": None,
            "validation": ValidationSection(
                passed=False,
                hypothesis=exc.hypothesis,
                residuals={exc.hypothesis: exc.residual},
            ),
        }

    logger.info("🔍 [Validate] 통과")
    return {
        "tol": q.tol,
        "qds": q,
        "validation": ValidationSection(
            passed=True,
            flags={
                "invariant": q.flags.invariant,
                "modular_commuting": q.flags.modular_commuting,
            },
            residuals=q.residuals,
        ),
    }


# ============================================================
# 🧮 Algebra Node
# ============================================================
def algebra_node(state: AnalysisState) -> dict:
    """🧮 대수 노드: 가역 부분 D∞ 와 그 주변 구조."""
    logger.info("🧮 [Algebra] 곱셈 영역과 D∞ 계산 시작")
    q = state["qds"]
    assert q is not None
    rng = _rng(state, "algebra")
    limit = certificate_tol(q.tol)
    try:
        k_range = _k_range(q)
        domain_dims = {
            str(s * k): multiplicative_domain(q, s * k).dim
            for k in range(1, k_range + 1)
            for s in (1, -1)
        }
        d_inf = d_infinity(q)
        plus = d_infinity_plus(q)
        core = multiplicative_core(q)
        periph = peripheral_oracle(q)
        blocks = structure_report(d_inf, rng, q.tol)
        flat = flat_checks(q, rng, FLAT_SAMPLES)
        ratio = flat.pop("operator_norm_ratio")
        section = AlgebraSection(
            domain_dims=domain_dims,
            stabilization_index=domain_stabilization_index(q),
            k_range=k_range,
            dim_d_infinity_plus=plus.dim,
            dim_core=core.dim,
            dim_d_infinity=d_inf.dim,
            dim_peripheral=periph.dim,
            dim_center=center(d_inf, q.tol).dim,
            dim_effective=abelian_effective(
                q, rng, samples=get_settings().pure_state_samples
            ).dim,
            blocks=[BlockModel(dim=b.dim, multiplicity=b.multiplicity) for b in blocks],
            e_infinity=encode_matrix(e_infinity(q).matrix),
            distances={
                "core": Residual.measure(d_inf.space.distance(core.space), limit),
                "peripheral": Residual.measure(d_inf.space.distance(periph.space), limit),
            },
            expectation_commutation={
                str(k): Residual.measure(v, limit)
                for k, v in expectation_commutes(e_infinity(q), q).items()
            },
            projection_spot_check=Residual.measure(projection_spot_check(q, rng), limit),
            flat={name: Residual.measure(v, limit) for name, v in flat.items()},
            flat_operator_norm_ratio=ratio,
        )
    except STAGE_ERRORS as exc:
        return _diagnostic("algebra", exc)

    logger.info(f"🧮 [Algebra] 완료: dim D∞ = {section.dim_d_infinity}")
    return {"algebra": section}


# ============================================================
# 🌀 GNS Node
# ============================================================
def gns_node(state: AnalysisState) -> dict:
    """🌀 GNS 노드: 축약 U 의 Nagy–Foias 분해와 극한."""
    logger.info("🌀 [GNS] Nagy–Foias 분해 시작")
    q = state["qds"]
    assert q is not None
    limit = certificate_tol(q.tol)
    try:
        limits = v_limits(q)
        nf = nagy_foias(q)
        h_inf = h_infinity(q)
        modular = modular_ops(q)
        flat = flat_isometry(q)
        p_inf = h_inf.p_inf.matrix
        strong = max(
            opnorm(limits.v_plus.matrix - p_inf), opnorm(limits.v_minus.matrix - p_inf)
        )
        section = GnsSection(
            dim_h0=nf.h0.dim,
            dim_h1=nf.h1.dim,
            dim_h_infinity=h_inf.h_inf.dim,
            h0_agreement=Residual.measure(nf.agreement_residual, limit),
            v_iterations=limits.iterations,
            v_residuals={
                name: Residual.measure(v, q.tol.conv_tol)
                for name, v in limits.residuals.items()
            },
            limit_residual=Residual.measure(limits.limit_residual, limit),
            strong_decay=strong <= limit,
            modular={
                name: Residual.measure(v, limit) for name, v in modular.residuals.items()
            },
            flat_intertwining=Residual.measure(flat.intertwining_residual(), limit),
        )
    except STAGE_ERRORS as exc:
        return _diagnostic("gns", exc)

    logger.info(f"🌀 [GNS] 완료: dim H0 = {section.dim_h0}, dim H1 = {section.dim_h1}")
    return {"gns": section}


# ============================================================
# ⏳ Dynamics Node
# ============================================================
def dynamics_node(state: AnalysisState) -> dict:
    """⏳ 동역학 노드: 분류와 Cesàro 수렴표."""
    logger.info("⏳ [Dynamics] 분류 시작")
    q = state["qds"]
    assert q is not None
    limit = certificate_tol(q.tol)
    try:
        classification = classify(q)
        rows: list[CesaroRow] = []
        consistency = 0.0
        for k in range(1, _k_range(q) + 1):
            for signed in (k, -k):
                result = cesaro_expectation(q, signed, max(CESARO_STEPS))
                consistency = max(consistency, result.consistency)
                rows += [
                    CesaroRow(k=signed, n=n, residual=result.history[n - 1])
                    for n in CESARO_STEPS
                ]
        z = z_mean(q, Z_MEAN_STEPS)
        e_plus(q)
        section = DynamicsSection(
            classification=classification,
            cesaro=rows,
            cesaro_consistency=Residual.measure(consistency, limit),
            z_mean=z.summary(limit),
            e_plus_distance=Residual.measure(e_plus_distances(q)[-1], limit),
        )
    except STAGE_ERRORS as exc:
        return _diagnostic("dynamics", exc)

    logger.info(
        f"⏳ [Dynamics] 완료: ergodic={classification.ergodic}, mixing={classification.mixing}"
    )
    return {"dynamics": section}


# ============================================================
# 📝 Report Node
# ============================================================
def report_node(state: AnalysisState) -> dict:
    """📝 리포트 노드: 단계별 섹션을 AnalysisReport 로 묶습니다."""
    logger.info("📝 [Report] 리포트 조립")
    tol = state["tol"]
    assert tol is not None and state["validation"] is not None
    report = AnalysisReport(
        seed=state["seed"],
        dim=state["system"].dim,
        tolerance=ToleranceReport(**tol.model_dump()),
        validation=state["validation"],
        algebra=state.get("algebra"),
        gns=state.get("gns"),
        dynamics=state.get("dynamics"),
        diagnostics=state.get("diagnostics", []),
    )
    return {"report": report}
