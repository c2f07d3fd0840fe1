"""
분석 리포트 스키마

`revpart schema` 가 AnalysisReport.model_json_schema() 를 출력하며,
그것이 공개 리포트 스키마입니다. 수치 주장은 모두 검사에 쓰인 임계값을 함께 담습니다.
"""

from typing import Literal

import orjson
from pydantic import BaseModel, ConfigDict, Field

from revpart.schemas.system import MatrixJson

REPORT_SCHEMA_VERSION = "1.0"

Stage = Literal["load", "validate", "algebra", "gns", "dynamics", "report"]


class Residual(BaseModel):
    """측정값과 그 값을 판정한 임계값."""

    value: float = Field(..., description="측정된 잔차")
    tol: float = Field(..., description="판정에 사용한 임계값")
    passed: bool = Field(..., description="value <= tol 여부")

    @classmethod
    def measure(cls, value: float, tol: float) -> "Residual":
        return cls(value=float(value), tol=float(tol), passed=bool(value <= tol))


class ToleranceReport(BaseModel):
    eq_tol: float
    rank_gap: float
    iter_max: int
    conv_tol: float


class Diagnostic(BaseModel):
    """단계별 오류. 리포트는 오류가 있어도 출력됩니다."""

    stage: Stage
    error: str = Field(..., description="예외 클래스 이름", examples=["ConvergenceFailure"])
    message: str


class ValidationSection(BaseModel):
    passed: bool
    hypothesis: str | None = Field(
        default=None,
        description="위반된 가정 이름 (passed=false 일 때)",
        examples=["unitality", "state invariance"],
    )
    flags: dict[str, bool] = Field(default_factory=dict)
    residuals: dict[str, float] = Field(default_factory=dict)


class BlockModel(BaseModel):
    dim: int = Field(..., description="행렬 블록 크기 n (M_n)")
    multiplicity: int = Field(..., description="블록의 중복도")


class AlgebraSection(BaseModel):
    domain_dims: dict[str, int] = Field(
        default_factory=dict, description="k → dim D_{Φ_k} (k = ±1..K)"
    )
    stabilization_index: int
    k_range: int = Field(..., description="리포트에 담긴 |k| 상한 K")
    dim_d_infinity_plus: int
    dim_core: int
    dim_d_infinity: int
    dim_peripheral: int
    dim_center: int
    dim_effective: int = Field(
        ..., description="가환 대수 A = Z(D∞) 의 차원 (순수 상태 표본으로 검증)"
    )
    blocks: list[BlockModel] = Field(default_factory=list)
    e_infinity: MatrixJson = Field(..., description="E∞ 의 superoperator")
    distances: dict[str, Residual] = Field(
        default_factory=dict, description="D∞ 와 C_Φ, 주변 스펙트럼 공간 사이의 거리"
    )
    expectation_commutation: dict[str, Residual] = Field(
        default_factory=dict, description="k → ‖E∞∘Φ_k − Φ_k∘E∞‖"
    )
    projection_spot_check: Residual
    flat: dict[str, Residual] = Field(default_factory=dict, description="M♭ 표본 검사")
    flat_operator_norm_ratio: float = Field(
        ..., description="관측된 max ‖a×b‖/(‖a‖‖b‖) (operator norm)"
    )


class Classification(BaseModel):
    """에르고딕 계층 분류."""

    model_config = ConfigDict(frozen=True)

    ergodic: bool
    weakly_mixing: bool
    mixing: bool
    completely_irreversible: bool
    asymptotic_equilibrium: bool
    second_modulus: float = Field(
        ..., description="Φ superoperator 의 주변 스펙트럼 밖 최대 고유값 절댓값"
    )
    dim_d_infinity: int
    residuals: dict[str, float] = Field(
        default_factory=dict,
        description="교차 검증 값: correlation_defect (N = 200 상관 평균의 최댓값)",
    )
    notes: list[str] = Field(default_factory=list)

    def implications_hold(self) -> bool:
        chain = (not self.mixing or self.weakly_mixing) and (
            not self.weakly_mixing or self.ergodic
        )
        irreversible = not self.completely_irreversible or (
            self.ergodic and self.asymptotic_equilibrium
        )
        return chain and irreversible


class GnsSection(BaseModel):
    dim_h0: int
    dim_h1: int
    dim_h_infinity: int
    h0_agreement: Residual = Field(..., description="V± 경로와 도메인 경로의 H₀ 거리")
    v_iterations: dict[str, int]
    v_residuals: dict[str, Residual]
    limit_residual: Residual
    strong_decay: bool
    modular: dict[str, Residual] = Field(default_factory=dict)
    flat_intertwining: Residual


class CesaroRow(BaseModel):
    k: int
    n: int
    residual: float


class ZMeanSummary(BaseModel):
    n: int
    residual: float = Field(..., description="‖Z_N − Z‖ (GNS operator norm)")
    envelope: float = Field(..., description="삼각부등식 상한 (1/(2N+1))Σ‖τ_k − Z‖")
    limit_residual: Residual = Field(..., description="‖Z − E∞‖ (strong decay 일 때 판정)")
    split_residual: Residual
    strong_decay: bool


class DynamicsSection(BaseModel):
    classification: Classification
    cesaro: list[CesaroRow] = Field(default_factory=list)
    cesaro_consistency: Residual
    z_mean: ZMeanSummary
    e_plus_distance: Residual


class DilationCheck(BaseModel):
    name: str
    passed: bool
    residual: float
    tol: float


class DilationReport(BaseModel):
    """verify_dilation 결과. 수학적 실패는 예외가 아니라 이 리포트의 내용입니다."""

    checks: list[DilationCheck] = Field(default_factory=list)
    steps: int
    step_residuals: list[float] = Field(default_factory=list)
    margin: float = Field(..., description="D_Φ 밖 원소의 최대 biconditional 잔차")

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> DilationCheck:
        return next(c for c in self.checks if c.name == name)


class AnalysisReport(BaseModel):
    """`revpart analyze` 의 출력 문서."""

    schema_version: str = Field(default=REPORT_SCHEMA_VERSION)
    seed: int
    dim: int
    tolerance: ToleranceReport
    validation: ValidationSection
    algebra: AlgebraSection | None = None
    gns: GnsSection | None = None
    dynamics: DynamicsSection | None = None
    diagnostics: list[Diagnostic] = Field(default_factory=list)

    def to_json(self) -> bytes:
        return dump_json(self)


def dump_json(model: BaseModel) -> bytes:
    return orjson.dumps(model.model_dump(mode="json"), option=orjson.OPT_INDENT_2)


# ============================================================
# 하위 명령 출력
# ============================================================
class DecomposeOutput(BaseModel):
    operator: MatrixJson
    par: MatrixJson = Field(..., description="a∥ = E∞(a)")
    perp: MatrixJson = Field(..., description="a⊥ = a − E∞(a)")
    pythagoras: Residual


class EvolveOutput(BaseModel):
    direction: Literal["forward", "adjoint"]
    steps: int
    norms: list[float]
    residuals: list[float] | None = Field(
        default=None, description="‖Φʲ(a) − φ(a)I‖ (D∞ = ℂ1 일 때만)"
    )
    decay_ok: bool | None = None
    second_modulus: float
    trajectory: list[MatrixJson]


class NagyFoiasOutput(BaseModel):
    dim_H0: int
    dim_H1: int
    agreement: Residual
    unitary_part: MatrixJson
    cnu_part: MatrixJson
    cnu_singular_values: list[float]


class CesaroOutput(BaseModel):
    k: int
    n: int
    residual: float
    history: list[float]
    norms: list[float]
    consistency: Residual
    expectation: MatrixJson
    z_mean: ZMeanSummary
