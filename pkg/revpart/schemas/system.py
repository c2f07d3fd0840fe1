"""
시스템 파일(JSON) 스키마

복소수는 항상 [re, im] 2-원소 배열, 행렬은 row-major 중첩 배열입니다.
orjson 은 float 를 shortest round-trip 형식으로 쓰므로
parse → serialize → parse 는 비트 단위로 항등입니다.
"""

from pathlib import Path

import numpy as np
import orjson
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from revpart.core.errors import InputError, SchemaError
from revpart.numerics import CMat, Tolerance

ComplexPair = tuple[float, float]
MatrixJson = list[list[ComplexPair]]


def encode_matrix(x: CMat) -> MatrixJson:
    """복소 행렬 → [[ [re, im], ... ], ...]."""
    arr = np.asarray(x, dtype=complex)
    return [[(float(z.real), float(z.imag)) for z in row] for row in arr]


def decode_matrix(m: MatrixJson) -> CMat:
    arr = np.array(m, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise SchemaError("matrix entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _square(m: MatrixJson, size: int, label: str) -> None:
    if len(m) != size or any(len(row) != size for row in m):
        raise ValueError(f"{label} must be a {size}x{size} matrix")


class ChannelSpec(BaseModel):
    """Kraus 연산자 목록 또는 d²×d² superoperator 중 하나."""

    model_config = ConfigDict(extra="forbid")

    kraus: list[MatrixJson] | None = Field(
        default=None,
        description="Φ(a) = Σ K_i* a K_i 의 Kraus 연산자 목록",
    )
    superop: MatrixJson | None = Field(
        default=None,
        description="column-stacking vec 규약의 superoperator",
    )

    @model_validator(mode="after")
    def _exactly_one(self) -> "ChannelSpec":
        if (self.kraus is None) == (self.superop is None):
            raise ValueError("channel needs exactly one of 'kraus' or 'superop'")
        if self.kraus is not None and not self.kraus:
            raise ValueError("'kraus' must not be empty")
        return self


class ToleranceOverrides(BaseModel):
    """시스템 파일에 들어가는 허용오차 덮어쓰기 (모두 선택)."""

    model_config = ConfigDict(extra="forbid")

    eq_tol: float | None = Field(default=None, gt=0)
    rank_gap: float | None = Field(default=None, gt=0)
    iter_max: int | None = Field(default=None, gt=0)
    conv_tol: float | None = Field(default=None, gt=0)


class SystemFile(BaseModel):
    """
    양자 동역학계 입력 파일

    Example:
        >>> SystemFile.model_validate({
        ...     "dim": 1,
        ...     "channel": {"kraus": [[[[1.0, 0.0]]]]},
        ...     "rho": [[[1.0, 0.0]]],
        ... })
    """

    model_config = ConfigDict(extra="forbid")

    dim: int = Field(..., ge=1, description="행렬 대수 M_d 의 차원 d")
    channel: ChannelSpec = Field(..., description="Heisenberg 그림의 채널")
    rho: MatrixJson = Field(..., description="불변 상태 φ 의 밀도행렬")
    tolerance: ToleranceOverrides | None = Field(
        default=None,
        description="허용오차 덮어쓰기 (기본값과 REVPART_* 환경변수보다 우선)",
    )

    @model_validator(mode="after")
    def _check_shapes(self) -> "SystemFile":
        d = self.dim
        _square(self.rho, d, "rho")
        if self.channel.kraus is not None:
            for k, op in enumerate(self.channel.kraus):
                _square(op, d, f"kraus[{k}]")
        if self.channel.superop is not None:
            _square(self.channel.superop, d * d, "superop")
        return self

    @classmethod
    def from_arrays(
        cls,
        rho: CMat,
        kraus: list[CMat] | None = None,
        superop: CMat | None = None,
        tolerance: ToleranceOverrides | None = None,
    ) -> "SystemFile":
        return cls(
            dim=int(np.asarray(rho).shape[0]),
            channel=ChannelSpec(
                kraus=[encode_matrix(k) for k in kraus] if kraus is not None else None,
                superop=encode_matrix(superop) if superop is not None else None,
            ),
            rho=encode_matrix(rho),
            tolerance=tolerance,
        )

    def rho_matrix(self) -> CMat:
        return decode_matrix(self.rho)

    def kraus_matrices(self) -> list[CMat] | None:
        if self.channel.kraus is None:
            return None
        return [decode_matrix(k) for k in self.channel.kraus]

    def superop_matrix(self) -> CMat | None:
        if self.channel.superop is None:
            return None
        return decode_matrix(self.channel.superop)

    def resolve_tolerance(self, eq_tol: float | None = None) -> Tolerance:
        """기본값 < REVPART_* < 파일 tolerance < --tol."""
        overrides = self.tolerance.model_dump() if self.tolerance else {}
        if eq_tol is not None:
            overrides["eq_tol"] = eq_tol
        try:
            return Tolerance.from_settings(**overrides)
        except ValidationError as exc:
            raise SchemaError(f"invalid tolerance: {exc}") from exc


def load_system_file(path: str | Path) -> SystemFile:
    """파일을 읽어 SystemFile 로 검증합니다.

    Raises:
        InputError: 파일을 읽을 수 없는 경우
        SchemaError: JSON 이 깨졌거나 스키마에 맞지 않는 경우
    """
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    return parse_system(raw)


def parse_system(raw: bytes | str) -> SystemFile:
    try:
        data = orjson.loads(raw)
    except orjson.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc}") from exc
    try:
        return SystemFile.model_validate(data)
    except ValidationError as exc:
        raise SchemaError(str(exc)) from exc


def dump_system(system: SystemFile) -> bytes:
    return orjson.dumps(
        system.model_dump(mode="json", exclude_none=True), option=orjson.OPT_INDENT_2
    )
