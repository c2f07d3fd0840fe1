"""
revpart 하위 명령 핸들러

각 핸들러는 파싱된 인자를 받아 CommandResult(출력 바이트, exit code)를 돌려줍니다.
출력 위치(stdout 또는 --out)는 main 이 결정합니다.
"""

import argparse
import csv
import io
import re
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
import orjson
import scipy.linalg as sla
from loguru import logger

from revpart.algebra import certificate_tol, decompose, e_infinity, pythagoras_residual
from revpart.core.config import get_settings
from revpart.core.errors import DimensionMismatch, InvalidParams, SchemaError, UnknownOperator
from revpart.dynamics import cesaro_expectation, evolve, z_mean
from revpart.fixtures import SIGMA_X, SIGMA_Y, SIGMA_Z, generate
from revpart.gns import nagy_foias
from revpart.graph import run_analysis
from revpart.numerics import CMat, matrix_unit
from revpart.qds import Qds, from_system
from revpart.schemas.report import (
    AnalysisReport,
    CesaroOutput,
    DecomposeOutput,
    EvolveOutput,
    NagyFoiasOutput,
    Residual,
    dump_json,
)
from revpart.schemas.system import decode_matrix, dump_system, encode_matrix, load_system_file

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_HYPOTHESIS = 2

_PAULI = {"sx": SIGMA_X, "sy": SIGMA_Y, "sz": SIGMA_Z}
_MATRIX_UNIT = re.compile(r"^E(?:(\d)(\d)|_(\d+)_(\d+))$")


@dataclass(frozen=True)
class CommandResult:
    payload: bytes
    code: int = EXIT_OK


# ============================================================
# 공통 보조 함수
# ============================================================
def resolve_seed(args: argparse.Namespace) -> int:
    return get_settings().seed if args.seed is None else args.seed


def load_qds(args: argparse.Namespace) -> Qds:
    """입력 파일을 읽고 검증합니다. 가정 위반은 HypothesisError 로 전파됩니다."""
    system = load_system_file(args.input)
    rng = np.random.default_rng([resolve_seed(args), 0])
    return from_system(
        system, args.tol, rng=rng, schwarz_samples=get_settings().schwarz_samples
    )


def parse_operator(text: str, dim: int) -> CMat:
    """
    연산자 인자를 행렬로 바꿉니다.

    지원 형식: I, sx/sy/sz (d = 2), Eij 또는 E_i_j (행렬 단위),
    JSON 행렬 (실수 중첩 배열 또는 [re, im] 쌍).
    """
    name = text.strip()
    if name == "I":
        return np.eye(dim, dtype=complex)
    if name in _PAULI:
        if dim != 2:
            raise UnknownOperator(f"'{name}' is only defined for d = 2 (got d = {dim})")
        return _PAULI[name].copy()
    match = _MATRIX_UNIT.match(name)
    if match:
        i, j = (int(g) for g in match.groups() if g is not None)
        if i >= dim or j >= dim:
            raise UnknownOperator(f"'{name}' is out of range for d = {dim}")
        return matrix_unit(dim, i, j)
    if not name.startswith("["):
        raise UnknownOperator(f"unknown operator '{name}' (use I, sx, sy, sz, Eij or a JSON matrix)")

    try:
        raw = orjson.loads(name)
    except orjson.JSONDecodeError as exc:
        raise SchemaError(f"operator is not valid JSON: {exc}") from exc
    arr = np.asarray(raw)
    matrix = decode_matrix(raw) if arr.ndim == 3 else arr.astype(complex)
    if matrix.shape != (dim, dim):
        raise DimensionMismatch(f"operator has shape {matrix.shape}, expected ({dim}, {dim})")
    return matrix


def _parse_floats(text: str, label: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InvalidParams(f"{label} must be comma-separated numbers (got '{text}')") from None


def _csv_table(rows: Sequence[tuple[int, float, float | None]]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["step", "norm", "residual"])
    for step, norm, residual in rows:
        writer.writerow(
            [step, repr(float(norm)), "" if residual is None else repr(float(residual))]
        )
    return buffer.getvalue().encode()


# ============================================================
# analyze
# ============================================================
def cmd_analyze(args: argparse.Namespace) -> CommandResult:
    system = load_system_file(args.input)
    report = run_analysis(system, seed=resolve_seed(args), eq_tol=args.tol)
    code = EXIT_OK if report.validation.passed else EXIT_HYPOTHESIS
    if code != EXIT_OK:
        logger.warning(f"⛔ 가정 위반: {report.validation.hypothesis}")
    return CommandResult(report.to_json(), code)


# ============================================================
# gen
# ============================================================
def gen_params(args: argparse.Namespace) -> dict[str, object]:
    """family 별 인자 사전. 지정하지 않은 값은 builder 기본값을 씁니다."""
    rho = _parse_floats(args.rho, "--rho") if args.rho else None
    if rho is None and args.d is not None and args.d != 2:
        rho = [1.0 / args.d] * args.d
    if rho is not None and args.d is not None and len(rho) != args.d:
        raise InvalidParams(f"--rho has {len(rho)} entries but --d is {args.d}")

    family = args.family
    if family == "dephasing":
        return {"p": args.p, "rho": rho}
    if family == "unitary":
        return {"phase": args.phase, "rho": rho}
    if family == "classical":
        if args.transition is None:
            return {}
        rows = [_parse_floats(row, "--P") for row in args.transition.split(";")]
        return {"p": rows}
    if family == "shift_dephase":
        return {"d": args.d}
    return {
        "d": args.d,
        "rng": np.random.default_rng(resolve_seed(args)),
        "include_classical": args.include_classical,
    }


def cmd_gen(args: argparse.Namespace) -> CommandResult:
    system = generate(args.family, **gen_params(args))
    logger.info(f"🧪 [Gen] {args.family} 시스템 생성 (d = {system.dim})")
    return CommandResult(dump_system(system))


# ============================================================
# decompose / evolve / nagyfoias / cesaro
# ============================================================
def cmd_decompose(args: argparse.Namespace) -> CommandResult:
    q = load_qds(args)
    a = parse_operator(args.operator, q.dim)
    parts = decompose(a, e_infinity(q))
    output = DecomposeOutput(
        operator=encode_matrix(a),
        par=encode_matrix(parts.par),
        perp=encode_matrix(parts.perp),
        pythagoras=Residual.measure(
            pythagoras_residual(parts, q.geometry), certificate_tol(q.tol)
        ),
    )
    return CommandResult(dump_json(output))


def cmd_evolve(args: argparse.Namespace) -> CommandResult:
    q = load_qds(args)
    a = parse_operator(args.operator, q.dim)
    result = evolve(q, a, args.steps, args.direction)
    if args.csv:
        residuals = result.residuals or [None] * len(result.norms)
        rows = list(zip(range(len(result.norms)), result.norms, residuals, strict=True))
        return CommandResult(_csv_table(rows))
    output = EvolveOutput(
        direction=args.direction,
        steps=args.steps,
        norms=result.norms,
        residuals=result.residuals,
        decay_ok=result.decay_ok,
        second_modulus=result.second_modulus,
        trajectory=[encode_matrix(x) for x in result.trajectory],
    )
    return CommandResult(dump_json(output))


def cmd_nagyfoias(args: argparse.Namespace) -> CommandResult:
    q = load_qds(args)
    nf = nagy_foias(q)
    cnu = nf.cnu_part.matrix
    output = NagyFoiasOutput(
        dim_H0=nf.h0.dim,
        dim_H1=nf.h1.dim,
        agreement=Residual.measure(nf.agreement_residual, q.tol.rank_gap),
        unitary_part=encode_matrix(nf.unitary_part.matrix),
        cnu_part=encode_matrix(cnu),
        cnu_singular_values=[float(s) for s in sla.svdvals(cnu)] if cnu.size else [],
    )
    return CommandResult(dump_json(output))


def cmd_cesaro(args: argparse.Namespace) -> CommandResult:
    q = load_qds(args)
    result = cesaro_expectation(q, args.k, args.n)
    if args.csv:
        rows = list(zip(range(1, args.n + 1), result.norms, result.history, strict=True))
        return CommandResult(_csv_table(rows))
    limit = certificate_tol(q.tol)
    output = CesaroOutput(
        k=result.k,
        n=result.n,
        residual=result.residual,
        history=result.history,
        norms=result.norms,
        consistency=Residual.measure(result.consistency, limit),
        expectation=encode_matrix(result.expectation.matrix),
        z_mean=z_mean(q, args.n).summary(limit),
    )
    return CommandResult(dump_json(output))


# ============================================================
# schema
# ============================================================
def cmd_schema(args: argparse.Namespace) -> CommandResult:
    schema = AnalysisReport.model_json_schema()
    return CommandResult(orjson.dumps(schema, option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS))


COMMANDS: dict[str, Callable[[argparse.Namespace], CommandResult]] = {
    "analyze": cmd_analyze,
    "gen": cmd_gen,
    "decompose": cmd_decompose,
    "evolve": cmd_evolve,
    "nagyfoias": cmd_nagyfoias,
    "cesaro": cmd_cesaro,
    "schema": cmd_schema,
}
