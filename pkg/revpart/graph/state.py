"""
analyze 파이프라인의 상태(State) 타입 정의

각 노드는 State 를 받아서 업데이트할 필드만 반환합니다.
diagnostics 는 리듀서(operator.add)로 노드마다 누적됩니다.
"""

import operator
from typing import Annotated, TypedDict

from revpart.numerics import Tolerance
from revpart.qds import Qds
from revpart.schemas.report import (
    AlgebraSection,
    AnalysisReport,
    Diagnostic,
    DynamicsSection,
    GnsSection,
    ValidationSection,
)
from revpart.schemas.system import SystemFile


class AnalysisState(TypedDict):
    """
    analyze 파이프라인 상태

    Attributes:
        system: 검증 전 입력 시스템 파일
        seed: 난수 시드 (리포트에 그대로 기록)
        eq_tol: --tol 로 받은 eq_tol 덮어쓰기 (선택)
        tol: 해석된 허용오차
        qds: 검증된 시스템 (거부되면 None)
        validation: 검증 결과 섹션
        algebra/gns/dynamics: 단계별 리포트 섹션
        diagnostics: 단계 오류 목록
        report: 최종 리포트
    """

    system: SystemFile
    seed: int
    eq_tol: float | None
    tol: Tolerance | None
    qds: Qds | None
    validation: ValidationSection | None
    algebra: AlgebraSection | None
    gns: GnsSection | None
    dynamics: DynamicsSection | None
    diagnostics: Annotated[list[Diagnostic], operator.add]
    report: AnalysisReport | None


def create_initial_state(
    system: SystemFile,
    seed: int = 0,
    eq_tol: float | None = None,
) -> AnalysisState:
    """
    초기 상태를 생성합니다.

    Example:
        >>> state = create_initial_state(system, seed=7)
        >>> state["seed"]
        7
    """
    return AnalysisState(
        system=system,
        seed=seed,
        eq_tol=eq_tol,
        tol=None,
        qds=None,
        validation=None,
        algebra=None,
        gns=None,
        dynamics=None,
        diagnostics=[],
        report=None,
    )
