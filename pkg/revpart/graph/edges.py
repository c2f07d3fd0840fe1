"""
analyze 그래프의 조건부 라우팅 로직

이 파일에서 정의하는 엣지:
    - route_after_validation: 검증 통과 여부에 따른 분기
"""

from typing import Literal

from loguru import logger

from revpart.graph.state import AnalysisState


def route_after_validation(state: AnalysisState) -> Literal["algebra", "report"]:
    """
    🔀 검증 결과에 따른 조건부 라우팅

    라우팅 규칙:
        - 검증 통과 -> "algebra" (대수 → GNS → 동역학 → 리포트)
        - 가정 위반 -> "report" (위반 가정만 담은 리포트)
    """
    passed = state.get("qds") is not None
    logger.debug(f"🔀 [Edge] 라우팅 결정: validation passed={passed}")
    return "algebra" if passed else "report"
