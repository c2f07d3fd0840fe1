"""
analyze 그래프 구성

그래프 구조:
    START -> validate -> (조건부) -> algebra -> gns -> dynamics -> report -> END
                                  \\-> report (가정 위반)
"""

from langgraph.graph import END, START, StateGraph
from loguru import logger

from revpart.graph.edges import route_after_validation
from revpart.graph.nodes import (
    algebra_node,
    dynamics_node,
    gns_node,
    report_node,
    validate_node,
)
from revpart.graph.state import AnalysisState, create_initial_state
from revpart.schemas.report import AnalysisReport
from revpart.schemas.system import SystemFile

# 전역 그래프 인스턴스 (싱글톤)
_compiled_graph = None


def create_analysis_graph():
    """
    analyze 파이프라인 그래프를 생성하고 컴파일합니다.

    그래프 구조:
        ```
              ┌──────────┐
              │ validate │
              └────┬─────┘
                   │
          ┌────────┴────────┐
          ▼                 │ (거부)
     ┌─────────┐            │
     │ algebra │            │
     └────┬────┘            │
          ▼                 │
     ┌─────────┐            │
     │   gns   │            │
     └────┬────┘            │
          ▼                 │
     ┌──────────┐           │
     │ dynamics │           │
     └────┬─────┘           │
          ▼                 ▼
          └──────► report ◄─┘ -> END
        ```

    Returns:
        CompiledStateGraph: 컴파일된 LangGraph 그래프
    """
    logger.debug("🔧 analyze 그래프 생성 시작")

    builder = StateGraph(AnalysisState)

    builder.add_node("validate", validate_node)
    builder.add_node("algebra", algebra_node)
    builder.add_node("gns", gns_node)
    builder.add_node("dynamics", dynamics_node)
    builder.add_node("report", report_node)

    builder.add_edge(START, "validate")
    builder.add_conditional_edges(
        "validate",
        route_after_validation,
        {
            "algebra": "algebra",
            "report": "report",
        },
    )
    builder.add_edge("algebra", "gns")
    builder.add_edge("gns", "dynamics")
    builder.add_edge("dynamics", "report")
    builder.add_edge("report", END)

    compiled = builder.compile()

    logger.debug("✅ analyze 그래프 컴파일 완료")

    return compiled


def get_analysis_graph():
    """
    싱글톤 패턴으로 컴파일된 그래프를 반환합니다.

    Example:
        >>> graph = get_analysis_graph()
        >>> result = graph.invoke(create_initial_state(system))
    """
    global _compiled_graph

    if _compiled_graph is None:
        _compiled_graph = create_analysis_graph()

    return _compiled_graph


def run_analysis(
    system: SystemFile, seed: int = 0, eq_tol: float | None = None
) -> AnalysisReport:
    """시스템 하나를 끝까지 분석해 리포트를 반환합니다."""
    result = get_analysis_graph().invoke(create_initial_state(system, seed, eq_tol))
    return result["report"]
