"""
analyze 파이프라인 (LangGraph StateGraph)

구조:
    - state.py: AnalysisState 정의
    - nodes.py: 단계별 노드
    - edges.py: 조건부 라우팅
    - graph.py: 그래프 조립과 실행
"""

from revpart.graph.graph import create_analysis_graph, get_analysis_graph, run_analysis

__all__ = ["create_analysis_graph", "get_analysis_graph", "run_analysis"]
