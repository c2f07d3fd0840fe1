"""
analyze 파이프라인 (LangGraph) 테스트

실행 방법:
    uv run pytest tests/test_graph.py -v
"""

from unittest.mock import patch

import pytest

from revpart import fixtures
from revpart.core.errors import ConvergenceFailure
from revpart.graph import create_analysis_graph, run_analysis
from revpart.graph.edges import route_after_validation
from revpart.graph.state import AnalysisState, create_initial_state


class TestState:
    """State 관련 테스트"""

    def test_create_initial_state(self):
        system = fixtures.dephasing()
        state = create_initial_state(system, seed=7)

        assert state["system"] is system
        assert state["seed"] == 7
        assert state["eq_tol"] is None
        assert state["qds"] is None
        assert state["diagnostics"] == []
        assert state["report"] is None


class TestEdges:
    """Edge 라우팅 테스트"""

    def _state(self, qds) -> AnalysisState:
        state = create_initial_state(fixtures.dephasing())
        state["qds"] = qds
        return state

    def test_route_to_algebra(self, dephasing_q):
        assert route_after_validation(self._state(dephasing_q)) == "algebra"

    def test_route_rejected_to_report(self):
        assert route_after_validation(self._state(None)) == "report"


class TestGraph:
    """그래프 전체 실행 테스트"""

    def test_graph_compiles(self):
        graph = create_analysis_graph()
        assert graph is not None

    def test_dephasing_report(self):
        report = run_analysis(fixtures.dephasing(p=0.5, rho=(0.6, 0.4)), seed=0)

        assert report.validation.passed
        assert report.algebra.dim_d_infinity == 2
        assert report.algebra.dim_effective == 2
        assert report.gns.dim_h0 == 2
        assert report.gns.dim_h1 == 2
        assert report.gns.flat_intertwining.passed
        assert not report.dynamics.classification.ergodic
        assert report.diagnostics == []

    def test_classical_report(self):
        report = run_analysis(fixtures.classical(), seed=0)

        assert report.algebra.dim_d_infinity == 1
        assert report.dynamics.classification.mixing
        assert report.dynamics.z_mean.limit_residual.passed
        rows = {(row.k, row.n) for row in report.dynamics.cesaro}
        assert (1, 100) in rows and (-1, 1) in rows

    def test_rejected_report(self):
        report = run_analysis(fixtures.amplitude_damping(0.3), seed=0)

        assert not report.validation.passed
        assert report.validation.hypothesis == "state invariance"
        assert report.algebra is None
        assert report.dynamics is None

    def test_same_seed_same_report(self):
        system = fixtures.random_covariant(d=2)
        first = run_analysis(system, seed=3).to_json()
        second = run_analysis(system, seed=3).to_json()
        assert first == second

    def test_stage_failure_becomes_diagnostic(self):
        with patch(
            "revpart.graph.nodes.v_limits",
            side_effect=ConvergenceFailure("V+ did not converge", 1.0, 0),
        ):
            report = run_analysis(fixtures.dephasing(), seed=0)

        assert report.gns is None
        assert report.algebra is not None
        assert [d.stage for d in report.diagnostics] == ["gns"]
        assert report.diagnostics[0].error == "ConvergenceFailure"

    def test_shape_error_becomes_diagnostic(self):
        with patch(
            "revpart.graph.nodes.flat_isometry",
            side_effect=ValueError("operands could not be broadcast together"),
        ):
            report = run_analysis(fixtures.dephasing(), seed=0)

        assert report.gns is None
        assert report.dynamics is not None
        assert report.diagnostics[0].error == "ValueError"


@pytest.mark.parametrize("seed", [0, 1])
def test_seed_recorded(seed):
    report = run_analysis(fixtures.unitary(), seed=seed)
    assert report.seed == seed
