"""
revpart CLI 통합 테스트

main(argv) 를 직접 호출하고 --out 파일 또는 stdout 을 검사합니다.

실행 방법:
    uv run pytest tests/test_cli.py -v
    uv run pytest -m integration
"""

from pathlib import Path
from unittest.mock import patch

import numpy as np
import orjson
import pytest

from revpart import fixtures
from revpart.cli import parse_operator
from revpart.core.errors import (
    CertificateFailure,
    DimensionMismatch,
    SchemaError,
    UnknownOperator,
)
from revpart.main import main
from revpart.schemas import AnalysisReport, dump_system, parse_system
from revpart.schemas.system import decode_matrix

pytestmark = pytest.mark.integration


@pytest.fixture
def system_path(tmp_path):
    """시스템 파일을 tmp_path 에 써 주는 헬퍼."""

    def write(system, name: str = "system.json") -> str:
        path = tmp_path / name
        path.write_bytes(dump_system(system))
        return str(path)

    return write


@pytest.fixture
def out(tmp_path) -> Path:
    return tmp_path / "out.json"


def run(argv: list[str], out: Path) -> tuple[int, dict]:
    code = main([*argv, "--out", str(out)])
    data = orjson.loads(out.read_bytes()) if out.exists() else {}
    return code, data


class TestAnalyze:
    """analyze 명령 테스트"""

    def test_dephasing(self, system_path, out):
        code, report = run(["analyze", system_path(fixtures.dephasing())], out)

        assert code == 0
        assert report["validation"]["passed"] is True
        assert report["algebra"]["dim_d_infinity"] == 2
        assert report["diagnostics"] == []

    def test_rejected_system_still_reports(self, system_path, out):
        code, report = run(["analyze", system_path(fixtures.amplitude_damping(0.3))], out)

        assert code == 2
        assert report["validation"]["passed"] is False
        assert report["validation"]["hypothesis"] == "state invariance"
        assert report["algebra"] is None

    def test_malformed_json(self, tmp_path, out):
        path = tmp_path / "broken.json"
        path.write_text("{ not json")
        assert main(["analyze", str(path), "--out", str(out)]) == 1
        assert not out.exists()

    def test_missing_file(self, tmp_path, out):
        assert main(["analyze", str(tmp_path / "nope.json"), "--out", str(out)]) == 1

    def test_deterministic_output(self, system_path, tmp_path):
        path = system_path(fixtures.random_covariant(d=3, rng=np.random.default_rng(5)))
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["analyze", path, "--seed", "5", "--out", str(first)]) == 0
        assert main(["analyze", path, "--seed", "5", "--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_tolerance_flag_is_recorded(self, system_path, out):
        code, report = run(["analyze", system_path(fixtures.classical()), "--tol", "1e-8"], out)
        assert code == 0
        assert report["tolerance"]["eq_tol"] == 1e-8

    def test_numerical_failure_exits_one(self, system_path, out):
        with patch(
            "revpart.cli.commands.run_analysis",
            side_effect=CertificateFailure("broken certificate"),
        ):
            code = main(["analyze", system_path(fixtures.dephasing()), "--out", str(out)])
        assert code == 1
        assert not out.exists()

    def test_stdout(self, system_path, capsysbinary):
        code = main(["analyze", system_path(fixtures.unitary())])
        captured = capsysbinary.readouterr()

        assert code == 0
        assert orjson.loads(captured.out)["algebra"]["dim_d_infinity"] == 4


class TestGen:
    """gen 명령 테스트"""

    def test_dephasing_matches_builder(self, out):
        argv = ["gen", "dephasing", "--d", "2", "--p", "0.5", "--rho", "0.6,0.4"]
        assert main([*argv, "--out", str(out)]) == 0
        generated = parse_system(out.read_bytes())
        assert dump_system(generated) == dump_system(fixtures.dephasing(0.5, (0.6, 0.4)))

    def test_classical_transition(self, out):
        assert main(["gen", "classical", "--P", "0.9,0.1;0.3,0.7", "--out", str(out)]) == 0
        rho = parse_system(out.read_bytes()).rho_matrix()
        assert np.allclose(np.diag(rho).real, [0.75, 0.25])

    def test_uniform_rho_for_higher_d(self, out):
        assert main(["gen", "dephasing", "--d", "3", "--out", str(out)]) == 0
        assert parse_system(out.read_bytes()).dim == 3

    @pytest.mark.parametrize(
        "argv",
        [
            ["gen", "dephasing", "--p", "2"],
            ["gen", "dephasing", "--rho", "0.7,0.7"],
            ["gen", "dephasing", "--d", "3", "--rho", "0.6,0.4"],
            ["gen", "classical", "--P", "0.9,0.2;0.3,0.7"],
            ["gen", "classical", "--P", "a,b;c,d"],
        ],
    )
    def test_invalid_params_exit_two(self, argv, out):
        assert main([*argv, "--out", str(out)]) == 2
        assert not out.exists()

    def test_seeded_random_covariant(self, tmp_path):
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        main(["gen", "random_covariant", "--d", "3", "--seed", "4", "--out", str(first)])
        main(["gen", "random_covariant", "--d", "3", "--seed", "4", "--out", str(second)])
        assert first.read_bytes() == second.read_bytes()

    def test_generated_file_analyzes(self, tmp_path, out):
        system = tmp_path / "shift.json"
        assert main(["gen", "shift_dephase", "--d", "3", "--out", str(system)]) == 0
        code, report = run(["analyze", str(system)], out)
        assert code == 0
        assert report["algebra"]["dim_d_infinity"] == 3


class TestSubcommands:
    """decompose / evolve / nagyfoias / cesaro / schema"""

    def test_decompose_off_diagonal(self, system_path, out):
        code, data = run(["decompose", system_path(fixtures.dephasing()), "E01"], out)

        assert code == 0
        assert np.allclose(decode_matrix(data["par"]), 0, atol=1e-12)
        assert np.allclose(decode_matrix(data["perp"]), [[0, 1], [0, 0]])
        assert data["pythagoras"]["passed"] is True

    def test_decompose_unknown_operator(self, system_path, out):
        path = system_path(fixtures.dephasing())
        assert main(["decompose", path, "foo", "--out", str(out)]) == 1

    def test_decompose_rejected_system(self, system_path, out):
        path = system_path(fixtures.amplitude_damping(0.3))
        assert main(["decompose", path, "I", "--out", str(out)]) == 2

    def test_evolve_json(self, system_path, out):
        code, data = run(["evolve", system_path(fixtures.dephasing()), "sx", "4"], out)

        assert code == 0
        assert data["norms"] == pytest.approx([1.0, 0.5, 0.25, 0.125, 0.0625])
        assert data["residuals"] is None
        assert len(data["trajectory"]) == 5

    def test_evolve_csv(self, system_path, out):
        path = system_path(fixtures.classical())
        assert main(["evolve", path, "E00", "3", "--csv", "--out", str(out)]) == 0
        lines = out.read_text().strip().splitlines()

        assert lines[0] == "step,norm,residual"
        assert len(lines) == 5
        assert lines[1].startswith("0,1.0,")

    def test_evolve_negative_steps(self, system_path, out):
        path = system_path(fixtures.dephasing())
        assert main(["evolve", path, "sx", "-1", "--out", str(out)]) == 1

    def test_nagyfoias_unitary(self, system_path, out):
        code, data = run(["nagyfoias", system_path(fixtures.unitary())], out)

        assert code == 0
        assert (data["dim_H0"], data["dim_H1"]) == (4, 0)
        assert data["cnu_singular_values"] == []

    def test_nagyfoias_dephasing(self, system_path, out):
        code, data = run(["nagyfoias", system_path(fixtures.dephasing())], out)

        assert code == 0
        assert (data["dim_H0"], data["dim_H1"]) == (2, 2)
        assert data["cnu_singular_values"] == pytest.approx([0.5, 0.5])

    def test_cesaro(self, system_path, out):
        code, data = run(["cesaro", system_path(fixtures.dephasing()), "--n", "9"], out)

        assert code == 0
        assert data["residual"] == pytest.approx((1 - 0.25**10) / 7.5, abs=1e-9)
        assert len(data["history"]) == 9
        assert data["z_mean"]["strong_decay"] is True

    def test_cesaro_csv(self, system_path, out):
        path = system_path(fixtures.dephasing())
        assert main(["cesaro", path, "--n", "5", "--csv", "--out", str(out)]) == 0
        lines = out.read_text().strip().splitlines()
        assert [line.split(",")[0] for line in lines[1:]] == ["1", "2", "3", "4", "5"]

    def test_schema(self, out):
        code, schema = run(["schema"], out)

        assert code == 0
        assert schema["title"] == "AnalysisReport"
        assert {"validation", "algebra", "gns", "dynamics"} <= set(schema["properties"])

    def test_report_conforms_to_schema(self, system_path, tmp_path):
        schema_path, report_path = tmp_path / "schema.json", tmp_path / "report.json"
        assert main(["schema", "--out", str(schema_path)]) == 0
        assert main(["analyze", system_path(fixtures.shift_dephase()), "--out", str(report_path)]) == 0
        schema = orjson.loads(schema_path.read_bytes())
        report = orjson.loads(report_path.read_bytes())

        assert set(schema["required"]) <= set(report)
        assert set(report) <= set(schema["properties"])
        assert AnalysisReport.model_validate(report).to_json() == report_path.read_bytes().rstrip()


class TestParseOperator:
    """연산자 인자 형식"""

    def test_named(self):
        assert np.array_equal(parse_operator("I", 3), np.eye(3))
        assert np.array_equal(parse_operator("sz", 2), fixtures.SIGMA_Z)
        assert parse_operator("E_1_2", 3)[1, 2] == 1
        assert parse_operator("E10", 2)[1, 0] == 1

    def test_json_matrix(self):
        real = parse_operator("[[1, 2], [3, 4]]", 2)
        pairs = parse_operator("[[[0, 1], [0, 0]], [[0, 0], [1, 0]]]", 2)
        assert real[1, 0] == 3
        assert pairs[0, 0] == 1j

    @pytest.mark.parametrize(
        "text, dim, error",
        [
            ("sx", 3, UnknownOperator),
            ("E22", 2, UnknownOperator),
            ("rho", 2, UnknownOperator),
            ("[[1, 2]", 2, SchemaError),
            ("[[1, 2], [3, 4]]", 3, DimensionMismatch),
        ],
    )
    def test_rejected(self, text, dim, error):
        with pytest.raises(error):
            parse_operator(text, dim)
