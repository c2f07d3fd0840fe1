"""
revpart 명령행 파서

모든 하위 명령은 공통 플래그(--tol, --seed, --out, --debug, --log-level)를
하위 명령 뒤에서도 받을 수 있도록 parent parser 로 공유합니다.
"""

import argparse

from revpart.fixtures import FAMILIES


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--tol",
        type=float,
        default=None,
        help="eq_tol 덮어쓰기 (시스템 파일과 REVPART_TOL 보다 우선)",
    )
    common.add_argument("--seed", type=int, default=None, help="난수 시드 (기본: 설정값)")
    common.add_argument("--out", default=None, help="출력 경로 (기본: stdout)")
    common.add_argument("--debug", action="store_true", help="DEBUG 로그 출력")
    common.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default=None,
        help="stderr 로그 레벨",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    """revpart 최상위 파서를 만듭니다."""
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="revpart",
        description="유한 차원 양자 동역학계의 가역 부분(reversible part) 분석",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", parents=[common], help="전체 분석 리포트")
    analyze.add_argument("input", help="시스템 파일(JSON) 경로")

    gen = sub.add_parser("gen", parents=[common], help="예제 시스템 파일 생성")
    gen.add_argument("family", choices=FAMILIES)
    gen.add_argument("--d", type=int, default=None, help="행렬 차원")
    gen.add_argument("--p", type=float, default=None, help="dephasing 세기 (0 ≤ p ≤ 1)")
    gen.add_argument("--rho", default=None, help="ρ 고유값, 예: 0.6,0.4")
    gen.add_argument("--phase", type=float, default=None, help="unitary 위상")
    gen.add_argument("--P", dest="transition", default=None, help="전이행렬, 예: 0.9,0.1;0.3,0.7")
    gen.add_argument(
        "--no-classical",
        dest="include_classical",
        action="store_false",
        help="random_covariant 에서 고전 chain 성분 제외",
    )

    decompose = sub.add_parser("decompose", parents=[common], help="a = a∥ + a⊥ 분해")
    decompose.add_argument("input")
    decompose.add_argument("operator", help="I, sx, sy, sz, Eij 또는 JSON 행렬")

    evolve = sub.add_parser("evolve", parents=[common], help="궤적 Φʲ(a)")
    evolve.add_argument("input")
    evolve.add_argument("operator")
    evolve.add_argument("steps", type=int)
    evolve.add_argument("--direction", choices=["forward", "adjoint"], default="forward")
    evolve.add_argument("--csv", action="store_true", help="step,norm,residual 표 출력")

    nagyfoias = sub.add_parser("nagyfoias", parents=[common], help="Nagy–Foias 분해")
    nagyfoias.add_argument("input")

    cesaro = sub.add_parser("cesaro", parents=[common], help="Cesàro 평균과 Z_N")
    cesaro.add_argument("input")
    cesaro.add_argument("--k", type=int, default=1)
    cesaro.add_argument("--n", type=int, default=100)
    cesaro.add_argument("--csv", action="store_true", help="step,norm,residual 표 출력")

    sub.add_parser("schema", parents=[common], help="리포트 JSON 스키마 출력")
    return parser
