"""
revpart 예외 계층

세 가지 계열로 나뉩니다:
    - HypothesisError: 입력 시스템이 표준 가정을 위반 (CLI exit code 2)
    - InputError: 파일/스키마/파라미터 문제 (CLI exit code 1)
    - NumericalError: 수치 인증 실패 (버그 또는 수치 불안정 신호)
"""


class RevpartError(Exception):
    """모든 revpart 예외의 루트."""


# ============================================================
# 가정 위반 (validate 단계)
# ============================================================
class HypothesisError(RevpartError):
    """위반된 가정 이름과 최악의 잔차(residual)를 함께 보고합니다."""

    hypothesis: str = "hypothesis"

    def __init__(self, residual: float, detail: str = "") -> None:
        self.residual = float(residual)
        self.detail = detail
        message = f"{self.hypothesis} violated (worst residual {self.residual:.3e})"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class NotUnital(HypothesisError):
    hypothesis = "unitality"


class NotCP(HypothesisError):
    hypothesis = "complete positivity"


class NotSchwarz(HypothesisError):
    hypothesis = "Schwarz inequality"


class NotInvariantState(HypothesisError):
    hypothesis = "state invariance"


class NotFaithful(HypothesisError):
    hypothesis = "faithfulness"


class NoModularCommutation(HypothesisError):
    hypothesis = "modular commutation"


# ============================================================
# 입력 오류
# ============================================================
class InputError(RevpartError):
    """입력 파일, 스키마, 파라미터 오류."""


class SchemaError(InputError):
    pass


class InvalidParams(InputError):
    pass


class UnknownOperator(InputError):
    pass


class DimensionMismatch(InputError, ValueError):
    pass


# ============================================================
# 수치 인증 실패
# ============================================================
class NumericalError(RevpartError):
    """수치 계산이 자기 검증(certificate)을 통과하지 못한 경우."""


class StabilizationFailure(NumericalError):
    pass


class ConvergenceFailure(NumericalError):
    def __init__(self, message: str, residual: float, iterations: int) -> None:
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"{message} (residual {residual:.3e} after {iterations} steps)")


class CoreMismatch(NumericalError):
    pass


class CertificateFailure(NumericalError):
    pass


class PreconditionViolated(NumericalError):
    pass


class ModularInvarianceFailure(NumericalError):
    pass


class NotContraction(NumericalError):
    pass


class DegenerateRandomElement(NumericalError):
    pass
