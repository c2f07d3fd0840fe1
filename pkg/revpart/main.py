import sys
from collections.abc import Sequence
from pathlib import Path

from loguru import logger

from revpart.cli import COMMANDS, build_parser
from revpart.cli.commands import EXIT_HYPOTHESIS, EXIT_INPUT
from revpart.core.config import settings
from revpart.core.errors import HypothesisError, InputError, InvalidParams, RevpartError

LOG_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"
)


# 1. 로거 설정
def setup_logging(debug: bool = False, level: str | None = None) -> None:
    """stderr 에만 로그를 씁니다. stdout 은 JSON/CSV 출력 전용입니다."""
    logger.remove()
    logger.add(
        sys.stderr,
        format=LOG_FORMAT,
        level="DEBUG" if debug or settings.debug else (level or settings.log_level),
        colorize=True,
    )


# 2. 출력
def _write(payload: bytes, out: str | None) -> None:
    if out is None:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.write(b"\n")
        sys.stdout.buffer.flush()
        return
    Path(out).write_bytes(payload + b"\n")
    logger.info(f"💾 출력 저장: {out}")


# 3. 진입점
def main(argv: Sequence[str] | None = None) -> int:
    """
    revpart 명령 실행

    Exit codes:
        0: 성공
        1: 입출력/스키마/연산자 인자 오류 (부분 리포트 없음)
        2: 표준 가정 위반 (analyze 는 거부 리포트를 함께 출력), gen 의 파라미터 제약 위반
    """
    args = build_parser().parse_args(argv)
    setup_logging(args.debug, args.log_level)
    logger.debug(f"{settings.project_name} {args.command} (환경: {settings.environment})")

    try:
        result = COMMANDS[args.command](args)
    except HypothesisError as exc:
        logger.error(f"⛔ 가정 위반: {exc}")
        return EXIT_HYPOTHESIS
    except InvalidParams as exc:
        logger.error(f"❌ 잘못된 파라미터: {exc}")
        return EXIT_HYPOTHESIS if args.command == "gen" else EXIT_INPUT
    except InputError as exc:
        logger.error(f"❌ 입력 오류: {exc}")
        return EXIT_INPUT
    except RevpartError as exc:
        logger.exception(f"❌ 수치 인증 실패: {exc}")
        return EXIT_INPUT

    try:
        _write(result.payload, args.out)
    except OSError as exc:
        logger.error(f"❌ 출력 실패: {exc}")
        return EXIT_INPUT
    return result.code


if __name__ == "__main__":
    sys.exit(main())
