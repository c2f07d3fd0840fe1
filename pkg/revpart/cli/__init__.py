"""
revpart 명령행 인터페이스

구조:
    - parser.py: argparse 파서 (하위 명령과 공통 플래그)
    - commands.py: 하위 명령 핸들러
"""

from revpart.cli.commands import COMMANDS, CommandResult, parse_operator
from revpart.cli.parser import build_parser

__all__ = [
    "COMMANDS",
    "CommandResult",
    "build_parser",
    "parse_operator",
]
