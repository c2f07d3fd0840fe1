"""
입출력 스키마

Pydantic 으로 JSON 문서의 검증과 직렬화를 처리합니다.

구조:
    - system.py: 시스템 입력 파일 (SystemFile)
    - report.py: 분석 리포트 (AnalysisReport) 와 하위 섹션
"""

from revpart.schemas.report import (
    AnalysisReport,
    Classification,
    DilationCheck,
    DilationReport,
    dump_json,
)
from revpart.schemas.system import (
    SystemFile,
    decode_matrix,
    dump_system,
    encode_matrix,
    load_system_file,
    parse_system,
)

__all__ = [
    "AnalysisReport",
    "Classification",
    "DilationCheck",
    "DilationReport",
    "SystemFile",
    "decode_matrix",
    "dump_json",
    "dump_system",
    "encode_matrix",
    "load_system_file",
    "parse_system",
]
