"""
핵심 설정 및 공통 모듈

    - config/: 환경별 설정 (pydantic-settings)
    - errors.py: 예외 계층
"""
