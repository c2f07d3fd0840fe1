"""
revpart: 유한 차원 양자 동역학계의 가역 부분(reversible part) 계산

구성:
    - numerics.py: 복소 행렬 커널, φ-내적, 부분공간 대수
    - qds.py: 채널/상태 모델, 가정 검증, φ-adjoint
    - algebra.py: 곱셈 영역, D∞, 조건부 기댓값, flat 곱
    - gns.py: GNS 축약(contraction)과 Sz.-Nagy–Foias 분해
    - dynamics.py: 에르고딕/혼합 분류, Cesàro 평균, 팽창(dilation) 검증
    - graph/: analyze 파이프라인 (LangGraph)
    - cli/: 명령행 인터페이스
"""

__version__ = "0.1.0"
