"""
대수 코어 테스트: D_{Φ_k}, D∞, E∞, 분해, 중심, flat 곱

실행 방법:
    uv run pytest tests/test_algebra.py -v
"""

from unittest.mock import patch

import numpy as np
import pytest

from revpart.algebra import (
    AlgebraCertificate,
    FlatElement,
    SubAlgebra,
    abelian_effective,
    center,
    certificate_tol,
    chain_residual,
    conditional_expectation,
    d_infinity,
    d_infinity_plus,
    decompose,
    domain_stabilization_index,
    e_infinity,
    effective_expectation,
    expectation_commutes,
    fixed_point_algebra,
    flat_apply,
    flat_checks,
    flat_norm,
    flat_product,
    multiplicative_core,
    multiplicative_domain,
    multiplicativity_residual,
    peripheral_oracle,
    perp_space,
    projection_spot_check,
    pythagoras_residual,
    structure_report,
)
from revpart.core.errors import CertificateFailure, DimensionMismatch, PreconditionViolated
from revpart.numerics import Tolerance, commutant, matrix_unit, opnorm, random_cmat
from revpart.qds import phi_k, tau_k

EXPECTED_DIM = {
    "dephasing": 2,
    "unitary": 4,
    "classical": 1,
    "shift_dephase": 3,
}


class TestMultiplicativeDomain:
    """D_{Φ_k} = F(τ_k) 테스트"""

    def test_dephasing_domain_is_diagonal(self, dephasing_q):
        domain = multiplicative_domain(dephasing_q, 1)
        assert domain.dim == 2
        assert domain.certified.ok
        assert domain.space.residual(np.diag([1.0, -3.0]).astype(complex)) <= 1e-10

    def test_domain_elements_are_multiplicative(self, all_fixtures):
        for q in all_fixtures.values():
            for k in (1, -1, 2, -2, 3, -3):
                m = phi_k(q, k)
                for b in multiplicative_domain(q, k).basis:
                    assert multiplicativity_residual(m, b) <= certificate_tol(q.tol)

    def test_fixed_points_of_tau(self, all_fixtures):
        for q in all_fixtures.values():
            for k in (1, -1, 2):
                t = tau_k(q, k)
                for b in multiplicative_domain(q, k).basis:
                    assert opnorm(t(b) - b) <= 1e-8

    def test_domains_shrink(self, all_fixtures):
        for q in all_fixtures.values():
            assert chain_residual(q) <= 1e-8

    def test_non_self_adjoint_map_rejected(self, shift_q):
        with pytest.raises(PreconditionViolated):
            fixed_point_algebra(shift_q.channel, shift_q)

    def test_uncertified_fixed_points_fail_certificate(self, dephasing_q):
        broken = SubAlgebra(
            multiplicative_domain(dephasing_q, 1).space,
            AlgebraCertificate(
                has_identity=True, star_closed=True, product_closed=False, residual=1.0
            ),
        )
        with patch("revpart.algebra._shrink_to_algebra", return_value=broken):
            with pytest.raises(CertificateFailure):
                fixed_point_algebra(tau_k(dephasing_q, 1), dephasing_q)


class TestReversiblePart:
    """D∞ 식별 테스트"""

    @pytest.mark.parametrize("name", sorted(EXPECTED_DIM))
    def test_dimension(self, all_fixtures, name):
        assert d_infinity(all_fixtures[name]).dim == EXPECTED_DIM[name]

    def test_three_routes_agree(self, all_fixtures):
        for q in all_fixtures.values():
            d_inf = d_infinity(q).space
            assert d_inf.distance(peripheral_oracle(q).space) <= 1e-8
            assert d_inf.distance(multiplicative_core(q).space) <= 1e-8

    def test_random_draws_agree(self, random_draws):
        for q in random_draws:
            d_inf = d_infinity(q).space
            assert d_inf.distance(peripheral_oracle(q).space) <= 1e-8
            assert d_inf.distance(multiplicative_core(q).space) <= 1e-8

    def test_d_infinity_plus_contains_d_infinity(self, all_fixtures):
        for q in all_fixtures.values():
            plus = d_infinity_plus(q).space
            assert plus.containment_residual(d_infinity(q).space) <= 1e-8

    def test_sharp_inverts_phi_on_d_infinity(self, all_fixtures):
        for q in all_fixtures.values():
            for b in d_infinity(q).basis:
                assert opnorm(q.adjoint_channel(q.channel(b)) - b) <= 1e-8

    def test_stabilization_index(self, dephasing_q, shift_q):
        assert domain_stabilization_index(dephasing_q) >= 1
        assert domain_stabilization_index(shift_q) >= 1


class TestExpectation:
    """E∞ 와 분해 M = D∞ ⊕ D∞^⊥φ 테스트"""

    def test_dephasing_pinching(self, dephasing_q):
        parts = decompose(matrix_unit(2, 0, 1), e_infinity(dephasing_q))
        assert np.allclose(parts.par, 0, atol=1e-12)
        assert np.allclose(parts.perp, matrix_unit(2, 0, 1))

    def test_classical_expectation_is_state(self, classical_q):
        a = np.array([[2.0, 1.0], [0.5, -1.0]], dtype=complex)
        expected = classical_q.state.phi(a) * np.eye(2)
        assert np.allclose(e_infinity(classical_q)(a), expected)

    def test_decomposition(self, rng, all_fixtures, random_draws):
        for q in [*all_fixtures.values(), *random_draws]:
            e = e_infinity(q)
            a = random_cmat(rng, q.dim)
            parts = decompose(a, e)
            assert opnorm(parts.value - a) <= 1e-9
            assert abs(q.geometry.inner(parts.par, parts.perp)) <= 1e-9
            assert pythagoras_residual(parts, q.geometry) <= 1e-9

    def test_commutes_with_phi_k(self, all_fixtures, random_draws):
        for q in [*all_fixtures.values(), *random_draws]:
            residuals = expectation_commutes(e_infinity(q), q)
            assert set(residuals) == {1, -1, 2, -2}
            assert max(residuals.values()) <= 1e-8

    def test_perp_space_is_orthogonal(self, dephasing_q):
        d_inf = d_infinity(dephasing_q)
        perp = perp_space(d_inf, dephasing_q)
        assert perp.dim == 2
        for x in perp.basis:
            for y in d_inf.basis:
                assert abs(dephasing_q.geometry.inner(x, y)) <= 1e-10

    def test_expectation_preserves_state(self, rng, shift_q):
        e = conditional_expectation(d_infinity(shift_q), shift_q)
        a = random_cmat(rng, 3)
        assert shift_q.state.phi(e(a)) == pytest.approx(shift_q.state.phi(a))

    def test_shape_mismatch(self, dephasing_q):
        with pytest.raises(DimensionMismatch):
            decompose(np.eye(3, dtype=complex), e_infinity(dephasing_q))


class TestStructure:
    """중심, 가환 대수 A, 블록 구조 테스트"""

    def test_unitary_blocks(self, unitary_q):
        blocks = structure_report(d_infinity(unitary_q), np.random.default_rng(0), unitary_q.tol)
        assert [(b.dim, b.multiplicity) for b in blocks] == [(2, 1)]

    def test_shift_blocks(self, shift_q):
        blocks = structure_report(d_infinity(shift_q), np.random.default_rng(0), shift_q.tol)
        assert [(b.dim, b.multiplicity) for b in blocks] == [(1, 1)] * 3

    def test_center(self, unitary_q, dephasing_q):
        assert center(d_infinity(unitary_q), unitary_q.tol).dim == 1
        assert center(d_infinity(dephasing_q), dephasing_q.tol).dim == 2

    def test_block_diagonal_algebra(self):
        """M_2 ⊕ M_1 ⊂ M_3: 중심은 2차원, 블록은 [2, 1]."""
        tol = Tolerance()
        r = SubAlgebra.certify(commutant([np.diag([1.0, 1.0, 2.0]).astype(complex)]), tol)
        z = center(r, tol)
        blocks = structure_report(r, np.random.default_rng(0), tol)

        assert r.dim == 5
        assert z.dim == 2
        assert z.space.residual(np.diag([1.0, 1.0, 0.0]).astype(complex)) <= 1e-10
        assert sorted((b.dim for b in blocks), reverse=True) == [2, 1]
        assert all(b.multiplicity == 1 for b in blocks)

    def test_abelian_effective(self, dephasing_q):
        a = abelian_effective(dephasing_q, np.random.default_rng(0), samples=50)
        assert a.dim == 2
        e = effective_expectation(dephasing_q, np.random.default_rng(0))
        assert np.allclose(e(matrix_unit(2, 0, 1)), 0, atol=1e-12)

    def test_projection_spot_check(self, all_fixtures):
        for q in all_fixtures.values():
            assert projection_spot_check(q, np.random.default_rng(3)) <= 1e-8


class TestFlatAlgebra:
    """M♭ 테스트"""

    def test_perp_product_vanishes(self, dephasing_q):
        e = e_infinity(dephasing_q)
        zero = np.zeros((2, 2), dtype=complex)
        x = FlatElement(zero, matrix_unit(2, 0, 1), e)
        y = FlatElement(zero, matrix_unit(2, 1, 0), e)
        assert np.array_equal(flat_product(x, y).value, np.zeros((2, 2)))

    def test_operator_norm_is_not_submultiplicative(self, dephasing_q):
        """반사 행렬 두 개의 flat 곱은 operator norm 이 √(4/3) 입니다."""
        e = e_infinity(dephasing_q)
        c, s = np.sqrt(2 / 3), np.sqrt(1 / 3)
        a = decompose(np.array([[c, s], [s, -c]], dtype=complex), e)
        b = decompose(np.array([[c, -s], [-s, -c]], dtype=complex), e)
        ab = flat_product(a, b)
        assert opnorm(a.value) == pytest.approx(1.0)
        assert opnorm(b.value) == pytest.approx(1.0)
        assert opnorm(ab.value) == pytest.approx(np.sqrt(4 / 3))
        assert flat_norm(ab) <= flat_norm(a) * flat_norm(b) + 1e-12

    def test_homomorphism(self, rng, classical_q):
        e = e_infinity(classical_q)
        a = decompose(random_cmat(rng, 2), e)
        b = decompose(random_cmat(rng, 2), e)
        phi = classical_q.channel
        lhs = flat_apply(phi, flat_product(a, b)).value
        rhs = flat_product(flat_apply(phi, a), flat_apply(phi, b)).value
        assert opnorm(lhs - rhs) <= 1e-8

    def test_sampled_laws(self, all_fixtures):
        for q in all_fixtures.values():
            checks = flat_checks(q, np.random.default_rng(5), samples=100)
            assert checks["submultiplicativity"] <= 1e-9
            assert checks["associativity"] <= 1e-9
            assert checks["perp_product"] == 0.0
            assert checks["homomorphism"] <= 1e-8
            assert checks["operator_norm_ratio"] > 0
