"""
numerics 커널 테스트

실행 방법:
    uv run pytest tests/test_numerics.py -v
"""

import numpy as np
import pytest

from revpart.core.errors import DimensionMismatch, InputError, NotFaithful
from revpart.numerics import (
    InnerProduct,
    OperatorSubspace,
    Tolerance,
    apply_superop,
    as_cmat,
    check_density,
    commutant,
    matrix_unit,
    orthonormalize,
    phi_inner,
    random_cmat,
    spectral_projections,
    subspace_intersect,
    subspace_sum,
    superop,
    transpose_permutation,
    unvec,
    vec,
)


class TestTolerance:
    """Tolerance 모델 테스트"""

    def test_defaults(self):
        tol = Tolerance()
        assert tol.eq_tol == 1e-9
        assert tol.conv_tol < tol.eq_tol

    def test_rejects_inverted_order(self):
        with pytest.raises(ValueError):
            Tolerance(eq_tol=1e-13, conv_tol=1e-12)

    def test_frozen(self):
        tol = Tolerance()
        with pytest.raises(ValueError):
            tol.eq_tol = 1.0


class TestKernels:
    """vec 규약과 superoperator 테스트"""

    def test_vec_is_column_stacking(self):
        x = np.array([[1, 2], [3, 4]], dtype=complex)
        assert np.array_equal(vec(x), np.array([1, 3, 2, 4], dtype=complex))
        assert np.array_equal(unvec(vec(x)), x)

    def test_superop_sandwich(self, rng):
        a, b, x = (random_cmat(rng, 3) for _ in range(3))
        assert np.allclose(apply_superop(superop(a, b), x), a @ x @ b)

    def test_transpose_permutation(self, rng):
        x = random_cmat(rng, 3)
        p = transpose_permutation(3)
        assert np.allclose(p @ vec(x), vec(x.T))
        assert np.allclose(p @ p, np.eye(9))

    def test_non_finite_rejected(self):
        with pytest.raises(InputError):
            as_cmat([[np.nan, 0], [0, 1]])


class TestDensity:
    """밀도행렬 검사"""

    def test_faithful(self):
        w, _ = check_density(np.diag([0.6, 0.4]).astype(complex), Tolerance())
        assert np.allclose(w, [0.4, 0.6])

    def test_singular_state_rejected(self):
        with pytest.raises(NotFaithful):
            check_density(np.diag([1.0, 0.0]).astype(complex), Tolerance())

    def test_trace_checked(self):
        with pytest.raises(NotFaithful):
            check_density(np.diag([0.6, 0.6]).astype(complex), Tolerance())

    def test_phi_inner(self):
        rho = np.diag([0.6, 0.4]).astype(complex)
        x = matrix_unit(2, 0, 1)
        # φ(E10 E01) = φ(E11) = 0.4
        assert phi_inner(x, x, rho) == pytest.approx(0.4)

    def test_phi_inner_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            phi_inner(np.eye(2), np.eye(3), np.eye(2) / 2)


class TestInnerProduct:
    """φ-좌표 테스트"""

    def test_coords_are_isometric(self, rng):
        rho = np.diag([0.7, 0.2, 0.1]).astype(complex)
        g = InnerProduct.phi(rho)
        x, y = random_cmat(rng, 3), random_cmat(rng, 3)
        assert g.inner(x, y) == pytest.approx(np.trace(rho @ x.conj().T @ y))
        assert np.allclose(g.matrix(g.coords(x)), x)

    def test_frame_round_trip(self, rng):
        g = InnerProduct.phi(np.diag([0.6, 0.4]).astype(complex))
        s = random_cmat(rng, 4)
        assert np.allclose(g.from_frame(g.to_frame(s)), s)


class TestSubspaces:
    """부분공간 연산 테스트"""

    def test_orthonormalize_drops_dependent(self):
        space = orthonormalize(
            [np.eye(2, dtype=complex), 2 * np.eye(2, dtype=complex), matrix_unit(2, 0, 0)],
            np.diag([0.6, 0.4]).astype(complex),
        )
        assert space.dim == 2
        assert np.allclose(space.gram(), np.eye(2))

    def test_intersect_and_sum(self):
        g = InnerProduct.hs(2)
        diag = OperatorSubspace(g, g.coords_matrix([matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)]))
        upper = OperatorSubspace(g, g.coords_matrix([matrix_unit(2, 0, 0), matrix_unit(2, 0, 1)]))
        assert subspace_intersect(diag, upper).dim == 1
        assert subspace_sum(diag, upper, Tolerance()).dim == 3

    def test_complement(self):
        g = InnerProduct.phi(np.diag([0.6, 0.4]).astype(complex))
        line = OperatorSubspace(g, g.coords_matrix([np.eye(2, dtype=complex)]))
        assert line.complement().dim == 3

    def test_commutant_of_diagonal(self):
        z = np.diag([1.0, 2.0, 3.0]).astype(complex)
        assert commutant([z]).dim == 3

    def test_commutant_empty_needs_dim(self):
        with pytest.raises(DimensionMismatch):
            commutant([])
        assert commutant([], dim=2).dim == 4

    def test_spectral_projections_group_degenerate(self):
        h = np.diag([1.0, 1.0, -2.0]).astype(complex)
        groups = spectral_projections(h, Tolerance())
        assert [w.shape[1] for _, w in groups] == [1, 2]


def _random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    m = random_cmat(rng, dim)
    rho = m @ m.conj().T + 0.1 * np.eye(dim)
    return rho / np.trace(rho).real


class TestPhiInnerProperties:
    """φ-내적의 반쌍선형성과 양성"""

    def test_sesquilinear_and_positive(self, rng):
        for _ in range(100):
            rho = _random_density(rng, 3)
            x, y, z = (random_cmat(rng, 3) for _ in range(3))
            alpha = complex(rng.standard_normal(), rng.standard_normal())
            xy = phi_inner(x, y, rho)

            assert phi_inner(x, alpha * y + z, rho) == pytest.approx(
                alpha * xy + phi_inner(x, z, rho), rel=1e-9, abs=1e-9
            )
            assert phi_inner(alpha * x, y, rho) == pytest.approx(
                alpha.conjugate() * xy, rel=1e-9, abs=1e-9
            )
            assert phi_inner(y, x, rho) == pytest.approx(xy.conjugate(), rel=1e-9, abs=1e-9)
            xx = phi_inner(x, x, rho)
            assert abs(xx.imag) <= 1e-9
            assert xx.real > 0


class TestSubspaceProperties:
    """orthonormalize, 교집합, commutant 의 대수적 성질"""

    def test_orthonormalize_is_idempotent(self, rng):
        rho = np.diag([0.5, 0.3, 0.2]).astype(complex)
        space = orthonormalize([random_cmat(rng, 3) for _ in range(4)], rho)
        again = orthonormalize(list(space.basis), rho)

        assert again.dim == space.dim == 4
        assert np.allclose(again.gram(), np.eye(4))
        assert again.distance(space) <= 1e-10

    def test_intersect_commutes_and_is_monotone(self, rng):
        common = [random_cmat(rng, 3) for _ in range(2)]
        extra_a = [random_cmat(rng, 3) for _ in range(3)]
        extra_b = [random_cmat(rng, 3) for _ in range(2)]
        a = orthonormalize(common + extra_a, None)
        b = orthonormalize(common + extra_b, None)
        smaller = orthonormalize(common[:1] + extra_a[:1], None)

        ab, ba = subspace_intersect(a, b), subspace_intersect(b, a)
        assert ab.dim == ba.dim == 2
        assert ab.distance(ba) <= 1e-8
        assert ab.distance(orthonormalize(common, None)) <= 1e-8
        assert ab.containment_residual(subspace_intersect(smaller, b)) <= 1e-8

    def test_commutant_is_a_star_algebra(self):
        """diag(1, 1, 2) 의 commutant 는 M_2 ⊕ M_1."""
        space = commutant([np.diag([1.0, 1.0, 2.0]).astype(complex)])
        assert space.dim == 5
        for x in space.basis:
            assert space.residual(x.conj().T) <= 1e-10
            for y in space.basis:
                assert space.residual(x @ y) <= 1e-10

    def test_commutant_of_matrix_units_is_scalars(self):
        space = commutant([matrix_unit(2, 0, 1), matrix_unit(2, 1, 0)])
        assert space.dim == 1
        assert space.residual(np.eye(2, dtype=complex)) <= 1e-12
