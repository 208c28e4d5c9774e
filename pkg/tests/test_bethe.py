# tests/test_bethe.py
import numpy as np
import pytest

from gaudin.core.errors import DegenerateSites, PoleEvaluation
from gaudin.model.bethe import (
    apply_Bi,
    build_universal_operator,
    current,
    eigen_residual,
    series_coefficients,
)
from gaudin.model.schubert import d_T
from gaudin.model.tensor_space import Partition, TensorVector, admissible_indices, raising_residual


@pytest.fixture(scope="module")
def D2():
    """Universal operator for N=2 at z=(0,2)"""
    return build_universal_operator(2, [0, 2])


@pytest.fixture
def omega():
    return TensorVector.from_items(2, 2, [((2, 1), 1), ((1, 2), -1)])


class TestUniversalOperator:
    """Test suite for the expansion of the universal differential operator"""

    def test_b1_is_scalar_on_weight_vectors(self, D2, omega):
        """Test B_1(3) = -(1/3 + 1) on the running Bethe vector"""
        out = apply_Bi(D2, 1, 3.0, omega)
        assert np.allclose(out.to_dense(), (-4 / 3) * omega.to_dense())

    def test_b2_eigenvalue(self, D2, omega):
        """Test B_2(3) omega = (2/3) omega"""
        out = apply_Bi(D2, 2, 3.0, omega)
        assert np.allclose(out.to_dense(), (2 / 3) * omega.to_dense())

    def test_b2_matches_hand_expansion(self, D2):
        """Test B_2 = e_11(u) e_22(u) - e_21(u) e_12(u) - e_22'(u) at sample points"""
        z = [0, 2]
        e = {(i, j): current(2, z, i, j) for i in (1, 2) for j in (1, 2)}
        expected = e[(1, 1)] * e[(2, 2)] - e[(2, 1)] * e[(1, 2)] - e[(2, 2)].derivative()
        for u in (3.0, -1.5 + 0.5j, 5j):
            assert np.allclose(D2.matrix(2, u).toarray(), expected.evaluate(u).toarray())

    def test_zero_vector(self, D2):
        """Test that B_i maps zero to zero"""
        assert apply_Bi(D2, 2, 3.0, TensorVector(2, 2)).is_zero()

    def test_commuting_family(self):
        """Test [B_i(u), B_j(v)] = 0 on V^(x)3 for N=3"""
        D = build_universal_operator(3, [0, 1, 3])
        samples = [(1, 2, 2.5, -1.0 + 1j), (2, 3, 4.0, 0.5j), (3, 3, 2.5, 7.0)]
        for i, j, u, v in samples:
            A = D.matrix(i, u).toarray()
            B = D.matrix(j, v).toarray()
            assert np.abs(A @ B - B @ A).max() < 1e-9

    def test_preserves_weight(self):
        """Test that B_2 keeps a weight-(2,1) vector inside that weight space"""
        D = build_universal_operator(2, [0, 1, 4])
        lam = Partition((2, 1))
        v = TensorVector.from_items(2, 3, [(J, k + 1) for k, J in enumerate(admissible_indices(lam))])
        out = apply_Bi(D, 2, 2.0 + 1j, v)
        assert out.weight == (2, 1)

    def test_preserves_singular_vectors(self):
        """Test that B_i(u) maps a singular vector of weight (2,1) to a singular vector"""
        D = build_universal_operator(2, [0, 1, 4])
        v = TensorVector.from_items(2, 3, [((2, 1, 1), 1), ((1, 2, 1), -1)])
        assert raising_residual(v) == 0
        for i, u in [(1, 2.0 + 1j), (2, 2.0 + 1j), (2, -3.5)]:
            out = apply_Bi(D, i, u, v)
            assert not out.is_zero()
            assert raising_residual(out) < 1e-10

    def test_scaling(self):
        """Test B_i(cu; cz) = c^(-i) B_i(u; z)"""
        z = [0.5, 2.0, -1.0 + 1j]
        c = 1.7
        base = build_universal_operator(2, z)
        scaled = build_universal_operator(2, [c * x for x in z])
        for i in (1, 2):
            for u in (3.0, -1.5 + 0.5j):
                expected = c ** (-i) * base.matrix(i, u).toarray()
                assert np.allclose(scaled.matrix(i, c * u).toarray(), expected, atol=1e-12)

    def test_degenerate_sites(self):
        """Test that coincident sites are refused"""
        with pytest.raises(DegenerateSites):
            build_universal_operator(2, [0, 0])

    def test_evaluation_near_site(self, D2):
        """Test that evaluating at a site raises"""
        with pytest.raises(PoleEvaluation):
            D2.matrix(1, 2.0 + 1e-9)


class TestEigenResidual:
    """Test suite for eigen_residual against d_T"""

    def test_running_example(self, D2, omega, running_point):
        """Test the closed-form critical point at three sample points"""
        assert eigen_residual(D2, omega, d_T(running_point), [3.0, -1.0, 5j]) < 1e-10

    def test_empty_roots(self):
        """Test lambda=(2,0): the highest weight vector against d_T with no Bethe roots"""
        from gaudin.model.master import CriticalPointT
        T = CriticalPointT.of([0, 2], [[]])
        D = build_universal_operator(2, [0, 2])
        v = TensorVector.basis(2, (1, 1))
        assert eigen_residual(D, v, d_T(T), [3.0, 1j]) < 1e-10

    def test_detects_perturbed_point(self, D2, omega):
        """Test that a non-critical point gives a visible residual"""
        from gaudin.model.master import CriticalPointT
        T = CriticalPointT.of([0, 2], [[1.01]])
        assert eigen_residual(D2, omega, d_T(T), [3.0]) > 1e-4

    def test_zero_vector(self, D2, running_point):
        """Test that the residual of the zero vector is undefined"""
        with pytest.raises(ValueError):
            eigen_residual(D2, TensorVector(2, 2), d_T(running_point), [3.0])


class TestSeriesCoefficients:
    """Test suite for the expansion of B_i at infinity"""

    def test_b1_leading_coefficient(self, D2, omega):
        """Test B_11 = -sum_ii e_ii = -n on V^(x)n"""
        (B11,) = series_coefficients(D2, 1, 1)
        assert np.allclose(B11.toarray(), -2 * np.eye(4))

    def test_homogeneity(self):
        """Test B_ij(cz) = c^(j-i) B_ij(z)"""
        z = [0.5, 2.0, -1.0 + 1j]
        c = 1.7
        base = series_coefficients(build_universal_operator(2, z), 2, 4)
        scaled = series_coefficients(build_universal_operator(2, [c * x for x in z]), 2, 4)
        for k, (a, b) in enumerate(zip(base, scaled)):
            assert np.allclose(b.toarray(), c ** k * a.toarray(), atol=1e-10)
