# tests/test_diffop.py
from gaudin.algebra.diffop import DifferentialOperator, monic_coefficients, row_determinant
from gaudin.algebra.poly import RationalFn


def const(c):
    return RationalFn.constant(c)


class TestDifferentialOperator:
    """Test suite for the Leibniz product and the row determinant"""

    def test_leibniz_rule(self):
        """Test d * f = f d + f'"""
        f = RationalFn.simple_poles([(0, 1)])
        d = DifferentialOperator({1: const(1)})
        out = d * DifferentialOperator({0: f})
        assert set(out.coeffs) == {0, 1}
        assert abs(out.coeffs[1](2.0) - 0.5) < 1e-14
        assert abs(out.coeffs[0](2.0) + 0.25) < 1e-14

    def test_zero_coefficients_are_dropped(self):
        """Test that zero coefficients do not count towards the order"""
        op = DifferentialOperator({2: RationalFn({}), 1: const(3)})
        assert op.order == 1

    def test_factored_product(self):
        """Test (d - 1/u)(d - 1/u) = d^2 - 2/u d + 2/u^2"""
        f = RationalFn.simple_poles([(0, 1)])
        factor = DifferentialOperator.d_minus(const(1), f)
        out = factor * factor
        # (d - f)(d - f) = d^2 - 2 f d + f^2 - f'
        b1, b2 = monic_coefficients(out, 2, RationalFn({}))
        assert abs(b1(3.0) + 2 / 3) < 1e-14
        assert abs(b2(3.0) - 2 / 9) < 1e-14
        assert list(b2.terms) == [(0j, 2)]

    def test_row_determinant_of_diagonal(self):
        """Test that rdet of a diagonal matrix is the ordered product"""
        f = RationalFn.simple_poles([(1, 1)])
        g = RationalFn.simple_poles([(2, 1)])
        zero = DifferentialOperator({})
        a = DifferentialOperator.d_minus(const(1), f)
        b = DifferentialOperator.d_minus(const(1), g)
        det = row_determinant([[a, zero], [zero, b]])
        prod = a * b
        for m in (0, 1, 2):
            for u in (0.5, 4.0 + 1j):
                assert abs(det.coeffs[m](u) - prod.coeffs[m](u)) < 1e-12

    def test_row_determinant_sign(self):
        """Test the off-diagonal permutation enters with a minus sign"""
        one = DifferentialOperator({0: const(1)})
        two = DifferentialOperator({0: const(2)})
        det = row_determinant([[one, two], [two, one]])
        assert abs(det.coeffs[0](1.0) - (1 - 4)) < 1e-14
