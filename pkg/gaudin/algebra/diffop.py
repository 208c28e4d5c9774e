"""
Differential operators sum_m c_m(u) d^m with coefficients written on the left.

The coefficient ring only has to provide ``+``, ``*`` (ring product and scalar
scaling), ``derivative()`` and ``is_zero()``; both RationalFn and the
operator-valued OperatorRatFn qualify, so the same Leibniz product serves the
scalar operators of the Schubert side and the universal operator of the Bethe
side.
"""
import itertools
import logging
from math import comb
from typing import Any, Dict, List, Mapping, Sequence

from gaudin.algebra.poly import permutation_sign

logger = logging.getLogger(__name__)


class DifferentialOperator:
    """Finite sum of coefficient(u) * d^m, kept as {order: coefficient}."""

    def __init__(self, coeffs: Mapping[int, Any]):
        self.coeffs: Dict[int, Any] = {m: c for m, c in coeffs.items() if not c.is_zero()}

    @classmethod
    def d_minus(cls, one: Any, f: Any) -> "DifferentialOperator":
        """d - f(u)."""
        return cls({1: one, 0: -f})

    @property
    def order(self) -> int:
        return max(self.coeffs) if self.coeffs else -1

    def __add__(self, other: "DifferentialOperator") -> "DifferentialOperator":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out[m] + c if m in out else c
        return DifferentialOperator(out)

    def scale(self, w: Any) -> "DifferentialOperator":
        return DifferentialOperator({m: w * c for m, c in self.coeffs.items()})

    def __mul__(self, other: "DifferentialOperator") -> "DifferentialOperator":
        # (a d^m)(b d^k) = sum_j C(m,j) a b^(j) d^(m-j+k)
        out: Dict[int, Any] = {}
        for m, a in self.coeffs.items():
            for k, b in other.coeffs.items():
                deriv = b
                for j in range(m + 1):
                    if j > 0:
                        deriv = deriv.derivative()
                        if deriv.is_zero():
                            break
                    term = a * deriv
                    if j > 0:
                        term = comb(m, j) * term
                    key = m - j + k
                    out[key] = out[key] + term if key in out else term
        return DifferentialOperator(out)


def row_determinant(matrix: Sequence[Sequence[DifferentialOperator]]) -> DifferentialOperator:
    """
    rdet: sum over permutations of sign * M[0][s(0)] M[1][s(1)] ..., factors in row order.

    Entries need not commute; every product is taken left to right.
    """
    size = len(matrix)
    total = None
    for perm in itertools.permutations(range(size)):
        term = matrix[0][perm[0]]
        for row in range(1, size):
            term = term * matrix[row][perm[row]]
        if permutation_sign(perm) < 0:
            term = term.scale(-1)
        total = term if total is None else total + term
        logger.debug("rdet permutation %s done, order %d", perm, term.order)
    return total


def monic_coefficients(op: DifferentialOperator, top: int, zero: Any) -> List[Any]:
    """Coefficients b_1..b_top of a monic order-`top` operator d^top + b_1 d^(top-1) + ..."""
    return [op.coeffs.get(top - i, zero) for i in range(1, top + 1)]
