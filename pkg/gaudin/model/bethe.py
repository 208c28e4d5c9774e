"""
The universal differential operator of the Gaudin model on the evaluation
module V(z_1) (x) ... (x) V(z_n).

    D = rdet( delta_ij d - e_ji(u) ),   e_ij(u) = sum_s e_ij^(s) / (u - z_s)

expanded as d^N + B_1(u) d^(N-1) + ... + B_N(u), with every B_i(u) an
operator-valued rational function in partial-fraction form.
"""
import itertools
from math import factorial
import logging
from dataclasses import dataclass
from typing import Any, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from gaudin.algebra.diffop import DifferentialOperator, monic_coefficients, row_determinant
from gaudin.algebra.poly import PartialFractionSum, TermKey
from gaudin.core.errors import CostCapExceeded, DegenerateSites, PoleEvaluation
from gaudin.model.tensor_space import (
    DENSE_CAP,
    TensorVector,
    identity_operator,
    site_operator,
)

logger = logging.getLogger(__name__)

SITE_GAP = 1e-8
APPLY_GAP = 1e-6
OPERATOR_ZERO = 1e-13


class OperatorRatFn(PartialFractionSum):
    """Partial-fraction sum whose coefficients are sparse operators on V^{(x)n}."""

    def __init__(self, terms: Optional[Mapping[TermKey, Any]], dim: int):
        self.dim = dim
        super().__init__(terms)

    def _copy_attrs(self, obj: "OperatorRatFn") -> None:
        obj.dim = self.dim

    @staticmethod
    def _coeff_product(a: Any, b: Any) -> Any:
        return (a @ b).tocsr()

    @staticmethod
    def _is_negligible(c: Any) -> bool:
        return c.nnz == 0 or float(np.abs(c.data).max()) <= OPERATOR_ZERO

    def _zero(self) -> sparse.csr_matrix:
        return sparse.csr_matrix((self.dim, self.dim), dtype=complex)

    @classmethod
    def constant(cls, op: sparse.csr_matrix) -> "OperatorRatFn":
        return cls({(None, 0): op}, op.shape[0])


@dataclass(frozen=True)
class OperatorDiffOp:
    """d^N + B_1(u) d^(N-1) + ... + B_N(u) acting on V^{(x)n}."""
    N: int
    z: Tuple[complex, ...]
    coefficients: Tuple[OperatorRatFn, ...]

    @property
    def n(self) -> int:
        return len(self.z)

    def B(self, i: int) -> OperatorRatFn:
        return self.coefficients[i - 1]

    def matrix(self, i: int, u: complex) -> sparse.csr_matrix:
        """B_i(u) as a sparse matrix."""
        for s, zs in enumerate(self.z):
            if abs(u - zs) <= APPLY_GAP:
                raise PoleEvaluation(f"u = {u} is within {APPLY_GAP} of site z_{s + 1} = {zs}")
        return sparse.csr_matrix(self.B(i).evaluate(u))


def check_sites(z: Sequence[complex], gap: float = SITE_GAP) -> None:
    for (a, za), (b, zb) in itertools.combinations(enumerate(z), 2):
        if abs(za - zb) <= gap:
            raise DegenerateSites(f"z_{a + 1} = {za} and z_{b + 1} = {zb} are closer than {gap}")


def current(N: int, z: Sequence[complex], i: int, j: int) -> OperatorRatFn:
    """e_ij(u) = sum_s e_ij^(s) / (u - z_s)."""
    n = len(z)
    return OperatorRatFn({(complex(zs), 1): site_operator(N, n, i, j, s + 1) for s, zs in enumerate(z)}, N ** n)


def build_universal_operator(N: int, z: Sequence[complex]) -> OperatorDiffOp:
    """
    Expand the row determinant of delta_ij d - e_ji(u) into monic form.

    Raises:
        DegenerateSites: if two evaluation points nearly coincide.
        CostCapExceeded: if N^n exceeds the dense cap.
    """
    z = tuple(complex(x) for x in z)
    n = len(z)
    check_sites(z)
    if N ** n > DENSE_CAP:
        raise CostCapExceeded(f"N^n = {N ** n} exceeds {DENSE_CAP}")
    dim = N ** n
    one = OperatorRatFn.constant(identity_operator(N, n))
    currents = {(i, j): current(N, z, i, j) for i in range(1, N + 1) for j in range(1, N + 1)}

    matrix: List[List[DifferentialOperator]] = []
    for i in range(1, N + 1):
        row = []
        for j in range(1, N + 1):
            if i == j:
                row.append(DifferentialOperator.d_minus(one, currents[(j, i)]))
            else:
                row.append(DifferentialOperator({0: -currents[(j, i)]}))
        matrix.append(row)

    logger.info("expanding rdet for N=%d, n=%d (%d permutations)", N, n, factorial(N))
    D = row_determinant(matrix)
    zero = OperatorRatFn({}, dim)
    coeffs = monic_coefficients(D, N, zero)
    return OperatorDiffOp(N=N, z=z, coefficients=tuple(coeffs))


def apply_Bi(D: OperatorDiffOp, i: int, u: complex, v: TensorVector) -> TensorVector:
    """B_i(u) v."""
    if v.is_zero():
        return TensorVector(v.N, v.n)
    return TensorVector.from_dense(v.N, v.n, D.matrix(i, u) @ v.to_dense())


def eigen_residual(D: OperatorDiffOp, v: TensorVector, scalar_op: Any, samples: Sequence[complex]) -> float:
    """
    max over u in samples and i of |B_i(u) v - b_i(u) v| / |v|.

    scalar_op is any object with ``coefficient_at(i, u)`` (a ScalarDiffOp).
    """
    if v.is_zero():
        raise ValueError("eigen residual of the zero vector is undefined")
    dense = v.to_dense()
    norm = np.linalg.norm(dense)
    worst = 0.0
    for u in samples:
        for i in range(1, D.N + 1):
            lhs = D.matrix(i, u) @ dense
            rhs = scalar_op.coefficient_at(i, u) * dense
            worst = max(worst, float(np.linalg.norm(lhs - rhs) / norm))
    return worst


def series_coefficients(D: OperatorDiffOp, i: int, j_max: int) -> List[sparse.csr_matrix]:
    """B_ij for j = i..j_max in B_i(u) = sum_j B_ij u^(-j)."""
    B = D.B(i)
    return [sparse.csr_matrix(B.series_coefficient(j)) for j in range(i, j_max + 1)]
