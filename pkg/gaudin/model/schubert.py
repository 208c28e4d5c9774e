"""
Spaces of polynomials in the Schubert cell of a partition, their
differential operators, and the maps between the cell and critical points.

A point X of the cell is an N-dimensional space of polynomials with degree set
{d_1 > ... > d_N}, d_i = lambda_i + N - i. It is stored through its flag basis:
f_i is monic of degree d_i and has zero coefficient at every u^d_k, k != i.
"""
import logging
from dataclasses import dataclass
from math import perm
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from gaudin.algebra.diffop import DifferentialOperator, monic_coefficients
from gaudin.algebra.poly import (
    Polynomial,
    RationalFn,
    polish_clusters,
    polynomial_determinant,
    root_clusters,
    roots,
    wronskian,
)
from gaudin.core.config import SolverBudget, Tolerances
from gaudin.core.errors import (
    DegreeDrop,
    KernelDimension,
    NonConvergence,
    NotInCell,
    SingularWronskian,
)
from gaudin.model.master import CriticalPointT, SigmaPoint, SolveReport, solve_bae, to_sigma
from gaudin.model.tensor_space import Partition

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-9
KERNEL_TOL = 1e-9
NULL_REL = 1e-8
CLUSTER_TOL = 1e-4


@dataclass(frozen=True)
class PolySpace:
    lam: Partition
    basis: Tuple[Polynomial, ...]

    @property
    def N(self) -> int:
        return len(self.basis)

    def coefficient_distance(self, other: "PolySpace") -> float:
        worst = 0.0
        for f, g in zip(self.basis, other.basis):
            size = max(len(f.coeffs), len(g.coeffs))
            worst = max(worst, max((abs(f.coefficient(k) - g.coefficient(k)) for k in range(size)), default=0.0))
        return worst


@dataclass(frozen=True)
class ScalarDiffOp:
    """d^N + b_1(u) d^(N-1) + ... + b_N(u)."""
    N: int
    coefficients: Tuple[RationalFn, ...]

    @classmethod
    def from_operator(cls, op: DifferentialOperator, N: int) -> "ScalarDiffOp":
        return cls(N, tuple(monic_coefficients(op, N, RationalFn({}))))

    def coefficient_at(self, i: int, u: complex) -> complex:
        return self.coefficients[i - 1](u)

    def coefficients_at(self, u: complex) -> List[complex]:
        return [b(u) for b in self.coefficients]

    def apply(self, p: Polynomial, u: complex) -> complex:
        """(D p)(u)."""
        total = p.derivative(self.N)(u)
        for i, b in enumerate(self.coefficients, start=1):
            total += b(u) * p.derivative(self.N - i)(u)
        return total

    def series_coefficients(self, i: int, j_max: int) -> List[complex]:
        """Coefficients of u^(-j), j = i..j_max, in the expansion of b_i at infinity."""
        b = self.coefficients[i - 1]
        return [complex(b.series_coefficient(j)) for j in range(i, j_max + 1)]


# ----------------------------------------------------------------------
# The cell
# ----------------------------------------------------------------------
def flag_basis(raw: Sequence[Polynomial], lam: Optional[Partition] = None) -> PolySpace:
    """
    Reduce a spanning set of N polynomials to the flag basis.

    Raises:
        NotInCell: if the polynomials are dependent or the degree set does not
            match the requested partition.
    """
    N = len(raw)
    top = max((p.degree for p in raw), default=-1)
    if N == 0 or top < 0:
        raise NotInCell("the zero space is not in any cell")
    # columns ordered by descending degree
    M = np.array([[p.coefficient(top - c) for c in range(top + 1)] for p in raw], dtype=complex)
    tol = PIVOT_TOL * np.abs(M).max()
    pivots: List[int] = []
    r = 0
    for col in range(top + 1):
        if r == N:
            break
        piv = r + int(np.argmax(np.abs(M[r:, col])))
        if abs(M[piv, col]) <= tol:
            continue
        M[[r, piv]] = M[[piv, r]]
        M[r] /= M[r, col]
        for other in range(N):
            if other != r:
                M[other] -= M[other, col] * M[r]
        pivots.append(col)
        r += 1
    if r < N:
        raise NotInCell(f"the {N} polynomials span only a {r}-dimensional space")

    degrees = [top - c for c in pivots]
    parts = tuple(d - N + 1 + i for i, d in enumerate(degrees))
    try:
        found = Partition(parts)
    except ValueError as e:
        raise NotInCell(f"degree set {degrees} does not come from a partition") from e
    if lam is not None and found.parts != lam.parts:
        raise NotInCell(f"degree set {degrees} gives {found.parts}, expected {lam.parts}")

    basis = []
    for row, col in zip(range(N), pivots):
        M[row, pivots] = 0.0
        M[row, col] = 1.0
        basis.append(Polynomial(tuple(M[row, ::-1][:degrees[row] + 1])))
    return PolySpace(found, tuple(basis))


def tail_wronskians(X: PolySpace) -> List[Polynomial]:
    """y_0..y_(N-1): monic Wronskians of f_(a+1), ..., f_N.

    Raises:
        DegreeDrop: if some y_a has lower degree than l_a.
    """
    sizes = X.lam.level_sizes
    out = []
    for a in range(X.N):
        w = wronskian(X.basis[a:])
        l = sizes[a]
        coeffs = w.coeffs[:l + 1]
        scale = max((abs(c) for c in w.coeffs), default=0.0)
        if len(coeffs) < l + 1 or abs(coeffs[l]) <= 1e-12 * scale:
            raise DegreeDrop(f"y_{a} has degree below {l}")
        out.append(Polynomial(coeffs).monic())
    return out


def wronski_map(X: PolySpace) -> List[complex]:
    """a_1..a_n with Wr_X = u^n + sum (-1)^s a_s u^(n-s)."""
    y0 = tail_wronskians(X)[0]
    n = y0.degree
    return [(-1) ** s * y0.coefficient(n - s) for s in range(1, n + 1)]


def theta(X: PolySpace) -> SigmaPoint:
    levels = []
    for y in tail_wronskians(X):
        l = y.degree
        levels.append(tuple((-1) ** i * y.coefficient(l - i) for i in range(1, l + 1)))
    return SigmaPoint(tuple(levels))


def root_coordinates(X: PolySpace) -> CriticalPointT:
    ys = tail_wronskians(X)
    return CriticalPointT.of(roots(ys[0]), [roots(y) for y in ys[1:]])


def _sample_circle(radius: float, count: int, rng: np.random.Generator) -> np.ndarray:
    return radius * np.exp(1j * rng.uniform(0, 2 * np.pi, size=count))


def d_X(X: PolySpace) -> ScalarDiffOp:
    """
    The monic operator whose kernel is X: b_i = (-1)^i M_(N-i) / Wr_X, where
    M_k is the minor of the derivative matrix [f_r^(c)] with column k removed.

    Raises:
        SingularWronskian: if Wr_X vanishes or the kernel condition fails.
    """
    N = X.N
    deriv = [[f.derivative(c) for c in range(N + 1)] for f in X.basis]
    wr = polynomial_determinant([[row[c] for c in range(N)] for row in deriv])
    if wr.is_zero():
        raise SingularWronskian("the Wronskian of the basis is identically zero")
    poles = polish_clusters(wr, root_clusters(roots(wr), CLUSTER_TOL)) if wr.degree > 0 else []
    coeffs = []
    for i in range(1, N + 1):
        k = N - i
        minor = polynomial_determinant([[row[c] for c in range(N + 1) if c != k] for row in deriv])
        numer = minor * ((-1) ** i / wr.lead)
        coeffs.append(RationalFn.from_numer_poles(numer, poles))
    op = ScalarDiffOp(N, tuple(coeffs))

    radius = 2.0 + 2.0 * max([abs(p) for p, _ in poles] + [1.0])
    for u in _sample_circle(radius, 5, np.random.default_rng(0)):
        for f in X.basis:
            value = op.apply(f, u)
            scale = abs(f.derivative(N)(u)) + sum(abs(b(u) * f.derivative(N - i)(u))
                                                   for i, b in enumerate(op.coefficients, start=1))
            if abs(value) > KERNEL_TOL * max(scale, 1e-300):
                raise SingularWronskian(f"kernel condition fails at u={u}: |D f| = {abs(value):.3e}")
    return op


def d_T(T: CriticalPointT) -> ScalarDiffOp:
    """(d - chi^1) ... (d - chi^N), chi^a = sum 1/(u - t^(a-1)_j) - sum 1/(u - t^(a)_j)."""
    T.check_distinct()
    one = RationalFn.constant(1.0)
    op = None
    for a in range(1, T.N + 1):
        chi = RationalFn.simple_poles([(x, 1.0) for x in T.level(a - 1)] + [(x, -1.0) for x in T.level(a)])
        factor = DifferentialOperator.d_minus(one, chi)
        op = factor if op is None else op * factor
    return ScalarDiffOp.from_operator(op, T.N)


def _kernel_matrix(op: ScalarDiffOp, top: int, points: np.ndarray, radius: float) -> np.ndarray:
    N = op.N
    M = np.zeros((len(points), top + 1), dtype=complex)
    for p, x in enumerate(points):
        c = [1.0 + 0j] + op.coefficients_at(x)  # c[i] multiplies d^(N-i)
        for k in range(top + 1):
            total = 0j
            for i in range(N + 1):
                m = N - i
                if m <= k:
                    total += c[i] * perm(k, m) * x ** (k - m)
            M[p, k] = total / radius ** k
        M[p] /= max(np.abs(M[p]).max(), 1e-300)
    return M


def iota(T: CriticalPointT, seed: int = 0) -> PolySpace:
    """
    The polynomial kernel of d_T(T), sampled at d_1 + 3 points.

    Raises:
        KernelDimension: if the kernel is not N-dimensional after one resample.
    """
    lam = T.partition
    op = d_T(T)
    top = lam.exponents[0]
    coords = [abs(x) for a in range(T.N) for x in T.level(a)]
    radius = 1.5 * max(coords + [1.0]) + 1.0
    rng = np.random.default_rng(seed)
    for attempt in range(2):
        points = _sample_circle(radius, top + 3, rng)
        M = _kernel_matrix(op, top, points, radius)
        _, s, vh = linalg.svd(M)
        rank = int(np.sum(s > NULL_REL * s[0])) if s.size else 0
        null = vh[rank:].conj()
        if null.shape[0] == T.N:
            raw = [Polynomial(tuple(v / radius ** np.arange(top + 1))) for v in null]
            return flag_basis(raw, lam)
        logger.warning("kernel of D_T has dimension %d, expected %d (attempt %d)", null.shape[0], T.N, attempt + 1)
    raise KernelDimension(f"kernel of D_T has dimension {null.shape[0]}, expected {T.N}")


# ----------------------------------------------------------------------
# Round trips and sampling
# ----------------------------------------------------------------------
def theta_iota_error(T: CriticalPointT) -> float:
    """max |theta(iota(T)) - to_sigma(T)| over all sigma coordinates."""
    a = theta(iota(T)).flat()
    b = to_sigma(T).flat()
    return float(np.abs(a - b).max()) if a.size else 0.0


def iota_theta_error(X: PolySpace) -> float:
    """max coefficient difference between iota(root coordinates of X) and X."""
    return iota(root_coordinates(X)).coefficient_distance(X)


def _min_gap(values: Sequence[complex], others: Sequence[complex] = ()) -> float:
    vals = np.array(values, dtype=complex)
    gaps = [np.inf]
    if vals.size > 1:
        d = np.abs(vals[:, None] - vals[None, :])
        np.fill_diagonal(d, np.inf)
        gaps.append(d.min())
    if vals.size and len(others):
        gaps.append(np.abs(vals[:, None] - np.array(others)[None, :]).min())
    return float(min(gaps))


def is_nice(X: PolySpace, min_gap: float = 1e-3) -> bool:
    try:
        T = root_coordinates(X)
    except (DegreeDrop, NonConvergence):
        return False
    for a in range(T.N):
        if _min_gap(T.level(a), T.level(a + 1)) <= min_gap:
            return False
    return True


def random_nice_space(lam: Partition, rng: np.random.Generator, min_gap: float = 1e-3,
                      max_tries: int = 100) -> PolySpace:
    """Random flag coefficients, rejected until every y_a has well separated simple roots."""
    for _ in range(max_tries):
        arrays = [np.zeros(d + 1, dtype=complex) for d in lam.exponents]
        for a, d in zip(arrays, lam.exponents):
            a[d] = 1.0
        for i, k in sorted(lam.cell_coordinates, key=lambda ik: (ik[0], -ik[1])):
            arrays[i][k] = rng.standard_normal() + 1j * rng.standard_normal()
        X = PolySpace(lam, tuple(Polynomial(tuple(a)) for a in arrays))
        if is_nice(X, min_gap):
            return X
    raise NonConvergence(f"no nice point of the cell for {lam.parts} after {max_tries} draws")


def wronski_fiber(lam: Partition, z: Sequence[complex], seed: int = 0,
                  budget: SolverBudget = SolverBudget(), tolerances: Tolerances = Tolerances(),
                  threads: Optional[int] = None) -> Tuple[List[PolySpace], SolveReport]:
    """All X in the cell with Wronskian prod (u - z_s), one per critical orbit."""
    orbits, report = solve_bae(lam, z, seed, budget, tolerances, threads)
    return [iota(T, seed) for T in orbits], report
