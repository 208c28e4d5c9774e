"""
The universal weight function and Bethe vectors.

For an admissible J put A_i(J) = {a : j_a > i}. A tuple gamma of bijections
gamma_i : A_i(J) -> {1..l_i} contributes the product over a in A_1(J) of

    1 / (t^(1)_{gamma_1(a)} - z_a) * prod_{i=2}^{j_a - 1} 1 / (t^(i)_{gamma_i(a)} - t^(i-1)_{gamma_(i-1)(a)})

and omega_J is the sum of these products over all gamma.
"""
import itertools
import logging
from functools import lru_cache
from math import factorial, prod
from typing import List, Optional, Sequence, Tuple

from gaudin.core.errors import CheckFailure, CostCapExceeded, SameOrbit
from gaudin.model.master import CriticalPointT, hessian, same_orbit, to_sigma
from gaudin.model.tensor_space import (
    MultiIndex,
    TensorVector,
    admissible_indices,
    is_admissible,
    raising_residual,
    shapovalov,
)
from gaudin.utils.parallel import ordered_map

logger = logging.getLogger(__name__)

GAMMA_CAP = 720
SINGULAR_TOL = 1e-9


@lru_cache(maxsize=None)
def _level_permutations(size: int) -> Tuple[Tuple[int, ...], ...]:
    return tuple(itertools.permutations(range(size)))


def omega_J(T: CriticalPointT, J: MultiIndex) -> complex:
    """Coordinate of the weight function on the basis vector e_J v."""
    lam = T.partition
    if not is_admissible(J, lam):
        raise ValueError(f"{J} is not admissible for {lam.parts}")
    sizes = lam.level_sizes[1:-1]
    if prod(factorial(l) for l in sizes) > GAMMA_CAP:
        raise CostCapExceeded(f"|Gamma(J)| = {prod(factorial(l) for l in sizes)} exceeds {GAMMA_CAP}")
    T.check_distinct()

    N = T.N
    A = [None] + [[a for a, j in enumerate(J) if j > i] for i in range(1, N)]
    total = 0j
    for gammas in itertools.product(*(_level_permutations(l) for l in sizes)):
        # position of site a within A_i, then its image under gamma_i
        images = [None] + [dict(zip(A[i], gammas[i - 1])) for i in range(1, N)]
        term = 1.0 + 0j
        for a in (A[1] if N > 1 else []):
            term /= T.t[0][images[1][a]] - T.z[a]
            for i in range(2, J[a]):
                term /= T.t[i - 1][images[i][a]] - T.t[i - 2][images[i - 1][a]]
        total += term
    return total


def bethe_vector(T: CriticalPointT, check: bool = True, threads: Optional[int] = None) -> TensorVector:
    """
    sum_J omega_J(T) e_J v.

    Raises:
        CheckFailure: if T is tagged as a converged nondegenerate critical point
            and the result is not singular.
    """
    indices = admissible_indices(T.partition)
    values = ordered_map(lambda J: omega_J(T, J), indices, max_workers=threads)
    v = TensorVector.from_items(T.N, T.n, zip(indices, values))
    if check and T.converged and T.nondegenerate:
        rr = raising_residual(v)
        if rr > SINGULAR_TOL:
            logger.error("Bethe vector at a converged point is not singular (residual %.3e)", rr)
            raise CheckFailure(f"raising residual {rr:.3e} exceeds {SINGULAR_TOL}")
    return v


def norm_hessian_check(T: CriticalPointT) -> Tuple[complex, complex, float]:
    """S(omega, omega) against the Hessian of log Phi."""
    w = bethe_vector(T)
    lhs = shapovalov(w, w)
    rhs = T.hess if T.hess is not None else hessian(T)
    denom = max(abs(lhs), abs(rhs))
    rel = abs(lhs - rhs) / denom if denom > 0 else 0.0
    return lhs, rhs, float(rel)


def orthogonality_check(T1: CriticalPointT, T2: CriticalPointT, dedup_tol: float = 1e-6) -> complex:
    """S(omega(T1), omega(T2)) for points in different orbits."""
    if T1.z != T2.z:
        raise ValueError("orthogonality is only defined for points over the same z")
    if same_orbit(to_sigma(T1), to_sigma(T2), dedup_tol):
        raise SameOrbit("the two points lie in the same orbit")
    return shapovalov(bethe_vector(T1), bethe_vector(T2))


def normalized_pairings(points: Sequence[CriticalPointT]) -> List[Tuple[int, int, float]]:
    """|S(omega_a, omega_b)| / (|omega_a| |omega_b|) for every pair a < b."""
    vectors = [bethe_vector(T) for T in points]
    sigmas = [to_sigma(T) for T in points]
    out = []
    for a, b in itertools.combinations(range(len(points)), 2):
        if same_orbit(sigmas[a], sigmas[b], 1e-6):
            raise SameOrbit(f"points {a} and {b} lie in the same orbit")
        s = shapovalov(vectors[a], vectors[b])
        out.append((a, b, float(abs(s) / max(vectors[a].norm() * vectors[b].norm(), 1e-300))))
    return out
