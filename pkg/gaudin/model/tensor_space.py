"""
The tensor space V^{(x)n} of the vector representation of gl_N.

Multi-indices J = (j_1, ..., j_n) with entries in 1..N label the basis
e_J v = e_{j_1} (x) ... (x) e_{j_n}; they are packed into base-N integers with
site 1 most significant, which is also the row order of every dense vector and
sparse operator built here.
"""
import logging
from dataclasses import dataclass
from functools import reduce
from itertools import chain
from math import factorial, prod
from operator import mul
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from gaudin.core.errors import CostCapExceeded

logger = logging.getLogger(__name__)

DENSE_CAP = 4096
PRUNE_REL = 1e-15

MultiIndex = Tuple[int, ...]


@dataclass(frozen=True)
class Partition:
    """A shape lambda_1 >= ... >= lambda_N >= 0; N is len(parts)."""
    parts: Tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if not parts:
            raise ValueError("a partition needs at least one part (N >= 1)")
        if any(p < 0 for p in parts) or any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"{parts} is not a weakly decreasing sequence of nonnegative integers")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, parts: Sequence[int], N: Optional[int] = None) -> "Partition":
        parts = tuple(parts)
        N = N or len(parts)
        if len(parts) > N:
            if any(parts[N:]):
                raise ValueError(f"{parts} has more than {N} nonzero parts")
            parts = parts[:N]
        return cls(parts + (0,) * (N - len(parts)))

    @property
    def N(self) -> int:
        return len(self.parts)

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def level_sizes(self) -> Tuple[int, ...]:
        """l_0, ..., l_N with l_a = lambda_{a+1} + ... + lambda_N."""
        return tuple(sum(self.parts[a:]) for a in range(self.N + 1))

    @property
    def total_level(self) -> int:
        return sum(self.level_sizes[:-1])

    @property
    def exponents(self) -> Tuple[int, ...]:
        return tuple(p + self.N - 1 - i for i, p in enumerate(self.parts))

    @property
    def cell_coordinates(self) -> Tuple[Tuple[int, int], ...]:
        """(i, k) for every free coefficient u^k of the i-th flag polynomial; there are n of them."""
        exps = self.exponents
        taken = set(exps)
        return tuple((i, k) for i, d in enumerate(exps) for k in range(d) if k not in taken)

    @property
    def degree_shift(self) -> int:
        return sum(i * p for i, p in enumerate(self.parts))

    @property
    def orbit_size(self) -> int:
        return prod(factorial(l) for l in self.level_sizes[1:-1])


# ----------------------------------------------------------------------
# Multi-indices
# ----------------------------------------------------------------------
def pack(J: Sequence[int], N: int) -> int:
    out = 0
    for j in J:
        out = out * N + (j - 1)
    return out


def unpack(packed: int, N: int, n: int) -> MultiIndex:
    digits = []
    for _ in range(n):
        packed, r = divmod(packed, N)
        digits.append(r + 1)
    return tuple(reversed(digits))


def weight_of(J: Sequence[int], N: int) -> Tuple[int, ...]:
    return tuple(sum(1 for j in J if j == i) for i in range(1, N + 1))


def is_admissible(J: Sequence[int], lam: Partition) -> bool:
    return weight_of(J, lam.N) == lam.parts


def admissible_indices(lam: Partition) -> List[MultiIndex]:
    """Every J whose entry counts are lambda, in lexicographic order."""
    counts = list(lam.parts)

    def rec(remaining: int) -> Iterator[MultiIndex]:
        if remaining == 0:
            yield ()
            return
        for i in range(lam.N):
            if counts[i]:
                counts[i] -= 1
                for tail in rec(remaining - 1):
                    yield (i + 1,) + tail
                counts[i] += 1

    return list(rec(lam.n))


# ----------------------------------------------------------------------
# Vectors
# ----------------------------------------------------------------------
class TensorVector:
    """Sparse element of V^{(x)n}: packed multi-index -> complex coefficient."""

    def __init__(self, N: int, n: int, entries: Optional[Mapping[int, complex]] = None):
        self.N = N
        self.n = n
        raw = {k: complex(c) for k, c in (entries or {}).items()}
        scale = np.sqrt(sum(abs(c) ** 2 for c in raw.values())) if raw else 0.0
        self.entries: Dict[int, complex] = {
            k: c for k, c in raw.items() if c != 0 and abs(c) >= PRUNE_REL * scale
        }

    @classmethod
    def basis(cls, N: int, J: Sequence[int], c: complex = 1.0) -> "TensorVector":
        return cls(N, len(J), {pack(J, N): c})

    @classmethod
    def from_items(cls, N: int, n: int, items: Iterable[Tuple[Sequence[int], complex]]) -> "TensorVector":
        entries: Dict[int, complex] = {}
        for J, c in items:
            key = pack(J, N)
            entries[key] = entries.get(key, 0j) + c
        return cls(N, n, entries)

    @classmethod
    def from_dense(cls, N: int, n: int, arr: np.ndarray) -> "TensorVector":
        arr = np.asarray(arr).ravel()
        return cls(N, n, {int(k): complex(arr[k]) for k in np.flatnonzero(arr)})

    @property
    def dim(self) -> int:
        return self.N ** self.n

    def to_dense(self) -> np.ndarray:
        if self.dim > DENSE_CAP:
            raise CostCapExceeded(f"dense V^(x){self.n} for N={self.N} exceeds {DENSE_CAP}")
        out = np.zeros(self.dim, dtype=complex)
        for k, c in self.entries.items():
            out[k] = c
        return out

    def coefficient(self, J: Sequence[int]) -> complex:
        return self.entries.get(pack(J, self.N), 0j)

    def items(self) -> List[Tuple[MultiIndex, complex]]:
        return [(unpack(k, self.N, self.n), self.entries[k]) for k in sorted(self.entries)]

    @property
    def weight(self) -> Optional[Tuple[int, ...]]:
        """The common weight of all stored indices, or None if mixed or zero."""
        weights = {weight_of(J, self.N) for J, _ in self.items()}
        return weights.pop() if len(weights) == 1 else None

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(c) ** 2 for c in self.entries.values())))

    def is_zero(self) -> bool:
        return not self.entries

    def _check_shape(self, other: "TensorVector") -> None:
        if (self.N, self.n) != (other.N, other.n):
            raise ValueError(f"shape mismatch: (N, n) = {(self.N, self.n)} vs {(other.N, other.n)}")

    def __add__(self, other: "TensorVector") -> "TensorVector":
        self._check_shape(other)
        out = dict(self.entries)
        for k, c in other.entries.items():
            out[k] = out.get(k, 0j) + c
        return TensorVector(self.N, self.n, out)

    def __neg__(self) -> "TensorVector":
        return TensorVector(self.N, self.n, {k: -c for k, c in self.entries.items()})

    def __sub__(self, other: "TensorVector") -> "TensorVector":
        return self + (-other)

    def __mul__(self, w: complex) -> "TensorVector":
        return TensorVector(self.N, self.n, {k: w * c for k, c in self.entries.items()})

    __rmul__ = __mul__

    def __repr__(self):
        shown = ", ".join(f"{J}: {c:.6g}" for J, c in self.items()[:4])
        more = "..." if len(self.entries) > 4 else ""
        return f"TensorVector(N={self.N}, n={self.n}, {{{shown}{more}}})"


def apply_e(i: int, j: int, site: int, v: TensorVector) -> TensorVector:
    """e_ij acting on tensor factor `site` (1-based): e_ij e_k = delta_jk e_i."""
    stride = v.N ** (v.n - site)
    out: Dict[int, complex] = {}
    for k, c in v.entries.items():
        digit = (k // stride) % v.N + 1
        if digit == j:
            key = k + (i - j) * stride
            out[key] = out.get(key, 0j) + c
    return TensorVector(v.N, v.n, out)


def apply_global_e(i: int, j: int, v: TensorVector) -> TensorVector:
    """sum over sites of e_ij^(s)."""
    out = TensorVector(v.N, v.n)
    for s in range(1, v.n + 1):
        out = out + apply_e(i, j, s, v)
    return out


def raising_residual(v: TensorVector) -> float:
    """max_i |e_{i,i+1} v| / max(|v|, 1); zero exactly on singular vectors."""
    if v.is_zero():
        return 0.0
    worst = 0.0
    for i in range(1, v.N):
        worst = max(worst, apply_global_e(i, i + 1, v).norm())
    return worst / max(v.norm(), 1.0)


def shapovalov(v: TensorVector, w: TensorVector) -> complex:
    """Bilinear tensor Shapovalov form; the basis e_J v is orthonormal."""
    v._check_shape(w)
    small, large = (v, w) if len(v.entries) <= len(w.entries) else (w, v)
    return complex(sum(c * large.entries.get(k, 0j) for k, c in small.entries.items()))


def singular_dim(lam: Partition) -> int:
    """Number of standard Young tableaux of shape lambda (hook-length formula)."""
    parts = [p for p in lam.parts if p > 0]
    n = sum(parts)
    if n <= 1:
        return 1
    hooks = [[parts[i] - j + sum(1 for row in parts[i + 1:] if row > j) for j in range(parts[i])]
             for i in range(len(parts))]
    return factorial(n) // reduce(mul, chain.from_iterable(hooks))


def weyl_dimension(lam: Partition) -> int:
    """dim of the irreducible gl_N module of highest weight lambda."""
    num, den = 1, 1
    for i in range(lam.N):
        for j in range(i + 1, lam.N):
            num *= lam.parts[i] - lam.parts[j] + j - i
            den *= j - i
    return num // den


# ----------------------------------------------------------------------
# Sparse operators on the full tensor space
# ----------------------------------------------------------------------
def elementary_matrix(N: int, i: int, j: int) -> sparse.csr_matrix:
    return sparse.csr_matrix(([1.0 + 0j], ([i - 1], [j - 1])), shape=(N, N))


def site_operator(N: int, n: int, i: int, j: int, site: int) -> sparse.csr_matrix:
    """I_{N^(site-1)} (x) E_ij (x) I_{N^(n-site)} as a CSR matrix."""
    if N ** n > DENSE_CAP:
        raise CostCapExceeded(f"operators on V^(x){n} for N={N} exceed dimension {DENSE_CAP}")
    left = sparse.identity(N ** (site - 1), dtype=complex, format="csr")
    right = sparse.identity(N ** (n - site), dtype=complex, format="csr")
    return sparse.kron(sparse.kron(left, elementary_matrix(N, i, j)), right, format="csr")


def identity_operator(N: int, n: int) -> sparse.csr_matrix:
    return sparse.identity(N ** n, dtype=complex, format="csr")
