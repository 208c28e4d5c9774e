"""
Truncated integer q-series and the graded characters of the Schubert-cell
coordinate ring and of the singular subspace of the polynomial tensor module.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Sequence, Tuple

logger = logging.getLogger(__name__)

INT64_MAX = 2 ** 63 - 1


@dataclass(frozen=True)
class QSeries:
    """
    A truncated q-series c_0 + c_1 q + ... + c_K q^K with exact integer coefficients.
    """
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        for c in self.coeffs:
            if abs(c) > INT64_MAX:
                raise OverflowError(f"q-series coefficient {c} exceeds 64-bit range")

    @classmethod
    def one(cls, K: int) -> "QSeries":
        return cls((1,) + (0,) * K)

    @classmethod
    def binomial(cls, power: int, K: int) -> "QSeries":
        """1 - q^power truncated at K."""
        out = [0] * (K + 1)
        out[0] = 1
        if power <= K:
            out[power] -= 1
        return cls(tuple(out))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __repr__(self):
        return f"QSeries(order={self.order}, coeffs={list(self.coeffs[:6])}...)"

    def __add__(self, other: "QSeries") -> "QSeries":
        K = min(self.order, other.order)
        return QSeries(tuple(a + b for a, b in zip(self.coeffs[:K + 1], other.coeffs[:K + 1])))

    def __sub__(self, other: "QSeries") -> "QSeries":
        K = min(self.order, other.order)
        return QSeries(tuple(a - b for a, b in zip(self.coeffs[:K + 1], other.coeffs[:K + 1])))

    def __mul__(self, other: "QSeries") -> "QSeries":
        K = min(self.order, other.order)
        out = [0] * (K + 1)
        for i, a in enumerate(self.coeffs[:K + 1]):
            if a == 0:
                continue
            for j in range(K + 1 - i):
                out[i + j] += a * other.coeffs[j]
        return QSeries(tuple(out))

    def shift(self, k: int) -> "QSeries":
        """Multiply by q^k, keeping the truncation order."""
        K = self.order
        return QSeries(((0,) * k + self.coeffs)[:K + 1])

    def __truediv__(self, other: "QSeries") -> "QSeries":
        # Division by a unit: b_0 = +-1
        unit = other.coeffs[0]
        if unit not in (1, -1):
            raise ValueError("q-series division needs a constant term of +1 or -1")
        K = min(self.order, other.order)
        out = [0] * (K + 1)
        for k in range(K + 1):
            acc = self.coeffs[k] - sum(other.coeffs[i] * out[k - i] for i in range(1, k + 1))
            out[k] = acc * unit
        return QSeries(tuple(out))


def pochhammer(a: int, K: int) -> QSeries:
    """(q)_a = prod_{j=1}^a (1 - q^j), truncated at K."""
    if a < 0:
        raise ValueError("pochhammer index must be nonnegative")
    out = QSeries.one(K)
    for j in range(1, a + 1):
        out = out * QSeries.binomial(j, K)
    return out


def exponents(parts: Sequence[int]) -> Tuple[int, ...]:
    """d_i = lambda_i + N - i for the 1-based row index i."""
    N = len(parts)
    return tuple(p + N - 1 - i for i, p in enumerate(parts))


def degree_shift(parts: Sequence[int]) -> int:
    """s_lambda = sum (i - 1) lambda_i."""
    return sum(i * p for i, p in enumerate(parts))


def char_O(parts: Sequence[int], K: int) -> QSeries:
    """
    prod_{i<j} (1 - q^(lam_i - lam_j + j - i)) / prod_i (q)_(lam_i + N - i).
    """
    N = len(parts)
    numer = QSeries.one(K)
    for i in range(N):
        for j in range(i + 1, N):
            numer = numer * QSeries.binomial(parts[i] - parts[j] + j - i, K)
    denom = QSeries.one(K)
    for d in exponents(parts):
        denom = denom * pochhammer(d, K)
    return numer / denom


def char_V(parts: Sequence[int], K: int) -> QSeries:
    """char_O shifted by q^(s_lambda)."""
    return char_O(parts, K).shift(degree_shift(parts))


def generator_degrees(parts: Sequence[int]) -> List[int]:
    """Degrees j of the free generators f_ij (j = 1..d_i, d_i - j not an exponent)."""
    exps = exponents(parts)
    taken = set(exps)
    degs = []
    for d in exps:
        degs.extend(j for j in range(1, d + 1) if d - j not in taken)
    return sorted(degs)


def hilbert_series_oracle(parts: Sequence[int], K: int) -> QSeries:
    """prod over generators of 1 / (1 - q^deg)."""
    out = QSeries.one(K)
    for deg in generator_degrees(parts):
        out = out / QSeries.binomial(deg, K)
    return out


def partitions_up_to(max_size: int, max_parts: int) -> Iterator[Tuple[int, ...]]:
    """Every partition with |lam| <= max_size and at most max_parts parts, padded to max_parts."""
    def rec(remaining: int, cap: int, slots: int) -> Iterator[Tuple[int, ...]]:
        if slots == 0:
            if remaining == 0:
                yield ()
            return
        for first in range(min(remaining, cap), -1, -1):
            for rest in rec(remaining - first, first, slots - 1):
                yield (first,) + rest

    for size in range(max_size + 1):
        yield from rec(size, size, max_parts)


def compare_characters(parts: Sequence[int], K: int) -> Dict[str, Any]:
    """char_O against the generator oracle, and char_V against the shifted char_O."""
    parts = tuple(parts)
    co = char_O(parts, K)
    cv = char_V(parts, K)
    oracle = hilbert_series_oracle(parts, K)
    shift_ok = cv == co.shift(degree_shift(parts))
    matches = co == oracle
    if not matches:
        logger.warning("character mismatch for %s: %s vs %s", parts, co, oracle)
    return {
        "lambda": list(parts),
        "char_O": co,
        "char_V": cv,
        "oracle": oracle,
        "oracle_match": matches,
        "shift_match": shift_ok,
        "nonnegative": all(c >= 0 for c in co.coeffs),
    }
