"""
Complex polynomials and partial-fraction rational functions.

Coefficients are stored in ascending degree everywhere (memory and JSON).
Rational functions keep a factored pole set and are always held in
partial-fraction form

    sum_m c_m u^m + sum_{p,k} c_{p,k} (u - p)^(-k)

so products, sums and derivatives never need a polynomial GCD over inexact
scalars. The same term algebra backs the operator-valued version used by the
Bethe operators (gaudin.model.bethe.OperatorRatFn).
"""
import itertools
import logging
from dataclasses import dataclass
from math import comb, factorial
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from gaudin.core.errors import NonConvergence, PoleCollision, PoleEvaluation

logger = logging.getLogger(__name__)

LEAD_TOL = 1e-14
POLE_DEDUP_TOL = 1e-10
POLE_EVAL_TOL = 1e-8
PRUNE_REL = 1e-14


# ----------------------------------------------------------------------
# Polynomial
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class Polynomial:
    """Complex polynomial, ascending coefficients; the zero polynomial is ()."""
    coeffs: Tuple[complex, ...] = ()

    def __post_init__(self):
        cs = [complex(c) for c in self.coeffs]
        while cs and abs(cs[-1]) <= LEAD_TOL:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def monomial(cls, k: int, c: complex = 1.0) -> "Polynomial":
        return cls((0.0,) * k + (c,))

    @classmethod
    def from_roots(cls, rts: Iterable[complex]) -> "Polynomial":
        rts = list(rts)
        return cls(tuple(npoly.polyfromroots(rts)) if rts else (1.0,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> complex:
        return self.coeffs[-1] if self.coeffs else 0j

    def is_zero(self) -> bool:
        return not self.coeffs

    def as_array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=complex)

    def coefficient(self, k: int) -> complex:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0j

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        return Polynomial(tuple(c / self.lead for c in self.coeffs))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(tuple(npoly.polyadd(self._arr(), other._arr())))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(tuple(npoly.polysub(self._arr(), other._arr())))

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple(-c for c in self.coeffs))

    def __mul__(self, other: Any) -> "Polynomial":
        if isinstance(other, Polynomial):
            if self.is_zero() or other.is_zero():
                return Polynomial()
            return Polynomial(tuple(np.convolve(self.as_array(), other.as_array())))
        return Polynomial(tuple(complex(other) * c for c in self.coeffs))

    __rmul__ = __mul__

    def derivative(self, k: int = 1) -> "Polynomial":
        if k == 0 or self.is_zero():
            return self
        return Polynomial(tuple(npoly.polyder(self.as_array(), k)))

    def __call__(self, x: complex) -> complex:
        # Horner
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def _arr(self) -> np.ndarray:
        return self.as_array() if self.coeffs else np.zeros(1, dtype=complex)


def poly_arith(a: Polynomial, b: Optional[Polynomial], op: str, point: Optional[complex] = None):
    """
    Ring operations on polynomials.

    op is one of ``add``, ``mul``, ``derivative`` (of a) or ``eval`` (a at point).
    """
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "derivative":
        return a.derivative()
    if op == "eval":
        return a(point)
    raise ValueError(f"unknown polynomial operation {op!r}")


def polynomial_determinant(matrix: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Permutation expansion of a determinant with polynomial entries."""
    size = len(matrix)
    total = Polynomial()
    for perm in itertools.permutations(range(size)):
        term = Polynomial((float(permutation_sign(perm)),))
        for row, col in enumerate(perm):
            term = term * matrix[row][col]
            if term.is_zero():
                break
        total = total + term
    return total


def permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = list(perm)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def wronskian(gs: Sequence[Polynomial]) -> Polynomial:
    """Determinant whose i-th row is g_i, g_i', ..., g_i^(N-1)."""
    if not gs:
        raise ValueError("wronskian needs at least one polynomial")
    size = len(gs)
    rows = [[g.derivative(k) for k in range(size)] for g in gs]
    return polynomial_determinant(rows)


# ----------------------------------------------------------------------
# Roots
# ----------------------------------------------------------------------
def _root_residual_ok(coeffs: np.ndarray, r: complex) -> bool:
    deg = len(coeffs) - 1
    scale = np.max(np.abs(coeffs)) * max(1.0, abs(r)) ** deg
    return abs(npoly.polyval(r, coeffs)) < 1e-9 * scale


def roots(p: Polynomial, seed: int = 0, max_iter: int = 500, retries: int = 5) -> List[complex]:
    """
    All deg(p) roots by simultaneous (Aberth) iteration, sorted by (Re, Im).

    Raises:
        NonConvergence: if some root fails the residual test after all restarts.
    """
    if p.is_zero():
        raise ValueError("the zero polynomial has no finite root set")
    coeffs = p.as_array()
    zero_roots = 0
    while zero_roots < len(coeffs) - 1 and coeffs[zero_roots] == 0:
        zero_roots += 1
    work = coeffs[zero_roots:] / coeffs[-1]
    deg = len(work) - 1
    found: List[complex] = [0j] * zero_roots
    if deg == 0:
        return sorted(found, key=lambda r: (r.real, r.imag))
    if deg == 1:
        return sorted(found + [complex(-work[0])], key=lambda r: (r.real, r.imag))

    dwork = npoly.polyder(work)
    radius = 2.0 * max(abs(work[k]) ** (1.0 / (deg - k)) for k in range(deg))
    radius = max(radius, 1e-12)
    rng = np.random.default_rng(seed)

    for attempt in range(retries + 1):
        phase = rng.uniform(0, 2 * np.pi)
        z = radius * np.exp(1j * (phase + 2 * np.pi * (np.arange(deg) + 0.25) / deg))
        z = z * (1 + 0.01 * rng.standard_normal(deg))
        for _ in range(max_iter):
            pv = npoly.polyval(z, work)
            dv = npoly.polyval(z, dwork)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = pv / dv
                diff = z[:, None] - z[None, :]
                np.fill_diagonal(diff, 1.0)
                inv = 1.0 / diff
                np.fill_diagonal(inv, 0.0)
                corr = ratio / (1.0 - ratio * inv.sum(axis=1))
            bad = ~np.isfinite(corr)
            if bad.any():
                corr[bad] = 1e-6 * radius * rng.standard_normal(bad.sum())
            z = z - corr
            if np.all(np.abs(corr) <= 1e-14 * np.maximum(1.0, np.abs(z))):
                break
        if all(_root_residual_ok(coeffs, complex(r)) for r in z):
            out = found + [complex(r) for r in z]
            return sorted(out, key=lambda r: (r.real, r.imag))
        logger.debug("root iteration restart %d for degree %d", attempt + 1, deg)
    raise NonConvergence(f"root finder failed for a degree-{p.degree} polynomial")


def root_clusters(rts: Sequence[complex], tol: float = 1e-6) -> List[Tuple[complex, int]]:
    """Group roots closer than tol (relative) into (centre, multiplicity) pairs."""
    clusters: List[List[complex]] = []
    for r in rts:
        for cl in clusters:
            c = sum(cl) / len(cl)
            if abs(r - c) <= tol * max(1.0, abs(c)):
                cl.append(r)
                break
        else:
            clusters.append([r])
    out = [(complex(sum(cl) / len(cl)), len(cl)) for cl in clusters]
    for centre, mult in out:
        if mult > 1:
            logger.debug("multiple root near %s (multiplicity %d)", centre, mult)
    return out


def polish_clusters(p: Polynomial, clusters: Sequence[Tuple[complex, int]],
                    max_iter: int = 20) -> List[Tuple[complex, int]]:
    """Refine each multiple root with Newton on p^(m-1), where it is a simple root."""
    out = []
    for centre, mult in clusters:
        x = complex(centre)
        if mult > 1:
            q = p.derivative(mult - 1)
            dq = q.derivative()
            for _ in range(max_iter):
                slope = dq(x)
                if slope == 0:
                    break
                step = q(x) / slope
                x -= step
                if abs(step) <= 1e-15 * max(1.0, abs(x)):
                    break
        out.append((x, mult))
    return out


def elem_symmetric(rts: Sequence[complex]) -> List[complex]:
    """sigma_1..sigma_k: prod (u - r) = u^k + sum (-1)^i sigma_i u^(k-i)."""
    if len(rts) == 0:
        return []
    desc = np.poly(np.asarray(rts, dtype=complex))
    return [complex((-1) ** i * desc[i]) for i in range(1, len(desc))]


# ----------------------------------------------------------------------
# Partial-fraction term algebra
# ----------------------------------------------------------------------
# A term key is (None, m) for u^m or (p, k) for (u - p)^(-k), k >= 1.
TermKey = Tuple[Optional[complex], int]


def _expand_shifted_power(p: complex, r: int) -> List[Tuple[complex, TermKey]]:
    """(u - p)^r as u-monomials."""
    return [(comb(r, s) * (-p) ** (r - s), (None, s)) for s in range(r + 1)]


def term_product(a: TermKey, b: TermKey) -> List[Tuple[complex, TermKey]]:
    """Product of two basis terms as a scalar combination of basis terms."""
    (p, j), (q, k) = a, b
    if p is None and q is None:
        return [(1.0, (None, j + k))]
    if p is None:
        return term_product(b, a)
    if q is None:
        # (u-p)^(-j) * u^k with u^k = sum_i C(k,i) p^(k-i) (u-p)^i
        out: List[Tuple[complex, TermKey]] = []
        for i in range(k + 1):
            w = comb(k, i) * p ** (k - i)
            if i < j:
                out.append((w, (p, j - i)))
            else:
                out.extend((w * w2, key) for w2, key in _expand_shifted_power(p, i - j))
        return out
    if p == q:
        return [(1.0, (p, j + k))]
    d = p - q
    out = []
    for a_ in range(1, j + 1):
        w = (-1) ** (j - a_) * comb(k + j - a_ - 1, j - a_) * d ** (-(k + j - a_))
        out.append((w, (p, a_)))
    for b_ in range(1, k + 1):
        w = (-1) ** (k - b_) * comb(j + k - b_ - 1, k - b_) * (-d) ** (-(j + k - b_))
        out.append((w, (q, b_)))
    return out


def term_derivative(key: TermKey) -> List[Tuple[complex, TermKey]]:
    p, k = key
    if p is None:
        return [] if k == 0 else [(float(k), (None, k - 1))]
    return [(-float(k), (p, k + 1))]


def term_value(key: TermKey, u: complex) -> complex:
    p, k = key
    if p is None:
        return u ** k
    return (u - p) ** (-k)


class PartialFractionSum:
    """
    Linear combination of partial-fraction terms with coefficients in a ring.

    Subclasses fix the coefficient ring through ``_coeff_product``,
    ``_is_negligible`` and ``_zero``.
    """

    def __init__(self, terms: Optional[Mapping[TermKey, Any]] = None):
        self.terms: Dict[TermKey, Any] = {}
        for key, c in (terms or {}).items():
            self._accumulate(key, c)
        self._prune()

    # -- coefficient ring hooks --------------------------------------
    @staticmethod
    def _coeff_product(a: Any, b: Any) -> Any:
        return a * b

    @staticmethod
    def _is_negligible(c: Any) -> bool:
        return abs(c) == 0

    def _new(self, terms: Mapping[TermKey, Any]) -> "PartialFractionSum":
        obj = self.__class__.__new__(self.__class__)
        PartialFractionSum.__init__(obj, terms)
        self._copy_attrs(obj)
        return obj

    def _copy_attrs(self, obj: "PartialFractionSum") -> None:
        pass

    # -- canonical form ----------------------------------------------
    def _canonical_pole(self, p: complex) -> complex:
        for q, _ in self.terms:
            if q is None:
                continue
            if q == p:
                return q
            if abs(q - p) < POLE_DEDUP_TOL * max(1.0, abs(q)):
                raise PoleCollision(f"poles {q} and {p} are closer than {POLE_DEDUP_TOL}")
        return p

    def _accumulate(self, key: TermKey, c: Any) -> None:
        p, k = key
        if p is not None:
            p = complex(p)
            key = (self._canonical_pole(p), k)
        if key in self.terms:
            self.terms[key] = self.terms[key] + c
        else:
            self.terms[key] = c

    def _prune(self) -> None:
        for key in [k for k, c in self.terms.items() if self._is_negligible(c)]:
            del self.terms[key]

    # -- structure -----------------------------------------------------
    @property
    def poles(self) -> List[Tuple[complex, int]]:
        """Distinct pole locations with their multiplicities, in insertion order."""
        mult: Dict[complex, int] = {}
        for p, k in self.terms:
            if p is not None:
                mult[p] = max(mult.get(p, 0), k)
        return list(mult.items())

    def polynomial_degree(self) -> int:
        degs = [k for p, k in self.terms if p is None]
        return max(degs) if degs else -1

    def sorted_terms(self) -> List[Tuple[TermKey, Any]]:
        def order(item):
            (p, k), _ = item
            if p is None:
                return (0, 0.0, 0.0, k)
            return (1, p.real, p.imag, k)
        return sorted(self.terms.items(), key=order)

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other: "PartialFractionSum") -> "PartialFractionSum":
        out = self._new(self.terms)
        for key, c in other.terms.items():
            out._accumulate(key, c)
        out._prune()
        return out

    def __neg__(self) -> "PartialFractionSum":
        return self._new({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "PartialFractionSum") -> "PartialFractionSum":
        return self + (-other)

    def scale(self, w: complex) -> "PartialFractionSum":
        return self._new({k: w * c for k, c in self.terms.items()})

    def __mul__(self, other: Any) -> "PartialFractionSum":
        if not isinstance(other, PartialFractionSum):
            return self.scale(other)
        out = self._new({})
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                prod = self._coeff_product(ca, cb)
                for w, key in term_product(ka, kb):
                    out._accumulate(key, w * prod)
        out._prune()
        return out

    def __rmul__(self, w: Any) -> "PartialFractionSum":
        return self.scale(w)

    def derivative(self, order: int = 1) -> "PartialFractionSum":
        current = self
        for _ in range(order):
            out = current._new({})
            for key, c in current.terms.items():
                for w, k2 in term_derivative(key):
                    out._accumulate(k2, w * c)
            out._prune()
            current = out
        return current

    def is_zero(self) -> bool:
        return not self.terms

    def _check_point(self, u: complex) -> None:
        for p, _ in self.poles:
            if abs(u - p) <= POLE_EVAL_TOL:
                raise PoleEvaluation(f"evaluation point {u} is within {POLE_EVAL_TOL} of pole {p}")

    def evaluate(self, u: complex) -> Any:
        self._check_point(u)
        total = None
        for key, c in self.terms.items():
            contrib = term_value(key, u) * c
            total = contrib if total is None else total + contrib
        return self._zero() if total is None else total

    def _zero(self) -> Any:
        return 0j

    def series_coefficient(self, j: int) -> Any:
        """Coefficient of u^(-j) (j >= 1) in the expansion at infinity."""
        total = None
        for (p, k), c in self.terms.items():
            if p is None or k > j:
                continue
            contrib = (comb(j - 1, k - 1) * p ** (j - k)) * c
            total = contrib if total is None else total + contrib
        return self._zero() if total is None else total


# ----------------------------------------------------------------------
# Scalar rational functions
# ----------------------------------------------------------------------
class RationalFn(PartialFractionSum):
    """Scalar rational function in partial-fraction form."""

    def _prune(self) -> None:
        scale = max((abs(c) for c in self.terms.values()), default=0.0)
        for key in [k for k, c in self.terms.items() if abs(c) <= PRUNE_REL * scale]:
            del self.terms[key]

    def __call__(self, u: complex) -> complex:
        return complex(self.evaluate(u))

    @classmethod
    def constant(cls, c: complex) -> "RationalFn":
        return cls({(None, 0): complex(c)})

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "RationalFn":
        return cls({(None, k): c for k, c in enumerate(p.coeffs)})

    @classmethod
    def simple_poles(cls, residues: Iterable[Tuple[complex, complex]]) -> "RationalFn":
        """sum_r c_r / (u - p_r); repeated locations add up."""
        out = cls({})
        for p, c in residues:
            out._accumulate((p, 1), complex(c))
        out._prune()
        return out

    @classmethod
    def from_numer_poles(cls, numer: Polynomial, poles: Sequence[Tuple[complex, int]]) -> "RationalFn":
        """numer / prod (u - p)^m converted to partial fractions."""
        locs = [complex(p) for p, _ in poles]
        for a, b in itertools.combinations(locs, 2):
            if abs(a - b) <= POLE_DEDUP_TOL * max(1.0, abs(a)):
                raise PoleCollision(f"poles {a} and {b} are closer than {POLE_DEDUP_TOL}")
        denom = np.array([1.0 + 0j])
        for p, m in poles:
            for _ in range(m):
                denom = npoly.polymul(denom, [-p, 1.0])
        num = numer.as_array() if not numer.is_zero() else np.zeros(1, dtype=complex)
        quot, rem = npoly.polydiv(num, denom) if len(num) >= len(denom) else (np.zeros(1), num)
        terms: Dict[TermKey, complex] = {(None, k): complex(c) for k, c in enumerate(np.atleast_1d(quot))}
        for idx, (p, m) in enumerate(poles):
            other = np.array([1.0 + 0j])
            for jdx, (q, mq) in enumerate(poles):
                if jdx != idx:
                    for _ in range(mq):
                        other = npoly.polymul(other, [-q, 1.0])
            r_shift = _taylor_shift(np.atleast_1d(rem), p, m)
            o_shift = _taylor_shift(other, p, m)
            g = _series_divide(r_shift, o_shift, m)
            for k in range(1, m + 1):
                terms[(complex(p), k)] = complex(g[m - k])
        return cls(terms)

    @property
    def polynomial_part(self) -> Polynomial:
        deg = self.polynomial_degree()
        return Polynomial(tuple(self.terms.get((None, k), 0j) for k in range(deg + 1)))

    @property
    def numer(self) -> Polynomial:
        """Numerator over prod (u - p)^m for the stored pole set."""
        poles = self.poles
        def factor(skip: Optional[complex] = None, power: int = 0) -> Polynomial:
            out = Polynomial((1.0,))
            for p, m in poles:
                e = power if p == skip else m
                for _ in range(e):
                    out = out * Polynomial((-p, 1.0))
            return out
        total = self.polynomial_part * factor()
        for (p, k), c in self.terms.items():
            if p is None:
                continue
            m = dict(poles)[p]
            total = total + factor(skip=p, power=m - k) * c
        return total


def _taylor_shift(coeffs: np.ndarray, p: complex, order: int) -> np.ndarray:
    """First `order` Taylor coefficients of the polynomial at u = p."""
    out = np.zeros(order, dtype=complex)
    current = np.array(coeffs, dtype=complex)
    for k in range(order):
        if current.size == 0:
            break
        out[k] = npoly.polyval(p, current) / factorial(k)
        current = npoly.polyder(current) if current.size > 1 else np.zeros(0, dtype=complex)
    return out


def _series_divide(num: np.ndarray, den: np.ndarray, order: int) -> np.ndarray:
    g = np.zeros(order, dtype=complex)
    for i in range(order):
        acc = num[i] - sum(g[j] * den[i - j] for j in range(i))
        g[i] = acc / den[0]
    return g


def ratfn_arith(a: RationalFn, b: Optional[RationalFn], op: str, point: Optional[complex] = None):
    """
    Field operations on rational functions in partial-fraction form.

    op is one of ``add``, ``mul``, ``derivative`` (of a) or ``eval`` (a at point).
    """
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "derivative":
        return a.derivative()
    if op == "eval":
        return a(point)
    raise ValueError(f"unknown rational-function operation {op!r}")
