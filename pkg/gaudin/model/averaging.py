"""
Bethe vector averaging maps.

For a symmetric function F of the Bethe roots,

    v_F(z) = sum over critical orbits of F(T) omega(T) / Hess(T),

one representative per orbit (every point of an orbit contributes the same
term, which cancels the 1 / (l_1! ... l_(N-1)!) prefactor of the full sum).
v_F is a polynomial in z of degree deg F + s_lambda; the checks below witness
that together with its pairing and intertwining identities.
"""
import itertools
import logging
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from gaudin.core.config import SolverBudget, Tolerances
from gaudin.core.errors import CheckFailure, ConfigError, CountMismatch, GaudinError
from gaudin.model.bethe import apply_Bi, build_universal_operator, series_coefficients
from gaudin.model.master import CriticalPointT, SigmaPoint, hessian, solve_bae, to_sigma
from gaudin.model.schubert import d_T
from gaudin.model.tensor_space import (
    Partition,
    TensorVector,
    admissible_indices,
    raising_residual,
    shapovalov,
)
from gaudin.model.weightfn import bethe_vector
from gaudin.utils.parallel import ordered_map, spawn_seeds

logger = logging.getLogger(__name__)

SINGULAR_TOL = 1e-8
RESIDUAL_PASS = 1e-6
ENERGY_PASS = 1e-8

# ((a, i), exponent) pairs sorted by (a, i)
Monomial = Tuple[Tuple[Tuple[int, int], int], ...]


class SymPolyF:
    """Polynomial in the coordinates sigma^(a)_i, with deg sigma^(a)_i = i."""

    def __init__(self, terms: Optional[Mapping[Monomial, complex]] = None):
        self.terms: Dict[Monomial, complex] = {m: complex(c) for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def constant(cls, c: complex) -> "SymPolyF":
        return cls({(): c})

    @classmethod
    def sigma(cls, a: int, i: int) -> "SymPolyF":
        return cls({(((a, i), 1),): 1.0})

    @classmethod
    def parse(cls, text: str) -> "SymPolyF":
        """
        Sum of products such as ``1``, ``s1_1``, ``2*s1_1^2 - s0_2``.

        Raises:
            ConfigError: on malformed input.
        """
        cleaned = text.replace(" ", "")
        if not cleaned:
            raise ConfigError("empty F specification")
        out = cls()
        for term in re.sub(r"(?<=[^eE*^])-", "+-", cleaned).split("+"):
            if not term:
                continue
            sign = -1.0 if term.startswith("-") else 1.0
            value = cls.constant(sign)
            for factor in term.lstrip("-").split("*"):
                m = re.fullmatch(r"s(\d+)_(\d+)(?:\^(\d+))?", factor)
                if m:
                    power = int(m.group(3) or 1)
                    for _ in range(power):
                        value = value * cls.sigma(int(m.group(1)), int(m.group(2)))
                    continue
                try:
                    value = value * complex(factor.replace("i", "j"))
                except ValueError as e:
                    raise ConfigError(f"cannot parse factor {factor!r} of F") from e
            out = out + value
        return out

    @staticmethod
    def _merge(a: Monomial, b: Monomial) -> Monomial:
        powers: Dict[Tuple[int, int], int] = dict(a)
        for var, e in b:
            powers[var] = powers.get(var, 0) + e
        return tuple(sorted(powers.items()))

    def __add__(self, other: "SymPolyF") -> "SymPolyF":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0j) + c
        return SymPolyF(out)

    def __neg__(self) -> "SymPolyF":
        return SymPolyF({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "SymPolyF") -> "SymPolyF":
        return self + (-other)

    def __mul__(self, other: Union["SymPolyF", complex]) -> "SymPolyF":
        if not isinstance(other, SymPolyF):
            return SymPolyF({m: complex(other) * c for m, c in self.terms.items()})
        out: Dict[Monomial, complex] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                key = self._merge(ma, mb)
                out[key] = out.get(key, 0j) + ca * cb
        return SymPolyF(out)

    __rmul__ = __mul__

    @property
    def quasi_degree(self) -> int:
        return max((sum(i * e for (_, i), e in m) for m in self.terms), default=0)

    def is_quasi_homogeneous(self) -> bool:
        return len({sum(i * e for (_, i), e in m) for m in self.terms}) <= 1

    def _sigma(self, point: Union[CriticalPointT, SigmaPoint]) -> SigmaPoint:
        return point if isinstance(point, SigmaPoint) else to_sigma(point)

    def __call__(self, point: Union[CriticalPointT, SigmaPoint]) -> complex:
        sig = self._sigma(point)
        return complex(sum(c * np.prod([sig.value(a, i) ** e for (a, i), e in m]) for m, c in self.terms.items()))

    def magnitude(self, point: Union[CriticalPointT, SigmaPoint]) -> float:
        """sum |c| |monomial| (scale of the evaluation, for relative checks)."""
        sig = self._sigma(point)
        return float(sum(abs(c) * np.prod([abs(sig.value(a, i)) ** e for (a, i), e in m])
                         for m, c in self.terms.items()))

    def describe(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items()):
            vars_ = "*".join(f"s{a}_{i}" + (f"^{e}" if e > 1 else "") for (a, i), e in m)
            parts.append(f"({c.real:g}{c.imag:+g}j)" + (f"*{vars_}" if vars_ else ""))
        return " + ".join(parts)


FLike = Union[SymPolyF, Callable[[CriticalPointT], complex]]


# ----------------------------------------------------------------------
# The averaging map
# ----------------------------------------------------------------------
def _combine(orbits: Sequence[CriticalPointT], values: Sequence[complex], hess_floor: float) -> TensorVector:
    first = orbits[0]
    total = TensorVector(first.N, first.n)
    for T, value in zip(orbits, values):
        h = T.hess if T.hess is not None else hessian(T)
        if abs(h) <= hess_floor:
            raise CheckFailure(f"degenerate critical point (|Hess| = {abs(h):.3e})")
        total = total + bethe_vector(T) * (value / h)
    rr = raising_residual(total)
    if rr > SINGULAR_TOL:
        logger.error("averaged vector is not singular (residual %.3e)", rr)
        raise CheckFailure(f"raising residual {rr:.3e} exceeds {SINGULAR_TOL}")
    return total


def average(orbits: Sequence[CriticalPointT], F: FLike, hess_floor: float = 1e-8) -> TensorVector:
    """sum over the given orbit representatives of F(T) omega(T) / Hess(T)."""
    return _combine(orbits, [F(T) for T in orbits], hess_floor)


def solve_orbits(lam: Partition, z: Sequence[complex], seed: int, budget: SolverBudget,
                 tolerances: Tolerances, threads: Optional[int]) -> List[CriticalPointT]:
    """solve_bae that refuses to return an incomplete orbit list."""
    orbits, report = solve_bae(lam, z, seed, budget, tolerances, threads)
    if report.count_mismatch:
        raise CountMismatch(report.found, report.expected)
    return orbits


def v_F(lam: Partition, F: FLike, z: Sequence[complex], seed: int = 0, *,
        orbits: Optional[Sequence[CriticalPointT]] = None,
        budget: SolverBudget = SolverBudget(), tolerances: Tolerances = Tolerances(),
        threads: Optional[int] = None) -> TensorVector:
    """
    Bethe vector averaging map at z.

    Raises:
        CountMismatch: if the solver does not find every orbit.
    """
    if orbits is None:
        orbits = solve_orbits(lam, z, seed, budget, tolerances, threads)
    return average(orbits, F, tolerances.hess_floor)


# ----------------------------------------------------------------------
# Polynomiality
# ----------------------------------------------------------------------
@dataclass
class InterpolationReport:
    lam: Tuple[int, ...]
    F: str
    declared_degree: int
    coefficients: Dict[str, List[Tuple[Tuple[int, ...], complex]]] = field(default_factory=dict)
    heldout_residual: float = float("nan")
    above_degree_energy: float = float("nan")
    samples_used: int = 0
    heldout_used: int = 0
    dropped: int = 0

    @property
    def passed(self) -> bool:
        return self.heldout_residual < RESIDUAL_PASS and self.above_degree_energy < ENERGY_PASS


def monomial_exponents(n: int, degree: int) -> List[Tuple[int, ...]]:
    """Exponent vectors of total degree <= degree, ordered by degree then lexicographically."""
    out = []
    for total in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(n), total):
            exps = [0] * n
            for var in combo:
                exps[var] += 1
            out.append(tuple(exps))
    return out


def _design(zs: np.ndarray, exps: Sequence[Tuple[int, ...]]) -> np.ndarray:
    G = np.ones((zs.shape[0], len(exps)), dtype=complex)
    for k, e in enumerate(exps):
        for var, power in enumerate(e):
            if power:
                G[:, k] *= zs[:, var] ** power
    return G


def polynomiality_check(lam: Partition, F: SymPolyF, degree_cap: int, grid_seed: int, *,
                        heldout: int = 20, budget: SolverBudget = SolverBudget(),
                        tolerances: Tolerances = Tolerances(),
                        threads: Optional[int] = None) -> InterpolationReport:
    """
    Fit every coordinate of v_F by a polynomial in z of the declared degree and
    validate on held-out points; a fit one degree higher measures the energy
    above the declared degree.
    """
    degree = F.quasi_degree + lam.degree_shift
    if degree_cap < degree:
        raise ConfigError(f"degree cap {degree_cap} is below the declared degree {degree}")
    n = lam.n
    exps_fit = monomial_exponents(n, degree)
    exps_wide = monomial_exponents(n, degree + 1)
    n_fit = 2 * len(exps_wide)
    indices = admissible_indices(lam)
    report = InterpolationReport(lam=lam.parts, F=F.describe(), declared_degree=degree)

    def sample(child: np.random.SeedSequence):
        rng = np.random.default_rng(child)
        z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        try:
            v = v_F(lam, F, z, int(child.generate_state(1)[0]), budget=budget, tolerances=tolerances, threads=1)
        except GaudinError as e:
            logger.info("dropping sample point: %s", e)
            return None
        return z, np.array([v.coefficient(J) for J in indices])

    results = ordered_map(sample, spawn_seeds(grid_seed, n_fit + heldout), max_workers=threads)
    fit = [r for r in results[:n_fit] if r is not None]
    test = [r for r in results[n_fit:] if r is not None]
    report.dropped = len(results) - len(fit) - len(test)
    report.samples_used, report.heldout_used = len(fit), len(test)
    if len(fit) < len(exps_wide) or not test:
        logger.error("too few usable samples (%d fit, %d held out)", len(fit), len(test))
        return report

    Zf = np.array([z for z, _ in fit])
    Yf = np.array([y for _, y in fit])
    coef, *_ = np.linalg.lstsq(_design(Zf, exps_fit), Yf, rcond=None)

    Zt = np.array([z for z, _ in test])
    Yt = np.array([y for _, y in test])
    pred = _design(Zt, exps_fit) @ coef
    err = np.linalg.norm(pred - Yt, axis=1) / np.maximum(np.linalg.norm(Yt, axis=1), 1e-300)
    report.heldout_residual = float(err.max())

    wide, *_ = np.linalg.lstsq(_design(Zf, exps_wide), Yf, rcond=None)
    top = np.array([sum(e) == degree + 1 for e in exps_wide])
    total = float(np.sum(np.abs(wide) ** 2))
    report.above_degree_energy = float(np.sum(np.abs(wide[top]) ** 2) / total) if total > 0 else 0.0

    cutoff = 1e-10 * max(float(np.abs(coef).max()), 1e-300)
    for col, J in enumerate(indices):
        report.coefficients["".join(map(str, J))] = [
            (exps_fit[k], complex(coef[k, col])) for k in range(len(exps_fit)) if abs(coef[k, col]) > cutoff
        ]
    logger.info("polynomiality for %s, F=%s: residual %.3e, energy %.3e",
                lam.parts, report.F, report.heldout_residual, report.above_degree_energy)
    return report


# ----------------------------------------------------------------------
# Identities
# ----------------------------------------------------------------------
def f_v_pairing(lam: Partition, F: FLike, z: Sequence[complex], orbit_index: int, seed: int = 0, *,
                orbits: Optional[Sequence[CriticalPointT]] = None,
                budget: SolverBudget = SolverBudget(), tolerances: Tolerances = Tolerances(),
                threads: Optional[int] = None) -> Tuple[complex, complex, float]:
    """S(v_F(z), omega(T)) against F(T) at one orbit."""
    if orbits is None:
        orbits = solve_orbits(lam, z, seed, budget, tolerances, threads)
    if not 0 <= orbit_index < len(orbits):
        raise IndexError(f"orbit index {orbit_index} out of range 0..{len(orbits) - 1}")
    v = average(orbits, F, tolerances.hess_floor)
    T = orbits[orbit_index]
    value = shapovalov(v, bethe_vector(T))
    expected = F(T)
    denom = max(abs(value), abs(expected))
    return value, expected, float(abs(value - expected) / denom) if denom > 0 else 0.0


def intertwining_check(lam: Partition, G: FLike, z: Sequence[complex], samples_u: Sequence[complex],
                       seed: int = 0, *, orbits: Optional[Sequence[CriticalPointT]] = None,
                       budget: SolverBudget = SolverBudget(), tolerances: Tolerances = Tolerances(),
                       threads: Optional[int] = None) -> float:
    """
    max over u and i of |v_{F_iu G}(z) - B_i(u) v_G(z)| / |v_G(z)|, where
    F_iu(T) is the coefficient b_i(u) of d_T(T).
    """
    if orbits is None:
        orbits = solve_orbits(lam, z, seed, budget, tolerances, threads)
    D = build_universal_operator(lam.N, z)
    ops = [d_T(T) for T in orbits]
    g_values = [G(T) for T in orbits]
    vG = _combine(orbits, g_values, tolerances.hess_floor)
    norm = max(vG.norm(), 1e-300)
    worst = 0.0
    for u in samples_u:
        for i in range(1, lam.N + 1):
            lhs = _combine(orbits, [op.coefficient_at(i, u) * g for op, g in zip(ops, g_values)],
                           tolerances.hess_floor)
            rhs = apply_Bi(D, i, u, vG)
            worst = max(worst, (lhs - rhs).norm() / norm)
    return worst


def intertwining_series_check(lam: Partition, G: FLike, z: Sequence[complex], i: int, j_max: int,
                              seed: int = 0, *, orbits: Optional[Sequence[CriticalPointT]] = None,
                              budget: SolverBudget = SolverBudget(), tolerances: Tolerances = Tolerances(),
                              threads: Optional[int] = None) -> float:
    """The same identity coefficient by coefficient in u^(-j), j = i..j_max."""
    if orbits is None:
        orbits = solve_orbits(lam, z, seed, budget, tolerances, threads)
    D = build_universal_operator(lam.N, z)
    g_values = [G(T) for T in orbits]
    series = [d_T(T).series_coefficients(i, j_max) for T in orbits]
    vG = _combine(orbits, g_values, tolerances.hess_floor)
    dense = vG.to_dense()
    scale = max(float(np.abs(np.asarray(z)).max()), 1.0)
    worst = 0.0
    for k, Bij in enumerate(series_coefficients(D, i, j_max)):
        lhs = _combine(orbits, [s[k] * g for s, g in zip(series, g_values)], tolerances.hess_floor)
        rhs = TensorVector.from_dense(vG.N, vG.n, Bij @ dense)
        worst = max(worst, (lhs - rhs).norm() / (max(vG.norm(), 1e-300) * scale ** k))
    return worst


def ideal_check(lam: Partition, z: Sequence[complex], seed: int = 0, *,
                orbits: Optional[Sequence[CriticalPointT]] = None,
                budget: SolverBudget = SolverBudget(), tolerances: Tolerances = Tolerances(),
                threads: Optional[int] = None) -> float:
    """
    |v_F(z)| for F = prod over orbits (sigma^(a)_1 - value), which vanishes on
    every critical orbit; relative to the scale of the individual terms.
    """
    if orbits is None:
        orbits = solve_orbits(lam, z, seed, budget, tolerances, threads)
    sizes = lam.level_sizes
    level = next((a for a in range(1, lam.N) if sizes[a] > 0), 0)
    F = SymPolyF.constant(1.0)
    for T in orbits:
        F = F * (SymPolyF.sigma(level, 1) - SymPolyF.constant(to_sigma(T).value(level, 1)))
    v = average(orbits, F, tolerances.hess_floor)
    scale = sum(F.magnitude(T) * bethe_vector(T).norm() / abs(T.hess if T.hess is not None else hessian(T))
                for T in orbits)
    return v.norm() / max(scale, 1e-300)


def homogeneity_check(lam: Partition, F: SymPolyF, z: Sequence[complex], c: complex, seed: int = 0, *,
                      budget: SolverBudget = SolverBudget(), tolerances: Tolerances = Tolerances(),
                      threads: Optional[int] = None) -> float:
    """|v_F(cz) - c^(deg F + s_lambda) v_F(z)| relative to the scaled value."""
    degree = F.quasi_degree + lam.degree_shift
    base = v_F(lam, F, z, seed, budget=budget, tolerances=tolerances, threads=threads)
    scaled = v_F(lam, F, [c * x for x in z], seed, budget=budget, tolerances=tolerances, threads=threads)
    expected = base * (c ** degree)
    return (scaled - expected).norm() / max(expected.norm(), 1e-300)


def lowest_degree_check(lam: Partition, z: Sequence[complex], c: complex, seed: int = 0, **kwargs: Any) -> float:
    """v_1 is homogeneous of degree s_lambda."""
    return homogeneity_check(lam, SymPolyF.constant(1.0), z, c, seed, **kwargs)


# ----------------------------------------------------------------------
# Near collisions
# ----------------------------------------------------------------------
@dataclass
class ProbeReport:
    s_values: List[float] = field(default_factory=list)
    norms: List[float] = field(default_factory=list)
    failures: List[float] = field(default_factory=list)

    @property
    def max_norm(self) -> float:
        return max(self.norms, default=0.0)

    @property
    def median_norm(self) -> float:
        return float(np.median(self.norms)) if self.norms else 0.0

    @property
    def complete(self) -> bool:
        """Every s on the grid was solved."""
        return bool(self.norms) and not self.failures

    @property
    def bounded(self) -> bool:
        """Complete, with max norm < 10 x median."""
        return self.complete and self.max_norm < 10.0 * self.median_norm

    @property
    def shrinking(self) -> bool:
        """Complete, and the norm never grows on the way to the collision."""
        return self.complete and all(b <= a * (1.0 + 1e-9) for a, b in zip(self.norms, self.norms[1:]))

    @property
    def monotone_blowup(self) -> bool:
        """Norms increase at every step toward the collision and grow tenfold overall."""
        if len(self.norms) < 3:
            return False
        rising = all(b > a for a, b in zip(self.norms, self.norms[1:]))
        return rising and self.norms[-1] > 10.0 * max(self.norms[0], 1e-300)


def collision_path(z0: Sequence[complex], i: int, j: int) -> Callable[[float], List[complex]]:
    """z(s) with z_j moved to z_i + s (z0_j - z0_i); z(1) = z0 and z(0) collides."""
    z0 = [complex(x) for x in z0]

    def path(s: float) -> List[complex]:
        z = list(z0)
        z[j] = z0[i] + s * (z0[j] - z0[i])
        return z
    return path


def boundedness_probe(lam: Partition, F: SymPolyF, path: Callable[[float], Sequence[complex]], steps: int,
                      s_min: float = 1e-3, s_max: float = 1.0, seed: int = 0, *,
                      budget: SolverBudget = SolverBudget(), tolerances: Tolerances = Tolerances(),
                      threads: Optional[int] = None) -> ProbeReport:
    """|v_F(z(s))| on a geometric grid from s_max down to s_min; failures are recorded, not raised."""
    report = ProbeReport()
    for s in np.geomspace(s_max, s_min, steps):
        try:
            v = v_F(lam, F, path(float(s)), seed, budget=budget, tolerances=tolerances, threads=threads)
        except GaudinError as e:
            logger.warning("probe point s=%.3e failed: %s", s, e)
            report.failures.append(float(s))
            continue
        report.s_values.append(float(s))
        report.norms.append(v.norm())
    return report
