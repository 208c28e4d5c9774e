"""
Master function, Bethe ansatz equations and their Newton solver.

A point T = (z, t) has levels t^(0) = z, t^(1), ..., t^(N-1) of sizes
l_0 = n, l_1, ..., l_(N-1); the level t^(N) is empty. The unknowns are the
coordinates of levels 1..N-1, flattened level by level.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from gaudin.algebra.poly import Polynomial, elem_symmetric, roots, wronskian
from gaudin.core.config import SolverBudget, Tolerances
from gaudin.core.errors import CoincidentCoordinates, CountMismatch, NonConvergence
from gaudin.model.bethe import check_sites
from gaudin.model.tensor_space import Partition, singular_dim
from gaudin.utils.parallel import ordered_map

logger = logging.getLogger(__name__)

COORD_GAP = 1e-8
CHUNK = 32


@dataclass(frozen=True)
class CriticalPointT:
    """Coordinates T = (z, t); solver tags ride along without taking part in equality."""
    z: Tuple[complex, ...]
    t: Tuple[Tuple[complex, ...], ...]
    converged: bool = field(default=False, compare=False)
    hess: Optional[complex] = field(default=None, compare=False)
    nondegenerate: bool = field(default=False, compare=False)
    residual: Optional[float] = field(default=None, compare=False)

    @classmethod
    def of(cls, z: Sequence[complex], t: Sequence[Sequence[complex]]) -> "CriticalPointT":
        return cls(tuple(complex(x) for x in z), tuple(tuple(complex(x) for x in lvl) for lvl in t))

    @property
    def N(self) -> int:
        return len(self.t) + 1

    @property
    def n(self) -> int:
        return len(self.z)

    def level(self, a: int) -> Tuple[complex, ...]:
        if a == 0:
            return self.z
        if 1 <= a < self.N:
            return self.t[a - 1]
        return ()

    @property
    def level_sizes(self) -> Tuple[int, ...]:
        return tuple(len(self.level(a)) for a in range(self.N + 1))

    @property
    def partition(self) -> Partition:
        l = self.level_sizes
        return Partition(tuple(l[b - 1] - l[b] for b in range(1, self.N + 1)))

    @property
    def flat_t(self) -> np.ndarray:
        return np.array([x for lvl in self.t for x in lvl], dtype=complex)

    def with_flat(self, x: Sequence[complex]) -> "CriticalPointT":
        levels, pos = [], 0
        for lvl in self.t:
            levels.append(tuple(complex(v) for v in x[pos:pos + len(lvl)]))
            pos += len(lvl)
        return CriticalPointT(self.z, tuple(levels))

    def canonical(self) -> "CriticalPointT":
        """Same point with every level sorted by (Re, Im)."""
        t = tuple(tuple(sorted(lvl, key=lambda c: (c.real, c.imag))) for lvl in self.t)
        return replace(self, t=t)

    def check_distinct(self, gap: float = COORD_GAP) -> None:
        for a in range(self.N):
            lvl = np.array(self.level(a), dtype=complex)
            if lvl.size > 1:
                diff = np.abs(lvl[:, None] - lvl[None, :])
                np.fill_diagonal(diff, np.inf)
                if diff.min() <= gap:
                    raise CoincidentCoordinates(f"two coordinates of level {a} coincide")
            nxt = np.array(self.level(a + 1), dtype=complex)
            if lvl.size and nxt.size and np.abs(lvl[:, None] - nxt[None, :]).min() <= gap:
                raise CoincidentCoordinates(f"levels {a} and {a + 1} share a coordinate")


@dataclass(frozen=True)
class SigmaPoint:
    """Elementary symmetric functions sigma^(a)_1..sigma^(a)_(l_a) for a = 0..N-1."""
    levels: Tuple[Tuple[complex, ...], ...]

    def value(self, a: int, i: int) -> complex:
        return self.levels[a][i - 1]

    def flat(self, start_level: int = 0) -> np.ndarray:
        return np.array([s for lvl in self.levels[start_level:] for s in lvl], dtype=complex)

    def key(self, decimals: int = 6) -> Tuple[float, ...]:
        out: List[float] = []
        for s in self.flat():
            out.extend((round(s.real, decimals) + 0.0, round(s.imag, decimals) + 0.0))
        return tuple(out)


def to_sigma(T: CriticalPointT) -> SigmaPoint:
    return SigmaPoint(tuple(tuple(elem_symmetric(T.level(a))) for a in range(T.N)))


# ----------------------------------------------------------------------
# Master function and its derivatives
# ----------------------------------------------------------------------
def _arrays(T: CriticalPointT) -> List[np.ndarray]:
    return [np.array(T.level(a), dtype=complex) for a in range(T.N + 1)]


def log_phi(T: CriticalPointT) -> complex:
    """Principal-branch logarithm of the master function."""
    T.check_distinct()
    L = _arrays(T)
    total = 0j
    for a in range(1, T.N):
        x = L[a]
        iu = np.triu_indices(x.size, k=1)
        total += 2 * np.log((x[:, None] - x[None, :])[iu]).sum()
    for a in range(T.N - 1):
        if L[a].size and L[a + 1].size:
            total -= np.log(L[a][:, None] - L[a + 1][None, :]).sum()
    return complex(total)


def _inverse_powers(x: np.ndarray, y: np.ndarray, power: int) -> np.ndarray:
    if x.size == 0 or y.size == 0:
        return np.zeros((x.size, y.size), dtype=complex)
    return (x[:, None] - y[None, :]) ** (-power)


def _same_level(x: np.ndarray, power: int) -> np.ndarray:
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    out = diff ** (-power)
    np.fill_diagonal(out, 0.0)
    return out


def bae_residual(T: CriticalPointT) -> np.ndarray:
    """Negated gradient of log Phi in the t-variables, level by level."""
    T.check_distinct()
    L = _arrays(T)
    parts = []
    for a in range(1, T.N):
        x = L[a]
        r = (_inverse_powers(x, L[a - 1], 1).sum(axis=1)
             - 2 * _same_level(x, 1).sum(axis=1)
             + _inverse_powers(x, L[a + 1], 1).sum(axis=1))
        parts.append(r)
    return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)


def hessian_matrix(T: CriticalPointT) -> np.ndarray:
    """Second derivatives of log Phi in the t-variables."""
    T.check_distinct()
    L = _arrays(T)
    sizes = [L[a].size for a in range(1, T.N)]
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    H = np.zeros((offsets[-1], offsets[-1]), dtype=complex)
    for a in range(1, T.N):
        x = L[a]
        sl = slice(offsets[a - 1], offsets[a])
        same = _same_level(x, 2)
        diag = (_inverse_powers(x, L[a - 1], 2).sum(axis=1)
                - 2 * same.sum(axis=1)
                + _inverse_powers(x, L[a + 1], 2).sum(axis=1))
        H[sl, sl] = 2 * same + np.diag(diag)
        if a + 1 < T.N:
            nsl = slice(offsets[a], offsets[a + 1])
            coupling = -_inverse_powers(x, L[a + 1], 2)
            H[sl, nsl] = coupling
            H[nsl, sl] = coupling.T
    return H


def hessian(T: CriticalPointT) -> complex:
    H = hessian_matrix(T)
    return complex(np.linalg.det(H)) if H.size else 1.0 + 0j


# ----------------------------------------------------------------------
# Solver
# ----------------------------------------------------------------------
TRUST_FACTOR = 10.0
WRONSKI_TOL = 1e-10
MIN_DAMPING = 1e-6


@dataclass
class SolveReport:
    lam: Tuple[int, ...]
    z: Tuple[complex, ...]
    seed: int
    expected: int
    found: int = 0
    starts: int = 0
    converged_starts: int = 0
    cell_starts: int = 0
    attempts: int = 0
    residuals: List[float] = field(default_factory=list)
    hessians: List[complex] = field(default_factory=list)
    nondegenerate: List[bool] = field(default_factory=list)

    @property
    def count_mismatch(self) -> bool:
        return self.found != self.expected


@dataclass(frozen=True)
class _Frame:
    """Start disc around mean(z) and the trust region Newton may not leave."""
    centre: complex
    radius: float
    spread: float

    @classmethod
    def of(cls, z: Sequence[complex]) -> "_Frame":
        arr = np.array(z, dtype=complex)
        centre = complex(arr.mean())
        return cls(centre, 2.0 * float(np.abs(arr).max()), float(np.abs(arr - centre).max()))

    @property
    def trust(self) -> float:
        return TRUST_FACTOR * max(self.radius, self.spread)

    def inside(self, x: np.ndarray) -> bool:
        return bool(np.all(np.isfinite(x))) and float(np.abs(x - self.centre).max(initial=0.0)) <= self.trust


def _newton(base: CriticalPointT, x: np.ndarray, rng: np.random.Generator, frame: _Frame,
            budget: SolverBudget, tol: Tolerances) -> Optional[CriticalPointT]:
    perturbed = False
    for _ in range(budget.max_iter):
        T = base.with_flat(x)
        try:
            r = bae_residual(T)
        except CoincidentCoordinates:
            if perturbed:
                return None
            perturbed = True
            x = x + 1e-3 * frame.spread * (rng.standard_normal(x.size) + 1j * rng.standard_normal(x.size))
            continue
        rn = float(np.abs(r).max())
        if rn <= tol.newton_tol:
            return _polish(T, r, rn)
        try:
            step = np.linalg.solve(hessian_matrix(T), r)
        except np.linalg.LinAlgError:
            return None
        damping = 1.0
        x_new = x + step
        for _ in range(10):
            x_new = x + damping * step
            if frame.inside(x_new):
                try:
                    if float(np.abs(bae_residual(base.with_flat(x_new))).max()) < rn:
                        break
                except CoincidentCoordinates:
                    pass
            damping *= 0.5
        x = x_new
        # trust region
        if not frame.inside(x):
            return None
    return None


def _polish(T: CriticalPointT, r: np.ndarray, rn: float) -> CriticalPointT:
    try:
        x = T.flat_t + np.linalg.solve(hessian_matrix(T), r)
        T2 = T.with_flat(x)
        rn2 = float(np.abs(bae_residual(T2)).max())
        if rn2 < rn:
            return replace(T2, converged=True, residual=rn2)
    except (np.linalg.LinAlgError, CoincidentCoordinates):
        pass
    return replace(T, converged=True, residual=rn)


@dataclass(frozen=True)
class _WronskiTarget:
    """
    The equation Wr(f_1, ..., f_N) = lead * prod (u - w_s) on the cell of lam,
    in the n free flag coefficients, with w = (z - centre) / spread.

    The Wronski map of the cell is proper, so damped descent on this system
    cannot run off to infinity. Roots of the tail Wronskians of a solution are
    a critical point for w.
    """
    lam: Partition
    target: Tuple[complex, ...]
    lead: complex

    @classmethod
    def of(cls, lam: Partition, w: Sequence[complex]) -> "_WronskiTarget":
        lead = wronskian([Polynomial.monomial(d) for d in lam.exponents]).lead
        return cls(lam, tuple(complex(c) for c in npoly.polyfromroots(np.asarray(w, dtype=complex))), lead)

    def basis(self, c: np.ndarray) -> List[Polynomial]:
        arrays = []
        for d in self.lam.exponents:
            a = np.zeros(d + 1, dtype=complex)
            a[d] = 1.0
            arrays.append(a)
        for (i, k), v in zip(self.lam.cell_coordinates, c):
            arrays[i][k] = v
        return [Polynomial(tuple(a)) for a in arrays]

    def system(self, c: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Residual in the coefficients of u^0..u^(n-1) and its Jacobian."""
        n = self.lam.n
        basis = self.basis(c)
        wr = wronskian(basis)
        F = np.array([wr.coefficient(k) / self.lead - self.target[k] for k in range(n)], dtype=complex)
        J = np.empty((n, n), dtype=complex)
        # Wr is linear in each f_i
        for col, (i, k) in enumerate(self.lam.cell_coordinates):
            swapped = list(basis)
            swapped[i] = Polynomial.monomial(k)
            w = wronskian(swapped)
            J[:, col] = [w.coefficient(m) / self.lead for m in range(n)]
        return F, J

    def start(self, rng: np.random.Generator) -> np.ndarray:
        """Free coefficients of polynomials with roots uniform in the disc of radius 2."""
        polys = []
        for d in self.lam.exponents:
            rad = 2.0 * np.sqrt(rng.uniform(size=d))
            ang = rng.uniform(0, 2 * np.pi, size=d)
            polys.append(npoly.polyfromroots(rad * np.exp(1j * ang)) if d else np.ones(1, dtype=complex))
        return np.array([polys[i][k] for i, k in self.lam.cell_coordinates], dtype=complex)

    def newton(self, c: np.ndarray, budget: SolverBudget) -> Optional[np.ndarray]:
        tol = WRONSKI_TOL * max(1.0, max(abs(t) for t in self.target))
        F, J = self.system(c)
        fn = float(np.linalg.norm(F))
        for _ in range(budget.max_iter):
            if float(np.abs(F).max()) <= tol:
                return c
            try:
                step = np.linalg.solve(J, -F)
            except np.linalg.LinAlgError:
                return None
            damping = 1.0
            while True:
                c_new = c + damping * step
                F_new, J_new = self.system(c_new)
                fn_new = float(np.linalg.norm(F_new))
                if np.isfinite(fn_new) and fn_new < (1.0 - 1e-4 * damping) * fn:
                    break
                damping *= 0.5
                if damping < MIN_DAMPING:
                    return None
            c, F, J, fn = c_new, F_new, J_new, fn_new
        return None

    def critical_point(self, base: CriticalPointT, rng: np.random.Generator, frame: _Frame,
                       budget: SolverBudget, tol: Tolerances) -> Optional[CriticalPointT]:
        c = self.newton(self.start(rng), budget)
        if c is None:
            return None
        basis = self.basis(c)
        try:
            flat = [r for a in range(1, self.lam.N) for r in roots(wronskian(basis[a:]))]
        except NonConvergence:
            return None
        x = frame.centre + frame.spread * np.array(flat, dtype=complex)
        return _newton(base, x, rng, frame, budget, tol)


def same_orbit(a: SigmaPoint, b: SigmaPoint, tol: float) -> bool:
    fa, fb = a.flat(1), b.flat(1)
    if fa.size == 0:
        return True
    return bool(np.all(np.abs(fa - fb) <= tol * np.maximum(1.0, np.abs(fa))))


def _random_starts(base: CriticalPointT, frame: _Frame, count: int,
                   seed: Any) -> List[Tuple[np.ndarray, np.random.Generator]]:
    """Uniform points in the disc of radius 2 max|z| around mean(z), one generator per start."""
    size = base.flat_t.size
    starts = []
    for child in np.random.SeedSequence(seed).spawn(count):
        rng = np.random.default_rng(child)
        rad = frame.radius * np.sqrt(rng.uniform(size=size))
        ang = rng.uniform(0, 2 * np.pi, size=size)
        starts.append((frame.centre + rad * np.exp(1j * ang), rng))
    return starts


def solve_bae(lam: Partition, z: Sequence[complex], seed: int = 0,
              budget: SolverBudget = SolverBudget(), tolerances: Tolerances = Tolerances(),
              threads: Optional[int] = None) -> Tuple[List[CriticalPointT], SolveReport]:
    """
    One representative per critical orbit of the master function.

    Each random start first runs Newton on the Bethe equations inside the
    trust region. A start that leaves it is redone on the Wronski equation of
    the cell and its roots are polished by the same Newton. Starts are
    processed in fixed-size chunks so that the result does not depend on the
    worker count; the search stops early once the expected number of orbits
    has been found.
    """
    z = tuple(complex(x) for x in z)
    if len(z) != lam.n:
        raise ValueError(f"|lambda| = {lam.n} but {len(z)} points z were given")
    check_sites(z)
    expected = singular_dim(lam)
    report = SolveReport(lam=lam.parts, z=z, seed=seed, expected=expected)
    base = CriticalPointT(z, tuple((0j,) * l for l in lam.level_sizes[1:-1]))

    if base.flat_t.size == 0:
        T = replace(base, converged=True, hess=1.0 + 0j, nondegenerate=True, residual=0.0)
        report.found, report.attempts = 1, 1
        report.residuals, report.hessians, report.nondegenerate = [0.0], [1.0 + 0j], [True]
        return [T], report

    frame = _Frame.of(z)
    cell = _WronskiTarget.of(lam, [(x - frame.centre) / frame.spread for x in z])
    per_attempt = budget.starts_multiplier * expected * lam.orbit_size
    orbits: List[Tuple[SigmaPoint, CriticalPointT]] = []

    def run(item):
        x0, rng = item
        T = _newton(base, x0, rng, frame, budget, tolerances)
        if T is not None:
            return T, False
        return cell.critical_point(base, rng, frame, budget, tolerances), True

    for attempt in range(budget.retries + 1):
        report.attempts = attempt + 1
        starts = _random_starts(base, frame, per_attempt, [seed, attempt])

        for lo in range(0, len(starts), CHUNK):
            results = ordered_map(run, starts[lo:lo + CHUNK], max_workers=threads)
            report.starts += len(results)
            for T, via_cell in results:
                report.cell_starts += int(via_cell)
                if T is None:
                    continue
                report.converged_starts += 1
                try:
                    T.check_distinct()
                except CoincidentCoordinates:
                    continue
                sig = to_sigma(T)
                if not any(same_orbit(sig, known, tolerances.dedup_tol) for known, _ in orbits):
                    orbits.append((sig, T))
                    logger.debug("new orbit %d after %d starts", len(orbits), report.starts)
            if len(orbits) >= expected:
                break
        logger.info("attempt %d: %d/%d orbits from %d starts (%d redone on the cell)",
                    attempt + 1, len(orbits), expected, report.starts, report.cell_starts)
        if len(orbits) >= expected:
            break

    orbits.sort(key=lambda item: item[0].key())
    reps = []
    for _, T in orbits:
        h = hessian(T)
        reps.append(replace(T.canonical(), converged=True, hess=h,
                            nondegenerate=abs(h) > tolerances.hess_floor, residual=T.residual))
    report.found = len(reps)
    report.residuals = [float(T.residual) for T in reps]
    report.hessians = [T.hess for T in reps]
    report.nondegenerate = [T.nondegenerate for T in reps]
    if report.count_mismatch:
        logger.warning("%s", CountMismatch(report.found, expected))
    return reps, report
