# gaudin/processors/verify_processor.py
import logging
from typing import Any, Callable, Dict, List, Optional, Sequence

from gaudin.core.config import RunConfig
from gaudin.core.errors import ConfigError, GaudinError
from gaudin.model.averaging import SymPolyF, intertwining_check
from gaudin.model.bethe import build_universal_operator, eigen_residual
from gaudin.model.master import CriticalPointT
from gaudin.model.schubert import d_T, theta_iota_error
from gaudin.model.tensor_space import raising_residual
from gaudin.model.weightfn import bethe_vector, norm_hessian_check, normalized_pairings
from gaudin.processors.base import EXIT_CHECK, EXIT_COUNT, EXIT_OK, BaseProcessor, Result
from gaudin.utils.serialization import critical_point_from_json, read_json

logger = logging.getLogger(__name__)

INTERTWINING_TOL = 1e-7


class VerifyProcessor(BaseProcessor):
    """
    Identity suite on solved orbits: singular vectors, eigenvalues of the
    Bethe algebra, norm against Hessian, orthogonality, theta o iota and the
    intertwining identity.
    """

    name = "verify"

    def _load_orbits(self, run: RunConfig, path: str) -> List[CriticalPointT]:
        data = read_json(path)
        items = data.get("orbits") if isinstance(data, dict) else data
        if not items:
            raise ConfigError(f"{path} holds no critical points")
        orbits = [critical_point_from_json(item) for item in items]
        lam = self.partition(run)
        for T in orbits:
            if T.partition != lam:
                raise ConfigError(f"point in {path} has weight {T.partition.parts}, expected {lam.parts}")
        logger.info("loaded %d critical points from %s", len(orbits), path)
        return orbits

    @staticmethod
    def _check(results: Dict[str, Any], name: str, threshold: float, fn: Callable[[], Sequence[float]]) -> None:
        entry: Dict[str, Any] = {"threshold": threshold}
        try:
            residuals = [float(r) for r in fn()]
            worst = max(residuals, default=0.0)
            entry.update(residuals=residuals, max_residual=worst, passed=worst < threshold)
        except GaudinError as e:
            logger.error("check %s raised: %s", name, e)
            entry.update(residuals=[], max_residual=None, passed=False, error=str(e))
        if not entry["passed"]:
            logger.warning("check %s failed (max residual %s)", name, entry["max_residual"])
        results[name] = entry

    def process(self, run: RunConfig) -> Result:
        path: Optional[str] = run.extras.get("input")
        mismatch = False
        solve_json = None
        if path:
            orbits = self._load_orbits(run, path)
            z = orbits[0].z
        else:
            z = run.resolve_z()
            orbits, report = self.solve(run, z)
            mismatch = report.count_mismatch
            solve_json = self.solve_section(report)

        eps = run.extras.get("perturb")
        if eps:
            logger.info("shifting every Bethe root by %s", eps)
            orbits = [T.with_flat(T.flat_t + complex(eps)) for T in orbits]

        lam = self.partition(run)
        tol = run.tolerances.check_tol
        samples = self.samples_u(run)
        vectors = [bethe_vector(T, check=False, threads=run.threads) for T in orbits]
        results: Dict[str, Any] = {}

        def eigen() -> List[float]:
            D = build_universal_operator(lam.N, z)
            return [eigen_residual(D, v, d_T(T), samples) for T, v in zip(orbits, vectors)]

        self._check(results, "singular", tol, lambda: [raising_residual(v) for v in vectors])
        self._check(results, "eigen", tol, eigen)
        self._check(results, "norm", tol, lambda: [norm_hessian_check(T)[2] for T in orbits])
        self._check(results, "orthogonality", tol, lambda: [r for _, _, r in normalized_pairings(orbits)])
        self._check(results, "roundtrip_theta_iota", tol, lambda: [theta_iota_error(T) for T in orbits])
        self._check(results, "intertwining", max(tol, INTERTWINING_TOL),
                    lambda: [intertwining_check(lam, SymPolyF.constant(1.0), z, samples, run.seed, orbits=orbits,
                                                tolerances=run.tolerances, threads=run.threads)])

        passed = all(entry["passed"] for entry in results.values())
        body: Dict[str, Any] = {"checks": results, "passed": passed, "samples_u": samples,
                                "orbits": self.orbits_json(orbits), "perturb": eps}
        if solve_json is not None:
            body["report"] = solve_json
        if not passed:
            return self.envelope(run, z, body), EXIT_CHECK
        return self.envelope(run, z, body), EXIT_COUNT if mismatch else EXIT_OK
