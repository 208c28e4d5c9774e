# gaudin/processors/roundtrip_processor.py
import logging
from typing import Any, Dict, List

import numpy as np

from gaudin.core.config import RunConfig
from gaudin.core.errors import GaudinError
from gaudin.model.schubert import iota_theta_error, random_nice_space, theta_iota_error
from gaudin.processors.base import EXIT_CHECK, EXIT_COUNT, EXIT_OK, BaseProcessor, Result
from gaudin.utils.serialization import poly_space_to_json

logger = logging.getLogger(__name__)

DEFAULT_COUNT = 20


class RoundtripProcessor(BaseProcessor):
    """theta o iota on solved orbits and iota o theta on random nice points of the cell."""

    name = "roundtrip"

    def process(self, run: RunConfig) -> Result:
        lam = self.partition(run)
        tol = run.tolerances.check_tol
        z = run.resolve_z()
        orbits, report = self.solve(run, z)

        forward: List[Any] = []
        for T in orbits:
            try:
                forward.append(theta_iota_error(T))
            except GaudinError as e:
                logger.error("theta(iota(T)) failed: %s", e)
                forward.append(None)

        rng = np.random.default_rng(run.seed)
        backward: List[Dict[str, Any]] = []
        for _ in range(run.extras.get("count") or DEFAULT_COUNT):
            X = random_nice_space(lam, rng)
            try:
                err = iota_theta_error(X)
            except GaudinError as e:
                logger.error("iota(theta(X)) failed: %s", e)
                err = None
            backward.append({"X": poly_space_to_json(X), "error": err})

        errors = forward + [b["error"] for b in backward]
        passed = all(e is not None and e < tol for e in errors)
        body = {
            "theta_iota": forward,
            "iota_theta": backward,
            "report": self.solve_section(report),
            "passed": passed,
        }
        if not passed:
            return self.envelope(run, z, body), EXIT_CHECK
        return self.envelope(run, z, body), EXIT_COUNT if report.count_mismatch else EXIT_OK
