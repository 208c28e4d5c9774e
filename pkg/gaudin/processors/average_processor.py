# gaudin/processors/average_processor.py
import logging
from typing import Any, Dict

from gaudin.core.config import RunConfig
from gaudin.model.averaging import SymPolyF, boundedness_probe, collision_path, polynomiality_check, v_F
from gaudin.processors.base import EXIT_CHECK, EXIT_OK, BaseProcessor, Result
from gaudin.utils.serialization import (
    interpolation_report_to_json,
    probe_report_to_json,
    tensor_vector_to_json,
)

logger = logging.getLogger(__name__)

DEFAULT_PROBE_STEPS = 8


class AverageProcessor(BaseProcessor):
    """v_F at z, a polynomial fit of v_F in z and a probe toward a collision of two sites."""

    name = "average"

    def process(self, run: RunConfig) -> Result:
        lam = self.partition(run)
        F = SymPolyF.parse(run.extras.get("F") or "1")
        z = run.resolve_z()
        common: Dict[str, Any] = {"budget": run.budget, "tolerances": run.tolerances, "threads": run.threads}

        value = v_F(lam, F, z, run.seed, **common)
        fit = polynomiality_check(lam, F, F.quasi_degree + lam.degree_shift, run.seed, **common)
        body: Dict[str, Any] = {
            "F": F.describe(),
            "v_F": tensor_vector_to_json(value),
            "polynomiality": interpolation_report_to_json(fit),
        }
        passed = fit.passed
        if lam.n >= 2:
            steps = run.extras.get("steps") or DEFAULT_PROBE_STEPS
            probe = boundedness_probe(lam, F, collision_path(z, 0, 1), steps, seed=run.seed, **common)
            body["probe"] = probe_report_to_json(probe)
            passed = passed and (probe.bounded or probe.shrinking)
        body["passed"] = passed
        if not passed:
            logger.warning("averaging checks failed for %s, F=%s", lam.parts, F.describe())
            return self.envelope(run, z, body), EXIT_CHECK
        return self.envelope(run, z, body), EXIT_OK
