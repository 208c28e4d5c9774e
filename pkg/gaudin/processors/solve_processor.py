# gaudin/processors/solve_processor.py
import logging

from gaudin.core.config import RunConfig
from gaudin.processors.base import EXIT_COUNT, EXIT_OK, BaseProcessor, Result

logger = logging.getLogger(__name__)


class SolveProcessor(BaseProcessor):
    """Critical orbits of the master function at z, one representative each."""

    name = "solve"

    def process(self, run: RunConfig) -> Result:
        z = run.resolve_z()
        orbits, report = self.solve(run, z)
        body = {"orbits": self.orbits_json(orbits), "report": self.solve_section(report)}
        if report.count_mismatch:
            logger.warning("solve found %d of %d orbits", report.found, report.expected)
            return self.envelope(run, z, body), EXIT_COUNT
        return self.envelope(run, z, body), EXIT_OK
