# gaudin/processors/base.py
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

from gaudin.core.config import RunConfig, get_config_summary, parse_complex
from gaudin.core.errors import ConfigError
from gaudin.model.master import CriticalPointT, SolveReport, solve_bae
from gaudin.model.tensor_space import Partition
from gaudin.utils.serialization import critical_point_to_json, solve_report_to_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COUNT = 2
EXIT_CHECK = 3

DEFAULT_SAMPLES_U = (10.0 + 0j, 4.0 + 3.0j, -3.5 + 6.5j)

Result = Tuple[Dict[str, Any], int]


class BaseProcessor:
    """Shared plumbing for the command processors: solving, sample parsing and the report envelope."""

    name = "base"

    def __init__(self, config: Dict[str, Any]):
        self.config = config

    def process(self, run: RunConfig) -> Result:
        raise NotImplementedError

    def get_processor_info(self) -> Dict[str, Any]:
        return {"name": self.name, "description": (self.__doc__ or "").strip()}

    @staticmethod
    def partition(run: RunConfig) -> Partition:
        try:
            return Partition.of(run.lam, run.N)
        except ValueError as e:
            raise ConfigError(str(e)) from e

    def solve(self, run: RunConfig, z: Sequence[complex]) -> Tuple[List[CriticalPointT], SolveReport]:
        lam = self.partition(run)
        logger.info("solving Bethe equations for %s at seed %d", lam.parts, run.seed)
        return solve_bae(lam, z, run.seed, run.budget, run.tolerances, run.threads)

    @staticmethod
    def samples_u(run: RunConfig) -> List[complex]:
        spec: Optional[str] = run.extras.get("u")
        if not spec:
            return list(DEFAULT_SAMPLES_U)
        return [parse_complex(part) for part in spec.split(",") if part.strip()]

    @staticmethod
    def orbits_json(orbits: Sequence[CriticalPointT]) -> List[Dict[str, Any]]:
        return [critical_point_to_json(T) for T in orbits]

    def envelope(self, run: RunConfig, z: Optional[Sequence[complex]], body: Dict[str, Any]) -> Dict[str, Any]:
        """Header shared by every report: the command, the run and environment settings, and z when there is one."""
        report = {"command": self.name, "config": run.summary(), "environment": get_config_summary(self.config)}
        if z is not None:
            report["z"] = [complex(x) for x in z]
        report.update(body)
        return report

    @staticmethod
    def solve_section(report: SolveReport) -> Dict[str, Any]:
        return solve_report_to_json(report)
