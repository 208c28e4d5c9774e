# gaudin/processors/processor_router.py
import logging
from typing import Any, Dict, Optional

from gaudin.core.config import RunConfig
from gaudin.core.errors import CheckFailure, ConfigError, CountMismatch, GaudinError
from gaudin.processors.base import EXIT_CHECK, EXIT_COUNT, EXIT_USAGE, Result

logger = logging.getLogger(__name__)


class ProcessorRouter:
    def __init__(self, config: Dict[str, Any]):
        self.config = config
        self.processors: Dict[str, Any] = {}
        self._initialized = False

    def initialize_processors(self) -> None:
        """Lazy initialization of processors"""
        if self._initialized:
            return

        from gaudin.processors.average_processor import AverageProcessor
        from gaudin.processors.chars_processor import CharsProcessor
        from gaudin.processors.roundtrip_processor import RoundtripProcessor
        from gaudin.processors.solve_processor import SolveProcessor
        from gaudin.processors.verify_processor import VerifyProcessor

        self.processors = {
            p.name: p
            for p in (
                SolveProcessor(self.config),
                VerifyProcessor(self.config),
                AverageProcessor(self.config),
                CharsProcessor(self.config),
                RoundtripProcessor(self.config),
            )
        }
        self._initialized = True
        logger.info("ProcessorRouter initialized with processors: %s", list(self.processors.keys()))

    @staticmethod
    def exit_code_for(error: GaudinError) -> int:
        """Exit-code contract: 1 usage, 2 solver count warning, 3 everything else."""
        if isinstance(error, ConfigError):
            return EXIT_USAGE
        if isinstance(error, CountMismatch):
            return EXIT_COUNT
        return EXIT_CHECK

    def route_request(self, run: RunConfig) -> Result:
        """Run the processor for run.command and return (report, exit code)."""
        if not self._initialized:
            self.initialize_processors()

        processor = self.processors.get(run.command)
        if not processor:
            logger.error("Processor not found: %s. Available: %s", run.command, list(self.processors.keys()))
            return {"error": f"unknown command: {run.command}", "supported_commands": list(self.processors)}, EXIT_USAGE

        try:
            logger.info("Routing to %s", run.command)
            return processor.process(run)
        except GaudinError as e:
            code = self.exit_code_for(e)
            logger.error("Processor %s failed: %s", run.command, e)
            report: Dict[str, Any] = {
                "command": run.command,
                "config": run.summary(),
                "error": str(e),
                "error_type": type(e).__name__,
            }
            if isinstance(e, CountMismatch):
                report.update(found=e.found, expected=e.expected)
            if isinstance(e, CheckFailure):
                report["passed"] = False
            return report, code

    def get_processor_info(self, processor_name: Optional[str] = None) -> Dict[str, Any]:
        """Get information about processors"""
        if not self._initialized:
            self.initialize_processors()

        if processor_name:
            processor = self.processors.get(processor_name)
            if processor:
                return processor.get_processor_info()
            return {"error": f"Processor {processor_name} not found"}

        info: Dict[str, Any] = {"available_processors": list(self.processors.keys())}
        for name, processor in self.processors.items():
            info[name] = processor.get_processor_info()
        return info
