# gaudin/processors/__init__.py

from .processor_router import ProcessorRouter
from .base import EXIT_CHECK, EXIT_COUNT, EXIT_OK, EXIT_USAGE

# This allows: from gaudin.processors import ProcessorRouter
