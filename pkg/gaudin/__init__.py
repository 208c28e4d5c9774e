import logging
from typing import Any, Dict, Optional

from gaudin.core.config import load_config, setup_logging, validate_config
from gaudin.core.errors import ConfigError


def create_app(env_path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None):
    """
    Load settings (this also loads the .env file), configure logging and
    build the processor router the CLI dispatches through.
    """
    config = load_config(env_path)
    if overrides:
        config.update(overrides)

    setup_logging(config)
    if not validate_config(config):
        raise ConfigError("invalid environment configuration")

    from gaudin.processors.processor_router import ProcessorRouter
    processor_router = ProcessorRouter(config)
    processor_router.initialize_processors()

    logger = logging.getLogger(__name__)
    logger.info("Processor router initialized: %s", processor_router._initialized)
    logger.info("Available processors: %s", list(processor_router.processors.keys()))
    return processor_router
