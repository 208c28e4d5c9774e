"""
Configuration for the command-line front end and the numeric library.
Settings come from environment variables (optionally a .env file); a single
CLI invocation is described by a RunConfig.
"""
import os
import logging
from typing import Dict, Any, Optional, List, Tuple
from dotenv import load_dotenv
from dataclasses import dataclass, field, asdict
from pythonjsonlogger import jsonlogger

from gaudin.core.errors import ConfigError

# Set up logging
logger = logging.getLogger(__name__)

COMMANDS = ("solve", "verify", "average", "chars", "roundtrip")


# ----------------------------------------------------------------------
# Configuration dataclass
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class Tolerances:
    """Numeric thresholds used by the solver and the identity checks."""
    newton_tol: float = 1e-10
    dedup_tol: float = 1e-6
    hess_floor: float = 1e-8
    check_tol: float = 1e-8


@dataclass(frozen=True)
class SolverBudget:
    """How hard solve_bae tries before reporting a count mismatch."""
    starts_multiplier: int = 50
    retries: int = 3
    max_iter: int = 200


# ----------------------------------------------------------------------
# Logging helper
# ----------------------------------------------------------------------
def setup_logging(cfg: dict) -> None:
    """
    Configure root logging based on configuration dict.
    Handles console level, JSON or text format and an optional log file.
    """
    verbose = cfg.get("VERBOSE", False)
    show_info = cfg.get("SHOW_INFO", False)

    if cfg.get("LOG_LEVEL"):
        level = getattr(logging, str(cfg["LOG_LEVEL"]).upper(), logging.WARNING)
    elif verbose:
        level = logging.DEBUG
    elif show_info:
        level = logging.INFO
    else:
        level = logging.WARNING

    text_format = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    if cfg.get("LOG_FORMAT") == "json":
        formatter = jsonlogger.JsonFormatter('%(asctime)s %(name)s %(levelname)s %(message)s')
    else:
        formatter = logging.Formatter(text_format)

    root = logging.getLogger()
    root.setLevel(level)
    if not any(getattr(h, "_gaudin_console", False) for h in root.handlers):
        console = logging.StreamHandler()
        console._gaudin_console = True  # type: ignore[attr-defined]
        root.addHandler(console)
    for handler in root.handlers:
        if getattr(handler, "_gaudin_console", False):
            handler.setFormatter(formatter)

    log_path = cfg.get("LOG_FILE")
    if log_path:
        abs_path = os.path.abspath(log_path)
        if not any(isinstance(h, logging.FileHandler) and h.baseFilename == abs_path
                   for h in root.handlers):
            fh = logging.FileHandler(abs_path, encoding="utf-8")
            fh.setFormatter(formatter)
            root.addHandler(fh)


def _read_number(cfg: Dict[str, Any], key: str, env_key: str, default: str, cast) -> None:
    value = os.getenv(env_key, default)
    try:
        cfg[key] = cast(value)
    except (ValueError, TypeError):
        logger.warning("Invalid %s value (%s), using default %s", env_key, value, default)
        cfg[key] = cast(default)


def load_config(env_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Load environment variables from a .env file and return configuration dict.

    Args:
        env_path (str, optional): Path to .env file. If None, looks for .env in current directory.

    Returns:
        dict: Configuration dictionary with the following keys:
            - GAUDIN_THREADS: worker cap for parallel maps
            - NEWTON_TOL / DEDUP_TOL / HESS_FLOOR / CHECK_TOL: tolerance set
            - STARTS_MULTIPLIER / RETRIES: solver budget
            - TRUNCATION: q-series order
            - LOG_LEVEL / LOG_FORMAT / LOG_FILE / VERBOSE / SHOW_INFO: logging
    """
    try:
        if env_path:
            if os.path.exists(env_path):
                load_dotenv(env_path)
                logger.info(f"Loaded environment from {env_path}")
            else:
                logger.warning(f"Environment file {env_path} not found, using default locations")
        else:
            load_dotenv()

        cfg: Dict[str, Any] = {}
        _read_number(cfg, "GAUDIN_THREADS", "GAUDIN_THREADS", "1", int)
        _read_number(cfg, "NEWTON_TOL", "GAUDIN_NEWTON_TOL", "1e-10", float)
        _read_number(cfg, "DEDUP_TOL", "GAUDIN_DEDUP_TOL", "1e-6", float)
        _read_number(cfg, "HESS_FLOOR", "GAUDIN_HESS_FLOOR", "1e-8", float)
        _read_number(cfg, "CHECK_TOL", "GAUDIN_CHECK_TOL", "1e-8", float)
        _read_number(cfg, "STARTS_MULTIPLIER", "GAUDIN_STARTS_MULTIPLIER", "50", int)
        _read_number(cfg, "RETRIES", "GAUDIN_RETRIES", "3", int)
        _read_number(cfg, "TRUNCATION", "GAUDIN_TRUNCATION", "30", int)

        # Logging Configuration
        cfg["LOG_LEVEL"] = os.getenv("LOG_LEVEL")
        cfg["LOG_FORMAT"] = os.getenv("LOG_FORMAT", "text").strip().lower()
        cfg["LOG_FILE"] = os.getenv("LOG_FILE")
        cfg["VERBOSE"] = os.getenv("VERBOSE", "false").lower() == "true"
        cfg["SHOW_INFO"] = os.getenv("SHOW_INFO", "false").lower() == "true"

        logger.debug(f"Configuration: {cfg}")
        return cfg

    except Exception as e:
        logger.error(f"Error loading configuration: {e}")
        return get_default_config()


def get_default_config() -> Dict[str, Any]:
    """
    Get default configuration as fallback.

    Returns:
        dict: Default configuration values
    """
    return {
        "GAUDIN_THREADS": 1,
        "NEWTON_TOL": 1e-10,
        "DEDUP_TOL": 1e-6,
        "HESS_FLOOR": 1e-8,
        "CHECK_TOL": 1e-8,
        "STARTS_MULTIPLIER": 50,
        "RETRIES": 3,
        "TRUNCATION": 30,
        "LOG_LEVEL": None,
        "LOG_FORMAT": "text",
        "LOG_FILE": None,
        "VERBOSE": False,
        "SHOW_INFO": False,
    }


def validate_config(cfg: Dict[str, Any]) -> bool:
    """
    Validate configuration values.

    Args:
        cfg (dict): Configuration dictionary to validate

    Returns:
        bool: True if configuration is valid, False otherwise
    """
    for key in ("NEWTON_TOL", "DEDUP_TOL", "HESS_FLOOR", "CHECK_TOL"):
        if not cfg.get(key, 0) > 0:
            logger.error("%s must be positive", key)
            return False
    if cfg.get("GAUDIN_THREADS", 0) < 1:
        logger.error("GAUDIN_THREADS must be at least 1")
        return False
    if cfg.get("STARTS_MULTIPLIER", 0) < 1 or cfg.get("RETRIES", -1) < 0:
        logger.error("STARTS_MULTIPLIER must be >= 1 and RETRIES >= 0")
        return False
    if not 0 <= cfg.get("TRUNCATION", -1) <= 64:
        logger.error("TRUNCATION must lie in 0..64")
        return False
    if cfg.get("LOG_FORMAT", "text") not in ("text", "json"):
        logger.error("LOG_FORMAT must be 'text' or 'json'")
        return False
    return True


def get_config_summary(cfg: Dict[str, Any]) -> Dict[str, Any]:
    """Subset of the configuration embedded in every report."""
    return {
        "threads": cfg.get("GAUDIN_THREADS"),
        "newton_tol": cfg.get("NEWTON_TOL"),
        "dedup_tol": cfg.get("DEDUP_TOL"),
        "hess_floor": cfg.get("HESS_FLOOR"),
        "check_tol": cfg.get("CHECK_TOL"),
        "starts_multiplier": cfg.get("STARTS_MULTIPLIER"),
        "retries": cfg.get("RETRIES"),
        "truncation": cfg.get("TRUNCATION"),
    }


# ----------------------------------------------------------------------
# Per-invocation configuration
# ----------------------------------------------------------------------
def parse_complex(text: str) -> complex:
    """Parse `re+imj` Python syntax (spaces ignored)."""
    cleaned = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(cleaned)
    except ValueError as e:
        raise ConfigError(f"cannot parse complex number {text!r}") from e


def parse_int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as e:
        raise ConfigError(f"cannot parse integer list {text!r}") from e


@dataclass
class RunConfig:
    """One CLI invocation."""
    command: str
    lam: Tuple[int, ...]
    N: int
    z: Optional[Tuple[complex, ...]] = None
    z_seed: Optional[int] = None
    seed: int = 0
    tolerances: Tolerances = field(default_factory=Tolerances)
    budget: SolverBudget = field(default_factory=SolverBudget)
    truncation: int = 30
    output: Optional[str] = None
    threads: int = 1
    extras: Dict[str, Any] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return sum(self.lam)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.N < 1 or len(self.lam) > self.N:
            raise ConfigError(f"partition {self.lam} has more than N={self.N} parts")
        if any(p < 0 for p in self.lam) or any(a < b for a, b in zip(self.lam, self.lam[1:])):
            raise ConfigError(f"{self.lam} is not a partition")
        tol = self.tolerances
        if min(tol.newton_tol, tol.dedup_tol, tol.hess_floor, tol.check_tol) <= 0:
            raise ConfigError("tolerances must be positive")
        if self.z is not None and len(self.z) != self.n and self.command != "chars":
            raise ConfigError(f"|lambda| = {self.n} but {len(self.z)} points z were given")
        if not 0 <= self.truncation <= 64:
            raise ConfigError("truncation order must lie in 0..64")

    def resolve_z(self) -> Tuple[complex, ...]:
        """Explicit z, or a reproducible random point from the `random:<seed>` form."""
        if self.z is not None:
            return self.z
        import numpy as np
        rng = np.random.default_rng(self.z_seed if self.z_seed is not None else self.seed)
        pts = rng.normal(size=self.n) + 1j * rng.normal(size=self.n)
        return tuple(complex(p) for p in 2.0 * pts)

    def summary(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "lambda": list(self.lam),
            "N": self.N,
            "seed": self.seed,
            "tolerances": asdict(self.tolerances),
            "budget": asdict(self.budget),
            "truncation": self.truncation,
        }


def build_run_config(args: Any, cfg: Dict[str, Any]) -> RunConfig:
    """
    Merge parsed CLI arguments over the environment configuration.

    Raises:
        ConfigError: on malformed values or inconsistent sizes.
    """
    lam = tuple(parse_int_list(getattr(args, "lam", None) or ""))
    N = getattr(args, "N", None) or max(len(lam), 1)
    lam = lam + (0,) * max(N - len(lam), 0)

    z: Optional[Tuple[complex, ...]] = None
    z_seed: Optional[int] = None
    z_spec = getattr(args, "z", None)
    if z_spec:
        if z_spec.startswith("random"):
            _, _, seed_text = z_spec.partition(":")
            z_seed = int(seed_text) if seed_text else None
        else:
            z = tuple(parse_complex(part) for part in z_spec.split(","))

    def pick(name: str, key: str):
        value = getattr(args, name, None)
        return cfg[key] if value is None else value

    tolerances = Tolerances(
        newton_tol=pick("newton_tol", "NEWTON_TOL"),
        dedup_tol=pick("dedup_tol", "DEDUP_TOL"),
        hess_floor=pick("hess_floor", "HESS_FLOOR"),
        check_tol=pick("check_tol", "CHECK_TOL"),
    )
    budget = SolverBudget(
        starts_multiplier=pick("starts_multiplier", "STARTS_MULTIPLIER"),
        retries=pick("retries", "RETRIES"),
    )
    extras = {
        key: getattr(args, key)
        for key in ("F", "u", "input", "count", "perturb", "max_size", "max_N", "steps")
        if getattr(args, key, None) is not None
    }
    run = RunConfig(
        command=args.command,
        lam=lam,
        N=N,
        z=z,
        z_seed=z_seed,
        seed=getattr(args, "seed", 0) or 0,
        tolerances=tolerances,
        budget=budget,
        truncation=pick("K", "TRUNCATION"),
        output=getattr(args, "output", None),
        threads=cfg.get("GAUDIN_THREADS", 1),
        extras=extras,
    )
    run.validate()
    return run
