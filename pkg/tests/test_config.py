# tests/test_config.py
import argparse
import json
import logging

import pytest

from gaudin.core.config import (
    RunConfig,
    Tolerances,
    build_run_config,
    get_config_summary,
    get_default_config,
    load_config,
    parse_complex,
    parse_int_list,
    setup_logging,
    validate_config,
)
from gaudin.core.errors import ConfigError


def make_args(**overrides):
    """Namespace shaped like the parsed CLI arguments"""
    values = {"command": "solve", "lam": "2,2", "N": None, "z": "0,1,3,7", "seed": 42, "output": None,
              "newton_tol": None, "dedup_tol": None, "hess_floor": None, "check_tol": None,
              "starts_multiplier": None, "retries": None, "K": None}
    values.update(overrides)
    return argparse.Namespace(**values)


class TestLoadConfig:
    """Test suite for environment configuration"""

    def test_defaults(self, monkeypatch):
        """Test values when no GAUDIN_* variables are set"""
        for key in ("GAUDIN_NEWTON_TOL", "GAUDIN_RETRIES", "GAUDIN_TRUNCATION", "LOG_FORMAT"):
            monkeypatch.delenv(key, raising=False)
        cfg = load_config()
        assert cfg["GAUDIN_THREADS"] == 1
        assert cfg["NEWTON_TOL"] == 1e-10
        assert cfg["RETRIES"] == 3
        assert cfg["TRUNCATION"] == 30
        assert cfg["LOG_FORMAT"] == "text"
        assert validate_config(cfg)

    def test_environment_overrides(self, monkeypatch):
        """Test that GAUDIN_* variables are read and cast"""
        monkeypatch.setenv("GAUDIN_THREADS", "4")
        monkeypatch.setenv("GAUDIN_CHECK_TOL", "1e-6")
        monkeypatch.setenv("LOG_FORMAT", "JSON")
        cfg = load_config()
        assert cfg["GAUDIN_THREADS"] == 4
        assert cfg["CHECK_TOL"] == 1e-6
        assert cfg["LOG_FORMAT"] == "json"

    def test_invalid_number_falls_back(self, monkeypatch):
        """Test that an unparsable value is replaced by its default"""
        monkeypatch.setenv("GAUDIN_RETRIES", "many")
        assert load_config()["RETRIES"] == 3

    def test_env_file(self, monkeypatch, tmp_path):
        """Test loading settings from a .env file"""
        # registered so teardown removes what dotenv writes
        monkeypatch.setenv("GAUDIN_STARTS_MULTIPLIER", "50")
        monkeypatch.delenv("GAUDIN_STARTS_MULTIPLIER")
        env = tmp_path / ".env"
        env.write_text("GAUDIN_STARTS_MULTIPLIER=7\n")
        assert load_config(str(env))["STARTS_MULTIPLIER"] == 7

    def test_validate_config(self):
        """Test rejection of non-positive tolerances and bad formats"""
        cfg = get_default_config()
        assert validate_config(cfg)
        assert not validate_config({**cfg, "HESS_FLOOR": 0})
        assert not validate_config({**cfg, "GAUDIN_THREADS": 0})
        assert not validate_config({**cfg, "TRUNCATION": 65})
        assert not validate_config({**cfg, "LOG_FORMAT": "xml"})

    def test_summary(self):
        """Test the report subset of the configuration"""
        summary = get_config_summary(get_default_config())
        assert summary["dedup_tol"] == 1e-6
        assert summary["starts_multiplier"] == 50


class TestParsing:
    """Test suite for CLI value parsers"""

    def test_parse_complex(self):
        """Test Python syntax and the i suffix"""
        assert parse_complex("1+2j") == 1 + 2j
        assert parse_complex(" -3.5 + 6.5i ") == -3.5 + 6.5j
        assert parse_complex("7") == 7

    def test_parse_complex_error(self):
        """Test that garbage is refused"""
        with pytest.raises(ConfigError):
            parse_complex("one")

    def test_parse_int_list(self):
        """Test comma separated partitions"""
        assert parse_int_list("2,1,1") == [2, 1, 1]
        assert parse_int_list("") == []
        with pytest.raises(ConfigError):
            parse_int_list("2,x")


class TestRunConfig:
    """Test suite for per-invocation configuration"""

    def test_build(self):
        """Test merging CLI arguments over the environment"""
        run = build_run_config(make_args(check_tol=1e-6), get_default_config())
        assert run.lam == (2, 2)
        assert run.N == 2
        assert run.z == (0, 1, 3, 7)
        assert run.seed == 42
        assert run.tolerances == Tolerances(check_tol=1e-6)
        assert run.budget.retries == 3
        assert run.truncation == 30

    def test_padding_to_N(self):
        """Test that --N pads the partition with zeros"""
        run = build_run_config(make_args(lam="2", N=3, z="0,1"), get_default_config())
        assert run.lam == (2, 0, 0)

    def test_random_z(self):
        """Test that random:<seed> gives a reproducible point"""
        run = build_run_config(make_args(z="random:3"), get_default_config())
        assert run.z is None and run.z_seed == 3
        first = run.resolve_z()
        assert len(first) == 4
        assert first == run.resolve_z()

    def test_extras(self):
        """Test that subcommand options ride along in extras"""
        run = build_run_config(make_args(command="average", F="s1_1", steps=4), get_default_config())
        assert run.extras == {"F": "s1_1", "steps": 4}

    def test_size_mismatch(self):
        """Test that |lambda| must match the number of points"""
        with pytest.raises(ConfigError):
            build_run_config(make_args(z="0,1"), get_default_config())

    def test_not_a_partition(self):
        """Test that increasing parts are refused"""
        with pytest.raises(ConfigError):
            build_run_config(make_args(lam="1,2", z="0,1,2"), get_default_config())

    def test_validate(self):
        """Test command, rank and tolerance validation"""
        with pytest.raises(ConfigError):
            RunConfig(command="bogus", lam=(1, 1), N=2).validate()
        with pytest.raises(ConfigError):
            RunConfig(command="solve", lam=(1, 1, 1), N=2).validate()
        with pytest.raises(ConfigError):
            RunConfig(command="solve", lam=(1, 1), N=2, tolerances=Tolerances(newton_tol=0)).validate()
        with pytest.raises(ConfigError):
            RunConfig(command="chars", lam=(1, 1), N=2, truncation=100).validate()

    def test_summary(self):
        """Test the configuration block of a report"""
        summary = RunConfig(command="solve", lam=(1, 1), N=2, seed=5).summary()
        assert summary["lambda"] == [1, 1]
        assert summary["seed"] == 5
        assert summary["tolerances"]["newton_tol"] == 1e-10


class TestLogging:
    """Test suite for logging setup"""

    def test_json_format(self):
        """Test that LOG_FORMAT=json formats records as JSON objects"""
        setup_logging({**get_default_config(), "LOG_LEVEL": "INFO", "LOG_FORMAT": "json"})
        root = logging.getLogger()
        assert root.level == logging.INFO
        console = next(h for h in root.handlers if getattr(h, "_gaudin_console", False))
        record = logging.LogRecord("gaudin.test", logging.INFO, __file__, 1, "solver finished", None, None)
        data = json.loads(console.formatter.format(record))
        assert data["message"] == "solver finished"
        assert data["levelname"] == "INFO"
        setup_logging(get_default_config())

    def test_log_file(self, tmp_path):
        """Test that LOG_FILE adds a file handler"""
        path = tmp_path / "gaudin.log"
        setup_logging({**get_default_config(), "LOG_LEVEL": "WARNING", "LOG_FILE": str(path)})
        logging.getLogger("gaudin.test").warning("count mismatch")
        root = logging.getLogger()
        for handler in list(root.handlers):
            if isinstance(handler, logging.FileHandler):
                handler.flush()
                root.removeHandler(handler)
                handler.close()
        assert "count mismatch" in path.read_text()
        setup_logging(get_default_config())
