# tests/test_processors.py
from unittest.mock import patch

import pytest

from gaudin.core.config import RunConfig, Tolerances, get_default_config
from gaudin.core.errors import CheckFailure, ConfigError, CountMismatch, SingularWronskian
from gaudin.model.master import SolveReport
from gaudin.processors import EXIT_CHECK, EXIT_COUNT, EXIT_OK, EXIT_USAGE, ProcessorRouter


@pytest.fixture
def router():
    """Router over the default configuration"""
    r = ProcessorRouter(get_default_config())
    r.initialize_processors()
    return r


def run_for(command, lam=(1, 1), z=(0j, 2 + 0j), **extras):
    return RunConfig(command=command, lam=lam, N=len(lam), z=z, extras=extras)


class TestProcessorRouter:
    """Test suite for ProcessorRouter"""

    def test_initialization(self, router):
        """Test that every command has a processor"""
        assert router._initialized
        assert set(router.processors) == {"solve", "verify", "average", "chars", "roundtrip"}
        info = router.get_processor_info()
        assert info["available_processors"] == list(router.processors)
        assert info["solve"]["name"] == "solve"
        assert "error" in router.get_processor_info("nope")

    def test_unknown_command(self, router):
        """Test that an unknown command is a usage error"""
        report, code = router.route_request(run_for("bogus"))
        assert code == EXIT_USAGE
        assert "solve" in report["supported_commands"]

    def test_exit_codes(self):
        """Test the mapping from errors to exit codes"""
        assert ProcessorRouter.exit_code_for(ConfigError("x")) == EXIT_USAGE
        assert ProcessorRouter.exit_code_for(CountMismatch(1, 2)) == EXIT_COUNT
        assert ProcessorRouter.exit_code_for(CheckFailure("x")) == EXIT_CHECK
        assert ProcessorRouter.exit_code_for(SingularWronskian("x")) == EXIT_CHECK

    def test_count_mismatch_report(self, router):
        """Test that a CountMismatch becomes exit 2 with found/expected"""
        with patch.object(router.processors["average"], "process", side_effect=CountMismatch(1, 2)):
            report, code = router.route_request(run_for("average"))
        assert code == EXIT_COUNT
        assert report["found"] == 1 and report["expected"] == 2
        assert report["error_type"] == "CountMismatch"

    def test_check_failure_report(self, router):
        """Test that a CheckFailure becomes exit 3 with passed = False"""
        with patch.object(router.processors["verify"], "process", side_effect=CheckFailure("bad")):
            report, code = router.route_request(run_for("verify"))
        assert code == EXIT_CHECK
        assert report["passed"] is False
        assert report["config"]["lambda"] == [1, 1]


class TestProcessors:
    """Test suite for the individual command processors"""

    def test_solve(self, router):
        """Test the solve report for lambda=(1,1) at z=(0,2)"""
        report, code = router.route_request(run_for("solve"))
        assert code == EXIT_OK
        assert report["command"] == "solve"
        assert report["environment"]["dedup_tol"] == 1e-6
        assert len(report["orbits"]) == 1
        t = report["orbits"][0]["t"]["1"][0]
        assert t[0] == pytest.approx(1) and t[1] == pytest.approx(0, abs=1e-12)
        assert report["report"]["found"] == report["report"]["expected"] == 1

    def test_solve_count_warning(self, router):
        """Test exit 2 when the solver comes back short"""
        short = SolveReport(lam=(2, 2), z=(0j, 1 + 0j, 3 + 0j, 7 + 0j), seed=0, expected=2, found=1)
        with patch("gaudin.processors.base.solve_bae", return_value=([], short)):
            report, code = router.route_request(run_for("solve", lam=(2, 2), z=short.z))
        assert code == EXIT_COUNT
        assert report["report"]["count_mismatch"] is True

    def test_verify(self, router):
        """Test that every identity passes at the closed-form point"""
        report, code = router.route_request(run_for("verify"))
        assert code == EXIT_OK, report["checks"]
        assert report["passed"]
        assert set(report["checks"]) == {"singular", "eigen", "norm", "orthogonality",
                                         "roundtrip_theta_iota", "intertwining"}

    def test_verify_perturbed(self, router):
        """Test that a shifted Bethe root fails the identity suite"""
        report, code = router.route_request(run_for("verify", perturb=0.01))
        assert code == EXIT_CHECK
        assert not report["checks"]["singular"]["passed"]
        assert not report["checks"]["eigen"]["passed"]

    def test_chars_sweep(self, router):
        """Test the character sweep over small partitions"""
        run = RunConfig(command="chars", lam=(0,), N=1, truncation=12, extras={"max_size": 4, "max_N": 2})
        report, code = router.route_request(run)
        assert code == EXIT_OK
        assert report["passed"]
        assert [1, 1] in [row["lambda"] for row in report["characters"]]
        assert all(isinstance(c, int) for c in report["characters"][0]["char_O"])
        assert [r["expected"] for r in report["schur_weyl"]] == [1, 2, 4, 8, 16]
        assert all(r["match"] for r in report["schur_weyl"])

    def test_average(self, router):
        """Test v_1 for lambda=(1,1) with its fit and probe"""
        report, code = router.route_request(run_for("average", steps=4))
        assert code == EXIT_OK
        entries = {tuple(e["J"]): e["c"] for e in report["v_F"]["entries"]}
        assert entries[(2, 1)][0] == pytest.approx(0.5)
        assert report["polynomiality"]["passed"]
        assert report["probe"]["complete"] and report["probe"]["shrinking"]

    def test_average_bad_F(self, router):
        """Test that an unparsable F is a usage error"""
        report, code = router.route_request(run_for("average", F="s1_q"))
        assert code == EXIT_USAGE
        assert report["error_type"] == "ConfigError"

    def test_roundtrip(self, router):
        """Test both round trips for lambda=(1,1)"""
        run = RunConfig(command="roundtrip", lam=(1, 1), N=2, z=(0j, 2 + 0j), tolerances=Tolerances(check_tol=1e-6),
                        extras={"count": 3})
        report, code = router.route_request(run)
        assert code == EXIT_OK
        assert len(report["iota_theta"]) == 3
        assert report["theta_iota"][0] < 1e-8
