# tests/test_serialization.py
import json

import pytest

from gaudin.core.errors import ConfigError
from gaudin.model.averaging import InterpolationReport
from gaudin.model.master import CriticalPointT
from gaudin.model.schubert import PolySpace
from gaudin.model.tensor_space import Partition, TensorVector
from gaudin.utils.serialization import (
    complex_from_json,
    complex_to_json,
    critical_point_from_json,
    critical_point_to_json,
    dumps_report,
    interpolation_report_to_json,
    poly_space_from_json,
    poly_space_to_json,
    read_json,
    tensor_vector_from_json,
    tensor_vector_to_json,
    write_report,
)


class TestCodecs:
    """Test suite for the JSON codecs"""

    def test_complex(self):
        """Test [re, im] pairs, plain numbers and negative zero"""
        assert complex_to_json(1 - 2j) == [1.0, -2.0]
        assert json.dumps(complex_to_json(complex(-0.0, -0.0))) == "[0.0, 0.0]"
        assert complex_from_json([1, 2]) == 1 + 2j
        assert complex_from_json(3) == 3

    def test_complex_error(self):
        """Test that a malformed pair is refused"""
        with pytest.raises(ConfigError):
            complex_from_json("x")

    def test_critical_point(self):
        """Test the t-levels keyed by level number and dropping solver tags"""
        T = CriticalPointT(((0j), (2 + 0j)), ((1 + 0j,),), converged=True, hess=2 + 0j, nondegenerate=True,
                           residual=0.0)
        data = critical_point_to_json(T)
        assert data["t"] == {"1": [[1.0, 0.0]]}
        assert data["hessian"] == [2.0, 0.0]
        back = critical_point_from_json(json.loads(json.dumps(data)))
        assert back == T
        assert back.hess is None and not back.converged

    def test_critical_point_missing_field(self):
        """Test that a point without z is refused"""
        with pytest.raises(ConfigError):
            critical_point_from_json({"t": {}})

    def test_tensor_vector(self):
        """Test entries as multi-indices with complex coefficients"""
        v = TensorVector.from_items(2, 2, [((2, 1), 0.5), ((1, 2), -0.5j)])
        data = tensor_vector_to_json(v)
        assert data["entries"] == [{"J": [1, 2], "c": [0.0, -0.5]}, {"J": [2, 1], "c": [0.5, 0.0]}]
        assert tensor_vector_from_json(data).items() == v.items()

    def test_poly_space(self, running_space):
        """Test ascending coefficient lists of the flag basis"""
        X = PolySpace(Partition((1, 1)), running_space)
        data = poly_space_to_json(X)
        assert data["lambda"] == [1, 1]
        assert data["flag_basis"][1] == [[-1.0, 0.0], [1.0, 0.0]]
        assert poly_space_from_json(data).coefficient_distance(X) == 0.0


class TestReports:
    """Test suite for report output"""

    def test_nan_becomes_null(self):
        """Test that an unfinished interpolation report serializes"""
        data = interpolation_report_to_json(InterpolationReport(lam=(1, 1), F="1", declared_degree=1))
        assert data["heldout_residual"] is None
        assert data["passed"] is False
        assert json.loads(dumps_report(data))["above_degree_energy"] is None

    def test_sorted_and_stable(self):
        """Test that key order does not affect the output"""
        a = dumps_report({"z": [1 + 2j], "command": "solve"})
        b = dumps_report({"command": "solve", "z": [1 + 2j]})
        assert a == b
        assert json.loads(a)["z"] == [[1.0, 2.0]]

    def test_write_and_read(self, tmp_path):
        """Test writing a report and reading it back"""
        path = tmp_path / "report.json"
        write_report({"command": "chars", "passed": True}, str(path))
        assert read_json(str(path)) == {"command": "chars", "passed": True}

    def test_read_missing(self, tmp_path):
        """Test that an unreadable file is a configuration error"""
        with pytest.raises(ConfigError):
            read_json(str(tmp_path / "missing.json"))
