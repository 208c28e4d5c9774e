# tests/conftest.py
import pytest
import sys
import os

# Add the repo root to Python path so we can import gaudin
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from gaudin.algebra.poly import Polynomial
from gaudin.model.master import CriticalPointT
from gaudin.model.tensor_space import Partition


@pytest.fixture
def running_point():
    """Closed-form critical point: N=2, lambda=(1,1), z=(0,2), t=(1)"""
    return CriticalPointT.of([0, 2], [[1]])


@pytest.fixture
def running_partition():
    return Partition((1, 1))


@pytest.fixture
def running_space():
    """span{u^2, u-1}, the space of polynomials attached to the running point"""
    return (Polynomial((0, 0, 1)), Polynomial((-1, 1)))


@pytest.fixture
def z_22():
    """Generic sites for lambda=(2,2)"""
    return (0j, 1 + 0j, 3 + 0j, 7 + 0j)


@pytest.fixture(autouse=True)
def single_thread(monkeypatch):
    """Keep every parallel map sequential unless a test asks otherwise"""
    monkeypatch.setenv("GAUDIN_THREADS", "1")
