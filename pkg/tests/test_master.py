# tests/test_master.py
import cmath

import numpy as np
import pytest

from gaudin.core.config import SolverBudget, Tolerances
from gaudin.core.errors import CoincidentCoordinates, DegenerateSites
from gaudin.model.master import (
    CriticalPointT,
    bae_residual,
    hessian,
    hessian_matrix,
    log_phi,
    same_orbit,
    solve_bae,
    to_sigma,
)
from gaudin.model.schubert import random_nice_space, root_coordinates
from gaudin.model.tensor_space import Partition


@pytest.fixture
def point_111():
    """A generic (non-critical) point for lambda=(1,1,1)"""
    return CriticalPointT.of([0, 1, 2], [[0.3 + 0.7j, 1.6 - 0.4j], [0.9 + 1.1j]])


class TestMasterFunction:
    """Test suite for log_phi, the Bethe equations and the Hessian"""

    def test_log_phi_running_example(self, running_point):
        """Test Phi = ((0-1)(2-1))^(-1) = -1"""
        assert cmath.exp(log_phi(running_point)) == pytest.approx(-1)

    def test_log_phi_empty_levels(self):
        """Test that lambda=(2,0) has the empty product Phi = 1"""
        assert cmath.exp(log_phi(CriticalPointT.of([0, 2], [[]]))) == pytest.approx(1)

    def test_bae_residual(self, running_point):
        """Test the residual at the closed-form root and at t=0.5"""
        assert np.allclose(bae_residual(running_point), [0])
        assert np.allclose(bae_residual(CriticalPointT.of([0, 2], [[0.5]])), [4 / 3])

    def test_residual_is_negated_gradient(self, point_111):
        """Test bae_residual against central differences of log_phi"""
        h = 1e-6
        x = point_111.flat_t
        grad = []
        for k in range(x.size):
            step = np.zeros(x.size, dtype=complex)
            step[k] = h
            up = log_phi(point_111.with_flat(x + step))
            down = log_phi(point_111.with_flat(x - step))
            grad.append((up - down) / (2 * h))
        assert np.allclose(bae_residual(point_111), -np.array(grad), atol=1e-6)

    def test_hessian_running_example(self, running_point):
        """Test Hess = 1/(1-0)^2 + 1/(1-2)^2 = 2"""
        assert hessian(running_point) == pytest.approx(2)

    def test_hessian_empty(self):
        """Test the empty determinant convention"""
        assert hessian(CriticalPointT.of([0, 2], [[]])) == 1

    def test_hessian_matrix_finite_differences(self, point_111):
        """Test the Hessian matrix against differences of the residual"""
        h = 1e-5
        x = point_111.flat_t
        H = hessian_matrix(point_111)
        for k in range(x.size):
            step = np.zeros(x.size, dtype=complex)
            step[k] = h
            up = bae_residual(point_111.with_flat(x + step))
            down = bae_residual(point_111.with_flat(x - step))
            # residual is -grad, so its derivative is -H
            assert np.allclose(-(up - down) / (2 * h), H[:, k], rtol=1e-5, atol=1e-6)

    def test_residual_homogeneity(self, point_111):
        """Test that the Bethe equations scale as 1/c under (z, t) -> c(z, t)"""
        c = 2.5 - 0.5j
        scaled = CriticalPointT.of([c * x for x in point_111.z], [[c * x for x in lev] for lev in point_111.t])
        assert np.allclose(bae_residual(scaled), bae_residual(point_111) / c, atol=1e-12)

    def test_hessian_homogeneity(self, point_111):
        """Test H(cT) = H(T) / c^2 and Hess(cT) = c^(-2 dim) Hess(T)"""
        c = 1.7
        scaled = CriticalPointT.of([c * x for x in point_111.z], [[c * x for x in lev] for lev in point_111.t])
        assert np.allclose(hessian_matrix(scaled), hessian_matrix(point_111) / c ** 2, atol=1e-12)
        dim = point_111.flat_t.size
        assert hessian(scaled) == pytest.approx(hessian(point_111) * c ** (-2 * dim))

    def test_coincident_coordinates(self):
        """Test that a Bethe root on a site is refused"""
        with pytest.raises(CoincidentCoordinates):
            bae_residual(CriticalPointT.of([0, 2], [[2]]))


class TestSigma:
    """Test suite for symmetric-function coordinates"""

    def test_running_example(self, running_point):
        """Test sigma^(0) = (2, 0), sigma^(1) = (1)"""
        sig = to_sigma(running_point)
        assert sig.levels == ((2, 0), (1,))

    def test_permutation_invariance(self, point_111):
        """Test that reordering a level leaves sigma unchanged"""
        swapped = CriticalPointT.of(point_111.z, [point_111.t[0][::-1], point_111.t[1]])
        assert np.allclose(to_sigma(swapped).flat(), to_sigma(point_111).flat(), atol=1e-12)
        assert same_orbit(to_sigma(swapped), to_sigma(point_111), 1e-9)

    def test_level_zero(self):
        """Test sigma of z=(1,2,3)"""
        sig = to_sigma(CriticalPointT.of([1, 2, 3], [[5]]))
        assert np.allclose(sig.levels[0], [6, 11, 6])


class TestSolver:
    """Test suite for solve_bae"""

    def test_closed_form(self):
        """Test lambda=(1,1): the single orbit t = mean(z)"""
        orbits, report = solve_bae(Partition((1, 1)), [0, 2], seed=0)
        assert len(orbits) == 1 and not report.count_mismatch
        assert abs(orbits[0].t[0][0] - 1) < 1e-10
        assert orbits[0].converged and orbits[0].nondegenerate
        assert orbits[0].hess == pytest.approx(2)

    def test_empty_roots(self):
        """Test lambda=(2,0): one orbit with no Bethe roots"""
        orbits, report = solve_bae(Partition((2, 0)), [0, 1], seed=0)
        assert len(orbits) == 1
        assert orbits[0].t == ((),)
        assert report.found == report.expected == 1

    def test_two_two(self, z_22):
        """Test lambda=(2,2) at z=(0,1,3,7): two nondegenerate orbits"""
        orbits, report = solve_bae(Partition((2, 2)), z_22, seed=42)
        assert report.expected == 2
        assert report.found == 2
        assert all(T.nondegenerate for T in orbits)
        assert max(report.residuals) < 1e-10
        assert not same_orbit(to_sigma(orbits[0]), to_sigma(orbits[1]), 1e-6)

    @pytest.mark.parametrize("parts,expected", [((2, 2), 2), ((3, 1), 3), ((2, 1, 1), 3)])
    def test_counting(self, parts, expected):
        """Test that the orbit count equals the hook-length dimension for random z"""
        lam = Partition(parts)
        for z_seed in range(5):
            rng = np.random.default_rng(100 + z_seed)
            z = rng.standard_normal(lam.n) + 1j * rng.standard_normal(lam.n)
            orbits, report = solve_bae(lam, z, seed=z_seed)
            assert report.found == expected, (parts, z_seed)
            assert all(abs(T.hess) > 1e-8 for T in orbits)

    def test_recovers_point_of_the_cell(self):
        """Test that a critical point built from a random space of the cell is among the solved orbits"""
        lam = Partition((2, 1, 1))
        known = root_coordinates(random_nice_space(lam, np.random.default_rng(5)))
        orbits, report = solve_bae(lam, known.z, seed=0)
        assert report.found == 3
        assert any(same_orbit(to_sigma(T), to_sigma(known), 1e-6) for T in orbits)
        assert 0 <= report.cell_starts <= report.starts

    def test_deterministic_across_threads(self, z_22):
        """Test that the worker count does not change the result"""
        lam = Partition((2, 2))
        single, _ = solve_bae(lam, z_22, seed=7, threads=1)
        multi, _ = solve_bae(lam, z_22, seed=7, threads=4)
        assert single == multi

    def test_degenerate_sites(self):
        """Test that coincident sites are refused"""
        with pytest.raises(DegenerateSites):
            solve_bae(Partition((1, 1)), [1, 1])

    def test_size_mismatch(self):
        """Test that |lambda| must equal the number of sites"""
        with pytest.raises(ValueError):
            solve_bae(Partition((1, 1)), [0, 1, 2])

    def test_budget_is_respected(self):
        """Test that retries = 0 allows exactly one attempt"""
        _, report = solve_bae(Partition((1, 1)), [0, 2], seed=1,
                              budget=SolverBudget(starts_multiplier=1, retries=0), tolerances=Tolerances())
        assert report.attempts == 1
        assert report.starts >= 1
