"""
Exception hierarchy shared by every module.

Numerical routines raise these instead of returning sentinels; the command
processors translate them into exit codes.
"""


class GaudinError(Exception):
    """Base class for all errors raised by the package."""


class ConfigError(GaudinError):
    """Invalid run configuration (CLI exit code 1)."""


# Scalar substrate
class NonConvergence(GaudinError):
    """An iterative method exhausted its retry budget."""


class PoleCollision(GaudinError):
    """Two poles are closer than the dedup tolerance but not identical."""


class PoleEvaluation(GaudinError):
    """A rational function was evaluated too close to one of its poles."""


class SingularWronskian(GaudinError):
    """The Wronskian of a polynomial space vanishes where it is needed."""


# Coordinates
class DegenerateSites(GaudinError):
    """Evaluation points z_s are not pairwise distinct."""


class CoincidentCoordinates(GaudinError):
    """Two coordinates of a point T that must differ coincide."""


class CostCapExceeded(GaudinError):
    """A combinatorial enumeration would exceed the desk-scale cap."""


# Schubert cell
class NotInCell(GaudinError):
    """A space of polynomials does not lie in the expected Schubert cell."""


class DegreeDrop(GaudinError):
    """A tail Wronskian has lower degree than its level size (cell boundary)."""


class KernelDimension(GaudinError):
    """The polynomial kernel of a differential operator has the wrong dimension."""


# Identity checks
class SameOrbit(GaudinError):
    """Two critical points that must lie in different orbits share one."""


class CheckFailure(GaudinError):
    """A verification identity failed at the configured tolerance."""


class CountMismatch(GaudinError):
    """Fewer critical orbits were found than the expected count."""

    def __init__(self, found: int, expected: int):
        super().__init__(f"found {found} critical orbits, expected {expected}")
        self.found = found
        self.expected = expected
