"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class IntlatError(Exception):
    """Base class for all library errors."""


class DomainError(IntlatError, ValueError):
    """Argument outside the mathematical domain of a function."""


class IntegrationError(IntlatError, ArithmeticError):
    """Adaptive ODE integration could not reach the requested endpoint.

    ``last_x`` is the last abscissa at which an accepted step ended.
    """

    def __init__(self, message: str, last_x: float, last_state=None):
        super().__init__(f"{message} (last good x = {last_x!r})")
        self.last_x = last_x
        self.last_state = last_state


class QuadratureError(IntlatError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message: str, value: float, error: float):
        super().__init__(f"{message} (partial value {value!r}, error estimate {error!r})")
        self.value = value
        self.error = error


class PartialTrajectoryError(IntegrationError):
    """The Painleve transcendent left the positive window before ``x_min``.

    Carries the part of the trajectory that was computed (``trajectory``).
    """

    def __init__(self, message: str, last_x: float, trajectory=None):
        super().__init__(message, last_x)
        self.trajectory = trajectory


class RangeError(IntlatError, ValueError):
    """Evaluation point outside a computed window."""


class CurveError(IntlatError, ValueError):
    """Point does not satisfy the chiral Potts curve, or degenerate modulus."""


class SingularWeightError(IntlatError, ZeroDivisionError):
    """A denominator factor of a Boltzmann weight product vanishes."""

    def __init__(self, family: str, j: int, factor: complex):
        super().__init__(f"vanishing denominator in W^{family} at j={j}: factor = {factor!r}")
        self.family = family
        self.j = j
        self.factor = factor


class DimensionCapError(IntlatError, ValueError):
    """Transfer-matrix dimension exceeds the configured cap."""


class ReductionSliceError(IntlatError, ValueError):
    """N=2 weights on the chosen slice are not real and positive."""


class InfiniteWindowError(IntlatError, ValueError):
    """Enumeration requested for a species whose momentum window is infinite."""


class EnumerationCapError(IntlatError, ValueError):
    """Number of states to enumerate exceeds the configured cap."""
