"""Exception hierarchy for the ccscatter library.

Errors are grouped so that batch drivers (and the CLI exit-code contract)
can distinguish three situations: a problem that was never valid, a
numerical routine that failed, and the structurally degenerate case of an
identically vanishing Wronskian coefficient.
"""

from __future__ import annotations


class ScatterError(Exception):
    """Base class for all ccscatter errors."""


class InvalidProblemError(ScatterError):
    """Problem construction rejected (zero initial data, bad potential)."""


class UnsupportedBackgroundError(InvalidProblemError):
    """Background potential contains features the solver does not accept."""


class ConfigError(ScatterError):
    """Problem/command configuration file is malformed.

    ``detail`` carries the offending field path or the JSON line/column.
    """

    def __init__(self, message: str, detail: str = ""):
        super().__init__(message if not detail else f"{message} ({detail})")
        self.detail = detail


class IntegrationError(ScatterError):
    """Adaptive propagation failed to reach its tolerance.

    Attributes
    ----------
    abscissa : float
        Position in [0, 1] where refinement gave out.
    """

    def __init__(self, message: str, abscissa: float):
        super().__init__(f"{message} at x = {abscissa:.6g}")
        self.abscissa = abscissa


class MeasureUnsupportedError(ScatterError):
    """Operation requires an absolutely continuous potential, got spikes."""


class QuadraturePrecisionError(ScatterError):
    """Simplex quadrature did not converge for a series coefficient.

    Attributes
    ----------
    index : int
        Index of the offending coefficient.
    """

    def __init__(self, message: str, index: int):
        super().__init__(f"{message} (coefficient index {index})")
        self.index = index


class DegenerateFunctionError(ScatterError):
    """The Wronskian coefficient vanishes identically; zero analysis is moot."""


class ContourCollisionError(ScatterError):
    """A zero sits (numerically) on the counting contour; perturb the radius."""


class TravelingBasisError(ScatterError):
    """Reflection needs a genuinely complex reference solution.

    Raised when W[u0, conj(u0)] vanishes: there is no traveling-wave basis.
    Realify the problem and use the real-solution machinery instead.
    """


class RealificationRequiredError(ScatterError):
    """Operation is defined for real-valued reference solutions only."""


class WitnessNotFoundError(ScatterError):
    """Tent-function search exhausted its schedule without a witness.

    This is inconclusive, not a disproof.
    """
