"""
Exception tree shared by every sub-package.

ConfigError family ends the CLI with exit code 2, NumericalFailure family with exit code 1.
"""

from typing import Tuple


class NecklaceError(Exception):
    pass


# -- Configuration / input errors ------------------------------------


class ConfigError(NecklaceError):
    pass


class InvalidParameters(ConfigError):
    pass


class AsymmetricCondition(ConfigError):
    def __init__(self, index_pair: Tuple[int, int], asymmetry: float):
        # 1-based (i, j)
        self.index_pair = index_pair
        self.asymmetry = asymmetry

        row, col = index_pair
        super().__init__(
            f"Vertex condition is not symmetric at ({row},{col}): |a_ij - a_ji| = {asymmetry:.3e}"
        )


class NonUnitaryInput(ConfigError):
    pass


class Degenerate(ConfigError):
    pass


# -- Numerical failures ----------------------------------------------


class NumericalFailure(NecklaceError):
    pass


class SingularConversion(NumericalFailure):
    pass


class BelowThreshold(NumericalFailure):
    pass


class MultiMode(NumericalFailure):
    pass


class LoopSingular(NumericalFailure):
    pass


class TransferPole(NumericalFailure):
    pass


class OutsideBand(NumericalFailure):
    pass


class BandEdge(NumericalFailure):
    pass


class SingularSystem(NumericalFailure):
    pass


class NoRoot(NumericalFailure):
    pass


class TangentDirection(NumericalFailure):
    pass


class VerificationMismatch(NumericalFailure):
    pass


class PathMismatch(NumericalFailure):
    pass


class DesignStageError(NecklaceError):
    """
    Raised when design state machine is driven out of order.
    """
