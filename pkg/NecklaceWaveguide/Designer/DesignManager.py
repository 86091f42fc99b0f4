from __future__ import annotations
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Type

import numpy as np

from LoggingConfigurator import logger
from Errors import TangentDirection
from .DesignStates import DesignState, UnsolvedState
from .DesignLogic import ArchLengths, DesignRequest, DesignResult, XYSolution, default_offsets
from .Verification import MATCH_TOL


SCALED_QUANTITIES = ("pole_distance", "min_vg", "oracle_r")


class DesignManager:
    def __init__(self, request: DesignRequest):
        self.request = request
        self.vc = request.vc
        self.state: Type[DesignState] = UnsolvedState

        # noinspection PyTypeChecker
        self.xy: XYSolution = None
        # noinspection PyTypeChecker
        self.arches: ArchLengths = None
        # noinspection PyTypeChecker
        self.result: DesignResult = None

    def new_state(self, status: Type[DesignState]):
        logger.debug(f"Switching state: {self.state.__name__} -> {status.__name__}")
        self.state = status

    def solve_xy(self):
        return self.state.solve_xy(self)

    def choose_lengths(self, offsets: Optional[Tuple[int, int]] = None):
        return self.state.choose_lengths(self, offsets)

    def finish(self):
        return self.state.finish(self)

    def offset_candidates(self) -> List[Tuple[int, int]]:
        """
        Requested (or smallest positive) offsets, then m1 + 1, then m2 + 1, then both.
        """

        m1, m2 = self.request.branch_offsets or default_offsets(self.xy.x, self.xy.y)
        return [(m1, m2), (m1 + 1, m2), (m1, m2 + 1), (m1 + 1, m2 + 1)]


def design(request: DesignRequest) -> DesignResult:
    """
    Full pipeline: tangent variables, arch lengths with tangency retries, segment length, diagnostics.

    :raises TangentDirection: when every offset candidate is tangent to the design curve
    """

    manager = DesignManager(request)
    manager.solve_xy()

    last_error = None
    for offsets in manager.offset_candidates():
        try:
            manager.choose_lengths(offsets)
        except TangentDirection as err:
            logger.warning(f"Offsets {offsets} rejected: {err}")
            last_error = err
            continue

        manager.finish()
        logger.info(f"Designed l1 = {manager.result.l1!r}, l2 = {manager.result.l2!r}, l3 = {manager.result.l3!r}")
        return manager.result

    raise TangentDirection(f"no branch offsets left to try, last error: {last_error}")


@dataclass(frozen=True)
class SweepReport:
    eps: List[float]
    results: List[DesignResult]
    slopes: Dict[str, Optional[float]]

    def rows(self) -> List[Dict[str, Optional[float]]]:
        return [
            {"eps": eps, **{name: getattr(result.diagnostics, name) for name in SCALED_QUANTITIES}}
            for eps, result in zip(self.eps, self.results)
        ]


def loglog_slope(eps: Sequence[float], values: Sequence[Optional[float]]) -> Optional[float]:
    """
    Least squares slope of log(value) over log(eps), None when a value is missing or at round-off.

    >>> round(loglog_slope([0.1, 0.05, 0.025], [0.01, 0.0025, 0.000625]), 9)
    2.0
    """

    if any(value is None or not value > MATCH_TOL for value in values):
        return None

    slope, _ = np.polyfit(np.log(eps), np.log(values), 1)
    return float(slope)


def design_sweep(request: DesignRequest, eps_values: Iterable[float], mapper: Callable = map) -> SweepReport:
    """
    Designs for each eps and fits the scaling of pole distance, slowest group velocity and oracle reflection.
    Oracle reflection at an exactly transparent point sits at round-off, its slope is then reported as None.

    :param request: template request, eps replaced per run
    :param eps_values: detunings to run
    :param mapper: map-like callable, lets the caller parallelise while keeping order
    """

    eps = [float(value) for value in eps_values]
    results = list(mapper(design, [request.with_eps(value) for value in eps]))

    slopes = {
        name: loglog_slope(eps, [getattr(result.diagnostics, name) for result in results])
        for name in SCALED_QUANTITIES
    }

    logger.info(f"Scaling slopes: {slopes}")
    return SweepReport(eps, results, slopes)
