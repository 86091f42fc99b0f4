from __future__ import annotations
from typing import TYPE_CHECKING, Optional, Tuple

from LoggingConfigurator import logger
from Errors import DesignStageError, TransferPole, VerificationMismatch
from GraphModel.NecklaceParams import NecklaceParams
from Monodromy.Transfer import loop_transfer, POLE_TOL
from .DesignLogic import design_xy, lengths_from_xy, check_direction, choose_l3, DesignResult
from .Verification import compute_diagnostics, MATCH_TOL

if TYPE_CHECKING:
    from .DesignManager import DesignManager


"""
Finite-State Machine for the design pipeline, idea from Python Cookbook 3E.
Unsolved -> XYSolved -> LengthsChosen -> Designed, lengths may be re-chosen before finishing.
"""


class DesignState:
    @staticmethod
    def solve_xy(manager: DesignManager):
        raise NotImplementedError()

    @staticmethod
    def choose_lengths(manager: DesignManager, offsets: Optional[Tuple[int, int]]):
        raise NotImplementedError()

    @staticmethod
    def finish(manager: DesignManager):
        raise NotImplementedError()


class UnsolvedState(DesignState):
    @staticmethod
    def solve_xy(manager: DesignManager):
        manager.xy = design_xy(manager.request)
        manager.new_state(XYSolvedState)

    @staticmethod
    def choose_lengths(manager: DesignManager, offsets: Optional[Tuple[int, int]]):
        raise DesignStageError("Tangent variables are not solved yet.")

    @staticmethod
    def finish(manager: DesignManager):
        raise DesignStageError("Tangent variables are not solved yet.")


class XYSolvedState(DesignState):
    @staticmethod
    def solve_xy(manager: DesignManager):
        raise DesignStageError("Tangent variables are already solved.")

    @staticmethod
    def choose_lengths(manager: DesignManager, offsets: Optional[Tuple[int, int]]):
        x, y, _ = manager.xy
        arches = lengths_from_xy(x, y, manager.request.sigma0, offsets)

        # raises TangentDirection, the manager stays here and may retry with other offsets.
        check_direction(manager.request, x, y, arches)

        manager.arches = arches
        manager.vc = manager.request.vc.arch_relabel() if arches.swapped else manager.request.vc
        logger.debug(f"Arches {arches.l1!r}, {arches.l2!r} from offsets {arches.offsets}, swapped: {arches.swapped}")

        manager.new_state(LengthsChosenState)

    @staticmethod
    def finish(manager: DesignManager):
        raise DesignStageError("Arch lengths are not chosen yet.")


class LengthsChosenState(DesignState):
    @staticmethod
    def solve_xy(manager: DesignManager):
        raise DesignStageError("Tangent variables are already solved.")

    @staticmethod
    def choose_lengths(manager: DesignManager, offsets: Optional[Tuple[int, int]]):
        logger.debug("Delegating to: XYSolvedState.choose_lengths")
        XYSolvedState.choose_lengths(manager, offsets)

    @staticmethod
    def finish(manager: DesignManager):
        request = manager.request
        arches = manager.arches
        x, y, gamma = manager.xy

        if arches.swapped:
            x, y = y, x

        params = NecklaceParams(arches.l1, arches.l2, None, manager.vc)
        params = params.with_l3(choose_l3(params, request.sigma0))

        transfer = loop_transfer(params, request.sigma0)

        if abs(transfer.n) <= POLE_TOL * max(1.0, abs(transfer.m)):
            raise TransferPole(f"n(sigma0) = {transfer.n:.3e}, transparency point sits on a pole")

        if not abs(transfer.transparency_residual) < MATCH_TOL:
            raise VerificationMismatch(f"m^2 - n^2 + 1 = {transfer.transparency_residual:.3e} at sigma0")

        diagnostics = compute_diagnostics(params, request.sigma0, request.eps, request.n_cells, request.period_length)

        manager.result = DesignResult(
            request, manager.vc, x, y, gamma, params.l1, params.l2, params.l3,
            arches.offsets, arches.swapped, diagnostics,
        )
        manager.new_state(DesignedState)


class DesignedState(DesignState):
    @staticmethod
    def solve_xy(manager: DesignManager):
        raise DesignStageError("Design is finished.")

    @staticmethod
    def choose_lengths(manager: DesignManager, offsets: Optional[Tuple[int, int]]):
        raise DesignStageError("Design is finished.")

    @staticmethod
    def finish(manager: DesignManager):
        raise DesignStageError("Design is finished.")
