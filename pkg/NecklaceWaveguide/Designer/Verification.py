"""
Diagnostics of a designed necklace, computed only through the public spectrum and scattering calls,
so recomputing them independently checks the whole design.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import TYPE_CHECKING, List, Optional, Tuple

import numpy as np
from scipy import optimize

from LoggingConfigurator import logger
from Errors import BandEdge, VerificationMismatch
from Monodromy.Transfer import hill_discriminant, monodromy
from Spectrum.BandScan import locate_poles, scan_bands
from Spectrum.Dispersion import differentiation_step, group_velocity
from Scattering.TruncatedNecklace import TruncatedNecklace
from Scattering.Oracle import solve_scattering_oracle

if TYPE_CHECKING:
    from GraphModel.NecklaceParams import NecklaceParams
    from .DesignLogic import DesignResult


MATCH_TOL = 1e-8
POLE_SEARCH_FACTOR = 4
POLE_SEARCH_GRID = 1001
VELOCITY_SAMPLES = np.linspace(0.05, 0.95, 19)
# |F| at the far end of the slow interval, k moves by pi / 6 from sigma0 there.
SLOW_LEVEL = 1.0


@dataclass(frozen=True)
class Diagnostics:
    f_sigma0: float
    norm_defect: float
    transparency_residual: float
    n_sigma0: float
    pole: Optional[float]
    pole_side: Optional[str]
    pole_distance: Optional[float]
    band_edge: Optional[float]
    slow_interval: Optional[Tuple[float, float]]
    min_vg: Optional[float]
    oracle_r: float
    n_cells: int

    def to_json_dict(self) -> dict:
        output = asdict(self)
        if self.slow_interval is not None:
            output["slow_interval"] = list(self.slow_interval)
        return output


def _pole_window_half_width(params: NecklaceParams, sigma0: float, eps: float) -> float:
    """
    Half width in sigma covering POLE_SEARCH_FACTOR * eps of motion in the slower tangent variable.
    """

    x, y = math.tan(sigma0 * params.l1 / 2), math.tan(sigma0 * params.l2 / 2)
    speed = min(params.l1 * (1 + x ** 2) / 2, params.l2 * (1 + y ** 2) / 2)
    return min(POLE_SEARCH_FACTOR * eps / speed, sigma0 / 2)


def nearest_pole(params: NecklaceParams, sigma0: float, eps: float) -> Optional[Tuple[float, str]]:
    """
    Searches both sides of sigma0 and returns (pole, side) for the nearer pole, None if neither side has one.
    """

    half = _pole_window_half_width(params, sigma0, eps)

    left = locate_poles(params, (sigma0 - half, sigma0), POLE_SEARCH_GRID)
    right = locate_poles(params, (sigma0, sigma0 + half), POLE_SEARCH_GRID)

    candidates: List[Tuple[float, str]] = []
    if left:
        candidates.append((left[-1], "left"))
    if right:
        candidates.append((right[0], "right"))

    if not candidates:
        return None

    return min(candidates, key=lambda item: abs(item[0] - sigma0))


def _band_edge_towards(params: NecklaceParams, sigma0: float, pole: float) -> Optional[float]:
    step = 1e-8 * max(1.0, abs(pole))
    window = (sigma0, pole - step) if pole > sigma0 else (pole + step, sigma0)

    band = scan_bands(params, window, POLE_SEARCH_GRID).band_containing(sigma0)
    if band is None:
        return None

    return band[1] if pole > sigma0 else band[0]


def _slow_end(params: NecklaceParams, sigma0: float, band_edge: float) -> float:
    def level(sigma):
        return abs(hill_discriminant(params, sigma)) - SLOW_LEVEL

    lo, hi = sorted((sigma0, band_edge))
    return optimize.brentq(level, lo, hi, xtol=1e-14)


def _min_velocity(params: NecklaceParams, interval: Tuple[float, float], period_length) -> Optional[float]:
    lo, hi = sorted(interval)
    step = differentiation_step(hi - lo)

    speeds = []
    for fraction in VELOCITY_SAMPLES:
        try:
            speeds.append(abs(group_velocity(params, lo + fraction * (hi - lo), period_length, step).vg))
        except BandEdge as err:
            logger.debug(str(err))

    return min(speeds) if speeds else None


def compute_diagnostics(params: NecklaceParams, sigma0: float, eps: float, n_cells: int,
                        period_length: Optional[float] = None) -> Diagnostics:
    """
    :param params: designed period, l3 set
    :param sigma0: target wavenumber
    :param eps: detuning, sets the pole search window
    :param n_cells: N for the oracle reflection at sigma0
    :param period_length: L for group velocity, default l3 + l2
    """

    mono = monodromy(params, sigma0)
    transfer = mono.transfer

    pole = band_edge = slow_interval = min_vg = pole_side = pole_distance = None

    found = nearest_pole(params, sigma0, eps)
    if found is None:
        logger.warning(f"No pole of F found near sigma0 = {sigma0!r}")
    else:
        pole, pole_side = found
        pole_distance = abs(pole - sigma0)
        band_edge = _band_edge_towards(params, sigma0, pole)

    if band_edge is not None:
        slow_interval = (sigma0, _slow_end(params, sigma0, band_edge))
        min_vg = _min_velocity(params, slow_interval, period_length)

    oracle = solve_scattering_oracle(TruncatedNecklace(params, n_cells), sigma0)

    return Diagnostics(
        f_sigma0=mono.f,
        norm_defect=mono.norm_sq - 2,
        transparency_residual=transfer.transparency_residual,
        n_sigma0=transfer.n,
        pole=pole,
        pole_side=pole_side,
        pole_distance=pole_distance,
        band_edge=band_edge,
        slow_interval=slow_interval,
        min_vg=min_vg,
        oracle_r=abs(oracle.r),
        n_cells=n_cells,
    )


def _mismatch(stored, fresh) -> Optional[float]:
    if stored is None or fresh is None:
        return None if stored is fresh else math.inf

    if isinstance(stored, str):
        return 0.0 if stored == fresh else math.inf

    stored, fresh = np.atleast_1d(stored).astype(float), np.atleast_1d(fresh).astype(float)
    return float(np.max(np.abs(stored - fresh) / np.maximum(1.0, np.abs(stored))))


def verify_design(result: DesignResult, n_cells: Optional[int] = None) -> Diagnostics:
    """
    Recomputes every diagnostic from the stored lengths. Any drift above MATCH_TOL, or a point that is no longer
    transparent with F = 0, fails hard.

    :param result: output of design()
    :param n_cells: N for the oracle, default the one stored in the result

    :return: freshly computed Diagnostics
    """

    request = result.request
    cells = result.diagnostics.n_cells if n_cells is None else n_cells

    fresh = compute_diagnostics(result.params, request.sigma0, request.eps, cells, request.period_length)

    if not abs(fresh.f_sigma0) < MATCH_TOL:
        raise VerificationMismatch(f"F(sigma0) = {fresh.f_sigma0:.3e}")

    if not abs(fresh.norm_defect) < MATCH_TOL:
        raise VerificationMismatch(f"||M||^2 - 2 = {fresh.norm_defect:.3e}, sigma0 is not transparent")

    for entry in fields(Diagnostics):
        if entry.name == "n_cells" or (entry.name == "oracle_r" and cells != result.diagnostics.n_cells):
            continue

        drift = _mismatch(getattr(result.diagnostics, entry.name), getattr(fresh, entry.name))
        if drift is not None and drift > MATCH_TOL:
            raise VerificationMismatch(f"{entry.name} drifted by {drift:.3e}")

    logger.info("Design verified")
    return fresh
