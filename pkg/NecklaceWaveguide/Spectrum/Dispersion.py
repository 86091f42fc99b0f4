"""
Bloch phase k(sigma) from cos k = F / 2 and group velocity V_g = L / k'(sigma).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, List, NamedTuple, Optional, Tuple

import numpy as np

from LoggingConfigurator import logger
from Errors import BandEdge, InvalidParameters, OutsideBand
from Monodromy.Transfer import discriminant_kernel

if TYPE_CHECKING:
    from GraphModel.NecklaceParams import NecklaceParams


MIN_STEP = 1e-6
STEP_FRACTION = 1e-3
# relative Richardson error above this means the stencil sees an edge or a pole.
MAX_RELATIVE_ERROR = 1e-4
# principal k closer than this to 0 or pi at a local extremum is treated as a fold.
FOLD_WINDOW = 0.25


class VelocityEstimate(NamedTuple):
    vg: float
    error: float
    dk: float


@dataclass(frozen=True)
class DispersionPoint:
    sigma: float
    k: float
    vg: Optional[float]


def differentiation_step(band_width: Optional[float] = None) -> float:
    """
    >>> differentiation_step()
    1e-06
    >>> differentiation_step(10.0)
    0.01
    """

    if band_width is None:
        return MIN_STEP

    return max(MIN_STEP, STEP_FRACTION * band_width)


def _principal_k(params: NecklaceParams, sigma) -> np.ndarray:
    f, mask, _ = discriminant_kernel(params, np.asarray(sigma, dtype=float))

    if np.any(mask) or np.any(~(np.abs(f) < 2)):
        raise OutsideBand(f"|F| >= 2 or pole among sigma = {np.atleast_1d(sigma).tolist()}")

    return np.arccos(f / 2)


def group_velocity(params: NecklaceParams, sigma: float, period_length: Optional[float] = None,
                   step: Optional[float] = None) -> VelocityEstimate:
    """
    Central difference of the principal branch k = arccos(F / 2), Richardson extrapolated from h and h / 2.

    :param params: necklace period with l3 set
    :param sigma: wavenumber strictly inside a band
    :param period_length: L, defaults to l3 + l2
    :param step: h, defaults to differentiation_step()

    :return: VelocityEstimate of vg, its error estimate and k'
    """

    length = params.period_length if period_length is None else period_length
    h = differentiation_step() if step is None else step

    if not length > 0:
        raise InvalidParameters(f"period_length must be positive, got {length}")

    stencil = sigma + np.array([-h, -h / 2, h / 2, h])

    try:
        k_lo, k_half_lo, k_half_hi, k_hi = _principal_k(params, stencil)
    except OutsideBand as err:
        raise BandEdge(f"stencil of width {h} around sigma = {sigma!r} leaves the band") from err

    coarse = (k_hi - k_lo) / (2 * h)
    fine = (k_half_hi - k_half_lo) / h
    dk = (4 * fine - coarse) / 3
    dk_error = abs(dk - fine)

    if dk == 0 or dk_error > MAX_RELATIVE_ERROR * abs(dk):
        raise BandEdge(f"k' unreliable at sigma = {sigma!r}: {dk:.6e} +- {dk_error:.3e}")

    vg = length / dk
    return VelocityEstimate(vg, abs(vg) * dk_error / abs(dk), dk)


def _unwrap(principal: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Continues arccos through folds at 0 and pi. Returns (k, branch sign per point).
    Principal values must come from a uniform grid.

    The true fold lies somewhere around the sample at a local extremum, so that sample takes whichever
    branch puts it closer to the midpoint of its neighbours.

    >>> k, signs = _unwrap(np.array([0.3, 0.1, 0.05, 0.2]))
    >>> [round(value, 12) for value in k.tolist()], signs.tolist()
    ([0.3, 0.1, -0.05, -0.2], [1.0, 1.0, -1.0, -1.0])
    """

    base, sign = 0.0, 1.0
    k = np.empty_like(principal)
    signs = np.empty_like(principal)

    for idx, value in enumerate(principal):
        k[idx] = base + sign * value
        signs[idx] = sign

        if 0 < idx < len(principal) - 1:
            before, after = principal[idx - 1], principal[idx + 1]

            if value >= before and value >= after and math.pi - value < FOLD_WINDOW:
                fold = math.pi
            elif value <= before and value <= after and value < FOLD_WINDOW:
                fold = 0.0
            else:
                continue

            base += 2 * sign * fold
            sign = -sign

            midpoint = (k[idx - 1] + base + sign * after) / 2
            crossed = base + sign * value

            if abs(crossed - midpoint) < abs(k[idx] - midpoint):
                k[idx] = crossed
                signs[idx] = sign

    return k, signs


def dispersion_k(params: NecklaceParams, band: Tuple[float, float], grid: int,
                 period_length: Optional[float] = None) -> List[DispersionPoint]:
    """
    k on cell midpoints of the band, continuous branch starting in [0, pi] at the left edge.
    vg is None where the differentiation stencil would leave the band.

    :param params: necklace period with l3 set
    :param band: (lo, hi) of a detected band
    :param grid: number of points
    :param period_length: L for vg
    """

    lo, hi = band

    if not (hi > lo and grid >= 1):
        raise InvalidParameters(f"need lo < hi and grid >= 1, got band {band}, grid {grid}")

    sigma = lo + (np.arange(grid) + 0.5) * (hi - lo) / grid
    k, signs = _unwrap(_principal_k(params, sigma))

    step = differentiation_step(hi - lo)
    points = []

    for s, k_value, sign in zip(sigma, k, signs):
        try:
            vg = sign * group_velocity(params, float(s), period_length, step).vg
        except BandEdge as err:
            logger.debug(str(err))
            vg = None

        points.append(DispersionPoint(float(s), float(k_value), vg))

    return points
