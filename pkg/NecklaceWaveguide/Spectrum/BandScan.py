"""
Band-gap structure of F on a sigma window.

Scan order:
    1. vectorised kernel over the grid (and cell midpoints for the coarseness check)
    2. poles from sign changes of Dn, refined by brentq, removable zeros dropped
    3. zero of F inserted between neighbouring samples where F flips sign across |F| > 2
    4. band edges from sign changes of |F| - 2 inside each pole-free piece
    5. sub-intervals classified by their midpoint and merged
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, List, Optional, Tuple

import numpy as np
from scipy import optimize

from LoggingConfigurator import logger
from Errors import InvalidParameters
from Monodromy.Transfer import loop_kernel, discriminant_kernel
from Monodromy.TangentForms import pole_residual, transparency_value

if TYPE_CHECKING:
    from GraphModel.NecklaceParams import NecklaceParams


DEFAULT_GRID = 2001

POLE_XTOL = 1e-14
EDGE_XTOL = 1e-12

# located pole must have |n| below this, otherwise it was a removable zero of Dn.
POLE_N_TOL = 1e-10
# pole cross-check against the tangent quartic.
POLE_RESIDUAL_TOL = 1e-8
# |F| touching 2 without crossing is not an edge.
EDGE_SLACK = 1e-12

Interval = Tuple[float, float]


@dataclass(frozen=True)
class GridTooCoarse:
    """
    Advisory: a grid cell holds more than one sign change of n, features may be thinner than the grid step.
    """

    sigma_lo: float
    sigma_hi: float

    def __str__(self):
        return f"grid too coarse between sigma = {self.sigma_lo!r} and {self.sigma_hi!r}"


@dataclass(frozen=True)
class BandStructure:
    window: Interval
    bands: List[Interval]
    gaps: List[Interval]
    poles: List[float]
    advisories: List[GridTooCoarse] = field(default_factory=list)
    degenerate: bool = False

    def band_containing(self, sigma: float) -> Optional[Interval]:
        for lo, hi in self.bands:
            if lo <= sigma <= hi:
                return lo, hi
        return None

    @property
    def edges(self) -> List[float]:
        points = {lo for lo, _ in self.bands} | {hi for _, hi in self.bands}
        return sorted(points - set(self.window))


def _check_window(window: Interval, grid: int):
    lo, hi = window

    if not (math.isfinite(lo) and math.isfinite(hi) and 0 < lo < hi):
        raise InvalidParameters(f"scan window must satisfy 0 < sigma_min < sigma_max, got {window}")

    if grid < 2:
        raise InvalidParameters(f"scan grid must be at least 2, got {grid}")


def _dn_at(params: NecklaceParams):
    def inner(sigma):
        return float(loop_kernel(params, sigma).dn)

    return inner


def _f_at(params: NecklaceParams):
    def inner(sigma):
        f, *_ = discriminant_kernel(params, np.asarray(sigma, dtype=float))
        return float(f)

    return inner


def _refine_poles(params: NecklaceParams, sigma: np.ndarray, dn: np.ndarray) -> Tuple[List[float], List[GridTooCoarse]]:
    """
    Brackets sign changes of Dn on the grid and on cell midpoints, then drops removable zeros.
    """

    dn_at = _dn_at(params)
    sign = np.sign(dn)

    brackets = [(sigma[idx], sigma[idx + 1]) for idx in np.flatnonzero(sign[:-1] * sign[1:] < 0)]
    candidates = [float(s) for s in sigma[sign == 0]]

    # two sign changes in one cell leave the end signs equal, the midpoint exposes them.
    mids = (sigma[:-1] + sigma[1:]) / 2
    mid_sign = np.sign(loop_kernel(params, mids).dn)
    hidden = np.flatnonzero((sign[:-1] == sign[1:]) & (sign[:-1] != 0) & (mid_sign != sign[:-1]) & (mid_sign != 0))

    advisories = []
    for idx in hidden:
        advisory = GridTooCoarse(float(sigma[idx]), float(sigma[idx + 1]))
        logger.warning(str(advisory))
        advisories.append(advisory)
        brackets.extend(((sigma[idx], mids[idx]), (mids[idx], sigma[idx + 1])))

    candidates.extend(optimize.brentq(dn_at, lo, hi, xtol=POLE_XTOL) for lo, hi in brackets)

    poles = []
    for root in sorted(candidates):
        kernel = loop_kernel(params, root)

        with np.errstate(divide="ignore", invalid="ignore"):
            n = abs(float(kernel.dn / kernel.w))

        if n < POLE_N_TOL:
            poles.append(root)
        else:
            logger.debug(f"Dropping removable zero of Dn at sigma = {root!r}, |n| = {n:.3e}")

    return poles, advisories


def eq_f_residual(params: NecklaceParams, sigma: float) -> float:
    """
    Relative residual of the n = 0 quartic in tangent variables at sigma. Near zero only at poles.
    """

    x, y = math.tan(sigma * params.l1 / 2), math.tan(sigma * params.l2 / 2)
    return pole_residual(params.entries(sigma), x, y)


def transparency_residual(params: NecklaceParams, sigma: float) -> float:
    """
    m^2 - n^2 + 1 at sigma, evaluated through the tangent form.
    """

    x, y = math.tan(sigma * params.l1 / 2), math.tan(sigma * params.l2 / 2)
    return transparency_value(params.entries(sigma), x, y)


def locate_poles(params: NecklaceParams, window: Interval, grid: int = DEFAULT_GRID) -> List[float]:
    """
    Roots of n in the window, each bracketed and refined, cross-checked against the tangent quartic.

    :param params: necklace period, l3 unused
    :param window: (sigma_min, sigma_max)
    :param grid: sample count

    :return: sorted list of pole locations, possibly empty
    """

    _check_window(window, grid)

    sigma = np.linspace(*window, grid)
    kernel = loop_kernel(params, sigma)

    if np.all(kernel.pole_mask):
        logger.warning("n vanishes on the whole window, loop is decoupled from the chain")
        return []

    poles, _ = _refine_poles(params, sigma, kernel.dn)

    for pole in poles:
        residual = eq_f_residual(params, pole)
        if not residual < POLE_RESIDUAL_TOL:
            logger.warning(f"Pole at sigma = {pole!r} fails the tangent quartic check, residual {residual:.3e}")

    return poles


def _beside_pole(params: NecklaceParams, pole: float, direction: int) -> float:
    """
    Nearest sample next to the pole where F is still finite.
    """

    f_at = _f_at(params)
    step = 1e-9 * max(1.0, abs(pole))

    for _ in range(6):
        step *= 10
        point = pole + direction * step
        if math.isfinite(f_at(point)):
            return point

    return pole + direction * step


def _pieces(window: Interval, poles: List[float]) -> List[Tuple[float, float, bool, bool]]:
    lo, hi = window
    bounds = [lo, *poles, hi]
    return [
        (a, b, idx > 0, idx < len(bounds) - 2)
        for idx, (a, b) in enumerate(zip(bounds[:-1], bounds[1:]))
    ]


def _edges_in_piece(params: NecklaceParams, sigma: np.ndarray, piece) -> List[float]:
    a, b, pole_left, pole_right = piece
    f_at = _f_at(params)

    start = _beside_pole(params, a, 1) if pole_left else a
    end = _beside_pole(params, b, -1) if pole_right else b

    if not start < end:
        return []

    nodes = [start, *sigma[(sigma > start) & (sigma < end)], end]
    values = [f_at(node) for node in nodes]

    keep = [idx for idx, value in enumerate(values) if math.isfinite(value)]
    nodes = [nodes[idx] for idx in keep]
    values = [values[idx] for idx in keep]

    # F running from one side of the gap to the other passes 0, hence a band in between.
    refined_nodes, refined_values = nodes[:1], values[:1]
    for (u, fu), (v, fv) in zip(zip(nodes, values), zip(nodes[1:], values[1:])):
        if fu * fv < 0 and abs(fu) > 2 and abs(fv) > 2:
            zero = optimize.brentq(f_at, u, v, xtol=EDGE_XTOL)
            refined_nodes.append(zero)
            refined_values.append(0.0)

        refined_nodes.append(v)
        refined_values.append(fv)

    gap = [abs(value) - 2 - EDGE_SLACK for value in refined_values]

    def gap_at(point):
        return abs(f_at(point)) - 2 - EDGE_SLACK

    return [
        optimize.brentq(gap_at, u, v, xtol=EDGE_XTOL)
        for u, v, gu, gv in zip(refined_nodes, refined_nodes[1:], gap, gap[1:])
        if gu * gv < 0
    ]


def _classify(params: NecklaceParams, window: Interval, cuts: List[float]) -> Tuple[List[Interval], List[Interval]]:
    f_at = _f_at(params)
    bounds = [window[0], *sorted(set(cuts)), window[1]]

    labelled = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if not hi > lo:
            continue

        mid_value = f_at((lo + hi) / 2)
        in_band = math.isfinite(mid_value) and abs(mid_value) < 2

        if labelled and labelled[-1][2] == in_band:
            labelled[-1] = (labelled[-1][0], hi, in_band)
        else:
            labelled.append((lo, hi, in_band))

    bands = [(lo, hi) for lo, hi, in_band in labelled if in_band]
    gaps = [(lo, hi) for lo, hi, in_band in labelled if not in_band]
    return bands, gaps


def scan_bands(params: NecklaceParams, window: Interval, grid: int = DEFAULT_GRID) -> BandStructure:
    """
    Scans the window for bands |F| < 2, gaps and poles of F.

    :param params: necklace period with l3 set
    :param window: (sigma_min, sigma_max), positive and ordered
    :param grid: sample count, at least 2

    :return: BandStructure
    """

    _check_window(window, grid)
    window = (float(window[0]), float(window[1]))

    sigma = np.linspace(*window, grid)
    _, mask, kernel = discriminant_kernel(params, sigma)

    if np.all(mask):
        logger.warning("Every sample is a pole of F, the window is one gap")
        return BandStructure(window, [], [window], [], degenerate=True)

    poles, advisories = _refine_poles(params, sigma, kernel.dn)
    logger.info(f"Found {len(poles)} pole(s) in {window}")

    edges = []
    for piece in _pieces(window, poles):
        edges.extend(_edges_in_piece(params, sigma, piece))

    bands, gaps = _classify(params, window, [*edges, *poles])
    logger.info(f"Found {len(bands)} band(s) and {len(gaps)} gap(s)")

    return BandStructure(window, bands, gaps, poles, advisories)
