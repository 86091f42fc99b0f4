"""
Stages of the slow-light design: tangent variables (x, y), arch lengths, segment length.

Near the point x0 = a11 - a12 d1 / d2, y0 = a22 - a12 d2 / d1 both num1 and den1 vanish, so the transparency
curve and the pole curve of n meet there with the common slope -(d2 / d1)^2. Detuning x by eps and solving
the transparency condition for y keeps sigma0 transparent while a pole of F lands O(eps^2) away.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, NamedTuple, Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial

from LoggingConfigurator import logger
from Errors import Degenerate, InvalidParameters, NoRoot, TangentDirection, VerificationMismatch
from GraphModel.NecklaceParams import NecklaceParams, load_vertex_data
from GraphModel.VertexCondition import VertexCondition
from Monodromy.TangentForms import tangent_fractions, transparency_value
from Monodromy.Transfer import loop_transfer, monodromy

if TYPE_CHECKING:
    from .Verification import Diagnostics


DEFAULT_CELLS = 10

TRANSPARENCY_TOL = 1e-10
BRACKET_FACTOR = 10
MIN_BRACKET = 1e-3
REAL_ROOT_TOL = 1e-9
# |sin| of angle between (l1, l2) motion and the design curve tangent.
TANGENT_TOL = 1e-6
L3_TOL = 1e-10


class XYSolution(NamedTuple):
    x: float
    y: float
    gamma: float


class ArchLengths(NamedTuple):
    l1: float
    l2: float
    offsets: Tuple[int, int]
    swapped: bool


@dataclass(frozen=True, eq=False)
class DesignRequest:
    vc: VertexCondition
    sigma0: float
    eps: float
    branch_offsets: Optional[Tuple[int, int]] = None
    n_cells: int = DEFAULT_CELLS
    period_length: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.sigma0) and self.sigma0 > 0):
            raise InvalidParameters(f"design.sigma0: must be positive, got {self.sigma0}")

        if not (math.isfinite(self.eps) and self.eps > 0):
            raise InvalidParameters(f"design.eps: must be positive, got {self.eps}")

        if self.n_cells < 1:
            raise InvalidParameters(f"truncation.n_cells: must be positive, got {self.n_cells}")

        if self.branch_offsets is not None:
            object.__setattr__(self, "branch_offsets", tuple(int(m) for m in self.branch_offsets))

    @property
    def ratio(self) -> float:
        """
        delta2 / delta1
        """

        return self.vc.delta[1] / self.vc.delta[0]

    def with_eps(self, eps: float) -> DesignRequest:
        return DesignRequest(self.vc, self.sigma0, eps, self.branch_offsets, self.n_cells, self.period_length)

    @classmethod
    def from_json_dict(cls, design: dict, necklace: dict, n_cells: int = DEFAULT_CELLS,
                       period_length: Optional[float] = None) -> DesignRequest:
        vc, _ = load_vertex_data(necklace, "necklace")

        if not isinstance(vc, VertexCondition):
            raise InvalidParameters("necklace.A_table: design needs a constant vertex condition")

        try:
            sigma0, eps = float(design["sigma0"]), float(design["eps"])
        except KeyError as err:
            raise InvalidParameters(f"design.{err.args[0]}: missing") from err
        except (TypeError, ValueError) as err:
            raise InvalidParameters("design: sigma0 and eps must be numbers") from err

        offsets = design.get("branch_offsets")
        if offsets is not None and (not isinstance(offsets, list) or len(offsets) != 2):
            raise InvalidParameters("design.branch_offsets: expected two integers")

        return cls(vc, sigma0, eps, offsets, n_cells, period_length)

    def to_json_dict(self) -> dict:
        return {
            "A": self.vc.to_rows(),
            "sigma0": self.sigma0,
            "eps": self.eps,
            "branch_offsets": None if self.branch_offsets is None else list(self.branch_offsets),
            "n_cells": self.n_cells,
            "period_length": self.period_length,
        }


@dataclass(frozen=True, eq=False)
class DesignResult:
    request: DesignRequest
    vc: VertexCondition
    x: float
    y: float
    gamma: float
    l1: float
    l2: float
    l3: float
    branch_offsets: Tuple[int, int]
    swapped: bool
    diagnostics: Diagnostics = field(repr=False)

    @property
    def params(self) -> NecklaceParams:
        return NecklaceParams(self.l1, self.l2, self.l3, self.vc)

    def to_json_dict(self) -> dict:
        return {
            "request": self.request.to_json_dict(),
            "A": self.vc.to_rows(),
            "x": self.x,
            "y": self.y,
            "gamma": self.gamma,
            "l1": self.l1,
            "l2": self.l2,
            "l3": self.l3,
            "branch_offsets": list(self.branch_offsets),
            "swapped": self.swapped,
            "diagnostics": self.diagnostics.to_json_dict(),
        }


def vertex_point(request: DesignRequest) -> Tuple[float, float]:
    """
    (x0, y0) where num1 and den1 vanish together.
    """

    a11, a12, a22, d1, d2, _ = request.vc.entries()
    return a11 - a12 * d1 / d2, a22 - a12 * d2 / d1


def _solve_y(request: DesignRequest, eps: float) -> Tuple[float, float]:
    """
    Root of the transparency condition in y for x = x0 + eps, nearest to the linear seed.
    Cleared of denominators the condition is quadratic in y.
    """

    entries = request.vc.entries()
    c = entries[5]
    x0, y0 = vertex_point(request)
    x = float(x0 + eps)

    fractions = tangent_fractions(entries, x, Polynomial([0.0, 1.0]))
    quadratic = (c * fractions.den1 + fractions.num1) * (c * fractions.den2 - fractions.num2) \
        + fractions.den1 * fractions.den2

    roots = quadratic.roots()
    real_roots = [root.real for root in np.atleast_1d(roots) if abs(root.imag) <= REAL_ROOT_TOL * max(1.0, abs(root))]

    seed = float(y0 - request.ratio ** 2 * eps)
    half_width = max(BRACKET_FACTOR * request.ratio ** 2 * eps, MIN_BRACKET)

    for width in (half_width, BRACKET_FACTOR * half_width):
        inside = [root for root in real_roots if abs(root - seed) <= width]
        if inside:
            break
    else:
        raise NoRoot(f"no transparent y within {BRACKET_FACTOR * half_width:.3e} of {seed!r} for eps = {eps}")

    y = float(min(inside, key=lambda root: abs(root - seed)))

    residual = transparency_value(entries, x, y)
    if not abs(residual) < TRANSPARENCY_TOL:
        raise NoRoot(f"transparency residual {residual:.3e} at x = {x!r}, y = {y!r}")

    return x, y


def design_xy(request: DesignRequest) -> XYSolution:
    """
    x = x0 + eps, y solving the transparency condition near y0 - (d2 / d1)^2 eps,
    gamma = coefficient of eps^2 in y, extrapolated from eps and eps / 2.

    :raises Degenerate: when an arch is decoupled (delta1 * delta2 == 0)
    :raises NoRoot: when no real transparent y is found near the seed
    """

    d1, d2 = request.vc.delta
    if d1 * d2 == 0:
        raise Degenerate(f"both arches must couple to the straight edge, got delta = ({d1}, {d2})")

    _, y0 = vertex_point(request)
    ratio_sq = request.ratio ** 2

    def quadratic_part(eps):
        _, y_eps = _solve_y(request, eps)
        return (y_eps - y0 + ratio_sq * eps) / eps ** 2

    x, y = _solve_y(request, request.eps)
    gamma = float(2 * quadratic_part(request.eps / 2) - quadratic_part(request.eps))

    logger.info(f"x = {x!r}, y = {y!r}, gamma = {gamma!r}")
    return XYSolution(x, y, gamma)


def _arch_length(tangent: float, sigma0: float, offset: Optional[int]) -> Tuple[float, int]:
    angle = math.atan(tangent)

    if offset is None:
        offset = 0 if angle > 0 else 1

    length = 2 / sigma0 * (angle + math.pi * offset)

    if not length > 0:
        raise InvalidParameters(f"branch offset {offset} gives non-positive length {length}")

    return length, offset


def default_offsets(x: float, y: float) -> Tuple[int, int]:
    """
    Offsets giving the smallest positive lengths.

    >>> default_offsets(1.0, -1.0)
    (0, 1)
    """

    return int(math.atan(x) <= 0), int(math.atan(y) <= 0)


def lengths_from_xy(x: float, y: float, sigma0: float, branch_offsets: Optional[Tuple[int, int]] = None) -> ArchLengths:
    """
    l_j = (2 / sigma0)(atan(.) + pi m_j). Swaps so that l2 <= l1, the caller relabels the arches then.

    :param x: tan(sigma0 l1 / 2)
    :param y: tan(sigma0 l2 / 2)
    :param sigma0: target wavenumber
    :param branch_offsets: (m1, m2), None picks the smallest positive lengths

    >>> round(lengths_from_xy(1.0, 1.0, 1.0, (0, 0)).l1 / math.pi, 12)
    0.5
    """

    if not sigma0 > 0:
        raise InvalidParameters(f"sigma0 must be positive, got {sigma0}")

    m1, m2 = (None, None) if branch_offsets is None else branch_offsets
    l1, m1 = _arch_length(x, sigma0, m1)
    l2, m2 = _arch_length(y, sigma0, m2)

    if l2 > l1:
        return ArchLengths(l2, l1, (m1, m2), True)

    return ArchLengths(l1, l2, (m1, m2), False)


def check_direction(request: DesignRequest, x: float, y: float, arches: ArchLengths):
    """
    Rejects when (dx/dsigma, dy/dsigma) runs along the design curves at the vertex.

    :raises TangentDirection: when |sin| of the angle between them is below TANGENT_TOL
    """

    first, second = (arches.l2, arches.l1) if arches.swapped else (arches.l1, arches.l2)
    motion = np.array([first * (1 + x ** 2) / 2, second * (1 + y ** 2) / 2])
    tangent = np.array([1.0, -request.ratio ** 2])

    sine = abs(motion[0] * tangent[1] - motion[1] * tangent[0]) / (np.linalg.norm(motion) * np.linalg.norm(tangent))

    if sine < TANGENT_TOL:
        raise TangentDirection(f"arch motion is tangent to the design curve, |sin| = {sine:.3e}")


def choose_l3(params: NecklaceParams, sigma0: float) -> float:
    """
    Smallest positive l3 with Tr(R(sigma0 l3) T) = 0, i.e. tan(sigma0 l3) = -(t11 + t22) / (t21 - t12).

    :param params: period whose l3 is ignored
    :param sigma0: target wavenumber
    """

    t_mat = loop_transfer(params, sigma0).t_mat
    trace = t_mat[0, 0] + t_mat[1, 1]
    skew = t_mat[1, 0] - t_mat[0, 1]

    scale = max(1.0, float(np.max(np.abs(t_mat))))

    if abs(trace) <= L3_TOL * scale and abs(skew) <= L3_TOL * scale:
        logger.warning(f"Any l3 zeroes F at sigma0 = {sigma0!r}, using pi / sigma0")
        theta = math.pi
    else:
        theta = math.atan2(-trace, skew) % math.pi
        if theta <= L3_TOL:
            theta = math.pi

    l3 = theta / sigma0

    f = monodromy(params.with_l3(l3), sigma0).f
    if not abs(f) < L3_TOL:
        raise VerificationMismatch(f"F(sigma0) = {f:.3e} after choosing l3 = {l3!r}")

    return l3
