"""
Loop transfer T, period monodromy M = R(sigma * l3) T and the Hill discriminant F = Tr M.

Everything goes through a homogeneous kernel: with qu = det(I - P), qv = det(I + P)

    m + n = pu / qu,    m - n = pv / qv
    m = Dm / W,         n = Dn / W,        W = 2 qu qv

so T = -(1 / Dn) [[Dm, W], [2 pu pv, Dm]] never divides by qu or qv. Zeros of W (sin(sigma * l) = 0 and the like)
cancel out of T and are not poles. Only Dn = 0 with W != 0 is.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple, Optional, Tuple

import numpy as np

from LoggingConfigurator import logger
from Errors import InvalidParameters, TransferPole
from . import rotation, hs_norm_sq

if TYPE_CHECKING:
    from GraphModel.NecklaceParams import NecklaceParams


# |n| < POLE_TOL * max(1, |m|), written homogeneously as |Dn| <= POLE_TOL * max(|W|, |Dm|).
POLE_TOL = 1e-9


class LoopKernel(NamedTuple):
    """
    Homogeneous loop quantities, scalars or arrays matching sigma.
    """

    pu: np.ndarray
    pv: np.ndarray
    qu: np.ndarray
    qv: np.ndarray
    dm: np.ndarray
    dn: np.ndarray
    w: np.ndarray

    @property
    def pole_mask(self):
        return np.abs(self.dn) <= POLE_TOL * np.maximum(np.abs(self.w), np.abs(self.dm))


def loop_kernel(params: NecklaceParams, sigma) -> LoopKernel:
    """
    Vectorised over sigma. Works on frequency tables too since entries() interpolates per sigma.

    :param params: necklace period
    :param sigma: scalar or ndarray of wavenumbers

    :return: LoopKernel
    """

    sigma = np.asarray(sigma, dtype=float)
    a11, a12, a22, d1, d2, c = params.entries(sigma)

    s1, c1 = np.sin(sigma * params.l1), np.cos(sigma * params.l1)
    s2, c2 = np.sin(sigma * params.l2), np.cos(sigma * params.l2)

    # P = C + S B
    p11 = c1 + s1 * a11
    p12 = s1 * a12
    p21 = s2 * a12
    p22 = c2 + s2 * a22

    cross = d1 * d2 * (p12 * s2 + p21 * s1)

    qu = (1 - p11) * (1 - p22) - p12 * p21
    qv = (1 + p11) * (1 + p22) - p12 * p21

    # <delta, adj(I -+ P) S delta>
    pu = c * qu + (d1 ** 2 * (1 - p22) * s1 + cross + d2 ** 2 * (1 - p11) * s2)
    pv = c * qv - (d1 ** 2 * (1 + p22) * s1 - cross + d2 ** 2 * (1 + p11) * s2)

    return LoopKernel(pu, pv, qu, qv, pu * qv + pv * qu, pu * qv - pv * qu, 2 * qu * qv)


def discriminant_kernel(params: NecklaceParams, sigma) -> Tuple[np.ndarray, np.ndarray, LoopKernel]:
    """
    Hill discriminant over a sigma grid.

    :param params: necklace period with l3 set
    :param sigma: ndarray of wavenumbers

    :return: (F with NaN at poles, boolean pole mask, kernel)
    """

    kernel = loop_kernel(params, sigma)
    theta = np.asarray(sigma, dtype=float) * params.require_l3()

    numerator = 2 * np.cos(theta) * kernel.dm + 2 * np.sin(theta) * (kernel.pu * kernel.pv - kernel.qu * kernel.qv)
    mask = kernel.pole_mask

    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(mask, np.nan, -numerator / np.where(mask, 1.0, kernel.dn))

    return f, mask, kernel


@dataclass(frozen=True, eq=False)
class LoopTransfer:
    m: float
    n: float
    t_mat: np.ndarray

    @property
    def transparency_residual(self) -> float:
        """
        m^2 - n^2 + 1, zero exactly when t_mat is orthogonal.
        """

        return self.m ** 2 - self.n ** 2 + 1


@dataclass(frozen=True, eq=False)
class Monodromy:
    m_mat: np.ndarray
    f: float
    sigma: float
    transfer: LoopTransfer

    @property
    def norm_sq(self) -> float:
        return hs_norm_sq(self.m_mat)


def loop_transfer(params: NecklaceParams, sigma: float) -> LoopTransfer:
    """
    T = -[[m/n, 1/n], [(m^2 - n^2)/n, m/n]].

    :raises TransferPole: where n vanishes
    """

    if not sigma > 0:
        raise InvalidParameters(f"sigma must be positive, got {sigma}")

    kernel = loop_kernel(params, sigma)

    if kernel.pole_mask:
        raise TransferPole(f"n = 0 at sigma = {sigma!r}, loop transfer has a pole")

    dn = float(kernel.dn)
    t_mat = -np.array([[kernel.dm, kernel.w], [2 * kernel.pu * kernel.pv, kernel.dm]], dtype=float) / dn

    # m, n themselves blow up where W -> 0 even though T stays finite.
    with np.errstate(divide="ignore", invalid="ignore"):
        m, n = float(kernel.dm / kernel.w), float(dn / kernel.w)

    return LoopTransfer(m, n, t_mat)


def monodromy(params: NecklaceParams, sigma: float) -> Monodromy:
    transfer = loop_transfer(params, sigma)
    m_mat = rotation(sigma * params.require_l3()) @ transfer.t_mat
    return Monodromy(m_mat, float(np.trace(m_mat)), sigma, transfer)


def hill_discriminant(params: NecklaceParams, sigma: float) -> Optional[float]:
    """
    F(sigma) = Tr M, or None at a pole of F.

    >>> from GraphModel.NecklaceParams import NecklaceParams
    >>> from GraphModel.VertexCondition import VertexCondition
    >>> import math
    >>> vc = VertexCondition.from_blocks([[0, 0], [0, 0]], (math.sqrt(.5), math.sqrt(.5)), 0)
    >>> round(hill_discriminant(NecklaceParams(math.pi / 2, math.pi / 2, math.pi / 2, vc), 1.0), 12)
    2.0
    """

    try:
        return monodromy(params, sigma).f
    except TransferPole:
        logger.debug(f"Pole of F at sigma = {sigma!r}")
        return None
