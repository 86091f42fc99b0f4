"""
N-cell truncated necklace and its closed-form scattering quantities.

Truncation is junction terminated: N loops, N - 1 segments between them, leads glued as the straight component
of the first and last junction. Transfer from the left lead to the right lead is then

    W = T (R T)^(N - 1) = R^-1 M^N
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple, Optional

import numpy as np
from scipy import special

from LoggingConfigurator import logger
from Errors import BandEdge, InvalidParameters, OutsideBand, PathMismatch, TransferPole
from Monodromy import rotation
from Monodromy.Transfer import loop_transfer, monodromy

if TYPE_CHECKING:
    from GraphModel.NecklaceParams import NecklaceParams


SIN_K_TOL = 1e-9
POWER_MATCH_TOL = 1e-9


@dataclass(frozen=True)
class TruncatedNecklace:
    params: NecklaceParams
    n_cells: int

    def __post_init__(self):
        if isinstance(self.n_cells, bool) or not isinstance(self.n_cells, (int, np.integer)) or self.n_cells < 1:
            raise InvalidParameters(f"truncation.n_cells: must be a positive integer, got {self.n_cells!r}")


class ScatterResult(NamedTuple):
    r: complex
    t: complex
    unitarity_defect: float

    @classmethod
    def from_amplitudes(cls, r: complex, t: complex) -> ScatterResult:
        return cls(complex(r), complex(t), abs(abs(r) ** 2 + abs(t) ** 2 - 1))


class ReflectionEstimate(NamedTuple):
    value: float
    midband_bound: Optional[float]


def chebyshev_power(m_mat: np.ndarray, n: int) -> np.ndarray:
    """
    M^N = U_(N-1)(F/2) M - U_(N-2)(F/2) I for unimodular M.

    >>> m = np.array([[2., 1.], [1., 1.]])
    >>> np.allclose(chebyshev_power(m, 5), np.linalg.matrix_power(m, 5))
    True
    """

    if n < 0:
        raise InvalidParameters(f"power must be non-negative, got {n}")

    if n == 0:
        return np.eye(2)

    if n == 1:
        return np.array(m_mat, dtype=float)

    half_trace = np.trace(m_mat) / 2
    return special.eval_chebyu(n - 1, half_trace) * m_mat - special.eval_chebyu(n - 2, half_trace) * np.eye(2)


def transfer_power(params: NecklaceParams, sigma: float, n_cells: int) -> np.ndarray:
    """
    M^N by repeated squaring, cross-checked against the Chebyshev form inside bands.

    :raises PathMismatch: when the two evaluations disagree inside a band
    """

    mono = monodromy(params, sigma)
    power = np.linalg.matrix_power(mono.m_mat, n_cells)

    if abs(mono.f) < 2:
        cheb = chebyshev_power(mono.m_mat, n_cells)
        mismatch = float(np.max(np.abs(power - cheb)))
        scale = max(1.0, float(np.linalg.norm(power)))

        if mismatch > POWER_MATCH_TOL * scale:
            raise PathMismatch(f"M^{n_cells} paths disagree by {mismatch:.3e} at sigma = {sigma!r}")

    return power


def reflection_formula(tn: TruncatedNecklace, sigma: float) -> ReflectionEstimate:
    """
    |r_N| = |sin(N k) / sin(k)| (||M||^2 - 2)^(1/2), plus the mid-band bound (2 / sqrt 3)(||M||^2 - 2)^(1/2)
    when |F| < 1. Exact on its zero set, a shape elsewhere.

    :raises OutsideBand: |F| >= 2 or sigma at a pole
    :raises BandEdge: sin k too close to 0
    """

    try:
        mono = monodromy(tn.params, sigma)
    except TransferPole as err:
        raise OutsideBand(f"sigma = {sigma!r} is a pole of F") from err

    if not abs(mono.f) < 2:
        raise OutsideBand(f"|F| = {abs(mono.f):.6g} >= 2 at sigma = {sigma!r}")

    k = math.acos(mono.f / 2)
    sin_k = math.sin(k)

    if sin_k < SIN_K_TOL:
        raise BandEdge(f"sin k = {sin_k:.3e} at sigma = {sigma!r}")

    # ||M||^2 >= 2 for unimodular M, anything below is roundoff.
    excess = math.sqrt(max(0.0, mono.norm_sq - 2))
    value = abs(math.sin(tn.n_cells * k) / sin_k) * excess

    bound = 2 / math.sqrt(3) * excess if abs(mono.f) < 1 else None
    return ReflectionEstimate(value, bound)


def lead_to_lead(tn: TruncatedNecklace, sigma: float) -> np.ndarray:
    """
    W = T (R T)^(N - 1), data (psi, psi' / sigma) at the left lead to the same at the right lead.
    """

    t_mat = loop_transfer(tn.params, sigma).t_mat
    period = rotation(sigma * tn.params.require_l3()) @ t_mat
    return t_mat @ np.linalg.matrix_power(period, tn.n_cells - 1)


def transfer_scattering(tn: TruncatedNecklace, sigma: float) -> ScatterResult:
    """
    Left-incident r, t from W (1 + r, i(1 - r)) = t (1, i).
    """

    (w11, w12), (w21, w22) = lead_to_lead(tn, sigma)

    numerator = w21 + w12 + 1j * (w22 - w11)
    denominator = w21 - w12 - 1j * (w11 + w22)

    r = -numerator / denominator
    t = w11 * (1 + r) + 1j * w12 * (1 - r)

    logger.debug(f"sigma = {sigma!r}: |r| = {abs(r):.3e} from the chain product")
    return ScatterResult.from_amplitudes(r, t)
