"""
Arch matrices S, C, P = C + SB at one wavenumber, and the loop scalars (m, n) built from them.

n = <delta, (I - P^2)^-1 S delta>, m = c + <delta, (I - P^2)^-1 P S delta>
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple

import numpy as np

from Errors import InvalidParameters, LoopSingular

if TYPE_CHECKING:
    from GraphModel.NecklaceParams import NecklaceParams


# |det(I - P^2)| below this, scaled by max(1, ||I - P^2||^2), counts as singular.
LOOP_DET_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class TrigMatrices:
    s: np.ndarray
    c: np.ndarray
    p: np.ndarray
    sigma: float


class LoopScalars(NamedTuple):
    m: float
    n: float


def trig_matrices(params: NecklaceParams, sigma: float) -> TrigMatrices:
    """
    :param params: necklace period, l3 is not used
    :param sigma: wavenumber, positive

    :return: TrigMatrices holding S, C and P
    """

    if not sigma > 0:
        raise InvalidParameters(f"sigma must be positive, got {sigma}")

    a11, a12, a22, *_ = params.entries(sigma)
    b = np.array([[a11, a12], [a12, a22]], dtype=float)

    phases = sigma * np.array([params.l1, params.l2])
    s = np.diag(np.sin(phases))
    c = np.diag(np.cos(phases))

    return TrigMatrices(s, c, c + s @ b, sigma)


def _inverse_2x2(matrix: np.ndarray, sigma: float) -> np.ndarray:
    (q11, q12), (q21, q22) = matrix
    det = q11 * q22 - q12 * q21

    if abs(det) <= LOOP_DET_TOL * max(1.0, float(np.sum(matrix ** 2))):
        raise LoopSingular(f"I - P^2 is singular at sigma = {sigma!r}, det = {det:.3e}")

    return np.array([[q22, -q12], [-q21, q11]]) / det


def loop_scalars(params: NecklaceParams, sigma: float) -> LoopScalars:
    """
    Direct form with a closed 2x2 inverse of I - P^2.

    :raises LoopSingular: at poles of (I - P^2)^-1, including removable ones like sin(sigma * l) = 0
    """

    trig = trig_matrices(params, sigma)
    *_, d1, d2, c = params.entries(sigma)
    delta = np.array([d1, d2], dtype=float)

    inverse = _inverse_2x2(np.eye(2) - trig.p @ trig.p, sigma)

    n = delta @ inverse @ trig.s @ delta
    m = c + delta @ inverse @ trig.p @ trig.s @ delta
    return LoopScalars(float(m), float(n))


def loop_scalars_factored(params: NecklaceParams, sigma: float) -> LoopScalars:
    """
    Same scalars through (I - P^2)^-1 = [(I - P)^-1 + (I + P)^-1] / 2, less cancellation near poles.
    """

    trig = trig_matrices(params, sigma)
    *_, d1, d2, c = params.entries(sigma)
    delta = np.array([d1, d2], dtype=float)
    identity = np.eye(2)

    minus = _inverse_2x2(identity - trig.p, sigma) @ trig.s
    plus = _inverse_2x2(identity + trig.p, sigma) @ trig.s

    n = delta @ (minus + plus) @ delta / 2
    m = c + delta @ (minus - plus) @ delta / 2
    return LoopScalars(float(m), float(n))
