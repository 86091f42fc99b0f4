"""
Thin-fiber context: maps fiber frequency omega to the graph wavenumber sigma and back.

sigma = sqrt(omega^2 - lambda0 / epsilon^2), valid inside the single-mode window lambda0 < (eps * omega)^2 < lambda1.
"""

import math
from dataclasses import dataclass

from Errors import InvalidParameters, BelowThreshold, MultiMode


@dataclass(frozen=True)
class WaveContext:
    epsilon: float
    lambda0: float
    lambda1: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidParameters(f"wave.epsilon: must be positive, got {self.epsilon}")

        if not 0 < self.lambda0 < self.lambda1:
            raise InvalidParameters(
                f"wave: need 0 < lambda0 < lambda1, got lambda0={self.lambda0}, lambda1={self.lambda1}"
            )

    @property
    def threshold(self) -> float:
        """
        Threshold frequency sqrt(lambda0) / epsilon.
        """

        return math.sqrt(self.lambda0) / self.epsilon

    def eps_omega_from_sigma(self, sigma):
        """
        eps * omega for given wavenumber. Works elementwise on numpy arrays too.
        """

        return ((self.epsilon * sigma) ** 2 + self.lambda0) ** 0.5

    @classmethod
    def from_json_dict(cls, data: dict, field: str = "wave") -> "WaveContext":
        try:
            return cls(float(data["epsilon"]), float(data["lambda0"]), float(data["lambda1"]))
        except KeyError as err:
            raise InvalidParameters(f"{field}.{err.args[0]}: missing") from err
        except (TypeError, ValueError) as err:
            raise InvalidParameters(f"{field}: epsilon, lambda0, lambda1 must be numbers") from err

    def to_json_dict(self) -> dict:
        return {"epsilon": self.epsilon, "lambda0": self.lambda0, "lambda1": self.lambda1}


def sigma_from_omega(omega: float, ctx: WaveContext) -> float:
    """
    Effective 1D wavenumber of the only propagating mode.

    :param omega: fiber frequency
    :param ctx: thin-fiber context

    :return: sigma > 0

    >>> sigma_from_omega(2.0, WaveContext(1.0, 1.0, 5.0)) == math.sqrt(3)
    True
    """

    eps_omega_sq = (ctx.epsilon * omega) ** 2

    if eps_omega_sq <= ctx.lambda0:
        raise BelowThreshold(f"omega = {omega} is not above the threshold {ctx.threshold:.6g}, waves do not propagate")

    if eps_omega_sq >= ctx.lambda1:
        raise MultiMode(f"(eps*omega)^2 = {eps_omega_sq} >= lambda1 = {ctx.lambda1}, more than one mode propagates")

    return math.sqrt(omega ** 2 - ctx.lambda0 / ctx.epsilon ** 2)


def omega_from_sigma(sigma: float, ctx: WaveContext) -> float:
    """
    Inverse of sigma_from_omega.

    >>> omega_from_sigma(3.0, WaveContext(1.0, 16.0, 100.0))
    5.0
    """

    if not sigma > 0:
        raise InvalidParameters(f"sigma must be positive, got {sigma}")

    omega = math.sqrt(sigma ** 2 + ctx.lambda0 / ctx.epsilon ** 2)

    if (ctx.epsilon * omega) ** 2 >= ctx.lambda1:
        raise MultiMode(f"sigma = {sigma} maps above the second threshold lambda1 = {ctx.lambda1}")

    return omega


if __name__ == '__main__':
    import doctest
    doctest.testmod(verbose=True)
