"""
Gluing data at the degree-3 junctions and its link to the junction scattering matrix.

Component order is fixed: 1, 2 are the loop arches (lengths l1, l2), 3 is the straight edge.
The gluing condition reads d/dz psi = sigma * A psi at z = 0, z pointing away from the vertex.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence, Tuple, Union

import numpy as np

from LoggingConfigurator import logger
from Errors import AsymmetricCondition, InvalidParameters, NonUnitaryInput, SingularConversion
from . import as_square_matrix, max_asymmetry
from .WaveContext import WaveContext


INPUT_SYMMETRY_TOL = 1e-12
OUTPUT_SYMMETRY_TOL = 1e-10
SINGULAR_DET_TOL = 1e-8
UNITARY_TOL = 1e-9

# (a11, a12, a22, delta1, delta2, c) - what the loop kernels consume.
Entries = Tuple[Union[float, np.ndarray], ...]


@dataclass(frozen=True, eq=False)
class VertexCondition:
    """
    Construction does not check symmetry, validate_vertex_condition() does. Consumers read the upper
    triangle only, through entries() or symmetric(), so an unvalidated matrix is seen the same way everywhere.
    """

    a: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", as_square_matrix(self.a, 3))

    @classmethod
    def from_blocks(cls, b: Sequence, delta: Sequence[float], c: float) -> VertexCondition:
        """
        Builds A = [[B, delta], [delta^T, c]].

        >>> VertexCondition.from_blocks([[1, .5], [.5, 2]], (1, 2), .3).a[2].tolist()
        [1.0, 2.0, 0.3]
        """

        a = np.zeros((3, 3))
        a[:2, :2] = b
        a[:2, 2] = delta
        a[2, :2] = delta
        a[2, 2] = c
        return cls(a)

    @property
    def b(self) -> np.ndarray:
        return self.a[:2, :2]

    @property
    def delta(self) -> np.ndarray:
        return self.a[:2, 2]

    @property
    def c(self) -> float:
        return float(self.a[2, 2])

    def entries(self, sigma=None) -> Entries:
        """
        Unique entries used by the loop kernels. Sigma is accepted for interface parity with the table.
        """

        a = self.a
        return float(a[0, 0]), float(a[0, 1]), float(a[1, 1]), float(a[0, 2]), float(a[1, 2]), float(a[2, 2])

    def symmetric(self) -> np.ndarray:
        """
        Matrix spanned by entries(): upper triangle mirrored below the diagonal.

        >>> VertexCondition([[0, 1, 2], [5, 0, 3], [5, 5, 0]]).symmetric()[2].tolist()
        [2.0, 3.0, 0.0]
        """

        return np.triu(self.a) + np.triu(self.a, 1).T

    def arch_relabel(self) -> VertexCondition:
        """
        Swaps components 1 and 2, i.e. relabels the two arches.
        """

        order = [1, 0, 2]
        return VertexCondition(self.a[np.ix_(order, order)])

    def to_rows(self):
        return self.a.tolist()


class ValidationReport(NamedTuple):
    accepted: bool
    max_asymmetry: float
    # 1-based, as in the AsymmetricCondition message
    index_pair: Tuple[int, int]


def validate_vertex_condition(vc: VertexCondition, strict=False, tol=INPUT_SYMMETRY_TOL) -> ValidationReport:
    """
    Checks symmetry of A. Accepts iff max |a_ij - a_ji| < tol.

    :param vc: vertex condition to check
    :param strict: raise AsymmetricCondition instead of returning a rejecting report
    :param tol: symmetry tolerance

    :return: ValidationReport

    >>> validate_vertex_condition(VertexCondition(np.zeros((3, 3)))).accepted
    True
    """

    asymmetry, (row, col) = max_asymmetry(vc.a)
    pair = (row + 1, col + 1)
    report = ValidationReport(asymmetry < tol, asymmetry, pair)

    if not report.accepted:
        logger.debug(f"Rejected vertex condition, asymmetry {asymmetry:.3e} at {pair}")
        if strict:
            raise AsymmetricCondition(pair, asymmetry)

    return report


@dataclass(frozen=True, eq=False)
class ScatteringMatrixJ:
    t: np.ndarray

    def __post_init__(self):
        t = np.array(self.t, dtype=complex)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise InvalidParameters(f"scattering matrix must be square, got shape {t.shape}")
        t.setflags(write=False)
        object.__setattr__(self, "t", t)

    @property
    def d(self) -> int:
        return self.t.shape[0]

    def defects(self) -> Tuple[float, float]:
        """
        :return: (unitarity defect max|t t* - I|, symmetry defect max|t - t^T|)
        """

        identity = np.eye(self.d)
        unitarity = float(np.max(np.abs(self.t @ self.t.conj().T - identity)))
        symmetry = float(np.max(np.abs(self.t - self.t.T)))
        return unitarity, symmetry

    def check_unitary_symmetric(self, tol=UNITARY_TOL):
        unitarity, symmetry = self.defects()

        if unitarity > tol:
            raise NonUnitaryInput(f"scattering matrix is not unitary, defect {unitarity:.3e}")
        if symmetry > tol:
            raise NonUnitaryInput(f"scattering matrix is not symmetric, defect {symmetry:.3e}")


class Conversion(NamedTuple):
    vc: VertexCondition
    residue: float


def vertex_condition_from_scattering(t: ScatteringMatrixJ) -> Conversion:
    """
    A = -i (I + T)^-1 (I - T). Real and symmetric for unitary symmetric T.

    :param t: junction scattering matrix

    :return: Conversion of vertex condition and residue (largest imaginary part or asymmetry dropped)
    """

    if t.d != 3:
        raise InvalidParameters(f"only degree-3 junctions are supported, got degree {t.d}")

    t.check_unitary_symmetric()

    identity = np.eye(3)
    det = np.linalg.det(identity + t.t)

    if abs(det) < SINGULAR_DET_TOL:
        raise SingularConversion(f"|det(I + T)| = {abs(det):.3e}, exceptional frequency")

    a_complex = -1j * np.linalg.solve(identity + t.t, identity - t.t)

    real = a_complex.real
    residue = max(float(np.max(np.abs(a_complex.imag))), max_asymmetry(real)[0])

    if residue > OUTPUT_SYMMETRY_TOL:
        logger.warning(f"Conversion residue {residue:.3e} above {OUTPUT_SYMMETRY_TOL}, |det(I + T)| = {abs(det):.3e}")

    return Conversion(VertexCondition((real + real.T) / 2), residue)


def scattering_from_vertex_condition(vc: VertexCondition) -> ScatteringMatrixJ:
    """
    Inverse Cayley map T = (I - iA)(I + iA)^-1. I + iA is invertible for every real symmetric A.

    >>> np.allclose(scattering_from_vertex_condition(VertexCondition(np.zeros((3, 3)))).t, np.eye(3))
    True
    """

    identity = np.eye(3)
    # both factors are functions of A, so they commute and solve() order is irrelevant.
    return ScatteringMatrixJ(np.linalg.solve(identity + 1j * vc.a, identity - 1j * vc.a))


class VertexConditionTable:
    """
    Frequency dependent vertex data: (eps*omega, A) samples with piecewise-linear interpolation.
    Only for scans, design math needs a constant VertexCondition.
    """

    def __init__(self, eps_omega: Sequence[float], conditions: Sequence[VertexCondition], wave: WaveContext):
        order = np.argsort(eps_omega)

        self.eps_omega = np.asarray(eps_omega, dtype=float)[order]
        self.conditions = [conditions[idx] for idx in order]
        self.wave = wave

        if len(self.eps_omega) < 2:
            raise InvalidParameters("necklace.A_table: need at least two samples")

        if np.any(np.diff(self.eps_omega) <= 0):
            raise InvalidParameters("necklace.A_table: eps_omega values must be distinct")

        self._stack = np.stack([vc.a for vc in self.conditions])

    def at_sigma(self, sigma: float) -> VertexCondition:
        return VertexCondition(np.array([[self._interp(sigma, i, j) for j in range(3)] for i in range(3)]))

    def _interp(self, sigma, row, col):
        eps_omega = self.wave.eps_omega_from_sigma(np.asarray(sigma, dtype=float))
        return np.interp(eps_omega, self.eps_omega, self._stack[:, row, col])

    def entries(self, sigma) -> Entries:
        """
        Entries interpolated at each sigma; values outside the table are clamped to its ends.
        """

        pairs = ((0, 0), (0, 1), (1, 1), (0, 2), (1, 2), (2, 2))
        return tuple(self._interp(sigma, row, col) for row, col in pairs)

    def to_json_list(self):
        return [{"eps_omega": float(eo), "A": vc.to_rows()} for eo, vc in zip(self.eps_omega, self.conditions)]

