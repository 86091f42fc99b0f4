"""
Direct scattering solve on the finite graph, independent of the transfer-matrix algebra.

Edges of loop j: arches 3j, 3j + 1, segment 3j + 2 (none after the last loop).
On an edge of length l: psi(s) = a cos(sigma s) + b sin(sigma s), s measured from the left junction.
Outward derivatives divided by sigma:
    left end:   value a,                       derivative b
    right end:  value a cos + b sin,           derivative a sin - b cos
Lead with incoming amplitude inc and unknown outgoing amplitude out:
    value inc + out,  derivative -i inc + i out
Each junction contributes three rows  deriv_i - sum_j A_ij value_j = 0,  2N junctions, 6N unknowns.
"""

from __future__ import annotations

import warnings
from typing import TYPE_CHECKING, Dict, List, Tuple

import numpy as np
from scipy import linalg

from LoggingConfigurator import logger
from Errors import InvalidParameters, SingularSystem
from .TruncatedNecklace import ScatterResult, TruncatedNecklace

if TYPE_CHECKING:
    from GraphModel.NecklaceParams import NecklaceParams


INCIDENT_SIDES = ("left", "right")

# linear form: ({column: coefficient}, constant)
Form = Tuple[Dict[int, complex], complex]


def _edge_lengths(params: NecklaceParams, n_cells: int) -> List[float]:
    lengths = []
    for cell in range(n_cells):
        lengths.extend((params.l1, params.l2))
        if cell < n_cells - 1:
            lengths.append(params.require_l3())
    return lengths


def _left_end(edge: int) -> Tuple[Form, Form]:
    return ({2 * edge: 1.0}, 0), ({2 * edge + 1: 1.0}, 0)


def _right_end(edge: int, phase: float) -> Tuple[Form, Form]:
    cos, sin = np.cos(phase), np.sin(phase)
    value = ({2 * edge: cos, 2 * edge + 1: sin}, 0)
    derivative = ({2 * edge: sin, 2 * edge + 1: -cos}, 0)
    return value, derivative


def _lead(column: int, incoming: float) -> Tuple[Form, Form]:
    return ({column: 1.0}, incoming), ({column: 1j}, -1j * incoming)


def assemble_system(tn: TruncatedNecklace, sigma: float, incident="left") -> Tuple[np.ndarray, np.ndarray]:
    """
    Builds the 6N x 6N complex system. The two last columns are the outgoing amplitudes on the left and right lead.

    :param tn: truncated necklace
    :param sigma: wavenumber
    :param incident: "left" or "right", lead carrying the unit incoming wave

    :return: (matrix, right hand side)
    """

    if incident not in INCIDENT_SIDES:
        raise InvalidParameters(f"incident must be one of {INCIDENT_SIDES}, got {incident!r}")

    n_cells = tn.n_cells
    lengths = _edge_lengths(tn.params, n_cells)
    n_edges = len(lengths)
    size = 2 * n_edges + 2

    left_col, right_col = 2 * n_edges, 2 * n_edges + 1
    left_in, right_in = (1.0, 0.0) if incident == "left" else (0.0, 1.0)

    a = tn.params.condition_at(sigma).symmetric()

    junctions = []
    for cell in range(n_cells):
        arch1, arch2, segment = 3 * cell, 3 * cell + 1, 3 * cell + 2

        straight_in = _lead(left_col, left_in) if cell == 0 else _right_end(segment - 3, sigma * lengths[segment - 3])
        junctions.append((_left_end(arch1), _left_end(arch2), straight_in))

        straight_out = _lead(right_col, right_in) if cell == n_cells - 1 else _left_end(segment)
        junctions.append((
            _right_end(arch1, sigma * lengths[arch1]),
            _right_end(arch2, sigma * lengths[arch2]),
            straight_out,
        ))

    assert len(junctions) * 3 == size, "junction rows do not match unknowns"

    matrix = np.zeros((size, size), dtype=complex)
    rhs = np.zeros(size, dtype=complex)

    for junction_idx, components in enumerate(junctions):
        for i in range(3):
            row = 3 * junction_idx + i

            terms = [(components[i][1], 1.0)] + [(components[j][0], -a[i, j]) for j in range(3)]

            for (coefficients, constant), weight in terms:
                for column, value in coefficients.items():
                    matrix[row, column] += weight * value
                rhs[row] -= weight * constant

    return matrix, rhs


def solve_scattering_oracle(tn: TruncatedNecklace, sigma: float, incident="left") -> ScatterResult:
    """
    Solves the finite graph with a unit wave coming in from one lead.

    :param tn: truncated necklace
    :param sigma: positive wavenumber
    :param incident: "left" or "right"

    :return: ScatterResult, r on the incident lead and t on the other

    :raises SingularSystem: at exceptional sigma where the graph has a bound state
    """

    if not sigma > 0:
        raise InvalidParameters(f"sigma must be positive, got {sigma}")

    matrix, rhs = assemble_system(tn, sigma, incident)

    with warnings.catch_warnings():
        warnings.simplefilter("error", linalg.LinAlgWarning)

        try:
            solution = linalg.solve(matrix, rhs)
        except (linalg.LinAlgError, linalg.LinAlgWarning) as err:
            raise SingularSystem(f"scattering system is singular at sigma = {sigma!r}") from err

    out_left, out_right = solution[-2], solution[-1]
    r, t = (out_left, out_right) if incident == "left" else (out_right, out_left)

    result = ScatterResult.from_amplitudes(r, t)
    logger.debug(f"sigma = {sigma!r}, N = {tn.n_cells}: |r| = {abs(r):.3e}, defect {result.unitarity_defect:.3e}")
    return result
