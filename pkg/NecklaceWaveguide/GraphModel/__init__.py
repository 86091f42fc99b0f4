from typing import Sequence, Tuple

import numpy as np

from Errors import InvalidParameters


def as_square_matrix(rows: Sequence, size: int, field: str = "A", dtype=float) -> np.ndarray:
    """
    Converts nested sequence into (size, size) array, reporting field path on failure.

    :param rows: nested row-major sequence, or flat sequence of size*size numbers
    :param size: expected dimension
    :param field: dotted path of the value for error messages
    :param dtype: numpy dtype of result

    :return: read-only (size, size) ndarray

    >>> as_square_matrix([[1, 2], [2, 1]], 2).tolist()
    [[1.0, 2.0], [2.0, 1.0]]
    >>> as_square_matrix([0] * 9, 3).shape
    (3, 3)
    """

    try:
        array = np.array(rows, dtype=dtype)
    except (TypeError, ValueError) as err:
        raise InvalidParameters(f"{field}: expected {size}x{size} numeric matrix") from err

    if array.shape == (size * size,):
        array = array.reshape(size, size)

    if array.shape != (size, size):
        raise InvalidParameters(f"{field}: expected {size}x{size} matrix, got shape {array.shape}")

    if not np.all(np.isfinite(array)):
        bad_row, bad_col = np.argwhere(~np.isfinite(array))[0]
        raise InvalidParameters(f"{field}[{bad_row}][{bad_col}]: value is not finite")

    array.setflags(write=False)
    return array


def max_asymmetry(matrix: np.ndarray) -> Tuple[float, Tuple[int, int]]:
    """
    Largest |a_ij - a_ji| and the (i, j) pair where it occurs, with i < j.

    >>> max_asymmetry(np.array([[0., .5], [.4, 0.]]))
    (0.09999999999999998, (0, 1))
    """

    diff = np.abs(matrix - matrix.T)
    row, col = np.unravel_index(int(np.argmax(np.triu(diff))), diff.shape)
    return float(diff[row, col]), (int(row), int(col))
