import numpy as np


# relative to max(1, ||T||^2), absolute 1e-12 is below float resolution for large entries.
DET_TOL = 1e-12


def rotation(theta: float) -> np.ndarray:
    """
    Transfer across a straight segment of phase length theta = sigma * l.

    >>> rotation(0.0).tolist()
    [[1.0, 0.0], [-0.0, 1.0]]
    """

    cos, sin = np.cos(theta), np.sin(theta)
    return np.array([[cos, sin], [-sin, cos]])


def hs_norm_sq(matrix: np.ndarray) -> float:
    """
    Squared Hilbert-Schmidt norm.

    >>> hs_norm_sq(np.eye(2))
    2.0
    """

    return float(np.sum(np.abs(matrix) ** 2))


def unimodular_defect(matrix: np.ndarray) -> float:
    """
    |det - 1| scaled by max(1, ||matrix||^2).
    """

    return abs(float(np.linalg.det(matrix)) - 1) / max(1.0, hs_norm_sq(matrix))


if __name__ == '__main__':
    import doctest
    doctest.testmod(verbose=True)
