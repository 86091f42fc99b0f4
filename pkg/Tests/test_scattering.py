import math

import numpy as np
import pytest
from scipy import optimize

from Errors import InvalidParameters, OutsideBand, PathMismatch, SingularSystem, TransferPole
from GraphModel.NecklaceParams import NecklaceParams
from GraphModel.VertexCondition import VertexCondition
from Monodromy.Transfer import discriminant_kernel, hill_discriminant, monodromy
from Spectrum.BandScan import scan_bands
from Scattering.TruncatedNecklace import (
    TruncatedNecklace, chebyshev_power, lead_to_lead, reflection_formula, transfer_power, transfer_scattering,
)
from Scattering.Oracle import assemble_system, solve_scattering_oracle
import Scattering.TruncatedNecklace as truncated_necklace

from conftest import WORKED_A, equal_arm, random_params


def _oracle_or_none(tn, sigma, incident="left"):
    try:
        return solve_scattering_oracle(tn, sigma, incident)
    except SingularSystem:
        return None


def test_truncation_validates(generic_params):
    for bad in (0, -1, 2.5, True):
        with pytest.raises(InvalidParameters):
            TruncatedNecklace(generic_params, bad)


def test_system_shape(generic_params):
    matrix, rhs = assemble_system(TruncatedNecklace(generic_params, 4), 1.7)
    assert matrix.shape == (24, 24)
    assert rhs.shape == (24,)


def test_unknown_incident_side(generic_params):
    with pytest.raises(InvalidParameters):
        assemble_system(TruncatedNecklace(generic_params, 2), 1.0, incident="top")


def test_oracle_unitary_and_reciprocal(rng):
    checked = 0

    for _ in range(1000):
        params = random_params(rng)
        tn = TruncatedNecklace(params, int(rng.integers(1, 6)))
        sigma = float(rng.uniform(0.1, 10.0))

        left = _oracle_or_none(tn, sigma, "left")
        right = _oracle_or_none(tn, sigma, "right")
        if left is None or right is None:
            continue

        assert left.unitarity_defect < 1e-10
        assert right.unitarity_defect < 1e-10
        assert abs(abs(left.t) - abs(right.t)) < 1e-10
        checked += 1

    assert checked > 900


@pytest.mark.parametrize("n_cells", [1, 5, 20])
def test_equal_arm_is_reflectionless(rng, n_cells):
    tn = TruncatedNecklace(equal_arm(length=1.0, l3=0.5), n_cells)

    # sigma = k pi carries a bound state on the loop, stay away from it
    for sigma in rng.uniform(0.2, 3.0, 20):
        assert abs(solve_scattering_oracle(tn, float(sigma)).r) < 1e-8
        assert reflection_formula(tn, float(sigma)).value < 1e-6


def test_oracle_matches_chain_product(generic_params, rng):
    tn = TruncatedNecklace(generic_params, 6)

    checked = 0

    for sigma in rng.uniform(0.5, 6.0, 200):
        sigma = float(sigma)

        # deep in a gap the chain product loses t to cancellation
        f = hill_discriminant(generic_params, sigma)
        if f is None or not abs(f) < 2:
            continue

        chain = transfer_scattering(tn, sigma)

        oracle = _oracle_or_none(tn, sigma)
        if oracle is None:
            continue

        assert abs(chain.r - oracle.r) < 1e-7
        assert abs(chain.t - oracle.t) < 1e-7
        checked += 1

    assert checked > 10


def test_lead_to_lead_is_rotated_power(generic_params):
    tn = TruncatedNecklace(generic_params, 5)
    sigma = 2.1

    rotation_inverse = np.array([[math.cos(sigma * 0.9), -math.sin(sigma * 0.9)],
                                 [math.sin(sigma * 0.9), math.cos(sigma * 0.9)]])
    expected = rotation_inverse @ transfer_power(generic_params, sigma, 5)

    assert np.allclose(lead_to_lead(tn, sigma), expected, atol=1e-9)


@pytest.mark.parametrize("n", [0, 1, 2, 7, 13])
def test_chebyshev_power(generic_params, n):
    m_mat = monodromy(generic_params, 2.1).m_mat
    expected = np.linalg.matrix_power(m_mat, n)
    assert np.allclose(chebyshev_power(m_mat, n), expected, atol=1e-9 * max(1.0, np.max(np.abs(expected))))


def test_chebyshev_rejects_negative():
    with pytest.raises(InvalidParameters):
        chebyshev_power(np.eye(2), -1)


def _band_sample(params, window=(0.5, 6.0)):
    structure = scan_bands(params, window, 2001)
    interior = [(lo, hi) for lo, hi in structure.bands if lo > window[0] and hi < window[1]]
    return max(interior, key=lambda band: band[1] - band[0])


def _principal_k(params, sigma):
    return math.acos(hill_discriminant(params, sigma) / 2)


@pytest.mark.parametrize("n_cells", [3, 7, 10])
def test_formula_zeros_are_transparent(generic_params, n_cells):
    lo, hi = _band_sample(generic_params)
    margin = 1e-6 * (hi - lo)
    k_lo, k_hi = _principal_k(generic_params, lo + margin), _principal_k(generic_params, hi - margin)

    tn = TruncatedNecklace(generic_params, n_cells)
    k_min, k_max = sorted((k_lo, k_hi))
    targets = [j * math.pi / n_cells for j in range(1, n_cells) if k_min < j * math.pi / n_cells < k_max]
    assert targets

    for target in targets:
        sigma = optimize.brentq(lambda s: _principal_k(generic_params, s) - target, lo + margin, hi - margin,
                                xtol=1e-14)

        assert reflection_formula(tn, sigma).value < 1e-8
        assert abs(solve_scattering_oracle(tn, sigma).r) < 1e-6


def test_gap_becomes_opaque(generic_params):
    sigma_grid = np.linspace(0.5, 6.0, 2001)
    f, mask, _ = discriminant_kernel(generic_params, sigma_grid)
    candidates = sigma_grid[~mask & (np.abs(f) > 3) & (np.abs(f) < 10)]
    sigma = float(candidates[0])

    n_values = np.arange(2, 13)
    transmission = [abs(solve_scattering_oracle(TruncatedNecklace(generic_params, int(n)), sigma).t)
                    for n in n_values]

    # |F| > 3 gives a decay rate above acosh(1.5) per cell
    slope, _ = np.polyfit(n_values, np.log(transmission), 1)
    assert slope < -0.5
    assert abs(solve_scattering_oracle(TruncatedNecklace(generic_params, 12), sigma).r) > 0.999


def test_formula_outside_band(generic_params):
    sigma_grid = np.linspace(0.5, 6.0, 2001)
    f, mask, _ = discriminant_kernel(generic_params, sigma_grid)
    sigma = float(sigma_grid[~mask & (np.abs(f) > 3)][0])

    with pytest.raises(OutsideBand):
        reflection_formula(TruncatedNecklace(generic_params, 3), sigma)


def test_midband_bound(generic_params):
    sigma_grid = np.linspace(0.5, 6.0, 2001)
    f, mask, _ = discriminant_kernel(generic_params, sigma_grid)
    sigma = float(sigma_grid[~mask & (np.abs(f) < 0.5)][0])

    for n_cells in range(1, 12):
        estimate = reflection_formula(TruncatedNecklace(generic_params, n_cells), sigma)
        assert estimate.midband_bound is not None
        assert estimate.value <= estimate.midband_bound * (1 + 1e-12)


def test_formula_at_pole_reports_cause():
    decoupled = NecklaceParams(1.0, 1.0, 1.0, VertexCondition(np.zeros((3, 3))))

    with pytest.raises(OutsideBand) as info:
        reflection_formula(TruncatedNecklace(decoupled, 2), 1.0)

    assert isinstance(info.value.__cause__, TransferPole)


def test_transfer_power_in_band(generic_params):
    lo, hi = _band_sample(generic_params)
    sigma = (lo + hi) / 2
    m_mat = monodromy(generic_params, sigma).m_mat

    assert np.array_equal(transfer_power(generic_params, sigma, 1), m_mat)

    power = transfer_power(generic_params, sigma, 25)
    cheb = chebyshev_power(m_mat, 25)
    assert np.max(np.abs(power - cheb)) < 1e-9 * max(1.0, np.linalg.norm(power))
    assert abs(np.linalg.det(power) - 1) < 1e-9


def test_transfer_power_identity():
    params = equal_arm(length=math.pi / 2, l3=math.pi / 2)
    assert np.allclose(transfer_power(params, 1.0, 25), np.eye(2), atol=1e-12)


def test_transfer_power_paths_must_agree(generic_params, monkeypatch):
    lo, hi = _band_sample(generic_params)
    monkeypatch.setattr(truncated_necklace, "chebyshev_power", lambda m_mat, n: np.zeros((2, 2)))

    with pytest.raises(PathMismatch):
        transfer_power(generic_params, (lo + hi) / 2, 25)

    # outside bands there is no second path to compare against
    sigma_grid = np.linspace(0.5, 6.0, 2001)
    f, mask, _ = discriminant_kernel(generic_params, sigma_grid)
    gap_sigma = float(sigma_grid[~mask & (np.abs(f) > 3)][0])
    transfer_power(generic_params, gap_sigma, 25)


def test_oracle_and_kernels_see_same_condition(rng):
    a = np.array(WORKED_A)
    a[1, 0] -= 0.3

    raw = NecklaceParams(1.3, 0.7, 0.9, VertexCondition(a))
    mirrored = NecklaceParams(1.3, 0.7, 0.9, VertexCondition(VertexCondition(a).symmetric()))
    checked = 0

    for sigma in rng.uniform(0.5, 6.0, 10):
        sigma = float(sigma)
        assert hill_discriminant(raw, sigma) == hill_discriminant(mirrored, sigma)

        left = _oracle_or_none(TruncatedNecklace(raw, 4), sigma)
        right = _oracle_or_none(TruncatedNecklace(mirrored, 4), sigma)
        if left is None or right is None:
            continue

        assert left.r == right.r
        assert left.t == right.t
        checked += 1

    assert checked > 5
