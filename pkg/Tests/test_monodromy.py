import math
import types

import numpy as np
import pytest

from Errors import InvalidParameters, LoopSingular, TransferPole
from GraphModel.NecklaceParams import NecklaceParams
from GraphModel.VertexCondition import VertexCondition
from Monodromy import hs_norm_sq, rotation, unimodular_defect
from Monodromy.TrigMatrices import loop_scalars, loop_scalars_factored, trig_matrices
from Monodromy.TangentForms import tangent_fractions, transparency_value
from Monodromy.Transfer import discriminant_kernel, hill_discriminant, loop_kernel, loop_transfer, monodromy

from conftest import equal_arm, random_params


def test_unimodular_on_random_samples(rng):
    checked = 0

    for _ in range(2000):
        params = random_params(rng)
        sigma = float(rng.uniform(0.1, 10.0))

        try:
            mono = monodromy(params, sigma)
        except TransferPole:
            continue

        if not abs(mono.transfer.n) > 1e-6:
            continue

        assert unimodular_defect(mono.transfer.t_mat) < 1e-12
        assert unimodular_defect(mono.m_mat) < 1e-12
        checked += 1

    assert checked > 1500


def test_equal_arm_discriminant_closed_form(rng):
    params = equal_arm(length=1.0, l3=0.5)
    sigma = rng.uniform(0.05, 30.0, 10_000)

    f, mask, _ = discriminant_kernel(params, sigma)

    assert not mask.any()
    assert np.max(np.abs(f + 2 * np.cos(sigma * 1.5))) < 1e-10


def test_equal_arm_loop_is_a_segment():
    params = equal_arm(length=0.8)
    transfer = loop_transfer(params, 2.3)

    assert np.allclose(transfer.t_mat, -rotation(2.3 * 0.8), atol=1e-13)
    assert transfer.transparency_residual == pytest.approx(0.0, abs=1e-12)


def test_kernel_matches_direct_scalars(rng):
    checked = 0

    for _ in range(500):
        params = random_params(rng)
        sigma = float(rng.uniform(0.1, 10.0))

        kernel = loop_kernel(params, sigma)
        if min(abs(kernel.qu), abs(kernel.qv)) < 1e-3 or abs(kernel.dn) < 1e-3 * abs(kernel.w):
            continue

        transfer = loop_transfer(params, sigma)
        direct = loop_scalars(params, sigma)
        factored = loop_scalars_factored(params, sigma)

        scale = max(1.0, abs(transfer.m), abs(transfer.n))
        assert abs(direct.m - transfer.m) < 1e-8 * scale
        assert abs(direct.n - transfer.n) < 1e-8 * scale
        assert abs(factored.m - transfer.m) < 1e-8 * scale
        assert abs(factored.n - transfer.n) < 1e-8 * scale
        checked += 1

    assert checked > 200


def test_direct_scalars_singular_at_removable_point():
    params = equal_arm(length=1.0)
    sigma = math.pi + 1e-7

    with pytest.raises(LoopSingular):
        loop_scalars(params, sigma)

    # the homogeneous form stays finite there
    transfer = loop_transfer(params, sigma)
    assert np.allclose(transfer.t_mat, np.eye(2), atol=1e-6)


def test_trig_matrices(generic_params):
    trig = trig_matrices(generic_params, 2.0)
    assert trig.s[0, 0] == pytest.approx(math.sin(2.6))
    assert trig.p[1, 0] == pytest.approx(math.sin(1.4) * 0.5)


def test_tangent_form_agrees_with_kernel(rng):
    for _ in range(100):
        params = random_params(rng)
        sigma = float(rng.uniform(0.1, 10.0))

        kernel = loop_kernel(params, sigma)
        if min(abs(kernel.qu), abs(kernel.qv)) < 1e-3:
            continue

        x, y = math.tan(sigma * params.l1 / 2), math.tan(sigma * params.l2 / 2)
        if max(abs(x), abs(y)) > 1e3:
            continue

        entries = params.entries(sigma)
        fractions = tangent_fractions(entries, x, y)
        transfer = loop_transfer(params, sigma) if not kernel.pole_mask else None

        c = entries[5]
        m_plus_n = float(kernel.pu / kernel.qu)
        m_minus_n = float(kernel.pv / kernel.qv)

        assert c + fractions.f1 == pytest.approx(m_plus_n, rel=1e-7, abs=1e-9)
        assert c - fractions.f2 == pytest.approx(m_minus_n, rel=1e-7, abs=1e-9)

        if transfer is not None and max(abs(transfer.m), abs(transfer.n)) < 1e3:
            expected = transfer.m ** 2 - transfer.n ** 2 + 1
            assert transparency_value(entries, x, y) == pytest.approx(expected, rel=1e-6, abs=1e-7)


def test_hill_discriminant_none_at_pole():
    decoupled = NecklaceParams(1.0, 1.0, 1.0, VertexCondition(np.zeros((3, 3))))

    assert hill_discriminant(decoupled, 1.0) is None

    with pytest.raises(TransferPole):
        loop_transfer(decoupled, 1.0)


def test_norm_at_least_two(rng):
    for _ in range(200):
        params = random_params(rng)
        try:
            mono = monodromy(params, float(rng.uniform(0.1, 10.0)))
        except TransferPole:
            continue

        assert mono.norm_sq >= 2 - 1e-9 * max(1.0, mono.norm_sq)


def test_non_positive_sigma_rejected(generic_params):
    with pytest.raises(InvalidParameters):
        loop_transfer(generic_params, 0.0)


def test_hs_norm_of_rotation():
    assert hs_norm_sq(rotation(0.3)) == pytest.approx(2.0)


HALF = math.sqrt(0.5)


@pytest.mark.parametrize("length, delta, c, expected", [
    (math.pi / 2, (HALF, HALF), 0.0, (0.0, 1.0)),
    (math.pi / 3, (HALF, HALF), 0.0, (1 / math.sqrt(3), 2 / math.sqrt(3))),
    (None, (0.0, 0.0), 5.0, (5.0, 0.0)),
])
def test_loop_scalars_closed_forms(length, delta, c, expected):
    vc = VertexCondition.from_blocks(np.zeros((2, 2)), delta, c)
    params = NecklaceParams(1.3, 0.7, 1.0, vc) if length is None else NecklaceParams(length, length, 1.0, vc)

    for scalars in (loop_scalars(params, 1.0), loop_scalars_factored(params, 1.0)):
        assert scalars.m == pytest.approx(expected[0], abs=1e-12)
        assert scalars.n == pytest.approx(expected[1], abs=1e-12)


def test_arch_relabelling_with_unequal_arches(rng):
    checked = 0

    for _ in range(300):
        params = random_params(rng)
        if params.l1 - params.l2 < 0.1:
            continue

        # loop_kernel only reads the lengths and entries, so l2 > l1 is fine here
        swapped = types.SimpleNamespace(l1=params.l2, l2=params.l1, entries=params.vc.arch_relabel().entries,
                                        require_l3=params.require_l3)
        sigma = rng.uniform(0.1, 10.0, 20)

        f, mask, kernel = discriminant_kernel(params, sigma)
        g, swapped_mask, swapped_kernel = discriminant_kernel(swapped, sigma)

        keep = ~mask & ~swapped_mask & (np.minimum(np.abs(kernel.qu), np.abs(kernel.qv)) > 0.1) \
            & (np.abs(kernel.dn) > np.abs(kernel.w))
        m, n = kernel.dm[keep] / kernel.w[keep], kernel.dn[keep] / kernel.w[keep]
        scale = np.maximum(1.0, np.maximum(np.abs(m), np.abs(n)))

        assert np.all(np.abs(swapped_kernel.dm[keep] / swapped_kernel.w[keep] - m) < 1e-12 * scale)
        assert np.all(np.abs(swapped_kernel.dn[keep] / swapped_kernel.w[keep] - n) < 1e-12 * scale)
        assert np.all(np.abs(g[keep] - f[keep]) < 1e-12 * np.maximum(1.0, np.abs(f[keep])))
        checked += int(np.sum(keep))

    assert checked > 500
