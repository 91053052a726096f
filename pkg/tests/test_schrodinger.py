import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonconv.cocycle import rescaled_product
from nonconv.processes import FiniteSampler, IIDProcess, UniformSampler
from nonconv.schedules import IndexSchedule
from nonconv.schrodinger import PotentialSpec, energy_sweep, solve_recursion, transfer_matrix


def test_transfer_matrix_is_unimodular():
    M = transfer_matrix(1.7, -0.3)
    np.testing.assert_array_equal(M, [[2.0, -1.0], [1.0, 0.0]])
    assert np.linalg.det(M) == pytest.approx(1.0)


def test_recursion_linear_growth_at_band_edge():
    # lambda = 2, V = 0: psi_n = n
    psi_n, psi_next, scale = solve_recursion(2.0, np.zeros(50), 0.0, 1.0)
    assert (psi_n, psi_next, scale) == (50.0, 51.0, 0.0)


def test_recursion_period_four_at_zero_energy():
    # lambda = 0, V = 0: psi_{n+1} = -psi_{n-1}
    psi = [solve_recursion(0.0, np.zeros(n), 1.0, 2.0)[1] for n in range(8)]
    assert psi == [2.0, -1.0, -2.0, 1.0, 2.0, -1.0, -2.0, 1.0]


@settings(max_examples=20)
@given(lam=st.floats(-3, 3), seed=st.integers(0, 2 ** 32), n=st.integers(1, 3000))
def test_recursion_agrees_with_transfer_product(lam, seed, n):
    V = np.random.default_rng(seed).uniform(-2, 2, n)
    psi_n, psi_next, scale = solve_recursion(lam, V, 0.3, 1.1)
    rp = rescaled_product(np.stack([transfer_matrix(lam, v) for v in V]))
    # the product maps (psi_1, psi_0) to (psi_{N+1}, psi_N)
    vec = rp.core @ np.array([1.1, 0.3])
    shift = rp.log_scale - scale
    got = np.array([psi_next, psi_n])
    ref = vec * math.exp(shift) if abs(shift) < 600 else None
    assert ref is not None
    np.testing.assert_allclose(got, ref, rtol=1e-10, atol=1e-10 * np.abs(ref).max())


def test_recursion_survives_huge_growth():
    psi_n, psi_next, scale = solve_recursion(10.0, np.zeros(5000), 0.0, 1.0)
    growth = scale + math.log(abs(psi_next))
    assert growth / 5000 == pytest.approx(math.acosh(5.0), rel=1e-3)


def test_zero_potential_sweep():
    spec = PotentialSpec(IndexSchedule.affine([1]), IIDProcess(FiniteSampler([0.0])))
    curve = energy_sweep(spec, [2.5, 3.0, 4.0], 20_000, 2)
    np.testing.assert_allclose(curve.gammas, np.arccosh(np.array([2.5, 3.0, 4.0]) / 2), atol=1e-3)
    assert np.all(np.isfinite(curve.loc_length))


def test_energy_shift_covariance():
    # V -> V + 1/2 (exactly representable) is the same as lambda -> lambda - 1/2
    sched = IndexSchedule.affine([1, 2])
    base = PotentialSpec(sched, IIDProcess(FiniteSampler([-0.5, 0.5])))
    shifted = PotentialSpec(sched, IIDProcess(FiniteSampler([-0.25, 0.75])))
    a = energy_sweep(base, [1.0, 2.0], 2000, 3, seed=4)
    b = energy_sweep(shifted, [1.5, 2.5], 2000, 3, seed=4)
    np.testing.assert_array_equal(a.gammas, b.gammas)


def test_sweep_exponents_nonnegative_and_grid_checked():
    spec = PotentialSpec(IndexSchedule.affine([1, 2]), IIDProcess(UniformSampler(-1, 1)))
    curve = energy_sweep(spec, [-1.0, 0.0, 1.0], 5000, 4)
    assert np.all(curve.gammas > 0)
    with pytest.raises(ValueError):
        energy_sweep(spec, [1.0, 0.0], 10, 1)


def test_parabolic_energy_has_zero_exponent():
    # [[2, -1], [1, 0]] has the double eigenvalue 1; ||Pi_N|| grows like N, so gamma_1 ~ ln N / N
    spec = PotentialSpec(IndexSchedule.affine([1]), IIDProcess(FiniteSampler([0.0])))
    curve = energy_sweep(spec, [2.0], 10_000, 1)
    assert 0 <= curve.gammas[0] <= 2 * math.log(10_000) / 10_000
