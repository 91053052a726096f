import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonconv import matrix_functions as mf
from nonconv.cocycle import (CocycleState, RescaledProduct, lyapunov_spectrum, qr_step,
                             rescaled_multiply, rescaled_product, sample_log_norms,
                             singular_exponents_exact, wedge_exponent)
from nonconv.drivers import ConstantDriver, MatrixListDriver, build_X_driver, iid_matrix_driver
from nonconv.errors import SingularInput
from nonconv.linalg import random_unimodular
from nonconv.oracle import direct_product_lognorm
from nonconv.processes import IIDProcess, NormalSampler, UniformSampler
from nonconv.schedules import IndexSchedule

GOLDEN = math.log((3 + math.sqrt(5)) / 2)


def test_qr_step_on_diagonal():
    st_ = qr_step(CocycleState.fresh(2), np.diag([2.0, 0.5]))
    np.testing.assert_allclose(st_.log_diag, [math.log(2), math.log(0.5)], rtol=1e-15)
    assert st_.steps == 1


def test_qr_step_on_shear_keeps_orthonormal_frame():
    s = CocycleState.fresh(2)
    for _ in range(50):
        s = qr_step(s, [[1.0, 1.0], [0.0, 1.0]])
    np.testing.assert_allclose(s.frame.T @ s.frame, np.eye(2), atol=1e-14)
    assert s.log_diag.sum() == pytest.approx(0.0, abs=1e-12)


def test_qr_step_rejects_singular():
    with pytest.raises(SingularInput):
        qr_step(CocycleState.fresh(2), np.zeros((2, 2)))


def test_rescaled_product_matches_plain_product():
    rng = np.random.default_rng(0)
    mats = np.stack([random_unimodular(rng, 3) for _ in range(20)])
    direct = np.eye(3)
    for M in mats:
        direct = M @ direct
    rp = rescaled_product(mats)
    np.testing.assert_allclose(rp.matrix(), direct, rtol=1e-11, atol=1e-11 * np.abs(direct).max())
    assert math.exp(-1) <= np.linalg.norm(rp.core) <= math.e


def test_rescaled_product_far_beyond_overflow():
    rp = rescaled_product(np.stack([np.diag([2.0 ** 10, 2.0 ** -10])] * 500))
    assert rp.log_norm() == pytest.approx(5000 * math.log(2), rel=1e-14)
    assert rp.steps == 500


def test_rescaled_multiply_appends_on_the_left():
    A, B = np.array([[1.0, 1.0], [0.0, 1.0]]), np.array([[1.0, 0.0], [1.0, 1.0]])
    rp = rescaled_multiply(rescaled_multiply(RescaledProduct.identity(2), A), B)
    np.testing.assert_allclose(rp.matrix(), B @ A, rtol=1e-15)


def test_constant_driver_exponent():
    est = lyapunov_spectrum(ConstantDriver([[3.0, -1.0], [1.0, 0.0]]), 10_000, 1)
    assert abs(est.gammas[0] - GOLDEN) <= 1e-3
    assert est.gammas[1] == pytest.approx(-est.gammas[0], abs=1e-12)


def test_spectrum_of_identity_is_zero():
    est = lyapunov_spectrum(ConstantDriver(np.eye(3)), 100, 2)
    np.testing.assert_array_equal(est.gammas, 0.0)


@settings(max_examples=15)
@given(d=st.integers(2, 4), seed=st.integers(0, 2 ** 32))
def test_exponents_sum_to_zero(d, seed):
    drv = iid_matrix_driver(mf.gaussian_sl(d), IIDProcess(NormalSampler()))
    est = lyapunov_spectrum(drv, 2000, 2, seed)
    assert abs(est.gammas.sum()) <= 1e-9
    assert np.all(np.diff(est.gammas) <= 0)


def test_trials_are_reproducible_and_chunk_independent():
    drv = build_X_driver(IndexSchedule.affine([1, 2]), IIDProcess(UniformSampler(-1, 1)),
                         mf.schrodinger(1.0))
    a = lyapunov_spectrum(drv, 500, 5, seed=11)
    b = lyapunov_spectrum(drv, 500, 5, seed=11, threads=3)
    np.testing.assert_array_equal(a.per_trial, b.per_trial)
    # the last trial alone, via trial_offset
    c = lyapunov_spectrum(drv, 500, 1, seed=11, trial_offset=4)
    np.testing.assert_array_equal(c.per_trial[0], a.per_trial[4])


@settings(max_examples=20)
@given(d=st.integers(2, 4), n=st.integers(1, 400), seed=st.integers(0, 2 ** 32))
def test_streaming_log_norm_matches_extended_precision(d, n, seed):
    rng = np.random.default_rng(seed)
    mats = np.stack([random_unimodular(rng, d) for _ in range(n)])
    got = sample_log_norms(MatrixListDriver(mats), n, 1)[0]
    ref = direct_product_lognorm(mats)
    assert abs(got - ref) <= 1e-9 * max(1.0, abs(ref))


def test_exact_exponents_of_diagonal_product():
    mats = np.stack([np.diag([math.e ** 2, 1.0, math.e ** -2])] * 300)
    got = singular_exponents_exact(MatrixListDriver(mats), 300)
    np.testing.assert_allclose(got, [2.0, 0.0, -2.0], atol=1e-12)


def test_wedge_exponent_equals_sum_of_top_two():
    drv = iid_matrix_driver(mf.gaussian_sl(3), IIDProcess(NormalSampler()))
    est = lyapunov_spectrum(drv, 5000, 8, seed=2)
    w = wedge_exponent(drv, 2, 5000, 8, seed=2)
    assert abs(w.value - (est.gammas[0] + est.gammas[1])) <= 1e-9
    top = wedge_exponent(drv, 3, 5000, 2, seed=2)
    assert abs(top.value) <= 1e-9  # wedge^d of a unimodular product is 1
