import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nonconv.errors import NotErgodic
from nonconv.mixing import (decoupling_gap, ergodicity_profile, phi_mixing_bound,
                            stationary_distribution)
from nonconv.processes import FiniteSampler, IIDProcess, MarkovProcess

P = np.array([[0.9, 0.1], [0.2, 0.8]])


def test_stationary_distribution_two_state():
    np.testing.assert_allclose(stationary_distribution(P), [2 / 3, 1 / 3], rtol=1e-14)


def test_non_ergodic_rejected():
    with pytest.raises(NotErgodic):
        stationary_distribution([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(NotErgodic):
        stationary_distribution([[1.0, 0.0], [0.0, 1.0]])


def test_two_state_total_variation_is_exact_geometric():
    # the second eigenvalue is 0.7, and max_x ||P^n(x,.) - nu||_1 = (4/3) 0.7^n
    prof = ergodicity_profile(P, 60)
    for n, delta in prof.phi_curve:
        assert delta == pytest.approx(4 / 3 * 0.7 ** n, rel=1e-9)
    assert prof.rho == pytest.approx(-math.log(0.7), rel=1e-6)
    assert prof.R == pytest.approx(4 / 3, rel=1e-6)


def test_profile_dominates_every_tabulated_point():
    P3 = np.array([[0.5, 0.3, 0.2], [0.1, 0.6, 0.3], [0.3, 0.3, 0.4]])
    prof = ergodicity_profile(P3)
    for n, delta in prof.phi_curve:
        assert delta <= prof.R * math.exp(-prof.rho * n) * (1 + 1e-12)


def test_exactly_mixing_chain():
    prof = ergodicity_profile([[0.5, 0.5], [0.5, 0.5]])
    assert prof.exact and phi_mixing_bound(prof, 1) == 0.0


def test_iid_decoupling_has_zero_bound():
    proc = IIDProcess(FiniteSampler([0.0, 1.0]))
    res = decoupling_gap(proc, lambda z: (z[0][:, 0] == 1) & (z[1][:, 0] == 1), [(1, 1), (2, 2)],
                         trials=20_000)
    assert res.bound == 0.0
    assert res.measured <= 3 * res.stderr + 1e-12 or res.measured < 0.02


def test_markov_decoupling_within_bound():
    chain = MarkovProcess([0.0, 1.0], P.tolist())
    event = lambda z: (z[0][:, -1] == 0) & (z[1][:, 0] == 0)  # noqa: E731
    res = decoupling_gap(chain, event, [(0, 2), (8, 9)], trials=50_000)
    assert res.measured <= res.bound + 3 * res.stderr
    # adjacent windows with a strong dependence show a visible gap
    near = decoupling_gap(chain, event, [(0, 2), (3, 4)], trials=50_000)
    assert near.measured > 5 * near.stderr


def test_windows_validated():
    with pytest.raises(ValueError):
        decoupling_gap(MarkovProcess([0.0, 1.0], P.tolist()), lambda z: z[0][:, 0] > 0,
                       [(3, 5), (5, 6)], trials=10)


@given(st.integers(2, 5).flatmap(lambda s: st.lists(
    st.lists(st.floats(0.05, 1.0), min_size=s, max_size=s), min_size=s, max_size=s)))
def test_total_variation_contracts(rows):
    P = np.array(rows)
    P = P / P.sum(axis=1, keepdims=True)
    prof = ergodicity_profile(P, 30)
    deltas = [d for _, d in prof.phi_curve]
    assert all(b <= a * (1 + 1e-9) + 1e-15 for a, b in zip(deltas, deltas[1:]))
    np.testing.assert_allclose(prof.nu @ P, prof.nu, atol=1e-13)
