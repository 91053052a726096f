import numpy as np
import pytest

from nonconv.processes import (FiniteSampler, IIDProcess, MarkovCursor, MarkovProcess, NormalSampler,
                               UniformSampler, sample_path, sample_paths)

P = [[0.9, 0.1], [0.2, 0.8]]


def test_finite_sampler_frequencies():
    proc = IIDProcess(FiniteSampler([-1.0, 1.0], [0.25, 0.75]))
    x = sample_path(proc, np.arange(200_000), seed=1)
    assert set(np.unique(x)) == {-1.0, 1.0}
    assert abs((x == 1.0).mean() - 0.75) < 5 * np.sqrt(0.75 * 0.25 / x.size)


def test_normal_sampler_moments():
    x = sample_path(IIDProcess(NormalSampler(2.0, 3.0)), np.arange(200_000), seed=4)
    assert abs(x.mean() - 2.0) < 5 * 3 / np.sqrt(x.size)
    assert abs(x.std() - 3.0) < 0.05


def test_iid_values_depend_only_on_index():
    proc = IIDProcess(UniformSampler(-1, 1))
    full = sample_path(proc, np.arange(1, 1001), seed=3)
    sub = sample_path(proc, [10, 500], seed=3)
    np.testing.assert_array_equal(sub, full[[9, 499]])


def test_sampler_validation():
    with pytest.raises(ValueError):
        FiniteSampler([1.0, 2.0], [0.6, 0.6])
    with pytest.raises(ValueError):
        MarkovProcess([0.0, 1.0], [[0.5, 0.4], [0.5, 0.5]])


def test_markov_path_is_reproducible_and_subsampling_consistent():
    chain = MarkovProcess([0.0, 1.0], P)
    full = sample_path(chain, np.arange(0, 500), seed=9, stream=2)
    again = sample_path(chain, np.arange(0, 500), seed=9, stream=2)
    sub = sample_path(chain, [3, 17, 499], seed=9, stream=2)
    np.testing.assert_array_equal(full, again)
    np.testing.assert_array_equal(sub, full[[3, 17, 499]])
    assert full[0] == 0.0  # deterministic start state


def test_markov_occupation_matches_stationary_law():
    chain = MarkovProcess([0.0, 1.0], P)
    x = sample_paths(chain, np.arange(0, 20_000), seed=5, streams=np.arange(20))
    assert abs(x[:, 1000:].mean() - 1 / 3) < 0.01


def test_markov_transition_frequencies():
    chain = MarkovProcess([0.0, 1.0], P)
    x = sample_path(chain, np.arange(0, 200_000), seed=6)
    prev, nxt = x[:-1], x[1:]
    assert abs(nxt[prev == 0].mean() - 0.1) < 0.005
    assert abs(nxt[prev == 1].mean() - 0.8) < 0.005


def test_cursor_cannot_rewind():
    chain = MarkovProcess([0.0, 1.0], P)
    cur = MarkovCursor(chain, 0, np.array([0], dtype=np.uint64))
    cur.advance(np.array([5, 6]))
    with pytest.raises(ValueError):
        cur.advance(np.array([2]))


def test_random_start_distribution():
    chain = MarkovProcess([0.0, 1.0], P, start=[0.5, 0.5])
    x0 = sample_paths(chain, [0], seed=1, streams=np.arange(20_000))[:, 0]
    assert abs(x0.mean() - 0.5) < 0.02


def test_ergodicity_flag():
    assert MarkovProcess([0.0, 1.0], P).is_ergodic()
    assert not MarkovProcess([0.0, 1.0], [[0.0, 1.0], [1.0, 0.0]]).is_ergodic()
