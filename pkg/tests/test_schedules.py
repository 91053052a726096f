import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nonconv.errors import RangeTooSmall
from nonconv.schedules import IndexSchedule, check_separation


def test_arithmetic_schedule_is_separated_from_the_start():
    res = check_separation(IndexSchedule.affine([1, 2]), 1.0, 10_000)
    assert res.ok and res.n0 == 1 and res.n_violations == 0


def test_shifted_identity_first_violation():
    # q_2(n) = n + 5 >= n + floor(ln n) fails once floor(ln n) >= 6, i.e. n >= e^6 = 403.4
    res = check_separation(IndexSchedule.affine([1, 1], [0, 5]), 1.0, 10_000)
    assert res.first_violation == 404
    assert res.violations[0] == (1, 404)
    assert res.n0 is None and not res.ok


def test_single_map_always_separated():
    assert check_separation(IndexSchedule.affine([3]), 2.0, 100).n0 == 1


def test_transient_violation_gives_later_n0():
    # q = (n, 2n) with a huge sigma violates for small n only: n >= floor(10 ln n) from n = 36 on
    res = check_separation(IndexSchedule.affine([1, 2]), 10.0, 2000)
    assert res.ok
    bad = [n for n in range(1, 2001) if n < math.floor(10 * math.log(n))]
    assert res.n0 == bad[-1] + 1


@given(a1=st.integers(1, 4), da=st.integers(1, 3), b1=st.integers(0, 5), db=st.integers(0, 5),
       sigma=st.floats(0.2, 4.0), n_max=st.integers(5, 400))
def test_separation_matches_brute_force(a1, da, b1, db, sigma, n_max):
    sched = IndexSchedule.affine([a1, a1 + da], [b1, b1 + db])
    res = check_separation(sched, sigma, n_max)
    brute = [n for n in range(1, n_max + 1)
             if (a1 + da) * n + b1 + db < a1 * (n + math.floor(sigma * math.log(n))) + b1]
    assert res.n_violations == len(brute)
    assert [n for _, n in res.violations] == brute[:1000]


def test_affine_validation():
    with pytest.raises(ValueError):
        IndexSchedule.affine([2, 1])
    with pytest.raises(ValueError):
        IndexSchedule.affine([1, 1], [3, 3])
    with pytest.raises(ValueError):
        IndexSchedule.affine([0, 1])


def test_table_schedule_range():
    sched = IndexSchedule.from_table([[1, 2, 3], [4, 5, 6]])
    np.testing.assert_array_equal(sched.evaluate([1, 3]), [[1, 3], [4, 6]])
    with pytest.raises(RangeTooSmall):
        sched.evaluate([4])
    with pytest.raises(RangeTooSmall):
        check_separation(sched, 1.0, 3)


def test_polynomial_schedule():
    sched = IndexSchedule.polynomial([[0, 1], [0, 0, 1]])
    np.testing.assert_array_equal(sched.evaluate([2, 3, 4]), [[2, 3, 4], [4, 9, 16]])
    assert sched.description["kind"] == "polynomial"
    assert sched.kind != "affine"
