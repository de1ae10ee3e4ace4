from fractions import Fraction
from math import comb, gcd

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mpf

from kfree import precision
from kfree.errors import BudgetError, DomainError
from kfree.moments import (
    PowerSums,
    ap_counts,
    ap_moment,
    binomial_identity_check,
    discrepancy_moment_direct,
    lattice_average_check,
    moment_shape_constant,
    progression_identity_check,
    progression_power_sum,
    shift_interval,
    short_moment,
    window_counts,
    window_histogram,
)
from kfree.sieve import count_kfree, is_kfree
from kfree.singular import coprime_density, moment_constant_binomial, zeta_inverse


def test_window_counts_examples():
    ps = window_counts(10, 2, 2, 3)
    assert ps[0] == 10
    assert ps[1] == sum(int(is_kfree(n, 2)) + int(is_kfree(n + 1, 2)) for n in range(1, 11))
    unit = window_counts(1000, 1, 2, 4)
    assert unit.sums[1:] == [count_kfree(2, 1000)] * 4


def test_histogram_chunking_is_exact():
    assert window_histogram(10**5, 7, 2, chunk=4099).tolist() == window_histogram(10**5, 7, 2).tolist()


def test_histogram_workers_identical():
    a = window_histogram(50_000, 5, 2, workers=2, chunk=10_000)
    assert a.tolist() == window_histogram(50_000, 5, 2).tolist()


def test_power_sums_merge():
    a = PowerSums.from_values([1, 2], 3)
    b = PowerSums.from_values([3], 3)
    assert a.merge(b).sums == PowerSums.from_values([1, 2, 3], 3).sums
    with pytest.raises(ValueError):
        a.merge(PowerSums.from_values([1], 2))


def test_short_moment_first_order():
    rep = short_moment(1000, 4, 1)
    expected = rep.powersums[1] - zeta_inverse(2) * 4000
    with precision.working():
        assert abs(rep.moment.value - expected.value) <= rep.moment.err + expected.err


def test_short_moment_matches_direct():
    rep = short_moment(1000, 4, 2, 2)
    direct = discrepancy_moment_direct(1000, 4, 2, 2)
    with precision.working():
        assert abs(rep.moment.value - direct) <= 1e-9


@pytest.mark.parametrize("ell", [1, 2, 3, 4])
def test_trivial_moment_bound(ell):
    rep = short_moment(5000, 6, ell)
    assert abs(rep.moment.value) <= 5000 * 6**ell


def test_moment_reproducible_at_higher_precision():
    rep = short_moment(20000, 8, 3)
    with precision.extra_digits(30):
        again = short_moment(20000, 8, 3, powersums=rep.powersums)
    with precision.working():
        assert abs(again.moment.value - rep.moment.value) <= rep.moment.err


def test_binomial_identity():
    for k in (2, 3):
        assert binomial_identity_check(10**4, 10, 3, k)["ok"]


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=1, max_value=3000), st.integers(min_value=1, max_value=9), st.integers(min_value=1, max_value=4))
def test_binomial_identity_random(x, H, ell):
    assert binomial_identity_check(x, H, ell)["ok"]


def test_ap_counts_examples():
    one = ap_counts(1000, 1)
    assert one.table == {1: count_kfree(2, 1000)}
    four = ap_counts(100, 4)
    assert set(four.table) == {1, 3}
    for a in (1, 3):
        assert four.table[a] == sum(1 for n in range(1, 101) if n % 4 == a and is_kfree(n, 2))
    c = ap_counts(5000, 30)
    assert c.total == sum(1 for n in range(1, 5001) if gcd(n, 30) == 1 and is_kfree(n, 2))
    assert c.powersums[0] == 8


def test_ap_moment_matches_direct():
    X, q = 10**4, 101
    rep = ap_moment(X, q, 2)
    counts = ap_counts(X, q)
    with precision.extra_digits(20), precision.working():
        mean = coprime_density(q, 2).value * X / (q - 1)
        direct = sum((mpf(c) - mean) ** 2 for c in counts.table.values())
        assert abs(rep.moment.value - direct) <= 1e-9
    first = ap_moment(X, q, 1)
    expected = counts.total - coprime_density(q, 2) * X
    with precision.working():
        assert abs(first.moment.value - expected.value) <= first.moment.err + expected.err


def test_ap_moment_degenerate_range():
    rep = ap_moment(500, 500, 2)
    assert rep.powersums[0] == 200


def test_shift_interval_examples():
    I = shift_interval(100, 7, (0, 0))
    assert (I.lo, I.hi) == (0, 100)
    assert shift_interval(100, 7, (0, 3)).hi == 79
    assert shift_interval(100, 7, (0, 3)).lo == 0
    assert shift_interval(100, 50, (0, 2)).empty
    assert shift_interval(100, 50, (0, 2)).length == 0


@pytest.mark.parametrize("X,q,j,k", [(10**4, 211, 1, 2), (10**4, 211, 2, 2), (10**4, 211, 3, 2), (10**4, 211, 2, 3), (997, 13, 2, 2)])
def test_progression_identity(X, q, j, k):
    assert progression_identity_check(X, q, j, k)["ok"]


def test_progression_paths_agree():
    # small case goes through per-tuple counts; the shared-sieve path is forced by size
    small = progression_power_sum(600, 41, 3)
    assert small == ap_counts(600, 41, 2, 3).powersums[3]


def test_progression_budget():
    with pytest.raises(BudgetError):
        progression_power_sum(10**4, 7, 3, budget=100)
    with pytest.raises(DomainError):
        progression_power_sum(100, 7, 0)


@pytest.mark.parametrize("X,j", [(10**3, 1), (10**3, 2), (10**3 + 5, 2)])
def test_lattice_average(X, j):
    assert lattice_average_check(X, 13, j)["ok"]


def test_moment_shape_constant_small():
    for H in (2, 4, 8):
        for ell in (2, 3):
            rep = short_moment(10**5, H, ell)
            C = moment_constant_binomial(H, ell)
            assert moment_shape_constant(10**5, H, ell, 2, rep.moment, C) <= 100


def test_report_row_and_json():
    rep = short_moment(1000, 3, 2)
    row = rep.to_row()
    assert set(row) == set(rep.COLUMNS)
    assert row["powersums"].split(";")[0] == "1000"
    assert '"schema_version": 1' in rep.to_json()
