from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf

from kfree import precision
from kfree.errors import BudgetError, DomainError, PrecisionError
from kfree.euler import euler_product_direct
from kfree.singular import (
    SeriesTable,
    ShiftTuple,
    averaged_box_sum,
    coprime_density,
    local_residue_count,
    moment_constant_binomial,
    shift_box_sum,
    singular_series,
    zeta_inverse,
)


def _near(a, b, slack=0):
    with precision.working():
        return abs(a.value - b.value) <= a.err + b.err + slack


def _value_near(a, ref, tol):
    with precision.working():
        return abs(a.value - mpf(ref)) <= tol


def test_shift_tuple_validation():
    with pytest.raises(DomainError):
        ShiftTuple(())
    t = ShiftTuple((3, 1, 1))
    assert t.spread == 2 and t.distinct_count == 2
    assert t.translate(5).values == (8, 6, 6)


def test_local_residue_count_examples():
    assert local_residue_count((0, 1, 2), 2, 2) == 3
    assert local_residue_count((0, 4), 2, 2) == 1
    assert local_residue_count((5,), 7, 3) == 1
    with pytest.raises(DomainError):
        local_residue_count((0, 1), 4, 2)


def test_zeta_inverse_examples():
    with mp.workdps(40):
        assert _value_near(zeta_inverse(2, 1e-12), 6 / mp.pi**2, 1e-12)
    assert _value_near(zeta_inverse(3, 1e-12), "0.831907372580707468683126278821530734417", 1e-12)
    coarse, fine = zeta_inverse(2, 1e-3), zeta_inverse(2, 1e-12)
    assert _value_near(coarse, fine.value, 1e-3)


def test_zeta_inverse_direct_method():
    v = zeta_inverse(2, 1e-5, method="direct")
    assert _near(v, zeta_inverse(2))


def test_coprime_density_examples():
    assert _near(coprime_density(1, 3), zeta_inverse(3))
    with mp.workdps(40):
        assert _value_near(coprime_density(2, 2, 1e-10), 4 / mp.pi**2, 1e-10)
        ref6 = Fraction(1, 3) / (Fraction(3, 4) * Fraction(8, 9))
        assert _value_near(coprime_density(6, 2, 1e-10), 6 / mp.pi**2 * mpf(ref6.numerator) / ref6.denominator, 1e-10)


def test_singular_series_examples():
    assert _near(singular_series((7,), 5, 2), coprime_density(5, 2))
    zero = singular_series((0, 1, 2, 3), 1, 2)
    assert zero.value == 0 and zero.err == 0
    pair = singular_series((0, 1), 1, 2, 1e-10)
    direct = euler_product_direct(2, 2, 10**5)
    assert _near(pair, direct)


def test_singular_series_tolerance_failure():
    with pytest.raises(PrecisionError):
        singular_series((0, 1), 1, 2, tol=1e-200)


shift_lists = st.lists(st.integers(min_value=-40, max_value=40), min_size=1, max_size=5)


@settings(max_examples=40, deadline=None)
@given(shift_lists, st.randoms(use_true_random=False), st.integers(min_value=-100, max_value=100))
def test_permutation_and_translation_invariance(h, rnd, c):
    base = singular_series(h, 1, 2)
    shuffled = list(h)
    rnd.shuffle(shuffled)
    moved = [v + c for v in h]
    assert _near(base, singular_series(shuffled, 1, 2))
    assert _near(base, singular_series(moved, 1, 2))


@settings(max_examples=25, deadline=None)
@given(shift_lists, st.sampled_from([1, 2, 3, 6, 10]), st.sampled_from([2, 3]))
def test_singular_series_within_unit_interval(h, q, k):
    v = singular_series(h, q, k)
    with precision.working():
        assert -v.err <= v.value <= 1 + v.err


def test_box_sum_examples():
    A = coprime_density(3, 2)
    assert _near(shift_box_sum(5, 1, 3, 2), A * 5)
    assert _near(shift_box_sum(1, 4, 3, 2), A)


@pytest.mark.parametrize("m,j,q", [(m, j, q) for m in range(1, 5) for j in range(1, 4) for q in (1, 3)])
def test_box_sum_brute_force(m, j, q):
    brute = sum((singular_series(t, q, 2) for t in product(range(m), repeat=j)), start=0)
    assert _near(shift_box_sum(m, j, q, 2), brute)


def test_box_sum_budget():
    with pytest.raises(BudgetError):
        shift_box_sum(50, 4, budget=1000)


def test_averaged_box_sum_piecewise():
    assert averaged_box_sum(Fraction(7, 3), 0).value == 1
    assert _near(averaged_box_sum(3, 2), shift_box_sum(3, 2))
    assert _near(averaged_box_sum(1, 3, 5), coprime_density(5, 2))
    assert _near(averaged_box_sum(4, 1, 2), coprime_density(2, 2) * 4)
    lo, hi = shift_box_sum(2, 2), shift_box_sum(3, 2)
    mid = averaged_box_sum(Fraction(9, 4), 2)
    assert _near(mid, lo * Fraction(3, 4) + hi * Fraction(1, 4))
    near_int = averaged_box_sum(Fraction(3000001, 1000000), 2)
    assert _near(near_int, shift_box_sum(3, 2), slack=mpf("1e-5"))
    with pytest.raises(DomainError):
        averaged_box_sum(Fraction(1, 2), 1)


@pytest.mark.parametrize("H,q", [(2, 1), (5, 1), (3, 7)])
def test_moment_constant_first_moment_vanishes(H, q):
    v = moment_constant_binomial(H, 1, q)
    with precision.working():
        assert abs(v.value) <= v.err


@pytest.mark.parametrize("q", [1, 2, 5])
def test_moment_constant_unit_window(q):
    A = coprime_density(q, 2)
    assert _near(moment_constant_binomial(1, 2, q), A * (1 - A))


def test_moment_constant_nonnegative_for_even_order():
    for H in (2, 3, Fraction(5, 2)):
        v = moment_constant_binomial(H, 2)
        assert v.value > 0


def test_series_table_roundtrip():
    table = SeriesTable.build([2, 3], [1, 2])
    back = SeriesTable.from_json(table.to_json())
    assert set(back.entries) == set(table.entries)
    for key, v in table.entries.items():
        assert _near(back.entries[key], v, slack=mpf("1e-40"))
