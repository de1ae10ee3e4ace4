import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kfree.arith import mobius_upto
from kfree.errors import CapacityError, DomainError
from kfree.sieve import (
    KfreeWindow,
    SieveConfig,
    count_kfree,
    is_kfree,
    kfree_indicator,
    legendre_count,
    sieve_range,
    sigma_kernel,
    xi_value,
)


def test_is_kfree_examples():
    assert is_kfree(4, 2) is False
    assert is_kfree(1, 5) is True
    assert is_kfree(12, 3) is True
    assert is_kfree(2**2 * 10007**2, 3) is True
    assert is_kfree(10007**3, 3) is False
    assert is_kfree(999983**2, 2) is False


def test_is_kfree_rejects_zero():
    with pytest.raises(DomainError):
        is_kfree(0, 2)


def test_sieve_examples():
    w = sieve_range(SieveConfig(2, 1, 11))
    assert w.non_kfree() == [4, 8, 9]
    assert w.count() == 7
    w3 = sieve_range(SieveConfig(3, 1, 11))
    assert w3.non_kfree() == [8] and w3.count() == 9
    empty = sieve_range(SieveConfig(2, 10, 10))
    assert len(empty) == 0 and empty.count() == 0


def test_window_bit_one_is_set():
    assert sieve_range(SieveConfig(4, 1, 2))[1]


def test_config_validation():
    with pytest.raises(DomainError):
        SieveConfig(1, 1, 10)
    with pytest.raises(DomainError):
        SieveConfig(2, 0, 10)
    with pytest.raises(DomainError):
        SieveConfig(2, 1, 10, segment_size=100)


def test_capacity_error():
    with pytest.raises(CapacityError):
        sieve_range(SieveConfig(2, 1, 10**6), memory_budget=1000)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=1, max_value=10**12),
    st.integers(min_value=0, max_value=300),
    st.sampled_from([2, 3, 4]),
)
def test_sieve_matches_trial_division(lo, length, k):
    w = sieve_range(SieveConfig(k, lo, lo + length))
    assert [w[n] for n in range(lo, lo + length)] == [is_kfree(n, k) for n in range(lo, lo + length)]


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=10**6), st.integers(min_value=0, max_value=5000), st.integers(min_value=0, max_value=5000))
def test_segment_independence(a, d1, d2):
    b, c = a + d1, a + d1 + d2
    left = sieve_range(SieveConfig(2, a, b))
    right = sieve_range(SieveConfig(2, b, c))
    assert left.concat(right) == sieve_range(SieveConfig(2, a, c))


def test_small_segments_agree():
    big = sieve_range(SieveConfig(2, 1, 100_001))
    small = sieve_range(SieveConfig(2, 1, 100_001, segment_size=1024))
    assert big == small


def test_to_array_slices():
    w = sieve_range(SieveConfig(2, 5, 105))
    arr = w.to_array(17, 40)
    assert arr.tolist() == [int(is_kfree(n, 2)) for n in range(17, 40)]
    with pytest.raises(IndexError):
        w.to_array(1, 10)


def test_count_examples():
    assert count_kfree(2, 10) == 7
    assert count_kfree(2, 100) == 61
    assert count_kfree(3, 1) == 1
    assert count_kfree(2, 10**6) == 607926


@pytest.mark.parametrize("k", [2, 3, 5])
def test_legendre_matches_sieve(k):
    for X in (1, 17, 1000, 54321, 200_000):
        assert legendre_count(k, X) == int(kfree_indicator(k, 1, X + 1).sum())


def test_legendre_identity_direct():
    X = 98765
    mu = mobius_upto(400)
    direct = sum(int(mu[d]) * (X // d**2) for d in range(1, 315))
    assert count_kfree(2, X) == direct


def test_sigma_kernel_examples():
    assert sigma_kernel(30, 2) == 1
    assert sigma_kernel(8, 2) == 2
    assert sigma_kernel(72, 2) == 6
    assert sigma_kernel(2**5 * 3**3, 3) == 6


def test_xi_examples():
    assert xi_value(1, 2, 1, (0, 1, 2)) == 1
    assert xi_value(4, 2, 1, (0,)) == 2
    assert xi_value(7, 2, 3, (0, 1)) == 1
    with pytest.raises(DomainError):
        xi_value(1, 2, 3, (-1,))


def test_xi_equivalence():
    h = (0, 2, 5)
    bits = kfree_indicator(2, 1, 10**4 + 20)
    for n in range(1, 10**4 + 1):
        assert (xi_value(n, 2, 1, h) == 1) == all(bits[n + s - 1] for s in h)


def test_workers_give_identical_window():
    cfg = SieveConfig(2, 1, 3 * 4096 + 17, segment_size=4096)
    assert sieve_range(cfg, workers=2) == sieve_range(cfg, workers=1)


def test_window_roundtrip_from_array():
    bits = kfree_indicator(2, 1, 50)
    w = KfreeWindow(1, 50, np.packbits(bits, bitorder="little"), 2)
    assert w.count() == int(bits.sum())
