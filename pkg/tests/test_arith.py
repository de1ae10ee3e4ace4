from math import gcd

from hypothesis import given
from hypothesis import strategies as st

from kfree.arith import (
    euler_phi,
    factorize,
    iroot,
    is_prime,
    lcm,
    mobius_upto,
    moebius,
    omega_squarefree_upto,
    prime_list,
    primes_upto,
)


def test_primes_upto_small():
    assert primes_upto(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert primes_upto(1).tolist() == []


def test_prime_list_grows_and_slices():
    assert prime_list(10) == (2, 3, 5, 7)
    assert len(prime_list(10**6)) == 78498
    assert prime_list(2) == (2,)


@given(st.integers(min_value=0, max_value=10**40), st.integers(min_value=2, max_value=7))
def test_iroot_brackets(n, k):
    r = iroot(n, k)
    assert r**k <= n < (r + 1) ** k


def test_iroot_huge():
    n = 3**2000 + 5
    r = iroot(n, 3)
    assert r**3 <= n < (r + 1) ** 3


@given(st.integers(min_value=1, max_value=10**7))
def test_factorize_roundtrip(n):
    out = 1
    for p, e in factorize(n).items():
        assert is_prime(p)
        out *= p**e
    assert out == n


def test_mobius_table_matches_pointwise():
    mu = mobius_upto(500)
    assert all(int(mu[n]) == moebius(n) for n in range(1, 501))


def test_omega_squarefree():
    omega, sqf = omega_squarefree_upto(100)
    assert omega[30] == 3 and sqf[30]
    assert not sqf[12] and omega[12] == 2


def test_phi_and_lcm():
    assert euler_phi(1) == 1 and euler_phi(12) == 4 and euler_phi(101) == 100
    assert lcm(4, 6, 9) == 36
    assert all(euler_phi(n) == sum(1 for a in range(1, n + 1) if gcd(a, n) == 1) for n in range(1, 60))
