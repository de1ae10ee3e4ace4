"""Small exact number-theoretic helpers shared by the other modules."""

from bisect import bisect_right
from math import gcd, isqrt

import numpy as np


def iroot(n, k):
    """Largest integer r with r**k <= n, for n >= 0."""
    if n < 0:
        raise ValueError("iroot of negative number")
    if n < 2 or k == 1:
        return n
    if k == 2:
        return isqrt(n)
    if n >= 1 << 1000:
        # integer Newton from above
        r = 1 << (n.bit_length() // k + 1)
        while True:
            s = ((k - 1) * r + n // r ** (k - 1)) // k
            if s >= r:
                return r
            r = s
    r = int(round(n ** (1.0 / k)))
    # float seed may be off by a few; correct exactly
    while r ** k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def primes_upto(n):
    """All primes <= n as an int64 array."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, isqrt(n) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


_PRIMES = [(1, ())]


def prime_list(n):
    """Tuple of primes <= n (Python ints), served from a growing cache."""
    n = int(n)
    top, ps = _PRIMES[0]
    if n > top:
        top = max(n, 2 * top, 1 << 16)
        ps = tuple(int(p) for p in primes_upto(top))
        _PRIMES[0] = (top, ps)
    return ps[: bisect_right(ps, n)]


def mobius_upto(n):
    """Möbius function mu(0..n) as an int8 array (mu(0) set to 0)."""
    mu = np.ones(n + 1, dtype=np.int8)
    if n >= 0:
        mu[0] = 0
    for p in primes_upto(n):
        p = int(p)
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


def omega_squarefree_upto(n):
    """Arrays (omega, squarefree) for 0..n: number of distinct prime factors and squarefree flag."""
    omega = np.zeros(n + 1, dtype=np.int8)
    sqf = np.ones(n + 1, dtype=bool)
    sqf[0] = False
    for p in primes_upto(n):
        p = int(p)
        omega[p::p] += 1
        sqf[p * p :: p * p] = False
    return omega, sqf


def factorize(n):
    """Prime factorization of n >= 1 by trial division, as {p: exponent}."""
    if n < 1:
        raise ValueError("factorize requires n >= 1")
    out = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    d = 5
    step = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += step
        step = 6 - step
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_factors(n):
    return sorted(factorize(n))


def is_prime(n):
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0 or n % 3 == 0:
        return False
    d = 5
    while d * d <= n:
        if n % d == 0 or n % (d + 2) == 0:
            return False
        d += 6
    return True


def is_squarefree(n):
    return all(e == 1 for e in factorize(n).values())


def moebius(n):
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def euler_phi(n):
    out = n
    for p in factorize(n):
        out -= out // p
    return out


def num_divisors(n):
    t = 1
    for e in factorize(n).values():
        t *= e + 1
    return t


def lcm(*xs):
    out = 1
    for x in xs:
        out = out * x // gcd(out, x)
    return out


def coprime(a, b):
    return gcd(a, b) == 1
