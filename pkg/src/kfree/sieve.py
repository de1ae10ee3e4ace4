"""Sieving k-free numbers.

The k-free indicator over ``[lo, hi)`` is produced segment by segment by
striking the multiples of ``p**k`` for every prime ``p <= (hi - 1)**(1/k)``
and stored one bit per integer.  :func:`is_kfree` is an independent trial
division routine used as the oracle for the sieve.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._core import kernels
from .arith import iroot, mobius_upto, prime_list, primes_upto
from .errors import CapacityError, DomainError

# packed bytes; 1 GiB holds the indicator of ~8.6e9 integers
DEFAULT_MEMORY_BUDGET = 1 << 30
DEFAULT_SEGMENT = 1 << 22
# Legendre counting sieves mu up to X**(1/k)
MOBIUS_LIMIT = 10**8


def _check_k(k):
    if int(k) != k or k < 2:
        raise DomainError(f"k must be an integer >= 2, got {k!r}")


@dataclass(frozen=True)
class SieveConfig:
    k: int
    lo: int
    hi: int
    segment_size: int = DEFAULT_SEGMENT

    def __post_init__(self):
        _check_k(self.k)
        if self.lo < 1:
            raise DomainError("lo must be >= 1")
        if self.hi < self.lo:
            raise DomainError("hi must be >= lo")
        if self.segment_size < 1 << 10 or self.segment_size % 8:
            raise DomainError("segment_size must be a multiple of 8 and >= 1024")


class KfreeWindow:
    """Bit-packed k-free indicator of the integers in ``[lo, hi)``."""

    def __init__(self, lo, hi, packed, k):
        self.lo = lo
        self.hi = hi
        self.k = k
        self.packed = packed

    def __len__(self):
        return self.hi - self.lo

    def __contains__(self, n):
        return self.lo <= n < self.hi

    def __getitem__(self, n):
        if not self.lo <= n < self.hi:
            raise IndexError(f"{n} outside [{self.lo}, {self.hi})")
        i = n - self.lo
        return bool((self.packed[i >> 3] >> (i & 7)) & 1)

    def to_array(self, start=None, stop=None):
        """Unpacked uint8 indicator for ``[start, stop)`` (defaults to the window)."""
        start = self.lo if start is None else start
        stop = self.hi if stop is None else stop
        if not self.lo <= start <= stop <= self.hi:
            raise IndexError("slice outside window")
        i0, i1 = start - self.lo, stop - self.lo
        chunk = self.packed[i0 >> 3 : (i1 + 7) >> 3]
        bits = np.unpackbits(chunk, bitorder="little")
        off = i0 & 7
        return bits[off : off + (i1 - i0)]

    def count(self):
        """Number of k-free integers in the window."""
        if len(self) == 0:
            return 0
        full, rem = divmod(len(self), 8)
        total = int(np.unpackbits(self.packed[:full]).sum()) if full else 0
        if rem:
            total += bin(int(self.packed[full]) & ((1 << rem) - 1)).count("1")
        return total

    def non_kfree(self):
        """Integers in the window that are not k-free."""
        return (np.flatnonzero(self.to_array() == 0) + self.lo).tolist()

    def concat(self, other):
        """Window for ``[self.lo, other.hi)`` given adjacent windows."""
        if other.lo != self.hi or other.k != self.k:
            raise ValueError("windows are not adjacent")
        bits = np.concatenate([self.to_array(), other.to_array()])
        return KfreeWindow(self.lo, other.hi, np.packbits(bits, bitorder="little"), self.k)

    def __eq__(self, other):
        return (
            isinstance(other, KfreeWindow)
            and (self.lo, self.hi, self.k) == (other.lo, other.hi, other.k)
            and np.array_equal(self.to_array(), other.to_array())
        )


def is_kfree(n, k):
    """True when no prime ``p`` has ``p**k | n``; plain trial division."""
    _check_k(k)
    if n < 1:
        raise DomainError("the k-free indicator is only defined for n >= 1")
    m = n
    bound = iroot(m, k + 1)
    small = prime_list(10**6)
    for p in small:
        if p > bound:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            if e >= k:
                return False
            bound = iroot(m, k + 1)
    else:
        # beyond the cached primes: odd trial divisors
        d = small[-1] + 2
        while d <= bound:
            if m % d == 0:
                e = 0
                while m % d == 0:
                    m //= d
                    e += 1
                if e >= k:
                    return False
                bound = iroot(m, k + 1)
            d += 2
    # every prime factor of m now exceeds m**(1/(k+1)), so m has at most k of
    # them and p**k | m forces m == p**k
    if m > 1:
        r = iroot(m, k)
        if r ** k == m:
            return False
    return True


_MODULI = {}


def _base_moduli(hi, k):
    """p**k for primes p with p**k < hi."""
    top = iroot(max(hi - 1, 0), k)
    cached = _MODULI.get(k)
    if cached is None or cached[0] < top:
        span = max(top, 1 << 12)
        ps = primes_upto(span)
        cached = (span, ps, ps**k)
        _MODULI[k] = cached
    _, ps, pk = cached
    return pk[: np.searchsorted(ps, top, side="right")]


def _sieve_segment(args):
    lo, hi, pk = args
    buf = np.ones(hi - lo, dtype=np.uint8)
    kernels.strike(buf, lo, pk)
    return np.packbits(buf, bitorder="little")


def sieve_range(cfg, workers=1, memory_budget=DEFAULT_MEMORY_BUDGET):
    """k-free indicator of ``[cfg.lo, cfg.hi)`` as a :class:`KfreeWindow`."""
    length = cfg.hi - cfg.lo
    if (length + 7) // 8 > memory_budget:
        raise CapacityError(
            f"range of {length} integers needs {(length + 7) // 8} bytes, budget {memory_budget}"
        )
    if length == 0:
        return KfreeWindow(cfg.lo, cfg.hi, np.zeros(0, dtype=np.uint8), cfg.k)
    if cfg.hi > 2**62:
        raise CapacityError("range endpoints beyond 2**62 are not supported")
    pk = _base_moduli(cfg.hi, cfg.k)
    step = cfg.segment_size
    jobs = [(a, min(a + step, cfg.hi), pk) for a in range(cfg.lo, cfg.hi, step)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_sieve_segment, jobs))
    else:
        parts = [_sieve_segment(job) for job in jobs]
    packed = parts[0] if len(parts) == 1 else np.concatenate(parts)
    return KfreeWindow(cfg.lo, cfg.hi, packed, cfg.k)


def kfree_indicator(k, lo, hi, workers=1):
    """Unpacked uint8 indicator of ``[lo, hi)``; convenience for vectorized callers."""
    if hi <= lo:
        return np.zeros(0, dtype=np.uint8)
    return sieve_range(SieveConfig(k, lo, hi), workers=workers).to_array()


def legendre_count(k, X):
    """Sum over d <= X**(1/k) of mu(d) * floor(X / d**k)."""
    _check_k(k)
    if X < 1:
        return 0
    top = iroot(X, k)
    if top > MOBIUS_LIMIT:
        raise CapacityError(f"Legendre count needs mu up to {top}")
    mu = mobius_upto(top)
    d = np.flatnonzero(mu)
    if X < 2**62:
        terms = (X // d.astype(np.int64) ** k) * mu[d].astype(np.int64)
        return int(terms.sum(dtype=np.int64))
    return sum(int(mu[t]) * (X // int(t) ** k) for t in d)


def count_kfree(k, X):
    """Number of k-free integers in [1, X]."""
    _check_k(k)
    if X < 1:
        raise DomainError("X must be >= 1")
    return legendre_count(k, X)


def sigma_kernel(n, k):
    """Product of the primes p with p**k | n."""
    _check_k(k)
    if n < 1:
        raise DomainError("sigma_kernel requires n >= 1")
    out = 1
    m = n
    for p in prime_list(iroot(n, k)):
        if p ** k > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            if e >= k:
                out *= p
    # leftover m has no prime with p**k | m below its k-th root
    return out


def xi_value(n, k, q, h):
    """Product of sigma_kernel(n + h_i q) over the shifts h."""
    out = 1
    for hi in h:
        a = n + hi * q
        if a < 1:
            raise DomainError(f"shifted argument {a} < 1")
        out *= sigma_kernel(a, k)
    return out


__all__ = [
    "SieveConfig",
    "KfreeWindow",
    "is_kfree",
    "sieve_range",
    "kfree_indicator",
    "count_kfree",
    "legendre_count",
    "sigma_kernel",
    "xi_value",
]
