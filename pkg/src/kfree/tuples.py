"""Counting tuples of shifted k-free integers.

``count_kfree_tuples`` counts ``X1 < n <= X2`` with ``gcd(n, q) = 1`` and
every ``n + h_i q`` k-free, straight from the sieve.  The Möbius expansion of
the same count runs over squarefree ``d`` dividing

    xi(n) = prod_i sigma(n + h_i q),   sigma(m) = prod_{p**k | m} p,

and :func:`moebius_split` evaluates it in two independent halves: divisors up
to ``y`` through the counts ``N_d`` and divisors above ``y`` per ``n`` from the
primes of ``xi(n)``.  The halves must add up to the direct count exactly.
"""

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd

import numpy as np
from mpmath import mpf

from . import precision
from .arith import iroot, is_squarefree, prime_factors, prime_list
from .errors import BudgetError, DomainError
from .euler import EulerProductValue
from .sieve import kfree_indicator, sigma_kernel
from .singular import DEFAULT_TOL, singular_series


def _shifts(h):
    vals = tuple(h.values) if hasattr(h, "values") else tuple(int(v) for v in h)
    if not vals:
        raise DomainError("need at least one shift")
    return vals


def _check_range(X1, X2, q, h):
    if X1 < 0 or X2 < X1:
        raise DomainError("need 0 <= X1 <= X2")
    if q < 1:
        raise DomainError("q must be >= 1")
    if X2 > X1 and X1 + 1 + min(h) * q < 1:
        raise DomainError(f"shifted argument {X1 + 1 + min(h) * q} < 1")


def _coprime_mask(lo, hi, q):
    """gcd(n, q) = 1 for n in [lo, hi)."""
    mask = np.ones(hi - lo, dtype=bool)
    for p in prime_factors(q) if q > 1 else ():
        mask[(-lo) % p :: p] = False
    return mask


def tuple_mask(X1, X2, q, h, k, window=None):
    """Boolean array over n in (X1, X2]: gcd(n, q) = 1 and every n + h_i q k-free.

    ``window`` may be a precomputed :class:`~kfree.sieve.KfreeWindow` covering
    all shifted arguments; otherwise one sieve pass covers them.
    """
    h = _shifts(h)
    _check_range(X1, X2, q, h)
    n0 = X1 + 1
    length = X2 - X1
    if length == 0:
        return np.zeros(0, dtype=bool)
    lo = n0 + min(h) * q
    hi = X2 + max(h) * q + 1
    if window is not None and window.lo <= lo and hi <= window.hi:
        bits = window.to_array(lo, hi).astype(bool)
    else:
        bits = kfree_indicator(k, lo, hi).astype(bool)
    mask = _coprime_mask(n0, X2 + 1, q)
    for s in h:
        off = n0 + s * q - lo
        mask &= bits[off : off + length]
    return mask


def count_kfree_tuples(X1, X2, q, h, k=2, window=None):
    """#{X1 < n <= X2 : gcd(n, q) = 1 and all n + h_i q are k-free}."""
    return int(np.count_nonzero(tuple_mask(X1, X2, q, h, k, window)))


def residue_solution_count(h, d, q=1, k=2):
    """Solutions modulo d**k of d | xi(n): product over p | d of the residue counts of h mod p**k."""
    h = _shifts(h)
    if not is_squarefree(d) or gcd(d, q) != 1:
        raise DomainError("d must be squarefree and coprime to q")
    out = 1
    for p in prime_factors(d) if d > 1 else ():
        out *= len({s % p**k for s in h})
    return out


def _prime_hits(n0, length, q, h, p, k):
    """Boolean over n in [n0, n0 + length): p**k divides some n + h_i q."""
    pk = p**k
    hit = np.zeros(length, dtype=bool)
    for s in h:
        hit[(-(n0 + s * q)) % pk :: pk] = True
    return hit


def count_divisible(X1, X2, q, h, d, k=2):
    """#{X1 < n <= X2 : gcd(n, q) = 1 and d | xi(n)} for squarefree d coprime to q."""
    h = _shifts(h)
    _check_range(X1, X2, q, h)
    if d < 1 or not is_squarefree(d) or gcd(d, q) != 1:
        raise DomainError("d must be squarefree and coprime to q")
    n0 = X1 + 1
    length = X2 - X1
    mask = _coprime_mask(n0, X2 + 1, q)
    for p in prime_factors(d) if d > 1 else ():
        mask &= _prime_hits(n0, length, q, h, p, k)
    return int(np.count_nonzero(mask))


def _small_divisor_sum(n0, length, q, h, k, y):
    """sum over squarefree d <= y coprime to q of mu(d) N_d.

    Depth-first over products of increasing primes; the mask of n with
    d | xi(n) is refined one prime at a time and a branch stops once the mask
    is empty, since then N_d vanishes for every multiple of d as well.
    """
    top = max(n0 + length - 1 + max(h) * q, 1)
    primes = [p for p in prime_list(iroot(top, k)) if q % p]
    hits = {}
    base = _coprime_mask(n0, n0 + length, q)
    total = int(np.count_nonzero(base)) if y >= 1 else 0
    stack = [(1, 0, base, 1)]
    while stack:
        d, start, mask, sign = stack.pop()
        for idx in range(start, len(primes)):
            p = primes[idx]
            if d * p > y:
                break
            if p not in hits:
                hits[p] = _prime_hits(n0, length, q, h, p, k)
            sub = mask & hits[p]
            cnt = int(np.count_nonzero(sub))
            if cnt == 0:
                continue
            total += -sign * cnt
            stack.append((d * p, idx + 1, sub, -sign))
    return total


def _xi_primes(n, q, h, k):
    ps = set()
    for s in h:
        a = n + s * q
        sig = sigma_kernel(a, k)
        if sig > 1:
            ps.update(prime_factors(sig))
    return sorted(ps)


def _large_divisor_sum(n0, length, q, h, k, y):
    """sum over n of sum_{d | xi(n), d > y} mu(d), from the primes of xi(n)."""
    total = 0
    coprime = _coprime_mask(n0, n0 + length, q)
    for i in np.flatnonzero(coprime):
        n = n0 + int(i)
        ps = _xi_primes(n, q, h, k)
        for size in range(1, len(ps) + 1):
            sign = -1 if size % 2 else 1
            for sub in combinations(ps, size):
                d = 1
                for p in sub:
                    d *= p
                if d > y:
                    total += sign
    return total


def moebius_split(X1, X2, q, h, k=2, y=None):
    """(S1, S2): the Möbius expansion of the tuple count split at y.

    ``S1 = sum_{d <= y} mu(d) N_d`` and ``S2`` collects the divisors of
    ``xi(n)`` above ``y`` per ``n``.  ``y`` defaults to ``X**(1/k)`` with
    ``X`` the largest shifted argument.
    """
    h = _shifts(h)
    _check_range(X1, X2, q, h)
    n0 = X1 + 1
    length = X2 - X1
    if y is None:
        y = max(1.0, max(X2 + s * q for s in h) ** (1 / k))
    if y < 1:
        raise DomainError("y must be >= 1")
    if length == 0:
        return 0, 0
    return _small_divisor_sum(n0, length, q, h, k, y), _large_divisor_sum(n0, length, q, h, k, y)


def count_power_divisor_tuples(x, h, y, k=2, budget=10**8):
    """#{(n, d_1..d_j) : 1 <= n <= x, d_i**k | n + h_i, prod d_i > y, d_i pairwise coprime}.

    Brute force over n, enumerating the divisors ``d`` with ``d**k | n + h_i``
    for each shift.
    """
    h = _shifts(h)
    if len(set(h)) != len(h):
        raise DomainError("shifts must be distinct")
    if y < 1:
        raise DomainError("y must be >= 1")
    if x < 1:
        return 0
    if 1 + min(h) < 1:
        raise DomainError("shifted argument < 1")
    if x * len(h) > budget:
        raise BudgetError(f"x * j = {x * len(h)} exceeds budget {budget}", required=x * len(h), budget=budget)
    # nontrivial d with d**k | m, for every m that can occur
    top_m = x + max(h)
    divs = {}
    for d in range(2, iroot(top_m, k) + 1):
        dk = d**k
        for m in range(dk, top_m + 1, dk):
            divs.setdefault(m, [1]).append(d)
    total = 0
    for n in range(1, x + 1):
        options = [divs.get(n + s, (1,)) for s in h]
        if all(len(o) == 1 for o in options):
            continue
        total += _count_choices(options, 0, 1, y)
    return total


def _count_choices(options, i, acc, y):
    if i == len(options):
        return 1 if acc > y else 0
    total = 0
    for d in options[i]:
        if gcd(d, acc) == 1:
            total += _count_choices(options, i + 1, acc * d, y)
    return total


@dataclass
class TupleCountReport:
    """Exact tuple count against its expected main term."""

    X1: int
    X2: int
    q: int
    h: tuple
    k: int
    exact: int
    main: EulerProductValue
    residual: EulerProductValue
    normalized: float
    scale_point: int

    def to_dict(self):
        return {
            "X1": self.X1,
            "X2": self.X2,
            "q": self.q,
            "h": list(self.h),
            "k": self.k,
            "exact": self.exact,
            "main": self.main.to_json(),
            "residual": self.residual.to_json(),
            "normalized": self.normalized,
            "scale_point": self.scale_point,
        }

    def to_json(self):
        return json.dumps({"schema_version": 1, **self.to_dict()}, sort_keys=True)


def tuple_count_residual(X1, X2, q, h, k=2, tol=DEFAULT_TOL, window=None):
    """Exact count minus A_q(h) (X2 - X1), normalized by X**(2/(k+1)), X = max(X2 + h_i q)."""
    h = _shifts(h)
    exact = count_kfree_tuples(X1, X2, q, h, k, window)
    A = singular_series(h, q, k, tol)
    main = A * Fraction(X2 - X1)
    residual = exact - main
    X = max(X2 + s * q for s in h)
    with precision.working():
        norm = float(residual.value / mpf(max(X, 1)) ** (mpf(2) / (k + 1)))
    return TupleCountReport(X1, X2, q, h, k, exact, main, residual, norm, X)


__all__ = [
    "tuple_mask",
    "count_kfree_tuples",
    "residue_solution_count",
    "count_divisible",
    "moebius_split",
    "count_power_divisor_tuples",
    "TupleCountReport",
    "tuple_count_residual",
]
