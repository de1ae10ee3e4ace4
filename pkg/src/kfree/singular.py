"""Singular series of shifted k-free tuples and their averages over boxes.

For shifts ``h = (h_1, ..., h_j)`` and a modulus ``q`` the singular series is

    A_q(h) = phi(q)/q * prod_{p not dividing q} (1 - u_p(h) / p**k),

``u_p(h)`` being the number of distinct residues of the shifts modulo
``p**k``.  Averaging over all tuples in a box ``[0, m)**j`` gives
:func:`shift_box_sum`; integrating the box size over a unit interval gives
:func:`averaged_box_sum`, and the binomial combination of those averages is
:func:`moment_constant_binomial`.

Box sums never visit the ``m**j`` tuples individually.  A tuple and all its
translates and reorderings share one value, so only sorted patterns with
minimum 0 are enumerated (by the compiled kernel), weighted by how many
tuples they stand for.  For primes with ``p**k >= m`` every pattern has
``u_p`` equal to its number of distinct entries, so those primes enter only
through a handful of cached Euler products indexed by that count; the small
primes contribute exact integers.
"""

import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb, floor, log10

import numpy as np
from mpmath import mpf

from . import precision
from ._core import kernels
from .arith import euler_phi, is_prime, iroot, prime_factors, prime_list
from .errors import BudgetError, DomainError
from .euler import EulerProductValue, euler_product, euler_product_direct

DEFAULT_TOL = 1e-30
DEFAULT_BUDGET = 10**9


@dataclass(frozen=True)
class ShiftTuple:
    """Ordered integer shifts with exponent and modulus context."""

    values: tuple
    k: int = 2
    q: int = 1

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if not self.values:
            raise DomainError("a shift tuple needs at least one entry")
        if self.k < 2 or self.q < 1:
            raise DomainError("need k >= 2 and q >= 1")

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    @property
    def spread(self):
        return max(self.values) - min(self.values)

    @property
    def distinct_count(self):
        return len(set(self.values))

    def translate(self, c):
        return ShiftTuple(tuple(v + c for v in self.values), self.k, self.q)


def _values(h):
    vals = tuple(h.values) if isinstance(h, ShiftTuple) else tuple(int(v) for v in h)
    if not vals:
        raise DomainError("a shift tuple needs at least one entry")
    return vals


def local_residue_count(h, p, k=None):
    """Number of distinct residues of the shifts modulo ``p**k``."""
    if k is None:
        k = h.k if isinstance(h, ShiftTuple) else 2
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    pk = p**k
    return len({v % pk for v in _values(h)})


def coprime_fraction(q):
    """phi(q)/q as an exact fraction."""
    return Fraction(euler_phi(q), q)


def zeta_inverse(k, tol=DEFAULT_TOL, method="accelerated", cutoff=None):
    """1/zeta(k) as the Euler product over all primes of (1 - p**-k)."""
    if tol is not None and tol <= 0:
        raise DomainError("tol must be positive")
    if k < 2:
        raise DomainError("k must be >= 2")
    if method == "direct":
        if cutoff is None:
            # smallest Y with Y**(1-k)/(k-1) < tol, capped for feasibility
            cutoff = int((1 / ((k - 1) * tol)) ** (1 / (k - 1))) + 1
        return euler_product_direct(k, 1, cutoff).check(tol, "zeta_inverse")
    return euler_product(k, 1, cutoff=cutoff, tol=tol)


def coprime_density(q, k, tol=DEFAULT_TOL):
    """phi(q)/q * prod over p not dividing q of (1 - p**-k)."""
    if q < 1:
        raise DomainError("q must be >= 1")
    prod = euler_product(k, 1, exclude=prime_factors(q), tol=tol)
    return (prod * coprime_fraction(q)).check(tol, "coprime_density")


def singular_series(h, q=1, k=2, tol=DEFAULT_TOL, cutoff=None):
    """Singular series of the shift tuple ``h`` for modulus ``q``.

    Exactly zero when some prime not dividing ``q`` sees every residue class
    modulo ``p**k`` among the shifts.
    """
    if q < 1:
        raise DomainError("q must be >= 1")
    vals = _values(h)
    spread = max(vals) - min(vals)
    m = len(set(vals))
    qp = set(prime_factors(q))
    # primes whose k-th power does not exceed the spread may see collisions
    top = iroot(spread, k)
    explicit = {}
    for p in prime_list(max(top, 2)):
        if p in qp or p > top:
            continue
        explicit[p] = len({v % p**k for v in vals})
    prod = euler_product(k, m, explicit=explicit, exclude=qp, cutoff=cutoff, spread=spread, tol=tol)
    if prod.value == 0 and prod.err == 0:
        return prod
    return (prod * coprime_fraction(q)).check(tol, "singular_series")


def _box_primes(m, q, k):
    """Primes p not dividing q with p**k < m: residue counts vary across patterns."""
    qp = set(prime_factors(q))
    top = iroot(max(m - 1, 0), k)
    return [p for p in prime_list(max(top, 2)) if p <= top and p not in qp]


def pattern_count(m, j):
    """Number of sorted patterns with minimum 0 inside [0, m)."""
    if j == 1:
        return 1
    return comb(m + j - 2, j - 1)


def _aggregate(m, j, pk, workers=1, chunk=256):
    """Exact integer weights keyed by (d, u_p for p in small primes)."""
    pk_arr = np.asarray(pk, dtype=np.int64)
    totals = {}
    ranges = [(s, min(s + chunk, m)) for s in range(0, m, chunk)]
    if workers > 1 and len(ranges) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_codes_chunk, [(m, j, pk_arr, a, b) for a, b in ranges]))
    else:
        parts = [_codes_chunk((m, j, pk_arr, a, b)) for a, b in ranges]
    # partial sums are integers; fixed-order reduction keeps the result identical
    for uniq, sums in parts:
        for c, w in zip(uniq.tolist(), sums.tolist()):
            totals[c] = totals.get(c, 0) + int(w)
    return totals


def _codes_chunk(args):
    m, j, pk_arr, a, b = args
    codes, weights = kernels.pattern_codes(m, j, pk_arr, a, b)
    if codes.size == 0:
        return codes, codes
    uniq, inv = np.unique(codes, return_inverse=True)
    # np.bincount would route integer weights through float64
    sums = np.zeros(uniq.size, dtype=np.int64)
    np.add.at(sums, inv, weights)
    return uniq, sums


def _decode(code, j, n_primes):
    base = j + 1
    d = code % base
    code //= base
    us = []
    for _ in range(n_primes):
        us.append(code % base)
        code //= base
    return d, us


def shift_box_sum(m, j, q=1, k=2, tol=DEFAULT_TOL, budget=DEFAULT_BUDGET, workers=1):
    """Sum of the singular series over all ``m**j`` tuples in ``[0, m)**j``."""
    if m < 1 or j < 1:
        raise DomainError("need m >= 1 and j >= 1")
    small = _box_primes(m, q, k)
    work = pattern_count(m, j) * (len(small) + 1)
    if work > budget:
        raise BudgetError(
            f"box sum for m={m}, j={j} needs {work} pattern-prime operations (budget {budget})",
            required=work,
            budget=budget,
        )
    pk = [p**k for p in small]
    totals = _aggregate(m, j, pk, workers=workers)
    by_d = {}
    for code, w in totals.items():
        d, us = _decode(code, j, len(small))
        num = w
        for pkv, u in zip(pk, us):
            num *= pkv - u
        by_d[d] = by_d.get(d, 0) + num
    denom = 1
    for pkv in pk:
        denom *= pkv
    excl = set(small) | set(prime_factors(q))
    cf = coprime_fraction(q)
    total = EulerProductValue(mpf(0), mpf(0))
    for d in sorted(by_d):
        if by_d[d] == 0:
            continue
        tail = euler_product(k, d, exclude=excl, tol=None)
        total = total + tail * Fraction(by_d[d] * cf.numerator, denom * cf.denominator)
    total.meta.update({"patterns": pattern_count(m, j), "small_primes": small})
    return total.check(tol, "shift_box_sum")


def _as_fraction(H):
    if isinstance(H, Fraction):
        return H
    if isinstance(H, int):
        return Fraction(H)
    if isinstance(H, float):
        return Fraction(H)
    return Fraction(str(H))


def averaged_box_sum(H, j, q=1, k=2, tol=DEFAULT_TOL, budget=DEFAULT_BUDGET):
    """Integral over u in (H-1, H] of the box sum with side ceil(u).

    Piecewise constant in u, so for integer H this is the box sum of side H
    and otherwise ``(1 - f) * box(n) + f * box(n + 1)`` with ``n = floor(H)``
    and ``f = H - n``.  ``j = 0`` gives exactly 1.
    """
    Hf = _as_fraction(H)
    if Hf < 1:
        raise DomainError("H must be >= 1")
    if j == 0:
        return EulerProductValue(mpf(1), mpf(0))
    n = floor(Hf)
    f = Hf - n
    lo = shift_box_sum(n, j, q, k, tol=None, budget=budget)
    if f == 0:
        return lo.check(tol, "averaged_box_sum")
    hi = shift_box_sum(n + 1, j, q, k, tol=None, budget=budget)
    return (lo * (1 - f) + hi * f).check(tol, "averaged_box_sum")


def moment_constant_binomial(H, ell, q=1, k=2, tol=DEFAULT_TOL, budget=DEFAULT_BUDGET):
    """Binomially compensated combination sum_j C(ell, j) (-A_q H)**(ell-j) B_j(H; q).

    The individual terms are of size about H**ell while the combination is
    far smaller, so everything is evaluated with extra digits covering the
    magnitude of the largest term.
    """
    if ell < 1:
        raise DomainError("ell must be >= 1")
    Hf = _as_fraction(H)
    if Hf < 1:
        raise DomainError("H must be >= 1")
    extra = int(ell * log10(float(Hf) + 1) + ell * log10(2)) + 5
    with precision.extra_digits(extra):
        A = coprime_density(q, k, tol=None)
        x = A * Hf
        total = EulerProductValue(mpf(0), mpf(0))
        for j in range(ell + 1):
            B = averaged_box_sum(Hf, j, q, k, tol=None, budget=budget)
            total = total + comb(ell, j) * ((-x) ** (ell - j)) * B
    with precision.working():
        v = +total.value
        out = EulerProductValue(v, total.err + precision.ulp() * abs(v))
    out.meta["extra_digits"] = extra
    return out.check(tol, "moment_constant_binomial")


@dataclass
class SeriesTable:
    """Box sums keyed by (side m, tuple length j) for fixed q, k and tolerance."""

    q: int
    k: int
    tol: float
    entries: dict

    @classmethod
    def build(cls, ms, js, q=1, k=2, tol=DEFAULT_TOL, budget=DEFAULT_BUDGET):
        entries = {(m, j): shift_box_sum(m, j, q, k, tol, budget) for m in ms for j in js}
        return cls(q, k, tol, entries)

    def to_json(self):
        return json.dumps(
            {
                "schema_version": 1,
                "q": self.q,
                "k": self.k,
                "tol": self.tol,
                "entries": {f"{m}:{j}": v.to_json() for (m, j), v in sorted(self.entries.items())},
            },
            indent=2,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        entries = {}
        for key, v in obj["entries"].items():
            m, j = (int(t) for t in key.split(":"))
            entries[(m, j)] = EulerProductValue.from_json(v)
        return cls(obj["q"], obj["k"], obj["tol"], entries)


__all__ = [
    "ShiftTuple",
    "local_residue_count",
    "zeta_inverse",
    "coprime_density",
    "singular_series",
    "shift_box_sum",
    "averaged_box_sum",
    "moment_constant_binomial",
    "SeriesTable",
]
