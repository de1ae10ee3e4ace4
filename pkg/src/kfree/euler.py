"""Certified evaluation of Euler products of the form prod_p (1 - c_p / p**k).

Only finitely many primes carry an arbitrary local count ``c_p``; every other
prime carries a common count ``m``.  The finite part is formed exactly as a
rational number.  The tail ``prod_{p > P}(1 - m p**-k)`` is evaluated through
its logarithm,

    log prod_{p > P} (1 - m p**-k) = - sum_{n >= 1} (m**n / n) * P_{>P}(n k),

where ``P_{>P}(s)`` is the prime zeta function with the primes up to ``P``
removed.  Since ``P_{>P}(s) <= P**(1-s) / (s-1)``, truncating after ``N``
terms costs at most ``P * r**(N+1) / (1 - r)`` with ``r = m / P**k``.  The
error field of the result adds that bound to a fixed rounding allowance.

:func:`euler_product_direct` is the naive alternative: multiply every prime
up to a cutoff ``Y`` and bound the rest by ``m * Y**(1-k) / (k-1)``.  It is
slow but independent of the prime zeta machinery, so the two routes check
each other.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mp, mpf

from . import precision
from .arith import prime_list
from .errors import PrecisionError

DEFAULT_CUTOFF = 50


@dataclass
class EulerProductValue:
    """A multiprecision value with a certified bound on its distance to the target."""

    value: mpf
    err: mpf
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def exact(cls, x):
        with precision.working():
            if isinstance(x, Fraction):
                v = mpf(x.numerator) / x.denominator
                err = precision.ulp() * abs(v)
            else:
                v = mpf(x)
                err = mpf(0)
        return cls(v, err)

    def __float__(self):
        return float(self.value)

    def __neg__(self):
        with precision.working():
            return EulerProductValue(-self.value, self.err)

    def __add__(self, other):
        other = _lift(other)
        with precision.working():
            v = self.value + other.value
            return EulerProductValue(v, self.err + other.err + precision.ulp() * abs(v))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        with precision.working():
            v = self.value * other.value
            err = (
                abs(self.value) * other.err
                + abs(other.value) * self.err
                + self.err * other.err
                + precision.ulp() * abs(v)
            )
            return EulerProductValue(v, err)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _lift(other)
        with precision.working():
            if other.err >= abs(other.value):
                raise PrecisionError("division by a value not bounded away from zero")
            v = self.value / other.value
            lower = abs(other.value) - other.err
            err = (self.err + abs(v) * other.err) / lower + precision.ulp() * abs(v)
            return EulerProductValue(v, err)

    def __pow__(self, n):
        out = EulerProductValue(mpf(1), mpf(0))
        for _ in range(int(n)):
            out = out * self
        return out

    def contains(self, x, slack=0):
        """True when ``x`` lies within ``err + slack`` of the value."""
        with precision.working():
            x = mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mpf(x)
            return abs(x - self.value) <= self.err + slack

    def check(self, tol, what="value"):
        """Raise :class:`PrecisionError` when the certified error exceeds ``tol``."""
        if tol is not None and self.err > tol:
            raise PrecisionError(
                f"{what}: certified error {mpmath.nstr(self.err, 5)} exceeds tolerance {tol}",
                achieved=self.err,
                tol=tol,
            )
        return self

    def to_json(self):
        d = precision.digits()
        return {
            "value": mpmath.nstr(self.value, d, min_fixed=-mpmath.inf, max_fixed=mpmath.inf),
            "err": mpmath.nstr(self.err, 6),
        }

    @classmethod
    def from_json(cls, obj):
        with precision.working():
            return cls(mpf(obj["value"]), mpf(obj["err"]))


def _lift(x):
    if isinstance(x, EulerProductValue):
        return x
    return EulerProductValue.exact(x)


@lru_cache(maxsize=4096)
def _prime_zeta_above(s, cutoff, dps):
    """sum_{p > cutoff} p**-s at ``dps`` digits."""
    with mp.workdps(dps):
        head = mpf(0)
        for p in prime_list(cutoff):
            head += mpf(p) ** (-s)
        return mpmath.primezeta(s) - head


def _series_length(m, k, cutoff, target):
    """Smallest N with cutoff * r**(N+1) / (1 - r) <= target, r = m / cutoff**k."""
    r = mpf(m) / mpf(cutoff) ** k
    bound = mpf(cutoff) / (1 - r)
    n = 1
    while bound * r ** (n + 1) > target:
        n += 1
    return n


def min_cutoff(k, m, spread=0):
    """Smallest admissible prime cutoff for tail count m and shift spread."""
    c = DEFAULT_CUTOFF
    # above the cutoff, every residue count must equal m
    while c ** k <= spread:
        c += 1
    # keep the series ratio m / c**k below 1/2
    while c ** k <= 2 * m:
        c += 1
    return c


@lru_cache(maxsize=4096)
def _log_tail(m, k, cutoff, n_terms, dps):
    """-sum_{n <= n_terms} m**n / n * P_{>cutoff}(n k), at dps digits."""
    with mp.workdps(dps):
        total = mpf(0)
        for n in range(1, n_terms + 1):
            total -= mpf(m) ** n / n * _prime_zeta_above(n * k, cutoff, dps)
        return total


def euler_product(k, m, explicit=None, exclude=(), cutoff=None, spread=0, tol=None):
    """Certified value of prod over primes p not in ``exclude`` of (1 - c_p / p**k).

    ``c_p = explicit[p]`` where given and ``m`` otherwise.  Primes listed in
    ``explicit`` must not exceed the cutoff.  The cutoff defaults to the
    smallest admissible one (:func:`min_cutoff`); any larger cutoff gives the
    same value to within the error field, and a larger cutoff never enlarges
    the error field.
    """
    explicit = explicit or {}
    exclude = frozenset(exclude)
    ref = min_cutoff(k, m, spread)
    if explicit:
        ref = max(ref, max(explicit))
    cutoff = ref if cutoff is None else cutoff
    if cutoff < ref:
        raise ValueError(f"cutoff {cutoff} below the admissible minimum {ref}")

    finite = Fraction(1)
    for p in prime_list(cutoff):
        if p in exclude:
            continue
        pk = p**k
        c = explicit.get(p, m)
        if c >= pk:
            return EulerProductValue(mpf(0), mpf(0), {"zero_at": p})
        finite *= Fraction(pk - c, pk)
    # excluded primes above the cutoff are divided back out of the tail
    unexclude = Fraction(1)
    for p in exclude:
        if p > cutoff:
            unexclude *= Fraction(p**k - m, p**k)

    dps = precision.digits() + precision.GUARD_DIGITS
    with mp.workdps(dps):
        target = precision.ulp()
        if tol is not None:
            target = min(target, mpf(tol) / 4)
        # series length fixed by the reference cutoff so err is monotone in cutoff
        n_terms = _series_length(m, k, ref, target) if m else 0
        r = mpf(m) / mpf(cutoff) ** k
        trunc = mpf(cutoff) * r ** (n_terms + 1) / (1 - r) if m else mpf(0)
        log_tail = _log_tail(m, k, cutoff, n_terms, dps) if m else mpf(0)
        scale = mpf(finite.numerator) / finite.denominator
        scale /= mpf(unexclude.numerator) / unexclude.denominator
        value = scale * mpmath.exp(log_tail)
        # exp is 1-Lipschitz on the negative axis
        err = abs(scale) * trunc + 8 * precision.ulp()
        value = +value
    out = EulerProductValue(value, err, {"cutoff": cutoff, "series_terms": n_terms})
    return out.check(tol, "Euler product")


def euler_product_direct(k, m, cutoff, explicit=None, exclude=()):
    """Product over primes up to ``cutoff`` with the crude tail bound.

    Uses ``|1 - prod_{p > Y}(1 - m p**-k)| <= sum_{n > Y} m n**-k <= m Y**(1-k)/(k-1)``.
    """
    explicit = explicit or {}
    exclude = frozenset(exclude)
    with precision.working():
        value = mpf(1)
        n_mul = 0
        for p in prime_list(cutoff):
            if p in exclude:
                continue
            pk = mpf(p) ** k
            value *= 1 - explicit.get(p, m) / pk
            n_mul += 1
        tail = mpf(m) * mpf(cutoff) ** (1 - k) / (k - 1)
        err = abs(value) * tail + n_mul * precision.ulp()
    return EulerProductValue(value, err, {"cutoff": cutoff})
