"""Moments of k-free counts in short intervals and in arithmetic progressions.

Only exact integer power sums are accumulated.  For the short-interval count
``N(n, H) = #{0 <= h < H : n + h k-free}`` the moment of the discrepancy
``N(n, H) - H / zeta(k)`` is recovered from ``sum_n N(n, H)**j`` by the
binomial theorem, with the irrational density entering once at the end at
raised precision.  The progression moments work the same way over the
reduced residue classes modulo ``q``.

The identity checks compare those power sums with the shifted tuple counts
they expand into, exactly.
"""

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, gcd, log10

import numpy as np
from mpmath import mpf

from . import precision
from ._core import kernels
from .arith import euler_phi, prime_factors
from .errors import BudgetError, DomainError
from .euler import EulerProductValue
from .sieve import kfree_indicator
from .singular import DEFAULT_TOL, averaged_box_sum, coprime_density, singular_series, zeta_inverse
from .tuples import count_kfree_tuples

DEFAULT_ELL_MAX = 6
CHUNK = 1 << 22


@dataclass
class PowerSums:
    """Exact sums of j-th powers, j = 0..len - 1."""

    sums: list
    kind: str = "short"

    def __getitem__(self, j):
        return self.sums[j]

    def __len__(self):
        return len(self.sums)

    @classmethod
    def from_histogram(cls, hist, ell_max, kind="short"):
        """Power sums of a value histogram: hist[v] values equal to v."""
        nz = [(v, int(c)) for v, c in enumerate(np.asarray(hist).tolist()) if c]
        return cls([sum(c * v**j for v, c in nz) for j in range(ell_max + 1)], kind)

    @classmethod
    def from_values(cls, values, ell_max, kind="short"):
        vals = [int(v) for v in values]
        return cls([sum(v**j for v in vals) for j in range(ell_max + 1)], kind)

    def merge(self, other):
        if len(self) != len(other) or self.kind != other.kind:
            raise ValueError("incompatible power sums")
        return PowerSums([a + b for a, b in zip(self.sums, other.sums)], self.kind)


def _window_chunk(args):
    a, b, H, k = args
    # n in [a, b): window covers a .. b + H - 2
    bits = kfree_indicator(k, a, b + H - 1)
    return kernels.window_histogram(bits, b - a, H)


def window_histogram(x, H, k=2, workers=1, chunk=CHUNK):
    """hist[v] = #{1 <= n <= x : N(n, H) = v}."""
    if x < 0 or H < 1:
        raise DomainError("need x >= 0 and H >= 1")
    jobs = [(a, min(a + chunk, x + 1), H, k) for a in range(1, x + 1, chunk)]
    hist = np.zeros(H + 1, dtype=np.int64)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_window_chunk, jobs))
    else:
        parts = [_window_chunk(j) for j in jobs]
    for part in parts:
        hist += part
    return hist


def window_counts(x, H, k=2, ell_max=DEFAULT_ELL_MAX, workers=1):
    """Power sums of N(n, H) over 1 <= n <= x by a sliding window over the sieve."""
    if x < 1 or H < 1:
        raise DomainError("need x >= 1 and H >= 1")
    return PowerSums.from_histogram(window_histogram(x, H, k, workers), ell_max, "short")


@dataclass
class MomentReport:
    """Power sums, the resulting moment and its normalized size."""

    kind: str
    params: dict
    powersums: PowerSums
    moment: EulerProductValue
    normalized: float
    meta: dict = field(default_factory=dict)

    COLUMNS = ("kind", "x", "H", "k", "ell", "powersums", "moment", "moment_err", "normalized")

    def to_row(self):
        p = self.params
        return {
            "kind": self.kind,
            "x": p["x"],
            "H": p["H"],
            "k": p["k"],
            "ell": p["ell"],
            "powersums": ";".join(str(s) for s in self.powersums.sums),
            "moment": self.moment.to_json()["value"],
            "moment_err": self.moment.to_json()["err"],
            "normalized": repr(self.normalized),
        }

    def to_json(self):
        row = self.to_row()
        row["powersums"] = [str(s) for s in self.powersums.sums]
        return json.dumps({"schema_version": 1, **row}, sort_keys=True)


def combine_moment(sums, ell, mean):
    """sum_j binom(ell, j) (-mean)**(ell - j) sums[j] with enough digits for the cancellation."""
    top = max(1, max(abs(s) for s in sums.sums[: ell + 1]))
    extra = int(log10(top) + ell * log10(2)) + 5
    with precision.extra_digits(extra):
        neg = -mean
        total = EulerProductValue(mpf(0), mpf(0))
        for j in range(ell + 1):
            total = total + neg ** (ell - j) * (comb(ell, j) * sums[j])
    with precision.working():
        v = +total.value
        return EulerProductValue(v, total.err + precision.ulp() * abs(v), {"extra_digits": extra})


def short_moment(x, H, ell, k=2, tol=DEFAULT_TOL, workers=1, powersums=None):
    """sum_{n <= x} (N(n, H) - H / zeta(k))**ell from exact power sums."""
    if ell < 1:
        raise DomainError("ell must be >= 1")
    sums = powersums or window_counts(x, H, k, max(ell, 1), workers)
    mean = zeta_inverse(k, tol=None) * H
    moment = combine_moment(sums, ell, mean).check(tol, "short_moment")
    with precision.working():
        norm = float(moment.value / (x * mpf(H) ** (mpf(ell) / (2 * k))))
    return MomentReport("short", {"x": x, "H": H, "k": k, "ell": ell}, sums, moment, norm)


def discrepancy_moment_direct(x, H, ell, k=2):
    """sum_n D(n, H)**ell formed term by term at raised precision; a reference for tests."""
    bits = kfree_indicator(k, 1, x + H)
    counts = np.convolve(bits.astype(np.int64), np.ones(H, dtype=np.int64), "valid")[:x]
    with precision.extra_digits(20), precision.working():
        mean = zeta_inverse(k, tol=None).value * H
        return sum((mpf(int(c)) - mean) ** ell for c in counts)


def _stirling2(j, t):
    return sum((-1) ** i * comb(t, i) * (t - i) ** j for i in range(t + 1)) // factorial(t)


def shifted_tuple_sums(x, H, ell, k=2, budget=10**7):
    """sum over h in [0, H)**j of #{n <= x : all n + h_i k-free}, for j = 0..ell.

    A j-tuple with t distinct entries counts the same n as its set of
    entries, and each t-set arises from t! S(j, t) tuples, so only sets of
    size up to ``ell`` are visited, depth first with incremental masks.
    """
    n_sets = sum(comb(H, t) for t in range(1, ell + 1))
    if n_sets > budget:
        raise BudgetError(f"{n_sets} shift sets exceed budget {budget}", required=n_sets, budget=budget)
    bits = kfree_indicator(k, 1, x + H).astype(bool)
    by_size = [0] * (ell + 1)
    by_size[0] = x
    stack = [(-1, np.ones(x, dtype=bool), 0)]
    while stack:
        last, mask, size = stack.pop()
        for h in range(last + 1, H):
            sub = mask & bits[h : h + x]
            by_size[size + 1] += int(np.count_nonzero(sub))
            if size + 1 < ell:
                stack.append((h, sub, size + 1))
    out = [x]
    for j in range(1, ell + 1):
        out.append(sum(factorial(t) * _stirling2(j, t) * by_size[t] for t in range(1, j + 1)))
    return out


def binomial_identity_check(x, H, ell, k=2, budget=10**7):
    """Compare sum_n N(n, H)**j with the j-fold shifted tuple counts, exactly, for j <= ell."""
    lhs = window_counts(x, H, k, ell).sums
    rhs = shifted_tuple_sums(x, H, ell, k, budget)
    return {
        "x": x,
        "H": H,
        "ell": ell,
        "k": k,
        "ok": lhs == rhs,
        "lhs": [str(v) for v in lhs],
        "rhs": [str(v) for v in rhs],
    }


def reduced_classes(q):
    return [a for a in range(1, q + 1) if gcd(a, q) == 1]


@dataclass
class ProgressionCounts:
    """k-free counts in each reduced class modulo q up to X."""

    X: int
    q: int
    k: int
    table: dict
    powersums: PowerSums

    @property
    def total(self):
        return sum(self.table.values())


def ap_counts(X, q, k=2, ell_max=DEFAULT_ELL_MAX):
    """count(X, q, a) = #{n <= X : n = a mod q, n k-free} for every reduced class a."""
    if X < 1 or q < 1:
        raise DomainError("need X >= 1 and q >= 1")
    bits = kfree_indicator(k, 1, X + 1)
    n = np.flatnonzero(bits) + 1
    per = np.bincount(n % q, minlength=q)
    table = {a: int(per[a % q]) for a in reduced_classes(q)}
    return ProgressionCounts(X, q, k, table, PowerSums.from_values(table.values(), ell_max, "ap"))


def ap_moment(X, q, ell, k=2, tol=DEFAULT_TOL, counts=None):
    """sum over reduced a of (count(X, q, a) - A_q X / phi(q))**ell."""
    if ell < 1:
        raise DomainError("ell must be >= 1")
    counts = counts or ap_counts(X, q, k, ell)
    phi = euler_phi(q)
    mean = coprime_density(q, k, tol=None) * Fraction(X, phi)
    moment = combine_moment(counts.powersums, ell, mean).check(tol, "ap_moment")
    with precision.working():
        norm = float(moment.value / (phi * (mpf(X) / q) ** (mpf(ell) / (2 * k))))
    return MomentReport("ap", {"x": X, "H": q, "k": k, "ell": ell}, counts.powersums, moment, norm)


@dataclass(frozen=True)
class ShiftInterval:
    """The half-open interval (lo, hi] of n with every n + h_i q in (0, X]."""

    lo: int
    hi: int

    @property
    def empty(self):
        return self.hi <= self.lo

    @property
    def length(self):
        return max(0, self.hi - self.lo)


def shift_interval(X, q, h):
    """Intersection over i of (-h_i q, X - h_i q]."""
    vals = tuple(h.values) if hasattr(h, "values") else tuple(int(v) for v in h)
    return ShiftInterval(-q * min(vals), X - q * max(vals))


def _offset_tuples(bound, j):
    """All (f_1, ..., f_{j-1}) with |f_i| <= bound, in lexicographic order."""
    if j == 1:
        yield ()
        return
    for f in range(-bound, bound + 1):
        for rest in _offset_tuples(bound, j - 1):
            yield (f,) + rest


def progression_power_sum(X, q, j, k=2, budget=10**7):
    """sum over offsets f of the tuple counts of (f, 0) on their intervals.

    Writing every member of a j-tuple in one class as ``n + f_i q`` with ``n``
    the last member turns the j-th power sum over reduced classes into tuple
    counts over the interval where all members stay in ``(0, X]``.
    """
    if j < 1:
        raise DomainError("j must be >= 1")
    bound = X // q
    n_tuples = (2 * bound + 1) ** (j - 1)
    if n_tuples > budget:
        raise BudgetError(f"{n_tuples} offset tuples exceed budget {budget}", required=n_tuples, budget=budget)
    total = 0
    if n_tuples * X <= 10**6:
        for f in _offset_tuples(bound, j):
            I = shift_interval(X, q, f + (0,))
            if not I.empty:
                total += count_kfree_tuples(I.lo, I.hi, q, f + (0,), k)
        return total
    # shared sieve; offsets reaching below 1 are masked by the interval
    pad = bound * q
    bits = np.ones(pad + 2 * X + 1, dtype=bool)
    bits[pad + 1 : pad + 2 * X + 1] = kfree_indicator(k, 1, 2 * X + 1).astype(bool)
    n = np.arange(1, X + 1)
    base = bits[pad + 1 : pad + X + 1].copy()
    for p in prime_factors(q) if q > 1 else ():
        base &= n % p != 0

    def rec(prefix, mask):
        nonlocal total
        if len(prefix) == j - 1:
            I = shift_interval(X, q, prefix + (0,))
            if not I.empty:
                # n runs over (I.lo, I.hi]; mask index n - 1
                total += int(np.count_nonzero(mask[max(I.lo, 0) : I.hi]))
            return
        for f in range(-bound, bound + 1):
            off = pad + 1 + f * q
            rec(prefix + (f,), mask & bits[off : off + X])

    rec((), base)
    return total


def progression_identity_check(X, q, j, k=2, budget=10**7):
    """Compare sum over reduced classes of count**j with the offset tuple-count sum, exactly."""
    lhs = ap_counts(X, q, k, j).powersums[j]
    rhs = progression_power_sum(X, q, j, k, budget)
    return {"X": X, "q": q, "j": j, "k": k, "ok": lhs == rhs, "lhs": str(lhs), "rhs": str(rhs)}


def lattice_average_check(X, q, j, k=2, tol=1e-10, budget=10**6):
    """Compare sum_f A_q((f, 0)) |I(X, q; (f, 0))| with q B_j(X / q; q)."""
    if j < 1:
        raise DomainError("j must be >= 1")
    bound = X // q
    n_tuples = (2 * bound + 1) ** (j - 1)
    if n_tuples > budget:
        raise BudgetError(f"{n_tuples} offset tuples exceed budget {budget}", required=n_tuples, budget=budget)
    lhs = EulerProductValue(mpf(0), mpf(0))
    for f in _offset_tuples(bound, j):
        I = shift_interval(X, q, f + (0,))
        if I.empty:
            continue
        lhs = lhs + singular_series(f + (0,), q, k, tol=None) * I.length
    rhs = averaged_box_sum(Fraction(X, q), j, q, k, tol=None) * q
    with precision.working():
        diff = abs(lhs.value - rhs.value)
        rel = diff / abs(rhs.value) if rhs.value else diff
        certified = lhs.err + rhs.err
        ok = bool(rel <= tol or diff <= certified)
    return {
        "X": X,
        "q": q,
        "j": j,
        "k": k,
        "lhs": lhs.to_json(),
        "rhs": rhs.to_json(),
        "relative_difference": float(rel),
        "certified_err": float(certified),
        "ok": ok,
    }


def moment_shape_constant(x, H, ell, k, moment, constant):
    """|moment - C x| / (H**ell x**(2/(k+1) + 0.05)) for the main-term shape check."""
    with precision.working():
        diff = abs(moment.value - constant.value * x)
        return float(diff / (mpf(H) ** ell * mpf(x) ** (mpf(2) / (k + 1) + mpf("0.05"))))


__all__ = [
    "PowerSums",
    "MomentReport",
    "window_histogram",
    "window_counts",
    "combine_moment",
    "short_moment",
    "discrepancy_moment_direct",
    "shifted_tuple_sums",
    "binomial_identity_check",
    "reduced_classes",
    "ProgressionCounts",
    "ap_counts",
    "ap_moment",
    "ShiftInterval",
    "shift_interval",
    "progression_power_sum",
    "progression_identity_check",
    "lattice_average_check",
    "moment_shape_constant",
]
