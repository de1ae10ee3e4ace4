"""Fourier-side representation of the singular series and of its box averages.

Expanding each local factor of the singular series in additive characters
modulo ``r**k`` gives

    A_q(h) = phi(q)/q * sum_{r_1, ..., r_j} g_q(r_1) ... g_q(r_j) kappa(r; h),

where ``kappa`` sums ``e(rho_1 h_1 + ... + rho_j h_j)`` over tuples of
admissible fractions ``rho_i = a_i / r_i**k`` whose sum is an integer.
Averaging over the box ``[0, u)**j`` turns each phase into a geometric sum
``E_u(rho) = sum_{0 <= h < u} e(rho h)``, and the resulting constrained sums
are :func:`constrained_window_sum`.

All constrained sums here are rational integers (the constraint set is stable
under ``a -> c a`` for ``c`` coprime to the common modulus), so they are
accumulated in complex floating point and rounded, with the rounding checked.
"""

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import ceil, comb, floor, gcd, log, prod

import mpmath
import numpy as np
from mpmath import mpf

from . import precision
from .arith import is_squarefree, lcm, moebius, omega_squarefree_upto, prime_factors
from .errors import BudgetError, DomainError, PrecisionError
from .euler import EulerProductValue, euler_product
from .singular import DEFAULT_TOL, coprime_density, coprime_fraction

DEFAULT_BUDGET = 10**8
# fitted constants below this floor are not trusted for the heuristic tail
MIN_FITTED_CONSTANT = 4
# explicit range of the lcm sum in the heuristic tail before switching to Rankin
TAIL_EXPLICIT_LIMIT = 10**6


@dataclass(frozen=True)
class AdmissibleFraction:
    """The fraction ``a / r**k`` modulo 1 with ``gcd(a, r**k)`` k-free."""

    a: int
    r: int
    k: int

    @property
    def modulus(self):
        return self.r**self.k

    @property
    def value(self):
        return Fraction(self.a, self.modulus)

    def distance(self):
        """Distance to the nearest integer, as a fraction."""
        m = self.modulus
        return Fraction(min(self.a % m, -self.a % m), m)


def _check_modulus(r, k):
    if r < 1:
        raise DomainError("r must be >= 1")
    if k < 2:
        raise DomainError("k must be >= 2")


def admissible_residues(r, k, budget=DEFAULT_BUDGET):
    """Numerators ``a`` in ``[1, r**k)`` of the admissible fractions, as an array.

    ``gcd(a, r**k)`` fails to be k-free exactly when ``p**k | a`` for some
    prime ``p | r``.
    """
    _check_modulus(r, k)
    m = r**k
    if m > budget:
        raise BudgetError(f"modulus {m} exceeds enumeration budget {budget}", required=m, budget=budget)
    a = np.arange(1, m, dtype=np.int64)
    keep = np.ones(a.size, dtype=bool)
    for p in prime_factors(r) if r > 1 else ():
        keep &= a % p**k != 0
    return a[keep]


def admissible_fractions(r, k, budget=DEFAULT_BUDGET):
    """All admissible fractions with denominator ``r**k``; empty for ``r = 1``."""
    return [AdmissibleFraction(int(a), r, k) for a in admissible_residues(r, k, budget)]


@lru_cache(maxsize=4096)
def _weight_cached(r, q, k, dps):
    mu = moebius(r)
    if mu == 0:
        return EulerProductValue(mpf(0), mpf(0))
    excl = set(prime_factors(r * q)) if r * q > 1 else set()
    prod_ = euler_product(k, 1, exclude=excl)
    return prod_ * Fraction(mu, r**k)


def fourier_weight(r, q=1, k=2, tol=DEFAULT_TOL):
    """mu(r) / r**k times the product over primes not dividing r q of (1 - p**-k)."""
    _check_modulus(r, k)
    if q < 1:
        raise DomainError("q must be >= 1")
    return _weight_cached(r, q, k, precision.digits()).check(tol, "fourier_weight")


def _as_rational(rho):
    if isinstance(rho, AdmissibleFraction):
        return rho.value
    return Fraction(rho)


def geometric_sum(rho, u):
    """sum over integers 0 <= h < u of e(rho h), in closed form."""
    if u <= 0:
        raise DomainError("u must be positive")
    rho = _as_rational(rho) % 1
    n = ceil(u)
    if rho == 0:
        return complex(n)
    num = 1 - cmath.exp(2j * cmath.pi * float((rho * n) % 1))
    return num / (1 - cmath.exp(2j * cmath.pi * float(rho)))


def _geometric_values(a, m, n):
    """E_n(a/m) for an array of numerators, reduced exactly before rounding."""
    if n % m == 0:
        return np.zeros(a.size, dtype=np.complex128)
    top = np.exp(2j * np.pi * ((a * n) % m) / m)
    bot = np.exp(2j * np.pi * a / m)
    return (1 - top) / (1 - bot)


def _prime_filter(rs):
    """False when some prime divides exactly one r_i: no constrained tuple exists."""
    seen = {}
    for r in rs:
        for p in prime_factors(r) if r > 1 else ():
            seen[p] = seen.get(p, 0) + 1
    return all(c >= 2 for c in seen.values())


def _constrained_sum(rs, k, factor, budget):
    """Sum over admissible tuples with integer sum of prod factor(i, a_i).

    Dynamic programming over the partial sum of the numerators scaled to the
    common modulus ``L``; a partial residue survives only when it is
    divisible by the gcd of the remaining scale factors, since later steps
    add multiples of that gcd.  Returns (complex total, number of states).
    """
    if not _prime_filter(rs):
        return 0j, 0
    mods = [r**k for r in rs]
    big = lcm(*mods)
    scales = [big // m for m in mods]
    rem_gcd = [0] * (len(rs) + 1)
    for i in range(len(rs) - 1, -1, -1):
        rem_gcd[i] = gcd(rem_gcd[i + 1], scales[i])
    res = np.zeros(1, dtype=object if big >= 2**62 else np.int64)
    val = np.ones(1, dtype=np.complex128)
    visited = 0
    for i, r in enumerate(rs):
        a = admissible_residues(r, k, budget)
        size = res.size * a.size
        visited += size
        if visited > budget:
            raise BudgetError(f"constrained sum over r={rs} exceeds budget {budget}", required=visited, budget=budget)
        new_res = (res[:, None] + (a * scales[i])[None, :]) % big
        new_val = val[:, None] * factor(i, a, mods[i])[None, :]
        new_res = new_res.ravel()
        new_val = new_val.ravel()
        g = rem_gcd[i + 1]
        if g:
            keep = new_res % g == 0
            new_res, new_val = new_res[keep], new_val[keep]
        else:
            keep = new_res == 0
            return complex(new_val[keep].sum()), visited
        res, inv = np.unique(new_res, return_inverse=True)
        val = np.bincount(inv, weights=new_val.real, minlength=res.size) + 1j * np.bincount(
            inv, weights=new_val.imag, minlength=res.size
        )
    raise AssertionError("unreachable")


def _round_integer(z, scale, what):
    n = round(z.real)
    if abs(z - n) > 1e-9 * (1 + scale):
        raise PrecisionError(f"{what}: floating sum {z} is not close to an integer")
    return int(n)


def constrained_phase_sum(r, h, k=2, budget=DEFAULT_BUDGET):
    """sum of e(rho_1 h_1 + ... + rho_j h_j) over constrained admissible tuples."""
    r = tuple(int(x) for x in r)
    h = tuple(int(x) for x in (h.values if hasattr(h, "values") else h))
    if len(r) != len(h):
        raise DomainError("r and h must have the same length")
    for x in r:
        _check_modulus(x, k)

    def factor(i, a, m):
        return np.exp(2j * np.pi * ((a * h[i]) % m) / m)

    z, _ = _constrained_sum(r, k, factor, budget)
    scale = prod(len(admissible_residues(x, k, budget)) for x in r)
    return complex(_round_integer(z, scale, "constrained_phase_sum"))


@dataclass
class ZValue:
    """Constrained window sum over admissible tuples, averaged over a unit interval of window sizes."""

    value: complex
    r: tuple
    H: Fraction
    k: int
    exact: Fraction
    states: int = 0
    meta: dict = field(default_factory=dict, repr=False)

    @property
    def imag(self):
        return self.value.imag

    def __abs__(self):
        return abs(self.exact)


def _window_pieces(H):
    """(side, weight) pairs: u in (H-1, H] has ceil(u) = n on (H-1, n], n+1 after."""
    n = floor(H)
    f = H - n
    if f == 0:
        return [(n, Fraction(1))]
    return [(n, 1 - f), (n + 1, f)]


def _as_fraction(H):
    if isinstance(H, (Fraction, int)):
        return Fraction(H)
    if isinstance(H, float):
        return Fraction(H)
    return Fraction(str(H))


@lru_cache(maxsize=65536)
def _window_count(rs, k, n, budget):
    def factor(i, a, m):
        return _geometric_values(a, m, n)

    z, states = _constrained_sum(rs, k, factor, budget)
    scale = n ** len(rs) * prod(len(admissible_residues(x, k, budget)) for x in rs)
    return z, _round_integer(z, scale, "constrained_window_sum"), states


def constrained_window_sum(H, r, k=2, budget=DEFAULT_BUDGET):
    """Z(H; r): integral over u in (H-1, H] of the constrained sum of prod E_u(rho_i)."""
    Hf = _as_fraction(H)
    if Hf < 1:
        raise DomainError("H must be >= 1")
    rs = tuple(int(x) for x in r)
    if not rs or min(rs) < 2:
        raise DomainError("every r_i must be >= 2")
    if k < 2:
        raise DomainError("k must be >= 2")
    raw = 0j
    exact = Fraction(0)
    states = 0
    for n, w in _window_pieces(Hf):
        z, zi, st = _window_count(rs, k, n, budget)
        raw += float(w) * z
        exact += w * zi
        states += st
    return ZValue(raw, rs, Hf, k, exact, states)


def _proof_bound(r, k):
    """prod_i sum_{a=1}^{r_i**k - 1} ||a / r_i**k||**-1, a bound on |Z| for every H."""
    out = 1.0
    for x in r:
        m = x**k
        a = np.arange(1, m)
        out *= float(np.sum(m / np.minimum(a, m - a)))
    return out


@dataclass
class ZBoundReport:
    """|Z| against the two classical majorants and the exact bound from |E_u(rho)| <= ||rho||**-1."""

    H: Fraction
    r: tuple
    k: int
    abs_z: float
    proof_bound: float
    log_majorant: float
    decay_majorant: float
    weak_constant: float
    strong_constant: float

    @property
    def within_proof_bound(self):
        return self.abs_z <= self.proof_bound * (1 + 1e-12)

    @property
    def ratio_to_min(self):
        return self.abs_z / min(self.log_majorant, self.decay_majorant)

    def to_dict(self):
        return {
            "H": str(self.H),
            "r": list(self.r),
            "k": self.k,
            "abs_z": self.abs_z,
            "proof_bound": self.proof_bound,
            "log_majorant": self.log_majorant,
            "decay_majorant": self.decay_majorant,
            "ratio_to_min": self.ratio_to_min,
            "weak_constant": self.weak_constant,
            "strong_constant": self.strong_constant,
        }


def window_sum_bound_check(H, r, k=2, eps=0.05, budget=DEFAULT_BUDGET):
    """Compare |Z(H; r)| with its majorants.

    ``log_majorant`` is ``prod r_i**k log(r_i**k)``; ``decay_majorant`` is
    ``(prod r_i)**eps * H**(l/2) / [r]**k`` with ``[r]`` the lcm.  The two
    constants are the ratios of ``|Z|`` to the combined shapes
    ``(prod r_i)**(k + eps) * min(1, H**(l/2) / [r]**k)`` (weak) and
    ``(prod r_i)**eps * min(1, H**(l/2) / [r]**k)`` (strong).
    """
    z = constrained_window_sum(H, r, k, budget)
    rs = z.r
    ell = len(rs)
    Hf = float(z.H)
    pr = prod(rs)
    decay = Hf ** (ell / 2) / float(lcm(*rs)) ** k
    shape = min(1.0, decay)
    abs_z = float(abs(z.exact))
    return ZBoundReport(
        H=z.H,
        r=rs,
        k=k,
        abs_z=abs_z,
        proof_bound=_proof_bound(rs, k),
        log_majorant=prod(x**k * log(x**k) for x in rs),
        decay_majorant=pr**eps * decay,
        weak_constant=abs_z / (pr ** (k + eps) * shape),
        strong_constant=abs_z / (pr**eps * shape),
    )


@lru_cache(maxsize=64)
def fitted_window_constant(k=2, ell=2, r_max=4, H_max=64, eps=0.0):
    """Largest weak constant over H in 2..H_max and all r with 2 <= r_i <= r_max."""
    best = 0.0
    for rs in combinations_with_replacement(range(2, r_max + 1), ell):
        for H in range(2, H_max + 1):
            best = max(best, window_sum_bound_check(H, rs, k, eps).weak_constant)
    return best


def _tail_quadratic(N, R, k):
    """Bound on sum_{r > R} g(r)**2 Z(N; (r, r)).

    Z(N; (r, r)) is a sum of |E_N(a / r**k)|**2 over a != 0, at most
    r**k * N * ceil(N / r**k) by Parseval, and |g(r)| <= r**-k.
    """
    return mpf(N) ** 2 * mpf(R) ** (1 - 2 * k) / (2 * k - 1) + mpf(N) * mpf(R) ** (1 - k) / (k - 1)


@lru_cache(maxsize=8)
def _omega_table(limit):
    omega, sqf = omega_squarefree_upto(limit)
    return omega.astype(np.float64), sqf


def _tail_fitted(N, R, k, i, c_fit):
    """Heuristic bound c_fit * sum_{L > R} (2**i - 1)**omega(L) * min(1, N**(i/2) / L**k).

    Counts all i-tuples of squarefree moduli with lcm L and charges each the
    fitted majorant.  The sum runs explicitly to TAIL_EXPLICIT_LIMIT and is
    completed by Rankin's trick with zeta(k - delta)**(2**i - 1).
    """
    limit = TAIL_EXPLICIT_LIMIT
    omega, sqf = _omega_table(limit)
    L = np.arange(R + 1, limit + 1, dtype=np.float64)
    mask = sqf[R + 1 :]
    terms = (2.0**i - 1) ** omega[R + 1 :] * np.minimum(1.0, N ** (i / 2) / L**k)
    explicit = float(np.sum(terms[mask]))
    best = mpmath.inf
    for t in range(1, 20):
        delta = (k - 1) * t / 20
        rest = mpf(N) ** (mpf(i) / 2) * mpf(limit) ** (-delta) * mpmath.zeta(k - delta) ** (2**i - 1)
        best = min(best, rest)
    return c_fit * (mpf(explicit) * (1 + mpf(10) ** -12) + best)


def _squarefree_moduli(R, q):
    return [r for r in range(2, R + 1) if gcd(r, q) == 1 and is_squarefree(r)]


def _truncated_sums(n, i, q, k, R, budget):
    """sum over i-tuples of moduli in [2, R] of prod g_q(r_t) * K_i(n; r), K_i the window count at side n."""
    total = EulerProductValue(mpf(0), mpf(0))
    tuples = 0
    for rs in combinations_with_replacement(_squarefree_moduli(R, q), i):
        if not _prime_filter(rs):
            continue
        _, zi, _ = _window_count(rs, k, n, budget)
        tuples += 1
        if zi == 0:
            continue
        # orderings of the multiset
        mult = 1
        rest = i
        for val in set(rs):
            c = rs.count(val)
            mult *= comb(rest, c)
            rest -= c
        w = EulerProductValue(mpf(1), mpf(0))
        for x in rs:
            w = w * fourier_weight(x, q, k, tol=None)
        total = total + w * (mult * zi)
    return total, tuples


def fourier_truncated_sum(H, ell, q=1, k=2, radius=30, budget=DEFAULT_BUDGET):
    """sum over r_i in [2, radius], coprime to q, of prod g_q(r_i) * Z(H; r), without tail."""
    Hf = _as_fraction(H)
    total = EulerProductValue(mpf(0), mpf(0))
    for n, w in _window_pieces(Hf):
        part, _ = _truncated_sums(n, ell, q, k, radius, budget)
        total = total + part * w
    return total


def moment_constant_fourier(H, ell, q=1, k=2, radius=30, tol=None, budget=DEFAULT_BUDGET):
    """Binomially compensated singular-series average via the Fourier expansion.

    With ``c = phi(q)/q``, ``G = g_q(1)``, ``x = A_q H`` and ``V_i(n)`` the
    sum over i-tuples of moduli ``>= 2`` of ``prod g_q(r_t) K_i(n; r)``,

        C = (1 - c) (-x)**ell
            + c * sum_n w_n sum_i binom(ell, i) V_i(n) (G n - x)**(ell - i),

    the outer sum running over the one or two window sides ``n`` covering
    ``(H - 1, H]`` with weights ``w_n``.  ``V_0 = 1`` and ``V_1 = 0``; for
    ``q = 1`` and integer ``H`` only ``V_ell`` survives.  ``V_i`` is
    truncated at ``radius``; the omitted part is bounded by Parseval for
    ``i = 2`` and by the fitted majorant otherwise, and included in ``err``.
    """
    Hf = _as_fraction(H)
    if Hf < 1:
        raise DomainError("H must be >= 1")
    if ell < 1:
        raise DomainError("ell must be >= 1")
    if radius < 2:
        raise DomainError("radius must be >= 2")
    extra = int(ell * log(float(Hf) + 1, 10) + ell * log(2, 10)) + 5
    c = coprime_fraction(q)
    meta = {"radius": radius, "tail_method": {}, "tuples": {}}
    c_fit = None
    tail = mpf(0)
    with precision.extra_digits(extra):
        A = coprime_density(q, k, tol=None)
        G = fourier_weight(1, q, k, tol=None)
        x = A * Hf
        total = (-x) ** ell * (1 - c)
        for n, w in _window_pieces(Hf):
            y = G * n - x
            inner = y**ell
            for i in range(2, ell + 1):
                V, count = _truncated_sums(n, i, q, k, radius, budget)
                meta["tuples"][f"{n}:{i}"] = count
                inner = inner + V * (comb(ell, i) * (y ** (ell - i)))
                if i == 2:
                    t_i = _tail_quadratic(n, radius, k)
                    meta["tail_method"][i] = "parseval"
                else:
                    if c_fit is None:
                        c_fit = max(MIN_FITTED_CONSTANT, fitted_window_constant(k, 2))
                    t_i = _tail_fitted(n, radius, k, i, c_fit)
                    meta["tail_method"][i] = "fitted"
                with precision.working():
                    tail += mpf(w.numerator) / w.denominator * comb(ell, i) * (abs(y.value) + y.err) ** (ell - i) * t_i
            total = total + inner * (c * w)
        with precision.working():
            tail *= mpf(c.numerator) / c.denominator
    with precision.working():
        v = +total.value
        out = EulerProductValue(v, total.err + tail + precision.ulp() * abs(v))
    meta.update({"tail": tail, "fitted_constant": c_fit, "extra_digits": extra})
    out.meta = meta
    return out.check(tol, "moment_constant_fourier")


__all__ = [
    "AdmissibleFraction",
    "admissible_fractions",
    "admissible_residues",
    "fourier_weight",
    "geometric_sum",
    "constrained_phase_sum",
    "ZValue",
    "constrained_window_sum",
    "ZBoundReport",
    "window_sum_bound_check",
    "fitted_window_constant",
    "fourier_truncated_sum",
    "moment_constant_fourier",
]
