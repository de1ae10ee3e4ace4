"""Verification suites: exact identities, empirical bounds and oracle properties.

Each ``check_*`` function runs one numbered acceptance check at its stated
scale and returns a :class:`CheckResult`.  The suites group them for the
command line.
"""

import math
import os
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product

import numpy as np
from mpmath import mpf

from . import precision
from .fourier import (
    admissible_residues,
    constrained_window_sum,
    geometric_sum,
    moment_constant_fourier,
)
from .moments import binomial_identity_check, lattice_average_check, progression_identity_check
from .sieve import SieveConfig, count_kfree, is_kfree, sieve_range
from .singular import moment_constant_binomial, singular_series, zeta_inverse
from .tuples import count_kfree_tuples, moebius_split, tuple_count_residual


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.name} ({self.seconds:.1f}s)"

    def to_dict(self):
        return {
            "number": self.number,
            "name": self.name,
            "passed": self.passed,
            "details": self.details,
        }


def _timed(number, name, fn):
    t0 = time.perf_counter()
    passed, details = fn()
    return CheckResult(number, name, bool(passed), details, time.perf_counter() - t0)


def check_binomial_identity(x=10**5, cases=((2, 3), (3, 3), (2, 4)), Hs=(10, 32)):
    """Power sums of short-interval counts equal the shifted tuple-count sums."""

    def run():
        rows = [binomial_identity_check(x, H, ell, k) for k, ell in cases for H in Hs]
        return all(r["ok"] for r in rows), {"cases": rows}

    return _timed(1, "short-interval power sums equal shifted tuple counts", run)


def check_progression_identity(X=10**4, qs=(101, 211), ks=(2, 3), j_max=3):
    """Progression power sums equal the offset tuple-count sums."""

    def run():
        rows = [progression_identity_check(X, q, j, k) for k in ks for q in qs for j in range(1, j_max + 1)]
        return all(r["ok"] for r in rows), {"cases": rows}

    return _timed(2, "progression power sums equal offset tuple counts", run)


def check_moebius_split(n_cases=50, seed=20240531):
    """S1 + S2 reproduces the direct tuple count for random ranges and cut points."""

    def run():
        rng = random.Random(seed)
        failures = []
        for _ in range(n_cases):
            k = rng.choice((2, 3))
            j = rng.randint(1, 3)
            q = rng.randint(1, 50)
            h = sorted(rng.sample(range(0, 13), j))
            X1 = rng.randint(0, 5000)
            X2 = X1 + rng.randint(1, 10**4)
            X = max(X2 + s * q for s in h)
            direct = count_kfree_tuples(X1, X2, q, h, k)
            for y in (1, X ** (1 / k), X):
                s1, s2 = moebius_split(X1, X2, q, h, k, y)
                if s1 + s2 != direct:
                    failures.append({"X1": X1, "X2": X2, "q": q, "h": h, "k": k, "y": y, "S1": s1, "S2": s2, "S": direct})
        return not failures, {"cases": n_cases, "cut_points": 3, "failures": failures}

    return _timed(3, "Moebius split S1 + S2 equals the direct count", run)


def check_count_residual(Xs=(10**4, 10**5, 10**6, 10**7), k=2, bound=2.0):
    """|Q_k(X) - X / zeta(k)| / X**(1/k) stays below the bound."""

    def run():
        rows = []
        zinv = zeta_inverse(k)
        for X in Xs:
            Q = count_kfree(k, X)
            with precision.working():
                r = abs(Q - zinv.value * X) / mpf(X) ** (mpf(1) / k)
            rows.append({"X": X, "count": Q, "normalized": float(r)})
        return all(r["normalized"] <= bound for r in rows), {"rows": rows, "bound": bound}

    return _timed(4, "k-free count residual against X / zeta(k)", run)


TUPLE_SHIFTS = {
    1: [(0,)],
    2: [(0, 1), (0, 2), (0, 7), (0, 20)],
    3: [(0, 1, 2), (0, 2, 6), (0, 1, 20), (0, 7, 20)],
}


def check_tuple_residual(ks=(2, 3), qs=(1, 3, 13), Xs=(10**4, 10**5, 10**6), bound=5.0):
    """Shifted k-free tuple counts against the singular-series main term."""

    def run():
        rows = []
        for k, q, j in product(ks, qs, sorted(TUPLE_SHIFTS)):
            for h in TUPLE_SHIFTS[j]:
                for X2 in Xs:
                    rep = tuple_count_residual(0, X2, q, h, k, tol=1e-20)
                    rows.append({"k": k, "q": q, "h": list(h), "X2": X2, "exact": rep.exact, "normalized": rep.normalized})
        worst = max(abs(r["normalized"]) for r in rows)
        return worst <= bound, {"max_constant": worst, "bound": bound, "rows": rows}

    return _timed(5, "tuple counts against the singular-series main term", run)


def check_cross_method(qs=(1, 5), Hs=(2, 3, 4), ell=2, k=2, radius=30, coarse=10):
    """Fourier and binomial evaluations of the moment constant agree within the tail bound."""

    def run():
        rows = []
        ok = True
        for q, H in product(qs, Hs):
            b = moment_constant_binomial(H, ell, q, k)
            f = moment_constant_fourier(H, ell, q, k, radius)
            fc = moment_constant_fourier(H, ell, q, k, coarse)
            with precision.working():
                d = abs(f.value - b.value)
                dc = abs(fc.value - b.value)
                within = d <= f.err + b.err
                monotone = d <= dc + mpf("1e-12")
            ok = ok and within and monotone
            rows.append(
                {
                    "q": q,
                    "H": H,
                    "binomial": float(b.value),
                    "fourier": float(f.value),
                    "discrepancy": float(d),
                    "tail_bound": float(f.err),
                    "discrepancy_coarse": float(dc),
                    "within_bound": bool(within),
                    "monotone": bool(monotone),
                }
            )
        return ok, {"window_convention": "0 <= h < u", "radius": radius, "coarse_radius": coarse, "rows": rows}

    return _timed(6, "Fourier and binomial moment constants agree", run)


def check_constant_growth(k=2, slope_range=(0.35, 0.65), cubic_bound=10.0):
    """Growth of the moment constant in H for ell = 2 and ell = 3."""

    def run():
        H2 = [2**e for e in range(6, 13)]
        c2 = [abs(float(moment_constant_binomial(H, 2, 1, k).value)) for H in H2]
        slope = float(np.polyfit(np.log(H2), np.log(c2), 1)[0])
        H3 = [2**e for e in range(4, 10)]
        c3 = [abs(float(moment_constant_binomial(H, 3, 1, k).value)) for H in H3]
        fitted = max(c / H ** 0.9 for c, H in zip(c3, H3))
        ok = slope_range[0] <= slope <= slope_range[1] and fitted <= cubic_bound
        return ok, {
            "quadratic": {"H": H2, "abs_value": c2, "slope": slope, "range": list(slope_range)},
            "cubic": {"H": H3, "abs_value": c3, "exponent": 0.9, "fitted_constant": fitted, "bound": cubic_bound},
        }

    return _timed(7, "growth exponent of the moment constant", run)


def check_lattice_average(X_values=(10**3, 10**3 + 5), q=13, js=(1, 2), k=2, rel=1e-8, tol=1e-10):
    """Offset singular-series sums against q B_j(X/q; q)."""

    def run():
        rows = []
        for X, j in product(X_values, js):
            r = lattice_average_check(X, q, j, k, tol=tol)
            r["ok"] = r["ok"] and r["relative_difference"] <= rel
            rows.append(r)
        return all(r["ok"] for r in rows), {"rows": rows}

    return _timed(8, "offset singular-series sums equal the box average", run)


def _geometric_bound_failures(n_samples, rng):
    failures = 0
    for _ in range(n_samples):
        k = rng.choice((2, 3))
        r = rng.randint(2, 30 if k == 2 else 8)
        a = rng.choice(admissible_residues(r, k).tolist())
        rho = Fraction(a, r**k)
        u = rng.uniform(1, 10**4)
        dist = min(rho, 1 - rho)
        if abs(geometric_sum(rho, u)) > (1 / dist) * (1 + 1e-12):
            failures += 1
    return failures


def _window_sum_failures(r_max, ell_max, H_max, k):
    failures = []
    evaluations = 0
    for ell in range(1, ell_max + 1):
        for rs in product(range(2, r_max + 1), repeat=ell):
            if list(rs) != sorted(rs):
                continue
            for H in range(1, H_max + 1):
                ref = constrained_window_sum(H, rs, k)
                evaluations += 1
                if abs(ref.imag) > 1e-9 * (1 + abs(ref.value)):
                    failures.append({"r": rs, "H": H, "imag": ref.imag})
                for perm in set(permutations(rs)) - {rs}:
                    z = constrained_window_sum(H, perm, k)
                    evaluations += 1
                    if z.exact != ref.exact or abs(z.imag) > 1e-9 * (1 + abs(z.value)):
                        failures.append({"r": perm, "H": H, "value": str(z.exact), "expected": str(ref.exact)})
    return failures, evaluations


def _invariance_failures(n_tuples, rng):
    failures = 0
    for _ in range(n_tuples):
        k = rng.choice((2, 3))
        q = rng.choice((1, 2, 3, 5, 6, 13))
        j = rng.randint(1, 4)
        h = [rng.randint(-30, 30) for _ in range(j)]
        base = singular_series(h, q, k)
        perm = h[:]
        rng.shuffle(perm)
        c = rng.randint(-1000, 1000)
        for other in (singular_series(perm, q, k), singular_series([v + c for v in h], q, k)):
            with precision.working():
                if abs(other.value - base.value) > other.err + base.err:
                    failures += 1
    return failures


def _sieve_oracle_failures(n_points, rng, window=100):
    failures = []
    per_k = {}
    n_windows = n_points // window
    for i in range(n_windows):
        k = (2, 3, 4)[i % 3]
        lo = rng.randint(1, 10**12 - window + 1)
        w = sieve_range(SieveConfig(k, lo, lo + window))
        for n in range(lo, lo + window):
            if w[n] != is_kfree(n, k):
                failures.append({"n": n, "k": k})
        per_k[k] = per_k.get(k, 0) + window
    return failures, per_k


def check_properties(seed=7, n_geometric=10**4, n_invariance=10**3, n_oracle=10**5):
    """Geometric-sum bound, window-sum realness and symmetry, series invariance, sieve oracle."""

    def run():
        rng = random.Random(seed)
        geo = _geometric_bound_failures(n_geometric, rng)
        zf, z_evals = _window_sum_failures(4, 3, 64, 2)
        inv = _invariance_failures(n_invariance, rng)
        sf, per_k = _sieve_oracle_failures(n_oracle, rng)
        ok = geo == 0 and not zf and inv == 0 and not sf
        return ok, {
            "geometric_bound": {"samples": n_geometric, "failures": geo},
            "window_sums": {"evaluations": z_evals, "failures": zf[:20]},
            "series_invariance": {"tuples": n_invariance, "failures": inv},
            "sieve_oracle": {"points": sum(per_k.values()), "per_k": per_k, "failures": sf[:20]},
        }

    return _timed(9, "property suites", run)


def check_sieve_speed(limit=10**8, seconds=10.0, workers=4):
    """Single-worker sieve of 10**8 integers within the time limit; scaling is reported."""

    def run():
        cfg = SieveConfig(2, 1, limit + 1)
        t0 = time.perf_counter()
        w1 = sieve_range(cfg, workers=1)
        single = time.perf_counter() - t0
        t0 = time.perf_counter()
        w4 = sieve_range(cfg, workers=workers)
        multi = time.perf_counter() - t0
        return single <= seconds, {
            "single_worker_seconds": single,
            "multi_worker_seconds": multi,
            "workers": workers,
            "cpus": os.cpu_count(),
            "speedup": single / multi if multi else math.inf,
            "counts_agree": w1.count() == w4.count(),
            "count": w1.count(),
        }

    return _timed(10, "sieve throughput", run)


SUITES = {
    "identities": (check_binomial_identity, check_progression_identity, check_moebius_split, check_lattice_average),
    "bounds": (check_count_residual, check_tuple_residual, check_cross_method, check_constant_growth),
    "oracle": (check_properties, check_sieve_speed),
}


def run_suite(name):
    names = list(SUITES) if name == "all" else [name]
    results = [fn() for n in names for fn in SUITES[n]]
    return sorted(results, key=lambda r: r.number)
