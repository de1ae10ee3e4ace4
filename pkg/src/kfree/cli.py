"""Command-line front end.

Exit codes: 0 success, 1 a verification failed, 2 bad arguments,
3 capacity exceeded, 4 work budget or precision target not met.
"""

import argparse
import sys
import time
from fractions import Fraction

import mpmath
from mpmath import mpf

from . import __version__, precision
from ._core import BACKEND
from .errors import BudgetError, CapacityError, DomainError, PrecisionError
from .fourier import moment_constant_fourier
from .moments import MomentReport, ap_moment, short_moment
from .output import RunManifest, csv_text, digest, json_text
from .sieve import SieveConfig, sieve_range
from .singular import DEFAULT_BUDGET, DEFAULT_TOL, moment_constant_binomial, singular_series, zeta_inverse
from .verify import SUITES, run_suite

EXIT_FAIL, EXIT_USAGE, EXIT_CAPACITY, EXIT_BUDGET = 1, 2, 3, 4
# streamed counting keeps memory flat; this caps the run length instead
SIEVE_LIMIT = 10**12


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _exponent(text):
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError(f"k must be >= 2, got {text}")
    return v


def _real(text):
    try:
        v = Fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"H must be >= 1, got {text}")
    return v


def _shifts(text):
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad shift list {text!r}") from None


def _num(x, digits=None):
    return mpmath.nstr(x, digits or precision.digits(), min_fixed=-mpmath.inf, max_fixed=mpmath.inf)


def _checkpoints(limit):
    pts = []
    c = 10
    while c < limit:
        pts.append(c)
        c *= 10
    pts.append(limit)
    return pts


def cmd_sieve(args):
    if args.limit > SIEVE_LIMIT:
        raise CapacityError(f"limit {args.limit} exceeds the supported range {SIEVE_LIMIT}")
    zinv = zeta_inverse(args.k)
    points = _checkpoints(args.limit)
    rows = []
    count = 0
    lo = 1
    step = args.segment * 8
    for X in points:
        while lo <= X:
            hi = min(lo + step, X + 1)
            count += sieve_range(SieveConfig(args.k, lo, hi, args.segment), workers=args.workers).count()
            lo = hi
        with precision.working():
            expected = zinv.value * X
            err = zinv.err * X
            resid = count - expected
            rows.append(
                {
                    "X": X,
                    "count": count,
                    "expected": _num(expected),
                    "residual": _num(resid),
                    "normalized": _num(resid / mpf(X) ** (mpf(1) / args.k), 20),
                    "err": mpmath.nstr(err, 6),
                }
            )
    cols = ("X", "count", "expected", "residual", "normalized", "err")
    return csv_text(cols, rows, {"command": "sieve", "k": args.k})


def cmd_moments(args):
    if args.flavor == "short":
        rep = short_moment(args.x, args.H, args.ell, args.k, args.tol, workers=args.workers)
    else:
        rep = ap_moment(args.X, args.q, args.ell, args.k, args.tol)
    meta = {"command": f"moments {args.flavor}", "k": args.k, "ell": args.ell}
    return csv_text(MomentReport.COLUMNS, [rep.to_row()], meta)


def cmd_singular(args):
    v = singular_series(args.shifts, args.q, args.k, args.tol)
    return json_text(
        {"shifts": list(args.shifts), "q": args.q, "k": args.k, "tol": args.tol, **v.to_json()}
    )


def cmd_cseries(args):
    out = {"H": str(args.H), "ell": args.ell, "q": args.q, "k": args.k, "tol": args.tol}
    b = f = None
    if args.method in ("binomial", "both"):
        b = moment_constant_binomial(args.H, args.ell, args.q, args.k, args.tol, args.budget)
        out["binomial"] = b.to_json()
    if args.method in ("fourier", "both"):
        f = moment_constant_fourier(args.H, args.ell, args.q, args.k, args.radius, budget=args.budget)
        out["fourier"] = {**f.to_json(), "radius": args.radius, "tail": mpmath.nstr(f.meta["tail"], 6)}
        out["fourier"]["fitted_constant"] = f.meta["fitted_constant"]
    if b is not None and f is not None:
        with precision.working():
            out["delta"] = mpmath.nstr(abs(b.value - f.value), 10)
    return json_text(out)


def cmd_verify(args):
    results = run_suite(args.suite)
    for r in results:
        print(r.line(), file=sys.stderr)
    payload = {"suite": args.suite, "passed": all(r.passed for r in results), "results": [r.to_dict() for r in results]}
    return json_text(payload), payload["passed"]


def build_parser():
    p = argparse.ArgumentParser(prog="kfree", description="k-free numbers in short intervals and progressions")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--precision", type=int, help="significant decimal digits (default from KFREE_PRECISION or 50)")
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--manifest", help="write a run manifest (JSON) here")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sieve", help="k-free counts at decimal checkpoints")
    s.add_argument("--k", type=_exponent, required=True)
    s.add_argument("--limit", type=_positive, required=True)
    s.add_argument("--segment", type=_positive, default=1 << 22)

    m = sub.add_parser("moments", help="discrepancy moments from exact power sums")
    msub = m.add_subparsers(dest="flavor", required=True)
    ms = msub.add_parser("short", help="short intervals")
    ms.add_argument("--x", type=_positive, required=True)
    ms.add_argument("--H", type=_positive, required=True)
    ma = msub.add_parser("ap", help="arithmetic progressions")
    ma.add_argument("--X", type=_positive, required=True)
    ma.add_argument("--q", type=_positive, required=True)
    for sp in (ms, ma):
        sp.add_argument("--k", type=_exponent, default=2)
        sp.add_argument("--ell", type=_positive, required=True)
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL)

    g = sub.add_parser("singular", help="singular series of a shift tuple")
    g.add_argument("--q", type=_positive, default=1)
    g.add_argument("--k", type=_exponent, default=2)
    g.add_argument("--shifts", type=_shifts, required=True)
    g.add_argument("--tol", type=float, default=DEFAULT_TOL)

    c = sub.add_parser("cseries", help="binomially compensated singular-series average")
    c.add_argument("--H", type=_real, required=True)
    c.add_argument("--ell", type=_positive, required=True)
    c.add_argument("--q", type=_positive, default=1)
    c.add_argument("--k", type=_exponent, default=2)
    c.add_argument("--method", choices=("binomial", "fourier", "both"), default="binomial")
    c.add_argument("--radius", type=int, default=30)
    c.add_argument("--tol", type=float, default=DEFAULT_TOL)
    c.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=(*SUITES, "all"))
    return p


COMMANDS = {"sieve": cmd_sieve, "moments": cmd_moments, "singular": cmd_singular, "cseries": cmd_cseries}


def _params(args):
    skip = {"out", "manifest", "workers", "precision"}
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.precision is not None:
        try:
            precision.set_digits(args.precision)
        except ValueError as e:
            parser.error(str(e))
    t0 = time.perf_counter()
    passed = True
    try:
        if args.command == "verify":
            text, passed = cmd_verify(args)
        else:
            text = COMMANDS[args.command](args)
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as e:
        print(f"capacity exceeded: {e}", file=sys.stderr)
        return EXIT_CAPACITY
    except (BudgetError, PrecisionError) as e:
        achieved = getattr(e, "achieved", None)
        extra = f" (achieved error {mpmath.nstr(achieved, 6)})" if achieved is not None else ""
        print(f"not completed: {e}{extra}", file=sys.stderr)
        return EXIT_BUDGET
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.manifest:
        man = RunManifest(
            command=args.command,
            parameters=_params(args),
            version=__version__,
            precision=precision.digits(),
            workers=args.workers,
            backend=BACKEND,
            wall_time=time.perf_counter() - t0,
            output_digest=digest(text),
        )
        with open(args.manifest, "w", encoding="utf-8") as fh:
            fh.write(man.to_json())
    return 0 if passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
