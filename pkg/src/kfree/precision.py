"""Working precision for all multiprecision evaluations.

The default number of significant decimal digits is read once from the
``KFREE_PRECISION`` environment variable (default 50).  Every routine that
touches :mod:`mpmath` runs inside :func:`working`, so results depend only on
the configured digits and never on whatever ``mp.dps`` the caller left behind.
"""

import contextlib
import os

from mpmath import mp, mpf

DEFAULT_DIGITS = 50
# digits kept beyond the reported precision
GUARD_DIGITS = 10

_digits = [int(os.environ.get("KFREE_PRECISION", DEFAULT_DIGITS))]


def digits():
    """Currently configured significant digits."""
    return _digits[-1]


def set_digits(d):
    if d < 20:
        raise ValueError("precision below 20 digits is not supported")
    _digits[-1] = int(d)


@contextlib.contextmanager
def extra_digits(n):
    """Temporarily raise the configured precision by ``n`` digits."""
    _digits.append(_digits[-1] + max(0, int(n)))
    try:
        yield
    finally:
        _digits.pop()


def working():
    """mpmath context at configured precision plus guard digits."""
    return mp.workdps(digits() + GUARD_DIGITS)


def ulp():
    """Rounding allowance charged per multiprecision operation.

    One unit in the ``digits() - 10``-th significant digit, i.e. ``1e-40`` at
    the default 50 digits.
    """
    return mpf(10) ** (-(digits() - 10))
