"""Numpy implementations of the hot kernels.

Used when the compiled ``_kernels`` extension is unavailable or when
``KFREE_PURE_PYTHON`` is set.  Signatures and results match the extension
exactly; ``tests/test_kernels.py`` checks both backends against each other.
"""

from itertools import combinations_with_replacement
from math import factorial

import numpy as np


def strike(buf, lo, pk):
    """Zero ``buf[i]`` whenever some modulus in ``pk`` divides ``lo + i``."""
    n = buf.shape[0]
    for m in pk:
        m = int(m)
        start = (-lo) % m
        if start < n:
            buf[start::m] = 0


def window_histogram(bits, x, H):
    """Histogram of N(n) = bits[n-1] + ... + bits[n+H-2] over n = 1..x.

    ``bits[i]`` is the indicator of the integer ``i + 1``.  Returns an int64
    array ``hist`` of length ``H + 1`` with ``hist[v] = #{n : N(n) = v}``.
    """
    if x <= 0:
        return np.zeros(H + 1, dtype=np.int64)
    csum = np.zeros(x + H, dtype=np.int64)
    np.cumsum(bits[: x + H - 1], out=csum[1:])
    counts = csum[H : H + x] - csum[:x]
    return np.bincount(counts, minlength=H + 1).astype(np.int64)


def _patterns_with_max(s, j):
    """Sorted j-tuples 0 = a_0 <= ... <= a_{j-1} = s as a 2-d array."""
    if j == 1:
        return np.zeros((1, 1), dtype=np.int64)
    mids = list(combinations_with_replacement(range(s + 1), j - 2))
    rows = np.empty((len(mids), j), dtype=np.int64)
    rows[:, 0] = 0
    rows[:, -1] = s
    if j > 2:
        rows[:, 1:-1] = np.asarray(mids, dtype=np.int64).reshape(len(mids), j - 2)
    return rows


def _distinct_sorted(v):
    v = np.sort(v, axis=1)
    return 1 + np.count_nonzero(np.diff(v, axis=1), axis=1)


def pattern_codes(m, j, pk, s_lo, s_hi):
    """Codes and weights of translation-reduced sorted shift patterns.

    Enumerates sorted tuples with minimum 0 and maximum ``s`` for
    ``s_lo <= s < s_hi`` (``s < m``).  For each pattern, the code packs the
    distinct count ``d`` and the residue counts ``u`` modulo each entry of
    ``pk`` in base ``j + 1``::

        code = d + (j+1) * u_0 + (j+1)**2 * u_1 + ...

    and the weight is (number of distinct orderings) * (m - s), the number of
    tuples in [0, m)^j reducing to the pattern.
    """
    base = j + 1
    codes, weights = [], []
    jf = factorial(j)
    for s in range(s_lo, min(s_hi, m)):
        if j == 1 and s > 0:
            break
        rows = _patterns_with_max(s, j)
        eq = np.diff(rows, axis=1) == 0
        run = np.ones(rows.shape[0], dtype=np.int64)
        pf = np.ones(rows.shape[0], dtype=np.int64)
        for c in range(j - 1):
            run = np.where(eq[:, c], run + 1, 1)
            pf *= np.where(eq[:, c], run, 1)
        code = 1 + np.count_nonzero(~eq, axis=1).astype(np.int64)
        scale = base
        for mod in pk:
            code += scale * _distinct_sorted(rows % int(mod))
            scale *= base
        codes.append(code)
        weights.append((jf // pf) * (m - s))
    if not codes:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(codes), np.concatenate(weights)
