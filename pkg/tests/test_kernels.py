import numpy as np
import pytest

from kfree import _fallback
from kfree._core import BACKEND

compiled = pytest.importorskip("kfree._kernels")
BACKENDS = [_fallback, compiled]


def test_backend_selected():
    assert BACKEND in ("compiled", "python")


@pytest.mark.parametrize("mod", BACKENDS)
def test_strike(mod):
    buf = np.ones(100, dtype=np.uint8)
    mod.strike(buf, 1, np.array([4, 9, 25], dtype=np.int64))
    expected = [0 if (n % 4 == 0 or n % 9 == 0 or n % 25 == 0) else 1 for n in range(1, 101)]
    assert buf.tolist() == expected


@pytest.mark.parametrize("mod", BACKENDS)
def test_window_histogram_brute_force(mod):
    rng = np.random.default_rng(3)
    bits = rng.integers(0, 2, 300).astype(np.uint8)
    x, H = 250, 7
    hist = mod.window_histogram(bits, x, H)
    ref = np.zeros(H + 1, dtype=np.int64)
    for n in range(1, x + 1):
        ref[int(bits[n - 1 : n - 1 + H].sum())] += 1
    assert hist.tolist() == ref.tolist()


@pytest.mark.parametrize("m,j", [(1, 1), (5, 1), (6, 2), (9, 3), (12, 4), (7, 5)])
def test_pattern_codes_agree(m, j):
    pk = np.array([4, 9], dtype=np.int64)
    a = _fallback.pattern_codes(m, j, pk, 0, m)
    b = compiled.pattern_codes(m, j, pk, 0, m)
    assert a[0].tolist() == b[0].tolist()
    assert a[1].tolist() == b[1].tolist()
    assert int(a[1].sum()) == m**j


def test_pattern_codes_chunking():
    pk = np.array([4], dtype=np.int64)
    whole = compiled.pattern_codes(20, 3, pk, 0, 20)
    parts = [compiled.pattern_codes(20, 3, pk, s, min(s + 6, 20)) for s in range(0, 20, 6)]
    assert np.concatenate([p[0] for p in parts]).tolist() == whole[0].tolist()


def test_fallback_end_to_end(monkeypatch):
    import kfree.sieve as sieve_mod
    import kfree.singular as sing_mod

    ref_count = sieve_mod.sieve_range(sieve_mod.SieveConfig(2, 1, 10**5)).count()
    ref_box = sing_mod.shift_box_sum(10, 3)
    monkeypatch.setattr(sieve_mod, "kernels", _fallback)
    monkeypatch.setattr(sing_mod, "kernels", _fallback)
    assert sieve_mod.sieve_range(sieve_mod.SieveConfig(2, 1, 10**5)).count() == ref_count
    assert sing_mod.shift_box_sum(10, 3).value == ref_box.value


def test_environment_forces_fallback():
    import os
    import subprocess
    import sys

    code = "from kfree._core import BACKEND; from kfree.sieve import count_kfree; print(BACKEND, count_kfree(2, 10**5))"
    env = dict(os.environ, KFREE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout.split()
    assert out == ["python", "60794"]
