import numpy as np
import pytest
from hypothesis import given, strategies as st

from dynamostab.cubics import largest_real_root, real_cubic_roots


def _numpy_real_roots(c3, c2, c1, c0):
    roots = np.roots([c3, c2, c1, c0])
    return sorted(r.real for r in roots if abs(r.imag) < 1e-8 * max(1.0, abs(r)))


def test_simple_three_real():
    # (x-1)(x-2)(x-3)
    roots = real_cubic_roots(1.0, -6.0, 11.0, -6.0)
    assert np.allclose(roots, [1.0, 2.0, 3.0], atol=1e-14)


def test_one_real_root():
    # x^3 + x + 1: single real root near -0.6823
    roots = real_cubic_roots(1.0, 0.0, 1.0, 1.0)
    assert len(roots) == 1
    x = roots[0]
    assert abs(x ** 3 + x + 1.0) < 1e-14


def test_triple_root():
    roots = real_cubic_roots(1.0, -3.0, 3.0, -1.0)
    assert all(abs(r - 1.0) < 1e-5 for r in roots)


def test_leading_zero_rejected():
    with pytest.raises(ValueError):
        real_cubic_roots(0.0, 1.0, 1.0, 1.0)


def test_largest_real_root_depressed_family():
    # t^3 - 4 g d t - 4 g^2 s: largest root positive when s > 0
    for g, d, s in [(0.99, 0.01, 0.05), (1.5, 0.1, 1e-4), (0.5, 0.001, 2.0)]:
        t = largest_real_root(1.0, 0.0, -4.0 * g * d, -4.0 * g * g * s)
        assert t > 0.0
        assert abs(t ** 3 - 4.0 * g * d * t - 4.0 * g * g * s) < 1e-12 * max(1.0, t ** 3)


@given(
    st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5),
    st.floats(min_value=0.1, max_value=5.0),
)
def test_matches_numpy_companion_roots(c2, c1, c0, c3):
    mine = real_cubic_roots(c3, c2, c1, c0)
    ref = _numpy_real_roots(c3, c2, c1, c0)
    assert len(mine) in (1, 3)
    # same number of real roots away from double-root degeneracies
    if len(mine) == len(ref):
        for a, b in zip(mine, ref):
            assert abs(a - b) < 1e-7 * max(1.0, abs(b))
    # every reported root really is a root
    for x in mine:
        val = ((c3 * x + c2) * x + c1) * x + c0
        scale = max(abs(c3 * x ** 3), abs(c2 * x ** 2), abs(c1 * x), abs(c0), 1.0)
        assert abs(val) < 1e-10 * scale
