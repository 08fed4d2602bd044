"""Closed-form real roots of cubic polynomials.

Roots of c3*x^3 + c2*x^2 + c1*x + c0 are computed from the depressed form
t^3 + p*t + q: by the trigonometric method when the discriminant indicates
three real roots, and by a cancellation-safe Cardano formula otherwise.
Each root gets a single Newton step on the original polynomial to take out
the rounding accumulated by the radicals.  Branch selection is stable
through the discriminant zero 4*p^3 = -27*q^2.
"""

import math


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def real_cubic_roots(c3: float, c2: float, c1: float, c0: float) -> list[float]:
    """All real roots of the cubic, ascending, with multiplicity collapsed
    only as far as floating point collapses it naturally.

    Raises ValueError when c3 == 0; callers own the degenerate reduction.
    """
    if c3 == 0.0:
        raise ValueError("leading coefficient is zero, not a cubic")
    b = c2 / c3
    c = c1 / c3
    d = c0 / c3
    # depressed cubic t^3 + p t + q, x = t - b/3
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    disc = -4.0 * p ** 3 - 27.0 * q * q

    if p == 0.0 and q == 0.0:
        ts = [0.0]
    elif disc >= 0.0:
        # three real roots; requires p <= 0 here
        m = 2.0 * math.sqrt(max(-p, 0.0) / 3.0)
        if m == 0.0:
            ts = [0.0]
        else:
            arg = 3.0 * q / (p * m)
            arg = min(1.0, max(-1.0, arg))
            theta = math.acos(arg)
            ts = [m * math.cos((theta - 2.0 * math.pi * k) / 3.0) for k in range(3)]
    else:
        # one real root; pick the large-magnitude cube root to avoid cancellation
        s = math.sqrt(q * q / 4.0 + p ** 3 / 27.0)
        u = _cbrt(-q / 2.0 - math.copysign(s, q))
        if u == 0.0:
            ts = [0.0]
        else:
            ts = [u - p / (3.0 * u)]

    roots = []
    for t in ts:
        x = t - b / 3.0
        fx = ((c3 * x + c2) * x + c1) * x + c0
        dfx = (3.0 * c3 * x + 2.0 * c2) * x + c1
        if dfx != 0.0 and math.isfinite(fx):
            x = x - fx / dfx
        roots.append(x)
    roots.sort()
    return roots


def largest_real_root(c3: float, c2: float, c1: float, c0: float) -> float:
    return real_cubic_roots(c3, c2, c1, c0)[-1]
