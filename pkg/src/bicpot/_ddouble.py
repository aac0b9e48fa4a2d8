"""Vectorized double-double (pairwise float64) arithmetic helpers.

The incomplete-gamma and cosine-integral power series are evaluated on (or
near) the imaginary axis, where the terms peak at ~e^|x| while the sum stays
O(1).  Plain float64 accumulation therefore loses ~e^|x| * eps of absolute
accuracy (1e-4 at |x| = 30).  Accumulating terms as unevaluated (hi, lo)
float64 pairs keeps ~32 significant digits through the cancellation, which is
all the headroom those series need below the default series/asymptotic
switchover.  This is fixed two-word precision, not arbitrary precision.

All functions broadcast over numpy arrays and assume IEEE-754 round-to-nearest
without FMA contraction (true for numpy ufuncs).
"""

import numpy as np

# Dekker splitting constant for 53-bit doubles: 2**27 + 1.
_SPLITTER = 134217729.0


def two_sum(a, b):
    """Exact sum: s + err == a + b with s = fl(a + b)."""
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def quick_two_sum(a, b):
    """Exact sum assuming |a| >= |b|."""
    s = a + b
    err = b - (s - a)
    return s, err


def two_prod(a, b):
    """Exact product: p + err == a * b with p = fl(a * b)."""
    p = a * b
    ta = _SPLITTER * a
    ahi = ta - (ta - a)
    alo = a - ahi
    tb = _SPLITTER * b
    bhi = tb - (tb - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


def dd_add(xh, xl, yh, yl):
    # Accurate (Knuth) variant: the fast one drops the low word under
    # mixed-sign cancellation, which is the whole workload here.
    sh, se = two_sum(xh, yh)
    th, te = two_sum(xl, yl)
    se = se + th
    sh, se = quick_two_sum(sh, se)
    se = se + te
    return quick_two_sum(sh, se)


def dd_neg(xh, xl):
    return -xh, -xl


def dd_mul_d(xh, xl, y):
    """Double-double times plain double."""
    p, e = two_prod(xh, y)
    e = e + xl * y
    return quick_two_sum(p, e)


def dd_div_d(xh, xl, y):
    """Double-double divided by plain double."""
    q1 = xh / y
    p, e = two_prod(q1, y)
    q2 = ((xh - p) - e + xl) / y
    return quick_two_sum(q1, q2)


def d_div_d(a, b):
    """Quotient of two doubles as a double-double."""
    q1 = a / b
    p, e = two_prod(q1, b)
    q2 = ((a - p) - e) / b
    return quick_two_sum(q1, q2)


def dd_div(xh, xl, yh, yl):
    """Full double-double division (three Newton corrections, QD style)."""
    q1 = xh / yh
    th, tl = dd_mul_d(yh, yl, q1)
    rh, rl = dd_add(xh, xl, -th, -tl)
    q2 = rh / yh
    th, tl = dd_mul_d(yh, yl, q2)
    rh, rl = dd_add(rh, rl, -th, -tl)
    q3 = rh / yh
    qh, ql = quick_two_sum(q1, q2)
    return dd_add(qh, ql, q3, np.zeros_like(q3))
