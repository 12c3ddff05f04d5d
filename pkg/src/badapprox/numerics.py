"""Arbitrary-precision helpers used by every other module.

All geometry runs on mpmath reals at a configurable precision (default 128
bits).  Where an interval endpoint has to err on the safe side we widen it
*outward* by a relative nudge of 2^(5-p); that dwarfs the handful of ulps of
rounding error a short computation chain can accumulate while staying inside
the 2^(8-p) inflation budget the length laws tolerate.  Exact work (grid
indices, exponents, class brackets) stays in integers and fractions.
"""

import math
from fractions import Fraction

import mpmath
from mpmath import mp

DEFAULT_PREC = 128


def workprec(bits):
    """Context manager pinning the mpmath working precision."""
    return mp.workprec(int(bits))


def to_mpf(x):
    """Convert int/float/str/Fraction to an mpf at the current precision.

    An existing mpf passes through untouched (conversion at a lower ambient
    precision would silently shave bits off).
    """
    if isinstance(x, mpmath.mpf):
        return x
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def frac_pow(base, exponent):
    """base**exponent with an exact rational exponent.

    Integer exponents on integer bases stay exact; everything else goes
    through mpf power at the current precision.
    """
    if isinstance(exponent, Fraction) and exponent.denominator == 1:
        exponent = int(exponent)
    if isinstance(exponent, int):
        if isinstance(base, int):
            if exponent >= 0:
                return base ** exponent
            return mpmath.mpf(1) / base ** (-exponent)
        return to_mpf(base) ** exponent
    return to_mpf(base) ** to_mpf(exponent)


def mpf_to_frac(x):
    """Exact Fraction value of an mpf (every finite mpf is dyadic)."""
    if not isinstance(x, mpmath.mpf):
        x = mpmath.mpf(x)
    if x == 0:
        return Fraction(0)
    sign, man, exp, _ = x._mpf_
    frac = Fraction(man) * Fraction(2) ** exp
    return -frac if sign else frac


def outward_eps():
    """Relative widening factor at the current precision."""
    return mpmath.mpf(2) ** (5 - mp.prec)


def widen(lo, hi):
    """Outward-rounded copy of [lo, hi]; only ever inflates."""
    eps = outward_eps()
    pad = (mpmath.fabs(lo) + mpmath.fabs(hi) + 1) * eps
    return lo - pad, hi + pad


def nint_dist(x):
    """Distance to the nearest integer.

    Exact for Fraction/int inputs, mpf otherwise.  Ties (distance exactly
    one half) are exact in the rational branch by construction.
    """
    if isinstance(x, int):
        return Fraction(0)
    if isinstance(x, Fraction):
        r = x - math.floor(x)
        return min(r, 1 - r)
    x = to_mpf(x)
    r = x - mpmath.floor(x)
    return min(r, 1 - r)


def mpf_str(x, prec=None):
    """Full-precision decimal string, round-trippable at the same precision.

    An existing mpf is formatted as-is (never re-rounded through the ambient
    context); other types are converted at ``prec`` bits first.
    """
    prec = prec or mp.prec
    if not isinstance(x, mpmath.mpf):
        with workprec(prec):
            x = to_mpf(x)
    digits = int(prec * 0.30103) + 8
    return mpmath.nstr(x, digits, strip_zeros=True)


def bracket_power(value, base):
    """Largest integer e with base**e <= value, by exact integer-power compare.

    ``value`` may be mpf or Fraction, ``base`` an integer >= 2; value must be
    positive.  The initial guess from a float log is corrected by direct
    comparison so boundary cases land on the right side.
    """
    if value <= 0:
        raise ValueError("bracket_power needs a positive value")
    e = int(math.floor(mpmath.log(value, base)))
    while frac_pow(base, e) > value:
        e -= 1
    while frac_pow(base, e + 1) <= value:
        e += 1
    return e


def is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0
