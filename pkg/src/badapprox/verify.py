"""Brute-force Diophantine oracles.

Independent of the construction machinery: these exhaust explicit search
boxes (never sample) and are used both to certify survivor points and as
ground truth in tests.  Distances to the nearest integer are computed in
exact rational arithmetic whenever the inputs are rational (ints, floats
and Fractions all count: a float is its exact dyadic value) and with guard
digits otherwise.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .errors import ConstraintViolation
from .numerics import DEFAULT_PREC, frac_pow, mpf_str, nint_dist, to_mpf, workprec
from .params import ExponentPair

EXHAUSTIVE_Q = 1000


@dataclass
class BadnessReport:
    """Result of one exhaustive minimization.

    value is exactly the minimum over the stated box; argmin is the witness
    (a q, or an (A, B) pair) and box records what was exhausted.
    """

    form: str
    value: object
    argmin: object
    box: dict

    def is_zero(self):
        return self.value == 0

    def to_jsonable(self):
        value = self.value
        if isinstance(value, Fraction):
            value_repr = str(value)
        else:
            value_repr = mpf_str(to_mpf(value))
        return {"form": self.form, "value": value_repr,
                "witness": self.argmin, "box": self.box}


@dataclass
class ConvergentList:
    """Continued-fraction convergents (p_k, q_k) of alpha with q_k <= Q."""

    alpha_repr: str
    Q: int
    pairs: list

    def denominators(self):
        return [q for _, q in self.pairs]


def _as_number(x):
    """Fraction for exactly-rational inputs, mpf otherwise (kept as-is)."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, mpmath.mpf):
        return x
    return mpmath.mpf(x)


def convergents(alpha, Q, precision_bits=DEFAULT_PREC):
    """Convergents of alpha up to denominator Q.

    Rational alpha uses the exact Euclidean expansion (terminating);
    irrational alpha runs at enough precision that every partial quotient
    up to denominator Q is unambiguous.
    """
    if Q < 1:
        raise ConstraintViolation("Q >= 1", f"Q = {Q}")
    alpha = _as_number(alpha)
    pairs = []
    # recurrence seeds: p_{-2}, p_{-1} = 0, 1 and q_{-2}, q_{-1} = 1, 0
    if isinstance(alpha, Fraction):
        num, den = alpha.numerator, alpha.denominator
        p0, p1 = 0, 1
        q0, q1 = 1, 0
        while den != 0:
            a, rem = divmod(num, den)
            p0, p1 = p1, a * p1 + p0
            q0, q1 = q1, a * q1 + q0
            if q1 > Q:
                break
            pairs.append((p1, q1))
            num, den = den, rem
    else:
        prec = max(2 * precision_bits, 4 * int(Q).bit_length() + 96)
        with workprec(prec):
            t = mpmath.mpf(alpha)
            cutoff = mpmath.mpf(2) ** (-(prec // 2))
            p0, p1 = 0, 1
            q0, q1 = 1, 0
            while True:
                a = int(mpmath.floor(t))
                p0, p1 = p1, a * p1 + p0
                q0, q1 = q1, a * q1 + q0
                if q1 > Q:
                    break
                pairs.append((p1, q1))
                frac = t - a
                if frac < cutoff:
                    break  # numerically terminated
                t = 1 / frac
    # q_0 = q_1 = 1 can repeat when a_1 = 1; keep the better (later) one
    dedup = {}
    for p, q in pairs:
        dedup[q] = p
    pairs = sorted((p, q) for q, p in dedup.items())
    pairs.sort(key=lambda pq: pq[1])
    return ConvergentList(alpha_repr=str(alpha), Q=int(Q), pairs=pairs)


def _dist(t, guard_prec):
    """Nearest-integer distance of a Fraction or mpf product."""
    if isinstance(t, Fraction):
        return nint_dist(t)
    with workprec(guard_prec):
        return nint_dist(t)


def _pow_term(dist, inv_exp, guard_prec):
    """dist^(1/e) as an mpf (0 stays exactly 0)."""
    if dist == 0:
        return mpmath.mpf(0)
    with workprec(guard_prec):
        return to_mpf(frac_pow(to_mpf(dist), inv_exp))


def sim_badness(x, y, pair, Q, precision_bits=DEFAULT_PREC):
    """min over 1 <= q <= Q of q * max{||q x||^(1/i), ||q y||^(1/j)}.

    A coordinate whose exponent is zero is dropped (its power is zero by
    convention), so the (1,0) pair depends only on x and (0,1) only on y.
    """
    pair = pair if isinstance(pair, ExponentPair) else ExponentPair.make(*pair)
    if Q < 1:
        raise ConstraintViolation("Q >= 1", f"Q = {Q}")
    guard = 2 * precision_bits
    xs = _as_number(x)
    ys = _as_number(y)
    i, j = pair.i, pair.j
    best = None
    best_q = None
    with workprec(guard):
        x_m = xs if isinstance(xs, Fraction) else mpmath.mpf(xs)
        y_m = ys if isinstance(ys, Fraction) else mpmath.mpf(ys)
        for q in range(1, int(Q) + 1):
            parts = []
            if i > 0:
                parts.append(_pow_term(_dist(q * x_m, guard), 1 / i, guard))
            if j > 0:
                parts.append(_pow_term(_dist(q * y_m, guard), 1 / j, guard))
            val = q * max(parts)
            if best is None or val < best:
                best, best_q = val, q
                if best == 0:
                    break
    return BadnessReport(form="simultaneous", value=best, argmin=best_q,
                         box={"Q": int(Q)})


def _dual_value(A, B, x, y, pair, guard):
    i, j = pair.i, pair.j
    if A != 0 and i == 0:
        return None
    if B != 0 and j == 0:
        return None
    pa = _pow_term(abs(A), 1 / i, guard) if i > 0 and A else 0
    pb = _pow_term(abs(B), 1 / j, guard) if j > 0 and B else 0
    P = max(pa, pb)
    if P == 0:
        return None
    d = _dist(A * x - B * y, guard)
    if d == 0:
        return mpmath.mpf(0)
    with workprec(guard):
        return P * to_mpf(d)


def dual_badness(x, y, pair, Amax, Bmax, precision_bits=DEFAULT_PREC):
    """min over (A,B) != (0,0), |A| <= Amax, |B| <= Bmax of
    max{|A|^(1/i), |B|^(1/j)} * ||A x - B y||.

    (A, B) and (-A, -B) give the same value, so the scan covers the
    canonical half (A > 0, or A = 0 with B > 0).  A zero exponent excludes
    the matching coefficient (its power is infinite for nonzero values).
    Large boxes are pre-filtered in floating point with a provably safe
    margin, then the candidates are re-evaluated exactly.
    """
    pair = pair if isinstance(pair, ExponentPair) else ExponentPair.make(*pair)
    if Amax < 1 or Bmax < 1:
        raise ConstraintViolation("Amax, Bmax >= 1", f"got {Amax}, {Bmax}")
    guard = 2 * precision_bits
    xs, ys = _as_number(x), _as_number(y)
    i, j = pair.i, pair.j
    a_hi = 0 if i == 0 else int(Amax)
    b_hi = 0 if j == 0 else int(Bmax)
    box = {"Amax": int(Amax), "Bmax": int(Bmax)}

    candidates = None
    n_pairs = (a_hi + 1) * (2 * b_hi + 1)
    if n_pairs > 4000 and i > 0 and j > 0:
        with workprec(guard):
            xf, yf = float(xs), float(ys)
        A = np.arange(0, a_hi + 1, dtype=np.float64)[:, None]
        B = np.arange(-b_hi, b_hi + 1, dtype=np.float64)[None, :]
        T = A * xf - B * yf
        D = np.abs(T - np.rint(T))
        P = np.maximum(np.power(np.abs(A), float(1 / i)),
                       np.power(np.abs(B), float(1 / j)))
        val = P * D
        bad = (A + np.abs(B) == 0) | ((A == 0) & (B < 0))
        val[bad] = np.inf
        vmin = float(val.min())
        margin = float(P[~bad].max()) * 1e-11 + 1e-12
        keep = np.argwhere(val <= vmin + margin)
        candidates = [(int(A[a, 0]), int(B[0, b])) for a, b in keep]
    if candidates is None:
        if i == 0:
            candidates = [(0, b) for b in range(1, b_hi + 1)]
        elif j == 0:
            candidates = [(a, 0) for a in range(1, a_hi + 1)]
        else:
            candidates = [(a, b) for a in range(0, a_hi + 1)
                          for b in range(-b_hi, b_hi + 1)
                          if (a, b) != (0, 0) and not (a == 0 and b < 0)]

    best, best_ab = None, None
    for a, b in sorted(candidates):
        v = _dual_value(a, b, xs, ys, pair, guard)
        if v is None:
            continue
        if best is None or v < best:
            best, best_ab = v, (a, b)
            if best == 0:
                break
    return BadnessReport(form="dual", value=best, argmin=best_ab, box=box)


def quadratic_badness(x, N, precision_bits=DEFAULT_PREC):
    """The parabola form: min over the box of max{A^2, B^2} ||A x - B x^2||."""
    if N < 1:
        raise ConstraintViolation("N >= 1", f"N = {N}")
    xs = _as_number(x)
    if isinstance(xs, Fraction):
        y = xs * xs
    else:
        with workprec(2 * precision_bits):
            y = mpmath.mpf(xs) ** 2
    half = ExponentPair.make(Fraction(1, 2), Fraction(1, 2))
    rep = dual_badness(xs, y, half, N, N, precision_bits=precision_bits)
    return BadnessReport(form="quadratic", value=rep.value, argmin=rep.argmin,
                         box={"N": int(N)})


def exponent_check(alpha, exponent, Q, precision_bits=DEFAULT_PREC):
    """min over 1 <= q <= Q of q^exponent * ||q alpha||.

    For Q above the exhaustive threshold the scan is restricted to
    continued-fraction denominators: any q between consecutive denominators
    is beaten by the smaller denominator in both factors.
    """
    if Q < 1:
        raise ConstraintViolation("Q >= 1", f"Q = {Q}")
    exponent = Fraction(exponent) if not isinstance(exponent, (Fraction, int)) else exponent
    if exponent <= 0:
        raise ConstraintViolation("exponent > 0", f"exponent = {exponent}")
    guard = 2 * precision_bits
    a_num = _as_number(alpha)
    if Q <= EXHAUSTIVE_Q:
        qs = range(1, int(Q) + 1)
        method = "exhaustive"
    else:
        qs = convergents(alpha, Q, precision_bits=precision_bits).denominators()
        method = "convergents"
    best, best_q = None, None
    with workprec(guard):
        a_m = a_num if isinstance(a_num, Fraction) else mpmath.mpf(a_num)
        for q in qs:
            d = _dist(q * a_m, guard)
            if d == 0:
                best, best_q = mpmath.mpf(0), q
                break
            val = to_mpf(frac_pow(q, exponent)) * to_mpf(d)
            if best is None or val < best:
                best, best_q = val, q
    return BadnessReport(form="exponent", value=best, argmin=best_q,
                         box={"Q": int(Q), "method": method,
                              "exponent": str(exponent)})
