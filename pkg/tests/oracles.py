"""Independent reference computations backing the test suite.

The enumeration oracle here deliberately avoids the production pruning
logic: it scans a widened coefficient box outright, triages candidates with
a vectorized float screen whose margins are orders of magnitude wider than
the production prefilter, and only then hands survivors to the exact star
pipeline shared with the code under test.
"""

import math
from fractions import Fraction

import mpmath
import numpy as np

from badapprox.lines import Line, arcs, classify, coefficient_box, star_interval
from badapprox.numerics import mpf_str, to_mpf, workprec
from badapprox.params import CurveSpec

WIDE = 8.0  # float-screen margin factor


def star_key(star):
    lab = star.label
    return (star.line.A, star.line.B, star.line.C, star.type,
            mpf_str(star.H), mpf_str(star.arc.lo),
            lab.n, lab.k, lab.l, lab.m, lab.sub, lab.u, lab.v)


def _pipeline(curve, params, A, B, c_values, n, w_lo, w_hi, found):
    lo_bound = params.R ** (n - 1)
    hi_bound = params.R ** n
    g = math.gcd(abs(A), abs(B))
    for C in c_values:
        C = int(C)
        if math.gcd(g, abs(C)) != 1:
            continue
        line = Line(A, B, C)
        for arc in arcs(line, curve, params):
            star = star_interval(arc, params)
            if star.exceptional:
                continue
            if not (lo_bound <= star.H < hi_bound):
                continue
            if not star.meets(w_lo, w_hi):
                continue
            star.label = classify(star, params)
            found.append(star)


def brute_force_class(curve, params, n, window, factor=2):
    """Reference enumeration over a ``factor``-times widened coefficient box."""
    assert curve.kind == CurveSpec.PARABOLA, "oracle written for the parabola"
    box = coefficient_box(params, n)
    a_max = factor * max(box.Amax, 1)
    b_max = factor * max(box.Bmax, 1)
    found = []
    with workprec(params.precision_bits):
        dom_lo, dom_hi = curve.lo_hi()
        w_lo = max(to_mpf(window[0]), dom_lo)
        w_hi = min(to_mpf(window[1]), dom_hi)
        if w_lo > w_hi:
            return []
        s_max = params.K * mpmath.sqrt(params.c) / params.R ** (n - 1) * 2
        pad_lo = float(max(w_lo - s_max, dom_lo))
        pad_hi = float(min(w_hi + s_max, dom_hi))
        sqrt_c = float(mpmath.sqrt(params.c))
        lo_b = params.R ** (n - 1) / WIDE
        hi_b = params.R ** n * WIDE
        i, j = params.pair.i, params.pair.j
        C0p1 = float(to_mpf(params.C0 + 1))
        thr_base = C0p1 * float(params.R) ** (-params.lam)
        # integer data for F at the domain endpoints: F(p/q) = (base + C q^2)/q^2
        ends = []
        for fx in curve.domain:
            p, q = fx.numerator, fx.denominator
            ends.append((p, q))
        for A in range(0, a_max + 1):
            pa = float(A) ** float(1 / i) if A else 0.0
            for B in range(-b_max, b_max + 1):
                if A == 0 and B <= 0:
                    continue
                pb = float(abs(B)) ** float(1 / j) if B else 0.0
                M = max(pa, pb)
                mu = float(params.c) / M
                f0 = [A * x - B * x * x for x in (pad_lo, pad_hi)]
                if B != 0:
                    h = A / (2.0 * B)
                    if pad_lo <= h <= pad_hi:
                        f0.append(A * h - B * h * h)
                c_lo = int(math.floor(-max(f0) - mu)) - 2
                c_hi = int(math.ceil(-min(f0) + mu)) + 2
                cands = np.arange(c_lo, c_hi + 1, dtype=np.int64)
                if B == 0:
                    h1 = A * M / sqrt_c
                    if not lo_b <= h1 <= hi_b:
                        continue
                    keep = np.ones(len(cands), dtype=bool)
                else:
                    v_num = A * A + 4 * B * cands
                    keep = np.abs(v_num) <= WIDE * (4 * abs(B) * mu + 1e-12)
                    has_roots = v_num >= 0
                    v_root = np.sqrt(np.where(has_roots, v_num, 0).astype(np.float64))
                    thr = thr_base * max(A, abs(B))
                    keep |= has_roots & (v_root <= WIDE * thr + 1e-9)
                    h1 = v_root * M / sqrt_c
                    keep |= has_roots & (h1 >= lo_b) & (h1 <= hi_b)
                    for p, q in ends:
                        f_end = A * p * q - B * p * p + cands * q * q
                        keep |= np.abs(f_end) <= WIDE * (mu * q * q + 1e-12)
                if keep.any():
                    _pipeline(curve, params, A, B, cands[keep], n, w_lo, w_hi, found)
    found.sort(key=lambda s: s.sort_key())
    return found


def exhaustive_weighted_min(alpha, exponent, Q, dist_fn):
    """Plain scan of q^exponent * ||q alpha|| for 1 <= q <= Q."""
    best, best_q = None, None
    for q in range(1, Q + 1):
        d = dist_fn(q * alpha)
        val = to_mpf(q) ** to_mpf(Fraction(exponent)) * to_mpf(d)
        if best is None or val < best:
            best, best_q = val, q
    return best, best_q
