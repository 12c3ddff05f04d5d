"""Dangerous intervals of rational lines against a curve.

For an integer line L(A,B,C) and a curve y = f(x), the function
F(x) = A x - B f(x) + C measures (up to normalization) how close the curve
point lies to the line.  The sublevel set |F| <= mu with
mu = c / max{|A|^(1/i), |B|^(1/j)} projects to at most two closed
x-intervals (arcs).  Each arc is inflated to a star interval whose length
is governed by a height H, the stars are typed by a transversality test on
V = min |F'|, classified into (n, k, l, m, ...) bands, and enumerated
exhaustively inside a height window.

Arc endpoints are always rounded outward, so removal driven by these stars
can only over-remove, never under-remove.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath

from .errors import (
    BudgetExceeded,
    ClassificationFailure,
    ConstraintViolation,
    Degenerate,
    DomainError,
    InvariantViolation,
)
from .numerics import bracket_power, frac_pow, mpf_str, outward_eps, to_mpf, workprec
from .params import CurveSpec

DEFAULT_PAIR_CAP = 20_000_000


@dataclass(frozen=True)
class Line:
    """Integer line A x - B y + C = 0 with coprime coefficients."""

    A: int
    B: int
    C: int

    def __post_init__(self):
        if self.A == 0 and self.B == 0:
            raise ConstraintViolation("(A,B) != (0,0)", str(self))
        if math.gcd(math.gcd(abs(self.A), abs(self.B)), abs(self.C)) != 1:
            raise ConstraintViolation("gcd(A,B,C) = 1", str(self))

    def key(self):
        return (self.A, self.B, self.C)

    def __str__(self):
        return f"L({self.A},{self.B},{self.C})"


@dataclass
class Arc:
    """One connected component of the sublevel set, with its slope minimum.

    x0 minimizes |F'| over the component; V is that minimum and fpx0 the
    curve slope there (needed later by the l = 0 trichotomy).
    """

    line: Line
    lo: mpmath.mpf
    hi: mpmath.mpf
    x0: mpmath.mpf
    V: mpmath.mpf
    fpx0: mpmath.mpf
    affine: bool = False


@dataclass
class StarInterval:
    """A typed, height-graded inflation of an arc.

    Full length is 2 K sqrt(c) / H up to the outward-rounding nudge; d is
    the height bracket exponent of the Type 1 height (None when V = 0).
    """

    line: Line
    arc: Arc
    type: int
    center: mpmath.mpf
    halflength: mpmath.mpf
    H: mpmath.mpf
    M: mpmath.mpf
    d: Optional[int]
    l0: int
    exceptional: bool
    label: Optional["ClassLabel"] = None

    @property
    def lo(self):
        return self.center - self.halflength

    @property
    def hi(self):
        return self.center + self.halflength

    def meets(self, lo, hi):
        return self.lo <= hi and lo <= self.hi

    def contains(self, x):
        return self.lo <= x <= self.hi

    def sort_key(self):
        return (self.line.A, self.line.B, self.line.C, float(self.arc.lo))

    def to_jsonable(self):
        out = {
            "A": self.line.A, "B": self.line.B, "C": self.line.C,
            "type": self.type,
            "H": mpf_str(self.H), "V": mpf_str(self.arc.V),
            "lo": mpf_str(self.lo), "hi": mpf_str(self.hi),
            "exceptional": self.exceptional,
            "class": self.label.to_jsonable() if self.label else None,
        }
        return out


@dataclass(frozen=True)
class ClassLabel:
    """Height/transversality class of a star interval.

    n, k grade the height; Type 1 stars additionally carry the slope band l,
    its dyadic refinement m and, at l = 0, the coefficient-shape subclass
    (C1 / C2 / C3(u, v)).  Type 2 stars carry only (n, k).
    """

    n: int
    k: int
    type: int
    l: Optional[int] = None
    m: Optional[int] = None
    sub: Optional[str] = None
    u: Optional[int] = None
    v: Optional[int] = None

    def ancestor_level(self, n0):
        """The construction level charged for a removal by this class."""
        if self.type == 2:
            return self.n - n0
        if self.l >= 1:
            return self.n - self.l
        if self.sub in ("C1", "C2"):
            return self.n
        return self.n - self.u  # C3

    def group(self):
        if self.type == 2:
            return "C*"
        if self.l >= 1:
            return f"C(l={self.l})"
        if self.sub == "C3":
            return f"C3(u={self.u})"
        return self.sub

    def to_jsonable(self):
        return {"n": self.n, "k": self.k, "type": self.type, "l": self.l,
                "m": self.m, "sub": self.sub, "u": self.u, "v": self.v}


# ---------------------------------------------------------------------------
# geometry of one line
# ---------------------------------------------------------------------------


def eval_F(line, curve, x):
    """A x - B f(x) + C at working precision; x must lie in the domain."""
    with workprec(curve.precision):
        x = to_mpf(x)
        curve.require_contains(x)
        return line.A * x - line.B * curve.f(x) + line.C


def _mu(line, params):
    """Sublevel threshold c / max{|A|^(1/i), |B|^(1/j)}."""
    i, j = params.pair.i, params.pair.j
    pa = frac_pow(abs(line.A), 1 / i) if line.A else mpmath.mpf(0)
    pb = frac_pow(abs(line.B), 1 / j) if line.B else mpmath.mpf(0)
    M = max(to_mpf(pa), to_mpf(pb))
    return params.c / M, M


def _clip_component(lo, hi, dom_lo, dom_hi):
    eps = outward_eps()
    pad = (mpmath.fabs(lo) + mpmath.fabs(hi) + 1) * eps
    lo, hi = lo - pad, hi + pad
    lo = max(lo, dom_lo)
    hi = min(hi, dom_hi)
    if lo > hi:
        return None
    return lo, hi


def _finish_arc(line, curve, lo, hi, crit, affine):
    """Attach the |F'| minimizer to a clipped component."""
    if crit is not None and lo <= crit <= hi:
        x0 = crit
        V = mpmath.mpf(0)
    else:
        with workprec(curve.precision):
            d_lo = abs(line.A - line.B * curve.fprime(lo))
            d_hi = abs(line.A - line.B * curve.fprime(hi))
        x0, V = (lo, d_lo) if d_lo <= d_hi else (hi, d_hi)
    return Arc(line=line, lo=lo, hi=hi, x0=x0, V=V,
               fpx0=curve.fprime(x0), affine=affine)


def _arcs_linear(line, curve, mu, slope, intercept, affine):
    """Components when F is affine in x: F = slope * x + intercept."""
    dom_lo, dom_hi = curve.lo_hi()
    if slope == 0:
        if abs(intercept) <= mu:
            comp = _clip_component(dom_lo, dom_hi, dom_lo, dom_hi)
            return [_finish_arc(line, curve, comp[0], comp[1], None, affine)]
        return []
    a = (-intercept - mu) / slope
    b = (-intercept + mu) / slope
    lo, hi = (a, b) if a <= b else (b, a)
    comp = _clip_component(lo, hi, dom_lo, dom_hi)
    if comp is None:
        return []
    return [_finish_arc(line, curve, comp[0], comp[1], None, affine)]


def _arcs_parabola(line, curve, mu):
    """Closed-form components on f = x^2 (B != 0)."""
    A, B = mpmath.mpf(line.A), mpmath.mpf(line.B)
    dom_lo, dom_hi = curve.lo_hi()
    h = A / (2 * B)
    v = line.C + A * h / 2  # F(h)
    comps = []
    absB = abs(B)
    if B > 0:  # opens downward, max F = v
        if v < -mu:
            return []
        s1 = mpmath.sqrt((v + mu) / B)
        if v <= mu:
            comps.append((h - s1, h + s1))
        else:
            s2 = mpmath.sqrt((v - mu) / B)
            comps.append((h - s1, h - s2))
            comps.append((h + s2, h + s1))
    else:  # opens upward, min F = v
        if v > mu:
            return []
        s1 = mpmath.sqrt((mu - v) / absB)
        if v >= -mu:
            comps.append((h - s1, h + s1))
        else:
            s2 = mpmath.sqrt((-mu - v) / absB)
            comps.append((h - s1, h - s2))
            comps.append((h + s2, h + s1))
    out = []
    for lo, hi in comps:
        clipped = _clip_component(lo, hi, dom_lo, dom_hi)
        if clipped is not None:
            out.append(_finish_arc(line, curve, clipped[0], clipped[1], h, False))
    return out


def _bisect_root(g, lo, hi, want_leq, tol):
    """Root of monotone g with a conservative pick of the bracket side.

    Returns the bracket endpoint where ``g <= 0`` is ``want_leq``; callers
    use it so the sublevel component is never shrunk by the tolerance.
    """
    glo = g(lo)
    for _ in range(mpmath.mp.prec):
        if hi - lo <= tol:
            break
        mid = (lo + hi) / 2
        if (g(mid) <= 0) == (glo <= 0):
            lo = mid
        else:
            hi = mid
    if want_leq:
        return lo if (g(lo) <= 0) else hi
    return hi if not (g(hi) <= 0) else lo


def _arcs_general(line, curve, mu):
    """Bisection-based components for a general two-derivative curve."""
    A, B = line.A, line.B
    dom_lo, dom_hi = curve.lo_hi()
    tol = (dom_hi - dom_lo) * mpmath.mpf(2) ** (-(curve.precision // 2))

    def F(x):
        return A * x - B * curve.f(x) + line.C

    def Fp(x):
        return A - B * curve.fprime(x)

    # F' is monotone; find the interior critical point if the sign flips.
    plo, phi = Fp(dom_lo), Fp(dom_hi)
    crit = None
    if plo == 0:
        crit = dom_lo
    elif phi == 0:
        crit = dom_hi
    elif (plo < 0) != (phi < 0):
        a, b = dom_lo, dom_hi
        while b - a > tol:
            mid = (a + b) / 2
            if (Fp(mid) < 0) == (plo < 0):
                a = mid
            else:
                b = mid
        crit = (a + b) / 2

    pieces = [(dom_lo, dom_hi)] if crit is None else [(dom_lo, crit), (crit, dom_hi)]
    raw = []
    for p_lo, p_hi in pieces:
        if p_lo >= p_hi:
            continue
        f_lo, f_hi = F(p_lo), F(p_hi)
        lo_val, hi_val = (f_lo, f_hi) if f_lo <= f_hi else (f_hi, f_lo)
        if hi_val < -mu or lo_val > mu:
            continue
        increasing = f_hi >= f_lo
        # entry endpoint: F crosses -mu (increasing) / +mu (decreasing)
        if increasing:
            a = p_lo if f_lo >= -mu else _bisect_root(
                lambda x: F(x) + mu, p_lo, p_hi, want_leq=True, tol=tol)
            b = p_hi if f_hi <= mu else _bisect_root(
                lambda x: F(x) - mu, p_lo, p_hi, want_leq=False, tol=tol)
        else:
            a = p_lo if f_lo <= mu else _bisect_root(
                lambda x: F(x) - mu, p_lo, p_hi, want_leq=False, tol=tol)
            b = p_hi if f_hi >= -mu else _bisect_root(
                lambda x: F(x) + mu, p_lo, p_hi, want_leq=True, tol=tol)
        if a <= b:
            raw.append((a, b))
    # merge the two pieces across the critical point when both reach it
    merged = []
    for seg in sorted(raw):
        if merged and seg[0] <= merged[-1][1] + tol:
            merged[-1] = (merged[-1][0], max(merged[-1][1], seg[1]))
        else:
            merged.append(seg)
    out = []
    for lo, hi in merged:
        clipped = _clip_component(lo, hi, dom_lo, dom_hi)
        if clipped is not None:
            out.append(_finish_arc(line, curve, clipped[0], clipped[1], crit, False))
    return out


def arcs(line, curve, params):
    """All components of {x in I : |F(x)| <= mu} as outward-rounded arcs.

    Zero, one or two components; each carries its own slope minimum.  The
    second-derivative sign condition keeps the count at two or below.
    """
    with workprec(params.precision_bits):
        mu, _ = _mu(line, params)
        if curve.kind == CurveSpec.AFFINE:
            slope = line.A - line.B * curve.alpha
            intercept = mpmath.mpf(line.C) - line.B * curve.beta
            return _arcs_linear(line, curve, mu, slope, intercept, affine=True)
        if line.B == 0:
            return _arcs_linear(line, curve, mu, mpmath.mpf(line.A),
                                mpmath.mpf(line.C), affine=False)
        if curve.kind == CurveSpec.PARABOLA:
            return _arcs_parabola(line, curve, mu)
        return _arcs_general(line, curve, mu)


# ---------------------------------------------------------------------------
# stars: type selection, heights, exceptional set
# ---------------------------------------------------------------------------


def star_interval(arc, params):
    """Inflate an arc to its typed star interval.

    Type 1 when the slope minimum beats the threshold
    (C0+1) R^(-lam (l0+1)) max{|A|,|B|}, Type 2 otherwise (requires B != 0).
    Straight-line mode admits Type 1 only; a Type 2 outcome there means the
    parameters were inadmissible and raises.
    """
    line = arc.line
    with workprec(params.precision_bits):
        i, j = params.pair.i, params.pair.j
        absA, absB = abs(line.A), abs(line.B)
        pa = frac_pow(absA, 1 / i) if absA else mpmath.mpf(0)
        pb = frac_pow(absB, 1 / j) if absB else mpmath.mpf(0)
        M = max(to_mpf(pa), to_mpf(pb))
        T = max(absA, absB)
        V = to_mpf(arc.V)
        sqrt_c = mpmath.sqrt(params.c)
        if V > 0:
            H1 = V * M / sqrt_c
            d = bracket_power(H1, params.R)
        else:
            H1 = mpmath.mpf(0)
            d = None
        l0 = max(d, 0) // params.lam if d is not None else 0
        threshold = to_mpf(params.C0 + 1) * frac_pow(params.R, -params.lam * (l0 + 1)) * T
        is_type1 = V > threshold
        if arc.affine and not is_type1:
            raise Degenerate(
                f"{line}: Type 2 star in straight-line mode (V = {mpf_str(V)})")
        if is_type1:
            typ = 1
            H = H1
        else:
            if absB == 0:
                raise Degenerate(f"{line}: Type 2 star with B = 0")
            typ = 2
            H = mpmath.sqrt(M * absB)
        if not H >= 1:
            raise InvariantViolation(
                f"{line}: star height {mpf_str(H)} < 1; parameters inadmissible")
        halflength = params.K * sqrt_c / H * (1 + outward_eps())
        center = (to_mpf(arc.lo) + to_mpf(arc.hi)) / 2
        exceptional = typ == 2 and H < params.R ** (3 * params.n0)
        return StarInterval(line=line, arc=arc, type=typ, center=center,
                            halflength=halflength, H=H, M=M, d=d, l0=l0,
                            exceptional=exceptional)


def is_exceptional(star, params):
    """Member of the finite retained set: Type 2 with H < R^(3 n0)."""
    return star.type == 2 and bool(star.H < params.R ** (3 * params.n0))


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


def _band(value, base):
    """e with base^e <= value < base^(e+1); ClassificationFailure if value <= 0."""
    if not value > 0:
        raise ClassificationFailure(f"cannot bracket non-positive value {value}")
    return bracket_power(value, base)


def classify(star, params):
    """Assign the (n, k, ...) class label; exceptional stars are rejected.

    Every bracket is re-checked with exact integer powers; a value that fits
    no admissible bracket raises instead of being clamped.
    """
    if star.exceptional:
        raise ClassificationFailure(f"{star.line}: exceptional stars carry no class")
    R, lam = params.R, params.lam
    with workprec(params.precision_bits):
        H = to_mpf(star.H)
        n = _band(H, R) + 1
        if n < 1:
            raise ClassificationFailure(f"{star.line}: height {mpf_str(H)} below 1")
        k = _band(H / R ** (n - 1), 2)
        if not (0 <= k and 2 ** k < R):
            raise ClassificationFailure(f"{star.line}: k = {k} out of range for R = {R}")
        if star.type == 2:
            return ClassLabel(n=n, k=k, type=2)

        line = star.line
        T = max(abs(line.A), abs(line.B))
        V = to_mpf(star.arc.V)
        if not V > 0:
            raise ClassificationFailure(f"{line}: Type 1 star with V = 0")
        rho = to_mpf(params.C0 + 1) * T / V
        e = _band(rho, R)
        l = e // lam
        l_cap = n if star.arc.affine else star.l0
        if not 0 <= l <= l_cap:
            raise ClassificationFailure(
                f"{line}: slope band l = {l} outside [0, {l_cap}]")
        m = _band(rho / R ** (lam * l), 2)
        if not (0 <= m and 2 ** m <= R ** lam):
            raise ClassificationFailure(f"{line}: dyadic band m = {m} out of range")
        if l >= 1:
            return ClassLabel(n=n, k=k, type=1, l=l, m=m, sub="generic")

        fp = abs(to_mpf(star.arc.fpx0))
        absA, absB = abs(line.A), abs(line.B)
        if absA >= fp * absB / 2:
            return ClassLabel(n=n, k=k, type=1, l=0, m=m, sub="C1")
        i, j = params.pair.i, params.pair.j
        pa = frac_pow(absA, 1 / i) if absA else mpmath.mpf(0)
        pb = frac_pow(absB, 1 / j)
        if pa <= pb:
            return ClassLabel(n=n, k=k, type=1, l=0, m=m, sub="C2")
        theta = to_mpf(pa) / to_mpf(pb)
        u = _band(theta, R) // lam
        if frac_pow(R, lam * u) >= theta:  # left bracket is strict
            u -= 1
        if u < 0:
            raise ClassificationFailure(f"{line}: coefficient ratio band u < 0")
        theta_r = theta / frac_pow(R, lam * u)
        v = _band(theta_r, 2)
        if 2 ** v >= theta_r:
            v -= 1
        if not (0 <= v and 2 ** v <= R ** lam):
            raise ClassificationFailure(f"{line}: ratio band v = {v} out of range")
        if not (frac_pow(2, v) * frac_pow(R, lam * u) < theta
                <= frac_pow(2, v + 1) * frac_pow(R, lam * u)):
            raise ClassificationFailure(f"{line}: (u,v) bracket re-check failed")
        if u > n:
            raise ClassificationFailure(f"{line}: u = {u} exceeds n = {n}")
        return ClassLabel(n=n, k=k, type=1, l=0, m=m, sub="C3", u=u, v=v)


def label_consistent(star, params):
    """Re-verify a label's defining inequalities against the stored star."""
    lab = star.label
    if lab is None:
        return False
    R, lam = params.R, params.lam
    with workprec(params.precision_bits):
        H = to_mpf(star.H)
        if not (R ** (lab.n - 1) <= H < R ** lab.n):
            return False
        if not (2 ** lab.k * R ** (lab.n - 1) <= H < 2 ** (lab.k + 1) * R ** (lab.n - 1)):
            return False
        if lab.type == 2:
            return star.type == 2
        T = max(abs(star.line.A), abs(star.line.B))
        X = to_mpf(params.C0 + 1) * T
        V = to_mpf(star.arc.V)
        if not (X * frac_pow(R, -lam * (lab.l + 1)) < V <= X * frac_pow(R, -lam * lab.l)):
            return False
        Xl = X * frac_pow(R, -lam * lab.l)
        if not (Xl * frac_pow(2, -lab.m - 1) < V <= Xl * frac_pow(2, -lab.m)):
            return False
        if lab.sub == "C3":
            i, j = params.pair.i, params.pair.j
            theta = to_mpf(frac_pow(abs(star.line.A), 1 / i)) / to_mpf(
                frac_pow(abs(star.line.B), 1 / j))
            if not (frac_pow(2, lab.v) * frac_pow(R, lam * lab.u) < theta
                    <= frac_pow(2, lab.v + 1) * frac_pow(R, lam * lab.u)):
                return False
        return True


# ---------------------------------------------------------------------------
# exhaustive enumeration inside a height window
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoefficientBox:
    """Sound coefficient bounds for stars of height below R^n.

    T1 bounds max{|A|,|B|} for Type 1 (from the type threshold and the
    height cap); A2/B2 bound Type 2 coefficients (from H^2 = M |B| < R^2n).
    """

    Amax: int
    Bmax: int
    T1: int
    A2: int
    B2: int

    def pair_count(self):
        return (self.Amax + 1) * (2 * self.Bmax + 1)


def coefficient_box(params, n):
    """Exact-arithmetic coefficient bounds for the class of level n."""
    i, j = params.pair.i, params.pair.j
    R, lam = params.R, params.lam
    with workprec(params.precision_bits):
        rhs = mpmath.sqrt(params.c) * frac_pow(R, 2 * n + lam - 1) / to_mpf(params.C0 + 1)
        T1 = int(mpmath.floor(frac_pow(rhs, Fraction(j, j + 1)))) if rhs > 0 else 0
        A2 = int(mpmath.floor(to_mpf(frac_pow(R, 2 * n * i))))
        B2 = int(mpmath.floor(to_mpf(frac_pow(R, 2 * n * j / (1 + j)))))
    return CoefficientBox(Amax=max(T1, A2), Bmax=max(T1, B2), T1=T1, A2=A2, B2=B2)


def _f0_range(curve, A, B, lo, hi):
    """Range of A x - B f(x) over [lo, hi] (endpoints plus interior extremum)."""
    def f0(x):
        return A * x - B * curve.f(x)

    vals = [f0(lo), f0(hi)]
    if B != 0 and curve.kind != CurveSpec.AFFINE:
        if curve.kind == CurveSpec.PARABOLA:
            h = mpmath.mpf(A) / (2 * B)
            if lo <= h <= hi:
                vals.append(f0(h))
        else:
            # coarse interior sampling is enough: the range only sizes the
            # integer C sweep, which is padded by a unit of slack anyway
            for t in range(1, 8):
                vals.append(f0(lo + (hi - lo) * t / 8))
    return min(vals), max(vals)


def _canonical_pair(A, B):
    if A < 0 or (A == 0 and B < 0):
        return -A, -B
    return A, B


def _affine_pairs(params, line_params, n, pair_cap):
    """Sound candidate (A, B) pairs for straight-line stars of height < R^n.

    Every star is Type 1 with V = |A - B alpha|.  Three regimes cover all
    admissible pairs: B = 0 (V = |A|), A off the nearest integer to B alpha
    (V >= 1/2), and A = nint(B alpha), where V = ||B alpha|| is bounded
    below through the slope's finite-range Diophantine estimate tau.
    """
    i, j = params.pair.i, params.pair.j
    alpha = line_params.alpha
    abs_alpha = abs(alpha)
    cap_rhs = mpmath.sqrt(params.c) * mpmath.mpf(params.R) ** n
    pairs = set()
    a_cap = int(mpmath.floor(to_mpf(frac_pow(cap_rhs, Fraction(i, 1 + i)))))
    for A in range(1, a_cap + 1):
        pairs.add((A, 0))
    a2 = int(mpmath.floor(to_mpf(frac_pow(2 * cap_rhs, i))))
    b2 = int(mpmath.floor(to_mpf(frac_pow(2 * cap_rhs, j))))
    for A in range(0, a2 + 1):
        for B in range(-b2, b2 + 1):
            if (A, B) != (0, 0):
                pairs.add(_canonical_pair(A, B))
    # near-integer regime: tau (|alpha|/2)^(1/i) B^eps < sqrt(c) R^n once
    # B |alpha| >= 1, and |alpha| B^(1+1/j) < sqrt(c) R^n when nint = 0
    eps = to_mpf(line_params.eps_dioph)
    tau = to_mpf(line_params.tau)
    scale = min(mpmath.mpf(1), to_mpf(frac_pow(abs_alpha / 2, 1 / i)))
    b_near = frac_pow(cap_rhs / (tau * scale), 1 / to_mpf(eps))
    b_zero = to_mpf(frac_pow(cap_rhs / abs_alpha, Fraction(j, 1 + j)))
    b_cap = int(mpmath.floor(max(b_near, b_zero, 1 / abs_alpha))) + 1
    e3 = eps + to_mpf(1 / j) - to_mpf(1 / i)
    if e3 > 0:
        b_cap = min(b_cap, int(mpmath.floor(to_mpf(frac_pow(cap_rhs / tau, 1 / e3)))) + 1)
    if b_cap > pair_cap:
        raise BudgetExceeded(b_cap, pair_cap, f"near-integer |B| cap at n = {n}")
    for B in range(-b_cap, b_cap + 1):
        if B == 0:
            continue
        A = int(mpmath.nint(B * alpha))
        pair = _canonical_pair(A, B)
        if pair != (0, 0):
            pairs.add(pair)
    if len(pairs) > pair_cap:
        raise BudgetExceeded(len(pairs), pair_cap, f"line-mode pairs at n = {n}")
    return sorted(pairs)


def _endpoint_f_ints(curve, A, B):
    """(base, qsq) per domain endpoint so that F(p/q) = (base + C qsq)/qsq."""
    out = []
    for frac_x in curve.domain:
        p, q = frac_x.numerator, frac_x.denominator
        out.append((A * p * q - B * p * p, q * q))
    return out


def _make_prefilter(curve, params, A, B, Mf, muf, state):
    """Cheap sound test per integer C: True means no in-window star can exist.

    For the parabola the extremum of F is v = (A^2 + 4BC)/(4B) and the slope
    at an F-root is exactly sqrt(A^2 + 4BC), so the decision runs on exact
    integers plus floats with generous margins.  Every component of the
    sublevel set contains an F-root, contains the extremum, or touches a
    domain endpoint, so the three escalation rules are exhaustive.  Returns
    None when no cheap test applies (general curves).
    """
    if curve.kind == CurveSpec.GENERAL:
        return None
    sqrt_c = float(mpmath.sqrt(params.c))
    lo_b = float(state["lo_bound"]) * (1 - 1e-6)
    hi_b = float(state["hi_bound"]) * (1 + 1e-6)
    T = max(abs(A), abs(B))
    thr = float(to_mpf(params.C0 + 1)) * float(params.R) ** (-params.lam) * T
    ends = _endpoint_f_ints(curve, A, B) if curve.kind == CurveSpec.PARABOLA else None

    if curve.kind == CurveSpec.AFFINE:
        slope = abs(A - B * float(curve.alpha))
        h1 = slope * Mf / sqrt_c
        in_window = (lo_b <= h1 <= hi_b) or slope * Mf <= 1e-9
        return (lambda C: False) if in_window else (lambda C: True)

    if B == 0:
        h1 = abs(A) * Mf / sqrt_c
        if not lo_b <= h1 <= hi_b:
            return lambda C: True
        (base1, q1), (base2, q2) = ends

        def skip_linear(C):
            f1 = base1 + C * q1
            f2 = base2 + C * q2
            if (f1 <= 0) != (f2 <= 0):
                return False  # F vanishes inside the domain
            return (abs(f1) > muf * q1 * 1.01 + 1e-12
                    and abs(f2) > muf * q2 * 1.01 + 1e-12)

        return skip_linear

    (base1, q1), (base2, q2) = ends
    four_b = 4 * B
    abs_4b = abs(four_b)
    AA = A * A

    def skip_parabola(C):
        v_num = AA + four_b * C
        # component containing the extremum: |v| <= mu
        if abs(v_num) <= abs_4b * muf * 1.01 + 1e-12:
            return False
        if v_num >= 0:
            v_root = math.sqrt(v_num)
            dv = 4 * abs(B) * muf / max(v_root, 1e-12) + 1e-9 * v_root + 1e-12
            v_lo = max(v_root - dv, 0.0)
            if v_lo <= thr * 1.01 + 1e-12:
                return False  # possible Type 2
            h1_lo = v_lo * Mf / sqrt_c
            h1_hi = (v_root + dv) * Mf / sqrt_c
            if h1_lo <= hi_b and h1_hi >= lo_b:
                return False
        # components clipped at a domain endpoint
        if abs(base1 + C * q1) <= muf * q1 * 1.01 + 1e-12:
            return False
        if abs(base2 + C * q2) <= muf * q2 * 1.01 + 1e-12:
            return False
        return True

    return skip_parabola


def _sweep_pair(curve, params, A, B, M, state, out):
    """Scan the integer C range of one (A, B) pair and collect stars."""
    mu = params.c / M
    g = math.gcd(A, abs(B))
    f_min, f_max = _f0_range(curve, A, B, state["pad_lo"], state["pad_hi"])
    c_lo = int(mpmath.floor(-f_max - mu)) - 1
    c_hi = int(mpmath.ceil(-f_min + mu)) + 1
    prefilter = _make_prefilter(curve, params, A, B, float(M), float(mu), state)
    for C in range(c_lo, c_hi + 1):
        if math.gcd(g, abs(C)) != 1:
            continue
        if prefilter is not None and prefilter(C):
            continue
        line = Line(A, B, C)
        for arc in arcs(line, curve, params):
            star = star_interval(arc, params)
            if star.exceptional:
                continue
            if not (state["lo_bound"] <= star.H < state["hi_bound"]):
                continue
            if not star.meets(state["w_lo"], state["w_hi"]):
                continue
            star.label = classify(star, params)
            out.append(star)


def enumerate_class(curve, params, n, window, pair_cap=DEFAULT_PAIR_CAP,
                    line_params=None):
    """All non-exceptional stars with R^(n-1) <= H < R^n meeting the window.

    Complete by construction: the coefficient box is derived from the exact
    height/type inequalities, and the integer C sweep covers every line
    whose sublevel set can reach the window padded by the largest star
    halflength.  Deterministic output, sorted by (A, B, C, arc position).
    Affine curves need ``line_params`` (their coefficient bounds run through
    the slope's Diophantine estimate).
    """
    if n < 1:
        raise ConstraintViolation("n >= 1", f"n = {n}")
    affine = curve.kind == CurveSpec.AFFINE
    if affine and line_params is None:
        raise ConstraintViolation("line mode", "affine enumeration needs LineModeParams")
    w_lo_in, w_hi_in = window
    out = []
    with workprec(params.precision_bits):
        R = params.R
        dom_lo, dom_hi = curve.lo_hi()
        w_lo = max(to_mpf(w_lo_in), dom_lo)
        w_hi = min(to_mpf(w_hi_in), dom_hi)
        if w_lo > w_hi:
            return []
        s_max = params.K * mpmath.sqrt(params.c) / R ** (n - 1) * 2
        state = {
            "w_lo": w_lo, "w_hi": w_hi,
            "pad_lo": max(w_lo - s_max, dom_lo),
            "pad_hi": min(w_hi + s_max, dom_hi),
            "lo_bound": R ** (n - 1), "hi_bound": R ** n,
        }
        i, j = params.pair.i, params.pair.j
        if affine:
            for A, B in _affine_pairs(params, line_params, n, pair_cap):
                pa = to_mpf(frac_pow(abs(A), 1 / i)) if A else mpmath.mpf(0)
                pb = to_mpf(frac_pow(abs(B), 1 / j)) if B else mpmath.mpf(0)
                _sweep_pair(curve, params, A, B, max(pa, pb), state, out)
            out.sort(key=StarInterval.sort_key)
            return out
        box = coefficient_box(params, n)
        if box.pair_count() > pair_cap:
            raise BudgetExceeded(box.pair_count(), pair_cap,
                                 f"|A| <= {box.Amax}, |B| <= {box.Bmax} at n = {n}")
        H2_lo = R ** (2 * (n - 1))
        H2_hi = R ** (2 * n)
        fuzz = mpmath.mpf(2) ** -40
        pow_b = {0: mpmath.mpf(0)}
        for b in range(1, box.Bmax + 1):
            pow_b[b] = to_mpf(frac_pow(b, 1 / j))
        for A in range(0, box.Amax + 1):
            pa = to_mpf(frac_pow(A, 1 / i)) if A else mpmath.mpf(0)
            for B in range(-box.Bmax, box.Bmax + 1):
                if A == 0 and B <= 0:
                    continue
                absB = abs(B)
                T = max(A, absB)
                type1_ok = T <= box.T1
                type2_ok = False
                if B != 0 and A <= box.A2 and absB <= box.B2:
                    prod = max(pa, pow_b[absB]) * absB
                    type2_ok = (prod >= H2_lo * (1 - fuzz)) and (prod < H2_hi * (1 + fuzz))
                if not (type1_ok or type2_ok):
                    continue
                _sweep_pair(curve, params, A, B, max(pa, pow_b[absB]), state, out)
    out.sort(key=StarInterval.sort_key)
    return out
