"""Exponent pairs, curve specifications and derivation of construction constants.

Everything downstream (interval heights, class brackets, removal budgets)
hangs off a handful of constants.  They are fixed here once, in exact
rational arithmetic where the defining formulas are rational and in mpf
arithmetic at the requested precision where they are not, so the rest of
the package never re-derives them.
"""

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import mpmath

from .errors import ConstraintViolation, DiophantineConditionSuspect, DomainError
from .numerics import (
    DEFAULT_PREC,
    frac_pow,
    mpf_str,
    mpf_to_frac,
    to_mpf,
    workprec,
)

CURVE_GRID_POINTS = 10_000


def _as_fraction(x, name):
    try:
        if isinstance(x, str):
            return Fraction(x)
        return Fraction(x)
    except (ValueError, TypeError) as exc:
        raise ConstraintViolation(name, f"cannot interpret {x!r} as a rational") from exc


@dataclass(frozen=True)
class ExponentPair:
    """An exponent pair (i, j) with i + j = 1, stored as exact fractions.

    ``swapped`` records whether ``normalized`` flipped the entries to put
    the smaller exponent first; the badness verifiers use the pair exactly
    as given, the construction requires the normalized orientation.
    """

    i: Fraction
    j: Fraction
    swapped: bool = False

    @classmethod
    def make(cls, i, j):
        fi = _as_fraction(i, "exponent i")
        fj = _as_fraction(j, "exponent j")
        if not (0 <= fi <= 1 and 0 <= fj <= 1):
            raise ConstraintViolation("0 <= i, j <= 1", f"got i={fi}, j={fj}")
        # i + j = 1 up to one ulp of double input, then snapped exactly.
        if fi + fj != 1:
            if abs(float(fi + fj) - 1.0) > 2 ** -50:
                raise ConstraintViolation("i + j = 1", f"i + j = {float(fi + fj)!r}")
            fj = 1 - fi
        return cls(fi, fj)

    def normalized(self):
        """Orientation with i <= j; flags whether a swap happened."""
        if self.i <= self.j:
            return replace(self, swapped=False)
        return ExponentPair(self.j, self.i, swapped=True)

    @property
    def product(self):
        return self.i * self.j

    def __str__(self):
        return f"({self.i}, {self.j})"


class CurveSpec:
    """A planar curve y = f(x) on a closed interval with two-derivative bounds.

    c0 and C0 bound |f'| and |f''| from below and strictly above on the
    domain: exact closed forms for the parabola and affine kinds, a dense
    grid check for general curves.  The affine kind has f'' = 0 and is only
    legal on the straight-line construction path.
    """

    GENERAL = "general-C2"
    PARABOLA = "parabola"
    AFFINE = "affine-line"

    def __init__(self, kind, domain, f, fprime, fsecond, c0, C0,
                 alpha=None, beta=None, expr=None, precision=DEFAULT_PREC):
        self.kind = kind
        self.domain = (Fraction(domain[0]), Fraction(domain[1]))
        if self.domain[0] >= self.domain[1]:
            raise ConstraintViolation("|I| > 0", f"domain {domain} is empty")
        self.f = f
        self.fprime = fprime
        self.fsecond = fsecond
        self.c0 = Fraction(c0)
        self.C0 = Fraction(C0)
        if self.c0 <= 0 or self.C0 <= self.c0:
            raise ConstraintViolation("0 < c0 < C0", f"c0={c0}, C0={C0}")
        self.alpha = alpha
        self.beta = beta
        self.expr = expr
        self.precision = precision
        self._validate()

    # -- constructors ------------------------------------------------------

    @classmethod
    def parabola(cls, domain=(Fraction(1, 2), Fraction(3, 2)), C0=None,
                 precision=DEFAULT_PREC):
        lo, hi = Fraction(domain[0]), Fraction(domain[1])
        if lo <= 0 <= hi:
            raise ConstraintViolation("c0 <= |f'|", "parabola domain must avoid x = 0")
        lo_a, hi_a = sorted((abs(lo), abs(hi)))
        c0 = min(2 * lo_a, Fraction(2))
        sup = max(2 * hi_a, Fraction(2))
        C0 = Fraction(C0) if C0 is not None else sup + Fraction(1, 100)
        if C0 <= sup:
            raise ConstraintViolation("|f'|, |f''| < C0", f"need C0 > {sup}, got {C0}")
        return cls(cls.PARABOLA, (lo, hi),
                   f=lambda x: x * x,
                   fprime=lambda x: 2 * x,
                   fsecond=lambda x: mpmath.mpf(2),
                   c0=c0, C0=C0, expr="x**2", precision=precision)

    @classmethod
    def affine(cls, alpha, beta=0, domain=(0, 1), C0=None, precision=DEFAULT_PREC,
               alpha_expr=None):
        with workprec(max(precision, 2 * DEFAULT_PREC)):
            alpha_mpf = to_mpf(alpha)
            beta_mpf = to_mpf(beta)
        if alpha_mpf == 0:
            raise ConstraintViolation("c0 <= |f'|", "affine slope must be nonzero")
        a_abs = abs(mpf_to_frac(alpha_mpf))
        c0 = a_abs
        C0 = Fraction(C0) if C0 is not None else a_abs + Fraction(1, 100)
        if C0 <= a_abs:
            raise ConstraintViolation("|f'| < C0", f"need C0 > {a_abs}, got {C0}")
        return cls(cls.AFFINE, domain,
                   f=lambda x: alpha_mpf * x + beta_mpf,
                   fprime=lambda x: alpha_mpf,
                   fsecond=lambda x: mpmath.mpf(0),
                   c0=c0, C0=C0, alpha=alpha_mpf, beta=beta_mpf,
                   expr=alpha_expr, precision=precision)

    @classmethod
    def general(cls, f, fprime, fsecond, domain, c0=None, C0=None,
                expr=None, precision=DEFAULT_PREC):
        lo, hi = Fraction(domain[0]), Fraction(domain[1])
        with workprec(precision):
            xs = [to_mpf(lo) + (to_mpf(hi) - to_mpf(lo)) * k / (CURVE_GRID_POINTS - 1)
                  for k in range(CURVE_GRID_POINTS)]
            d1 = [abs(fprime(x)) for x in xs]
            d2 = [abs(fsecond(x)) for x in xs]
            g_min = min(min(d1), min(d2))
            g_max = max(max(d1), max(d2))
        if g_min <= 0:
            raise ConstraintViolation("c0 <= |f'|, |f''|",
                                      "a derivative vanishes on the sampling grid")
        c0 = Fraction(c0) if c0 is not None else mpf_to_frac(g_min * (1 - mpmath.mpf("1e-9")))
        C0 = Fraction(C0) if C0 is not None else mpf_to_frac(g_max * (1 + mpmath.mpf("1e-9"))) + Fraction(1, 100)
        return cls(cls.GENERAL, (lo, hi), f, fprime, fsecond, c0, C0,
                   expr=expr, precision=precision)

    # -- validation and evaluation -----------------------------------------

    def _validate(self):
        if self.kind == self.AFFINE:
            # f'' = 0 by construction; only the slope bounds apply.
            a = abs(self.alpha)
            if not (to_mpf(self.c0) <= a < to_mpf(self.C0)):
                raise ConstraintViolation("c0 <= |f'| < C0", f"slope {a}")
            return
        with workprec(self.precision):
            lo, hi = self.lo_hi()
            n = CURVE_GRID_POINTS if self.kind == self.GENERAL else 64
            c0 = to_mpf(self.c0)
            C0 = to_mpf(self.C0)
            for k in range(n):
                x = lo + (hi - lo) * k / (n - 1)
                for label, g in (("|f'|", self.fprime), ("|f''|", self.fsecond)):
                    v = abs(g(x))
                    if not (c0 <= v < C0):
                        raise ConstraintViolation(
                            "c0 <= " + label + " < C0",
                            f"{label}({mpf_str(x)}) = {mpf_str(v)} outside [{self.c0}, {self.C0})")

    def lo_hi(self):
        return to_mpf(self.domain[0]), to_mpf(self.domain[1])

    def contains(self, x):
        lo, hi = self.lo_hi()
        return lo <= x <= hi

    def require_contains(self, x):
        if not self.contains(x):
            raise DomainError(f"x = {mpf_str(x)} outside domain {self.domain}")

    def length(self):
        return self.domain[1] - self.domain[0]

    def inverse(self, y):
        """x in the domain with f(x) = y; requires monotone f (|f'| >= c0 > 0)."""
        with workprec(self.precision):
            y = to_mpf(y)
            if self.kind == self.PARABOLA:
                x = mpmath.sqrt(y) if self.domain[0] > 0 else -mpmath.sqrt(y)
                return x
            if self.kind == self.AFFINE:
                return (y - self.beta) / self.alpha
            lo, hi = self.lo_hi()
            flo, fhi = self.f(lo), self.f(hi)
            increasing = fhi > flo
            a, b = lo, hi
            for _ in range(self.precision + 16):
                mid = (a + b) / 2
                if (self.f(mid) < y) == increasing:
                    a = mid
                else:
                    b = mid
            return (a + b) / 2

    def __repr__(self):
        return f"CurveSpec({self.kind}, domain={self.domain}, c0={self.c0}, C0={self.C0})"


# ---------------------------------------------------------------------------
# construction constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstructionParams:
    """Every constant the interval construction needs, fixed at creation.

    omega and epsilon are exact fractions of the exponent product; c, c1 and
    K live at ``precision_bits`` bits.  C0 is carried along because the type
    test and the class brackets keep needing (C0 + 1).
    """

    pair: ExponentPair
    R: int
    lam: int
    omega: Fraction
    epsilon: Fraction
    c: mpmath.mpf
    c1: mpmath.mpf
    n0: int
    K: mpmath.mpf
    C0: Fraction
    precision_bits: int = DEFAULT_PREC

    def __post_init__(self):
        i, j = self.pair.i, self.pair.j
        if not (0 < i <= j):
            raise ConstraintViolation("0 < i <= j", f"pair {self.pair}")
        if self.R < 2:
            raise ConstraintViolation("R >= 2", f"R = {self.R}")
        if self.lam <= max(Fraction(4), 1 / i, (1 + i) / j):
            raise ConstraintViolation("lambda > max{4, 1/i, (1+i)/j}",
                                      f"lambda = {self.lam}")
        if self.omega != i * j / 4:
            raise ConstraintViolation("omega = ij/4", f"omega = {self.omega}")
        if self.epsilon != (i * j) ** 2 / 8:
            raise ConstraintViolation("epsilon = (ij)^2/8", f"epsilon = {self.epsilon}")
        if self.K < 1:
            raise ConstraintViolation("K >= 1", f"K = {self.K}")
        with workprec(self.precision_bits):
            bound = c_upper_bound(self.pair, self.R, self.C0, self.lam)
            if not (0 < self.c < bound):
                raise ConstraintViolation(
                    "c below its admissible bound",
                    f"c = {mpf_str(self.c)}, bound = {mpf_str(bound)}")
            c1 = mpmath.sqrt(self.c) * frac_pow(self.R, 1 + self.omega)
            if abs(self.c1 - c1) > abs(c1) * mpmath.mpf(2) ** (8 - self.precision_bits):
                raise ConstraintViolation("c1 = sqrt(c) * R^(1+omega)",
                                          f"c1 = {mpf_str(self.c1)} != {mpf_str(c1)}")
            if compute_n0(self.c, self.R, self.C0) != self.n0:
                raise ConstraintViolation("n0 minimal with sqrt(c) R^n0 C0 >= 1",
                                          f"n0 = {self.n0}")

    @property
    def mu_scale(self):
        """The constant c as an mpf at working precision."""
        return self.c

    def describe(self):
        return {
            "i": str(self.pair.i), "j": str(self.pair.j),
            "R": self.R, "lambda": self.lam,
            "omega": str(self.omega), "epsilon": str(self.epsilon),
            "c": mpf_str(self.c, self.precision_bits),
            "c1": mpf_str(self.c1, self.precision_bits),
            "n0": self.n0,
            "K": mpf_str(self.K, self.precision_bits),
            "C0": str(self.C0),
            "precision_bits": self.precision_bits,
        }


def c_upper_bound(pair, R, C0, lam):
    """Strict upper bound for the admissible removal constant c.

    Minimum of (8(C0+1) R^(-1-ij/2-lam))^2 and ((C0+1) C0 R^2)^(-2),
    evaluated at the current working precision.
    """
    i, j = pair.i, pair.j
    C0m = to_mpf(C0)
    expo = Fraction(-1) - i * j / 2 - lam
    t1 = (8 * (C0m + 1) * frac_pow(R, expo)) ** 2
    t2 = ((C0m + 1) * C0m * R * R) ** -2
    return min(t1, t2)


def compute_n0(c, R, C0, max_iter=10 ** 6):
    """Smallest n0 >= 1 with sqrt(c) * R^n0 * C0 >= 1."""
    if not 0 < c < 1:
        raise ConstraintViolation("0 < c < 1", f"c = {c}")
    if R < 2:
        raise ConstraintViolation("R >= 2", f"R = {R}")
    root = mpmath.sqrt(to_mpf(c)) * to_mpf(C0)
    n0 = 1
    while root * frac_pow(R, n0) < 1:
        n0 += 1
        if n0 > max_iter:
            raise ConstraintViolation("n0 bounded", "no admissible n0 found")
    return n0


def lambda_floor(pair):
    """Smallest admissible integer slope-separation exponent."""
    i, j = pair.i, pair.j
    return math.floor(max(Fraction(4), 1 / i, (1 + i) / j)) + 1


def derive_params(pair, R, C0, c_override=None, K=None, precision_bits=DEFAULT_PREC):
    """Derive the full constant set for a curve run.

    The integer lambda is the smallest admissible one; c defaults to half
    its strict upper bound, giving deterministic margin.  Rejects i = 0
    (that pair routes to the rational-case builder instead).
    """
    pair = pair if isinstance(pair, ExponentPair) else ExponentPair.make(*pair)
    i, j = pair.i, pair.j
    if i == 0:
        raise ConstraintViolation("i > 0",
                                  "the (0,1) pair is handled by the rational-case builder")
    if not i <= j:
        raise ConstraintViolation("i <= j", f"pair {pair}; normalize first")
    if R < 2:
        raise ConstraintViolation("R >= 2", f"R = {R}")
    R = int(R)
    C0 = _as_fraction(C0, "C0")
    if C0 <= 0:
        raise ConstraintViolation("C0 > 0", f"C0 = {C0}")
    lam = lambda_floor(pair)
    omega = i * j / 4
    epsilon = (i * j) ** 2 / 8
    with workprec(precision_bits):
        bound = c_upper_bound(pair, R, C0, lam)
        if c_override is not None:
            c = to_mpf(c_override)
            if not (0 < c < bound):
                raise ConstraintViolation(
                    "c below its admissible bound",
                    f"c = {mpf_str(c)} not in (0, {mpf_str(bound)})")
        else:
            c = bound / 2
        c1 = mpmath.sqrt(c) * frac_pow(R, 1 + omega)
        n0 = compute_n0(c, R, C0)
        Kv = to_mpf(K) if K is not None else 2 * mpmath.sqrt(2)
    return ConstructionParams(pair=pair, R=R, lam=lam, omega=omega,
                              epsilon=epsilon, c=c, c1=c1, n0=n0, K=Kv,
                              C0=C0, precision_bits=precision_bits)


# ---------------------------------------------------------------------------
# straight-line mode
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LineModeParams:
    """Slope data for the straight-line construction path.

    tau is a finite-range estimate of inf_q q^(1/sigma - eps) ||q alpha||,
    flagged as such via ``Q_check``; the true infimum is not computable.
    """

    alpha: mpmath.mpf
    beta: mpmath.mpf
    sigma: Fraction
    eps_dioph: Fraction
    tau: mpmath.mpf
    tau_argmin: int
    lambda_line: int
    Q_check: int

    def describe(self):
        return {
            "alpha": mpf_str(self.alpha),
            "beta": mpf_str(self.beta),
            "sigma": str(self.sigma),
            "eps_dioph": str(self.eps_dioph),
            "tau_estimate": mpf_str(self.tau),
            "tau_argmin_q": self.tau_argmin,
            "lambda_line": self.lambda_line,
            "Q_check": self.Q_check,
        }


def derive_line_params(alpha, pair, R, eps_dioph, Q_check, beta=0,
                       tau_floor="1e-9", precision_bits=DEFAULT_PREC):
    """Estimate the slope's Diophantine quality and fix the line-mode lambda.

    tau is the minimum of q^(1/sigma - eps) ||q alpha|| over 1 <= q <= Q_check,
    computed through continued-fraction convergents.  A tau estimate under
    ``tau_floor`` is treated as evidence that the slope fails its Diophantine
    condition and raises.
    """
    from .verify import exponent_check  # local import, verify depends on params

    pair = pair if isinstance(pair, ExponentPair) else ExponentPair.make(*pair)
    eps = _as_fraction(eps_dioph, "eps_dioph")
    if eps <= 0:
        raise ConstraintViolation("eps_dioph > 0", f"got {eps}")
    if Q_check < 10 ** 3:
        raise ConstraintViolation("Q_check >= 10^3", f"got {Q_check}")
    sigma = min(pair.i, pair.j)
    if sigma == 0:
        raise ConstraintViolation("sigma > 0", "line mode needs min{i, j} > 0")
    with workprec(max(precision_bits, 2 * DEFAULT_PREC)):
        alpha_mpf = to_mpf(alpha)
        beta_mpf = to_mpf(beta)
        floor_mpf = to_mpf(tau_floor)
        report = exponent_check(alpha_mpf, 1 / sigma - eps, Q_check,
                                precision_bits=precision_bits)
        tau = to_mpf(report.value)
        if tau < floor_mpf:
            raise DiophantineConditionSuspect(mpf_str(tau), mpf_str(floor_mpf),
                                              report.argmin)
    clause1 = (pair.i + 1) / (eps * pair.i) - 1
    lambda_line = max(math.floor(clause1) + 1, lambda_floor(pair.normalized()))
    return LineModeParams(alpha=alpha_mpf, beta=beta_mpf, sigma=sigma,
                          eps_dioph=eps, tau=tau, tau_argmin=report.argmin,
                          lambda_line=lambda_line, Q_check=int(Q_check))


def line_construction_params(line_params, pair, R, C0, K=None,
                             precision_bits=DEFAULT_PREC):
    """Construction constants for line mode.

    Uses lambda_line and shrinks c until (R sqrt(c))^(lam/(1+lam)) stays
    strictly under the tau estimate, on top of the usual admissibility bound.
    """
    pair = (pair if isinstance(pair, ExponentPair) else ExponentPair.make(*pair)).normalized()
    lam = line_params.lambda_line
    R = int(R)
    C0 = _as_fraction(C0, "C0")
    i, j = pair.i, pair.j
    omega = i * j / 4
    epsilon = (i * j) ** 2 / 8
    with workprec(precision_bits):
        bound_admissible = c_upper_bound(pair, R, C0, lam)
        # (R sqrt(c))^(lam/(1+lam)) < tau  <=>  c < tau^(2(1+lam)/lam) / R^2
        bound_tau = frac_pow(line_params.tau, Fraction(2 * (1 + lam), lam)) / (R * R)
        c = min(bound_admissible, bound_tau) / 2
        gauge = frac_pow(R * mpmath.sqrt(c), Fraction(lam, 1 + lam))
        if not gauge < line_params.tau:
            raise ConstraintViolation("(R sqrt(c))^(lam/(1+lam)) < tau",
                                      f"{mpf_str(gauge)} >= {mpf_str(line_params.tau)}")
        c1 = mpmath.sqrt(c) * frac_pow(R, 1 + omega)
        n0 = compute_n0(c, R, C0)
        Kv = to_mpf(K) if K is not None else 2 * mpmath.sqrt(2)
    return ConstructionParams(pair=pair, R=R, lam=lam, omega=omega,
                              epsilon=epsilon, c=c, c1=c1, n0=n0, K=Kv,
                              C0=C0, precision_bits=precision_bits)


# ---------------------------------------------------------------------------
# the (0,1) rational case
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalCaseParams:
    """Constants for the (0,1) construction: rational heights q^2, base width
    c1 = 2 c R^2 / c0, diagonal removal budget 3."""

    R: int
    c: mpmath.mpf
    c1: mpmath.mpf
    c0: Fraction
    C0: Fraction
    precision_bits: int = DEFAULT_PREC

    def describe(self):
        return {
            "mode": "rational-case",
            "R": self.R,
            "c": mpf_str(self.c, self.precision_bits),
            "c1": mpf_str(self.c1, self.precision_bits),
            "c0": str(self.c0),
            "C0": str(self.C0),
            "precision_bits": self.precision_bits,
        }


def derive_rational_params(curve, R, c=None, precision_bits=DEFAULT_PREC):
    """Constants for the rational-height construction on an invertible curve.

    c defaults to half the largest value keeping both per-level facts
    provable at this R: the paper-facing cap 1/(2 R^2) and the separation
    requirement c1 (1 + 1/R) < 1/C0 (the latter uses the upper slope bound,
    since the mean-value separation estimate needs 1/|f'| >= 1/C0).
    """
    R = int(R)
    if R < 4:
        raise ConstraintViolation("R >= 4", f"R = {R}")
    c0, C0 = curve.c0, curve.C0
    cap_split = Fraction(1, 2 * R * R)
    cap_sep = Fraction(c0, 2 * R * R * C0) * Fraction(R, R + 1)
    cap = min(cap_split, cap_sep)
    with workprec(precision_bits):
        if c is None:
            c_mpf = to_mpf(cap) / 2
        else:
            c_mpf = to_mpf(c)
            if not 0 < c_mpf < to_mpf(cap_split):
                raise ConstraintViolation("0 < c < 1/(2R^2)",
                                          f"c = {mpf_str(c_mpf)}")
            if not c_mpf < to_mpf(cap_sep):
                raise ConstraintViolation(
                    "c1 (1+1/R) < 1/C0 (separation)",
                    f"c = {mpf_str(c_mpf)} needs c < {float(cap_sep)}")
        c1 = 2 * c_mpf * R * R / to_mpf(c0)
    return RationalCaseParams(R=R, c=c_mpf, c1=c1, c0=c0, C0=C0,
                              precision_bits=precision_bits)
