"""The abstract splitting/removal construction on a base interval.

Levels are kept as integer grid indices against the base interval, so
nesting and disjointness are exact integer facts; real endpoints are only
materialized (at working precision) when a remover needs geometry.  The
removal bookkeeping follows the two-parameter budget schedule r_{m,n}:
at step n, each level-m ancestor may lose up to r_{m,n} of the freshly
split level-(n+1) candidates.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import mpmath

from .errors import ConditionViolated, ConstraintViolation, EmptyLevel
from .numerics import (
    DEFAULT_PREC,
    is_power_of_two,
    mpf_str,
    to_mpf,
    workprec,
)


@dataclass(frozen=True)
class RemovalSchedule:
    """Two-parameter removal budgets r_{m,n} for 0 <= m <= n."""

    bound: Callable[[int, int], object]
    name: str = "schedule"

    def __call__(self, m, n):
        if not 0 <= m <= n:
            raise ValueError(f"schedule asked for r_({m},{n}) outside 0 <= m <= n")
        v = self.bound(m, n)
        if v < 0:
            raise ConstraintViolation("r_{m,n} >= 0", f"r_({m},{n}) = {v}")
        return v


def zero_schedule():
    return RemovalSchedule(lambda m, n: 0, name="zero")


def constant_schedule(value, diagonal_only=False, name=None):
    if diagonal_only:
        return RemovalSchedule(lambda m, n: value if m == n else 0,
                               name=name or f"diag({value})")
    return RemovalSchedule(lambda m, n: value, name=name or f"const({value})")


def standard_schedule(R, eps, n0, d=1, precision=DEFAULT_PREC):
    """The stepped removal schedule used by the curve construction.

    Diagonal gets 4 d R^(1-eps); off-diagonal 2 d R^(1-eps) except that the
    stripe n - m = n0 carries 3 d R^(1-eps) once n >= 3 n0 (below that the
    stripe's extra removals cannot occur, so the generic off-diagonal value
    applies).
    """
    R = int(R)
    if R < 2:
        raise ConstraintViolation("R >= 2", f"R = {R}")
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ConstraintViolation("eps in (0,1)", f"eps = {eps}")
    if n0 < 1 or d < 1:
        raise ConstraintViolation("n0 >= 1, d >= 1", f"n0 = {n0}, d = {d}")
    with workprec(precision):
        base = d * to_mpf(R) ** to_mpf(1 - eps)

    def bound(m, n):
        if m == n:
            return 4 * base
        if n - m == n0 and n >= 3 * n0:
            return 3 * base
        return 2 * base

    return RemovalSchedule(bound, name=f"standard(R={R},eps={eps},n0={n0},d={d})")


def intersect_schedules(schedules):
    """Pointwise sum: the budget schedule of an intersection of constructions."""
    schedules = list(schedules)
    if not schedules:
        raise ConstraintViolation("non-empty schedule list", "got []")
    if len(schedules) == 1:
        return schedules[0]

    def bound(m, n):
        return sum(s(m, n) for s in schedules)

    return RemovalSchedule(bound, name=" + ".join(s.name for s in schedules))


@dataclass(frozen=True)
class CantorRecipe:
    """Base interval, per-level splitting factors and a removal schedule.

    ``base`` is (lo, length); both may be exact Fractions or mpf values
    (an irrational base length is fine, grid positions stay exact relative
    to it).
    """

    base: tuple
    R_seq: Callable[[int], int]
    schedule: RemovalSchedule
    precision: int = DEFAULT_PREC

    @classmethod
    def constant(cls, base, R, schedule, precision=DEFAULT_PREC):
        R = int(R)
        return cls(base=base, R_seq=lambda n: R, schedule=schedule,
                   precision=precision)

    def factor(self, n):
        R = int(self.R_seq(n))
        if R < 2:
            raise ConstraintViolation("R_n >= 2", f"R_{n} = {R}")
        return R


@dataclass
class Candidate:
    """A level-n grid interval handed to removers, with real endpoints."""

    level: int
    index: int
    lo: mpmath.mpf
    hi: mpmath.mpf

    def midpoint(self):
        return (self.lo + self.hi) / 2


@dataclass
class ConstructionTrace:
    """Survivor indices per level plus removal accounting.

    levels[n] is a sorted list of grid indices at level n (width =
    base_length / prod(R_0..R_{n-1})).  removal_counts[(k, n)] counts the
    level-(n+1) intervals removed at step n charged to level-k ancestors.
    """

    base_lo: object
    base_len: object
    R_used: list = field(default_factory=list)
    levels: list = field(default_factory=lambda: [[0]])
    removal_counts: dict = field(default_factory=dict)
    budgets: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    precision: int = DEFAULT_PREC

    def depth(self):
        return len(self.levels) - 1

    def grid_size(self, n):
        g = 1
        for R in self.R_used[:n]:
            g *= R
        return g

    def width(self, n):
        with workprec(self.precision):
            return to_mpf(self.base_len) / self.grid_size(n)

    def endpoints(self, n, index):
        with workprec(self.precision):
            w = to_mpf(self.base_len) / self.grid_size(n)
            lo = to_mpf(self.base_lo) + index * w
            return lo, lo + w

    def intervals(self, n):
        return [self.endpoints(n, m) for m in self.levels[n]]

    def ancestor_index(self, child_level, child_index, ancestor_level):
        g = 1
        for R in self.R_used[ancestor_level:child_level]:
            g *= R
        return child_index // g

    def counts(self, n):
        return len(self.levels[n])

    def check_nesting(self):
        """Every level-(n+1) survivor sits inside exactly one level-n survivor."""
        for n in range(self.depth()):
            parents = set(self.levels[n])
            R = self.R_used[n]
            for idx in self.levels[n + 1]:
                if idx // R not in parents:
                    return False
        return True

    def to_jsonable(self):
        with workprec(self.precision):
            levels = [[[mpf_str(lo), mpf_str(hi)] for lo, hi in self.intervals(n)]
                      for n in range(len(self.levels))]
        counts = [
            {"k": k, "n": n, "count": cnt,
             "budget": float(self.budgets.get((k, n), 0))}
            for (k, n), cnt in sorted(self.removal_counts.items())
        ]
        return {
            "base": {"lo": mpf_str(to_mpf(self.base_lo)),
                     "len": mpf_str(to_mpf(self.base_len))},
            "R": list(self.R_used),
            "levels": levels,
            "level_sizes": [len(lv) for lv in self.levels],
            "removal_counts": counts,
            "warnings": list(self.warnings),
        }


def check_condition(recipe, n_max):
    """The budget condition gating the dimension bound, per level.

    For each n <= n_max: sum_{k=0}^{n} r_{n-k,n} * prod_{i=1}^{k} (4/R_{n-i})
    must not exceed R_n / 4 (empty product = 1).
    """
    if n_max < 0:
        raise ConstraintViolation("n_max >= 0", f"n_max = {n_max}")
    out = []
    with workprec(recipe.precision):
        for n in range(n_max + 1):
            lhs = mpmath.mpf(0)
            prod = mpmath.mpf(1)
            for k in range(n + 1):
                if k >= 1:
                    prod *= mpmath.mpf(4) / recipe.factor(n - k)
                lhs += to_mpf(recipe.schedule(n - k, n)) * prod
            out.append(bool(lhs <= mpmath.mpf(recipe.factor(n)) / 4))
    return out


def _log_R_2(R):
    """1 - log_R 2, exact when R is a power of two."""
    if is_power_of_two(R):
        t = R.bit_length() - 1
        return float(1 - Fraction(1, t))
    return float(1 - mpmath.log(2) / mpmath.log(R))


def dimension_lower_bound(recipe, horizon):
    """Finite-horizon stand-in for the liminf dimension bound.

    Returns min_{n <= horizon} (1 - log_{R_n} 2); exact for constant
    splitting sequences.  Raises ConditionViolated if the budget condition
    fails anywhere up to the horizon.
    """
    flags = check_condition(recipe, horizon)
    for n, ok in enumerate(flags):
        if not ok:
            with workprec(recipe.precision):
                lhs = mpmath.mpf(0)
                prod = mpmath.mpf(1)
                for k in range(n + 1):
                    if k >= 1:
                        prod *= mpmath.mpf(4) / recipe.factor(n - k)
                    lhs += to_mpf(recipe.schedule(n - k, n)) * prod
                raise ConditionViolated(n, mpf_str(lhs),
                                        mpf_str(mpmath.mpf(recipe.factor(n)) / 4))
    return min(_log_R_2(recipe.factor(n)) for n in range(horizon + 1))


def build(recipe, remover, depth):
    """Run the splitting/removal construction for ``depth`` levels.

    ``remover(n, candidates)`` sees the freshly split level-(n+1) candidates
    and returns (candidate, ancestor_level) pairs to delete; each deletion is
    charged to the named ancestor level.  Budget overruns are recorded as
    warnings, never fatal; an empty level is.
    """
    if depth < 0:
        raise ConstraintViolation("depth >= 0", f"depth = {depth}")
    trace = ConstructionTrace(base_lo=recipe.base[0], base_len=recipe.base[1],
                              precision=recipe.precision)
    with workprec(recipe.precision):
        base_lo = to_mpf(recipe.base[0])
        base_len = to_mpf(recipe.base[1])
        if not base_len > 0:
            raise ConstraintViolation("|I| > 0", f"length = {mpf_str(base_len)}")
        grid = 1
        for n in range(depth):
            R = recipe.factor(n)
            trace.R_used.append(R)
            grid *= R
            w = base_len / grid
            candidates = []
            for parent in trace.levels[n]:
                start = parent * R
                for t in range(R):
                    idx = start + t
                    lo = base_lo + idx * w
                    candidates.append(Candidate(n + 1, idx, lo, lo + w))
            removals = remover(n, candidates) or []
            removed = {}
            for cand, k in removals:
                idx = cand.index if isinstance(cand, Candidate) else int(cand)
                if not 0 <= k <= n:
                    raise ConstraintViolation("0 <= ancestor level <= n",
                                              f"attribution k = {k} at step n = {n}")
                if idx not in removed:  # first attribution wins
                    removed[idx] = k
            for idx, k in removed.items():
                key = (k, n)
                trace.removal_counts[key] = trace.removal_counts.get(key, 0) + 1
            for (k, nn), cnt in list(trace.removal_counts.items()):
                if nn != n:
                    continue
                budget_each = recipe.schedule(k, n)
                allowed = to_mpf(budget_each) * len(trace.levels[k])
                trace.budgets[(k, n)] = budget_each
                if cnt > allowed:
                    trace.warnings.append(
                        f"step n={n}: removed {cnt} intervals charged to level {k}, "
                        f"schedule allows {mpf_str(allowed)}")
            survivors = sorted(c.index for c in candidates if c.index not in removed)
            if not survivors:
                raise EmptyLevel(n + 1)
            trace.levels.append(survivors)
    return trace
