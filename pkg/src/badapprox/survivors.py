"""Concrete survivor constructions on top of the splitting/removal engine.

Two builders share the engine: the curve construction removes children
meeting any enumerated star of the current height class, the rational-height
construction (the (0,1) exponent case) removes children meeting neighborhoods
of rationals p/q graded by q^2.  Both keep a removal ledger attributing every
deletion to a class and an ancestor level, so the budget schedule can be
audited after the fact.
"""

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath

from .cantor import CantorRecipe, RemovalSchedule, build, standard_schedule
from .errors import ConstraintViolation, EmptyLevel, InvariantViolation
from .lines import Line, enumerate_class
from .numerics import mpf_str, outward_eps, to_mpf, workprec
from .params import ConstructionParams, CurveSpec, RationalCaseParams


@dataclass
class RemovalLedgerEntry:
    """One removed child: who killed it, which ancestor pays for it."""

    n_child: int
    m_ancestor: int
    line: Line
    child_index: int
    group: str
    label: object = None

    def to_jsonable(self, trace):
        lo, hi = trace.endpoints(self.n_child, self.child_index)
        return {
            "n_child": self.n_child,
            "m_ancestor": self.m_ancestor,
            "line": [self.line.A, self.line.B, self.line.C],
            "group": self.group,
            "class": self.label.to_jsonable() if self.label is not None else None,
            "child_index": self.child_index,
            "child": [mpf_str(lo), mpf_str(hi)],
        }


@dataclass
class SurvivorTree:
    """A finished construction: parameters, curve, trace and the ledger."""

    params: object
    curve: CurveSpec
    trace: object
    ledger: list
    schedule: RemovalSchedule
    mode: str
    j0_offset: object = 0
    line_params: object = None
    rational_checks: list = field(default_factory=list)

    def depth(self):
        return self.trace.depth()

    def level_intervals(self, n):
        return self.trace.intervals(n)

    def midpoints(self, n):
        with workprec(self.trace.precision):
            return [(lo + hi) / 2 for lo, hi in self.trace.intervals(n)]


@dataclass
class VerifyResult:
    ok: bool
    level: Optional[int] = None
    witness: Optional[dict] = None

    def __bool__(self):
        return self.ok


def _hull(intervals):
    los = [iv[0] for iv in intervals]
    his = [iv[1] for iv in intervals]
    return min(los), max(his)


def _overlapping(candidates, lows, lo, hi):
    """Slice of sorted candidates whose closed interval meets [lo, hi]."""
    start = bisect.bisect_left(lows, lo)
    # step back while the previous candidate still reaches into [lo, hi]
    while start > 0 and candidates[start - 1].hi >= lo:
        start -= 1
    out = []
    for cand in candidates[start:]:
        if cand.lo > hi:
            break
        if cand.hi >= lo:
            out.append(cand)
    return out


# ---------------------------------------------------------------------------
# curve construction
# ---------------------------------------------------------------------------


def build_survivors(curve, params, depth, j0_offset=0, line_params=None,
                    pair_cap=None):
    """Run the curve construction for ``depth`` levels.

    The base interval has length c1 and sits at ``j0_offset`` from the left
    end of the domain.  Level n+1 candidates are removed whenever they meet
    a non-exceptional star of the current height class; each removal is
    attributed to the ancestor level its class dictates.  Budget overruns
    are warnings on the trace; losing a whole level raises.
    """
    if not isinstance(params, ConstructionParams):
        raise ConstraintViolation("curve params", "build_survivors needs ConstructionParams")
    mode = "line" if curve.kind == CurveSpec.AFFINE else "curve"
    if mode == "line" and line_params is None:
        raise ConstraintViolation("line mode", "affine curves need LineModeParams")
    with workprec(params.precision_bits):
        dom_lo, dom_hi = curve.lo_hi()
        offset = to_mpf(j0_offset)
        base_lo = dom_lo + offset
        if offset < 0 or base_lo + params.c1 > dom_hi:
            raise ConstraintViolation(
                "J0 inside the domain",
                f"offset {mpf_str(offset)} with |J0| = {mpf_str(params.c1)} "
                f"does not fit in {curve.domain}")
    schedule = standard_schedule(params.R, params.epsilon, params.n0, d=1,
                                 precision=params.precision_bits)
    recipe = CantorRecipe.constant((base_lo, params.c1), params.R, schedule,
                                   precision=params.precision_bits)
    ledger = []

    kwargs = {} if pair_cap is None else {"pair_cap": pair_cap}

    def remover(nlev, candidates):
        if nlev == 0:
            return []  # no stars of height below 1 exist
        window = (candidates[0].lo, candidates[-1].hi)
        stars = enumerate_class(curve, params, nlev, window,
                                line_params=line_params, **kwargs)
        # diagonal classes first, then deeper ancestors: the staged removal
        staged = sorted(stars, key=lambda s: (-s.label.ancestor_level(params.n0),)
                        + s.sort_key())
        lows = [c.lo for c in candidates]
        removals = []
        removed = set()
        for star in staged:
            anc = star.label.ancestor_level(params.n0)
            for cand in _overlapping(candidates, lows, star.lo, star.hi):
                if cand.index in removed:
                    continue
                removed.add(cand.index)
                removals.append((cand, anc))
                ledger.append(RemovalLedgerEntry(
                    n_child=nlev + 1, m_ancestor=anc, line=star.line,
                    child_index=cand.index, group=star.label.group(),
                    label=star.label))
        return removals

    try:
        trace = build(recipe, remover, depth)
    except EmptyLevel as exc:
        detail = _dominating_group(ledger, exc.level)
        raise EmptyLevel(exc.level, detail) from exc
    return SurvivorTree(params=params, curve=curve, trace=trace, ledger=ledger,
                        schedule=schedule, mode=mode, j0_offset=j0_offset,
                        line_params=line_params)


def _dominating_group(ledger, level):
    counts = {}
    for e in ledger:
        if e.n_child == level:
            counts[e.group] = counts.get(e.group, 0) + 1
    if not counts:
        return "no removals recorded"
    top = max(counts.items(), key=lambda kv: kv[1])
    return f"dominating class {top[0]} with {top[1]} removals"


def verify_no_low_height(tree, n, pair_cap=None):
    """Independent re-check of the level invariant at level n.

    Re-enumerates every non-exceptional star (or rational neighborhood)
    of height below R^(n-1) over the hull of the level's survivors and
    demands empty intersection with each one.  Level 1 is vacuous.
    """
    if n > tree.depth():
        raise ConstraintViolation("n <= depth", f"n = {n} > {tree.depth()}")
    if n < 1:
        return VerifyResult(True, level=n)
    intervals = tree.level_intervals(n)
    if not intervals:
        return VerifyResult(False, level=n, witness={"reason": "empty level"})
    window = _hull(intervals)
    kwargs = {} if pair_cap is None else {"pair_cap": pair_cap}
    for h in range(1, n):
        if tree.mode == "rational":
            dangerous = [
                (Line(0, q, p), lo, hi)
                for p, q, lo, hi in _rational_dangerous(tree.curve, tree.params,
                                                        h, window)
            ]
        else:
            stars = enumerate_class(tree.curve, tree.params, h, window,
                                    line_params=tree.line_params, **kwargs)
            dangerous = [(s.line, s.lo, s.hi) for s in stars]
        for line, s_lo, s_hi in dangerous:
            for lo, hi in intervals:
                if lo <= s_hi and s_lo <= hi:
                    return VerifyResult(False, level=n, witness={
                        "line": [line.A, line.B, line.C],
                        "height_class": h,
                        "survivor": [mpf_str(lo), mpf_str(hi)],
                        "star": [mpf_str(s_lo), mpf_str(s_hi)],
                    })
    return VerifyResult(True, level=n)


def ledger_report(tree):
    """Per (m, n) removal accounting against the schedule.

    empirical_max is the largest number of removals any single level-m
    ancestor absorbed at step n; the flag is informational (the schedule
    guarantees only kick in for large splitting factors).
    """
    per_cell = {}
    for e in tree.ledger:
        nstep = e.n_child - 1
        anc_idx = tree.trace.ancestor_index(e.n_child, e.child_index, e.m_ancestor)
        cell = per_cell.setdefault((e.m_ancestor, nstep), {})
        per_anc = cell.setdefault("per_anc", {})
        per_anc[anc_idx] = per_anc.get(anc_idx, 0) + 1
        groups = cell.setdefault("groups", {})
        groups[e.group] = groups.get(e.group, 0) + 1
    rows = []
    for (m, nstep), cell in sorted(per_cell.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        emp = max(cell["per_anc"].values())
        budget = tree.schedule(m, nstep)
        top_group = max(cell["groups"].items(), key=lambda kv: kv[1])[0]
        rows.append({
            "m": m, "n": nstep, "class": top_group,
            "empirical_max": emp, "budget": float(budget),
            "flag": "pass" if emp <= budget else "warn",
        })
    return rows


# ---------------------------------------------------------------------------
# rational-height construction (the (0,1) exponent case)
# ---------------------------------------------------------------------------


def _rational_dangerous(curve, rparams, n, window):
    """Dangerous neighborhoods of class n meeting the window.

    Yields (p, q, lo, hi) for reduced p/q with R^(n-1) <= q^2 < R^n, where
    [lo, hi] is the outward-rounded preimage of the strip |y - p/q| <= c/q^2
    (so its length is at most 2c/(c0 q^2)).
    """
    R = rparams.R
    q_lo = math.isqrt(max(R ** (n - 1) - 1, 0)) + 1
    q_hi = math.isqrt(R ** n - 1)
    if q_lo > q_hi:
        return
    with workprec(rparams.precision_bits):
        w_lo, w_hi = to_mpf(window[0]), to_mpf(window[1])
        f_ends = sorted((curve.f(w_lo), curve.f(w_hi)))
        dom_lo, dom_hi = curve.lo_hi()
        f_min, f_max = sorted((curve.f(dom_lo), curve.f(dom_hi)))
        eps = outward_eps()
        for q in range(q_lo, q_hi + 1):
            strip = rparams.c / (q * q)
            y_win_lo = f_ends[0] - 2 * strip
            y_win_hi = f_ends[1] + 2 * strip
            p_lo = int(mpmath.floor(y_win_lo * q)) - 1
            p_hi = int(mpmath.ceil(y_win_hi * q)) + 1
            for p in range(p_lo, p_hi + 1):
                if math.gcd(abs(p), q) != 1:
                    continue
                y = mpmath.mpf(p) / q
                y_lo = max(y - strip, f_min)
                y_hi = min(y + strip, f_max)
                if y_lo > y_hi:
                    continue
                x1 = curve.inverse(y_lo)
                x2 = curve.inverse(y_hi)
                lo, hi = (x1, x2) if x1 <= x2 else (x2, x1)
                pad = (mpmath.fabs(lo) + mpmath.fabs(hi) + 1) * eps
                lo, hi = lo - pad, hi + pad
                if hi < w_lo or lo > w_hi:
                    continue
                yield p, q, lo, hi


def build_rational_case(curve, c, R, depth, j0_offset=0, precision_bits=None):
    """The (0,1) construction: remove neighborhoods of rationals p/q.

    Heights are q^2; class n holds R^(n-1) <= q^2 < R^n, and every removal
    is charged to the diagonal (budget 3 per parent).  Two per-level facts
    are enforced, not just observed: a single neighborhood meets at most 3
    children, and at most one class-n neighborhood meets any one parent.
    """
    from .params import derive_rational_params

    precision_bits = precision_bits or curve.precision
    rparams = derive_rational_params(curve, R, c=c, precision_bits=precision_bits)
    R = rparams.R
    with workprec(precision_bits):
        dom_lo, dom_hi = curve.lo_hi()
        offset = to_mpf(j0_offset)
        base_lo = dom_lo + offset
        if offset < 0 or base_lo + rparams.c1 > dom_hi:
            raise ConstraintViolation(
                "J0 inside the domain",
                f"offset {mpf_str(offset)} with |J0| = {mpf_str(rparams.c1)} "
                f"does not fit in {curve.domain}")
    schedule = RemovalSchedule(lambda m, n: 3 if m == n else 0, name="rational(3)")
    recipe = CantorRecipe.constant((base_lo, rparams.c1), R, schedule,
                                   precision=precision_bits)
    ledger = []
    checks = []

    def remover(nlev, candidates):
        window = (candidates[0].lo, candidates[-1].hi)
        lows = [cand.lo for cand in candidates]
        removals = []
        removed = set()
        per_parent_removed = {}
        per_parent_lines = {}
        parents_hit = {}
        for p, q, lo, hi in _rational_dangerous(curve, rparams, nlev, window):
            line = Line(0, q, p)
            hits = _overlapping(candidates, lows, lo, hi)
            for cand in hits:
                parent = cand.index // R
                parents_hit.setdefault(parent, set()).add((p, q))
                if cand.index in removed:
                    continue
                removed.add(cand.index)
                removals.append((cand, nlev))
                per_parent_removed[parent] = per_parent_removed.get(parent, 0) + 1
                per_parent_lines.setdefault(parent, set()).add((p, q))
                ledger.append(RemovalLedgerEntry(
                    n_child=nlev + 1, m_ancestor=nlev, line=line,
                    child_index=cand.index, group="rational", label=None))
        max_removed = max(per_parent_removed.values(), default=0)
        max_lines = max((len(s) for s in parents_hit.values()), default=0)
        checks.append({"n": nlev, "max_removed_per_parent": max_removed,
                       "max_neighborhoods_per_parent": max_lines})
        if max_removed > 3:
            raise InvariantViolation(
                f"level {nlev}: a parent lost {max_removed} children (> 3)")
        if max_lines > 1:
            raise InvariantViolation(
                f"level {nlev}: {max_lines} class-{nlev} neighborhoods meet one parent")
        return removals

    try:
        trace = build(recipe, remover, depth)
    except EmptyLevel as exc:
        raise EmptyLevel(exc.level, _dominating_group(ledger, exc.level)) from exc
    return SurvivorTree(params=rparams, curve=curve, trace=trace, ledger=ledger,
                        schedule=schedule, mode="rational", j0_offset=j0_offset,
                        rational_checks=checks)
