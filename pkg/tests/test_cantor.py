from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import badapprox as ba
from badapprox.numerics import to_mpf, workprec


def unit_recipe(R, schedule, precision=64):
    return ba.CantorRecipe.constant((0, 1), R, schedule, precision=precision)


def test_check_condition_zero_schedule():
    rec = unit_recipe(4, ba.zero_schedule())
    assert ba.check_condition(rec, 10) == [True] * 11


def test_check_condition_direct_arithmetic():
    rec = unit_recipe(4, ba.constant_schedule(2, diagonal_only=True))
    # r_{n,n} = 2 exceeds R/4 = 1 at every level
    assert ba.check_condition(rec, 3) == [False] * 4


def test_check_condition_stepped_schedule_at_moderate_R():
    # with eps = 1/128 the diagonal budget 4 R^(1-eps) needs R^eps >= 16,
    # i.e. R >= 2^512; at R = 2^10 the condition fails at every level
    sched = ba.standard_schedule(1024, Fraction(1, 128), 1, 1)
    rec = unit_recipe(1024, sched)
    assert ba.check_condition(rec, 5) == [False] * 6
    # and it does hold once R is astronomically large
    big = 2 ** 600
    sched_big = ba.standard_schedule(big, Fraction(1, 128), 1, 1, precision=2048)
    rec_big = unit_recipe(big, sched_big, precision=2048)
    assert ba.check_condition(rec_big, 3) == [True] * 4


def test_standard_schedule_values():
    sched = ba.standard_schedule(4, Fraction(1, 128), 2, 1)
    base = to_mpf(4) ** to_mpf(Fraction(127, 128))
    assert abs(sched(5, 5) - 4 * base) < 1e-12
    # the n - m = n0 stripe only gets its 3x value from n = 3 n0 onward
    assert abs(sched(3, 5) - 2 * base) < 1e-12
    assert abs(sched(4, 6) - 3 * base) < 1e-12
    assert abs(sched(2, 5) - 2 * base) < 1e-12
    double = ba.standard_schedule(4, Fraction(1, 128), 2, 2)
    for m, n in [(5, 5), (3, 5), (4, 6), (0, 7)]:
        assert abs(double(m, n) - 2 * sched(m, n)) < 1e-12


def test_intersect_schedules_identity_sum_and_algebra():
    s = ba.standard_schedule(4, Fraction(1, 128), 1, 1)
    z = ba.zero_schedule()
    both = ba.intersect_schedules([s, z])
    assert both(3, 7) == s(3, 7)
    doubled = ba.intersect_schedules([s, s])
    ref = ba.standard_schedule(4, Fraction(1, 128), 1, 2)
    for m, n in [(0, 0), (2, 5), (1, 4)]:
        assert abs(doubled(m, n) - ref(m, n)) < 1e-12
    ones = ba.constant_schedule(1)
    assert ba.intersect_schedules([ones, ones, ones])(2, 9) == 3


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=2, max_size=4),
       st.integers(0, 6), st.integers(0, 6))
def test_intersect_schedules_commutative_associative(vals, m, dn):
    n = m + dn
    scheds = [ba.constant_schedule(v) for v in vals]
    fwd = ba.intersect_schedules(scheds)(m, n)
    rev = ba.intersect_schedules(list(reversed(scheds)))(m, n)
    assert fwd == rev == sum(vals)
    nested = ba.intersect_schedules(
        [ba.intersect_schedules(scheds[:2]), *[ba.constant_schedule(v) for v in vals[2:]]])
    assert nested(m, n) == fwd


def test_dimension_lower_bound_formulas():
    assert ba.dimension_lower_bound(unit_recipe(4, ba.zero_schedule()), 30) == 0.5
    assert abs(ba.dimension_lower_bound(unit_recipe(3, ba.zero_schedule()), 30)
               - 0.3690702464285425) < 1e-12
    assert ba.dimension_lower_bound(unit_recipe(1024, ba.zero_schedule()), 30) == 0.9


def test_dimension_lower_bound_raises_on_violation():
    rec = unit_recipe(4, ba.constant_schedule(2, diagonal_only=True))
    with pytest.raises(ba.ConditionViolated):
        ba.dimension_lower_bound(rec, 5)


def test_build_pure_split():
    rec = unit_recipe(4, ba.zero_schedule())
    tr = ba.build(rec, lambda n, cands: [], 5)
    assert [len(lv) for lv in tr.levels] == [4 ** k for k in range(6)]
    assert tr.check_nesting()
    assert tr.removal_counts == {}


def test_build_middle_thirds():
    rec = unit_recipe(3, ba.constant_schedule(1, diagonal_only=True))
    remover = lambda n, cands: [(c, n) for c in cands if c.index % 3 == 1]
    tr = ba.build(rec, remover, 12)
    assert [len(lv) for lv in tr.levels] == [2 ** k for k in range(13)]
    assert tr.warnings == []
    assert tr.check_nesting()
    # every removal charged to the diagonal
    assert all(k == n for (k, n) in tr.removal_counts)
    # exact interval endpoints: level-1 survivors are [0,1/3] and [2/3,1]
    with workprec(rec.precision):
        pairs = tr.intervals(1)
        assert mpmath.almosteq(pairs[0][1], mpmath.mpf(1) / 3)
        assert mpmath.almosteq(pairs[1][0], mpmath.mpf(2) / 3)


def test_build_one_removal_per_grandparent():
    R = 4
    rec = unit_recipe(R, ba.constant_schedule(1))

    def remover(n, cands):
        if n == 0:
            return []
        seen = set()
        out = []
        for c in cands:
            gp = c.index // (R * R)
            if gp not in seen:
                seen.add(gp)
                out.append((c, n - 1))
        return out

    depth = 7
    tr = ba.build(rec, remover, depth)
    # hand recursion: N_{n+1} = R N_n - N_{n-1}
    sizes = [1, R]
    for n in range(1, depth):
        sizes.append(R * sizes[n] - sizes[n - 1])
    assert [len(lv) for lv in tr.levels] == sizes
    for n in range(1, depth):
        assert tr.removal_counts[(n - 1, n)] == sizes[n - 1]
    assert tr.check_nesting()


def test_build_counting_law_with_summed_schedules():
    R = 5
    sched = ba.intersect_schedules([
        ba.constant_schedule(1, diagonal_only=True),
        ba.RemovalSchedule(lambda m, n: 1 if n - m == 1 else 0, name="gp"),
    ])
    rec = unit_recipe(R, sched)

    def remover(n, cands):
        out = [(c, n) for c in cands if c.index % R == 2]
        if n >= 1:
            seen = set()
            for c in cands:
                gp = c.index // (R * R)
                if gp not in seen and c.index % R == 0:
                    seen.add(gp)
                    out.append((c, n - 1))
        return out

    tr = ba.build(rec, remover, 6)
    assert tr.warnings == []
    for n in range(6):
        removed_total = sum(cnt for (k, nn), cnt in tr.removal_counts.items() if nn == n)
        budget_total = sum(float(sched(k, n)) * len(tr.levels[k]) for k in range(n + 1))
        assert removed_total <= budget_total
        # the counting law: survivors at n+1 >= R * survivors_n - sum of budgets
        assert len(tr.levels[n + 1]) >= R * len(tr.levels[n]) - budget_total


def test_build_empty_level_raises():
    rec = unit_recipe(2, ba.constant_schedule(2, diagonal_only=True))
    remover = lambda n, cands: [(c, n) for c in cands]
    with pytest.raises(ba.EmptyLevel) as ei:
        ba.build(rec, remover, 3)
    assert ei.value.level == 1


def test_build_budget_overrun_warns_not_raises():
    rec = unit_recipe(4, ba.zero_schedule())
    remover = lambda n, cands: [(c, n) for c in cands if c.index % 4 == 1]
    tr = ba.build(rec, remover, 2)
    assert tr.warnings  # overrunning the zero budget is recorded
    assert [len(lv) for lv in tr.levels] == [1, 3, 9]


def test_trace_serialization_shape():
    rec = unit_recipe(3, ba.constant_schedule(1, diagonal_only=True))
    remover = lambda n, cands: [(c, n) for c in cands if c.index % 3 == 1]
    tr = ba.build(rec, remover, 3)
    d = tr.to_jsonable()
    assert d["level_sizes"] == [1, 2, 4, 8]
    assert all(len(pair) == 2 for level in d["levels"] for pair in level)
    assert all(isinstance(pair[0], str) for level in d["levels"] for pair in level)
    assert all({"k", "n", "count", "budget"} <= set(row) for row in d["removal_counts"])
