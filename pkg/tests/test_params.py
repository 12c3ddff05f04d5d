from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import badapprox as ba
from badapprox.numerics import frac_pow, to_mpf, workprec


def test_pair_normalization_and_swap_flag():
    pair = ba.ExponentPair.make(Fraction(2, 3), Fraction(1, 3))
    norm = pair.normalized()
    assert (norm.i, norm.j) == (Fraction(1, 3), Fraction(2, 3))
    assert norm.swapped
    assert not ba.ExponentPair.make("1/2", "1/2").normalized().swapped


def test_pair_sum_snaps_float_inputs():
    pair = ba.ExponentPair.make(0.3, 0.7)
    assert pair.i + pair.j == 1


def test_pair_rejects_bad_sum():
    with pytest.raises(ba.ConstraintViolation):
        ba.ExponentPair.make(Fraction(1, 2), Fraction(1, 3))


def test_derive_params_half_half(params4):
    assert params4.omega == Fraction(1, 16)
    assert params4.epsilon == Fraction(1, 128)
    assert params4.lam == 5  # max{4, 2, 3} = 4, smallest integer above


def test_default_c_is_half_the_admissible_bound(parabola, half_pair):
    # independent high-precision evaluation of the admissibility bound
    with workprec(512):
        C0 = to_mpf(parabola.C0)
        t1 = (8 * (C0 + 1) * mpmath.mpf(4) ** (mpmath.mpf(-1) - mpmath.mpf(1) / 8 - 5)) ** 2
        t2 = ((C0 + 1) * C0 * 16) ** -2
        expected = min(t1, t2) / 2
    p = ba.derive_params(half_pair, 4, parabola.C0)
    assert abs(to_mpf(p.c) - expected) < expected * mpmath.mpf(2) ** -120


def test_c_override_validation(parabola, half_pair):
    bound = ba.c_upper_bound(half_pair, 4, parabola.C0, 5)
    ok = ba.derive_params(half_pair, 4, parabola.C0, c_override=bound / 4)
    assert ok.c == bound / 4
    with pytest.raises(ba.ConstraintViolation):
        ba.derive_params(half_pair, 4, parabola.C0, c_override=bound * 2)


def test_derive_params_rejects_zero_exponent():
    with pytest.raises(ba.ConstraintViolation):
        ba.derive_params(ba.ExponentPair.make(0, 1), 4, 3)


def test_compute_n0_examples():
    assert ba.compute_n0(Fraction(1, 16), 4, 1) == 1  # sqrt(c) R C0 = 1 exactly
    assert ba.compute_n0(Fraction(1, 4), 7, 2) == 1  # boundary sqrt(c) C0 = 1
    # brute-force loop oracle for c = 1e-5, R = 4, C0 = 3.01
    c, R, C0 = mpmath.mpf("1e-5"), 4, Fraction(301, 100)
    n = 1
    while float(mpmath.sqrt(c)) * R ** n * float(C0) < 1:
        n += 1
    assert ba.compute_n0(c, R, C0) == n == 4


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.integers(1, 400), st.integers(1, 40))
def test_compute_n0_monotone(R, c_th, C0_th):
    c = Fraction(c_th, 1000)
    C0 = Fraction(C0_th, 10)
    if c >= 1:
        return
    n = ba.compute_n0(c, R, C0)
    if c / 2 > 0:
        assert ba.compute_n0(c / 2, R, C0) >= n
    assert ba.compute_n0(c, R + 1, C0) <= n
    assert ba.compute_n0(c, R, C0 * 2) <= n


@settings(max_examples=30, deadline=None)
@given(st.fractions(min_value="1/100", max_value="99/100"))
def test_swap_symmetry_of_derived_exponents(i):
    pair_a = ba.ExponentPair.make(i, 1 - i).normalized()
    pair_b = ba.ExponentPair.make(1 - i, i).normalized()
    pa = ba.derive_params(pair_a, 4, Fraction(301, 100))
    pb = ba.derive_params(pair_b, 4, Fraction(301, 100))
    assert pa.omega == pb.omega
    assert pa.epsilon == pb.epsilon
    assert pa.lam == pb.lam
    assert pa.epsilon < pa.omega < 1
    assert pa.epsilon <= Fraction(1, 128)


def test_epsilon_max_at_balanced_pair():
    p = ba.derive_params(ba.ExponentPair.make("1/2", "1/2"), 4, 3)
    assert p.epsilon == Fraction(1, 128)


def test_construction_params_validation_catches_bad_invariants(params4):
    from dataclasses import replace

    with pytest.raises(ba.ConstraintViolation):
        replace(params4, lam=4)  # not strictly above max{4, 1/i, (1+i)/j}
    with pytest.raises(ba.ConstraintViolation):
        replace(params4, omega=Fraction(1, 8))
    with pytest.raises(ba.ConstraintViolation):
        replace(params4, n0=params4.n0 + 1)
    with pytest.raises(ba.ConstraintViolation):
        replace(params4, K=mpmath.mpf("0.5"))


def test_parabola_curve_bounds():
    curve = ba.CurveSpec.parabola()
    assert curve.c0 == 1
    assert curve.C0 == Fraction(301, 100)
    with pytest.raises(ba.ConstraintViolation):
        ba.CurveSpec.parabola((Fraction(-1), Fraction(1)))  # f' vanishes inside


def test_general_curve_grid_validation():
    # f = x^2 + x/2 on [1/2, 3/2]: f' in [3/2, 7/2], f'' = 2
    f = lambda x: x * x + x / 2
    fp = lambda x: 2 * x + mpmath.mpf(1) / 2
    fpp = lambda x: mpmath.mpf(2)
    curve = ba.CurveSpec.general(f, fp, fpp, (Fraction(1, 2), Fraction(3, 2)))
    assert 0 < curve.c0 <= Fraction(3, 2)
    assert curve.C0 > Fraction(7, 2)
    with pytest.raises(ba.ConstraintViolation):
        ba.CurveSpec.general(f, fp, fpp, (Fraction(1, 2), Fraction(3, 2)),
                             c0=Fraction(2))  # claims a slope floor that fails


def test_affine_curve_only_for_line_mode(half_pair):
    curve = ba.CurveSpec.affine(mpmath.mpf(3) / 2, 0, (0, 1))
    params = ba.derive_params(half_pair, 4, curve.C0)
    with pytest.raises(ba.ConstraintViolation):
        ba.build_survivors(curve, params, 2)  # missing line params


def test_derive_line_params_golden_ratio(half_pair):
    with workprec(256):
        phi = (1 + mpmath.sqrt(5)) / 2
    lp = ba.derive_line_params(phi, half_pair, 4, Fraction(1, 10), 10 ** 6)
    # the weighted distance q^(1/sigma - eps) ||q alpha|| is minimized at q = 1
    assert lp.tau_argmin == 1
    with workprec(256):
        assert abs(lp.tau - (2 - phi)) < mpmath.mpf(2) ** -100
    # smallest integer above (i+1)/(eps i) - 1 = 29
    assert lp.lambda_line == 30
    assert lp.sigma == Fraction(1, 2)


def test_derive_line_params_rejects_rational_slope(half_pair):
    with pytest.raises(ba.DiophantineConditionSuspect):
        ba.derive_line_params(Fraction(1, 2), half_pair, 4, Fraction(1, 10), 10 ** 4)


def test_line_construction_params_gauge(half_pair):
    with workprec(256):
        phi = (1 + mpmath.sqrt(5)) / 2
    lp = ba.derive_line_params(phi, half_pair, 4, Fraction(1, 10), 10 ** 5)
    p = ba.line_construction_params(lp, half_pair, 4, Fraction(163, 100))
    with workprec(p.precision_bits):
        gauge = frac_pow(4 * mpmath.sqrt(p.c), Fraction(p.lam, 1 + p.lam))
        assert gauge < lp.tau
    assert p.lam == lp.lambda_line


def test_rational_params_caps(parabola):
    rp = ba.derive_rational_params(parabola, 4)
    assert 0 < float(rp.c) < 1 / 32
    with workprec(rp.precision_bits):
        assert rp.c1 * (1 + mpmath.mpf(1) / 4) < 1 / to_mpf(parabola.C0)
    with pytest.raises(ba.ConstraintViolation):
        ba.derive_rational_params(parabola, 3)
    with pytest.raises(ba.ConstraintViolation):
        ba.derive_rational_params(parabola, 4, c=Fraction(1, 8))  # above 1/(2R^2)
