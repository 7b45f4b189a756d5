import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dirgaps import kappacoeffs as kc
from dirgaps.errors import SolverError, ValidationError

E = kc.TrigLaurentExpr.of
COEFFS = (0, 1, 2, 4, 6)


def mp(c: Fraction):
    return mpmath.mpf(c.numerator) / c.denominator


def test_principal_part_cos_over_square():
    assert kc.principal_part(E([(1, "cos", 1, 2)])) == {2: 1}


def test_macl_of_cos_over_square():
    e = kc.MaclExpr.of(E([(1, "cos", 1, 2)]))
    with mpmath.workprec(128):
        for k in map(mpmath.mpf, (0.7, 1.3, 5.0)):
            ref = mpmath.cos(k) / k**2 - 1 / k**2
            assert abs(kc.macl_eval(e, k) - ref) < 1e-30
    assert e.at_zero == Fraction(-1, 2)


def test_principal_part_sin_over_ninth():
    assert kc.principal_part(E([(1, "sin", 1, 9)])) == {
        8: 1, 6: Fraction(-1, 6), 4: Fraction(1, 120), 2: Fraction(-1, 5040)}


def test_canonical_form():
    assert E([(1, "sin", -2, 3)]) == E([(-1, "sin", 2, 3)])
    assert E([(1, "cos", -2, 3)]) == E([(1, "cos", 2, 3)])
    assert E([(1, "sin", 0, 3)]).terms == {}
    with pytest.raises(ValidationError):
        E([(1, "tan", 1, 1)])


@pytest.mark.parametrize("which", COEFFS)
def test_taylor_coefficients_match_mpmath_taylor(which):
    # kappa^11 * body is entire; its Taylor coefficients shifted by 11 are the Macl coefficients
    e = kc.c_closed(which)
    with mpmath.workprec(200):
        def g(k):
            return sum(mp(c) * (mpmath.cos if kind == "cos" else mpmath.sin)(m * k) * k ** (11 - j)
                       for (kind, m, j), c in e.body.terms.items())
        tc = mpmath.taylor(g, 0, 11 + 6)
        for n in range(0, 7):
            assert abs(tc[11 + n] - mp(e.taylor[n])) < 1e-40 * max(1, abs(mp(e.taylor[n])))
        for n in range(0, 11):
            # principal part shows up below kappa^11
            assert abs(tc[n] - mp(e.principal.get(11 - n, Fraction(0)))) < 1e-40


def test_anchors():
    assert kc.c_closed(0).at_zero == Fraction(42, math.factorial(9))
    for i in range(1, 10):
        assert kc.c_closed(i).at_zero == Fraction(3, math.factorial(10))
    with mpmath.workprec(128):
        assert abs(kc.macl_eval(kc.c_closed(0), 0) - mp(Fraction(42, math.factorial(9)))) < 1e-40


def test_aliases():
    assert kc.c_closed(3) == kc.c_closed(2)
    assert kc.c_closed(5) == kc.c_closed(4)
    assert kc.c_closed(9) == kc.c_closed(7) == kc.c_closed(6)
    assert kc.c_closed(1) != kc.c_closed(2)
    with pytest.raises(ValidationError):
        kc.c_closed(10)


def test_printed_leading_terms():
    assert kc.c_closed(2).body.terms[("sin", 1, 9)] == Fraction(-3, 4)
    assert kc.c_closed(2).body.terms[("cos", 1, 10)] == Fraction(-11, 4)
    assert kc.c_closed(4).body.terms[("cos", 1, 8)] == Fraction(-1, 12)
    assert kc.c_closed(6).body.terms[("sin", 1, 9)] == Fraction(-3, 8)


@pytest.mark.parametrize("which", COEFFS)
def test_regime_crossover(which):
    e = kc.c_closed(which)
    with mpmath.workprec(128):
        below = kc.macl_detail(e, 0.5, threshold=0.6)
        above = kc.macl_detail(e, 0.5, threshold=0.4)
        assert below.regime == "taylor" and above.regime == "direct"
        assert abs(below.value - above.value) < 1e-20 * abs(above.value)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.02, 0.49), st.sampled_from(COEFFS))
def test_taylor_and_direct_agree(k, which):
    e = kc.c_closed(which)
    with mpmath.workprec(128):
        t = kc.macl_eval(e, k)
        d = kc.macl_eval(e, k, threshold=0)
        assert abs(t - d) <= 1e-25 * abs(d)


def test_high_precision_small_kappa_falls_back_to_direct():
    v = kc.macl_detail(kc.c_closed(0), 0.45, prec=512)
    assert v.regime == "direct"
    w = kc.macl_detail(kc.c_closed(0), 0.05, prec=512)
    with mpmath.workprec(512):
        assert abs(w.value - kc.macl_eval(kc.c_closed(0), 0.05, prec=512, threshold=0)) < mpmath.mpf(10) ** -120


def test_negative_kappa_rejected():
    with pytest.raises(ValidationError):
        kc.macl_eval(kc.c_closed(0), -1)


def test_assembly_identity():
    assert kc.assembly_identity()
    total = sum(kc.pair_contributions(), kc.TrigLaurentExpr())
    assert total.terms == {("cos", 1, 8): 1, ("cos", 2, 8): Fraction(1, 8),
                           ("sin", 1, 9): 1, ("sin", 2, 9): Fraction(-1, 2)}


def test_rhs_combo_limits():
    assert kc.rhs_combo(0) == 0
    assert kc.macl_eval(kc.c_closed(0), 1) > kc.rhs_combo(1)
    c0, r = kc.macl_eval(kc.c_closed(0), 7.42), kc.rhs_combo(7.42)
    assert abs(c0 - r) < 0.02 * abs(c0)


def test_h_sign_pattern():
    ks = np.linspace(0.1, 7.3, 100)
    assert all(kc.h_margin(k) > 0 for k in ks)
    fine = [kc.h_margin(k) for k in np.linspace(7.3, 7.6, 31)]
    changes = sum((a > 0) != (b > 0) for a, b in zip(fine, fine[1:]))
    assert changes == 1


def test_h_precision_stable():
    with mpmath.workprec(512):
        for k in (0.3, 2.0, 7.4):
            assert abs(kc.h_margin(k, 256) - kc.h_margin(k, 512)) < mpmath.mpf(10) ** -60


def test_solve_kappa():
    s = kc.solve_kappa(1e-12)
    assert 7.40 <= s.kappa_star <= 7.44
    assert 1.17 <= s.ratio_to_2pi <= 1.19
    assert 3.52 <= s.gap_multiplier <= 3.56
    assert s.bracket[0] <= s.kappa_star <= s.bracket[1]
    a, b = s.trace[-1]
    assert b - a <= 1e-12
    assert kc.h_margin(a) > 0 >= kc.h_margin(b)


def test_solve_kappa_failures():
    with pytest.raises(ValidationError):
        kc.solve_kappa(0)
    with pytest.raises(SolverError):
        kc.solve_kappa(lo=0.1, hi=5.0)
