import itertools
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dirgaps import characters as ch
from dirgaps import localconst as lc
from dirgaps.errors import ValidationError

ZERO = (0, 0, 0)
SMALL_PRIMES = [p for p in range(2, 101) if all(p % d for d in range(2, p))]


def brute_bp(A, B, p, degree):
    """Direct e(0)-coefficient: sum over exponent triples with equal totals."""
    with mpmath.workprec(150):
        x = [mpmath.power(p, -(0.5 + mpmath.mpc(a))) for a in A]
        y = [mpmath.power(p, -(0.5 + mpmath.mpc(b))) for b in B]
        by_total_x = [mpmath.mpc(0)] * (degree + 1)
        by_total_y = [mpmath.mpc(0)] * (degree + 1)
        for e in itertools.product(range(degree + 1), repeat=3):
            g = sum(e)
            if g <= degree:
                by_total_x[g] += x[0] ** e[0] * x[1] ** e[1] * x[2] ** e[2]
                by_total_y[g] += y[0] ** e[0] * y[1] ** e[1] * y[2] ** e[2]
        return sum(a * b for a, b in zip(by_total_x, by_total_y))


def test_a3_factor_at_two():
    assert lc.a3_factor(2) == Fraction(13, 64)
    expected = Fraction(1, 32) * (1 + Fraction(5, 2) - Fraction(5, 4) + Fraction(14, 8) - Fraction(15, 16)
                                  + Fraction(5, 32) + Fraction(4, 64) - Fraction(4, 128) + Fraction(1, 256))
    assert lc.a3_L_factor(2) == expected


def test_factors_are_one_plus_order_p_minus_two():
    for p in (101, 1009, 10007):
        assert abs(lc.a3_factor(p) - 1) * p * p < 10
        assert abs(lc.a3_L_factor(p) - 1) * p * p < 30


@pytest.mark.parametrize("fn", [lc.a3, lc.a3_L])
def test_euler_product_nesting(fn):
    lo, hi = fn(10**4), fn(10**5)
    with mpmath.workprec(128):
        assert abs(hi.value - lo.value) <= lo.tail_bound
        assert hi.tail_bound < lo.tail_bound
    with pytest.raises(ValidationError):
        fn(50)


def test_a3_small_cutoff_by_hand():
    with mpmath.workprec(128):
        direct = mpmath.mpf(1)
        for p in [p for p in range(2, 101) if all(p % d for d in range(2, p))]:
            f = lc.a3_factor(p)
            direct *= mpmath.mpf(f.numerator) / f.denominator
        assert abs(lc.a3(100).value - direct) < 1e-35


@pytest.mark.parametrize("p", SMALL_PRIMES)
def test_b_p_zero_shift_exact(p):
    expected = (1 + Fraction(4, p) + Fraction(1, p * p)) / (1 - Fraction(1, p)) ** 5
    assert lc.b_p_exact(p) == expected
    with mpmath.workprec(128):
        assert abs(lc.b_p(ZERO, ZERO, p) - mpmath.mpf(expected.numerator) / expected.denominator) < 1e-35


def test_b_p_leading_terms():
    # 1 + 9/p + O(p^-2) at zero shifts
    for p in (1009, 10007):
        v = lc.b_p_exact(p)
        assert abs(v - 1 - Fraction(9, p)) * p * p < 50


def test_b_p_series_vs_quadrature():
    A = (0.01j, 0, -0.01j)
    B = (-0.01j, 0.01j, 0)
    with mpmath.workprec(128):
        assert abs(lc.b_p(A, B, 3) - lc.b_p_quadrature(A, B, 3)) < 1e-10


@settings(max_examples=10, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=0.2).filter(lambda z: abs(z.real) < 0.2),
                min_size=6, max_size=6), st.sampled_from([5, 7, 11]))
def test_b_p_matches_brute_force_convolution(shifts, p):
    A, B = shifts[:3], shifts[3:]
    d = 22
    with mpmath.workprec(128):
        got = lc.b_p(A, B, p, cutoff=d)
        assert abs(got - brute_bp(A, B, p, d)) < 1e-25
        assert abs(lc.b_p(A, B, p) - lc.b_p_quadrature(A, B, p)) < 1e-10


def test_b_p_cutoff_sixty_is_not_enough_at_two():
    fixed = lc.b_p_detail(ZERO, ZERO, 2, cutoff=60)
    adaptive = lc.b_p_detail(ZERO, ZERO, 2)
    assert fixed.tail_bound > 1e-15
    assert adaptive.degree > 60 and adaptive.tail_bound < mpmath.ldexp(1, -128)
    with mpmath.workprec(128):
        exact = lc.b_p_exact(2)
        assert abs(adaptive.value - mpmath.mpf(exact.numerator) / exact.denominator) < 1e-35


def test_b_p_validation():
    with pytest.raises(ValidationError):
        lc.b_p((0.25, 0, 0), ZERO, 3)
    with pytest.raises(ValidationError):
        lc.b_p(ZERO, ZERO, 3, cutoff=5)
    with pytest.raises(ValidationError):
        lc.b_p((0, 0), ZERO, 3)


@pytest.mark.parametrize("p", [2, 3, 97, 10007])
def test_z_p_inv_zero_shift(p):
    with mpmath.workprec(128):
        assert abs(lc.z_p_inv(ZERO, ZERO, p) - (1 - mpmath.mpf(1) / p) ** 9) < 1e-35


def test_z_p_inv_direct_product():
    A, B = (0.1, -0.1, 0.05), (-0.05, 0.1, 0)
    with mpmath.workprec(128):
        ref = mpmath.mpf(1)
        for a in A:
            for b in B:
                ref *= 1 - mpmath.power(2, -1 - mpmath.mpf(a) - mpmath.mpf(b))
        assert abs(lc.z_p_inv(A, B, 2) - ref) < 1e-35


def test_local_factor_is_one_plus_order_p_minus_two():
    A, B = (0.01j, 0.005, -0.01j), (0.003, -0.007j, 0)
    primes = [p for p in lc.primes_upto(10**4) if p > 10][::25]
    with mpmath.workprec(128):
        cs = [float(abs(lc.b_p(A, B, p) * lc.z_p_inv(A, B, p) - 1)) * p * p for p in primes]
    assert max(cs) < 40
    # the normalized constant settles down as p grows
    tail = cs[len(cs) // 2:]
    assert max(tail) / min(tail) < 1.5


def test_a_partial_zero_shift_is_a3():
    a = lc.a_partial(ZERO, ZERO, 10**5)
    with mpmath.workprec(128):
        assert abs(a.value - lc.a3(10**5).value) < 1e-15


def test_a_partial_continuity_in_shifts():
    base = lc.a3(2000).value
    diffs = []
    for s in (0.02, 0.01, 0.005):
        A, B = (s * 1j, 0, -s * 1j), (s, 0, -s)
        diffs.append(abs(lc.a_partial(A, B, 2000).value - base))
    assert diffs[0] > diffs[1] > diffs[2]
    assert diffs[0] < 0.1


def test_a_partial_nesting():
    A, B = (0.02j, 0.01, -0.02j), (0.01, -0.01, 0.02j)
    lo, hi = lc.a_partial(A, B, 500), lc.a_partial(A, B, 3000)
    with mpmath.workprec(128):
        assert abs(hi.value - lo.value) <= lo.tail_bound


def test_slope_fit_smoke():
    s = lc.slope_fit(10**4, points=10)
    assert len(s.residuals) == len(s.xs) and np.all(np.isfinite(s.residuals))
    assert 0.1 < s.slope < 0.3
    with pytest.raises(ValidationError):
        lc.slope_fit(1000)


def test_multiplicative_tables_against_enumeration():
    x = 300
    F, Eg = lc._multiplicative_tables(x)
    for q in range(1, x + 1):
        g = 1.0
        for p in _factors(q):
            g *= (1 - 1 / p) ** 5 / (1 + 4 / p + 1 / p**2)
        assert F[q] == pytest.approx(ch.phi_star(q) * g, rel=1e-12, abs=1e-15)
        assert (F[q] + Eg[q]) / 2 == pytest.approx(ch.phi_flat(q) * g, rel=1e-12, abs=1e-12)


def _factors(q):
    out, p = [], 2
    while p * p <= q:
        if q % p == 0:
            out.append(p)
            while q % p == 0:
                q //= p
        p += 1
    if q > 1:
        out.append(q)
    return out


def test_slope_residuals_shrink():
    a = lc.slope_fit(10**5)
    b = lc.slope_fit(10**6)
    A, L = lc.a3(10**6).value, lc.a3_L(10**6).value
    target = float(L / A)
    assert abs(b.slope - target) <= abs(a.slope - target) + 1e-3
    assert abs(b.slope / target - 1) < 0.02
