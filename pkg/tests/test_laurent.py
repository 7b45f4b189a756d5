import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dirgaps.laurent import EXACT, EpsSeries, HyperDual

coef = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


def series(val, cs, order):
    return EpsSeries(val, tuple(mpmath.mpc(c) for c in cs), order)


def poly_product(a, b):
    return np.convolve(np.array(a, dtype=complex), np.array(b, dtype=complex))


@settings(max_examples=100, deadline=None)
@given(st.lists(coef, min_size=1, max_size=8), st.lists(coef, min_size=1, max_size=8),
       st.integers(-3, 2), st.integers(-3, 2))
def test_product_matches_convolution(a, b, va, vb):
    N = 6
    sa, sb = series(va, a, N), series(vb, b, N)
    p = sa * sb
    assert p.val == va + vb
    assert p.order == min(N + vb, N + va)
    ref = poly_product(a, b)
    for k in range(p.val, p.order + 1):
        i = k - p.val
        expected = ref[i] if i < len(ref) else 0
        assert abs(complex(p[k]) - expected) <= 1e-9 * (1 + abs(expected))


@settings(max_examples=50, deadline=None)
@given(st.lists(coef, min_size=1, max_size=6), st.lists(coef, min_size=1, max_size=6))
def test_product_commutes_and_adds(a, b):
    sa, sb = series(-1, a, 5), series(0, b, 5)
    x, y = sa * sb, sb * sa
    assert x.order == y.order
    for k in range(x.val, x.order + 1):
        assert abs(x[k] - y[k]) < 1e-12
    s = sa + sb
    for k in range(-1, 6):
        assert abs(s[k] - (sa[k] + sb[k])) < 1e-12


def test_inverse_linear_roundtrip():
    with mpmath.workprec(128):
        c0, c1 = mpmath.mpc(2, 1), mpmath.mpc(-0.5, 3)
        inv = EpsSeries.inv_linear(c0, c1, 15)
        lin = EpsSeries(0, (c0, c1), EXACT)
        one = inv * lin
        assert abs(one[0] - 1) < 1e-35
        assert all(abs(one[k]) < 1e-35 for k in range(1, one.order + 1))


def test_simple_pole():
    p = EpsSeries.inv_linear(0, 4, 10)
    assert p.val == -1 and p.order == EXACT and p[-1] == mpmath.mpc(0.25)
    with pytest.raises(ZeroDivisionError):
        EpsSeries.inv_linear(0, 0, 10)


def test_exp_linear_inverse():
    with mpmath.workprec(128):
        a = EpsSeries.exp_linear(mpmath.mpc(0, 1.3), 2.5, 12)
        b = EpsSeries.exp_linear(mpmath.mpc(0, -1.3), -2.5, 12)
        p = a * b
        assert abs(p[0] - 1) < 1e-35
        assert max(abs(p[k]) for k in range(1, 13)) < 1e-30


def test_pole_lowers_order():
    s = series(0, [1, 2, 3], 6)
    p = s * EpsSeries.inv_linear(0, 1, 6)
    assert p.val == -1 and p.order == 5
    with pytest.raises(IndexError):
        p[6]


def test_principal_max_and_truncate():
    s = series(-2, [3, -4, 1, 1], 5)
    assert s.principal_max() == 4
    t = s.truncate(0)
    assert t.order == 0 and t.top == 0


def test_hyperdual_mixed_derivative_of_inverse():
    # d^2/da db of 1/(c0 + c1 eps + 2a + 3b) = 2*2*3/(c0 + c1 eps)^3
    with mpmath.workprec(128):
        c0, c1 = mpmath.mpc(1, 2), mpmath.mpc(0.5, 0)
        h = HyperDual.inv_linear(c0, c1, 2, 3, 10)
        ref = EpsSeries.inv_linear(c0, c1, 10)
        ref = (ref * ref * ref).scale(12)
        m = h.mixed()
        for k in range(0, 11):
            assert abs(m[k] - ref[k]) < 1e-30


def test_hyperdual_product_against_finite_differences():
    # F(a, b) = exp(i + 2a - b) / (1 + 0.5i + a + 2b) at eps = 0
    with mpmath.workprec(128):
        e = HyperDual.exp_linear(mpmath.mpc(0, 1), 0, 2, -1, 4)
        r = HyperDual.inv_linear(mpmath.mpc(1, 0.5), 1, 1, 2, 4)
        F = e * r

        def f(a, b):
            return mpmath.exp(1j + 2 * a - b) / (1 + 0.5j + a + 2 * b)

        assert abs(F.f[0] - f(0, 0)) < 1e-30
        assert abs(F.fi[0] - mpmath.diff(lambda a: f(a, 0), 0)) < 1e-20
        assert abs(F.fj[0] - mpmath.diff(lambda b: f(0, b), 0)) < 1e-20
        assert abs(F.mixed()[0] - mpmath.diff(f, (0, 0), (1, 1))) < 1e-18


def test_hyperdual_without_directions_has_no_mixed_part():
    h = HyperDual.inv_linear(1, 1, 0, 0, 5)
    assert h.fi is None and h.fij is None
    assert h.mixed()[0] == 0
