import cmath
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dirgaps import characters as ch
from dirgaps.errors import ValidationError


def brute_conductor(chi):
    """Smallest d | q such that chi is 1 on every unit n = 1 mod d."""
    q = chi.modulus
    for d in range(1, q + 1):
        if q % d:
            continue
        if all(chi.angle(n) == 0 for n in range(1, q) if math.gcd(n, q) == 1 and n % d == 1 % d):
            return d
    return q


def direct_gauss(chi):
    q = chi.modulus
    return sum(complex(chi(l)) * cmath.exp(2j * math.pi * l / q) for l in range(1, q + 1))


@pytest.mark.parametrize("q,count", [(1, 1), (5, 4), (8, 4), (12, 4), (9, 6), (16, 8)])
def test_enumeration_sizes(q, count):
    chars = ch.enumerate_characters(q)
    assert len(chars) == count
    assert len({c.values for c in chars}) == count


def test_enumeration_is_deterministic():
    a = [c.numerators for c in ch.enumerate_characters(60)]
    b = [c.numerators for c in ch.enumerate_characters(60)]
    assert a == b


def test_rejects_bad_modulus():
    with pytest.raises(ValidationError):
        ch.enumerate_characters(0)
    with pytest.raises(ValidationError):
        ch.character(5, 4)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 120), st.data())
def test_character_axioms(q, data):
    chars = ch.enumerate_characters(q)
    chi = chars[data.draw(st.integers(0, len(chars) - 1))]
    m = data.draw(st.integers(-300, 300))
    n = data.draw(st.integers(-300, 300))
    am, an, amn = chi.angle(m), chi.angle(n), chi.angle(m * n)
    assert (am is None) == (math.gcd(m, q) > 1)
    if am is not None and an is not None:
        assert amn == (am + an) % 1
    else:
        assert amn is None
    assert chi.angle(n + q) == an


@pytest.mark.parametrize("q", [5, 9, 12, 16, 20, 21, 24, 45, 63, 64, 100])
def test_conductor_matches_brute_force(q):
    for chi in ch.enumerate_characters(q):
        assert chi.conductor == brute_conductor(chi)
        assert chi.is_primitive == (chi.conductor == q)


def test_conductor_examples():
    five = ch.enumerate_characters(5)
    principal = next(c for c in five if c.is_principal)
    quad = next(c for c in five if c.order == 2)
    assert ch.conductor(principal) == 1
    assert ch.conductor(quad) == 5
    induced = [c for c in ch.enumerate_characters(9) if c.order == 2]
    assert len(induced) == 1 and induced[0].conductor == 3


def test_parity_examples():
    assert all(ch.is_even(c) for c in (ch.enumerate_characters(q)[0] for q in (3, 7, 30)))
    quad5 = next(c for c in ch.enumerate_characters(5) if c.order == 2)
    quad3 = next(c for c in ch.enumerate_characters(3) if c.order == 2)
    assert ch.is_even(quad5) and not ch.is_even(quad3)
    for chi in ch.enumerate_characters(40):
        assert chi.is_even == (chi.angle(39) == 0)


@pytest.mark.parametrize("q", range(3, 101))
def test_orthogonality(q):
    for chi in ch.enumerate_characters(q):
        if chi.is_primitive and not chi.is_principal:
            assert abs(sum(chi(n) for n in range(q))) < 1e-9


def test_gauss_sum_quadratic_five():
    quad = next(c for c in ch.enumerate_characters(5) if c.order == 2)
    G = ch.gauss_sum(quad, 128).value
    with mpmath.workprec(128):
        assert abs(G - mpmath.sqrt(5)) < 1e-30


def test_gauss_sum_matches_direct_sum():
    for q in (7, 13, 16, 21):
        for chi in ch.enumerate_characters(q):
            assert abs(complex(ch.gauss_sum(chi, 64).value) - direct_gauss(chi)) < 1e-10


def test_gauss_sum_imprimitive_norm():
    induced = next(c for c in ch.enumerate_characters(9) if c.order == 2)
    assert abs(abs(direct_gauss(induced)) - 3) > 1
    assert abs(complex(ch.gauss_sum(induced).value)) < 1e-20


def test_gauss_norm_precision_guarantee():
    for prec in (64, 128, 200):
        for chi in ch.enumerate_characters(35):
            if chi.is_primitive:
                assert ch.gauss_sum(chi, prec).norm_residual < 2.0 ** (-prec / 2) * 35


def test_real_even_primitive_gauss_sum_positive():
    for q in range(3, 150):
        for chi in ch.enumerate_characters(q):
            if chi.is_primitive and chi.is_even and chi.is_real:
                G = ch.gauss_sum(chi, 80).value
                assert G.real > 0 and abs(G.imag) < 1e-15


@pytest.mark.parametrize("q,expected", [(7, 5), (4, 1), (8, 2), (9, 4), (12, 1), (1, 1), (2, 0)])
def test_phi_star_examples(q, expected):
    assert ch.phi_star(q) == expected == ch.phi_star_enumerated(q)


def test_phi_flat_five():
    assert ch.phi_flat(5) == 1


def test_phi_star_formula_prime_power():
    for p, k in ((3, 3), (5, 2), (2, 5)):
        q = p**k
        assert Fraction(ch.phi_star(q)) == q * Fraction(p - 1, p) ** 2


@pytest.mark.parametrize("lo,hi", [(1, 150), (150, 300)])
def test_phi_flat_close_to_half(lo, hi):
    for q in range(lo, hi):
        star = ch.phi_star(q)
        assert star == ch.phi_star_enumerated(q)
        flat = ch.phi_flat(q)
        assert flat == ch.phi_flat_formula(q)
        assert abs(flat - star / 2) <= 1


def test_phi_flat_formula_to_500():
    assert all(abs(ch.phi_flat_formula(q) - ch.phi_star(q) / 2) <= 1 for q in range(1, 501))


def test_conj_inverts_values():
    for chi in ch.enumerate_characters(21):
        prod = [chi.value(n) * chi.conj().value(n) for n in range(1, 21) if math.gcd(n, 21) == 1]
        assert np.allclose([complex(v) for v in prod], 1)
