"""Dirichlet characters with exact rational values.

A character mod q is stored as a table of integer numerators over a common
denominator N (the exponent of the unit group), so that chi(n) = e(num[n]/N)
for units and chi(n) = 0 otherwise.  Multiplicativity and parity tests are
then integer arithmetic; complex values only appear at evaluation time.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence

import mpmath
import numpy as np

from .errors import ValidationError
from .primes import divisors, factorize, primitive_root

NON_UNIT = -1


@dataclass(frozen=True)
class _Component:
    """One cyclic factor of (Z/q)^*: generator, order and a discrete-log table mod q."""

    generator: int
    order: int
    dlog: np.ndarray = field(repr=False, compare=False)


@lru_cache(maxsize=256)
def _unit_group(q: int) -> tuple[_Component, ...]:
    """Cyclic decomposition of (Z/q)^* by CRT over prime powers.

    For 2^k with k >= 3 the factors are <-1> and <5>, in that order.
    """
    comps: list[_Component] = []
    n = np.arange(q, dtype=np.int64)
    for p, k in sorted(factorize(q).items()):
        m = p**k
        other = q // m
        inv_o = pow(other, -1, m)
        inv_m = pow(m, -1, other) if other > 1 else 0

        def lift(r: int, m: int = m, other: int = other, inv_o: int = inv_o, inv_m: int = inv_m) -> int:
            # x = r mod m and x = 1 mod q/m
            return (r * other * inv_o + m * inv_m) % q

        res = n % m
        if p == 2:
            if k == 1:
                continue
            neg = np.full(m, -1, dtype=np.int64)
            five = np.full(m, -1, dtype=np.int64)
            ordfive = 2 ** (k - 2) if k >= 3 else 1
            x = 1
            for b in range(ordfive):
                neg[x] = 0
                five[x] = b
                neg[(-x) % m] = 1
                five[(-x) % m] = b
                x = x * 5 % m
            comps.append(_Component(lift(m - 1), 2, neg[res]))
            if ordfive > 1:
                comps.append(_Component(lift(5), ordfive, five[res]))
        else:
            g = primitive_root(p)
            if k > 1 and pow(g, p - 1, p * p) == 1:
                g += p
            order = m // p * (p - 1)
            table = np.full(m, -1, dtype=np.int64)
            x = 1
            for e in range(order):
                table[x] = e
                x = x * g % m
            comps.append(_Component(lift(g), order, table[res]))
    return tuple(comps)


def _units_mask(q: int) -> np.ndarray:
    return np.gcd(np.arange(q), q) == 1


@dataclass(frozen=True)
class DirichletCharacter:
    """A character mod q: chi(n) = e(numerators[n % q] / denominator), 0 off units."""

    modulus: int
    index: tuple[int, ...]
    denominator: int
    numerators: tuple[int, ...] = field(repr=False)

    def angle(self, n: int) -> Fraction | None:
        """Exact angle theta with chi(n) = e(theta), or None when gcd(n, q) > 1."""
        k = self.numerators[n % self.modulus]
        return None if k == NON_UNIT else Fraction(k, self.denominator)

    @property
    def values(self) -> tuple[Fraction | None, ...]:
        return tuple(self.angle(n) for n in range(self.modulus))

    def value(self, n: int, prec: int = 53) -> mpmath.mpc:
        k = self.numerators[n % self.modulus]
        if k == NON_UNIT:
            return mpmath.mpc(0)
        return _roots(self.denominator, prec)[k]

    def __call__(self, n: int) -> complex:
        return complex(self.value(n))

    @cached_property
    def conductor(self) -> int:
        return conductor(self)

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    @property
    def is_even(self) -> bool:
        return is_even(self)

    @property
    def is_principal(self) -> bool:
        return all(k in (0, NON_UNIT) for k in self.numerators)

    @property
    def is_real(self) -> bool:
        return all(k == NON_UNIT or (2 * k) % self.denominator == 0 for k in self.numerators)

    @property
    def order(self) -> int:
        g = self.denominator
        for k in self.numerators:
            if k != NON_UNIT:
                g = math.gcd(g, k)
        return self.denominator // g

    def conj(self) -> "DirichletCharacter":
        comps = _unit_group(self.modulus)
        idx = tuple((-e) % c.order for e, c in zip(self.index, comps))
        nums = tuple(k if k == NON_UNIT else (-k) % self.denominator for k in self.numerators)
        return DirichletCharacter(self.modulus, idx, self.denominator, nums)

    def label(self) -> str:
        return f"{self.modulus}.{'.'.join(map(str, self.index)) or '0'}"


@lru_cache(maxsize=64)
def _roots(n: int, prec: int) -> tuple[mpmath.mpc, ...]:
    """e(k/n) for k = 0..n-1 at the given binary precision."""
    with mpmath.workprec(prec + 10):
        out = [mpmath.expjpi(mpmath.mpf(2 * k) / n) for k in range(n)]
    # snap the exactly real/imaginary ones
    for k in range(n):
        if (4 * k) % n == 0:
            out[k] = mpmath.mpc([1, 0, -1, 0][(4 * k // n) % 4], [0, 1, 0, -1][(4 * k // n) % 4])
    return tuple(out)


def _build(q: int, index: Sequence[int]) -> DirichletCharacter:
    comps = _unit_group(q)
    N = math.lcm(*(c.order for c in comps)) if comps else 1
    nums = np.zeros(q, dtype=np.int64)
    for e, c in zip(index, comps):
        nums += e * (N // c.order) * c.dlog
    nums %= N
    nums[~_units_mask(q)] = NON_UNIT
    return DirichletCharacter(q, tuple(int(e) for e in index), N, tuple(nums.tolist()))


def enumerate_characters(q: int) -> list[DirichletCharacter]:
    """All phi(q) characters mod q, lexicographic in the generator exponents."""
    if q < 1:
        raise ValidationError("modulus must be >= 1")
    comps = _unit_group(q)
    return [_build(q, idx) for idx in itertools.product(*(range(c.order) for c in comps))]


def character(q: int, number: int) -> DirichletCharacter:
    """The character at position `number` of enumerate_characters(q)."""
    chars = enumerate_characters(q)
    if not 0 <= number < len(chars):
        raise ValidationError(f"character index {number} out of range for q={q}")
    return chars[number]


def conductor(chi: DirichletCharacter) -> int:
    """Smallest d | q such that chi is trivial on units that are 1 mod d."""
    q = chi.modulus
    nums = np.asarray(chi.numerators)
    for d in divisors(q):
        sel = nums[1::d]
        if np.all((sel == 0) | (sel == NON_UNIT)):
            return d
    return q


def is_even(chi: DirichletCharacter) -> bool:
    """chi(-1) == 1."""
    return chi.numerators[(chi.modulus - 1) % chi.modulus] == 0


@dataclass(frozen=True)
class GaussSumValue:
    value: mpmath.mpc
    character: DirichletCharacter
    prec: int

    @property
    def norm_residual(self) -> mpmath.mpf:
        with mpmath.workprec(self.prec):
            return abs(abs(self.value) ** 2 - self.character.modulus)


def gauss_sum(chi: DirichletCharacter, prec: int = 128) -> GaussSumValue:
    """G(1, chi) = sum_l chi(l) e(l/q)."""
    q = chi.modulus
    rc = _roots(chi.denominator, prec)
    rq = _roots(q, prec)
    with mpmath.workprec(prec + 10):
        total = mpmath.mpc(0)
        for l, k in enumerate(chi.numerators):
            if k != NON_UNIT:
                total += rc[k] * rq[l]
        # unary plus rounds to the current precision, so stay inside the block
        return GaussSumValue(+total, chi, prec)


def phi_star(q: int) -> int:
    """Number of primitive characters mod q, by the multiplicative formula."""
    out = 1
    for p, k in factorize(q).items():
        out *= p - 2 if k == 1 else p ** (k - 2) * (p - 1) ** 2
    return out


def phi_star_enumerated(q: int) -> int:
    return sum(1 for chi in enumerate_characters(q) if chi.is_primitive)


def phi_flat(q: int) -> int:
    """Number of even primitive characters mod q, by enumeration."""
    return sum(1 for chi in enumerate_characters(q) if chi.is_primitive and chi.is_even)


def parity_excess(q: int) -> int:
    """Sum of chi(-1) over primitive chi mod q (multiplicative)."""
    out = 1
    for p, k in factorize(q).items():
        if (p > 2 and k == 1) or (p == 2 and k == 2):
            out = -out
        else:
            return 0
    return out


def phi_flat_formula(q: int) -> int:
    """(phi*(q) + parity_excess(q)) / 2, the closed-form count of even primitives."""
    return (phi_star(q) + parity_excess(q)) // 2


def even_primitive_characters(q: int) -> list[DirichletCharacter]:
    return [chi for chi in enumerate_characters(q) if chi.is_primitive and chi.is_even]
