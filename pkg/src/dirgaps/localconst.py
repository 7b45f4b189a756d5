"""Euler products, local factors at and near zero shifts, and sieve sums.

Every truncated product reports a rigorous tail bound: each factor is
1 + O(p^-2) with an explicit constant, so the omitted primes change the
logarithm of the product by at most that constant times sum_{p > P} p^-2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath
import numpy as np

from .errors import PrecisionError, ValidationError
from .primes import prime_sieve

DEFAULT_PREC = 128
QUAD_NODES = 1 << 10


@dataclass(frozen=True)
class EulerProductEstimate:
    value: mpmath.mpf | mpmath.mpc
    P: int
    tail_bound: mpmath.mpf
    model: str


@lru_cache(maxsize=4)
def primes_upto(P: int) -> tuple[int, ...]:
    return tuple(prime_sieve(P).tolist())


def _polymul(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _binom_poly(k: int) -> list[Fraction]:
    """(1 - x)^k."""
    return [Fraction((-1) ** i * math.comb(k, i)) for i in range(k + 1)]


# factor polynomials in x = 1/p
A3_POLY = tuple(_polymul(_binom_poly(4), [Fraction(1), Fraction(4), Fraction(1)]))
A3L_POLY = tuple(_polymul(_binom_poly(5), [Fraction(c) for c in (1, 5, -5, 14, -15, 5, 4, -4, 1)]))


def _prime_square_tail(P: int) -> mpmath.mpf:
    """Upper bound for sum_{p > P} p^-2 (odd integers above P suffice)."""
    return mpmath.mpf(1) / (2 * (P - 1))


def _log_tail_to_abs(value, log_bound) -> mpmath.mpf:
    return abs(value) * mpmath.expm1(log_bound)


def _poly_product(poly: Sequence[Fraction], P: int, prec: int, model: str) -> EulerProductEstimate:
    if P < 100:
        raise ValidationError("prime cutoff must be at least 100")
    if poly[1] != 0:
        raise ValidationError("factor must be 1 + O(p^-2)")
    with mpmath.workprec(prec + 20):
        cs = [mpmath.mpf(c.numerator) / c.denominator for c in poly]
        v = mpmath.mpf(1)
        for p in primes_upto(P):
            x = mpmath.mpf(1) / p
            f = mpmath.mpf(0)
            for c in reversed(cs):
                f = f * x + c
            v *= f
        # |f - 1| <= c1 / p^2 for p > P, then |log f| <= c2 / p^2
        c1 = sum(abs(mpmath.mpf(c.numerator) / c.denominator) * mpmath.mpf(P) ** (2 - k)
                 for k, c in enumerate(poly) if k >= 2)
        c2 = c1 / (1 - c1 / mpmath.mpf(P) ** 2)
        tail = _log_tail_to_abs(v, c2 * _prime_square_tail(P))
        return EulerProductEstimate(+v, P, tail, model)


def a3(P: int, prec: int = DEFAULT_PREC) -> EulerProductEstimate:
    """prod_{p <= P} (1 - 1/p)^4 (1 + 4/p + 1/p^2)."""
    return _poly_product(A3_POLY, P, prec, "a3")


def a3_L(P: int, prec: int = DEFAULT_PREC) -> EulerProductEstimate:
    """prod_{p <= P} (1 - 1/p)^5 (1 + 5/p - 5/p^2 + ... + 1/p^8)."""
    return _poly_product(A3L_POLY, P, prec, "a3_L")


def a3_factor(p: int) -> Fraction:
    return sum(c * Fraction(1, p) ** k for k, c in enumerate(A3_POLY))


def a3_L_factor(p: int) -> Fraction:
    return sum(c * Fraction(1, p) ** k for k, c in enumerate(A3L_POLY))


def _shifts(S) -> list[complex]:
    xs = [complex(s) for s in S]
    if len(xs) != 3:
        raise ValidationError("need three shifts")
    if any(abs(s.real) >= 0.25 for s in xs):
        raise ValidationError("local factors need |Re shift| < 1/4")
    return xs


def _max_re(*sets) -> float:
    return max(abs(s.real) for S in sets for s in S)


def _h_sequence(v: Sequence, n: int) -> list:
    """Complete homogeneous symmetric polynomials h_0..h_n of three variables."""
    e1 = v[0] + v[1] + v[2]
    e2 = v[0] * v[1] + v[0] * v[2] + v[1] * v[2]
    e3 = v[0] * v[1] * v[2]
    h = [mpmath.mpc(1)]
    for g in range(1, n + 1):
        x = e1 * h[g - 1]
        if g >= 2:
            x -= e2 * h[g - 2]
        if g >= 3:
            x += e3 * h[g - 3]
        h.append(x)
    return h


@dataclass(frozen=True)
class LocalFactor:
    value: mpmath.mpc
    degree: int
    tail_bound: mpmath.mpf


def _bp_tail(u: mpmath.mpf, G: int) -> mpmath.mpf:
    """Bound for sum_{g > G} C(g+2,2)^2 u^g."""
    rho = ((mpmath.mpf(G + 4) / (G + 2)) ** 2) * u
    if rho >= 1:
        return mpmath.inf
    return math.comb(G + 3, 2) ** 2 * u ** (G + 1) / (1 - rho)


def b_p_detail(A, B, p: int, cutoff: int | None = None, prec: int = DEFAULT_PREC) -> LocalFactor:
    """e(0 theta)-coefficient of the six geometric series, sum_g h_g(x) h_g(y).

    x_i = p^{-1/2 - alpha_i}, y_j = p^{-1/2 - beta_j}.  With cutoff=None the
    degree grows until the tail bound is below 2^-prec.
    """
    A, B = _shifts(A), _shifts(B)
    if cutoff is not None and cutoff < 10:
        raise ValidationError("cutoff must be at least 10")
    with mpmath.workprec(prec + 20):
        lp = mpmath.log(p)
        x = [mpmath.exp(-(mpmath.mpf(0.5) + mpmath.mpc(a)) * lp) for a in A]
        y = [mpmath.exp(-(mpmath.mpf(0.5) + mpmath.mpc(b)) * lp) for b in B]
        u = mpmath.power(p, -1 + 2 * mpmath.mpf(_max_re(A, B)))
        if cutoff is None:
            target = mpmath.ldexp(1, -prec)
            G = 10
            while _bp_tail(u, G) > target:
                G += 10
                if G > 20000:
                    raise PrecisionError("b_p series converges too slowly")
        else:
            G = cutoff
        hx, hy = _h_sequence(x, G), _h_sequence(y, G)
        val = mpmath.fsum(a * b for a, b in zip(hx, hy))
        return LocalFactor(val, G, _bp_tail(u, G))


def b_p(A, B, p: int, cutoff: int | None = None, prec: int = DEFAULT_PREC) -> mpmath.mpc:
    return b_p_detail(A, B, p, cutoff, prec).value


def b_p_exact(p: int) -> Fraction:
    """b_p at zero shifts as an exact rational.

    Then h_g(x) h_g(y) = C(g+2,2)^2 p^-g, a degree-4 polynomial in g, so the
    generating function is N(u)/(1-u)^5 with deg N <= 4; N is read off from
    the first five terms.
    """
    first = [Fraction(math.comb(g + 2, 2) ** 2) for g in range(5)]
    N = _polymul(_binom_poly(5), first)[:5]
    u = Fraction(1, p)
    return sum(c * u**k for k, c in enumerate(N)) / (1 - u) ** 5


def b_p_quadrature(A, B, p: int, nodes: int = QUAD_NODES, prec: int = DEFAULT_PREC) -> mpmath.mpc:
    """Trapezoid rule in theta over one period (spectrally accurate)."""
    A, B = _shifts(A), _shifts(B)
    with mpmath.workprec(prec + 20):
        lp = mpmath.log(p)
        x = [mpmath.exp(-(mpmath.mpf(0.5) + mpmath.mpc(a)) * lp) for a in A]
        y = [mpmath.exp(-(mpmath.mpf(0.5) + mpmath.mpc(b)) * lp) for b in B]
        total = mpmath.mpc(0)
        for k in range(nodes):
            e = mpmath.expjpi(mpmath.mpf(2 * k) / nodes)
            ei = 1 / e
            v = mpmath.mpc(1)
            for xa in x:
                v /= 1 - e * xa
            for yb in y:
                v /= 1 - ei * yb
            total += v
        return total / nodes


def z_p_inv(A, B, p: int, prec: int = DEFAULT_PREC) -> mpmath.mpc:
    """prod over alpha, beta of (1 - p^{-1-alpha-beta})."""
    A, B = _shifts(A), _shifts(B)
    with mpmath.workprec(prec + 20):
        lp = mpmath.log(p)
        v = mpmath.mpc(1)
        for a in A:
            for b in B:
                lam = mpmath.mpc(a) + mpmath.mpc(b)
                if lam == -1:
                    raise ValidationError("1 + alpha + beta = 0")
                v *= 1 - mpmath.exp(-(1 + lam) * lp)
        return v


def _majorant(u: mpmath.mpf) -> mpmath.mpf:
    """Coefficientwise majorant of b_p z_p_inv as a series in u = p^{-1+2 sigma}."""
    return (1 + 4 * u + u * u) / (1 - u) ** 5 * (1 + u) ** 9


def a_partial(A, B, P: int, prec: int = DEFAULT_PREC) -> EulerProductEstimate:
    """prod_{p <= P} b_p z_p_inv with a rigorous tail bound.

    The linear terms of b_p and z_p_inv cancel, so |f_p - 1| is at most the
    majorant minus its first two terms, which is K u^2 for p > P.
    """
    A, B = _shifts(A), _shifts(B)
    sigma = _max_re(A, B)
    if 4 * sigma >= 1:
        raise ValidationError("tail bound needs |Re shift| < 1/4")
    with mpmath.workprec(prec + 20):
        v = mpmath.mpc(1)
        for p in primes_upto(P):
            v *= b_p(A, B, p, prec=prec) * z_p_inv(A, B, p, prec)
        e = 1 - 2 * mpmath.mpf(sigma)
        u0 = mpmath.power(P, -e)
        K = (_majorant(u0) - 1 - 18 * u0) / u0**2
        # sum_{n > P} n^{-2e} <= P^{1-2e}/(2e-1)
        s = K * mpmath.power(P, 1 - 2 * e) / (2 * e - 1)
        if K * u0**2 >= 1:
            raise PrecisionError("prime cutoff too small for the tail bound")
        log_bound = s / (1 - K * u0**2)
        return EulerProductEstimate(v, P, _log_tail_to_abs(v, log_bound), "a_partial")


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    residuals: np.ndarray
    xs: np.ndarray
    h2_over_t: float
    x_max: int


def _multiplicative_tables(x: int) -> tuple[np.ndarray, np.ndarray]:
    """phi*(q) prod g(p) and E(q) prod g(p) for q <= x, g(p) = (1-1/p)^5/(1+4/p+1/p^2).

    E is the multiplicative function with E(p) = -1 (p odd), E(4) = -1 and 0
    at other prime powers, so that phi_flat = (phi* + E)/2.
    """
    F = np.ones(x + 1)
    Eg = np.ones(x + 1)
    for p in prime_sieve(x).tolist():
        g = (1 - 1 / p) ** 5 / (1 + 4 / p + 1 / p**2)
        if p * p > x:
            F[p::p] *= (p - 2) * g
            Eg[p::p] *= -g
            continue
        idx = np.arange(p, x + 1, p)
        v = np.ones(len(idx), dtype=np.int64)
        m = idx // p
        while True:
            mask = m % p == 0
            if not mask.any():
                break
            v[mask] += 1
            m[mask] //= p
        kmax = int(v.max())
        fvals = np.array([0.0] + [(p - 2 if k == 1 else p**k * (1 - 1 / p) ** 2) * g for k in range(1, kmax + 1)])
        evals = np.array([0.0] + [(-g if (k == 1 and p > 2) or (p == 2 and k == 2) else 0.0)
                                  for k in range(1, kmax + 1)])
        F[idx] *= fvals[v]
        Eg[idx] *= evals[v]
    F[0] = Eg[0] = 0.0
    return F, Eg


def slope_fit(x_max: int, points: int = 40, x_min: int = 1000) -> SlopeFit:
    """Least-squares fit of S(x) = sum_{q <= x} phi*(q)/q^2 prod g(p) against log x.

    Also returns H_2(x_max)/x_max with H_2(t) = sum_{q <= t} phi_flat(q)/q prod g(p).
    """
    if x_max < 10_000:
        raise ValidationError("x_max must be at least 10^4")
    F, Eg = _multiplicative_tables(x_max)
    q = np.arange(x_max + 1, dtype=float)
    q[0] = 1.0
    S = np.cumsum(F / q**2)
    xs = np.unique(np.logspace(math.log10(x_min), math.log10(x_max), points).astype(np.int64))
    slope, intercept = np.polyfit(np.log(xs), S[xs], 1)
    resid = S[xs] - (slope * np.log(xs) + intercept)
    H2 = math.fsum(((F + Eg) / 2 / q)[1:].tolist())
    return SlopeFit(float(slope), float(intercept), resid, xs, H2 / x_max, x_max)
