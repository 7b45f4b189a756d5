"""Exact trig-Laurent expressions in kappa and the kappa-coefficients.

An expression is a finite sum of rational multiples of cos(m kappa)/kappa^j
and sin(m kappa)/kappa^j.  Removing the principal part at kappa = 0 (Macl)
leaves an entire function; it is evaluated by its exact Taylor series near
zero and directly elsewhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

import mpmath

from .errors import PrecisionError, SolverError, ValidationError

TAYLOR_ORDER = 40
THRESHOLD = 0.5
DEFAULT_PREC = 128

Key = tuple[str, int, int]  # (kind, m, j) for trig(m kappa) / kappa^j


@dataclass(frozen=True)
class TrigLaurentExpr:
    terms: Mapping[Key, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        canon: dict[Key, Fraction] = {}
        for (kind, m, j), c in self.terms.items():
            if kind not in ("cos", "sin"):
                raise ValidationError(f"unknown kind {kind!r}")
            if m < 0:
                # cos is even, sin is odd
                m, c = -m, (c if kind == "cos" else -c)
            if kind == "sin" and m == 0:
                continue
            key = (kind, m, j)
            canon[key] = canon.get(key, Fraction(0)) + Fraction(c)
        object.__setattr__(self, "terms", {k: v for k, v in sorted(canon.items()) if v != 0})

    @classmethod
    def of(cls, items: Iterable[tuple]) -> "TrigLaurentExpr":
        """Build from (coef, kind, m, j) tuples."""
        out: dict[Key, Fraction] = {}
        for c, kind, m, j in items:
            out[(kind, m, j)] = out.get((kind, m, j), Fraction(0)) + Fraction(c)
        return cls(out)

    def __add__(self, other: "TrigLaurentExpr") -> "TrigLaurentExpr":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return TrigLaurentExpr(out)

    def __mul__(self, c) -> "TrigLaurentExpr":
        c = Fraction(c)
        return TrigLaurentExpr({k: c * v for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __neg__(self) -> "TrigLaurentExpr":
        return self * -1

    def __sub__(self, other: "TrigLaurentExpr") -> "TrigLaurentExpr":
        return self + (-other)

    def __eq__(self, other) -> bool:
        return isinstance(other, TrigLaurentExpr) and dict(self.terms) == dict(other.terms)

    def __hash__(self) -> int:
        return hash(tuple(self.terms.items()))

    @property
    def max_pole(self) -> int:
        return max((j for (_, _, j) in self.terms), default=0)

    def power_coefficients(self, n_max: int) -> dict[int, Fraction]:
        """Exact coefficients of kappa^p for p <= n_max."""
        out: dict[int, Fraction] = {}
        for (kind, m, j), c in self.terms.items():
            start = 0 if kind == "cos" else 1
            for k in range(start, n_max + j + 1, 2):
                if m == 0 and k > 0:
                    break
                sign = -1 if (k // 2) % 2 else 1
                coef = c * sign * Fraction(m**k, math.factorial(k))
                out[k - j] = out.get(k - j, Fraction(0)) + coef
        return {p: v for p, v in sorted(out.items()) if v != 0}

    def evaluate(self, kappa) -> mpmath.mpf:
        kappa = mpmath.mpf(kappa)
        total = mpmath.mpf(0)
        for (kind, m, j), c in self.terms.items():
            f = mpmath.cos if kind == "cos" else mpmath.sin
            total += mpmath.mpf(c.numerator) / c.denominator * f(m * kappa) / kappa**j
        return total


def principal_part(e: TrigLaurentExpr) -> dict[int, Fraction]:
    """{j: c} such that the principal part is sum c / kappa^j, j >= 1."""
    return {-p: c for p, c in e.power_coefficients(-1).items() if p < 0}


@dataclass(frozen=True)
class MaclExpr:
    body: TrigLaurentExpr
    principal: dict[int, Fraction]
    taylor: tuple[Fraction, ...]

    @classmethod
    def of(cls, body: TrigLaurentExpr, order: int = TAYLOR_ORDER) -> "MaclExpr":
        pc = body.power_coefficients(order)
        return cls(body, principal_part(body), tuple(pc.get(n, Fraction(0)) for n in range(order + 1)))

    @property
    def at_zero(self) -> Fraction:
        return self.taylor[0]


@dataclass(frozen=True)
class MaclValue:
    value: mpmath.mpf
    regime: str
    tail_bound: mpmath.mpf


def _taylor_tail(e: MaclExpr, kappa: mpmath.mpf) -> mpmath.mpf:
    """Bound on the omitted Taylor terms, summed over the body's terms."""
    N = len(e.taylor) - 1
    total = mpmath.mpf(0)
    for (kind, m, j), c in e.body.terms.items():
        if m == 0:
            continue
        K = N + 1 + j
        ratio = m * kappa / (K + 1)
        if ratio >= 1:
            return mpmath.inf
        total += abs(mpmath.mpf(c.numerator) / c.denominator) * mpmath.mpf(m) ** K * kappa ** (K - j) \
            / mpmath.factorial(K) / (1 - ratio)
    return total


def macl_detail(e: MaclExpr, kappa, prec: int = DEFAULT_PREC, threshold: float = THRESHOLD) -> MaclValue:
    if kappa < 0:
        raise ValidationError("kappa must be non-negative")
    with mpmath.workprec(prec + 20):
        k = mpmath.mpf(kappa)
        if k < threshold:
            tail = _taylor_tail(e, k)
            if tail <= mpmath.ldexp(1, 8 - prec):
                v = mpmath.mpf(0)
                for c in reversed(e.taylor):
                    v = v * k + mpmath.mpf(c.numerator) / c.denominator
                return MaclValue(+v, "taylor", tail)
            if k == 0:
                raise PrecisionError("Taylor tail too large at kappa = 0")
        # cancellation against the principal part costs about max_pole*log2(1/kappa) bits
        guard = int(e.body.max_pole * max(0.0, -math.log2(float(k)))) + 20 if k < 1 else 0
        with mpmath.workprec(prec + 20 + guard):
            v = e.body.evaluate(k)
            for j, c in e.principal.items():
                v -= mpmath.mpf(c.numerator) / c.denominator / k**j
        return MaclValue(+v, "direct", mpmath.mpf(0))


def macl_eval(e: MaclExpr, kappa, prec: int = DEFAULT_PREC, threshold: float = THRESHOLD) -> mpmath.mpf:
    """Value of body minus principal part at kappa >= 0."""
    return macl_detail(e, kappa, prec, threshold).value


_F = Fraction

_BODIES: dict[int, list[tuple]] = {
    0: [(1, "cos", 1, 8), (1, "sin", 1, 9), (_F(1, 8), "cos", 2, 8), (_F(-1, 2), "sin", 2, 9)],
    1: [(_F(-1, 4), "cos", 1, 8), (_F(3, 4), "sin", 1, 9), (1, "cos", 1, 10), (-1, "sin", 1, 11),
        (_F(1, 96), "cos", 2, 8), (_F(-1, 8), "sin", 2, 9), (_F(-1, 2), "cos", 2, 10), (_F(1, 2), "sin", 2, 11)],
    2: [(_F(-3, 4), "sin", 1, 9), (_F(-11, 4), "cos", 1, 10), (_F(-21, 4), "sin", 1, 11),
        (_F(1, 32), "cos", 2, 8), (_F(-3, 8), "sin", 2, 9), (_F(-53, 32), "cos", 2, 10), (_F(21, 8), "sin", 2, 11)],
    4: [(_F(-1, 12), "cos", 1, 8), (_F(5, 4), "sin", 1, 9), (3, "cos", 1, 10), (5, "sin", 1, 11),
        (_F(-1, 32), "cos", 2, 8), (_F(3, 8), "sin", 2, 9), (_F(13, 8), "cos", 2, 10), (_F(-5, 2), "sin", 2, 11)],
    6: [(_F(1, 8), "cos", 1, 8), (_F(-3, 8), "sin", 1, 9), (_F(-5, 4), "cos", 1, 10), (_F(-3, 4), "sin", 1, 11),
        (_F(-1, 16), "cos", 2, 10), (_F(3, 8), "sin", 2, 11)],
}

# C3 = C2, C5 = C4, C7 = C8 = C9 = C6
ALIASES = {0: 0, 1: 1, 2: 2, 3: 2, 4: 4, 5: 4, 6: 6, 7: 6, 8: 6, 9: 6}


@lru_cache(maxsize=None)
def c_closed(which: int) -> MaclExpr:
    """Macl expression of the kappa-coefficient C_which (aliases resolved)."""
    if which not in ALIASES:
        raise ValidationError(f"no coefficient C{which}")
    return MaclExpr.of(TrigLaurentExpr.of(_BODIES[ALIASES[which]]))


def pair_contributions() -> list[TrigLaurentExpr]:
    """Per-pair contributions to C0 (complementary pairs combined, equal pairs merged)."""
    return [
        TrigLaurentExpr.of([(_F(5, 32), "cos", 2, 8), (_F(-5, 8), "sin", 2, 9)]),
        2 * TrigLaurentExpr.of([(_F(2, 5), "cos", 1, 8), (_F(-19, 20), "sin", 1, 9)]),
        2 * TrigLaurentExpr.of([(_F(1, 10), "cos", 1, 8), (_F(29, 20), "sin", 1, 9)]),
        TrigLaurentExpr.of([(_F(-1, 32), "cos", 2, 8), (_F(1, 8), "sin", 2, 9)]),
    ]


def assembly_identity() -> bool:
    """The pair contributions add up to the C0 body, coefficient by coefficient."""
    total = TrigLaurentExpr()
    for c in pair_contributions():
        total = total + c
    return total == c_closed(0).body and MaclExpr.of(total) == c_closed(0)


def rhs_combo(kappa, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """(kappa/pi)^2 (C1 + 2 C2 + 2 C4 + 4 C6)."""
    with mpmath.workprec(prec + 10):
        k = mpmath.mpf(kappa)
        s = (macl_eval(c_closed(1), k, prec) + 2 * macl_eval(c_closed(2), k, prec)
             + 2 * macl_eval(c_closed(4), k, prec) + 4 * macl_eval(c_closed(6), k, prec))
        return (k / mpmath.pi) ** 2 * s


def h_margin(kappa, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """C0 - rhs_combo: positive values contradict the gap assumption."""
    with mpmath.workprec(prec + 10):
        return macl_eval(c_closed(0), kappa, prec) - rhs_combo(kappa, prec)


@dataclass(frozen=True)
class KappaSolution:
    kappa_star: mpmath.mpf
    ratio_to_2pi: mpmath.mpf
    gap_multiplier: mpmath.mpf
    bracket: tuple[mpmath.mpf, mpmath.mpf]
    trace: tuple[tuple[mpmath.mpf, mpmath.mpf], ...]


def solve_kappa(tol: float = 1e-12, lo: float = 0.1, hi: float = 20.0, step: float = 0.1,
                prec: int = DEFAULT_PREC) -> KappaSolution:
    """Smallest positive root of h = C0 - rhs_combo by scan and bisection."""
    if not tol > 0:
        raise ValidationError("tol must be positive")
    with mpmath.workprec(prec + 10):
        n = int(round((hi - lo) / step))
        a = mpmath.mpf(lo)
        fa = h_margin(a, prec)
        bracket = None
        for i in range(1, n + 1):
            b = mpmath.mpf(lo) + i * mpmath.mpf(step)
            fb = h_margin(b, prec)
            if fb == 0:
                return _solution(b, (b, b), ())
            if (fa > 0) != (fb > 0):
                bracket = (a, b)
                break
            a, fa = b, fb
        if bracket is None:
            raise SolverError(f"no sign change of h on [{lo}, {hi}]")
        a, b = bracket
        trace = [(a, b)]
        while b - a > tol:
            m = (a + b) / 2
            fm = h_margin(m, prec)
            if fm == 0:
                a = b = m
                break
            if (fm > 0) == (fa > 0):
                a, fa = m, fm
            else:
                b = m
            trace.append((a, b))
        return _solution((a + b) / 2, bracket, tuple(trace))


def _solution(k, bracket, trace) -> KappaSolution:
    r = k / (2 * mpmath.pi)
    return KappaSolution(k, r, 3 * r, bracket, trace)
