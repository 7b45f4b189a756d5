"""Truncated Laurent series in one variable and a hyper-dual wrapper.

An EpsSeries stores coefficients c_val, c_val+1, ... and an absolute order N:
every coefficient of degree <= N is known, everything above is unknown.  An
exact series (e.g. 1/(c eps)) carries order EXACT and implicit zeros beyond
its stored coefficients.  Products keep the largest order that is still
fully determined, min(N_a + val_b, N_b + val_a).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import mpmath

EXACT = 1 << 30


@dataclass(frozen=True)
class EpsSeries:
    val: int
    coeffs: tuple
    order: int

    @classmethod
    def constant(cls, c, order: int = EXACT) -> "EpsSeries":
        return cls(0, (mpmath.mpc(c),), order)

    @classmethod
    def zero(cls, order: int = EXACT) -> "EpsSeries":
        return cls(0, (), order)

    @classmethod
    def inv_linear(cls, c0, c1, order: int) -> "EpsSeries":
        """1/(c0 + c1 eps); exact simple pole when c0 == 0."""
        if c0 == 0:
            if c1 == 0:
                raise ZeroDivisionError("1/(0 + 0 eps)")
            return cls(-1, (1 / mpmath.mpc(c1),), EXACT)
        c0 = mpmath.mpc(c0)
        r = -c1 / c0
        out = [1 / c0]
        for _ in range(order):
            out.append(out[-1] * r)
        return cls(0, tuple(out), order)

    @classmethod
    def exp_linear(cls, c0, c1, order: int) -> "EpsSeries":
        """exp(c0 + c1 eps)."""
        out = [mpmath.exp(mpmath.mpc(c0))]
        for n in range(1, order + 1):
            out.append(out[-1] * c1 / n)
        return cls(0, tuple(out), order)

    @property
    def top(self) -> int:
        """Highest stored degree."""
        return self.val + len(self.coeffs) - 1

    def __getitem__(self, k: int):
        if k > self.order:
            raise IndexError(f"coefficient {k} beyond truncation order {self.order}")
        i = k - self.val
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return mpmath.mpc(0)

    def coefficients(self, lo: int, hi: int) -> list:
        return [self[k] for k in range(lo, hi + 1)]

    def _trim(self) -> "EpsSeries":
        hi = min(self.top, self.order)
        cs = self.coeffs[: hi - self.val + 1] if hi >= self.val else ()
        return EpsSeries(self.val, tuple(cs), self.order)

    def __add__(self, other) -> "EpsSeries":
        if not isinstance(other, EpsSeries):
            other = EpsSeries.constant(other)
        order = min(self.order, other.order)
        lo = min(self.val, other.val)
        hi = min(order, max(self.top, other.top))
        cs = tuple(self._get0(k) + other._get0(k) for k in range(lo, hi + 1))
        return EpsSeries(lo, cs, order)

    __radd__ = __add__

    def _get0(self, k: int):
        i = k - self.val
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __neg__(self) -> "EpsSeries":
        return EpsSeries(self.val, tuple(-c for c in self.coeffs), self.order)

    def __sub__(self, other) -> "EpsSeries":
        return self + (-other)

    def scale(self, c) -> "EpsSeries":
        return EpsSeries(self.val, tuple(c * x for x in self.coeffs), self.order)

    def __mul__(self, other) -> "EpsSeries":
        if not isinstance(other, EpsSeries):
            return self.scale(other)
        if not self.coeffs or not other.coeffs:
            order = min(self.order + other.val, other.order + self.val)
            return EpsSeries(self.val + other.val, (), order)
        val = self.val + other.val
        order = min(self.order + other.val, other.order + self.val)
        hi = min(order, self.top + other.top)
        a, b = self.coeffs, other.coeffs
        la, lb = len(a), len(b)
        cs = []
        for n in range(hi - val + 1):
            s = 0
            for i in range(max(0, n - lb + 1), min(n, la - 1) + 1):
                s += a[i] * b[n - i]
            cs.append(s)
        return EpsSeries(val, tuple(cs), order)

    __rmul__ = __mul__

    def truncate(self, order: int) -> "EpsSeries":
        return EpsSeries(self.val, self.coeffs, min(order, self.order))._trim()

    def principal_max(self) -> mpmath.mpf:
        """Largest modulus among coefficients of negative degree."""
        return max((abs(self[k]) for k in range(self.val, 0)), default=mpmath.mpf(0))

    @staticmethod
    def sum(items: Iterable["EpsSeries"]) -> "EpsSeries":
        total = EpsSeries.zero()
        for s in items:
            total = total + s
        return total


@dataclass(frozen=True)
class HyperDual:
    """f + f_i e_i + f_j e_j + f_ij e_i e_j with e_i^2 = e_j^2 = 0.

    The e_ij part of a product carries the mixed second derivative.  A None
    component stands for zero and keeps first-order-free products cheap.
    """

    f: EpsSeries
    fi: EpsSeries | None = None
    fj: EpsSeries | None = None
    fij: EpsSeries | None = None

    def __mul__(self, o: "HyperDual") -> "HyperDual":
        def m(a, b):
            return None if a is None or b is None else a * b

        def add(*xs):
            xs = [x for x in xs if x is not None]
            if not xs:
                return None
            out = xs[0]
            for x in xs[1:]:
                out = out + x
            return out

        return HyperDual(
            self.f * o.f,
            add(m(self.fi, o.f), m(self.f, o.fi)),
            add(m(self.fj, o.f), m(self.f, o.fj)),
            add(m(self.fij, o.f), m(self.f, o.fij), m(self.fi, o.fj), m(self.fj, o.fi)),
        )

    def __add__(self, o: "HyperDual") -> "HyperDual":
        def add(a, b):
            if a is None:
                return b
            if b is None:
                return a
            return a + b

        return HyperDual(self.f + o.f, add(self.fi, o.fi), add(self.fj, o.fj), add(self.fij, o.fij))

    @classmethod
    def inv_linear(cls, c0, c1, di: int, dj: int, order: int) -> "HyperDual":
        """1/u with u = c0 + c1 eps + di e_i + dj e_j."""
        f = EpsSeries.inv_linear(c0, c1, order)
        if di == 0 and dj == 0:
            return cls(f)
        f2 = f * f
        fi = f2.scale(-di) if di else None
        fj = f2.scale(-dj) if dj else None
        fij = (f2 * f).scale(2 * di * dj) if di and dj else None
        return cls(f, fi, fj, fij)

    @classmethod
    def exp_linear(cls, c0, c1, di, dj, order: int) -> "HyperDual":
        """exp(c0 + c1 eps + di e_i + dj e_j)."""
        e = EpsSeries.exp_linear(c0, c1, order)
        return cls(e, e.scale(di) if di else None, e.scale(dj) if dj else None,
                   e.scale(di * dj) if di and dj else None)

    def mixed(self) -> EpsSeries:
        """Coefficient of e_i e_j, the mixed second derivative."""
        return self.fij if self.fij is not None else EpsSeries.zero(self.f.order)
