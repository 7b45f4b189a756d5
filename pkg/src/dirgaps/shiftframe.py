"""Shift sets, the twenty subset pairs and the eps-Laurent main-term engine.

In the normalised frame every shift is multiplied by log Q, so the base
shifts are i*kappa*(1, 0, -1) on both sides and the regularising
perturbation is eps*(1, 2, 4) with eps = delta log Q.  Each main-term
object Q^{delta_XY} prod 1/(x+y) then becomes a Q-free Laurent series in
eps; the sum over all twenty pairs is analytic at eps = 0 and its constant
term is the sought coefficient.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Generic, Sequence, TypeVar

import mpmath

from .errors import CancellationError, PoleError, ValidationError
from .laurent import EpsSeries, HyperDual
from .lfunc import DEFAULT, PrecisionConfig, hurwitz_zeta

E = TypeVar("E")

DEFAULT_ORDER = 12
DEFAULT_PREC = 256

# derivative directions (A-index, B-index) for the nine differentiated cases;
# A_3, B_4 belong to W(t - h), A_2, B_5 to W(t) and A_1, B_6 to W(t + h)
CASE_DIRECTIONS: dict[int, tuple[int, int]] = {
    1: (2, 5), 2: (3, 6), 3: (1, 4), 4: (3, 4), 5: (1, 6),
    6: (3, 5), 7: (2, 4), 8: (1, 5), 9: (2, 6),
}


@dataclass(frozen=True)
class ShiftSet:
    """Three complex shifts with |Re| < 1/4."""

    shifts: tuple[complex, complex, complex]

    def __post_init__(self) -> None:
        if len(self.shifts) != 3:
            raise ValidationError("a shift set has exactly three elements")
        if any(abs(complex(s).real) >= 0.25 for s in self.shifts):
            raise ValidationError("shifts need |Re| < 1/4")

    @classmethod
    def of(cls, *xs) -> "ShiftSet":
        return cls(tuple(xs))

    @classmethod
    def zero(cls) -> "ShiftSet":
        return cls((0j, 0j, 0j))

    def __iter__(self):
        return iter(self.shifts)

    def __len__(self) -> int:
        return 3

    def __getitem__(self, i):
        return self.shifts[i]


@dataclass(frozen=True)
class ShiftForm:
    """Symbolic normalised shift sign*(i*kappa*im + eps*eps_mult), tagged with its coordinate index."""

    im: int
    eps: int
    index: int
    sign: int = 1

    def __neg__(self) -> "ShiftForm":
        return ShiftForm(-self.im, -self.eps, self.index, -self.sign)


BASE_A = (ShiftForm(1, 1, 1), ShiftForm(0, 2, 2), ShiftForm(-1, 4, 3))
BASE_B = (ShiftForm(1, 1, 4), ShiftForm(0, 2, 5), ShiftForm(-1, 4, 6))


@dataclass(frozen=True)
class SubsetPair(Generic[E]):
    S: tuple[int, ...]
    T: tuple[int, ...]
    X: tuple[E, ...]
    Y: tuple[E, ...]

    def complement(self, A: Sequence[E], B: Sequence[E]) -> "SubsetPair[E]":
        return _make_pair(A, B, tuple(i for i in range(3) if i not in self.S),
                          tuple(j for j in range(3) if j not in self.T))


def _make_pair(A, B, S, T) -> SubsetPair:
    X = tuple(A[i] for i in range(3) if i not in S) + tuple(-B[j] for j in T)
    Y = tuple(B[j] for j in range(3) if j not in T) + tuple(-A[i] for i in S)
    return SubsetPair(tuple(S), tuple(T), X, Y)


def subset_pairs(A: Sequence[E], B: Sequence[E]) -> list[SubsetPair[E]]:
    """All (S, T) with |S| = |T|, ordered by size then by index masks."""
    if len(A) != 3 or len(B) != 3:
        raise ValidationError("need |A| = |B| = 3")
    out = []
    for k in range(4):
        for S in itertools.combinations(range(3), k):
            for T in itertools.combinations(range(3), k):
                out.append(_make_pair(A, B, S, T))
    return out


def delta_xy(X: Sequence, Y: Sequence):
    """Half the sum of all six shifts."""
    if len(X) != 3 or len(Y) != 3:
        raise ValidationError("need |X| = |Y| = 3")
    return (sum(X) + sum(Y)) / 2


def _term(pair: SubsetPair[ShiftForm], kappa, order: int, dirs: tuple[int, int] | None) -> HyperDual:
    i, j = dirs if dirs else (0, 0)

    def d(*forms: ShiftForm) -> tuple[int, int]:
        return (sum(f.sign for f in forms if f.index == i), sum(f.sign for f in forms if f.index == j))

    ik = mpmath.mpc(0, kappa)
    sums = [(x, y) for x in pair.X for y in pair.Y]
    poles = sum(1 for x, y in sums if x.im + y.im == 0)
    work = order + poles + (2 if dirs else 0)
    allf = pair.X + pair.Y
    di, dj = d(*allf)
    term = HyperDual.exp_linear(ik * sum(f.im for f in allf) / 2, mpmath.mpf(sum(f.eps for f in allf)) / 2,
                                mpmath.mpf(di) / 2, mpmath.mpf(dj) / 2, work)
    for x, y in sums:
        c0 = (x.im + y.im) * ik
        c1 = x.eps + y.eps
        if c1 == 0:
            raise PoleError("x + y vanishes identically in eps")
        if c0 == 0 and kappa == 0:
            raise PoleError("kappa = 0 collapses the base shifts")
        a, b = d(x, y)
        term = term * HyperDual.inv_linear(c0, c1, a, b, work)
    return term


def r_term_series(pair: SubsetPair[ShiftForm], kappa, order: int = DEFAULT_ORDER,
                  prec: int = DEFAULT_PREC, dirs: tuple[int, int] | None = None) -> EpsSeries:
    """Normalised Q^{delta_XY} prod 1/(x+y) as a Laurent series in eps.

    With `dirs = (i, j)` the mixed derivative in normalised coordinates
    i and j is returned instead.
    """
    with mpmath.workprec(prec):
        t = _term(pair, mpmath.mpf(kappa), order, dirs)
        return (t.mixed() if dirs else t.f).truncate(order)


@dataclass(frozen=True)
class OracleResult:
    value: mpmath.mpf
    series: EpsSeries
    principal_residual: mpmath.mpf
    imag_residual: mpmath.mpf


def r_sum_series(kappa, order: int = DEFAULT_ORDER, prec: int = DEFAULT_PREC,
                 dirs: tuple[int, int] | None = None) -> OracleResult:
    """Sum of all twenty term series with cancellation diagnostics (unchecked)."""
    if not kappa > 0:
        raise ValidationError("kappa must be positive")
    if dirs and not all(1 <= d <= 6 for d in dirs):
        raise ValidationError("derivative directions must lie in 1..6")
    with mpmath.workprec(prec):
        total = EpsSeries.sum(r_term_series(p, kappa, order, prec, dirs) for p in subset_pairs(BASE_A, BASE_B))
        c0 = total[0]
        return OracleResult(c0.real, total, total.principal_max(), abs(c0.imag))


def _checked(res: OracleResult, prec: int) -> mpmath.mpf:
    limit = mpmath.ldexp(1, -prec // 2)
    if res.principal_residual >= limit:
        raise CancellationError(f"negative eps powers survive: {mpmath.nstr(res.principal_residual, 3)}")
    if res.imag_residual >= limit:
        raise CancellationError(f"constant term not real: {mpmath.nstr(res.imag_residual, 3)}")
    return res.value


def r_sum_eps0(kappa, order: int = DEFAULT_ORDER, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """Constant eps-coefficient of the twenty-term sum: the C0 oracle."""
    return _checked(r_sum_series(kappa, order, prec), prec)


def r_sum_deriv_eps0(kappa, dir_i: int, dir_j: int, order: int = DEFAULT_ORDER,
                     prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """Constant eps-coefficient of d^2/(da_i da_j) of the sum, in normalised coordinates."""
    return _checked(r_sum_series(kappa, order, prec, (dir_i, dir_j)), prec)


def p_vs_r_ratio(pair: SubsetPair[complex], Q, cfg: PrecisionConfig = DEFAULT) -> mpmath.mpc:
    """(Q/pi)^delta prod zeta(1+x+y) divided by Q^delta prod 1/(x+y)."""
    with mpmath.workprec(cfg.prec + 10):
        Q = mpmath.mpf(Q)
        d = mpmath.mpc(delta_xy(pair.X, pair.Y))
        P = mpmath.power(Q / mpmath.pi, d)
        R = mpmath.power(Q, d)
        for x in pair.X:
            for y in pair.Y:
                lam = mpmath.mpc(x) + mpmath.mpc(y)
                if lam == 0:
                    raise PoleError("x + y = 0 puts zeta at its pole")
                P *= _zeta1(1 + lam, cfg)
                R /= lam
        return P / R


def _zeta1(s, cfg: PrecisionConfig) -> mpmath.mpc:
    return hurwitz_zeta(s, 1, cfg)
