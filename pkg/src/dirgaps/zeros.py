"""Zeros of W(t, chi) on the critical line and the gap harnesses built on them."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Sequence

import mpmath
import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from .characters import DirichletCharacter
from .errors import EmptyReportError, ValidationError
from .lfunc import DEFAULT, PrecisionConfig, RootNumber, WFloat, root_number, w_value

REFINE_TOL = 1e-10


@dataclass(frozen=True)
class ZeroList:
    character: DirichletCharacter
    t_lo: float
    t_hi: float
    ordinates: tuple[float, ...]
    tolerance: float

    def __len__(self) -> int:
        return len(self.ordinates)


@dataclass(frozen=True)
class GapReport:
    raw: tuple[float, ...]
    normalized: tuple[float, ...]
    max_normalized: float
    min_normalized: float
    count: int


@dataclass(frozen=True)
class CountCheck:
    empirical: int
    predicted: float
    residual: float


@dataclass(frozen=True)
class GapChainResult:
    ok: bool
    witness: tuple[float, float] | None
    endpoints_ok: bool
    fzeros: tuple[float, ...]


@dataclass(frozen=True)
class WirtingerResult:
    lhs: float
    rhs: float
    ok: bool


def default_step(q: int, t: float) -> float:
    """An eighth of the mean zero spacing near height t."""
    return 2 * math.pi / (8 * math.log(q * (abs(t) + 3)))


def scan_grid(q: int, t_lo: float, t_hi: float, step: float | None = None) -> list[float]:
    if step is not None and step <= 0:
        raise ValidationError("step must be positive")
    grid = [t_lo]
    t = t_lo
    while t < t_hi:
        t = min(t_hi, t + (step if step is not None else default_step(q, t)))
        grid.append(t)
    return grid


class _W:
    """Picklable W evaluator with the root number computed once."""

    def __init__(self, chi: DirichletCharacter, cfg: PrecisionConfig, root: RootNumber):
        self.chi, self.cfg, self.root = chi, cfg, root

    def __call__(self, t: float) -> mpmath.mpf:
        return w_value(t, self.chi, self.cfg, self.root)

    def refine(self, bracket: tuple[float, float, mpmath.mpf, mpmath.mpf], tol: float = REFINE_TOL) -> float:
        """Illinois false position, stopping once the bracket is narrower than tol."""
        a, b, fa, fb = bracket
        side = 0
        while b - a > tol:
            c = float(b - fb * (b - a) / (fb - fa))
            if not a < c < b or (b - a) < 64 * tol:
                c = 0.5 * (a + b)
            fc = self(c)
            if fc == 0:
                return c
            if (fc > 0) == (fb > 0):
                b, fb = c, fc
                if side == -1:
                    fa /= 2
                side = -1
            else:
                a, fa = c, fc
                if side == 1:
                    fb /= 2
                side = 1
        return 0.5 * (a + b)


def _pmap(fn, items: list, workers: int) -> list:
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _sign_values(grid: list[float], fast: WFloat, w: "_W", workers: int) -> list:
    """W on the grid: float64 where the value clears its error estimate, cfg precision elsewhere."""
    fw = fast(grid)
    unsure = [i for i in range(len(grid)) if abs(fw.value[i]) <= 8 * fw.error[i] or fw.imag[i] > 8 * fw.error[i]]
    vals: list = fw.value.tolist()
    for i, v in zip(unsure, _pmap(w, [grid[i] for i in unsure], workers)):
        vals[i] = v
    return vals


class _Certify:
    """Float brentq to tol/4, then the bracket [r - tol/2, r + tol/2] is re-signed at cfg precision.

    With certify=False the float root is returned as is.
    """

    def __init__(self, w: "_W", fast: WFloat, tol: float, certify: bool = True):
        self.w, self.fast, self.tol, self.certify = w, fast, tol, certify

    def __call__(self, bracket) -> float:
        a, b, fa, fb = bracket
        f = lambda t: float(self.fast([t]).value[0])
        try:
            r = brentq(f, a, b, xtol=self.tol / 4) if f(a) * f(b) < 0 else None
        except ValueError:
            r = None
        if r is not None and not self.certify:
            return r
        if r is not None:
            lo, hi = max(a, r - self.tol / 2), min(b, r + self.tol / 2)
            wl, wh = self.w(lo), self.w(hi)
            if wl == 0:
                return lo
            if wh == 0:
                return hi
            if (wl > 0) != (wh > 0):
                return 0.5 * (lo + hi)
        return self.w.refine(bracket, self.tol)


def scan_zeros(chi: DirichletCharacter, t_lo: float, t_hi: float, step: float | None = None,
               cfg: PrecisionConfig = DEFAULT, tol: float = REFINE_TOL, workers: int = 1,
               method: str = "hybrid") -> ZeroList:
    """Sign changes of W on a grid over [t_lo, t_hi], each refined to width tol.

    method="hybrid" signs the grid in float64 (falling back to cfg precision
    near zero) and certifies every refined bracket at cfg precision;
    method="mp" does everything at cfg precision; method="float" skips the
    certification (for wide surveys, ordinates then rest on float64).  The grid is fixed before
    any work is split, so the result does not depend on the number of
    workers.  Zeros without a sign change are missed.
    """
    if method not in ("hybrid", "mp", "float"):
        raise ValidationError("method must be 'hybrid', 'mp' or 'float'")
    if t_lo > t_hi:
        raise ValidationError("t_lo must not exceed t_hi")
    if t_lo == t_hi:
        return ZeroList(chi, t_lo, t_hi, (), tol)
    w = _W(chi, cfg, root_number(chi, cfg))
    grid = scan_grid(chi.modulus, t_lo, t_hi, step)
    fast = None if method == "mp" else WFloat(chi, max(abs(t_lo), abs(t_hi)), w.root)
    vals = _pmap(w, grid, workers) if fast is None else _sign_values(grid, fast, w, workers)
    exact: list[float] = []
    brackets = []
    for i, (t, v) in enumerate(zip(grid, vals)):
        if v == 0:
            exact.append(t)
        elif i and vals[i - 1] != 0 and (v > 0) != (vals[i - 1] > 0):
            brackets.append((grid[i - 1], t, vals[i - 1], v))
    refine = partial(w.refine, tol=tol) if method == "mp" else _Certify(w, fast, tol, method == "hybrid")
    found = _pmap(refine, brackets, workers) + exact
    return ZeroList(chi, t_lo, t_hi, tuple(_dedup(sorted(found), tol)), tol)


def _dedup(xs: Sequence[float], tol: float) -> list[float]:
    out: list[float] = []
    for x in xs:
        if not out or x - out[-1] > tol:
            out.append(x)
    return out


def predicted_count(q: int, T: float) -> float:
    """Twice the main term of the count of zeros with 0 < t < T."""
    x = T / (2 * math.pi)
    return 2 * (x * math.log(T * q / (2 * math.pi)) - x)


def count_vs_formula(chi: DirichletCharacter, T: float, cfg: PrecisionConfig = DEFAULT,
                     step: float | None = None, workers: int = 1) -> CountCheck:
    """Zeros of W with |t| < T against the main term of the counting formula."""
    if T < 2:
        raise ValidationError("T must be at least 2")
    z = scan_zeros(chi, -T, T, step, cfg, workers=workers)
    emp = sum(1 for t in z.ordinates if abs(t) < T)
    pred = predicted_count(chi.modulus, T)
    return CountCheck(emp, pred, emp - pred)


def gap_report(z: ZeroList | Sequence[float], q: int) -> GapReport:
    """Consecutive gaps, also scaled by log(q)/(2 pi) so the mean spacing maps to 1."""
    ords = np.asarray(z.ordinates if isinstance(z, ZeroList) else z, dtype=float)
    if q < 2:
        raise ValidationError("normalisation needs q >= 2")
    if len(ords) < 2:
        raise EmptyReportError("need at least two ordinates")
    raw = np.diff(ords)
    norm = raw * math.log(q) / (2 * math.pi)
    return GapReport(tuple(raw.tolist()), tuple(norm.tolist()), float(norm.max()), float(norm.min()), len(raw))


def f_zeros(wzeros: Sequence[float], kappa: float, Q: float, T: float) -> list[float]:
    """Zeros of W(t-h)W(t)W(t+h) inside [T+h, 2T-h], h = kappa/log Q."""
    h = kappa / math.log(Q)
    cand = sorted({w + s * h for w in wzeros for s in (-1.0, 0.0, 1.0)})
    return [t for t in cand if T + h <= t <= 2 * T - h]


def gap_chain_check(wzeros: Sequence[float], kappa: float, Q: float, T: float,
                    tol: float = 1e-12) -> GapChainResult:
    """Do consecutive f-zeros in [T+h, 2T-h] lie within h of each other?

    `ok` covers the gaps only; `endpoints_ok` reports t_1 <= T+2h and
    t_N >= 2T-2h.  Fewer than two f-zeros is a vacuous pass for the gaps.
    """
    if Q <= 1:
        raise ValidationError("Q must exceed 1")
    h = kappa / math.log(Q)
    fz = f_zeros(wzeros, kappa, Q, T)
    witness = None
    for a, b in zip(fz, fz[1:]):
        if b - a > h + tol:
            witness = (a, b)
            break
    ends = bool(fz) and fz[0] <= T + 2 * h + tol and fz[-1] >= 2 * T - 2 * h - tol
    return GapChainResult(witness is None, witness, ends, tuple(fz))


def main_assumption_holds(wzeros: Sequence[float], kappa: float, Q: float, T: float,
                          tol: float = 1e-12) -> bool:
    """All gaps of W-zeros in [T, 2T], endpoint distances included, are at most 3h."""
    h = kappa / math.log(Q)
    pts = [T] + sorted(w for w in wzeros if T <= w <= 2 * T) + [2 * T]
    return all(b - a <= 3 * h + tol for a, b in zip(pts, pts[1:]))


def _derivative4(y: np.ndarray, dx: float) -> np.ndarray:
    d = np.empty_like(y)
    d[2:-2] = (-y[4:] + 8 * y[3:-1] - 8 * y[1:-3] + y[:-4]) / (12 * dx)
    d[0] = (-25 * y[0] + 48 * y[1] - 36 * y[2] + 16 * y[3] - 3 * y[4]) / (12 * dx)
    d[1] = (-3 * y[0] - 10 * y[1] + 18 * y[2] - 6 * y[3] + y[4]) / (12 * dx)
    d[-1] = (25 * y[-1] - 48 * y[-2] + 36 * y[-3] - 16 * y[-4] + 3 * y[-5]) / (12 * dx)
    d[-2] = (3 * y[-1] + 10 * y[-2] - 18 * y[-3] + 6 * y[-4] - y[-5]) / (12 * dx)
    return d


def wirtinger_check(samples: Sequence[float], a: float = 0.0, b: float = math.pi,
                    endpoint_tol: float = 1e-8) -> WirtingerResult:
    """Compare int y^2 with ((b-a)/pi)^2 int y'^2 for y sampled uniformly on [a, b]."""
    y = np.asarray(samples, dtype=float)
    if len(y) < 64:
        raise ValidationError("need at least 64 samples")
    if not b > a:
        raise ValidationError("need a < b")
    scale = max(1.0, float(np.abs(y).max()))
    if abs(y[0]) > endpoint_tol * scale or abs(y[-1]) > endpoint_tol * scale:
        raise ValidationError("samples must vanish at both endpoints")
    dx = (b - a) / (len(y) - 1)
    lhs = float(simpson(y * y, dx=dx))
    dy = _derivative4(y, dx)
    rhs = ((b - a) / math.pi) ** 2 * float(simpson(dy * dy, dx=dx))
    return WirtingerResult(lhs, rhs, lhs <= rhs * (1 + 1e-3))
