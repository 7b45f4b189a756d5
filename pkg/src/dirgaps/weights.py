"""Smooth weights in q and t, their indicator sandwiches and the Chernoff bound."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import log_ndtr, loggamma

from .errors import PrecisionError, ValidationError

QUAD_TOL = 1e-14
QUAD_FAIL = 1e-12
SANDWICH_SLACK = QUAD_TOL
KERNEL_HALF_WIDTH = 40.0  # in units of u; the Gaussian mass beyond is < erfc(40)


@dataclass(frozen=True)
class WeightParams:
    u: float = 0.01
    eps: float | None = None
    T: float = 10.0

    def __post_init__(self) -> None:
        if self.eps is None:
            object.__setattr__(self, "eps", 0.05 * self.T)
        if not 0 < self.u < 1 / 16:
            raise ValidationError("need 0 < u < 1/16")
        if not self.T > 0:
            raise ValidationError("need T > 0")
        if not 0 < self.eps < self.T / 10:
            raise ValidationError("need 0 < eps < T/10")


def g(x: float, u: float) -> float:
    """exp(-u^2/x) for x > 0 and 0 otherwise."""
    return math.exp(-u * u / x) if x > 0 else 0.0


def psi1(t: float, u: float) -> float:
    return g(t - 1.25, u) * g(1.75 - t, u)


def psi2(t: float, u: float) -> float:
    return math.exp(2 * u) * g(t - (1.25 - u), u) * g((1.75 + u) - t, u)


def _dg(x: float, u: float) -> float:
    return g(x, u) * u * u / (x * x) if x > 0 else 0.0


def dpsi1(t: float, u: float) -> float:
    return _dg(t - 1.25, u) * g(1.75 - t, u) - g(t - 1.25, u) * _dg(1.75 - t, u)


def dpsi2(t: float, u: float) -> float:
    a, b = t - (1.25 - u), (1.75 + u) - t
    return math.exp(2 * u) * (_dg(a, u) * g(b, u) - g(a, u) * _dg(b, u))


def gaussian_window(z: float, a: float, b: float, u: float) -> float:
    """(1/(sqrt(pi) u)) int_a^b exp(-(v - z)^2/u^2) dv by adaptive quadrature."""
    w = KERNEL_HALF_WIDTH * u
    lo, hi = max(a, z - w), min(b, z + w)
    if lo >= hi:
        return 0.0
    # in s = (v - z)/u the peak sits at 0 with unit width
    s0, s1 = (lo - z) / u, (hi - z) / u
    pts = [0.0] if s0 < 0 < s1 else None
    with warnings.catch_warnings():
        # QUADPACK flags roundoff when asked for ~1e-15; its estimate is pessimistic
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(lambda s: math.exp(-s * s), s0, s1, points=pts,
                        epsabs=QUAD_TOL / 10, epsrel=QUAD_TOL / 10, limit=200)
    if err > QUAD_FAIL:
        raise PrecisionError(f"quadrature error estimate {err:.2e} too large")
    return val / math.sqrt(math.pi)


def _correction(z: float, p: WeightParams) -> float:
    e = (3 * p.T) ** 2 - 1 / p.u - z * z
    return math.inf if e > 709 else math.exp(e)


def log_abs_phi1_bound(z: float, p: WeightParams) -> float:
    """log of window + correction, an upper bound for log|Phi_1(z)| that never overflows."""
    e = (3 * p.T) ** 2 - 1 / p.u - z * z
    r = math.sqrt(p.u)
    w = gaussian_window(z, p.T + p.eps + r, 2 * p.T - p.eps - r, p.u)
    return max(e, math.log(w) if w > 0 else -math.inf) + math.log(2)


def phi1(z: float, p: WeightParams) -> float:
    """Gaussian-smoothed indicator of [T+eps+sqrt u, 2T-eps-sqrt u] minus exp((3T)^2-1/u) exp(-z^2)."""
    r = math.sqrt(p.u)
    return gaussian_window(z, p.T + p.eps + r, 2 * p.T - p.eps - r, p.u) - _correction(z, p)


def phi2(z: float, p: WeightParams) -> float:
    """Gaussian-smoothed indicator of [T - sqrt u, 2T + sqrt u], scaled by 1/(1 - e^{-1/u})."""
    r = math.sqrt(p.u)
    return gaussian_window(z, p.T - r, 2 * p.T + r, p.u) / -math.expm1(-1 / p.u)


@dataclass(frozen=True)
class InequalityCheck:
    name: str
    ok: bool
    worst_margin: float
    samples: int


def sample_points(lo: float, hi: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Dense uniform grid plus n seeded random points."""
    return np.concatenate([np.linspace(lo, hi, n), rng.uniform(lo, hi, n)])


def _check(name: str, ts: np.ndarray, fn, bound, upper: bool) -> InequalityCheck:
    """upper: fn(t) <= bound(t); otherwise fn(t) >= bound(t)."""
    worst = math.inf
    for t in ts.tolist():
        f, b = fn(t), bound(t)
        m = (b - f) if upper else (f - b)
        if math.isnan(m):
            m = 0.0 if f == b else -math.inf
        worst = min(worst, m)
    return InequalityCheck(name, worst >= -SANDWICH_SLACK, worst, len(ts))


def _ind(lo: float, hi: float, closed_lo: bool = True):
    def f(t: float) -> float:
        return 1.0 if ((lo <= t) if closed_lo else (lo < t)) and t <= hi else 0.0
    return f


def sandwich_checks(p: WeightParams, samples: int = 10_000, seed: int = 0) -> list[InequalityCheck]:
    """All indicator sandwiches for Psi_1, Psi_2, Phi_1, Phi_2 on seeded grids."""
    rng = np.random.default_rng(seed)
    u, T, r = p.u, p.T, math.sqrt(p.u)
    tq = sample_points(0.5, 2.5, samples, rng)
    inner = sample_points(1.25 + u, 1.75 - u, samples, rng)
    tz = sample_points(-3 * T, 6 * T, samples, rng)
    mid = sample_points(T, 2 * T, samples, rng)
    env = sample_points(T - 2 * r, 2 * T + 2 * r, samples, rng)
    outside = np.concatenate([sample_points(-3 * T, T - 2 * r, samples // 2, rng),
                              sample_points(2 * T + 2 * r, 6 * T, samples // 2, rng)])
    out = [
        _check("psi1 <= 1(5/4,7/4]", tq, lambda t: psi1(t, u), _ind(1.25, 1.75, False), True),
        _check("psi2 >= 1(5/4,7/4]", tq, lambda t: psi2(t, u), _ind(1.25, 1.75, False), False),
        _check("psi1 >= exp(-2u) on [5/4+u,7/4-u]", inner, lambda t: psi1(t, u), lambda t: math.exp(-2 * u), False),
        _check("psi2 <= exp(2u) 1[5/4-u,7/4+u]", tq, lambda t: psi2(t, u),
               lambda t: math.exp(2 * u) * _ind(1.25 - u, 1.75 + u)(t), True),
        _check("phi1 <= 1[T+eps,2T-eps]", tz, lambda t: phi1(t, p), _ind(T + p.eps, 2 * T - p.eps), True),
        _check("phi2 >= 1[T,2T]", mid, lambda t: phi2(t, p), lambda t: 1.0, False),
        _check("phi2 <= 1/(1-exp(-1/u)) on [T-2sqrt u,2T+2sqrt u]", env, lambda t: phi2(t, p),
               lambda t: 1 / -math.expm1(-1 / u), True),
        _check("phi2 <= exp((3T)^2-1/u-t^2) off the envelope", outside, lambda t: phi2(t, p),
               lambda t: _correction(t, p), True),
    ]
    return out


@dataclass(frozen=True)
class ErfcCheck:
    x: float
    erfc: mpmath.mpf
    bound: mpmath.mpf
    ok: bool


def erfc_series(x, dps: int = 30) -> mpmath.mpf:
    """1 - erf(x) with erf from its Maclaurin series, at enough digits to absorb the cancellation."""
    x = mpmath.mpf(x)
    # terms grow to about e^{x^2} before decaying, and 1 - erf loses another e^{x^2}
    extra = int(2 * float(x * x) / math.log(10)) + 10
    with mpmath.workdps(dps + extra):
        x2 = x * x
        term = x
        s = mpmath.mpf(0)
        n = 0
        while True:
            add = term / (2 * n + 1)
            s += add
            if abs(add) < mpmath.mpf(10) ** (-(dps + extra)) * max(1, abs(s)):
                break
            n += 1
            term *= -x2 / n
        return +(1 - 2 / mpmath.sqrt(mpmath.pi) * s)


def erfc_bound_check(x: float) -> ErfcCheck:
    """erfc(x) <= exp(-x^2) for x >= 0."""
    if x < 0:
        raise ValidationError("x must be non-negative")
    e = erfc_series(x)
    b = mpmath.exp(-mpmath.mpf(x) ** 2)
    return ErfcCheck(x, e, b, bool(e <= b * (1 + mpmath.mpf(1e-12))))


@dataclass(frozen=True)
class Reasonableness:
    N1: float
    N2: float
    log_N3: dict[str, float] = field(default_factory=dict)


def reasonableness(p: WeightParams, n: int = 4001) -> Reasonableness:
    """Sampled sup of Psi, |Psi'| on [1, 2] and of log Phi(t) + t^2."""
    ts = np.linspace(1.0, 2.0, n).tolist()
    N1 = max(max(psi1(t, p.u), psi2(t, p.u)) for t in ts)
    N2 = max(max(abs(dpsi1(t, p.u)), abs(dpsi2(t, p.u))) for t in ts)
    zs = np.linspace(-3 * p.T, 6 * p.T, n).tolist()
    best1 = best2 = -math.inf
    for z in zs:
        best1 = max(best1, log_abs_phi1_bound(z, p) + z * z)
        v = phi2(z, p)
        if v > 0:
            best2 = max(best2, math.log(v) + z * z)
    logs = {"phi1": best1, "phi2": best2}
    return Reasonableness(N1, N2, logs)


def gamma_weight(t: float) -> float:
    """|Gamma((1/2 + it)/2)|^6."""
    return math.exp(6 * loggamma(complex(0.25, t / 2)).real)


@dataclass(frozen=True)
class TailCheck:
    Q: float
    log_integral: float
    log_bound: float
    ok: bool

    @property
    def integral(self) -> float:
        return math.exp(self.log_integral)

    @property
    def bound(self) -> float:
        return math.exp(self.log_bound)


def _log_erfc(x: float) -> float:
    return math.log(2) + float(log_ndtr(-x * math.sqrt(2)))


def _logsumexp(xs: list[float]) -> float:
    m = max(xs)
    if m == -math.inf:
        return m
    return m + math.log(math.fsum(math.exp(x - m) for x in xs))


def tail_check(p: WeightParams, Q: float, which: str = "phi2") -> TailCheck:
    """int_{log Q}^inf |Phi(t)| |Gamma((1/2+it)/2)|^6 dt against exp(-(log Q)^2/2).

    Quadrature up to 2T + 1; beyond that the Chernoff bound on the Gaussian
    window gives an explicit majorant for the rest.  Everything is carried in
    log form since the Phi_1 correction overflows double range for moderate T.
    """
    if Q < 20:
        raise ValidationError("Q must be at least 20")
    if which not in ("phi1", "phi2"):
        raise ValidationError(f"unknown weight {which!r}")
    r = math.sqrt(p.u)
    if which == "phi1":
        a, b, scale = p.T + p.eps + r, 2 * p.T - p.eps - r, 1.0
    else:
        a, b, scale = p.T - r, 2 * p.T + r, 1 / -math.expm1(-1 / p.u)
    lo = math.log(Q)
    hi = 2 * p.T + 1
    log_g6 = 6 * math.lgamma(0.25)
    logs = []
    # |Phi| <= scale * window + correction (phi1 only)
    if lo < hi:
        pts = sorted({x for x in (a, b) if lo < x < hi})
        total, _ = quad(lambda t: gaussian_window(t, a, b, p.u) * gamma_weight(t), lo, hi,
                        points=pts or None, limit=400)
        logs.append(math.log(scale * total) if total > 0 else -math.inf)
    # beyond hi: window <= (1/2) erfc((t - b)/u) <= e^{-((t-b)/u)^2}/2, and |Gamma|^6 <= Gamma(1/4)^6
    start = max(lo, hi)
    logs.append(log_g6 + math.log(scale * p.u * math.sqrt(math.pi) / 4) + _log_erfc((start - b) / p.u))
    if which == "phi1":
        # int_lo^inf exp(e - t^2) dt = exp(e) sqrt(pi)/2 erfc(lo)
        e = (3 * p.T) ** 2 - 1 / p.u
        logs.append(log_g6 + math.log(math.sqrt(math.pi) / 2) + _log_erfc(lo) + e)
    log_total = _logsumexp(logs)
    log_bound = -lo * lo / 2
    return TailCheck(Q, log_total, log_bound, log_total < log_bound)
