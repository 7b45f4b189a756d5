"""High-precision L-function values on and near the critical line.

Hurwitz zeta by Euler-Maclaurin with a rigorous remainder bound, Dirichlet L
by the Hurwitz decomposition, Gamma(s/2) by a shifted Stirling series, then
the completed function xi, the root number and the real rotation W(t).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from scipy.special import loggamma

from .characters import NON_UNIT, DirichletCharacter, gauss_sum
from .errors import BranchError, PoleError, PrecisionError, RealityError, ValidationError

GUARD_BITS = 16
MAX_M = 200_000


@dataclass(frozen=True)
class PrecisionConfig:
    """Working precision, Euler-Maclaurin shift M (None: automatic), Bernoulli count B."""

    prec: int = 128
    M: int | None = None
    B: int = 30
    tol: float | None = None

    def __post_init__(self) -> None:
        if self.prec < 32:
            raise ValidationError("precision must be at least 32 bits")
        if self.B < 1 or (self.M is not None and self.M < 1):
            raise ValidationError("M and B must be positive")
        if self.tol is not None and self.tol < 2.0 ** (GUARD_BITS - self.prec):
            raise ValidationError("tolerance below 2^(16 - prec) leaves no guard bits")

    @property
    def tolerance(self) -> mpmath.mpf:
        if self.tol is not None:
            return mpmath.mpf(self.tol)
        return mpmath.ldexp(1, GUARD_BITS - self.prec)


DEFAULT = PrecisionConfig()


@dataclass(frozen=True)
class CriticalValue:
    point: mpmath.mpc
    value: mpmath.mpc
    error: mpmath.mpf


@dataclass(frozen=True)
class RootNumber:
    K: mpmath.mpc
    sqrtK: mpmath.mpc
    branch: str


@lru_cache(maxsize=8)
def _bernoulli_coeffs(B: int, prec: int) -> tuple[mpmath.mpf, ...]:
    """B_{2k}/(2k)! for k = 1..B."""
    with mpmath.workprec(prec):
        return tuple(mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k) for k in range(1, B + 1))


def _em_bound(s: mpmath.mpc, N: mpmath.mpf, B: int) -> mpmath.mpf:
    """Bound on the Euler-Maclaurin remainder after B Bernoulli terms at N."""
    sigma = s.real
    e = sigma + 2 * B - 1
    if e <= 0:
        return mpmath.inf
    poch = mpmath.mpf(1)
    for j in range(2 * B):
        poch *= abs(s + j)
    return 4 * poch / (2 * mpmath.pi) ** (2 * B) * N ** (-e) / e


def _hurwitz(s, a, cfg: PrecisionConfig, regular: bool = False) -> tuple[mpmath.mpc, mpmath.mpf]:
    """Euler-Maclaurin value and remainder bound.

    With regular=True the result is zeta(s, a) - 1/(s - 1), finite at s = 1.
    """
    s = mpmath.mpc(s)
    if s == 1 and not regular:
        raise PoleError("Hurwitz zeta has a pole at s = 1")
    a = mpmath.mpf(a)
    if not 0 < a <= 1:
        raise ValidationError("Hurwitz parameter a must lie in (0, 1]")
    tol = cfg.tolerance
    if cfg.M is not None:
        M = cfg.M
        bound = _em_bound(s, M + a, cfg.B)
        if bound > tol:
            raise PrecisionError(f"M={M} gives remainder bound {mpmath.nstr(bound, 3)} > tolerance")
    else:
        M = max(20, math.ceil(1.3 * abs(float(s.imag))))
        bound = _em_bound(s, M + a, cfg.B)
        while bound > tol:
            M = math.ceil(1.5 * M)
            if M > MAX_M:
                raise PrecisionError("Euler-Maclaurin shift exceeds limit before meeting tolerance")
            bound = _em_bound(s, M + a, cfg.B)
    wp = cfg.prec + 10 + M.bit_length()
    with mpmath.workprec(wp):
        total = mpmath.fsum(mpmath.power(n + a, -s) for n in range(M))
        N = M + a
        NmS = mpmath.power(N, -s)
        if regular:
            # (N^{1-s} - 1)/(s - 1), continuous through s = 1
            lnN = mpmath.log(N)
            total += -lnN if s == 1 else mpmath.expm1(-(s - 1) * lnN) / (s - 1)
            total += NmS / 2
        else:
            total += N * NmS / (s - 1) + NmS / 2
        coeffs = _bernoulli_coeffs(cfg.B, wp)
        # d^{2k-1}/dx^{2k-1} x^{-s} up to sign: (s)_{2k-1} x^{-s-2k+1}
        poch = s
        xpow = NmS / N
        inv2 = 1 / (N * N)
        for k, c in enumerate(coeffs, start=1):
            total += c * poch * xpow
            poch *= (s + 2 * k - 1) * (s + 2 * k)
            xpow *= inv2
    return total, bound


def hurwitz_zeta(s, a, cfg: PrecisionConfig = DEFAULT) -> mpmath.mpc:
    """zeta(s, a) for 0 < a <= 1, absolute error within cfg.tolerance."""
    return _hurwitz(s, a, cfg)[0]


def _dirichlet(s, chi: DirichletCharacter, cfg: PrecisionConfig) -> tuple[mpmath.mpc, mpmath.mpf]:
    s = mpmath.mpc(s)
    q = chi.modulus
    if q == 1:
        return _hurwitz(s, 1, cfg)
    # characters sum to zero unless principal, so the 1/(s-1) parts cancel
    regular = not chi.is_principal
    with mpmath.workprec(cfg.prec + 10):
        total = mpmath.mpc(0)
        err = mpmath.mpf(0)
        for a in range(1, q):
            if chi.numerators[a] == NON_UNIT:
                continue
            z, b = _hurwitz(s, mpmath.mpf(a) / q, cfg, regular)
            total += chi.value(a, cfg.prec + 10) * z
            err += b
        scale = mpmath.power(q, -s)
        return total * scale, err * abs(scale)


def dirichlet_l(s, chi: DirichletCharacter, cfg: PrecisionConfig = DEFAULT) -> mpmath.mpc:
    """L(s, chi) = q^{-s} sum_a chi(a) zeta(s, a/q)."""
    return _dirichlet(s, chi, cfg)[0]


def _stirling_radius(prec: int) -> float:
    return prec * math.log(2) / (2 * math.pi) + 3


def gamma_half(s, cfg: PrecisionConfig = DEFAULT) -> mpmath.mpc:
    """Gamma(s/2) via the Stirling series after shifting Re(s/2) upward."""
    z0 = mpmath.mpc(s) / 2
    if z0.imag == 0 and z0.real <= 0 and z0.real == int(z0.real):
        raise PoleError(f"Gamma(s/2) has a pole at s = {mpmath.nstr(mpmath.mpc(s), 8)}")
    wp = cfg.prec + 20
    with mpmath.workprec(wp):
        r0 = _stirling_radius(wp)
        shift = max(0, math.ceil(r0 - float(z0.real)))
        z = z0 + shift
        target = mpmath.ldexp(1, -wp)
        lg = (z - 0.5) * mpmath.log(z) - z + mpmath.log(2 * mpmath.pi) / 2
        zinv2 = 1 / (z * z)
        zpow = 1 / z
        sec2 = 1 / mpmath.cos(mpmath.arg(z) / 2) ** 2
        for k in range(1, 4 * wp):
            b = mpmath.bernoulli(2 * k)
            term = b / (2 * k * (2 * k - 1)) * zpow
            lg += term
            zpow *= zinv2
            # remainder after k terms is at most the next term times sec^(2k+2)(arg z / 2)
            nxt = abs(mpmath.bernoulli(2 * k + 2)) / ((2 * k + 2) * (2 * k + 1)) * abs(zpow) * sec2 ** (k + 1)
            if nxt < target:
                break
        else:
            raise PrecisionError("Stirling series did not reach working precision")
        val = mpmath.exp(lg)
        if shift:
            rising = mpmath.mpc(1)
            for j in range(shift):
                rising *= z0 + j
            val /= rising
    return val


def _require_even_primitive(chi: DirichletCharacter) -> None:
    if not chi.is_primitive:
        raise ValidationError("character must be primitive")
    if not chi.is_even:
        raise ValidationError("only even characters are supported here")


def xi(s, chi: DirichletCharacter, cfg: PrecisionConfig = DEFAULT) -> mpmath.mpc:
    """xi(s, chi) = (q/pi)^{s/2} Gamma(s/2) L(s, chi) for even primitive chi."""
    _require_even_primitive(chi)
    s = mpmath.mpc(s)
    with mpmath.workprec(cfg.prec + 10):
        lq = mpmath.log(mpmath.mpf(chi.modulus) / mpmath.pi)
        return mpmath.exp(s / 2 * lq) * gamma_half(s, cfg) * dirichlet_l(s, chi, cfg)


def root_number(chi: DirichletCharacter, cfg: PrecisionConfig = DEFAULT) -> RootNumber:
    """K = sqrt(q)/G(1, chi) and its square root on the principal branch.

    When K is -1 the principal branch is ambiguous; the sign is then taken
    from the imaginary part of the first non-real character value.
    """
    _require_even_primitive(chi)
    with mpmath.workprec(cfg.prec + 10):
        G = gauss_sum(chi, cfg.prec + 10).value
        K = mpmath.sqrt(chi.modulus) / G
        if abs(abs(K) - 1) > cfg.tolerance:
            raise PrecisionError("root number is not unimodular")
        if abs(K + 1) > cfg.tolerance:
            return RootNumber(K, mpmath.sqrt(K), "principal")
        if chi.is_real:
            raise BranchError("K = -1 for a real character")
        for n in range(1, chi.modulus):
            v = chi.value(n, cfg.prec + 10)
            if abs(v.imag) > cfg.tolerance:
                sign = 1 if v.imag > 0 else -1
                return RootNumber(K, mpmath.mpc(0, sign), f"K=-1, sign from chi({n})")
    raise BranchError("no non-real character value found")


def u_value(s, chi: DirichletCharacter, cfg: PrecisionConfig = DEFAULT) -> mpmath.mpc:
    """U(s, chi) = K^{1/2} xi(s, chi)."""
    with mpmath.workprec(cfg.prec + 10):
        return root_number(chi, cfg).sqrtK * xi(s, chi, cfg)


def evaluate_w(t, chi: DirichletCharacter, cfg: PrecisionConfig = DEFAULT,
               root: RootNumber | None = None) -> CriticalValue:
    """Complex value of K^{1/2}(q/pi)^{it/2}Gamma(1/4+it/2)L(1/2+it) with an error estimate."""
    _require_even_primitive(chi)
    t = mpmath.mpf(t)
    root = root or root_number(chi, cfg)
    with mpmath.workprec(cfg.prec + 10):
        s = mpmath.mpc(0.5, t)
        L, errL = _dirichlet(s, chi, cfg)
        g = gamma_half(s, cfg)
        rot = mpmath.expj(t / 2 * mpmath.log(mpmath.mpf(chi.modulus) / mpmath.pi))
        val = root.sqrtK * rot * g * L
        err = abs(g) * errL + abs(val) * cfg.tolerance
    return CriticalValue(mpmath.mpc(0, t), val, err)


def w_value(t, chi: DirichletCharacter, cfg: PrecisionConfig = DEFAULT,
            root: RootNumber | None = None) -> mpmath.mpf:
    """Real function W(t, chi); raises RealityError if the imaginary part is not negligible."""
    cv = evaluate_w(t, chi, cfg, root)
    limit = 10 * max(cv.error, cfg.tolerance)
    if abs(cv.value.imag) > limit:
        raise RealityError(f"|Im W| = {mpmath.nstr(abs(cv.value.imag), 3)} exceeds {mpmath.nstr(limit, 3)}")
    return cv.value.real


def f_value(t, chi: DirichletCharacter, kappa, Q, cfg: PrecisionConfig = DEFAULT) -> mpmath.mpf:
    """W(t - h) W(t) W(t + h) with h = kappa / log Q."""
    if Q <= 1:
        raise ValidationError("Q must exceed 1")
    root = root_number(chi, cfg)
    with mpmath.workprec(cfg.prec + 10):
        h = mpmath.mpf(kappa) / mpmath.log(Q)
        t = mpmath.mpf(t)
        return w_value(t - h, chi, cfg, root) * w_value(t, chi, cfg, root) * w_value(t + h, chi, cfg, root)


def fe_residual(s, chi: DirichletCharacter, cfg: PrecisionConfig = DEFAULT) -> mpmath.mpf:
    """|xi(1 - s, conj chi) - K(chi) xi(s, chi)|."""
    s = mpmath.mpc(s)
    with mpmath.workprec(cfg.prec + 10):
        K = root_number(chi, cfg).K
        return abs(xi(1 - s, chi.conj(), cfg) - K * xi(s, chi, cfg))


FLOAT_B = 12
_FLOAT_EPS = 2.0**-52


@dataclass(frozen=True)
class FloatW:
    """Double-precision W on a batch of ordinates with a rounding-error estimate."""

    t: np.ndarray
    value: np.ndarray
    imag: np.ndarray
    error: np.ndarray


class WFloat:
    """Vectorised W(t) in float64 for sign scanning, set up once per character.

    The head of the Dirichlet series is a single matrix product over the
    units m < qM; the Euler-Maclaurin tail per residue class keeps FLOAT_B
    Bernoulli terms, and M is chosen so its remainder is below 1e-20 for
    |t| <= t_max.  The error field estimates rounding, scaled by the sum of
    term moduli.
    """

    def __init__(self, chi: DirichletCharacter, t_max: float, root: RootNumber | None = None):
        _require_even_primitive(chi)
        self.root = root or root_number(chi, PrecisionConfig(prec=64))
        q = self.q = chi.modulus
        self.t_max = float(t_max)
        M = max(20, math.ceil(1.3 * self.t_max))
        worst = mpmath.mpc(0.5, self.t_max)
        while _em_bound(worst, mpmath.mpf(M), FLOAT_B) > 1e-20:
            M = math.ceil(1.5 * M)
            if M > MAX_M:
                raise PrecisionError("float W: Euler-Maclaurin shift exceeds limit")
        units = np.array([a for a in range(1, q + 1) if chi.numerators[a % q] != NON_UNIT], dtype=np.float64)
        self.chiv = np.array([complex(chi.value(int(a) % q)) for a in units])
        m = (np.arange(M, dtype=np.float64)[:, None] * q + units[None, :]).ravel()
        self.chim = np.tile(self.chiv, M)
        self.logm = np.log(m)
        self.N = M + units / q
        self.logN = np.log(self.N)
        self.bern = np.array([float(c) for c in _bernoulli_coeffs(FLOAT_B, 64)])
        self.sqrtK = complex(self.root.sqrtK)
        self.lq = math.log(q / math.pi)
        self.scale = float(np.sum(m**-0.5)) + q**-0.5 * float(np.sum(np.sqrt(self.N))) * 2

    def __call__(self, ts, chunk: int = 256) -> FloatW:
        ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
        if ts.size and float(np.abs(ts).max()) > self.t_max:
            raise ValidationError("ordinate beyond the range this evaluator was set up for")
        N = self.N
        out_v, out_i, out_e = [], [], []
        for lo in range(0, ts.size, chunk):
            t = ts[lo:lo + chunk]
            s = 0.5 + 1j * t
            head = np.exp(-np.outer(s, self.logm)) @ self.chim
            # tail of zeta(s, a/q) from N = M + a/q, then the q^{-s} factor
            Nms = np.exp(-np.outer(s, self.logN))
            tail = Nms * (N[None, :] / (s[:, None] - 1) + 0.5)
            poch = s[:, None].copy()
            xpow = Nms / N[None, :]
            for k, c in enumerate(self.bern, start=1):
                tail += c * poch * xpow
                poch = poch * (s[:, None] + 2 * k - 1) * (s[:, None] + 2 * k)
                xpow = xpow / (N * N)[None, :]
            L = head + np.exp(-s * math.log(self.q)) * (tail @ self.chiv)
            g = np.exp(loggamma(0.25 + 0.5j * t))
            w = self.sqrtK * np.exp(0.5j * t * self.lq) * g * L
            out_v.append(w.real)
            out_i.append(np.abs(w.imag))
            out_e.append(64 * _FLOAT_EPS * self.scale * np.abs(g))
        cat = (lambda xs: np.concatenate(xs) if xs else np.zeros(0))
        return FloatW(ts, cat(out_v), cat(out_i), cat(out_e))


def w_float(ts, chi: DirichletCharacter, root: RootNumber | None = None) -> FloatW:
    """Float64 W on a batch of ordinates; see WFloat."""
    ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
    return WFloat(chi, float(np.abs(ts).max()) if ts.size else 0.0, root)(ts)
