"""Small integer helpers: a numpy prime sieve and trial-division factoring."""
from __future__ import annotations

import math

import numpy as np

from .errors import ValidationError


def prime_sieve(n: int) -> np.ndarray:
    """All primes <= n as an int64 array (Eratosthenes on a boolean mask)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    mask = np.ones(n + 1, dtype=bool)
    mask[:2] = False
    mask[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if mask[p]:
            mask[p * p :: 2 * p] = False
    return np.flatnonzero(mask).astype(np.int64)


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation {p: k} by trial division; factorize(1) == {}."""
    if n < 1:
        raise ValidationError("factorize expects a positive integer")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    """Sorted positive divisors of n."""
    divs = [1]
    for p, k in factorize(n).items():
        divs = [d * p**j for d in divs for j in range(k + 1)]
    return sorted(divs)


def primitive_root(p: int) -> int:
    """Least primitive root modulo an odd prime p."""
    phi = p - 1
    qs = list(factorize(phi))
    for g in range(2, p):
        if all(pow(g, phi // r, p) != 1 for r in qs):
            return g
    raise ValidationError(f"no primitive root mod {p}")
