"""Arbitrary-precision integer utilities: primality, factoring, prime lists.

Everything here is exact.  Python ints are the big-integer type and
fractions.Fraction (used in linalg) is the rational type; no floating
point enters any computation in this package.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

__all__ = [
    "Factorization",
    "factor",
    "primes_dividing",
    "is_prime",
    "lcm_upto",
    "primes_upto",
    "next_prime",
    "radical_of",
]


# Miller-Rabin with this witness set is deterministic below 3.317e24
# (Sorenson-Webster), far beyond any prime this package must certify.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_prime(m: int) -> bool:
    """Primality test, deterministic for all inputs below 3.3e24."""
    m = abs(m)
    if m < 2:
        return False
    for p in _SMALL_PRIMES:
        if m == p:
            return True
        if m % p == 0:
            return False
    d = m - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, m)
        if x == 1 or x == m - 1:
            continue
        for _ in range(r - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


_prime_table: list[int] = []
_prime_table_bound = 0


def primes_upto(bound: int) -> list[int]:
    """All primes <= bound, cached between calls."""
    global _prime_table, _prime_table_bound
    if bound <= _prime_table_bound:
        i = len(_prime_table)
        while i > 0 and _prime_table[i - 1] > bound:
            i -= 1
        return _prime_table[:i]
    sieve = bytearray([1]) * (bound + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(bound) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    _prime_table = [i for i in range(bound + 1) if sieve[i]]
    _prime_table_bound = bound
    return list(_prime_table)


def next_prime(m: int) -> int:
    """Smallest prime strictly greater than m."""
    k = m + 1
    if k <= 2:
        return 2
    if k % 2 == 0:
        k += 1
    while not is_prime(k):
        k += 2
    return k


@dataclass
class Factorization:
    """Partial factorization of |m|: prime powers plus an unfactored cofactor.

    Invariant: prod(p**e) * cofactor == |m|, every listed p passes is_prime,
    and cofactor is 1 or has no prime factor below the trial bound used.
    """

    prime_powers: list[tuple[int, int]] = field(default_factory=list)
    cofactor: int = 1

    def primes(self) -> set[int]:
        return {p for p, _ in self.prime_powers}

    def value(self) -> int:
        v = self.cofactor
        for p, e in self.prime_powers:
            v *= p**e
        return v

    @property
    def complete(self) -> bool:
        return self.cofactor == 1


def _brent_rho(m: int, rounds: int, rng: random.Random) -> int | None:
    """Brent-cycle Pollard rho; returns a nontrivial factor or None."""
    if m % 2 == 0:
        return 2
    for _ in range(6):  # a few restarts with fresh parameters
        y = rng.randrange(1, m)
        c = rng.randrange(1, m)
        mchunk = 128
        g, r, q = 1, 1, 1
        x = ys = y
        count = 0
        while g == 1 and count < rounds:
            x = y
            for _ in range(r):
                y = (y * y + c) % m
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(mchunk, r - k)):
                    y = (y * y + c) % m
                    q = q * abs(x - y) % m
                g = math.gcd(q, m)
                k += mchunk
                count += min(mchunk, r - k + mchunk)
            r *= 2
        if g == m:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % m
                g = math.gcd(abs(x - ys), m)
                count += 1
                if count >= rounds:
                    break
        if 1 < g < m:
            return g
    return None


def factor(
    m: int,
    trial_bound: int = 10**6,
    rho_rounds: int = 200_000,
    seed: int = 1,
) -> Factorization:
    """Factor |m| by trial division then Pollard rho.

    Never drops an unfactored part: whatever rho cannot split within its
    round budget is reported in ``cofactor`` so callers can flag the result
    as incomplete rather than silently losing primes.

    Raises ValueError on m == 0 (callers must handle vanishing determinants
    before asking for prime divisors).
    """
    if m == 0:
        raise ValueError("zero has no factorization")
    m = abs(m)
    fac = Factorization()
    if m == 1:
        return fac
    powers: dict[int, int] = {}
    for p in primes_upto(min(trial_bound, max(2, math.isqrt(m) + 1))):
        if p * p > m:
            break
        while m % p == 0:
            powers[p] = powers.get(p, 0) + 1
            m //= p
    if m > 1 and (m < trial_bound * trial_bound or is_prime(m)):
        # below the square of the trial bound a survivor must be prime
        powers[m] = powers.get(m, 0) + 1
        m = 1

    rng = random.Random(f"rho|{seed}|{m}")
    stack = [m] if m > 1 else []
    cofactor = 1
    while stack:
        c = stack.pop()
        if c == 1:
            continue
        if is_prime(c):
            powers[c] = powers.get(c, 0) + 1
            continue
        root = math.isqrt(c)
        if root * root == c:
            stack.extend([root, root])
            continue
        d = _brent_rho(c, rho_rounds, rng) if rho_rounds > 0 else None
        if d is None:
            cofactor *= c
        else:
            stack.extend([d, c // d])

    fac.prime_powers = sorted(powers.items())
    fac.cofactor = cofactor
    return fac


def primes_dividing(
    m: int,
    trial_bound: int = 10**6,
    rho_rounds: int = 200_000,
    seed: int = 1,
) -> tuple[set[int], int]:
    """Distinct prime divisors of |m| plus the unresolved composite part."""
    fac = factor(m, trial_bound=trial_bound, rho_rounds=rho_rounds, seed=seed)
    return fac.primes(), fac.cofactor


def lcm_upto(k: int) -> int:
    """lcm(1, 2, ..., k)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    out = 1
    for j in range(2, k + 1):
        out = out * j // math.gcd(out, j)
    return out


def radical_of(m: int, seed: int = 1) -> int:
    """Product of the distinct primes dividing m (unfactored part kept whole)."""
    if m == 0:
        raise ValueError("radical of zero")
    m = abs(m)
    if m == 1:
        return 1
    fac = factor(m, seed=seed)
    out = fac.cofactor
    for p, _ in fac.prime_powers:
        out *= p
    return out
