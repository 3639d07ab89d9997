"""Multiplicative number theory support: factoring, totients, cyclotomics.

Factoring is exact for arbitrary Python ints: trial division over a sieved
prime table below 10^6, then Brent-cycle Pollard rho with Miller-Rabin.
Primality is deterministic below the 13-witness threshold and uses a fixed
documented witness set above it (error heuristically < 2^-80).
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Tuple

import numpy as np

from .errors import ZeroArgumentError
from .exact import MonicIntPoly

__all__ = [
    "FactoredInt",
    "TotientTable",
    "factorize",
    "is_probable_prime",
    "euler_phi",
    "tau",
    "totients_up_to",
    "largest_totient_below",
    "max_totient_square_sum",
    "count_smooth_wrt",
    "cyclotomic",
]

_TRIAL_LIMIT = 10**6

# Deterministic Miller-Rabin witness set for n < 3317044064679887385961981.
_MR_DETERMINISTIC_BOUND = 3317044064679887385961981
_MR_BASES_SMALL = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
# Above the bound: first 40 primes as fixed witnesses.
_MR_BASES_LARGE = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
    71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139,
    149, 151, 157, 163, 167, 173,
)


@lru_cache(maxsize=1)
def _small_primes() -> tuple:
    sieve = bytearray([1]) * _TRIAL_LIMIT
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(_TRIAL_LIMIT) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return tuple(i for i in range(_TRIAL_LIMIT) if sieve[i])


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin; deterministic for n below ~3.3e24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    bases = _MR_BASES_SMALL if n < _MR_DETERMINISTIC_BOUND else _MR_BASES_LARGE
    for a in bases:
        a %= n
        if a <= 1:  # base collides with n (only happens for prime n <= 173)
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """A nontrivial factor of composite odd n (Brent's cycle variant)."""
    if n % 2 == 0:
        return 2
    if n % 3 == 0:
        return 3
    c = 1
    while True:
        y, r, q, g = 2, 1, 1, 1
        m = 128
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            # batched gcd jumped past the factor; rewalk one step at a time
            g = 1
            y = ys
            while g == 1:
                y = (y * y + c) % n
                g = math.gcd(abs(x - y), n)
        if 1 < g < n:
            return g
        c += 1


@dataclass(frozen=True)
class FactoredInt:
    """Sign and prime factorization of a nonzero integer.

    `factors` is a tuple of (prime, exponent) pairs with strictly
    increasing primes; the empty tuple represents +-1.
    """

    sign: int
    factors: Tuple[Tuple[int, int], ...]

    @property
    def value(self) -> int:
        v = self.sign
        for p, e in self.factors:
            v *= p**e
        return v

    @property
    def primes(self) -> tuple:
        return tuple(p for p, _ in self.factors)

    def as_dict(self) -> Dict[int, int]:
        return dict(self.factors)


def factorize(m: int) -> FactoredInt:
    """Exact prime factorization of a nonzero integer."""
    if m == 0:
        raise ZeroArgumentError("cannot factor 0")
    sign = 1 if m > 0 else -1
    m = abs(m)
    fac: Dict[int, int] = {}
    for p in _small_primes():
        if p * p > m:
            break
        while m % p == 0:
            fac[p] = fac.get(p, 0) + 1
            m //= p
    stack = [m] if m > 1 else []
    while stack:
        v = stack.pop()
        if v == 1:
            continue
        if is_probable_prime(v):
            fac[v] = fac.get(v, 0) + 1
            continue
        d = _pollard_rho(v)
        stack.append(d)
        stack.append(v // d)
    return FactoredInt(sign, tuple(sorted(fac.items())))


def euler_phi(k: int) -> int:
    """Euler's totient of k >= 1."""
    if k < 1:
        raise ValueError("totient needs k >= 1")
    phi = 1
    for p, e in factorize(k).factors:
        phi *= (p - 1) * p ** (e - 1)
    return phi


def tau(k: int) -> int:
    """Number of positive divisors of |k|, k != 0."""
    if k == 0:
        raise ZeroArgumentError("tau(0) undefined")
    t = 1
    for _, e in factorize(k).factors:
        t *= e + 1
    return t


def _phi_sieve(limit: int) -> np.ndarray:
    """phi(k) for 0 <= k <= limit as int64 (limit must fit comfortably)."""
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if phi[p] == p:  # p prime: untouched so far
            phi[p::p] -= phi[p::p] // p
    return phi


@dataclass(frozen=True)
class TotientTable:
    """All totient values up to `limit`, with the scan bound that proves
    completeness.

    A value m <= limit is a totient iff phi(k) = m for some k; every such k
    satisfies k <= witness_bound by the lower bound
    phi(k) > k / (e^gamma loglog k + 3/loglog k), so scanning k up to
    witness_bound witnesses every totient <= limit.
    """

    limit: int
    values: tuple
    witness_bound: int

    def __contains__(self, m: int) -> bool:
        i = bisect.bisect_left(self.values, m)
        return i < len(self.values) and self.values[i] == m

    def largest_below(self, n: int) -> int:
        """Largest totient value <= n (n >= 1; 1 is always a totient)."""
        if n < 1 or n > self.limit:
            raise ValueError("n out of table range")
        i = bisect.bisect_right(self.values, n)
        return self.values[i - 1]


def _totient_witness_bound(limit: int) -> int:
    """Smallest convenient K with phi(k) > limit guaranteed for all k > K."""
    egamma = 1.7810724179901979
    k = max(64, 2 * limit)
    while True:
        ll = math.log(math.log(k))
        lower = k / (egamma * ll + 3.0 / ll)
        # 1% slack absorbs any float rounding in the bound evaluation
        if lower > 1.01 * limit:
            return k
        k *= 2


@lru_cache(maxsize=8)
def totients_up_to(limit: int) -> TotientTable:
    """Table of every totient value <= limit."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    bound = _totient_witness_bound(limit)
    phi = _phi_sieve(bound)
    vals = np.unique(phi[1:])
    vals = vals[vals <= limit]
    return TotientTable(limit, tuple(int(v) for v in vals), bound)


def largest_totient_below(n: int) -> int:
    """v(n): the largest totient value <= n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    table = totients_up_to(_table_size(n))
    return table.largest_below(n)


def _table_size(n: int) -> int:
    size = 1
    while size < n:
        size *= 2
    return size


@lru_cache(maxsize=8)
def _square_sum_dp(limit: int) -> tuple:
    """DP array: w[n] = max sum of squares of totient parts summing to n."""
    table = totients_up_to(limit)
    vals = np.array(table.values, dtype=np.int64)
    squares = vals * vals
    w = np.full(limit + 1, -1, dtype=np.int64)
    w[0] = 0
    for n in range(1, limit + 1):
        usable = vals[vals <= n]
        if usable.size == 0:
            continue
        prev = w[n - usable]
        ok = prev >= 0
        if np.any(ok):
            w[n] = int(np.max(prev[ok] + squares[: usable.size][ok]))
    return tuple(int(x) for x in w)


def max_totient_square_sum(n: int) -> int:
    """w(n): max of sum(phi(k_j)^2) over ways to write n as a sum of
    totient values (repeats allowed).  w(0) = 0.

    Every n >= 1 has at least the all-ones partition, so w(n) >= n.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return 0
    w = _square_sum_dp(_table_size(n))
    return w[n]


def count_smooth_wrt(q: int, u) -> int:
    """Count integers 1 <= m <= u whose prime divisors all divide q.

    Exact DFS over prime powers of rad(q); m = 1 always counts.
    """
    if q == 0:
        raise ZeroArgumentError("q must be nonzero")
    uf = math.floor(u)
    if uf < 1:
        return 0
    primes = factorize(q).primes
    def rec(i: int, room: int) -> int:
        if i == len(primes):
            return 1
        p = primes[i]
        total = 0
        while True:
            total += rec(i + 1, room)
            if room < p:
                break
            room //= p
        return total
    return rec(0, uf)


def _poly_mul(a: list, b: list) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_divexact(num: list, den: list) -> list:
    """Exact division of integer polynomials (coefficients low-to-high)."""
    num = list(num)
    dd = len(den) - 1
    lead = den[-1]
    out = [0] * (len(num) - dd)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + dd]
        assert c % lead == 0
        q = c // lead
        out[i] = q
        if q:
            for j, y in enumerate(den):
                num[i + j] -= q * y
    assert all(x == 0 for x in num)
    return out


@lru_cache(maxsize=None)
def cyclotomic(k: int) -> MonicIntPoly:
    """The kth cyclotomic polynomial, exact over Z.

    Computed by the recursive division X^k - 1 = prod_{d | k} Phi_d(X);
    degree is phi(k).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return MonicIntPoly((-1,))
    num = [0] * (k + 1)
    num[0] = -1
    num[k] = 1
    for d in _divisors(k):
        if d < k:
            phi_d = cyclotomic(d)
            num = _poly_divexact(num, list(phi_d.all_coeffs()))
    assert num[-1] == 1
    return MonicIntPoly(tuple(num[:-1]))


def _divisors(k: int) -> list:
    divs = [1]
    for p, e in factorize(k).factors:
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)
