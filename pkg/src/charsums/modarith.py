"""Prime-field arithmetic: primality, primitive roots and the index table.

The index (discrete logarithm) table is the only non-trivial data structure
here; everything downstream evaluates characters through it in O(1).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import MemoryCapError, PreconditionError

# Deterministic for every n < 3.3e24, so in particular for n < 2^63.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_SMALL_PRIMES = _MR_WITNESSES

DEFAULT_MAX_Q = 2**31 - 1


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test for 2 <= n < 2^63."""
    n = int(n)
    if n < 2 or n >= 2**63:
        raise PreconditionError(f"is_prime supports 2 <= n < 2^63, got {n}")
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    n = max(2, int(n))
    if n == 2:
        return 2
    if n % 2 == 0:
        n += 1
    while not is_prime(n):
        n += 2
    return n


def _pollard_rho(n: int) -> int:
    # Brent's variant; n is odd and composite.
    rng = random.Random(n)
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
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
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization as a sorted list of (prime, multiplicity)."""
    n = int(n)
    if n < 1:
        raise PreconditionError(f"cannot factor {n}")
    counts: dict[int, int] = {}
    for p in range(2, 1000):
        if p * p > n:
            break
        while n % p == 0:
            counts[p] = counts.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            counts[m] = counts.get(m, 0) + 1
            continue
        f = _pollard_rho(m)
        stack.extend((f, m // f))
    return sorted(counts.items())


def find_primitive_root(q: int, factors: list[tuple[int, int]] | None = None) -> int:
    """Smallest generator of (Z/qZ)^* for a prime q >= 3."""
    if q < 3 or not is_prime(q):
        raise PreconditionError(f"q must be a prime >= 3, got {q}")
    if factors is None:
        factors = factorize(q - 1)
    exps = [(q - 1) // p for p, _ in factors]
    g = 2
    while any(pow(g, e, q) == 1 for e in exps):
        g += 1
    return g


@dataclass(frozen=True, eq=False)
class PrimeContext:
    """A prime modulus with its smallest primitive root and index table.

    ``ind[n]`` is the exponent i in [0, q-2] with g^i = n (mod q) for
    1 <= n <= q-1; ``ind[0]`` holds -1 as a sentinel.
    """

    q: int
    g: int
    ind: np.ndarray = field(repr=False)
    factorization: tuple[tuple[int, int], ...]

    @property
    def order(self) -> int:
        return self.q - 1

    def divisors(self) -> list[int]:
        """All divisors of q-1 (the possible character orders)."""
        divs = [1]
        for p, e in self.factorization:
            divs = [d * p**i for d in divs for i in range(e + 1)]
        return sorted(divs)

    def verify(self, samples: int = 1000, seed: int = 0) -> list[str]:
        """Check the table invariants; returns a list of violations (empty when sound)."""
        problems = []
        q, g, ind = self.q, self.g, self.ind
        if not is_prime(q):
            problems.append(f"q={q} is not prime")
        body = ind[1:]
        if body.shape != (q - 1,):
            problems.append("index table has wrong length")
            return problems
        seen = np.zeros(q - 1, dtype=bool)
        ok_range = (body >= 0) & (body <= q - 2)
        if not ok_range.all():
            problems.append("index table values out of range [0, q-2]")
        else:
            seen[body] = True
            if not seen.all():
                problems.append("bijectivity violation: index table is not a permutation of 0..q-2")
        if ind[1] != 0:
            problems.append("ind[1] != 0")
        if ind[g % q] != 1:
            problems.append("ind[g] != 1")
        rng = np.random.default_rng(seed)
        for n in rng.integers(1, q, size=min(samples, q - 1)):
            if pow(g, int(ind[n]), q) != int(n):
                problems.append(f"round-trip failure at n={int(n)}")
                break
        return problems


def build_index_table(q: int, g: int, max_q: int = DEFAULT_MAX_Q,
                      factors: list[tuple[int, int]] | None = None) -> PrimeContext:
    """Tabulate the discrete logarithm to base g for every residue mod q."""
    if q > max_q:
        raise MemoryCapError(f"q={q} exceeds the index-table cap {max_q}")
    if factors is None:
        factors = factorize(q - 1)
    n = q - 1
    # powers g^0..g^(n-1) laid out as rows of width w; row i is row 0 times g^(w*i)
    w = max(1, math.isqrt(n))
    rows = -(-n // w)
    first = np.empty(w, dtype=np.int64)
    acc = 1
    for j in range(w):
        first[j] = acc
        acc = acc * g % q
    step = acc  # g^w
    powers = np.empty((rows, w), dtype=np.int64)
    mult = 1
    for i in range(rows):
        powers[i] = first * mult % q
        mult = mult * step % q
    powers = powers.ravel()[:n]
    ind = np.full(q, -1, dtype=np.int32)
    ind[powers] = np.arange(n, dtype=np.int32)
    ind.setflags(write=False)
    return PrimeContext(q=q, g=g, ind=ind, factorization=tuple(factors))


@lru_cache(maxsize=8)
def prime_context(q: int, max_q: int = DEFAULT_MAX_Q) -> PrimeContext:
    """Certified PrimeContext for q (cached; contexts are immutable)."""
    if q < 3 or not is_prime(q):
        raise PreconditionError(f"q must be a prime >= 3, got {q}")
    if q > max_q:
        raise MemoryCapError(f"q={q} exceeds the index-table cap {max_q}")
    factors = factorize(q - 1)
    g = find_primitive_root(q, factors)
    return build_index_table(q, g, max_q=max_q, factors=factors)
