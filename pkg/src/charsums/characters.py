"""Dirichlet characters modulo a prime, labelled by an exponent k.

chi_k(n) = e(k * ind[n] / (q-1)) for q not dividing n, else 0.  Every value
is a d-th root of unity e(j/d) (d the order), and the integer j ("value
class") is the primary representation; floats are derived from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import PreconditionError
from .modarith import PrimeContext

VALUE_TABLE_MAX_ORDER = 2**20


def unit_roots(j, d: int) -> tuple[np.ndarray, np.ndarray]:
    """cos and sin of 2*pi*j/d via octant reduction.

    Angles related by a symmetry of the square produce bitwise-equal
    magnitudes, so e.g. e(1/6) + e(2/3) cancels to exactly 0.
    """
    j = np.asarray(j, dtype=np.int64) % d
    ssign = np.where(2 * j > d, -1.0, 1.0)
    r = np.where(2 * j > d, d - j, j)          # angle 2*pi*r/d in [0, pi]
    csign = np.where(4 * r > d, -1.0, 1.0)
    p = np.where(4 * r > d, 2 * d - 4 * r, 4 * r)  # angle 2*pi*p/(4d) in [0, pi/2]
    swap = 2 * p > d
    p = np.where(swap, d - p, p)                   # now in [0, pi/4]
    theta = 2.0 * np.pi * p / (4 * d)
    c0, s0 = np.cos(theta), np.sin(theta)
    c = np.where(swap, s0, c0) * csign
    s = np.where(swap, c0, s0) * ssign
    return c, s


def root_table(d: int) -> tuple[np.ndarray, np.ndarray]:
    """cos and sin of 2*pi*j/d for j = 0..d-1."""
    return unit_roots(np.arange(d), d)


@dataclass(eq=False)
class CharacterSpec:
    context: PrimeContext
    k: int
    d: int
    is_real: bool
    value_table: np.ndarray | None = field(default=None, repr=False)

    @property
    def q(self) -> int:
        return self.context.q

    @property
    def zero_class(self) -> int:
        """Marker returned by value_class for multiples of q."""
        return self.d

    @property
    def step(self) -> int:
        """k / gcd(k, q-1): class j = step * ind[n] mod d."""
        return self.k // ((self.q - 1) // self.d)

    @property
    def label(self) -> str:
        kind = "legendre" if self.is_real else f"order{self.d}"
        return f"q{self.q}_k{self.k}_{kind}"

    def value_class(self, n: int) -> int:
        n = int(n) % self.q
        if n == 0:
            return self.d
        return self.step * int(self.context.ind[n]) % self.d

    def classes(self, n) -> np.ndarray:
        """Vectorized value_class; the zero marker is d."""
        n = np.asarray(n, dtype=np.int64) % self.q
        idx = self.context.ind[n].astype(np.int64)
        out = (idx * self.step) % self.d
        out[n == 0] = self.d
        return out

    @cached_property
    def class_array(self) -> np.ndarray:
        """Value classes of 0..q-1 (int32), cached for streaming passes."""
        ind = self.context.ind.astype(np.int64)
        out = (ind * self.step) % self.d
        out[0] = self.d
        return out.astype(np.int32)

    def roots(self, j) -> np.ndarray:
        """e(j/d) for an array of classes, 0 at the zero marker."""
        j = np.asarray(j, dtype=np.int64)
        if self.value_table is not None:
            return self.value_table[j]
        c, s = unit_roots(j, self.d)
        out = c + 1j * s
        out[j == self.d] = 0.0
        return out

    def eval(self, n: int) -> complex:
        j = self.value_class(n)
        if j == self.d:
            return 0j
        return complex(self.roots(np.array([j]))[0])

    def values(self, n) -> np.ndarray:
        return self.roots(self.classes(n))

    def conjugate(self) -> "CharacterSpec":
        return make_character(self.context, self.q - 1 - self.k)


def make_character(context: PrimeContext, k: int, table_max_order: int = VALUE_TABLE_MAX_ORDER) -> CharacterSpec:
    q = context.q
    if k % (q - 1) == 0:
        raise PreconditionError("k = 0 mod (q-1) is the principal character")
    if not 1 <= k <= q - 2:
        raise PreconditionError(f"k must lie in [1, q-2], got {k}")
    d = (q - 1) // math.gcd(k, q - 1)
    table = None
    if d <= table_max_order:
        c, s = root_table(d)
        table = np.empty(d + 1, dtype=np.complex128)
        table[:d] = c + 1j * s
        table[d] = 0.0
    return CharacterSpec(context=context, k=k, d=d, is_real=(d == 2), value_table=table)


def legendre(context: PrimeContext) -> CharacterSpec:
    return make_character(context, (context.q - 1) // 2)


def character_of_order(context: PrimeContext, d: int) -> CharacterSpec:
    """The character of exact order d with the smallest exponent k = (q-1)/d."""
    q = context.q
    if d < 2 or (q - 1) % d:
        raise PreconditionError(
            f"no character of order {d} mod {q}; orders available: {context.divisors()[1:12]}...")
    return make_character(context, (q - 1) // d)


def random_nonreal_exponent(q: int, seed: int) -> int:
    """Seeded exponent k in [1, q-2] with k != (q-1)/2; needs only q."""
    if q <= 3:
        raise PreconditionError(f"no non-real character mod {q}")
    rng = np.random.default_rng(seed)
    while True:
        k = int(rng.integers(1, q - 1))
        if 2 * k != q - 1:
            return k


def random_nonreal(context: PrimeContext, seed: int) -> CharacterSpec:
    return make_character(context, random_nonreal_exponent(context.q, seed))


def class_counts(chi: CharacterSpec) -> np.ndarray:
    """Number of n in [0, q-1] in each value class (zero marker last)."""
    return np.bincount(chi.class_array, minlength=chi.d + 1)


def orthogonality_check(chi: CharacterSpec) -> float:
    """|sum_{n mod q} chi(n)| from exact class counts (exactly 0.0 for nonprincipal chi)."""
    counts = class_counts(chi)[: chi.d]
    if (counts == counts[0]).all():
        return 0.0
    c, s = root_table(chi.d)
    return float(abs(complex(counts @ c, counts @ s)))
