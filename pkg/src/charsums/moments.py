"""Mixed moments of the window sums against the unit-circle random walk.

Empirical side: M(r, s) = (1/q) sum_x (Re S(x))^r (Im S(x))^s.
Model side: E[(Re Z_H)^r (Im Z_H)^s] with Z_H a sum of H independent
uniform points on the unit circle, which equals B_m(H) * c(r, s) when
r + s = 2m and vanishes otherwise.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

import numpy as np

from .characters import CharacterSpec, root_table
from .errors import PreconditionError, WeilViolation
from .window import ChunkedSource, PowerSumSink

MAX_ORDER = 8
MAX_TUPLE_DEGREE = 12


def _poly_mul_trunc(a, b, m):
    out = [Fraction(0)] * (m + 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j in range(m + 1 - i):
            out[i + j] += ai * b[j]
    return out


def multiset_count_B(m: int, H: int, cap: int = MAX_ORDER) -> int:
    """Number of pairs of m-tuples from {1..H} that agree as multisets.

    Equals (m!)^2 [x^m] (sum_k x^k / (k!)^2)^H; the power is taken by
    repeated squaring on polynomials truncated at degree m.
    """
    if not 0 <= m <= cap:
        raise PreconditionError(f"m must lie in [0, {cap}], got {m}")
    if H < 1:
        raise PreconditionError(f"H must be positive, got {H}")
    base = [Fraction(1, factorial(k) ** 2) for k in range(m + 1)]
    result = [Fraction(1)] + [Fraction(0)] * m
    e = H
    while e:
        if e & 1:
            result = _poly_mul_trunc(result, base, m)
        e >>= 1
        if e:
            base = _poly_mul_trunc(base, base, m)
    value = result[m] * factorial(m) ** 2
    assert value.denominator == 1
    return int(value)


def model_coefficient(r: int, s: int) -> Fraction:
    """c(r, s) = sum_{j+k=m} 2^-r (2i)^-s C(r,j) C(s,k) (-1)^(s-k), always real."""
    if r < 0 or s < 0:
        raise PreconditionError("r, s must be non-negative")
    if (r + s) % 2:
        return Fraction(0)
    m = (r + s) // 2
    total = sum(comb(r, j) * comb(s, m - j) * (-1) ** (s - (m - j))
                for j in range(max(0, m - s), min(r, m) + 1))
    # (2i)^-s = 2^-s (-i)^s; the sum vanishes whenever s is odd
    if s % 2:
        assert total == 0
        return Fraction(0)
    return Fraction((-1) ** (s // 2) * total, 2 ** (r + s))


def model_moment(r: int, s: int, H: int) -> Fraction:
    """E[(Re Z_H)^r (Im Z_H)^s] exactly."""
    if (r + s) % 2:
        return Fraction(0)
    c = model_coefficient(r, s)
    if c == 0:
        return Fraction(0)
    return multiset_count_B((r + s) // 2, H) * c


def moment_pairs(max_order: int = MAX_ORDER):
    return [(r, n - r) for n in range(max_order + 1) for r in range(n, -1, -1)]


def empirical_moments(source: ChunkedSource, pairs) -> dict[tuple[int, int], float]:
    """Raw (unnormalized) mixed moments for every requested (r, s) in one pass."""
    for r, s in pairs:
        if r < 0 or s < 0 or r + s > MAX_ORDER:
            raise PreconditionError(f"moment order ({r},{s}) outside 0 <= r+s <= {MAX_ORDER}")
    return source.reduce(PowerSumSink(pairs, source))


def empirical_moment(source: ChunkedSource, r: int, s: int) -> float:
    return empirical_moments(source, [(r, s)])[(r, s)]


@dataclass
class MomentEntry:
    r: int
    s: int
    empirical: float
    model: Fraction
    diff: float
    bound: float
    ratio: float
    hypothesis_ok: bool

    @property
    def model_float(self) -> float:
        return float(self.model)


@dataclass
class MomentTable:
    q: int
    H: int
    entries: dict[tuple[int, int], MomentEntry] = field(default_factory=dict)

    def __getitem__(self, key):
        return self.entries[key]

    def empirical(self) -> dict[tuple[int, int], float]:
        return {k: e.empirical for k, e in self.entries.items()}

    def write_csv(self, path, header_comment: str | None = None):
        with open(path, "w", newline="") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["r", "s", "empirical", "model", "diff", "bound", "ratio", "hypothesis_ok"])
            for (r, s), e in sorted(self.entries.items(), key=lambda kv: (kv[0][0] + kv[0][1], -kv[0][0])):
                w.writerow([r, s, f"{e.empirical:.17g}", f"{e.model_float:.17g}", f"{e.diff:.17g}",
                            f"{e.bound:.17g}", f"{e.ratio:.17g}", int(e.hypothesis_ok)])


def prop22_bound(r: int, s: int, q: int, H: int) -> float:
    """(r+s) H^(r+s) / sqrt(q)."""
    return (r + s) * float(H) ** (r + s) / math.sqrt(q)


def moment_table(source: ChunkedSource, pairs=None) -> MomentTable:
    """Empirical and model moments side by side, with the comparison columns filled in."""
    pairs = moment_pairs() if pairs is None else [tuple(p) for p in pairs]
    emp = empirical_moments(source, pairs)
    table = MomentTable(q=source.q, H=source.H)
    for r, s in pairs:
        model = model_moment(r, s, source.H)
        diff = abs(emp[(r, s)] - float(model))
        bound = prop22_bound(r, s, source.q, source.H)
        ratio = diff / bound if bound > 0 else 0.0
        ok = float(source.H) ** (r + s) <= math.sqrt(source.q)
        table.entries[(r, s)] = MomentEntry(r, s, emp[(r, s)], model, diff, bound, ratio, ok)
    return table


def prop22_compare(table: MomentTable) -> list[dict]:
    """Per-entry {diff, bound, ratio}; entries outside H^(r+s) <= sqrt(q) are flagged, not dropped."""
    return [dict(r=e.r, s=e.s, diff=e.diff, bound=e.bound, ratio=e.ratio, hypothesis_ok=e.hypothesis_ok)
            for e in table.entries.values()]


# --- complete sums of shifted products --------------------------------------

@dataclass
class TupleSumCheck:
    ys: tuple[int, ...]
    zs: tuple[int, ...]
    value: complex
    diagonal: bool
    degenerate: bool  # product is a d-th power, so the Weil bound does not apply
    bound: float

    @property
    def ratio(self) -> float:
        return abs(self.value) / self.bound if self.bound else math.inf


def _is_dth_power(ys, zs, d) -> bool:
    mult: dict[int, int] = {}
    for y in ys:
        mult[y] = mult.get(y, 0) + 1
    for z in zs:
        mult[z] = mult.get(z, 0) - 1
    return all(v % d == 0 for v in mult.values())


def shifted_product_sum(chi: CharacterSpec, ys, zs) -> TupleSumCheck:
    """sum_{x mod q} chi(prod (x+y_i)) conj(chi)(prod (x+z_j)), exactly via value classes."""
    ys, zs = tuple(int(y) for y in ys), tuple(int(z) for z in zs)
    if len(ys) + len(zs) > MAX_TUPLE_DEGREE:
        raise PreconditionError(f"k + l must be <= {MAX_TUPLE_DEGREE}")
    q, d = chi.q, chi.d
    x = np.arange(q, dtype=np.int64)
    total = np.zeros(q, dtype=np.int64)
    zero = np.zeros(q, dtype=bool)
    for shifts, sign in ((ys, 1), (zs, -1)):
        for y in shifts:
            cls = np.take(chi.class_array, x + y, mode="wrap")
            zero |= cls == d
            total += sign * cls
    total %= d
    total[zero] = d
    counts = np.bincount(total, minlength=d + 1)[:d].astype(np.float64)
    c, s = root_table(d)
    value = complex(counts @ c, counts @ s)
    diagonal = sorted(ys) == sorted(zs)
    return TupleSumCheck(ys, zs, value, diagonal, _is_dth_power(ys, zs, d),
                         (len(ys) + len(zs)) * math.sqrt(q))


@dataclass
class WeilReport:
    k: int
    l: int
    H: int
    checks: list[TupleSumCheck]
    flagged: list[TupleSumCheck]

    @property
    def max_ratio(self) -> float:
        return max((c.ratio for c in self.checks), default=0.0)


def weil_check(chi: CharacterSpec, samples: int, k: int, l: int, H: int, seed: int = 0) -> WeilReport:
    """Sample off-diagonal shift tuples and confirm |sum| <= (k+l) sqrt(q).

    Tuples whose product polynomial is a perfect d-th power (possible for
    low-order characters even off the diagonal) are outside the bound's
    hypotheses; they are reported in ``flagged`` instead of being checked.
    """
    if k + l < 1:
        raise PreconditionError("need k + l >= 1")
    rng = np.random.default_rng(seed)
    checks, flagged = [], []
    while len(checks) < samples:
        ys = tuple(int(v) for v in rng.integers(1, H + 1, size=k))
        zs = tuple(int(v) for v in rng.integers(1, H + 1, size=l))
        if sorted(ys) == sorted(zs):
            continue
        res = shifted_product_sum(chi, ys, zs)
        if res.degenerate:
            flagged.append(res)
            if len(flagged) > 100 * samples:
                break
            continue
        if abs(res.value) > res.bound:
            raise WeilViolation(f"|sum| = {abs(res.value):.6g} exceeds {res.bound:.6g} for y={ys}, z={zs}")
        checks.append(res)
    return WeilReport(k, l, H, checks, flagged)
