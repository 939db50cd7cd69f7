"""Streaming evaluation of S(x) = sum_{x < n <= x+H} chi(n) for x = 0..q-1.

The x-range is cut into fixed chunks of CHUNK_SIZE starting points.  Each
chunk seeds its window by direct evaluation at its first x, so chunks are
independent (parallel-safe) and float drift is reset every chunk.  Chunk
layout never depends on the thread count, and partial results are merged
in chunk order, so every statistic is bit-identical for any thread count.

Characters of order d <= exact_threshold run in counter mode: each window
is a vector of d integer class counts and S(x) is materialized from it.
"""

from __future__ import annotations

import math
import struct
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from .characters import CharacterSpec, root_table
from .errors import PreconditionError

CHUNK_SIZE = 2**16
EXACT_THRESHOLD = 64

NORMALIZATIONS = ("none", "real", "complex")
_NORM_CODES = {"none": 0, "real": 1, "complex": 2}

DUMP_MAGIC = b"CSUM"
DUMP_VERSION = 1
_HEADER = struct.Struct("<4sHHQII")  # magic, version, normalization, q, H, k -> 24 bytes


def norm_scale(normalization: str, H: int) -> float:
    if normalization == "none":
        return 1.0
    if normalization == "real":
        return math.sqrt(H)
    if normalization == "complex":
        return math.sqrt(H / 2)
    raise PreconditionError(f"unknown normalization {normalization!r}")


def default_normalization(chi: CharacterSpec) -> str:
    """sqrt(H) for the Legendre symbol, sqrt(H/2) for non-real characters."""
    return "real" if chi.is_real else "complex"


class ChunkedSource:
    """Common reduction machinery for anything that yields S values in chunks.

    Subclasses provide q, H, scale, n_chunks, bounds(i) and chunk(i);
    chunk values are S(x)/scale.
    """

    q: int
    H: int
    scale: float
    threads: int = 1

    def reduce(self, sink, threads: int | None = None):
        """Feed every chunk to ``sink.partial`` and merge with ``sink.combine`` in chunk order."""
        threads = self.threads if threads is None else threads

        def work(i):
            x0, _ = self.bounds(i)
            return sink.partial(x0, self.chunk(i))

        if threads <= 1:
            partials = [work(i) for i in range(self.n_chunks)]
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                partials = list(pool.map(work, range(self.n_chunks)))
        return sink.combine(partials)

    def values(self) -> np.ndarray:
        return np.concatenate([self.chunk(i) for i in range(self.n_chunks)])

    def raw_values(self) -> np.ndarray:
        v = self.values()
        return v if self.scale == 1.0 else v * self.scale


class WindowSeries(ChunkedSource):
    def __init__(self, chi: CharacterSpec, H: int, normalization: str = "none", *,
                 threads: int = 1, exact_threshold: int = EXACT_THRESHOLD,
                 chunk_size: int = CHUNK_SIZE):
        q = chi.q
        if not 1 <= H < q:
            raise PreconditionError(f"window length must satisfy 1 <= H < q, got H={H}, q={q}")
        if normalization == "auto":
            normalization = default_normalization(chi)
        self.chi = chi
        self.q = q
        self.H = int(H)
        self.normalization = normalization
        self.scale = norm_scale(normalization, H)
        self.threads = threads
        self.exact = chi.d <= exact_threshold
        self.chunk_size = chunk_size
        self.n_chunks = -(-q // chunk_size)
        if self.exact and chi.d > 2:
            c, s = root_table(chi.d)
            m = (chi.d - 1) // 2
            self._cos = c[1:m + 1].copy()
            self._sin = s[1:m + 1].copy()

    @property
    def mode(self) -> str:
        return "exact" if self.exact else "float"

    def bounds(self, i: int) -> tuple[int, int]:
        x0 = i * self.chunk_size
        return x0, min(self.q, x0 + self.chunk_size)

    def _classes(self, i: int) -> np.ndarray:
        # classes of n = x0+1 .. x1-1+H, reduced mod q (periodic extension)
        x0, x1 = self.bounds(i)
        idx = np.arange(x0 + 1, x1 + self.H)
        return np.take(self.chi.class_array, idx, mode="wrap")

    def counts_chunk(self, i: int) -> np.ndarray:
        """Exact window class counts, shape (chunk length, d)."""
        if not self.exact:
            raise PreconditionError("class counts are only kept in exact mode")
        x0, x1 = self.bounds(i)
        B, H, d = x1 - x0, self.H, self.chi.d
        cls = self._classes(i)
        out = np.empty((B, d), dtype=np.int32)
        cs = np.empty(len(cls) + 1, dtype=np.int32)
        cs[0] = 0
        for j in range(d):
            np.cumsum(cls == j, out=cs[1:])
            out[:, j] = cs[H:H + B] - cs[:B]
        return out

    def raw_chunk(self, i: int) -> np.ndarray:
        """Unnormalized S(x) for the chunk's starting points."""
        x0, x1 = self.bounds(i)
        B, H, d = x1 - x0, self.H, self.chi.d
        if d == 2:
            cls = self._classes(i)
            v = np.where(cls == 0, 1, np.where(cls == 1, -1, 0)).astype(np.int64)
            p = np.concatenate(([0], np.cumsum(v)))
            return (p[H:H + B] - p[:B]).astype(np.float64) + 0j
        if self.exact:
            c = self.counts_chunk(i)
            m = (d - 1) // 2
            partner = d - np.arange(1, m + 1)
            plus = (c[:, 1:m + 1] + c[:, partner]).astype(np.float64)
            minus = (c[:, 1:m + 1] - c[:, partner]).astype(np.float64)
            re = c[:, 0] + plus @ self._cos
            if d % 2 == 0:
                re = re - c[:, d // 2]
            im = minus @ self._sin
            return re + 1j * im
        vals = self.chi.roots(self._classes(i))
        p = np.empty(len(vals) + 1, dtype=np.complex128)
        p[0] = 0
        np.cumsum(vals, out=p[1:])
        return p[H:H + B] - p[:B]

    def chunk(self, i: int) -> np.ndarray:
        s = self.raw_chunk(i)
        if self.scale != 1.0:
            s = s / self.scale
        return s

    def direct(self, x: int) -> complex:
        """S(x) recomputed from scratch (O(H)); the recurrence oracle."""
        n = np.arange(x + 1, x + self.H + 1)
        return complex(self.chi.values(n).sum())

    def class_totals(self) -> np.ndarray:
        """Exact sum over all x of the window class counts (zero marker last).

        Position n lies in the windows of exactly those x with n-H <= x < n,
        so each chunk contributes a weighted class histogram.
        """
        H, d = self.H, self.chi.d
        total = np.zeros(d + 1, dtype=np.int64)
        for i in range(self.n_chunks):
            x0, x1 = self.bounds(i)
            B = x1 - x0
            cls = self._classes(i)
            p = np.arange(len(cls))
            w = np.minimum(p, B - 1) - np.maximum(p - H + 1, 0) + 1
            total += np.bincount(cls, weights=w, minlength=d + 1).astype(np.int64)
        return total

    def exact_sum_is_zero(self) -> bool:
        """True when sum_x S(x) vanishes identically in Z[e(1/d)] (all class totals equal)."""
        t = self.class_totals()[: self.chi.d]
        return bool((t == t[0]).all())

    def dump(self, path) -> Path:
        """Write the series (in this source's normalization) as a CSUM file."""
        path = Path(path)
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(DUMP_MAGIC, DUMP_VERSION, _NORM_CODES[self.normalization],
                                  self.q, self.H, self.chi.k))
            for i in range(self.n_chunks):
                s = self.chunk(i)
                buf = np.empty((len(s), 2), dtype="<f4")
                buf[:, 0] = s.real
                buf[:, 1] = s.imag
                fh.write(buf.tobytes())
        return path


class SeriesDump(ChunkedSource):
    """Read-only view of a CSUM dump with the same chunk layout as WindowSeries."""

    def __init__(self, path, *, threads: int = 1, chunk_size: int = CHUNK_SIZE):
        path = Path(path)
        with open(path, "rb") as fh:
            magic, version, norm, q, H, k = _HEADER.unpack(fh.read(_HEADER.size))
        if magic != DUMP_MAGIC:
            raise ValueError(f"{path} is not a CSUM dump")
        if version != DUMP_VERSION:
            raise ValueError(f"unsupported CSUM version {version}")
        self.path = path
        self.q, self.H, self.k = q, H, k
        self.normalization = NORMALIZATIONS[norm]
        self.scale = norm_scale(self.normalization, H)
        self.threads = threads
        self.chunk_size = chunk_size
        self.n_chunks = -(-q // chunk_size)
        self._data = np.memmap(path, dtype="<f4", mode="r", offset=_HEADER.size, shape=(q, 2))

    def bounds(self, i: int) -> tuple[int, int]:
        x0 = i * self.chunk_size
        return x0, min(self.q, x0 + self.chunk_size)

    def chunk(self, i: int) -> np.ndarray:
        x0, x1 = self.bounds(i)
        block = np.asarray(self._data[x0:x1], dtype=np.float64)
        return block[:, 0] + 1j * block[:, 1]


def compute_series(chi: CharacterSpec, H: int, sink, normalization: str = "none", threads: int = 1):
    """One streaming pass of all q window sums into ``sink``."""
    return WindowSeries(chi, H, normalization, threads=threads).reduce(sink)


class PowerSumSink:
    """Mixed power sums (1/q) sum_x (Re S)^r (Im S)^s of the raw (unnormalized) sums.

    When H^(r+s) exceeds 2^40 the per-chunk sums are taken with math.fsum so
    the small empirical-minus-model differences stay meaningful.
    """

    def __init__(self, pairs, source: ChunkedSource):
        self.pairs = [tuple(p) for p in pairs]
        self.q = source.q
        self.factor = source.scale
        self.extended = {p: source.H ** (p[0] + p[1]) > 2**40 for p in self.pairs}
        self.max_r = max((p[0] for p in self.pairs), default=0)
        self.max_s = max((p[1] for p in self.pairs), default=0)

    def partial(self, x0, values):
        re = values.real * self.factor
        im = values.imag * self.factor
        pr = [np.ones_like(re)]
        for _ in range(self.max_r):
            pr.append(pr[-1] * re)
        ps = [np.ones_like(im)]
        for _ in range(self.max_s):
            ps.append(ps[-1] * im)
        out = []
        for r, s in self.pairs:
            term = pr[r] * ps[s]
            out.append(math.fsum(term) if self.extended[(r, s)] else float(np.sum(term)))
        return out

    def combine(self, partials):
        return {p: math.fsum(part[i] for part in partials) / self.q
                for i, p in enumerate(self.pairs)}


def exact_second_moment(q: int, H: int) -> Fraction:
    """(1/q) sum_x |S(x)|^2 = H(q-H)/q for every nonprincipal character mod prime q."""
    if not 1 <= H < q:
        raise PreconditionError(f"need 1 <= H < q, got H={H}, q={q}")
    return Fraction(H * (q - H), q)


def mean_and_component_variances(series: WindowSeries) -> tuple[complex, float, float]:
    """Mean of S (exactly 0 when the exact class totals balance) and the Re/Im variances."""
    m = series.reduce(PowerSumSink([(1, 0), (0, 1), (2, 0), (0, 2)], series))
    if isinstance(series, WindowSeries) and series.exact_sum_is_zero():
        mean = 0j
    else:
        mean = complex(m[(1, 0)], m[(0, 1)])
    var_re = m[(2, 0)] - mean.real**2
    var_im = m[(0, 2)] - mean.imag**2
    return mean, var_re, var_im
