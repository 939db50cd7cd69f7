"""Empirical characteristic function of the normalized window sums.

Phi(u, v) = (1/q) sum_x exp(i(u Re S~(x) + v Im S~(x))), S~ = S / sqrt(H/2).

On a tensor grid us x vs the pass factorizes: per chunk,
Phi += exp(i Re S~ us)^T @ exp(i Im S~ vs), so a 17x17 grid costs 34
complex exponentials per x plus one small matrix product.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .randmodel import model_cf
from .window import ChunkedSource, norm_scale

DEFAULT_GRID = np.linspace(-2.0, 2.0, 17)
CF_COST_BUDGET = 2e11  # (grid points along both axes) x q
MAX_N = 8


class _GridSink:
    def __init__(self, us, vs, factor):
        self.us = np.asarray(us, dtype=np.float64)
        self.vs = np.asarray(vs, dtype=np.float64)
        self.factor = factor

    def partial(self, x0, values):
        re = values.real * self.factor
        im = values.imag * self.factor
        a = np.exp(1j * np.multiply.outer(re, self.us))
        b = np.exp(1j * np.multiply.outer(im, self.vs))
        return a.T @ b

    def combine(self, partials):
        total = np.zeros((len(self.us), len(self.vs)), dtype=np.complex128)
        for p in partials:
            total += p
        return total


class _NodeSink:
    def __init__(self, nodes, factor):
        nodes = np.asarray(nodes, dtype=np.float64).reshape(-1, 2)
        self.u, self.v = nodes[:, 0], nodes[:, 1]
        self.factor = factor

    def partial(self, x0, values):
        ph = np.multiply.outer(values.real * self.factor, self.u) + np.multiply.outer(values.imag * self.factor, self.v)
        return np.exp(1j * ph).sum(axis=0)

    def combine(self, partials):
        total = np.zeros(len(self.u), dtype=np.complex128)
        for p in partials:
            total += p
        return total


class _MaxAbsSink:
    def __init__(self, factor):
        self.factor = factor

    def partial(self, x0, values):
        return max(float(np.max(np.abs(values.real))), float(np.max(np.abs(values.imag)))) * self.factor

    def combine(self, partials):
        return max(partials)


class EmpiricalCF:
    """Batched Phi evaluation backed by a series source (one O(q) pass per call)."""

    def __init__(self, source: ChunkedSource, normalization: str = "complex",
                 cost_budget: float = CF_COST_BUDGET):
        self.source = source
        self.q, self.H = source.q, source.H
        self.factor = source.scale / norm_scale(normalization, source.H)
        self.cost_budget = cost_budget
        self._bandwidth = None

    @property
    def bandwidth(self) -> float:
        """max over x of |Re S~(x)|, |Im S~(x)|; sets the oscillation scale of Phi."""
        if self._bandwidth is None:
            self._bandwidth = self.source.reduce(_MaxAbsSink(self.factor))
        return self._bandwidth

    def _guard(self, n):
        if n * self.q > self.cost_budget:
            raise PreconditionError(f"{n} nodes x q={self.q} exceeds the CF cost budget {self.cost_budget:g}")

    def grid(self, us, vs) -> np.ndarray:
        us, vs = np.atleast_1d(us), np.atleast_1d(vs)
        self._guard(len(us) + len(vs))
        return self.source.reduce(_GridSink(us, vs, self.factor)) / self.q

    def nodes(self, nodes) -> np.ndarray:
        nodes = np.asarray(nodes, dtype=np.float64).reshape(-1, 2)
        self._guard(2 * len(nodes))
        return self.source.reduce(_NodeSink(nodes, self.factor)) / self.q


class GaussianCF:
    """exp(-(u^2+v^2)/2), the standard bivariate Gaussian target."""

    bandwidth = 8.0

    def grid(self, us, vs) -> np.ndarray:
        us, vs = np.atleast_1d(us), np.atleast_1d(vs)
        return np.exp(-0.5 * np.add.outer(us**2, vs**2)).astype(np.complex128)


class ModelCF:
    """Exact CF of the normalized random walk Z_H / sqrt(H/2)."""

    def __init__(self, H: int):
        self.H = H
        self.bandwidth = math.sqrt(2 * H)

    def grid(self, us, vs) -> np.ndarray:
        uu, vv = np.meshgrid(np.atleast_1d(us), np.atleast_1d(vs), indexing="ij")
        return model_cf(uu, vv, self.H).astype(np.complex128)


@dataclass
class CFGrid:
    us: np.ndarray
    vs: np.ndarray
    phi: np.ndarray  # phi[i, j] = Phi(us[i], vs[j])
    q: int
    H: int

    @property
    def gauss_ref(self) -> np.ndarray:
        return np.exp(-0.5 * np.add.outer(self.us**2, self.vs**2))

    @property
    def gap(self) -> np.ndarray:
        return np.abs(self.phi - self.gauss_ref)

    def at(self, u: float, v: float) -> complex:
        i = int(np.flatnonzero(self.us == u)[0])
        j = int(np.flatnonzero(self.vs == v)[0])
        return complex(self.phi[i, j])


def empirical_cf(source: ChunkedSource, us=DEFAULT_GRID, vs=DEFAULT_GRID,
                 normalization: str = "complex") -> CFGrid:
    """Phi on the tensor grid us x vs in a single streaming pass."""
    us = np.asarray(us, dtype=np.float64)
    vs = np.asarray(vs, dtype=np.float64)
    phi = EmpiricalCF(source, normalization).grid(us, vs)
    return CFGrid(us, vs, phi, source.q, source.H)


def theorem31_budget(u, v, N: int, H: int, q: int, slack: float = 10.0):
    """Slack times the error terms of the CF asymptotic with truncation parameter N."""
    u, v = np.asarray(u, float), np.asarray(v, float)
    main = np.exp(-(u**2 + v**2) / 2) * (u**4 + v**4) / H
    trunc = ((2 * u**2) ** N + (2 * v**2) ** N) / math.factorial(N) + (2 * u * v) ** (2 * N) / math.factorial(2 * N)
    tail = q ** -0.25 * (1 + u ** (2 * N)) * (1 + v ** (2 * N))
    return slack * (main + trunc + tail)


def n_hypothesis_max(q: int, H: int) -> float:
    """Largest N allowed by N <= log q / (20 log H)."""
    return math.inf if H <= 1 else math.log(q) / (20 * math.log(H))


@dataclass
class CFReportRow:
    u: float
    v: float
    phi: complex
    gauss_ref: float
    gap: float
    budget: float
    hypothesis_ok: bool


def theorem31_report(grid: CFGrid, N: int, slack: float = 10.0) -> list[CFReportRow]:
    """Per-node gap |Phi - Gaussian| against the assembled budget.

    Nodes with max(|u|,|v|) > H^(1/4), or any node when N exceeds
    log q / (20 log H), are flagged hypothesis_ok = False but still reported.
    """
    if not 1 <= N <= MAX_N:
        raise PreconditionError(f"N must lie in [1, {MAX_N}], got {N}")
    n_ok = N <= n_hypothesis_max(grid.q, grid.H)
    radius = grid.H ** 0.25
    ref = grid.gauss_ref
    rows = []
    for i, u in enumerate(grid.us):
        for j, v in enumerate(grid.vs):
            phi = complex(grid.phi[i, j])
            rows.append(CFReportRow(
                float(u), float(v), phi, float(ref[i, j]), abs(phi - ref[i, j]),
                float(theorem31_budget(u, v, N, grid.H, grid.q, slack)),
                bool(n_ok and abs(u) <= radius and abs(v) <= radius)))
    return rows


def write_cfgrid_csv(path, rows: list[CFReportRow], header_comment: str | None = None):
    with open(path, "w", newline="") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["u", "v", "re_cf", "im_cf", "gauss_ref", "gap", "budget", "hypothesis_ok"])
        for r in rows:
            w.writerow([f"{r.u:.17g}", f"{r.v:.17g}", f"{r.phi.real:.17g}", f"{r.phi.imag:.17g}",
                        f"{r.gauss_ref:.17g}", f"{r.gap:.17g}", f"{r.budget:.17g}", int(r.hypothesis_ok)])


def truncated_cf_FN(moments: dict, N: int, u: float, v: float, H: int) -> complex:
    """sum_{r,s < 2N} (iu)^r (iv)^s M(r,s) / ((H/2)^((r+s)/2) r! s!) from raw moments M."""
    if N < 1:
        raise PreconditionError("N must be positive")
    total = 0j
    for r in range(2 * N):
        for s in range(2 * N):
            if (r, s) not in moments:
                raise PreconditionError(f"moment M({r},{s}) missing for N={N}")
            total += ((1j * u) ** r * (1j * v) ** s * moments[(r, s)]
                      / ((H / 2) ** ((r + s) / 2) * math.factorial(r) * math.factorial(s)))
    return total


def truncation_budget(u: float, v: float, N: int) -> float:
    """((2u^2)^N + (2v^2)^N)/N! + (2uv)^(2N)/(2N)!"""
    return ((2 * u * u) ** N + (2 * v * v) ** N) / math.factorial(N) + (2 * u * v) ** (2 * N) / math.factorial(2 * N)
