"""The unit-circle random walk Z_H = X_1 + ... + X_H.

Monte Carlo draws come in fixed batches, each from its own Philox stream
keyed by (seed, batch index), so results do not depend on how batches are
scheduled.  The characteristic function of Z_H / sqrt(H/2) is available in
closed form as a power of the Bessel function J0.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .specfun import j0, j0m1

BATCH = 2**14


@dataclass
class ModelSampler:
    H: int
    seed: int = 0
    counter: int = 0  # next unused batch index
    threads: int = 1

    def __post_init__(self):
        if self.H < 1:
            raise PreconditionError(f"H must be positive, got {self.H}")

    def _batch(self, b: int, size: int) -> np.ndarray:
        gen = np.random.Generator(np.random.Philox(np.random.SeedSequence([self.seed, b])))
        theta = gen.random((size, self.H))
        return np.exp(2j * np.pi * theta).sum(axis=1)

    def draw(self, n: int) -> np.ndarray:
        """n independent draws of Z_H (continuing this sampler's stream)."""
        sizes = [BATCH] * (n // BATCH) + ([n % BATCH] if n % BATCH else [])
        ids = range(self.counter, self.counter + len(sizes))
        self.counter += len(sizes)
        if self.threads > 1:
            with ThreadPoolExecutor(self.threads) as pool:
                parts = list(pool.map(self._batch, ids, sizes))
        else:
            parts = [self._batch(b, m) for b, m in zip(ids, sizes)]
        return np.concatenate(parts) if parts else np.empty(0, dtype=np.complex128)


def sample_Z(sampler: ModelSampler) -> complex:
    return complex(sampler.draw(1)[0])


def jackknife(values: np.ndarray, groups: int = 100) -> tuple[float, float]:
    """Mean and delete-a-group jackknife standard error."""
    n = len(values)
    groups = min(groups, n)
    sums = np.array([g.sum() for g in np.array_split(values, groups)])
    sizes = np.array([len(g) for g in np.array_split(values, groups)])
    total = sums.sum()
    loo = (total - sums) / (n - sizes)
    est = total / n
    se = math.sqrt((groups - 1) / groups * float(np.sum((loo - loo.mean()) ** 2)))
    return float(est), se


def mc_moments(sampler: ModelSampler, pairs, n_draws: int) -> dict[tuple[int, int], tuple[float, float]]:
    """Monte Carlo E[(Re Z)^r (Im Z)^s] with jackknife standard errors, from one shared sample."""
    for r, s in pairs:
        if r + s > 8:
            raise PreconditionError("moment order limited to r + s <= 8")
    z = sampler.draw(n_draws)
    re, im = z.real, z.imag
    return {(r, s): jackknife(re**r * im**s) for r, s in pairs}


def mc_moment(sampler: ModelSampler, r: int, s: int, n_draws: int) -> tuple[float, float]:
    return mc_moments(sampler, [(r, s)], n_draws)[(r, s)]


def mc_cf(sampler: ModelSampler, u: float, v: float, n_draws: int) -> tuple[complex, float]:
    """Monte Carlo characteristic function of Z_H/sqrt(H/2) at (u, v) and its standard error."""
    z = sampler.draw(n_draws) / math.sqrt(sampler.H / 2)
    ph = u * z.real + v * z.imag
    c, se_c = jackknife(np.cos(ph))
    s, se_s = jackknife(np.sin(ph))
    return complex(c, s), math.hypot(se_c, se_s)


def _model_cf_scalar(u: float, v: float, H: int) -> float:
    x = math.sqrt(2.0 * (u * u + v * v) / H)
    if x < 2.0:
        return math.exp(H * math.log1p(j0m1(x)))
    return j0(x) ** H


def model_cf(u, v, H: int):
    """E exp(i(u Re + v Im) Z_H / sqrt(H/2)) = J0(sqrt(2(u^2+v^2)/H))^H."""
    if np.ndim(u) == 0 and np.ndim(v) == 0:
        return _model_cf_scalar(float(u), float(v), H)
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    out = np.array([_model_cf_scalar(a, b, H) for a, b in zip(u.ravel(), v.ravel())])
    return out.reshape(u.shape)
