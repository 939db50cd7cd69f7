import math

import numpy as np
import pytest

from charsums.randmodel import ModelSampler, jackknife, mc_moment, model_cf, sample_Z


def test_H1_unit_modulus():
    z = ModelSampler(1, seed=2).draw(1000)
    assert np.allclose(np.abs(z), 1, atol=1e-14)
    assert abs(abs(sample_Z(ModelSampler(1, seed=5))) - 1) < 1e-14


def test_mean_and_second_moment():
    z = ModelSampler(50, seed=11).draw(10**6)
    assert abs(z.mean()) <= 4e-3 * math.sqrt(50)
    assert np.mean(np.abs(z) ** 2) == pytest.approx(50, rel=0.01)


def test_reproducible_and_thread_independent():
    a = ModelSampler(20, seed=9, threads=1).draw(50000)
    b = ModelSampler(20, seed=9, threads=4).draw(50000)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, ModelSampler(20, seed=10).draw(50000))


def test_mc_moment_examples():
    s = ModelSampler(50, seed=3)
    m, se = mc_moment(s, 1, 0, 10**6)
    assert abs(m) <= 3 * se
    m, se = mc_moment(ModelSampler(50, seed=3), 4, 0, 10**6)
    assert abs(m - 1856.25) <= 3 * se


def test_jackknife_matches_naive_se():
    x = np.random.default_rng(0).normal(size=100000)
    mean, se = jackknife(x)
    assert se == pytest.approx(x.std() / math.sqrt(len(x)), rel=0.1)


def test_model_cf():
    assert model_cf(0, 0, 7) == 1
    errs = [abs(model_cf(1, 0, H) - math.exp(-0.5)) for H in (10**2, 10**4, 10**6)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[1] * 10**4 == pytest.approx(errs[0] * 10**2, rel=0.05)


def test_model_cf_matches_mc():
    H = 5
    z = ModelSampler(H, seed=1).draw(400000) / math.sqrt(H / 2)
    emp = np.mean(np.exp(1j * (0.7 * z.real - 0.4 * z.imag)))
    assert abs(emp - model_cf(0.7, -0.4, H)) < 5e-3
