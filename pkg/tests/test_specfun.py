import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from charsums.errors import PreconditionError, QuadratureError
from charsums.specfun import (Rectangle, gauss_cdf, gauss_interval, gauss_legendre, gauss_rect_prob, integrate,
                              j0)


def test_gauss_cdf_examples():
    assert gauss_cdf(0) == 0.5
    assert gauss_cdf(1) - gauss_cdf(-1) == pytest.approx(0.6826894921370859, abs=1e-15)


@given(st.floats(-30, 30))
def test_gauss_cdf_symmetry_and_oracle(x):
    assert gauss_cdf(-x) == pytest.approx(1 - gauss_cdf(x), abs=1e-15)
    assert abs(gauss_cdf(x) - special.ndtr(x)) <= 1e-15


def test_gauss_interval_tails():
    assert gauss_interval(10, 11) == pytest.approx(special.ndtr(-10) - special.ndtr(-11), rel=1e-12)


def test_rect_prob():
    assert gauss_rect_prob(Rectangle(-1, 1, -1, 1)) == pytest.approx(0.6826894921370859**2, abs=1e-15)
    assert 1 - gauss_rect_prob(Rectangle(-8, 8, -8, 8)) < 1e-14
    assert gauss_rect_prob(Rectangle(0, 1e-9, -1, 1)) < 1e-9
    with pytest.raises(PreconditionError):
        Rectangle(1, 1, 0, 1)


def test_rect_partition_and_monotone():
    edges = np.linspace(-8, 8, 9)
    total = sum(gauss_rect_prob(Rectangle(a, b, c, d))
                for a, b in zip(edges, edges[1:]) for c, d in zip(edges, edges[1:]))
    assert total == pytest.approx(1, abs=1e-10)
    assert gauss_rect_prob(Rectangle(-1, 1, -1, 1)) <= gauss_rect_prob(Rectangle(-1.5, 1, -1, 2))


def test_j0_against_scipy():
    x = np.concatenate([np.linspace(0, 60, 6001), [100.0, 1e3, 1e5]])
    assert max(abs(j0(v) - special.j0(v)) for v in x) < 1e-12


CLOSED_FORMS = [
    (lambda u: np.ones_like(u), 0, 1, 1.0),
    (lambda u: np.exp(-(2 * np.pi * u) ** 2 / 2), 0, 5, 1 / (2 * math.sqrt(2 * math.pi))),
    (np.sin, 0, math.pi, 2.0),
    (np.cos, 0, 10, math.sin(10)),
    (lambda u: u**5, -1, 2, (64 - 1) / 6),
    (np.exp, -3, 1, math.e - math.exp(-3)),
    (lambda u: 1 / (1 + u * u), -5, 5, 2 * math.atan(5)),
    (np.sqrt, 0, 4, 16 / 3),
    (np.log1p, 0, 1, 2 * math.log(2) - 1),
    (lambda u: np.sin(50 * u), 0, 1, (1 - math.cos(50)) / 50),
    (lambda u: u * np.cos(u), 0, 20, 20 * math.sin(20) + math.cos(20) - 1),
    (lambda u: np.exp(-u * u), -6, 6, math.sqrt(math.pi) * math.erf(6)),
    (lambda u: np.abs(u - 0.3), 0, 1, 0.3**2 / 2 + 0.7**2 / 2),
    (lambda u: np.sinc(u), -30, 30, 2 * special.sici(30 * math.pi)[0] / math.pi),
    (lambda u: u**2 * np.exp(-u), 0, 30, 2 - special.gammaincc(3, 30) * 2),
    (lambda u: np.cosh(u), -2, 2, 2 * math.sinh(2)),
    (lambda u: np.sin(u) ** 2, 0, 7, 3.5 - math.sin(14) / 4),
    (lambda u: 1 / u, 1, 100, math.log(100)),
    (lambda u: np.cbrt(u), 0, 8, 12.0),
    (lambda u: np.exp(np.sin(u)), 0, 2 * math.pi, 2 * math.pi * special.i0(1)),
]


@pytest.mark.parametrize("f,lo,hi,exact", CLOSED_FORMS)
def test_integrate_error_estimate_bounds_true_error(f, lo, hi, exact):
    r = integrate(f, lo, hi, tol=1e-10)
    assert r.converged
    assert abs(r.value - exact) <= max(r.error, 1e-14) * 1.0 + 1e-13


def test_integrate_sine_integral():
    vals = [integrate(lambda u: 2 * np.pi * 10 * np.sinc(20 * u), 0, t).value for t in (1, 10, 100)]
    assert abs(vals[-1] - math.pi / 2) < abs(vals[0] - math.pi / 2) + 1e-12
    assert vals[-1] == pytest.approx(special.sici(2 * math.pi * 10 * 100)[0], abs=1e-8)


def test_integrate_reports_nonconvergence():
    with pytest.raises(QuadratureError):
        integrate(lambda u: np.sin(1 / np.maximum(u, 1e-300)), 0, 1, tol=1e-14, max_panels=8)
    r = integrate(lambda u: np.sin(1 / np.maximum(u, 1e-300)), 0, 1, tol=1e-14, max_panels=8, strict=False)
    assert not r.converged


def test_gauss_legendre():
    x, w = gauss_legendre(20, 0, 2)
    assert np.sum(w * x**39) == pytest.approx(2**40 / 40, rel=1e-13)
