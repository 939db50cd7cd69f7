import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from charsums.charfn import EmpiricalCF, GaussianCF
from charsums.errors import PreconditionError
from charsums.selberg import (G, f_ab, f_ab_over_u, fejer, fejer_direct, fejer_error_term, fejer_identity_check,
                              gaussian_smoothed_interval, indicator_approx, paper_preset, sgn_approx,
                              smoothed_rect_frequency)
from charsums.specfun import Rectangle, gauss_interval, gauss_rect_prob
from charsums.window import WindowSeries


def test_G_endpoints_and_continuity():
    assert G(0.0) == pytest.approx(2 / math.pi, abs=1e-15)
    assert G(1.0) == pytest.approx(0.0, abs=1e-15)
    for e in (1e-3 - 1e-12, 1e-3 + 1e-12, 1 - 1e-3 - 1e-12, 1 - 1e-3 + 1e-12):
        u = e
        direct = 2 * u / math.pi + 2 * (1 - u) * u / math.tan(math.pi * u)
        assert G(u) == pytest.approx(direct, abs=1e-12)
    with pytest.raises(PreconditionError):
        G(1.5)


def test_f_ab():
    assert f_ab(0.3, 1.2, 0.0) == 0
    u = np.linspace(1e-3, 5, 50)
    assert np.allclose(f_ab_over_u(0.3, 1.2, u), f_ab(0.3, 1.2, u) / u, atol=1e-12)
    assert f_ab_over_u(-1, 1, 0.0) == pytest.approx(2j * math.pi)


def test_sgn_approx():
    assert sgn_approx(0.0, 10) == 0
    assert abs(sgn_approx(1.0, 10) - 1) <= 2 * (1 / (10 * math.pi)) ** 2
    assert sgn_approx(-1.0, 10) == pytest.approx(-sgn_approx(1.0, 10), abs=1e-12)


def test_indicator_approx():
    assert indicator_approx(0.0, -2, 2, 20) == pytest.approx(1, abs=1e-2)
    assert indicator_approx(5.0, -2, 2, 20) == pytest.approx(0, abs=1e-2)


def test_gaussian_smoothed_interval():
    v = gaussian_smoothed_interval(-1, 1, 20)
    assert abs(v - 0.6826894921370859) <= 5 / 20
    assert gaussian_smoothed_interval(-8, 8, 50) == pytest.approx(1, abs=1e-3)


@given(st.floats(-5, 5), st.floats(0.1, 30))
@settings(max_examples=40, deadline=None)
def test_fejer_identity(x, t):
    assert fejer_identity_check(x, t) <= 1e-9


def test_fejer_special_points():
    assert fejer_identity_check(0.1, 10) <= 1e-12
    assert fejer(1e-12, 3) == pytest.approx(1)


def test_fejer_error_term_matches_oracle(chi10007):
    s = WindowSeries(chi10007, 50)
    provider = EmpiricalCF(s)
    for t in (0.3, 1.0, 3.0):
        for axis in ("re", "im"):
            for l in (-2.0, 0.0, 1.5):
                quad = fejer_error_term(provider, t, l, axis)
                assert quad == pytest.approx(fejer_direct(s, t, [l], axis)[0], abs=1e-9)


def test_fejer_error_term_far_l_bounded():
    g = GaussianCF()
    vals = [abs(fejer_error_term(g, 5.0, l)) for l in (10.0, 100.0, 1000.0)]
    assert max(vals) <= 1 / 5


def test_smoothed_rect_gaussian_substitution():
    R = Rectangle(-1, 1, -0.5, 1.5)
    errs = [abs(smoothed_rect_frequency(GaussianCF(), R, t) - gauss_rect_prob(R)) for t in (2.0, 8.0)]
    assert errs[1] < errs[0] < 0.5


def test_smoothed_rect_thin():
    vals = [abs(smoothed_rect_frequency(GaussianCF(), Rectangle(0, w, 0, w), 4.0)) for w in (0.1, 0.01)]
    assert vals[1] < vals[0]
    assert vals[1] <= math.pi**2 * 0.01**2 * 16


def test_paper_preset():
    p = paper_preset(10**6 + 3, 100)
    assert p.t == pytest.approx(math.sqrt(math.log(10**6 + 3) / math.log(100)) / (60 * math.pi))
    assert p.N == 1
