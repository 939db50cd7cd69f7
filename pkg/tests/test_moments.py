from fractions import Fraction

import numpy as np
import pytest

from charsums.acceptance import brute_force_B
from charsums.characters import make_character
from charsums.errors import PreconditionError, WeilViolation
from charsums.moments import (empirical_moment, model_coefficient, model_moment, moment_table,
                              multiset_count_B, prop22_compare, shifted_product_sum, weil_check)
from charsums.window import WindowSeries


def test_B_examples():
    assert [multiset_count_B(1, H) for H in range(1, 6)] == list(range(1, 6))
    assert multiset_count_B(2, 3) == 15
    assert all(multiset_count_B(2, H) == 2 * H * H - H for H in range(1, 11))
    assert multiset_count_B(0, 9) == 1


def test_B_against_enumeration():
    for m in range(5):
        for H in range(1, 7):
            assert multiset_count_B(m, H) == brute_force_B(m, H)


def test_B_cap():
    with pytest.raises(PreconditionError):
        multiset_count_B(9, 3)


def test_coefficient_examples():
    assert model_coefficient(2, 0) == Fraction(1, 2)
    assert model_coefficient(1, 1) == 0
    assert model_coefficient(4, 0) == Fraction(3, 8)
    assert model_coefficient(3, 0) == 0


def test_coefficients_match_circle_average():
    # E[cos^r sin^s] over the uniform angle, by an exact-enough equispaced rule
    th = 2 * np.pi * np.arange(64) / 64
    for r in range(7):
        for s in range(7 - r):
            m = (r + s) // 2
            if (r + s) % 2:
                continue
            expect = np.mean(np.cos(th) ** r * np.sin(th) ** s)
            # c(r, s) B_m(1) = E[(Re X)^r (Im X)^s] with B_m(1) = 1
            assert float(model_coefficient(r, s)) == pytest.approx(expect, abs=1e-14)


def test_model_moment_examples():
    H = 50
    assert model_moment(2, 0, H) == Fraction(H, 2)
    assert model_moment(1, 1, H) == 0
    assert model_moment(4, 0, H) == Fraction(3, 8) * (2 * H * H - H) == Fraction(7425, 4)
    assert model_moment(3, 2, H) == 0


def test_empirical_moment_q7(leg7):
    s = WindowSeries(leg7, 2)
    assert empirical_moment(s, 0, 0) == 1
    assert empirical_moment(s, 2, 0) == pytest.approx(10 / 7, abs=1e-15)


def test_moment_table_and_compare(chi10007):
    table = moment_table(WindowSeries(chi10007, 3))
    assert table[(0, 0)].diff == 0
    rows = {(r["r"], r["s"]): r for r in prop22_compare(table)}
    assert np.isfinite(rows[(2, 0)]["ratio"])
    assert not rows[(8, 0)]["hypothesis_ok"]
    assert rows[(2, 0)]["hypothesis_ok"]


def test_moment_csv(tmp_path, chi10007):
    p = tmp_path / "m.csv"
    moment_table(WindowSeries(chi10007, 3), [(0, 0), (2, 0)]).write_csv(p, "hdr")
    lines = p.read_text().splitlines()
    assert lines[0] == "# hdr"
    assert lines[1] == "r,s,empirical,model,diff,bound,ratio,hypothesis_ok"


def test_shifted_product_examples(leg7, chi10007):
    assert shifted_product_sum(leg7, (1,), (1,)).value == 6
    assert shifted_product_sum(leg7, (1,), (2,)).value == -1
    r = shifted_product_sum(chi10007, (3, 3, 9), (9, 3, 3))
    assert r.diagonal and r.value == 10007 - 2


def test_shifted_product_brute(ctx7):
    chi = make_character(ctx7, 1)
    ys, zs = (1, 4), (2,)
    brute = sum(chi.eval((x + 1) * (x + 4)) * np.conj(chi.eval(x + 2)) for x in range(7))
    assert abs(shifted_product_sum(chi, ys, zs).value - brute) < 1e-12


def test_degenerate_tuples_flagged(leg7):
    # (x+1)^2 against nothing is a square for the Legendre symbol
    assert shifted_product_sum(leg7, (1, 1), ()).degenerate


def test_weil_check(chi10007, ctx10007):
    rep = weil_check(chi10007, 30, 2, 1, 100, seed=3)
    assert len(rep.checks) == 30 and rep.max_ratio <= 1
    leg = make_character(ctx10007, 5003)
    rep = weil_check(leg, 30, 2, 2, 20, seed=3)
    assert rep.max_ratio <= 1 and all(c.degenerate for c in rep.flagged)


def test_weil_violation_is_raised(monkeypatch, chi10007):
    import charsums.moments as mod
    real = mod.shifted_product_sum

    def inflated(chi, ys, zs):
        r = real(chi, ys, zs)
        r.value = 10 * r.bound
        return r

    monkeypatch.setattr(mod, "shifted_product_sum", inflated)
    with pytest.raises(WeilViolation):
        weil_check(chi10007, 5, 1, 1, 10)
