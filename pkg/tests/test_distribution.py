import math

import numpy as np
import pytest

from charsums.characters import make_character
from charsums.distribution import (conjecture1_preset, default_family, discrepancy, interval_report, ks_1d_real,
                                   rect_counts, rect_frequency, theorem1_bound)
from charsums.errors import PreconditionError
from charsums.specfun import Rectangle
from charsums.window import WindowSeries


def brute_count(vals, R):
    return sum(R.a <= z.real <= R.b and R.c <= z.imag <= R.d for z in vals)


def test_default_family_size():
    fam = default_family()
    assert len(fam) == 78 * 78 and len(set(fam)) == len(fam)


def test_counts_match_brute(chi10007):
    s = WindowSeries(chi10007, 8)
    vals = s.raw_values() / math.sqrt(4)
    fam = [Rectangle(-1, 1, -1, 1), Rectangle(-0.5, 2, -3, 0), Rectangle(0, 0.5, 0, 0.5)]
    assert rect_counts(s, fam).tolist() == [brute_count(vals, R) for R in fam]


def test_closed_boundary(leg7):
    # Legendre q=7, H=2 has values 2,0,0,0,-2,-1,1 on the real axis; sqrt(H/2) = 1
    s = WindowSeries(leg7, 2)
    assert rect_counts(s, [Rectangle(0, 1, -1, 0)])[0] == 4
    assert rect_counts(s, [Rectangle(0, 1, 0, 1)])[0] == 4


def test_all_mass(chi10007):
    assert rect_frequency(WindowSeries(chi10007, 100), Rectangle(-1e6, 1e6, -1e6, 1e6)) == 1


def test_theorem1_bound_example():
    assert theorem1_bound(4.0, 10**7 + 19, 100) == pytest.approx(4.2535, abs=1e-3)


def test_discrepancy_report(tmp_path, chi10007, ctx10007):
    rep = discrepancy(WindowSeries(chi10007, 50))
    assert len(rep.rows) == 6084 and rep.max_gap < 0.2 and rep.bound_vacuous
    p = tmp_path / "d.csv"
    rep.write_csv(p, "hdr")
    lines = p.read_text().splitlines()
    assert lines[2] == "rect_a,rect_b,rect_c,rect_d,mu2,emp_freq,gauss_prob,gap,thm1_bound,exploratory_flag"
    assert len(lines) == 3 + 6084
    with pytest.raises(PreconditionError):
        discrepancy(WindowSeries(make_character(ctx10007, 5003), 50))


def test_ks_examples(ctx10007):
    leg = make_character(ctx10007, 5003)
    assert ks_1d_real(WindowSeries(leg, 1)) == pytest.approx(0.5 - 0.15865525393145707, abs=1e-3)
    with pytest.raises(PreconditionError):
        ks_1d_real(WindowSeries(make_character(ctx10007, 1), 5))


def test_ks_brute(ctx10007):
    leg = make_character(ctx10007, 5003)
    H = 30
    s = np.sort(WindowSeries(leg, H).raw_values().real / math.sqrt(H))
    from scipy import stats
    assert ks_1d_real(WindowSeries(leg, H)) == pytest.approx(stats.kstest(s, "norm").statistic, abs=1e-12)


def test_interval_and_conjecture(ctx10007, chi10007):
    leg = make_character(ctx10007, 5003)
    rep = interval_report(WindowSeries(leg, 50))
    assert rep.ks is not None and all(r.c == r.d == 0 for r in rep.rows)
    c = conjecture1_preset(chi10007, 400)
    assert c.exploratory and len(c.rows) == 6084
