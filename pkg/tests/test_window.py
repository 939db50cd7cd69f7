from fractions import Fraction

import numpy as np
import pytest

from charsums.characters import make_character
from charsums.errors import PreconditionError
from charsums.modarith import prime_context
from charsums.window import (PowerSumSink, SeriesDump, WindowSeries, exact_second_moment,
                             mean_and_component_variances)


def brute_series(chi, H):
    return np.array([sum(chi.eval(n) for n in range(x + 1, x + H + 1)) for x in range(chi.q)])


def test_q7_legendre_series(leg7):
    s = WindowSeries(leg7, 2)
    assert s.raw_values().real.tolist() == [2, 0, 0, 0, -2, -1, 1]
    assert s.exact_sum_is_zero()
    assert np.abs(s.raw_values()).__pow__(2).mean() == pytest.approx(10 / 7, abs=1e-15)


@pytest.mark.parametrize("q", [7, 11, 101])
def test_second_moment_identity_brute(q):
    ctx = prime_context(q)
    for k in range(1, q - 1):
        chi = make_character(ctx, k)
        for H in (1, 2, q // 2, q - 1):
            v = brute_series(chi, H)
            assert np.mean(np.abs(v) ** 2) == pytest.approx(float(exact_second_moment(q, H)), rel=1e-12)


def test_exact_second_moment_examples():
    assert exact_second_moment(7, 2) == Fraction(10, 7)
    assert exact_second_moment(7, 6) == Fraction(6, 7)


@pytest.mark.parametrize("k", [1, 2, 3, 5003, 10005])
@pytest.mark.parametrize("H", [1, 17, 5003])
def test_streaming_matches_direct(ctx10007, k, H):
    chi = make_character(ctx10007, k)
    s = WindowSeries(chi, H, chunk_size=4096)
    v = s.raw_values()
    for x in (0, 1, 4095, 4096, 9000, 10006):
        assert abs(v[x] - s.direct(x)) < 1e-9
    assert s.exact_sum_is_zero()


def test_modes(ctx10007):
    assert WindowSeries(make_character(ctx10007, 5003), 5).mode == "exact"
    assert WindowSeries(make_character(ctx10007, 1), 5).mode == "float"


def test_exact_mode_conjugate_symmetry():
    ctx = prime_context(10009)
    chi = make_character(ctx, (ctx.q - 1) // 9)
    a = WindowSeries(chi, 40).raw_values()
    b = WindowSeries(chi.conjugate(), 40).raw_values()
    assert np.array_equal(a, np.conj(b))


def test_chunk_size_independent(chi10007):
    a = WindowSeries(chi10007, 100, chunk_size=1000).raw_values()
    b = WindowSeries(chi10007, 100, chunk_size=65536).raw_values()
    assert np.allclose(a, b, atol=1e-10)


def test_threads_identical(chi10007):
    sink_pairs = [(2, 0), (1, 1), (4, 0)]
    a = WindowSeries(chi10007, 50, chunk_size=512, threads=1)
    b = WindowSeries(chi10007, 50, chunk_size=512, threads=8)
    assert a.reduce(PowerSumSink(sink_pairs, a)) == b.reduce(PowerSumSink(sink_pairs, b))


def test_rejects_bad_H(leg7):
    with pytest.raises(PreconditionError):
        WindowSeries(leg7, 7)
    with pytest.raises(PreconditionError):
        WindowSeries(leg7, 0)


def test_mean_and_variances(ctx10007, chi10007):
    mean, vre, vim = mean_and_component_variances(WindowSeries(chi10007, 50))
    assert mean == 0
    assert 0.8 * 25 <= vre <= 1.2 * 25
    leg = make_character(ctx10007, 5003)
    mean, vre, vim = mean_and_component_variances(WindowSeries(leg, 50))
    assert vre + vim == pytest.approx(50 * (10007 - 50) / 10007, rel=1e-12)


def test_dump_roundtrip(tmp_path, leg7, ctx10007):
    s = WindowSeries(leg7, 2)
    d = SeriesDump(s.dump(tmp_path / "s.csum"))
    assert (d.q, d.H, d.k, d.normalization) == (7, 2, 3, "none")
    assert np.array_equal(d.raw_values(), s.raw_values())
    chi = make_character(ctx10007, 1)
    s = WindowSeries(chi, 30, "complex")
    d = SeriesDump(s.dump(tmp_path / "c.csum"))
    assert np.allclose(d.values(), s.values(), atol=1e-6)


def test_dump_rejects_garbage(tmp_path):
    p = tmp_path / "bad.csum"
    p.write_bytes(b"XXXX" + bytes(40))
    with pytest.raises(ValueError):
        SeriesDump(p)
