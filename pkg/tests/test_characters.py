import cmath

import numpy as np
import pytest

from charsums.characters import (character_of_order, class_counts, legendre, make_character,
                                 orthogonality_check, random_nonreal, unit_roots)
from charsums.errors import PreconditionError
from charsums.modarith import prime_context


def test_make_character_examples(ctx7):
    leg = make_character(ctx7, 3)
    assert leg.d == 2 and leg.is_real
    chi = make_character(ctx7, 1)
    assert chi.d == 6 and not chi.is_real
    with pytest.raises(PreconditionError):
        make_character(ctx7, 0)
    with pytest.raises(PreconditionError):
        make_character(ctx7, 6)


def test_legendre_matches_squares(ctx10007):
    q = ctx10007.q
    squares = {x * x % q for x in range(1, q)}
    leg = legendre(ctx10007)
    vals = leg.values(np.arange(1, q))
    assert np.array_equal(vals.real, np.array([1.0 if n in squares else -1.0 for n in range(1, q)]))
    assert leg.eval(2 * q) == 0


def test_legendre_mod7(leg7):
    assert leg7.eval(2) == 1 and leg7.eval(3) == -1 and leg7.eval(7) == 0


def test_value_class_examples(ctx7):
    chi = make_character(ctx7, 1)
    assert chi.value_class(3) == 1
    assert chi.value_class(1) == 0
    assert chi.value_class(7) == chi.zero_class
    assert abs(chi.eval(3) - cmath.exp(2j * cmath.pi / 6)) < 1e-15


def test_multiplicative_and_periodic(chi10007):
    rng = np.random.default_rng(0)
    m, n = rng.integers(1, 3 * chi10007.q, size=(2, 500))
    lhs = chi10007.values(m * n)
    assert np.allclose(lhs, chi10007.values(m) * chi10007.values(n), atol=1e-12)
    assert np.array_equal(chi10007.values(m), chi10007.values(m + chi10007.q))


def test_conjugate(chi10007):
    n = np.arange(1, 200)
    assert np.allclose(chi10007.conjugate().values(n), np.conj(chi10007.values(n)), atol=1e-12)


def test_unit_roots_exact_symmetry():
    for d in (3, 4, 6, 8, 12):
        c, s = unit_roots(np.arange(d), d)
        assert c.sum() == 0 or abs(c.sum()) < 1e-15
        assert c[0] == 1 and s[0] == 0


def test_orthogonality(leg7, ctx10007):
    assert orthogonality_check(leg7) == 0.0
    for k in (1, 2, 3, 5003, 10005):
        chi = make_character(ctx10007, k)
        counts = class_counts(chi)[: chi.d]
        assert (counts == counts[0]).all()
        assert orthogonality_check(chi) == 0.0


def test_character_of_order():
    ctx = prime_context(10000019)
    assert character_of_order(ctx, 7).d == 7
    with pytest.raises(PreconditionError):
        character_of_order(ctx, 3)


def test_random_nonreal_is_seeded(ctx10007):
    a, b = random_nonreal(ctx10007, 4), random_nonreal(ctx10007, 4)
    assert a.k == b.k and not a.is_real
