import pytest

from charsums.characters import legendre, make_character
from charsums.modarith import prime_context


@pytest.fixture(scope="session")
def ctx7():
    return prime_context(7)


@pytest.fixture(scope="session")
def ctx10007():
    return prime_context(10007)


@pytest.fixture(scope="session")
def leg7(ctx7):
    return legendre(ctx7)


@pytest.fixture(scope="session")
def chi10007(ctx10007):
    """The order q-1 character (float window mode)."""
    return make_character(ctx10007, 1)
