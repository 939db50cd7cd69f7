"""Short Dirichlet character sums modulo a prime and their Gaussian limit.

The package computes S(x) = sum_{x < n <= x+H} chi(n) for every starting
point x mod q in a single streaming pass and measures how close the
resulting distribution is to its Gaussian and random-walk models.
"""

__version__ = "0.1.0"

from .modarith import PrimeContext, is_prime, next_prime, prime_context
from .characters import CharacterSpec, make_character, legendre, character_of_order
from .window import WindowSeries
from .specfun import Rectangle

__all__ = [
    "PrimeContext",
    "is_prime",
    "next_prime",
    "prime_context",
    "CharacterSpec",
    "make_character",
    "legendre",
    "character_of_order",
    "WindowSeries",
    "Rectangle",
]
