"""Band-limited approximations of signum and interval indicators.

All integrals over u in [0, t] with weight du/u are rewritten on s = u/t in
[0, 1] with the 1/u factor absorbed into sinc-type expressions, so every
integrand is smooth at the origin.

The CF-driven quantities take a *provider*: any object with
``grid(us, vs) -> Phi[i, j]`` and a ``bandwidth`` attribute bounding the
normalized sums (it sets how many quadrature nodes are needed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .specfun import Rectangle, composite_gauss_legendre, gauss_legendre, integrate

_EDGE = 1e-3
TWO_OVER_PI = 2.0 / math.pi


def G(u):
    """2u/pi + 2(1-u) u cot(pi u) on [0, 1], with the endpoint limits G(0)=2/pi, G(1)=0."""
    scalar = np.ndim(u) == 0
    u = np.atleast_1d(np.asarray(u, dtype=np.float64))
    if np.any((u < 0) | (u > 1)) or np.any(np.isnan(u)):
        raise PreconditionError("G is defined on [0, 1] only")
    out = np.empty_like(u)
    lo = u < _EDGE
    hi = u > 1 - _EDGE
    mid = ~(lo | hi)
    um = u[mid]
    out[mid] = TWO_OVER_PI * um + 2 * (1 - um) * um / np.tan(np.pi * um)
    # u cot(pi u) = (1/pi)(1 - (pi u)^2/3 - (pi u)^4/45 - 2 (pi u)^6/945)
    for mask, w_of in ((lo, lambda x: x), (hi, lambda x: 1 - x)):
        x = u[mask]
        w = w_of(x)
        z = (np.pi * w) ** 2
        wcot = (1 - z / 3 - z * z / 45 - 2 * z**3 / 945) / np.pi
        if mask is lo:
            out[mask] = TWO_OVER_PI * x + 2 * (1 - x) * wcot
        else:
            # cot(pi u) = -cot(pi w) with w = 1 - u
            out[mask] = TWO_OVER_PI * x - 2 * x * wcot
    return float(out[0]) if scalar else out


def f_ab(alpha: float, beta: float, u):
    """(e^{-2 pi i alpha u} - e^{-2 pi i beta u}) / 2."""
    u = np.asarray(u, dtype=np.float64)
    return 0.5 * (np.exp(-2j * np.pi * alpha * u) - np.exp(-2j * np.pi * beta * u))


def f_ab_over_u(alpha: float, beta: float, u):
    """f_ab(u)/u, finite at u = 0 (limit pi i (beta - alpha))."""
    u = np.asarray(u, dtype=np.float64)
    return 1j * np.pi * (beta - alpha) * np.exp(-1j * np.pi * (alpha + beta) * u) * np.sinc((beta - alpha) * u)


def f_ab_bound(alpha: float, beta: float, u):
    """pi u |beta - alpha| >= |f_ab(u)|."""
    return np.pi * np.asarray(u) * abs(beta - alpha)


def fejer(x, t):
    """(sin(pi t x) / (pi t x))^2."""
    return np.sinc(t * np.asarray(x)) ** 2


def sgn_approx(x: float, t: float, tol: float = 1e-10) -> float:
    """int_0^t G(u/t) sin(2 pi u x) du/u."""
    if t <= 0:
        raise PreconditionError("t must be positive")
    if x == 0:
        return 0.0
    # sin(2 pi t s x)/s = 2 pi t x sinc(2 t s x)
    return integrate(lambda s: G(s) * 2 * np.pi * t * x * np.sinc(2 * t * s * x), 0.0, 1.0, tol=tol).value


def indicator_approx(x: float, alpha: float, beta: float, t: float, tol: float = 1e-10) -> float:
    """Im int_0^t G(u/t) e^{2 pi i u x} f_ab(u) du/u."""
    if not alpha < beta:
        raise PreconditionError("need alpha < beta")
    if t <= 0:
        raise PreconditionError("t must be positive")

    def integrand(s):
        u = t * s
        return G(s) * np.imag(np.exp(2j * np.pi * u * x) * t * f_ab_over_u(alpha, beta, u))

    return integrate(integrand, 0.0, 1.0, tol=tol).value


def gaussian_smoothed_interval(a: float, b: float, t: float, tol: float = 1e-11) -> float:
    """Im int_0^t G(u/t) exp(-(2 pi u)^2/2) f_ab(u) du/u."""
    if not a < b:
        raise PreconditionError("need a < b")
    if t <= 0:
        raise PreconditionError("t must be positive")

    def integrand(s):
        u = t * s
        return G(s) * np.exp(-0.5 * (2 * np.pi * u) ** 2) * np.imag(t * f_ab_over_u(a, b, u))

    # the Gaussian factor is negligible beyond u = 7/(2 pi)
    hi = min(1.0, 7.0 / (2 * np.pi * t) * 1.2)
    return integrate(integrand, 0.0, hi, tol=tol).value


def fejer_identity_check(x: float, t: float, tol: float = 1e-12) -> float:
    """|Fejer(x) - (2/t^2) int_0^t (t - v) cos(2 pi x v) dv|."""
    rhs = 2 / t**2 * integrate(lambda v: (t - v) * np.cos(2 * np.pi * x * v), 0.0, t, tol=tol).value
    return abs(float(fejer(x, t)) - rhs)


def _panels(t: float, freq: float) -> int:
    # 16 Gauss nodes per oscillation of exp(2 pi i v freq) on [0, t]
    return max(2, math.ceil(t * freq) + 1)


def fejer_error_term(provider, t: float, l: float, axis: str = "re", order: int = 16) -> float:
    """Re int_0^t 2(t - v)/t^2 e^{-2 pi i v l} Phi(2 pi v, 0) dv (axis 're'),
    or with Phi(0, 2 pi v) (axis 'im')."""
    if t <= 0:
        raise PreconditionError("t must be positive")
    v, w = composite_gauss_legendre(order, 0.0, t, _panels(t, provider.bandwidth + abs(l)))
    if axis == "re":
        phi = provider.grid(2 * np.pi * v, [0.0])[:, 0]
    elif axis == "im":
        phi = provider.grid([0.0], 2 * np.pi * v)[0, :]
    else:
        raise PreconditionError(f"axis must be 're' or 'im', got {axis!r}")
    integrand = 2 * (t - v) / t**2 * np.exp(-2j * np.pi * v * l) * phi
    return float(np.real(np.sum(w * integrand)))


class _FejerSink:
    def __init__(self, t, ls, factor, axis):
        self.t, self.ls, self.factor, self.axis = t, np.asarray(ls, float), factor, axis

    def partial(self, x0, values):
        comp = (values.real if self.axis == "re" else values.imag) * self.factor
        return np.array([math.fsum(fejer(comp - l, self.t)) for l in self.ls])

    def combine(self, partials):
        return np.array([math.fsum(p[i] for p in partials) for i in range(len(self.ls))])


def fejer_direct(source, t: float, ls, axis: str = "re", normalization: str = "complex") -> np.ndarray:
    """(1/q) sum_x Fejer(component of S~(x) - l) for each l: the oracle for fejer_error_term."""
    from .window import norm_scale
    factor = source.scale / norm_scale(normalization, source.H)
    return source.reduce(_FejerSink(t, np.atleast_1d(ls), factor, axis)) / source.q


def smoothed_rect_frequency(provider, R: Rectangle, t: float, nodes: int | None = None) -> float:
    """Main term of the smoothed rectangle count, by tensor Gauss-Legendre on [0, t]^2.

    (1/2) Re int int G(u/t) G(v/t) [Phi(2 pi u, -2 pi v) f_ab(u) conj f_cd(v)
    - Phi(2 pi u, 2 pi v) f_ab(u) f_cd(v)] du/u dv/v, with Phi from a single
    batched provider call.
    """
    if t <= 0:
        raise PreconditionError("t must be positive")
    if nodes is None:
        corner = max(abs(R.a), abs(R.b), abs(R.c), abs(R.d))
        nodes = min(1024, max(64, 16 * math.ceil(t * (provider.bandwidth + corner))))
    u, w = gauss_legendre(nodes, 0.0, t)
    gw = w * G(u / t)
    fa = gw * f_ab_over_u(R.a, R.b, u)
    fc = gw * f_ab_over_u(R.c, R.d, u)
    phi = provider.grid(2 * np.pi * u, np.concatenate((-2 * np.pi * u, 2 * np.pi * u)))
    phi_minus, phi_plus = phi[:, :nodes], phi[:, nodes:]
    total = fa @ (phi_minus @ np.conj(fc)) - fa @ (phi_plus @ fc)
    return 0.5 * float(np.real(total))


def fejer_budget(provider, R: Rectangle, t: float) -> dict[str, float]:
    """I(t,a) + I(t,b) + J(t,c) + J(t,d): the expected scale of the smoothing error."""
    parts = {
        "I_a": fejer_error_term(provider, t, R.a, "re"),
        "I_b": fejer_error_term(provider, t, R.b, "re"),
        "J_c": fejer_error_term(provider, t, R.c, "im"),
        "J_d": fejer_error_term(provider, t, R.d, "im"),
    }
    parts["total"] = math.fsum(parts.values())
    return parts


@dataclass(frozen=True)
class SmoothingParams:
    t: float
    N: int
    tol: float = 1e-10

    def __post_init__(self):
        if self.t <= 0:
            raise PreconditionError("t must be positive")


def paper_preset(q: int, H: int) -> SmoothingParams:
    """t = min(H^(1/4), sqrt(log q / log H) / (60 pi)), N = max(1, floor((8 pi t)^2))."""
    if H <= 1:
        t = 1.0
    else:
        t = min(H**0.25, math.sqrt(math.log(q) / math.log(H)) / (60 * math.pi))
    return SmoothingParams(t=t, N=max(1, math.floor((8 * math.pi * t) ** 2)))
