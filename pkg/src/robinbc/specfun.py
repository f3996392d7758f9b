"""Special functions over complex arguments.

Log-gamma, digamma, Kummer's M and Tricomi's U, plus Euler's product for the
gamma function (kept as an independent, slowly converging cross-check).

All functions are pure; scalar in, scalar out.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, PoleError, SeriesRadiusError

EULER_GAMMA = 0.57721566490153286061
_HALF_LOG_2PI = 0.91893853320467274178

# B_{2k} / (2k (2k - 1)), Stirling series for log-gamma
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)
# B_{2k} / (2k), asymptotic series for digamma
_DIGAMMA_ASYM = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)

_LGAMMA_SHIFT = 15.0
_DIGAMMA_SHIFT = 10.0

INTEGER_B_SHIFT = 1e-5
KUMMER_RADIUS = 50.0


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for power series.

    A series stops once three consecutive terms fall below
    ``abs_tol + rel_tol * |partial sum|`` while the terms are shrinking.
    """

    max_terms: int = 100_000
    abs_tol: float = 1e-15
    rel_tol: float = 1e-13

    def __post_init__(self):
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be non-negative")
        if self.abs_tol == 0 and self.rel_tol == 0:
            raise ValueError("at least one tolerance must be positive")


DEFAULT_SERIES = SeriesControl()


def _nonpositive_integer(z: complex, tol: float = 0.0) -> bool:
    z = complex(z)
    if z.imag != 0.0 or z.real > tol:
        return False
    return abs(z.real - round(z.real)) <= tol


def log_gamma(z) -> complex:
    """Principal branch of log Gamma(z).

    Continuous off the cut along the non-positive real axis and real on the
    positive real axis. Uses upward recurrence to Re z >= 15 followed by the
    Stirling series.
    """
    z = complex(z)
    if _nonpositive_integer(z, 1e-300):
        raise PoleError(f"log_gamma pole at z={z}")
    shift = 0.0j
    if z.real < _LGAMMA_SHIFT:
        n = int(math.ceil(_LGAMMA_SHIFT - z.real))
        # sum of principal logs keeps the branch of the analytic continuation
        for j in range(n):
            shift += cmath.log(z + j)
        z = z + n
    w = 1.0 / z
    w2 = w * w
    series = 0.0j
    p = w
    for c in _STIRLING:
        series += c * p
        p *= w2
    return (z - 0.5) * cmath.log(z) - z + _HALF_LOG_2PI + series - shift


def gamma(z) -> complex:
    """Gamma(z) as exp(log_gamma(z))."""
    return cmath.exp(log_gamma(z))


def rgamma(z) -> complex:
    """1/Gamma(z), exactly zero at the poles of Gamma."""
    if _nonpositive_integer(z):
        return 0.0j
    return cmath.exp(-log_gamma(z))


def digamma(z):
    """Digamma psi(z) = d/dz log Gamma(z).

    Real input gives a float, complex input a complex.
    """
    is_real = not isinstance(z, complex) or z.imag == 0.0
    z = complex(z)
    if _nonpositive_integer(z):
        raise PoleError(f"digamma pole at z={z}")
    acc = 0.0j
    while z.real < _DIGAMMA_SHIFT:
        acc -= 1.0 / z
        z += 1.0
    w = 1.0 / z
    w2 = w * w
    series = 0.0j
    p = w2
    for c in _DIGAMMA_ASYM:
        series += c * p
        p *= w2
    value = cmath.log(z) - 0.5 * w - series + acc
    return value.real if is_real else value


def euler_product_gamma(t, n_terms: int) -> complex:
    """Gamma(t) from Euler's infinite product truncated after ``n_terms`` factors.

    Converges like O(t^2 / n_terms); meant for validating :func:`log_gamma`.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    t = complex(t)
    if _nonpositive_integer(t):
        raise PoleError(f"Euler product pole at t={t}")
    n = np.arange(1, n_terms + 1, dtype=np.float64)
    u = t / n
    if t.imag == 0.0:
        terms = u.real - np.log1p(u.real)
    else:
        terms = u - np.log(1.0 + u)
    log_prod = complex(np.sum(terms))
    return cmath.exp(log_prod - EULER_GAMMA * t) / t


def _series_1f1(a: complex, b: complex, y: complex, ctl: SeriesControl):
    term = 1.0 + 0.0j
    total = 1.0 + 0.0j
    biggest = 1.0
    small = 0
    for n in range(ctl.max_terms):
        ratio = (a + n) / (b + n) * y / (n + 1)
        term *= ratio
        total += term
        mag = abs(term)
        biggest = max(biggest, mag)
        if term == 0.0:
            return total, 0.0, n + 1
        # terms can dip and regrow while |ratio| > 1; only count shrinking tails
        if mag <= ctl.abs_tol + ctl.rel_tol * abs(total) and abs(ratio) < 0.5:
            small += 1
            if small >= 3:
                err = mag + 2.2e-16 * biggest * math.sqrt(n + 1)
                return total, err, n + 1
        else:
            small = 0
    raise ConvergenceError(f"Kummer series did not converge in {ctl.max_terms} terms")


def kummer_m(a, b, y, ctl: SeriesControl | None = None, *, radius: float = KUMMER_RADIUS,
             full_output: bool = False):
    """Kummer's confluent hypergeometric function M(a, b, y) by its power series.

    Non-terminating series are refused for ``|y| > radius``; when ``a`` is a
    non-positive integer the series is a polynomial and any ``y`` is allowed.

    Returns the value, or ``(value, error_estimate)`` with ``full_output``.
    """
    ctl = ctl or DEFAULT_SERIES
    a, b, y = complex(a), complex(b), complex(y)
    terminating = _nonpositive_integer(a)
    if _nonpositive_integer(b) and not (terminating and a.real > b.real):
        raise PoleError(f"Kummer M undefined for b={b}")
    if abs(y) > radius and not terminating:
        raise SeriesRadiusError(f"|y|={abs(y):.6g} exceeds series radius {radius}")
    value, err, _ = _series_1f1(a, b, y, ctl)
    return (value, err) if full_output else value


def _pochhammer(x: complex, n: int) -> complex:
    out = 1.0 + 0.0j
    for j in range(n):
        out *= x + j
    return out


def _power(y: complex, s: complex) -> complex:
    if y == 0:
        if s.real > 0:
            return 0.0j
        raise PoleError("y**(1-b) diverges at y=0")
    return cmath.exp(s * cmath.log(y))


def _tricomi_connection(a: complex, b: complex, y: complex, ctl: SeriesControl) -> complex:
    c = a - b + 1.0
    first = 0.0j
    if not _nonpositive_integer(c):
        first = cmath.exp(log_gamma(1.0 - b) - log_gamma(c)) * kummer_m(a, b, y, ctl)
    second = 0.0j
    if not _nonpositive_integer(a):
        second = (cmath.exp(log_gamma(b - 1.0) - log_gamma(a))
                  * _power(y, 1.0 - b) * kummer_m(c, 2.0 - b, y, ctl))
    return first + second


def tricomi_u(a, b, y, ctl: SeriesControl | None = None) -> complex:
    """Tricomi's confluent hypergeometric function U(a, b, y).

    Built from the two Kummer solutions with the gamma-function weights that
    cancel the exponential growth at large ``y``. Integer ``b`` (where the
    weights are singular) is evaluated as the mean of ``b +/- 1e-5``, and ``b``
    closer than that to an integer by linear interpolation between the two. For
    ``a = -n`` the result is the polynomial ``(-1)^n (b)_n M(-n, b, y)``.
    """
    ctl = ctl or DEFAULT_SERIES
    a, b, y = complex(a), complex(b), complex(y)
    if _nonpositive_integer(a):
        n = int(round(-a.real))
        return (-1) ** n * _pochhammer(b, n) * kummer_m(a, b, y, ctl)
    if b.imag == 0.0 and abs(b.real - round(b.real)) < INTEGER_B_SHIFT:
        # the weights cancel to ~1e-16 / |b - n| here; interpolate instead
        n, eps = round(b.real), INTEGER_B_SHIFT
        lo = _tricomi_connection(a, complex(n - eps), y, ctl)
        hi = _tricomi_connection(a, complex(n + eps), y, ctl)
        t = (b.real - n) / eps
        return 0.5 * (lo + hi) + 0.5 * t * (hi - lo)
    return _tricomi_connection(a, b, y, ctl)
