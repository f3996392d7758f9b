"""Morse potential: exact scattering phase, low-energy limit, bound spectrum.

The phase is referred to the origin (``x_b = 0``): ``psi ~ sin(k x + theta)``
for x -> inf. The exact phase follows from the large-x limit of the
normalizable solution ``exp(-i k x) exp(-y/2) U(A, B, y)`` with
``y = (2 kappa / alpha) exp(-alpha x)``:

    exp(2 i theta) = - Gamma(2ik/a) Gamma(c - ik/a) / (Gamma(-2ik/a) Gamma(c + ik/a))
                     * (2 kappa / a)^(-2ik/a),        c = (a - kappa) / (2a).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .effective import BoundState, EffectiveModel, make_bound_state
from .errors import DomainError, PoleError, RobinBCError
from .potentials import Kind, PotentialSpec
from .specfun import EULER_GAMMA

UNITARITY_TOL = 1e-10
DEFAULT_TERMS = 100_000


@dataclass(frozen=True)
class MorseCheParams:
    """Parameters of the confluent hypergeometric equation for one state."""

    A: complex
    B: complex
    y_scale: float


@dataclass(frozen=True)
class MorseSpectrum:
    n_max: int | None
    states: list[BoundState] = field(default_factory=list)


def _require(p: PotentialSpec):
    if p.kind is not Kind.MORSE:
        raise TypeError(f"expected a Morse potential, got {p.kind.value}")


def scattering_params(p: PotentialSpec, k: float) -> MorseCheParams:
    a = p.alpha
    B = 1.0 + 2j * k / a
    A = 0.5 * (B - p.kappa / a)
    return MorseCheParams(A=A, B=B, y_scale=2 * p.kappa / a)


def bound_params(p: PotentialSpec, q: float) -> MorseCheParams:
    a = p.alpha
    return MorseCheParams(A=complex((2 * q + a - p.kappa) / (2 * a)),
                          B=complex(2 * q / a + 1.0), y_scale=2 * p.kappa / a)


def _arg_gamma_from_zero(c: float, tau: float) -> float:
    """arg Gamma(c + i tau) continued in tau from 0 at tau = 0 (c not a pole)."""
    n = max(0, math.ceil(1.0 - c))
    out = specfun.log_gamma(complex(c + n, tau)).imag
    for j in range(n):
        d = c + j
        out -= math.copysign(0.5 * math.pi, tau) if d == 0.0 else math.atan(tau / d)
    return out


def exact_phase(p: PotentialSpec, k: float) -> float:
    """Exact phase, continuous in k with theta -> 0 as k -> 0+.

    Assembled from imaginary parts of log-gamma so large kappa/alpha cannot
    overflow; unitarity of the gamma-function ratio is checked first.
    """
    _require(p)
    if not k > 0:
        raise DomainError(f"k must be positive, got {k}")
    a, kap = p.alpha, p.kappa
    c = 0.5 * (a - kap) / a
    tau = k / a
    threshold = c <= 0 and c == round(c)
    if threshold and k < 1e-12:
        raise PoleError("zero-energy resonance: kappa is an odd multiple of alpha")
    lg = specfun.log_gamma
    modulus = (lg(2j * tau) - lg(-2j * tau)).real
    if not threshold:
        modulus += (lg(complex(c, -tau)) - lg(complex(c, tau))).real
    if abs(modulus) > UNITARITY_TOL:
        raise RobinBCError(f"|exp(2i theta)| deviates from 1 by {modulus:.3g}")
    return (lg(complex(1.0, 2 * tau)).imag - _arg_gamma_from_zero(c, tau)
            - tau * math.log(2 * kap / a))


def phase_curve(p: PotentialSpec, ks) -> np.ndarray:
    return np.array([exact_phase(p, float(k)) for k in ks])


def phase_product_form(p: PotentialSpec, k: float, n_terms: int = DEFAULT_TERMS) -> float:
    """Phase from the truncated Euler-product form, modulo pi in (-pi/2, pi/2]."""
    _require(p)
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    a, kap = p.alpha, p.kappa
    n = np.arange(1, n_terms + 1, dtype=np.float64)
    t = 2j * k / a
    d = a - kap
    factors = ((1 - t / n) * (1 + (d + 2j * k) / (2 * a * n))
               / ((1 + t / n) * (1 + (d - 2j * k) / (2 * a * n))) * np.exp(t / n))
    pre = cmath.exp(-t * (math.log(2 * kap / a) + EULER_GAMMA)) * (d + 2j * k) / (d - 2j * k)
    total = pre * complex(np.prod(factors))
    theta = 0.5 * cmath.phase(total)
    return theta if theta > -0.5 * math.pi else theta + math.pi


def phase_arctan_sum(p: PotentialSpec, k: float, n_terms: int = DEFAULT_TERMS) -> float:
    """Phase as a sum of arctangents truncated after ``n_terms``.

    Continuous in k with the same branch as :func:`exact_phase`. The neglected
    tail is about :func:`arctan_sum_tail`.
    """
    _require(p)
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    a, kap = p.alpha, p.kappa
    n = np.arange(1, n_terms + 1, dtype=np.float64)
    with np.errstate(divide="ignore"):
        head = -(k / a) * (math.log(2 * kap / a) + EULER_GAMMA) + np.arctan(2 * k / np.float64(a - kap))
        terms = np.arctan(2 * k / (a * (2 * n + 1) - kap)) - np.arctan(2 * k / (a * n)) + k / (a * n)
    return float(head + np.sum(terms))


def arctan_sum_tail(p: PotentialSpec, k: float, n_terms: int) -> float:
    """Leading-order remainder of :func:`phase_arctan_sum` beyond ``n_terms``."""
    a = p.alpha
    return -k * (a - p.kappa) / (2 * a * a * (n_terms + 0.5))


def low_energy_L(p: PotentialSpec) -> float:
    """Scattering length (2 gamma + ln(2 kappa/alpha) + psi(1/2 - kappa/2alpha)) / alpha.

    Raises PoleError when kappa is an odd multiple of alpha.
    """
    _require(p)
    a, kap = p.alpha, p.kappa
    return (2 * EULER_GAMMA + math.log(2 * kap / a) + specfun.digamma(0.5 - 0.5 * kap / a)) / a


def lambda_cut(p: PotentialSpec) -> float:
    _require(p)
    return 1.0 / p.alpha


def q_of_n(p: PotentialSpec, n: int) -> float:
    return 0.5 * (p.kappa - (2 * n + 1) * p.alpha)


def bound_spectrum(p: PotentialSpec, validity_ratio: float = 10.0) -> MorseSpectrum:
    """States q(n) = (kappa - (2n+1) alpha)/2 > 0; ``n_max`` is None when empty."""
    _require(p)
    states = []
    n = 0
    cut = lambda_cut(p)
    while (q := q_of_n(p, n)) > 0:
        states.append(make_bound_state(q, p.m, n, cut, validity_ratio))
        n += 1
    return MorseSpectrum(n_max=(n - 1) if states else None, states=states)


def asymptotic_coefficients(p: PotentialSpec, k: float) -> tuple[complex, complex]:
    """Coefficients of exp(-ikx) and exp(+ikx) in the large-x wavefunction."""
    par = scattering_params(p, k)
    A, B = par.A, par.B
    lg = specfun.log_gamma
    c_in = cmath.exp(lg(1 - B) - lg(A - B + 1))
    c_out = cmath.exp(lg(B - 1) - lg(A) - (2j * k / p.alpha) * math.log(par.y_scale))
    return c_in, c_out


def wavefunction(p: PotentialSpec, x: float, *, k: float | None = None,
                 q: float | None = None, n: int | None = None) -> complex:
    """Unnormalized wavefunction at ``x`` in one of three modes.

    ``k``: scattering state. ``q``: negative-energy solution decaying as
    x -> -inf. ``n``: the n-th bound state, with the exact integer parameter
    so the hypergeometric series terminates and any ``x`` is allowed.
    """
    _require(p)
    if sum(v is not None for v in (k, q, n)) != 1:
        raise ValueError("give exactly one of k, q, n")
    a = p.alpha
    y = 2 * p.kappa / a * math.exp(-a * x)
    if k is not None:
        par = scattering_params(p, k)
        pref = cmath.exp(-1j * k * x - 0.5 * y)
        return pref * specfun.tricomi_u(par.A, par.B, y)
    if n is not None:
        q = q_of_n(p, n)
        if not q > 0:
            raise DomainError(f"no bound state with n={n}")
        A = complex(-n)
    else:
        A = bound_params(p, q).A
        if abs(A.real - round(A.real)) < 1e-10 and round(A.real) <= 0:
            A = complex(round(A.real))
    B = complex(2 * q / a + 1.0)
    return math.exp(-q * x - 0.5 * y) * specfun.tricomi_u(A, B, y)


def effective_model_for(p: PotentialSpec) -> EffectiveModel:
    """Robin surrogate with the boundary at the origin and cutoff 1/alpha."""
    return EffectiveModel(L=low_energy_L(p), x_b=0.0, m=p.m, lambda_cut=lambda_cut(p))
