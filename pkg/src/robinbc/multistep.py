"""Closed-form scattering and bound states of the multi-step potential.

The scattering phase is referred to the origin: for x > w the wave is
``sin(k x + theta)``. With that reference ``tan theta -> -k L`` where ``L`` is
:func:`low_energy_L`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .effective import BoundState, EffectiveModel, make_bound_state
from .errors import DomainError
from .potentials import Kind, PotentialSpec

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class MultiStepPhase:
    """Phase at momentum ``k`` with ``tan(theta) == tan_num / tan_den``."""

    k: float
    theta: float
    tan_num: float
    tan_den: float


def _require(p: PotentialSpec):
    if p.kind is not Kind.MULTISTEP:
        raise TypeError(f"expected a multi-step potential, got {p.kind.value}")


def _interior_phase(p: PotentialSpec, k: float) -> float:
    # psi = sin(p' x + chi) in the well, tan chi = p'/p from the barrier side
    pp = math.hypot(k, p.alpha)
    pb = math.sqrt(p.kappa**2 - k * k)
    return pp * p.w + math.atan2(pp, pb)


def exact_phase(p: PotentialSpec, k: float) -> MultiStepPhase:
    """Exact phase for 0 < k < kappa, continuous in k and -> 0 as k -> 0.

    Evaluated from sines and cosines only, so it stays finite when
    ``alpha w`` sits near an odd multiple of pi/2.
    """
    _require(p)
    if not 0 < k < p.kappa:
        raise DomainError(f"need 0 < k < kappa={p.kappa}, got k={k}")
    pp = math.hypot(k, p.alpha)
    phi = _interior_phase(p, k)
    j = round(phi / math.pi)
    psi = phi - j * math.pi
    # phase at x = w, continuous across psi = +-pi/2
    at_w = j * math.pi + math.atan2(k * math.sin(psi), pp * math.cos(psi))
    j0 = round((p.alpha * p.w + math.atan2(p.alpha, p.kappa)) / math.pi)
    kw = k * p.w
    theta = at_w - j0 * math.pi - kw
    num = k * math.sin(phi) * math.cos(kw) - pp * math.cos(phi) * math.sin(kw)
    den = pp * math.cos(phi) * math.cos(kw) + k * math.sin(phi) * math.sin(kw)
    return MultiStepPhase(k=k, theta=theta, tan_num=num, tan_den=den)


def phase_curve(p: PotentialSpec, ks) -> np.ndarray:
    return np.array([exact_phase(p, float(k)).theta for k in ks])


def low_energy_L(p: PotentialSpec) -> float:
    """Scattering length (origin reference); ``inf`` at a zero-energy resonance."""
    _require(p)
    a, kap, w = p.alpha, p.kappa, p.w
    s, c = math.sin(a * w), math.cos(a * w)
    den = a * s - kap * c
    # zero-energy resonance, up to the rounding of the two products
    if abs(den) <= 4 * EPS * (abs(a * s) + abs(kap * c)):
        return math.inf
    return w + (a * c + kap * s) / (a * den)


def lambda_cut(p: PotentialSpec) -> float:
    _require(p)
    return max(1.0 / p.kappa, 1.0 / p.alpha, p.w)


def bound_state_equation(p: PotentialSpec, q: float) -> float:
    """Residual of the bound-state condition, free of tangent poles.

    ``tan(s w) = s (q + r) / (s^2 - q r)`` with ``s = sqrt(alpha^2 - q^2)``,
    ``r = sqrt(kappa^2 + q^2)``, cross-multiplied and divided by ``s``:
    ``sin(s w)/s * (s^2 - q r) - (q + r) cos(s w)``. It vanishes exactly at
    the bound states and is negative as q -> alpha.
    """
    _require(p)
    if not 0 < q < p.alpha:
        raise DomainError(f"need 0 < q < alpha={p.alpha}, got q={q}")
    return _residual(p, q)


def _residual(p: PotentialSpec, q):
    s = np.sqrt(np.maximum(p.alpha**2 - q * q, 0.0))
    r = np.sqrt(p.kappa**2 + q * q)
    sinc = p.w * np.sinc(s * p.w / np.pi)
    return sinc * (s * s - q * r) - (q + r) * np.cos(s * p.w)


def bound_states(p: PotentialSpec, validity_ratio: float = 10.0) -> list[BoundState]:
    """All bound states, ground state (largest q) first."""
    _require(p)
    a = p.alpha
    n_grid = 64 * max(1, math.ceil(a * p.w / math.pi)) + 1
    # uniform in the interior wavenumber s, where roots are evenly spread
    s = np.linspace(0.0, a, n_grid)
    q = np.sqrt(np.maximum(a * a - s * s, 0.0))[::-1]
    q[0], q[-1] = 0.0, a
    f = _residual(p, q)
    roots = []
    for i in range(n_grid - 1):
        lo, hi = q[i], q[i + 1]
        if f[i] == 0.0 and i > 0:
            roots.append(lo)
        elif f[i] * f[i + 1] < 0:
            roots.append(optimize.brentq(lambda x: float(_residual(p, x)), lo, hi,
                                         xtol=1e-15, rtol=1e-15, maxiter=200))
    roots = sorted((r for r in roots if 0 < r < a), reverse=True)
    cut = lambda_cut(p)
    return [make_bound_state(r, p.m, n, cut, validity_ratio) for n, r in enumerate(roots)]


def effective_model_for(p: PotentialSpec) -> EffectiveModel:
    """Robin surrogate: boundary at the well edge x_b = w."""
    return EffectiveModel(L=low_energy_L(p), x_b=p.w, m=p.m, lambda_cut=lambda_cut(p))
