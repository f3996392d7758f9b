"""Free particle on a half-line with a Robin boundary: the low-energy surrogate.

The boundary condition at ``x_b`` is ``psi(x_b) + L psi'(x_b) = 0``. ``L = 0``
is Dirichlet, ``L = inf`` is Neumann. Scattering states are
``sin(k (x - x_b) + theta)`` with ``tan theta = -k L``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

DEFAULT_VALIDITY_RATIO = 10.0


@dataclass(frozen=True)
class EffectiveModel:
    L: float
    x_b: float
    m: float = 1.0
    lambda_cut: float = 0.0
    validity_ratio: float = DEFAULT_VALIDITY_RATIO

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError("mass must be positive")
        if not self.lambda_cut >= 0:
            raise ValueError("lambda_cut must be non-negative")
        if math.isnan(self.L):
            raise ValueError("L must not be NaN")

    @property
    def neumann(self) -> bool:
        return math.isinf(self.L)


@dataclass(frozen=True)
class BoundState:
    """Negative-energy state with decay momentum ``q`` and ``E = -q^2 / 2m``.

    ``valid`` is False when the decay length is not comfortably longer than
    the cutoff length of the model that produced it.
    """

    q: float
    energy: float
    n: int = 0
    valid: bool = True


def make_bound_state(q: float, m: float, n: int, lambda_cut: float,
                     ratio: float = DEFAULT_VALIDITY_RATIO) -> BoundState:
    return BoundState(q=q, energy=-q * q / (2 * m), n=n, valid=(1.0 / q) > ratio * lambda_cut)


def robin_residual(model: EffectiveModel, psi_at_b: float, dpsi_at_b: float) -> float:
    """psi(x_b) + L psi'(x_b); for Neumann returns psi'(x_b)."""
    if model.neumann:
        return dpsi_at_b
    return psi_at_b + model.L * dpsi_at_b


def _check_k(k):
    if not k > 0:
        raise DomainError(f"k must be positive, got {k}")


def phase_shift(model: EffectiveModel, k: float) -> float:
    """theta = -arctan(k L) in (-pi/2, pi/2]; Neumann gives -pi/2."""
    _check_k(k)
    if model.neumann:
        return -0.5 * math.pi
    return -math.atan(k * model.L)


def total_phase(model: EffectiveModel, k: float) -> float:
    """Phase between incoming and outgoing plane waves, 2 theta + pi."""
    return 2.0 * phase_shift(model, k) + math.pi


def bound_state(model: EffectiveModel) -> BoundState | None:
    """The single bound state exp(-(x - x_b)/L), present only for finite L > 0."""
    if model.neumann or not model.L > 0:
        return None
    return make_bound_state(1.0 / model.L, model.m, 0, model.lambda_cut, model.validity_ratio)


def wigner_delay(model: EffectiveModel, k: float) -> float:
    """Quantum time delay -2 m L / (k (1 + k^2 L^2)) = (2m/k) dtheta/dk."""
    _check_k(k)
    if model.neumann:
        return 0.0
    L = model.L
    return -2.0 * model.m * L / (k * (1.0 + (k * L) ** 2))


def effective_tof(model: EffectiveModel, k: float, x_0: float) -> float:
    """Classical round trip 2 m (x_0 - x_b) / k."""
    _check_k(k)
    if x_0 < model.x_b:
        raise DomainError(f"x_0={x_0} lies behind the boundary x_b={model.x_b}")
    return 2.0 * model.m * (x_0 - model.x_b) / k
