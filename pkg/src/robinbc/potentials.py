"""Wall potentials, classical turning points and classical time of flight.

Units have hbar = 1. Three families are supported:

* infinite wall at ``x_b``;
* multi-step: barrier ``kappa^2/2m`` for x < 0, well ``-alpha^2/2m`` on
  [0, w], free for x > w;
* Morse: ``(kappa^2/2m) (exp(-2 alpha x) - exp(-alpha x))``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError, TurningPointError


class Kind(str, enum.Enum):
    INFINITE_WALL = "infinite_wall"
    MULTISTEP = "multistep"
    MORSE = "morse"


@dataclass(frozen=True)
class PotentialSpec:
    """Tagged description of a reflecting-wall potential.

    Only the fields relevant to ``kind`` are meaningful; use the
    :func:`infinite_wall`, :func:`multistep` and :func:`morse` constructors.
    """

    kind: Kind
    m: float = 1.0
    x_b: float = 0.0
    kappa: float = math.nan
    alpha: float = math.nan
    w: float = math.nan

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if not self.m > 0:
            raise ValueError(f"mass must be positive, got {self.m}")
        if self.kind is Kind.INFINITE_WALL:
            if not math.isfinite(self.x_b):
                raise ValueError("wall position must be finite")
            return
        needed = ("kappa", "alpha", "w") if self.kind is Kind.MULTISTEP else ("kappa", "alpha")
        for name in needed:
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and positive, got {v}")


def infinite_wall(x_b: float = 0.0, m: float = 1.0) -> PotentialSpec:
    return PotentialSpec(Kind.INFINITE_WALL, m=m, x_b=x_b)


def multistep(kappa: float, alpha: float, w: float, m: float = 1.0) -> PotentialSpec:
    return PotentialSpec(Kind.MULTISTEP, m=m, kappa=kappa, alpha=alpha, w=w)


def morse(kappa: float, alpha: float, m: float = 1.0) -> PotentialSpec:
    return PotentialSpec(Kind.MORSE, m=m, kappa=kappa, alpha=alpha)


@dataclass(frozen=True)
class TofResult:
    elapsed: float
    x_cl: float
    x_0: float
    energy: float


def evaluate(p: PotentialSpec, x):
    """V(x); ``inf`` inside an infinite wall. Accepts scalars or arrays."""
    xa = np.asarray(x, dtype=float)
    if p.kind is Kind.INFINITE_WALL:
        out = np.where(xa < p.x_b, np.inf, 0.0)
    elif p.kind is Kind.MULTISTEP:
        out = np.where(xa < 0.0, p.kappa**2 / (2 * p.m),
                       np.where(xa <= p.w, -p.alpha**2 / (2 * p.m), 0.0))
    else:
        with np.errstate(over="ignore"):
            # z (z - 1) with z - 1 = expm1(-alpha x): no cancellation near x = 0
            zm1 = np.expm1(-p.alpha * xa)
            out = p.kappa**2 / (2 * p.m) * (zm1 + 1.0) * zm1
    return float(out) if out.ndim == 0 else out


def barrier_height(p: PotentialSpec) -> float:
    """Asymptotic height of the wall side (x -> -inf)."""
    if p.kind is Kind.MULTISTEP:
        return p.kappa**2 / (2 * p.m)
    return math.inf


def minimum(p: PotentialSpec) -> tuple[float, float]:
    """(x_min, V_min) of the well; the wall has no well and returns (x_b, 0)."""
    if p.kind is Kind.MULTISTEP:
        return 0.5 * p.w, -p.alpha**2 / (2 * p.m)
    if p.kind is Kind.MORSE:
        return math.log(2.0) / p.alpha, -p.kappa**2 / (8 * p.m)
    return p.x_b, 0.0


def _morse_turn_excess(p: PotentialSpec, E: float) -> float:
    # z_cl - 1, where z_cl > 1 solves z^2 - z = 2mE/kappa^2
    c = 2 * p.m * E / p.kappa**2
    return 2 * c / (math.sqrt(1 + 4 * c) + 1.0)


def _morse_z_turn(p: PotentialSpec, E: float) -> float:
    return 1.0 + _morse_turn_excess(p, E)


def turning_point(p: PotentialSpec, E: float) -> float:
    """Largest x on the wall side where the classical particle reflects.

    For the multi-step the particle reflects at the barrier face, x = 0.
    """
    if not E > 0:
        raise DomainError(f"energy must be positive, got {E}")
    if p.kind is Kind.INFINITE_WALL:
        return p.x_b
    if p.kind is Kind.MULTISTEP:
        if E >= barrier_height(p):
            raise TurningPointError(f"E={E} is above the barrier {barrier_height(p)}")
        return 0.0
    return -math.log1p(_morse_turn_excess(p, E)) / p.alpha


def classical_tof(p: PotentialSpec, E: float, x_0: float, *, rel_tol: float = 1e-10) -> TofResult:
    """Round-trip classical time from ``x_0`` to the turning point and back."""
    x_cl = turning_point(p, E)
    if x_0 < x_cl:
        raise DomainError(f"x_0={x_0} must not lie behind the turning point {x_cl}")
    if x_0 == x_cl:
        return TofResult(0.0, x_cl, x_0, E)
    m = p.m

    def speed_inv(x):
        return 1.0 / math.sqrt(2.0 / m * (E - evaluate(p, x)))

    pieces = []
    if p.kind is Kind.INFINITE_WALL:
        pieces.append((x_cl, x_0))
    elif p.kind is Kind.MULTISTEP:
        pieces.append((0.0, min(p.w, x_0)))
        if x_0 > p.w:
            pieces.append((p.w, x_0))
    total = 0.0
    if p.kind is Kind.MORSE:
        eps = _morse_turn_excess(p, E)
        z_cl = 1.0 + eps
        scale = p.kappa**2 / m**2
        v_inf = math.sqrt(2.0 * E / m)

        def excess_at(t):
            # 1/v - 1/v_inf at x = x_cl + t; E - V = (kappa^2/2m)(z_cl - z)(z_cl + z - 1)
            z = z_cl * math.exp(-p.alpha * t)
            v = math.sqrt(scale * -z_cl * math.expm1(-p.alpha * t) * (eps + z))
            return scale * (z * z - z) / (v * v_inf * (v_inf + v))

        def excess(x):
            return excess_at(x - x_cl)

        # free flight is integrated exactly; only the potential's effect is quadrature
        total = (x_0 - x_cl) / v_inf
        d = min(x_0 - x_cl, 1.0 / p.alpha)
        val, err = integrate.quad(lambda u: 2 * u * excess_at(u * u),
                                  0.0, math.sqrt(d), epsabs=0.0, epsrel=rel_tol, limit=200)
        total += val
        # beyond x_far the potential is below 1e-18 of E
        x_far = min(x_0, math.log(max(p.kappa**2 / (m * E), 1.0) * 1e18) / p.alpha)
        edges = np.arange(x_cl + d, x_far, 5.0 / p.alpha).tolist() + [x_far]
        for lo, hi in zip(edges[:-1], edges[1:]):
            if hi <= lo:
                continue
            v2, e2 = integrate.quad(excess, lo, hi, epsabs=0.01 * rel_tol * total,
                                    epsrel=rel_tol, limit=200)
            total += v2
            err += e2
        if err > 1e3 * rel_tol * abs(total):
            raise ConvergenceError(f"time-of-flight quadrature error {err:.3g}")
    else:
        for a, b in pieces:
            if b <= a:
                continue
            # Gauss-Kronrod nodes are interior, so the jumps at a, b are never sampled
            v, _ = integrate.quad(speed_inv, a, b, epsabs=0.0, epsrel=rel_tol)
            total += v
    return TofResult(elapsed=2.0 * total, x_cl=x_cl, x_0=x_0, energy=E)
