"""Independent numerical Schrodinger solver.

Direct Numerov integration of ``psi'' = 2m (V - E) psi``, used to check the
closed forms. Scattering phases are read off in the free region; bound
states come from two-sided shooting with a Prufer-angle state count.

Piecewise-constant potentials are integrated region by region on grids that
land exactly on the jumps; value and derivative are carried across each
jump. Smooth potentials use one grid seeded with decaying WKB values deep in
the forbidden region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy import optimize

from . import _kernels, morse, multistep
from .effective import BoundState, make_bound_state
from .errors import ConvergenceError, DomainError
from .potentials import Kind, PotentialSpec, minimum


@dataclass(frozen=True)
class OracleConfig:
    """Discretization and tolerance settings.

    ``None`` fields are chosen automatically from the potential and energy.
    ``phase_step`` caps ``h * sqrt(|f|)``, the phase or e-fold advanced per
    step; ``h`` caps the step outright. With ``richardson`` bound-state
    energies are extrapolated against a doubled step, removing the h^4 term.
    """

    x_left: float | None = None
    x_right: float | None = None
    h: float | None = None
    match_radius: float | None = None
    bisect_tol: float = 1e-14
    max_nodes: int = 200
    phase_step: float = 0.01
    efolds: float = 30.0
    tail_tol: float = 1e-12
    fit_tol: float = 1e-8
    q_floor: float | None = None
    richardson: bool = True

    def __post_init__(self):
        if self.h is not None and not self.h > 0:
            raise ValueError("h must be positive")
        if not self.phase_step > 0:
            raise ValueError("phase_step must be positive")
        if not self.bisect_tol > 0:
            raise ValueError("bisect_tol must be positive")
        if self.max_nodes < 1:
            raise ValueError("max_nodes must be >= 1")
        if (self.x_left is not None and self.x_right is not None
                and not self.x_left < self.x_right):
            raise ValueError("x_left must be below x_right")


DEFAULT_CONFIG = OracleConfig()


@dataclass(frozen=True)
class OraclePhase:
    """Phase modulo pi in (-pi/2, pi/2] and the disagreement of its two read-outs."""

    k: float
    theta: float
    fit_residual: float


def wrap_pi(theta: float) -> float:
    """Representative of theta modulo pi in (-pi/2, pi/2]."""
    t = math.remainder(theta, math.pi)
    return t if t > -0.5 * math.pi else t + math.pi


def align(theta: float, reference: float) -> float:
    """theta shifted by a multiple of pi to lie nearest ``reference``."""
    return theta + math.pi * round((reference - theta) / math.pi)


def phase_reference(p: PotentialSpec) -> float:
    """Origin the closed-form phases are measured from."""
    return p.x_b if p.kind is Kind.INFINITE_WALL else 0.0


# ---------------------------------------------------------------------------
# marching machinery

@dataclass
class _Run:
    x: np.ndarray
    y: np.ndarray
    f: np.ndarray
    h: float
    n: int  # index of the segment end; y[n + 1] is one step past it

    def deriv(self, i: int) -> float:
        c = self.h * self.h / 6.0
        return ((1 - c * self.f[i + 1]) * self.y[i + 1]
                - (1 - c * self.f[i - 1]) * self.y[i - 1]) / (2 * self.h)

    def end(self) -> tuple[float, float]:
        return self.y[self.n], self.deriv(self.n)

    def nodes(self) -> int:
        seg = self.y[: self.n + 1]
        seg = seg[seg != 0.0]
        return int(np.count_nonzero(np.signbit(seg[1:]) != np.signbit(seg[:-1])))


def _grid(x0: float, x1: float, h_max: float) -> tuple[np.ndarray, float, int]:
    n = max(4, math.ceil(abs(x1 - x0) / h_max))
    h = (x1 - x0) / n
    return x0 + h * np.arange(n + 2), h, n


def _local_start(psi: float, dpsi: float, f0: float, h: float) -> float:
    # exact solution of psi'' = f0 psi one step away, f0 constant on the segment
    if f0 > 0:
        s = math.sqrt(f0)
        return psi * math.cosh(s * h) + dpsi * math.sinh(s * h) / s
    if f0 < 0:
        s = math.sqrt(-f0)
        return psi * math.cos(s * h) + dpsi * math.sin(s * h) / s
    return psi + dpsi * h


def _march_const(f0: float, x0: float, x1: float, psi: float, dpsi: float,
                 cfg: OracleConfig) -> _Run:
    h_max = cfg.phase_step / math.sqrt(abs(f0)) if f0 != 0 else abs(x1 - x0) / 8
    if cfg.h is not None:
        h_max = min(h_max, cfg.h)
    x, h, n = _grid(x0, x1, h_max)
    scale = max(abs(psi), abs(dpsi) * h_max, 1e-300)
    psi, dpsi = psi / scale, dpsi / scale
    f = np.full(x.shape, f0)
    y, _ = _kernels.numerov(f, h, psi, _local_start(psi, dpsi, f0, h))
    return _Run(x, y, f, h, n)


def _march_smooth(fx: Callable[[np.ndarray], np.ndarray], x0: float, x1: float,
                  y0: float, y1_of_h: Callable[[float], float], h_max: float) -> _Run:
    x, h, n = _grid(x0, x1, h_max)
    f = fx(x)
    y, _ = _kernels.numerov(np.ascontiguousarray(f), h, y0, y1_of_h(h))
    return _Run(x, y, f, h, n)


def _wkb_seed(fx, x0: float) -> Callable[[float], float]:
    def second(h):
        p0, p1 = math.sqrt(fx(np.array([x0]))[0]), math.sqrt(fx(np.array([x0 + h]))[0])
        # the seed grows in the marching direction
        return math.sqrt(p0 / p1) * math.exp(0.5 * abs(h) * (p0 + p1))
    return second


# ---------------------------------------------------------------------------
# Morse helpers

def _morse_f(p: PotentialSpec, E: float):
    kap2, a, two_m_e = p.kappa**2, p.alpha, 2 * p.m * E

    def fx(x):
        z = np.exp(-a * x)
        return kap2 * (z * z - z) - two_m_e
    return fx


def _morse_inner_z(p: PotentialSpec, E: float) -> float:
    # inner turning point in z = exp(-alpha x): z^2 - z = 2mE/kappa^2
    c = 2 * p.m * E / p.kappa**2
    return 0.5 * (1.0 + math.sqrt(1.0 + 4 * c))


def _morse_x_left(p: PotentialSpec, E: float, cfg: OracleConfig) -> float:
    if cfg.x_left is not None:
        return cfg.x_left
    a, kap = p.alpha, p.kappa
    z_tp = _morse_inner_z(p, E)
    # WKB suppression between z and the turning point, p ~ kappa (z - 1/2)
    def supp(z):
        return (kap / a) * ((z - z_tp) - 0.5 * math.log(z / z_tp)) - cfg.efolds
    z_hi = z_tp + 2 * cfg.efolds * a / kap + 2.0
    while supp(z_hi) < 0:
        z_hi *= 2
    z = optimize.brentq(supp, z_tp, z_hi)
    z = min(z, 700.0 * a / kap)
    return -math.log(z) / a


def _morse_x_tail(p: PotentialSpec, E: float, cfg: OracleConfig) -> float:
    # beyond this point |V| < tail_tol * |E|
    return math.log(p.kappa**2 / (2 * p.m * cfg.tail_tol * abs(E))) / p.alpha


def _graded_march(p: PotentialSpec, E: float, k: float, x0: float, x_free: float,
                  x_end: float, cfg: OracleConfig) -> tuple[_Run, int, _Run]:
    """March a Morse solution outward with a step that grows as V flattens.

    The step doubles at block edges by keeping every other grid point, so the
    starting pair of each block is taken from the previous one without
    interpolation. Returns the block holding ``x_free`` with the index of
    that point, and the final block, whose last interior point is ``x_end``.
    """
    fx = _morse_f(p, E)
    a = p.alpha
    v_scale = p.kappa**2
    significant = cfg.tail_tol * 2 * p.m * E

    def h_cap(lo, hi):
        probe = np.linspace(lo, hi, 33)
        z = np.exp(-a * probe)
        scale = max(math.sqrt(float(np.max(np.abs(fx(probe))))), k)
        if float(np.max(v_scale * np.abs(z * z - z))) > significant:
            scale = max(scale, a)
        h = cfg.phase_step / scale
        return min(h, cfg.h) if cfg.h is not None else h

    h = h_cap(x0, x0 + 1.0 / a)
    x = x0
    ya, yb = 1.0, _wkb_seed(fx, x0)(h)
    at_free = None
    while True:
        length = max(1.0 / a if x < x_free else 0.0, 16 * h)
        n = 2 * max(4, math.ceil(0.5 * length / h))
        last = x + n * h >= x_end
        if last:
            n = max(4, math.ceil((x_end - x) / h))
        grid = x + h * np.arange(n + 2 if last else n + 1)
        f = fx(grid)
        y, _ = _kernels.numerov(f, h, ya, yb)
        run = _Run(grid, y, f, h, n)
        if at_free is None and grid[n] >= x_free:
            i = int(np.searchsorted(grid, x_free))
            at_free = (run, min(max(i, 1), n - 1))
        if last:
            return at_free[0], at_free[1], run
        if h_cap(grid[n], grid[n] + max(1.0 / a, 32 * h)) >= 2 * h:
            x, h = grid[n - 2], 2 * h
            ya, yb = y[n - 2], y[n]
        else:
            x = grid[n - 1]
            ya, yb = y[n - 1], y[n]
        scale = max(abs(ya), abs(yb))
        ya, yb = ya / scale, yb / scale


def _smooth_h(fx, x0: float, x1: float, a: float, cfg: OracleConfig, k: float) -> float:
    probe = np.linspace(x0, x1, 257)
    fmax = float(np.max(np.abs(fx(probe))))
    h = cfg.phase_step / max(math.sqrt(fmax), a, k)
    return min(h, cfg.h) if cfg.h is not None else h


# ---------------------------------------------------------------------------
# scattering

def _read_phase(run: _Run, i: int, k: float, x_ref: float) -> float:
    psi, dpsi = run.y[i], run.deriv(i)
    return math.atan2(k * psi, dpsi) - k * (run.x[i] - x_ref)


def integrate_scattering(p: PotentialSpec, k: float, cfg: OracleConfig | None = None,
                         x_ref: float | None = None) -> OraclePhase:
    """Phase of the regular scattering solution at momentum ``k``.

    The phase is that of ``sin(k (x - x_ref) + theta)`` in the free region,
    with ``x_ref`` defaulting to :func:`phase_reference`.
    """
    cfg = cfg or DEFAULT_CONFIG
    if not k > 0:
        raise DomainError(f"k must be positive, got {k}")
    x_ref = phase_reference(p) if x_ref is None else x_ref
    m = p.m
    E = k * k / (2 * m)
    span = 0.5 / k

    if p.kind is Kind.INFINITE_WALL:
        start = p.x_b
        end = cfg.x_right if cfg.x_right is not None else start + span + 4 * cfg.phase_step / k
        run = _march_const(-k * k, start, end, 0.0, 1.0, cfg)
    elif p.kind is Kind.MULTISTEP:
        if k >= p.kappa:
            raise DomainError(f"k={k} is above the barrier (kappa={p.kappa})")
        pb = math.sqrt(p.kappa**2 - k * k)
        x_left = cfg.x_left if cfg.x_left is not None else -cfg.efolds / pb
        if not x_left < 0:
            raise DomainError("x_left must lie inside the barrier (x < 0)")
        barrier = _march_const(pb * pb, x_left, 0.0, 1.0, pb, cfg)
        well = _march_const(-(k * k + p.alpha**2), 0.0, p.w, *barrier.end(), cfg)
        end = cfg.x_right if cfg.x_right is not None else p.w + span + 4 * cfg.phase_step / k
        run = _march_const(-k * k, p.w, end, *well.end(), cfg)
    else:
        x_left = _morse_x_left(p, E, cfg)
        x_free = cfg.match_radius if cfg.match_radius is not None else _morse_x_tail(p, E, cfg)
        end = cfg.x_right if cfg.x_right is not None else x_free + span
        near, i1, run = _graded_march(p, E, k, x_left, x_free, end, cfg)

    # two read-out points in the free region
    if p.kind is not Kind.MORSE:
        i1 = 2
        if cfg.match_radius is not None:
            i1 = max(2, int(np.searchsorted(run.x, cfg.match_radius)))
        near = run
        if not i1 < run.n:
            raise DomainError("free region too short for two read-out points")
    i2 = run.n
    t1 = _read_phase(near, i1, k, x_ref)
    t2 = _read_phase(run, i2, k, x_ref)
    resid = abs(wrap_pi(t1 - t2))
    if resid > cfg.fit_tol:
        raise ConvergenceError(f"phase read-outs disagree by {resid:.3g} (k={k})")
    return OraclePhase(k=k, theta=wrap_pi(t1), fit_residual=resid)


# ---------------------------------------------------------------------------
# bound states

@dataclass(frozen=True)
class _Shot:
    nodes_left: int
    nodes_right: int
    angle_left: float
    angle_right: float

    @property
    def mismatch(self) -> float:
        """Continuous, increasing Prufer mismatch; equals n*pi at the n-th state."""
        return (self.nodes_left + self.nodes_right) * math.pi + self.angle_left - self.angle_right

    @property
    def count(self) -> int:
        """Number of bound states below the shot energy."""
        return self.nodes_left + self.nodes_right + (1 if self.angle_left >= self.angle_right else 0)


def _prufer_angle(psi: float, dpsi: float) -> float:
    return math.atan2(psi, dpsi) % math.pi


def _shoot(p: PotentialSpec, E: float, cfg: OracleConfig) -> _Shot:
    m = p.m
    q = math.sqrt(-2 * m * E)
    if p.kind is Kind.MULTISTEP:
        r = math.sqrt(p.kappa**2 + q * q)
        x_left = cfg.x_left if cfg.x_left is not None else -cfg.efolds / r
        barrier = _march_const(r * r, x_left, 0.0, 1.0, r, cfg)
        left = _march_const(-(p.alpha**2 - q * q), 0.0, p.w, *barrier.end(), cfg)
        x_r = cfg.x_right if cfg.x_right is not None else p.w + 2.0 / q
        right = _march_const(q * q, x_r, p.w, 1.0, -q, cfg)
        nl = barrier.nodes() + left.nodes()
    elif p.kind is Kind.MORSE:
        fx = _morse_f(p, E)
        x_m = cfg.match_radius if cfg.match_radius is not None else minimum(p)[0]
        x_left = _morse_x_left(p, E, cfg)
        x_r = cfg.x_right if cfg.x_right is not None else max(_morse_x_tail(p, E, cfg), x_m + 1.0 / p.alpha)
        h = _smooth_h(fx, x_left, x_r, p.alpha, cfg, q)
        left = _march_smooth(fx, x_left, x_m, 1.0, _wkb_seed(fx, x_left), h)
        right = _march_smooth(fx, x_r, x_m, 1.0, _wkb_seed(fx, x_r), h)
        nl = left.nodes()
    else:
        raise DomainError("the infinite wall has no bound states")
    return _Shot(nl, right.nodes(), _prufer_angle(*left.end()), _prufer_angle(*right.end()))


def count_states_below(p: PotentialSpec, E: float, cfg: OracleConfig | None = None) -> int:
    return _shoot(p, E, cfg or DEFAULT_CONFIG).count


def node_count(p: PotentialSpec, E: float, cfg: OracleConfig | None = None) -> int:
    """Interior nodes of the two-sided solution at energy ``E``."""
    s = _shoot(p, E, cfg or DEFAULT_CONFIG)
    return s.nodes_left + s.nodes_right


def _well_floor(p: PotentialSpec) -> float:
    return minimum(p)[1]


def _solve_levels(p: PotentialSpec, cfg: OracleConfig, n_states: int,
                  e_bot: float, e_top: float) -> list[float]:
    def mismatch(E):
        return _shoot(p, E, cfg).mismatch

    levels = []
    for n in range(n_states):
        try:
            levels.append(optimize.brentq(lambda E: mismatch(E) - n * math.pi, e_bot, e_top,
                                          xtol=1e-300, rtol=max(cfg.bisect_tol, 1e-15),
                                          maxiter=200))
        except (ValueError, RuntimeError) as exc:
            raise ConvergenceError(f"bound state n={n}: {exc}") from exc
    return levels


def shoot_bound_states(p: PotentialSpec, cfg: OracleConfig | None = None,
                       validity_ratio: float = 10.0) -> list[BoundState]:
    """All bound states with q above ``cfg.q_floor``, ground state first."""
    cfg = cfg or DEFAULT_CONFIG
    if p.kind is Kind.INFINITE_WALL:
        return []
    m = p.m
    v_min = _well_floor(p)
    q_floor = cfg.q_floor if cfg.q_floor is not None else 1e-4 * p.alpha
    e_top = -q_floor**2 / (2 * m)
    e_bot = v_min * (1 - 1e-12)
    top = _shoot(p, e_top, cfg)
    n_states = min(top.count, cfg.max_nodes + 1)
    cut = (multistep.lambda_cut if p.kind is Kind.MULTISTEP else morse.lambda_cut)(p)

    energies = _solve_levels(p, cfg, n_states, e_bot, e_top)
    if cfg.richardson:
        # pair with a doubled step: halving instead runs into round-off in the
        # recurrence coefficient, which grows like eps / (h sqrt|f|)^2
        coarse = _solve_levels(p, replace(cfg, phase_step=2.0 * cfg.phase_step),
                               n_states, e_bot, e_top)
        energies = [(16.0 * f - c) / 15.0 for f, c in zip(energies, coarse)]
    states = [make_bound_state(math.sqrt(-2 * m * E), m, n, cut, validity_ratio)
              for n, E in enumerate(energies)]
    states.sort(key=lambda s: -s.q)
    return states
