import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robinbc import potentials
from robinbc.effective import (EffectiveModel, bound_state, effective_tof, phase_shift, robin_residual,
                               total_phase, wigner_delay)
from robinbc.errors import DomainError

lengths = st.floats(-50, 50, allow_nan=False)
momenta = st.floats(1e-4, 20)


def model(L, x_b=0.0, m=1.0, cut=0.0):
    return EffectiveModel(L=L, x_b=x_b, m=m, lambda_cut=cut)


class TestResidual:
    @pytest.mark.parametrize("L,psi,dpsi,expected", [(0, 0, 5, 0), (2, -6, 3, 0), (1, 1, 1, 2)])
    def test_examples(self, L, psi, dpsi, expected):
        assert robin_residual(model(L), psi, dpsi) == expected

    def test_neumann(self):
        assert robin_residual(model(math.inf), 3.0, 0.0) == 0.0

    @settings(max_examples=300, deadline=None)
    @given(lengths, momenta, st.floats(-10, 10))
    def test_scattering_state_satisfies_boundary(self, L, k, x_b):
        m = model(L, x_b)
        th = phase_shift(m, k)
        # psi = sin(k (x - x_b) + theta) and its derivative at x = x_b
        psi, dpsi = math.sin(th), k * math.cos(th)
        assert abs(robin_residual(m, psi, dpsi)) <= 1e-12 * max(1.0, abs(k * L))
        assert abs(math.sin(th) + k * L * math.cos(th)) <= 1e-12 * max(1.0, abs(k * L))

    @settings(max_examples=100, deadline=None)
    @given(st.floats(1e-3, 50))
    def test_bound_wavefunction_satisfies_boundary(self, L):
        # psi = exp(-(x - x_b)/L): psi(x_b) = 1, psi'(x_b) = -1/L
        assert robin_residual(model(L), 1.0, -1.0 / L) == pytest.approx(0.0, abs=1e-15)


class TestPhaseShift:
    @pytest.mark.parametrize("L,k,expected", [(0, 0.3, 0.0), (1, 1, -math.pi / 4),
                                              (-3, 0.1, math.atan(0.3))])
    def test_examples(self, L, k, expected):
        assert phase_shift(model(L), k) == pytest.approx(expected, abs=1e-15)

    def test_example_value(self):
        assert phase_shift(model(-3), 0.1) == pytest.approx(0.29146, abs=1e-5)

    @given(momenta)
    def test_dirichlet_degenerate(self, k):
        assert phase_shift(model(0.0), k) == 0.0

    def test_neumann(self):
        assert phase_shift(model(math.inf), 0.5) == -math.pi / 2

    def test_branch(self):
        for L in np.linspace(-40, 40, 81):
            for k in (1e-3, 0.1, 10.0):
                assert -math.pi / 2 < phase_shift(model(L), k) < math.pi / 2

    def test_total_phase(self):
        assert total_phase(model(1.0), 1.0) == pytest.approx(math.pi / 2)
        assert total_phase(model(0.0), 2.0) == pytest.approx(math.pi)

    def test_k_must_be_positive(self):
        with pytest.raises(DomainError):
            phase_shift(model(1.0), 0.0)


class TestBoundState:
    def test_example(self):
        b = bound_state(model(2.0))
        assert b.energy == pytest.approx(-1 / 8)
        assert b.q == pytest.approx(0.5)
        assert b.valid

    @pytest.mark.parametrize("L", [-1.0, 0.0, math.inf])
    def test_none(self, L):
        assert bound_state(model(L)) is None

    def test_spurious_flag(self):
        b = bound_state(model(0.5, cut=1.0))
        assert b is not None and not b.valid

    def test_validity_threshold(self):
        assert not bound_state(model(10.0, cut=1.0)).valid
        assert bound_state(model(10.5, cut=1.0)).valid
        m = EffectiveModel(L=3.0, x_b=0.0, lambda_cut=1.0, validity_ratio=2.0)
        assert bound_state(m).valid

    @settings(max_examples=100, deadline=None)
    @given(st.floats(1e-3, 1e3), st.floats(0.1, 10))
    def test_energy_formula(self, L, m):
        b = bound_state(model(L, m=m))
        assert b.energy == pytest.approx(-1 / (2 * m * L * L), rel=1e-14)


class TestWigner:
    def test_examples(self):
        assert wigner_delay(model(0.0), 0.3) == 0.0
        assert wigner_delay(model(1.0), 1.0) == pytest.approx(-1.0)

    @pytest.mark.parametrize("L", [-2.0, -0.5, 0.5, 2.0])
    def test_central_differences(self, L):
        m = model(L, m=1.3)
        for k in np.linspace(0.01, 1.0, 25):
            h = 1e-5 * k
            d = (phase_shift(m, k + h) - phase_shift(m, k - h)) / (2 * h)
            assert wigner_delay(m, k) == pytest.approx(2 * m.m / k * d, rel=1e-6)


class TestTof:
    def test_examples(self):
        assert effective_tof(model(0.3, x_b=0.0), 2.0, 10.0) == pytest.approx(10.0)
        assert effective_tof(model(0.3, x_b=1.0), 1.0, 1.0) == 0.0

    def test_matches_wall(self):
        for x_b, k, x_0 in ((0.0, 0.5, 3.0), (-2.0, 1.7, 4.0), (5.0, 0.01, 100.0)):
            wall = potentials.infinite_wall(x_b, m=2.0)
            got = effective_tof(model(0.0, x_b, m=2.0), k, x_0)
            assert got == potentials.classical_tof(wall, k * k / 4.0, x_0).elapsed

    def test_behind_boundary(self):
        with pytest.raises(DomainError):
            effective_tof(model(0.0, x_b=1.0), 1.0, 0.0)


def test_model_validation():
    with pytest.raises(ValueError):
        EffectiveModel(L=1.0, x_b=0.0, m=-1.0)
    with pytest.raises(ValueError):
        EffectiveModel(L=math.nan, x_b=0.0)
    with pytest.raises(ValueError):
        EffectiveModel(L=1.0, x_b=0.0, lambda_cut=-1.0)
