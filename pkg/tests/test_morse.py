import cmath
import math

import numpy as np
import pytest

from robinbc import effective, morse, oracle, specfun
from robinbc import potentials as P
from robinbc.errors import DomainError, PoleError, SeriesRadiusError

STD = P.morse(kappa=10.0, alpha=0.5)


def richardson_L(p):
    y = {}
    for s in (1e-2, 1e-3, 1e-4):
        k = s * p.alpha
        y[s] = -math.tan(morse.exact_phase(p, k)) / k
    return (100 * y[1e-4] - y[1e-3]) / 99


class TestExactPhase:
    def test_low_k(self):
        k = 0.01
        assert morse.exact_phase(STD, k) == pytest.approx(-k * morse.low_energy_L(STD), rel=1e-3)

    def test_against_oracle(self):
        th = morse.exact_phase(STD, 0.2)
        o = oracle.integrate_scattering(STD, 0.2)
        assert abs(oracle.align(o.theta, th) - th) <= 1e-6

    def test_unitarity(self):
        lg = specfun.log_gamma
        for p in (STD, P.morse(4.8, 0.5), P.morse(30.0, 1.3)):
            a = p.alpha
            for k in np.geomspace(1e-4, 2.0, 40) * a:
                t = 2j * k / a
                A1 = complex(0.5 * (a - p.kappa) / a, -k / a)
                A2 = A1.conjugate()
                log_s = lg(-t) - lg(t) + lg(A1) - lg(A2)
                assert abs(abs(cmath.exp(log_s)) - 1) <= 1e-12

    def test_continuous_and_anchored(self):
        ks = np.linspace(1e-5, 2.0, 4001)
        th = morse.phase_curve(STD, ks)
        assert np.max(np.abs(np.diff(th))) < 0.05
        assert abs(th[0]) < 1e-3

    def test_threshold_finite(self):
        p = P.morse(kappa=1.5, alpha=0.5)
        for k in (1e-3, 0.1):
            assert math.isfinite(morse.exact_phase(p, k))

    def test_domain(self):
        with pytest.raises(DomainError):
            morse.exact_phase(STD, 0.0)
        with pytest.raises(TypeError):
            morse.exact_phase(P.multistep(3, 1, 1), 0.1)


class TestSeriesForms:
    def test_product_form_at_1e4_terms(self):
        k = 0.2
        ex = morse.exact_phase(STD, k)
        assert abs(oracle.align(morse.phase_product_form(STD, k, 10**4), ex) - ex) <= 1e-4

    def test_product_form_converges(self):
        k = 0.2
        ex = morse.exact_phase(STD, k)
        errs = [abs(oracle.align(morse.phase_product_form(STD, k, n), ex) - ex) for n in (10**2, 10**3, 10**4)]
        # at least linear in 1/N
        assert errs[0] / errs[1] >= 9.0 and errs[1] / errs[2] >= 9.0
        assert abs(oracle.align(morse.phase_product_form(STD, k, 10**5), ex) - ex) <= 1e-4

    def test_product_one_vs_two(self):
        k = 0.2
        ex = morse.exact_phase(STD, k)
        e1, e2 = (abs(oracle.align(morse.phase_product_form(STD, k, n), ex) - ex) for n in (1, 2))
        assert e2 < e1

    @pytest.mark.parametrize("n", [10, 1000, 10**5])
    def test_sum_matches_product(self, n):
        for k in (0.005, 0.05, 0.2):
            s = morse.phase_arctan_sum(STD, k, n)
            assert abs(oracle.align(morse.phase_product_form(STD, k, n), s) - s) <= 1e-10

    def test_tail_is_c_over_n(self):
        k = 0.1
        ex = morse.exact_phase(STD, k)
        ns = np.array([10**2, 10**3, 10**4, 10**5])
        errs = np.array([morse.phase_arctan_sum(STD, k, int(n)) - ex for n in ns])
        assert np.polyfit(np.log(ns), np.log(np.abs(errs)), 1)[0] == pytest.approx(-1.0, abs=0.05)
        for n, e in zip(ns[1:], errs[1:]):
            assert -e == pytest.approx(morse.arctan_sum_tail(STD, k, int(n)), rel=0.05)

    def test_sum_slope_at_zero(self):
        k = 1e-5 * STD.alpha
        slope = morse.phase_arctan_sum(STD, k, 10**6) / k
        assert slope == pytest.approx(-morse.low_energy_L(STD), rel=1e-4)

    def test_triple_agreement(self):
        for k in np.linspace(0.01, 0.5, 12) * STD.alpha:
            ex = morse.exact_phase(STD, k)
            pr = oracle.align(morse.phase_product_form(STD, k), ex)
            sm = morse.phase_arctan_sum(STD, k)
            assert max(abs(ex - pr), abs(ex - sm), abs(pr - sm)) <= 1e-4

    def test_bad_truncation(self):
        with pytest.raises(ValueError):
            morse.phase_product_form(STD, 0.1, 0)


class TestLowEnergyL:
    def test_richardson(self):
        for p in (STD, P.morse(4.8, 0.5), P.morse(2.2, 1.0), P.morse(41.0, 2.0)):
            assert morse.low_energy_L(p) == pytest.approx(richardson_L(p), rel=1e-6)

    def test_scaling(self):
        for kap, a in ((10.0, 0.5), (4.8, 0.5), (7.3, 1.9)):
            L = morse.low_energy_L(P.morse(kap, a))
            assert morse.low_energy_L(P.morse(2 * kap, 2 * a)) == pytest.approx(L / 2, rel=1e-12)

    def test_tuned(self):
        a, delta = 0.5, 0.01
        p = P.morse((3 + delta) * a, a)
        assert 1 / morse.low_energy_L(p) == pytest.approx(delta * a / 2, rel=0.05)

    def test_pole(self):
        with pytest.raises(PoleError):
            morse.low_energy_L(P.morse(1.5, 0.5))

    def test_low_k_law(self):
        for p in (STD, P.morse(3.3, 1.0), P.morse(8.0, 0.3)):
            L = morse.low_energy_L(p)
            ks = np.geomspace(1e-4, 1e-2, 9) * p.alpha
            d = [abs(morse.exact_phase(p, k) + k * L) for k in ks]
            assert np.polyfit(np.log(ks), np.log(d), 1)[0] >= 2.5


class TestSpectrum:
    def test_ten(self):
        s = morse.bound_spectrum(P.morse(10.0, 1.0))
        assert s.n_max == 4
        assert len(s.states) == 5
        assert s.states[0].q == pytest.approx(4.5)

    def test_empty(self):
        s = morse.bound_spectrum(P.morse(1.0, 1.0))
        assert s.n_max is None and s.states == []

    def test_step_function(self):
        for r in np.linspace(0.5, 12.0, 231):
            s = morse.bound_spectrum(P.morse(r, 1.0))
            expected = math.floor((r - 1) / 2) if r > 1 else None
            if r > 1 and (r - 1) / 2 == expected:
                expected -= 1  # q = 0 exactly is not a bound state
            assert s.n_max == (expected if expected is None or expected >= 0 else None)

    def test_against_oracle(self):
        p = P.morse(4.8, 0.5)
        exact = morse.bound_spectrum(p).states
        assert [round(b.q, 12) for b in exact] == [2.15, 1.65, 1.15, 0.65, 0.15]
        shot = oracle.shoot_bound_states(p)
        assert len(shot) == len(exact)
        for a, b in zip(exact, shot):
            assert b.energy == pytest.approx(a.energy, rel=1e-6)


class TestWavefunction:
    @pytest.mark.parametrize("p,states", [(P.morse(3.5, 1.0), None), (P.morse(4.8, 0.5), [4])])
    def test_bound_decay_ratio(self, p, states):
        spec = morse.bound_spectrum(p)
        for n in states or range(len(spec.states)):
            q = spec.states[n].q
            r = abs(morse.wavefunction(p, 6 / q, n=n)) / abs(morse.wavefunction(p, 5 / q, n=n))
            assert r == pytest.approx(math.exp(-1), rel=0.05)

    @pytest.mark.parametrize("p", [P.morse(3.5, 1.0), P.morse(2.6, 0.4)])
    def test_bound_decay_both_ends(self, p):
        x_min = P.minimum(p)[0]
        for s in morse.bound_spectrum(p).states:
            centre = abs(morse.wavefunction(p, x_min, n=s.n))
            assert abs(morse.wavefunction(p, -3 / p.alpha, n=s.n)) < centre / 10
            assert abs(morse.wavefunction(p, 8 / s.q, n=s.n)) < centre / 10

    def test_q_mode_matches_n_mode(self):
        p = P.morse(4.8, 0.5)
        q = morse.q_of_n(p, 2)
        for x in (0.5, 2.0, 6.0):
            assert morse.wavefunction(p, x, q=q) == pytest.approx(morse.wavefunction(p, x, n=2), rel=1e-6)

    @pytest.mark.parametrize("k", [0.05, 0.1, 0.2])
    def test_scattering_asymptotics(self, k):
        x = 8 / k
        c_in, c_out = morse.asymptotic_coefficients(STD, k)
        psi = morse.wavefunction(STD, x, k=k)
        two_wave = c_in * cmath.exp(-1j * k * x) + c_out * cmath.exp(1j * k * x)
        assert abs(psi - two_wave) <= 1e-6 * abs(two_wave)
        # sin(k x + theta) has outgoing/incoming ratio -exp(2 i theta)
        ratio = -c_out / c_in
        assert abs(ratio) == pytest.approx(1.0, abs=1e-12)
        th = morse.exact_phase(STD, k)
        assert abs(oracle.wrap_pi(0.5 * cmath.phase(ratio) - th)) <= 1e-10

    def test_radius_limit(self):
        with pytest.raises(SeriesRadiusError):
            morse.wavefunction(STD, -10.0, k=0.1)

    def test_one_mode_only(self):
        with pytest.raises(ValueError):
            morse.wavefunction(STD, 1.0, k=0.1, n=0)
        with pytest.raises(DomainError):
            morse.wavefunction(STD, 1.0, n=10)


class TestEffectiveModel:
    def test_fields(self):
        m = morse.effective_model_for(STD)
        assert m.x_b == 0.0 and m.lambda_cut == 2.0
        assert m.L == morse.low_energy_L(STD)

    def test_phase_sweep(self):
        for p in (STD, P.morse(4.8, 0.5), P.morse(2.2, 1.0), P.morse(30.0, 0.7)):
            m = morse.effective_model_for(p)
            for k in np.linspace(1e-4, 0.02, 11) * p.alpha:
                assert abs(oracle.wrap_pi(effective.phase_shift(m, k) - morse.exact_phase(p, k))) <= 0.01

    def test_tuned_bound_energy(self):
        a = 0.5
        p = P.morse((3 + 0.01) * a, a)
        eff = effective.bound_state(morse.effective_model_for(p))
        least = morse.bound_spectrum(p).states[-1]
        assert eff.energy == pytest.approx(least.energy, rel=0.10)
