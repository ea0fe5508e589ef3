import math

import numpy as np
import pytest
from scipy.optimize import fsolve

from rarelimit import gas, waves
from rarelimit.gas import GasModel, PrimitiveState
from rarelimit.verify import (check_cutoff_convergence, check_fan_edges,
                              check_fan_invariants, sigma3_quadrature)

SQ2 = math.sqrt(2.0)


def fan_state_oracle(setup, xi):
    """Solve (lambda3 = xi, quadrature-sigma3 = u_minus) with a root finder.

    Density is searched in log space so the iteration stays positive; the
    Riemann invariant comes from quadrature, not the closed form.
    """
    g = setup.gas

    def eqs(v):
        rho = math.exp(v[0])
        u = v[1]
        theta = rho ** (g.gamma - 1.0) * math.exp(setup.s_plus)
        lam = u + math.sqrt(g.gamma * (g.gamma - 1.0) * theta)
        sig = sigma3_quadrature(g, rho, u, theta)
        return [lam - xi, sig - setup.u_minus]

    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        sol = fsolve(eqs, [math.log(0.5 * setup.right.rho),
                           0.5 * (setup.u_minus + xi)], xtol=1e-13)
    assert max(abs(r) for r in eqs(sol)) < 1e-10, "oracle root not converged"
    rho, u = math.exp(sol[0]), sol[1]
    return rho, u, rho ** (g.gamma - 1.0) * math.exp(setup.s_plus)


class TestSetup:
    def test_g2_unit_right_state(self, setup_g2):
        assert setup_g2.u_minus == pytest.approx(-2 * SQ2, rel=1e-14)
        assert setup_g2.s_plus == 0.0
        assert setup_g2.lambda3_right == pytest.approx(SQ2, rel=1e-15)

    def test_velocity_shift(self):
        s = waves.make_setup(GasModel(2.0, 1.0), PrimitiveState(1.0, 2 * SQ2, 1.0))
        assert s.u_minus == pytest.approx(0.0, abs=1e-14)

    def test_g14(self, setup_g14):
        assert setup_g14.u_minus == pytest.approx(-5 * math.sqrt(0.56), rel=1e-14)

    def test_rejects_bad_right_state(self):
        with pytest.raises(ValueError):
            waves.make_setup(GasModel(2.0, 1.0), PrimitiveState(0.0, 0.0, 0.0))


class TestVacuumWave:
    def test_fan_point_frozen_values(self, setup_g2):
        st = waves.eval_vacuum_wave(setup_g2, 0.0)
        assert float(st.rho) == pytest.approx(4.0 / 9.0, rel=1e-14)
        assert float(st.u) == pytest.approx(-2 * SQ2 / 3, rel=1e-14)
        assert float(st.theta) == pytest.approx(4.0 / 9.0, rel=1e-14)
        assert float(st.m) == pytest.approx(-8 * SQ2 / 27, rel=1e-14)
        assert float(st.n) == pytest.approx(16.0 / 81.0, rel=1e-14)

    def test_fan_against_root_finder_oracle(self, setup_g2, setup_g14):
        for setup in (setup_g2, setup_g14):
            for frac in (0.15, 0.5, 0.85):
                xi = setup.u_minus + frac * (setup.lambda3_right - setup.u_minus)
                st = waves.eval_vacuum_wave(setup, xi)
                rho_o, u_o, th_o = fan_state_oracle(setup, xi)
                assert float(st.rho) == pytest.approx(rho_o, rel=1e-9)
                assert float(st.u) == pytest.approx(u_o, rel=1e-9)
                assert float(st.theta) == pytest.approx(th_o, rel=1e-9)

    def test_right_branch(self, setup_g2):
        st = waves.eval_vacuum_wave(setup_g2, setup_g2.lambda3_right + 1.0)
        assert float(st.rho) == 1.0
        assert float(st.u) == 0.0
        assert float(st.theta) == 1.0

    def test_vacuum_branch(self, setup_g2):
        st = waves.eval_vacuum_wave(setup_g2, setup_g2.u_minus - 1.0)
        assert float(st.rho) == 0.0
        assert float(st.u) == setup_g2.u_minus
        assert float(st.theta) == 0.0
        assert float(st.m) == 0.0
        assert float(st.n) == 0.0

    def test_invariant_suites(self):
        res = check_fan_invariants()
        assert res.passed, res.detail
        res = check_fan_edges()
        assert res.passed, res.detail


class TestCutoff:
    def test_degenerate_cut_at_right_state(self, setup_g2):
        cut = waves.make_cutoff(setup_g2, 1.0)
        assert cut.u_nu == pytest.approx(0.0, abs=1e-14)
        assert cut.theta_nu == pytest.approx(1.0, rel=1e-15)

    def test_explicit_velocity_formula(self, setup_g2):
        cut = waves.make_cutoff(setup_g2, 0.25)
        assert cut.u_nu == pytest.approx(-SQ2, rel=1e-14)
        st = PrimitiveState(cut.nu, cut.u_nu, cut.theta_nu)
        assert float(gas.sigma3(setup_g2.gas, st)) == pytest.approx(setup_g2.u_minus, abs=1e-12)

    def test_cut_state_stays_on_wave_curve(self, setup_g14, rng):
        for nu in 10.0 ** rng.uniform(-5, -0.01, 25):
            cut = waves.make_cutoff(setup_g14, nu)
            st = PrimitiveState(cut.nu, cut.u_nu, cut.theta_nu)
            assert float(gas.sigma3(setup_g14.gas, st)) == pytest.approx(
                setup_g14.u_minus, abs=1e-12)

    def test_u_nu_tends_to_vacuum_edge(self, setup_g2):
        gaps = [waves.make_cutoff(setup_g2, nu).u_nu - setup_g2.u_minus
                for nu in (1e-2, 1e-4, 1e-6, 1e-8)]
        assert all(g > 0 for g in gaps)
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < 1e-3

    def test_rejects_out_of_range(self, setup_g2):
        with pytest.raises(ValueError):
            waves.make_cutoff(setup_g2, 0.0)
        with pytest.raises(ValueError):
            waves.make_cutoff(setup_g2, 1.5)

    def test_cutoff_wave_branches(self, setup_g2):
        cut = waves.make_cutoff(setup_g2, 0.25)
        far_left = waves.eval_cutoff_wave(setup_g2, cut, cut.lambda3_cut - 5.0)
        assert float(far_left.rho) == 0.25
        assert float(far_left.u) == cut.u_nu
        assert float(far_left.theta) == cut.theta_nu
        xi = np.linspace(cut.lambda3_cut, setup_g2.lambda3_right, 257)
        vac = waves.eval_vacuum_wave(setup_g2, xi)
        cw = waves.eval_cutoff_wave(setup_g2, cut, xi)
        assert np.max(np.abs(vac.rho - cw.rho)) == 0.0
        assert np.max(np.abs(vac.u - cw.u)) == 0.0

    def test_sup_gap_equals_nu(self, setup_g2):
        nu = 0.125
        err_rho, err_m, err_n = waves.cutoff_sup_error(setup_g2, nu)
        assert err_rho == nu
        # gap in rho is attained left of the cut where the exact wave is vacuum
        cut = waves.make_cutoff(setup_g2, nu)
        xi_left = setup_g2.u_minus - 0.5
        vac = waves.eval_vacuum_wave(setup_g2, xi_left)
        cw = waves.eval_cutoff_wave(setup_g2, cut, xi_left)
        assert float(np.abs(cw.rho - vac.rho)) == nu

    def test_convergence_suite(self):
        res = check_cutoff_convergence()
        assert res.passed, res.detail

    def test_errors_vanish_monotonically(self, setup_g14):
        errs = [waves.cutoff_sup_error(setup_g14, nu, n_samples=20000)
                for nu in (1e-1, 1e-2, 1e-3, 1e-4)]
        for k in range(3):
            seq = [e[k] for e in errs]
            assert all(b < a for a, b in zip(seq, seq[1:]))
