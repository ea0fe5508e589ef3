import math

import numpy as np
import pytest
import sympy
from scipy.integrate import quad
from scipy.linalg import expm

from rarelimit import solver, waves
from rarelimit.gas import GasModel, PrimitiveState
from rarelimit.profile import profile_eval
from rarelimit.solver import (Grid, SolverAbort, SolverConfig, Stepper,
                              check_domain, conserved_totals,
                              init_well_prepared, preflight_domain, run,
                              state_from_primitives, step)

GAMMA = 1.4


def rarefaction_problem(eps=1e-2, n_cells=800, t_end=1.0, snapshot_times=()):
    gas0 = GasModel(gamma=GAMMA, alpha=0.5)
    setup = waves.make_setup(gas0, PrimitiveState(1.0, 0.0, 1.0))
    nu = delta = eps ** (1.0 / 3.0)
    cut = waves.make_cutoff(setup, nu)
    xl, xr = preflight_domain(setup, t_end)
    grid = Grid(xl, xr, n_cells)
    state = init_well_prepared(grid, setup, cut, delta, eps)
    cfg = SolverConfig(t_end=t_end, snapshot_times=snapshot_times)
    return setup, cut, delta, state, cfg


def uniform_state(n=64, rho=1.0, u=0.0, theta=1.0, eps=1e-2):
    grid = Grid(0.0, 1.0, n)
    vals = (np.full(n, rho), np.full(n, u), np.full(n, theta))
    return state_from_primitives(grid, eps, *vals, (rho, u, theta),
                                 (rho, u, theta))


class TestBasics:
    def test_uniform_state_is_exact_equilibrium(self):
        gas = GasModel(GAMMA, 0.5)
        st = uniform_state()
        cfg = SolverConfig(t_end=1.0)
        out = st
        for _ in range(20):
            out = step(out, cfg, gas)
        assert np.max(np.abs(out.rho - 1.0)) == 0.0
        assert np.max(np.abs(out.mom)) == 0.0
        assert np.max(np.abs(out.en - 1.0)) == 0.0

    def test_conserved_totals_uniform(self):
        st = uniform_state(n=50)
        mass, mom, en = conserved_totals(st)
        assert mass == pytest.approx(1.0, rel=1e-14)
        assert mom == 0.0
        assert en == pytest.approx(1.0, rel=1e-14)

    def test_single_step_balance_matches_boundary_flux(self):
        setup, cut, delta, state, cfg = rarefaction_problem(n_cells=400)
        gas = setup.gas
        stepper = Stepper(state, cfg, gas)
        for _ in range(5):
            before = conserved_totals(state)
            dt = stepper.stable_dt(state)
            info = stepper.advance(state, dt)
            after = conserved_totals(state)
            expected = dt * (info.bflux[:3] - info.bflux[3:])
            scale = np.maximum(np.abs(before), 1.0)
            assert np.max(np.abs(after - before - expected) / scale) < 1e-12

    def test_run_zero_steps_returns_input(self):
        setup, cut, delta, state, _ = rarefaction_problem(n_cells=100)
        cfg = SolverConfig(t_end=0.0)
        res = run(state, cfg, setup.gas)
        assert res.n_steps == 0
        assert res.final.t == 0.0
        assert np.array_equal(res.final.rho, state.rho)

    def test_snapshot_times_exact(self):
        setup, cut, delta, state, _ = rarefaction_problem(
            n_cells=200, t_end=0.02, snapshot_times=(0.0, 0.011, 0.02))
        cfg = SolverConfig(t_end=0.02, snapshot_times=(0.0, 0.011, 0.02))
        res = run(state, cfg, setup.gas)
        assert [s.t for s in res.snapshots] == [0.0, 0.011, 0.02]
        assert res.final.t == 0.02

    def test_validation(self):
        with pytest.raises(ValueError):
            Grid(0.0, 1.0, 8)
        with pytest.raises(ValueError):
            Grid(1.0, 0.0, 64)
        with pytest.raises(ValueError):
            SolverConfig(cfl=1.2)
        with pytest.raises(ValueError):
            SolverConfig(visc_safety=0.6)
        with pytest.raises(ValueError):
            SolverConfig(flux="roe")
        with pytest.raises(ValueError):
            SolverConfig(bc="periodic")


class TestInit:
    def test_far_cells_match_constant_states(self):
        # domain wide enough for the tanh tails to saturate in float64
        gas0 = GasModel(gamma=GAMMA, alpha=0.5)
        setup = waves.make_setup(gas0, PrimitiveState(1.0, 0.0, 1.0))
        eps = 1e-2
        nu = delta = eps ** (1.0 / 3.0)
        cut = waves.make_cutoff(setup, nu)
        grid = Grid(-9.0, 6.0, 2000)
        state = init_well_prepared(grid, setup, cut, delta, eps)
        rho, u, theta = state.primitives()
        assert rho[0] == pytest.approx(cut.nu, abs=1e-12)
        assert u[0] == pytest.approx(cut.u_nu, abs=1e-12)
        assert theta[0] == pytest.approx(cut.theta_nu, abs=1e-12)
        assert rho[-1] == pytest.approx(1.0, abs=1e-12)
        assert theta[-1] == pytest.approx(1.0, abs=1e-12)

    def test_initial_mass_matches_quadrature(self):
        errs = []
        for n in (250, 500):
            setup, cut, delta, state, _ = rarefaction_problem(n_cells=n)
            mass = conserved_totals(state)[0]
            ref, _ = quad(lambda x: float(profile_eval(
                setup, cut, delta, np.array([x]), 0.0).rho[0]),
                state.grid.x_left, state.grid.x_right, limit=400)
            errs.append(abs(mass - ref))
        order = math.log2(errs[0] / errs[1])
        assert order > 1.9

    def test_rejects_vanishing_cutoff(self):
        setup, cut, delta, state, _ = rarefaction_problem(n_cells=100)
        fake = waves.CutoffState(nu=0.0, u_nu=0.0, theta_nu=0.0, lambda3_cut=0.0)
        with pytest.raises(ValueError):
            init_well_prepared(state.grid, setup, fake, delta, 1e-2)


class TestPreflight:
    def test_minimal_domain_has_margins(self, setup_g14):
        xl, xr = preflight_domain(setup_g14, 1.0)
        check_domain(xl, xr, setup_g14, 1.0)

    def test_small_domain_rejected(self, setup_g14):
        with pytest.raises(solver.PreflightError):
            check_domain(-1.0, 1.0, setup_g14, 1.0)


class TestAborts:
    def test_negative_temperature_aborts(self):
        gas = GasModel(GAMMA, 0.5)
        st = uniform_state(n=64)
        st.en[20] = -1e-3  # theta < 0 in this cell
        cfg = SolverConfig(t_end=1.0)
        with pytest.raises(SolverAbort):
            step(st, cfg, gas)

    def test_stage_level_abort_with_fixed_dt(self):
        gas = GasModel(GAMMA, 0.5)
        st = uniform_state(n=64)
        st.rho[30] = -0.5
        st.en[30] = 1.0
        cfg = SolverConfig(t_end=1.0, fixed_dt=1e-4)
        stepper = Stepper(st, cfg, gas)
        with pytest.raises(SolverAbort, match="positivity"):
            stepper.advance(st, 1e-4)

    def test_wall_budget_flags_partial(self):
        setup, cut, delta, state, _ = rarefaction_problem(n_cells=400)
        cfg = SolverConfig(t_end=1.0, max_wall_seconds=1e-4)
        res = run(state, cfg, setup.gas)
        assert res.partial
        assert res.final.t < 1.0


class TestConservationAndPositivity:
    def test_drift_over_ten_thousand_steps(self):
        setup, cut, delta, state, cfg = rarefaction_problem(
            eps=1e-2, n_cells=2000, t_end=1.0)
        res = run(state, cfg, setup.gas)
        assert res.n_steps >= 10_000
        assert res.drift <= 1e-10
        assert len(res.dt_history) == res.n_steps
        assert len(res.min_rho_history) == res.n_steps
        assert np.min(res.dt_history) == res.dt_min

    def test_positivity_floor_of_rarefaction_run(self):
        setup, cut, delta, state, cfg = rarefaction_problem(
            eps=1e-2, n_cells=1000, t_end=1.0)
        res = run(state, cfg, setup.gas)
        assert res.min_rho >= cut.nu / 2
        assert res.min_theta >= cut.theta_nu / 2

    def test_mirror_symmetry(self):
        gas = GasModel(GAMMA, 0.5)
        n = 256
        grid = Grid(-1.0, 1.0, n)
        x = grid.centers()
        rho = 1.0 + 0.3 * np.exp(-((x - 0.2) / 0.15) ** 2)
        u = 0.1 + 0.2 * np.sin(np.pi * x)
        th = 1.0 + 0.2 * np.exp(-((x + 0.1) / 0.2) ** 2)
        left = (rho[0], u[0], th[0])
        right = (rho[-1], u[-1], th[-1])
        fwd = state_from_primitives(grid, 0.03, rho, u, th, left, right)
        mir = state_from_primitives(grid, 0.03, rho[::-1], -u[::-1], th[::-1],
                                    (right[0], -right[1], right[2]),
                                    (left[0], -left[1], left[2]))
        cfg = SolverConfig(t_end=0.25)
        rf = run(fwd, cfg, gas)
        rm = run(mir, cfg, gas)
        r1, u1, t1 = rf.final.primitives()
        r2, u2, t2 = rm.final.primitives()
        assert np.max(np.abs(r2 - r1[::-1])) < 1e-12
        assert np.max(np.abs(u2 + u1[::-1])) < 1e-12
        assert np.max(np.abs(t2 - t1[::-1])) < 1e-12


def manufactured_fields():
    """Smooth exact fields plus the source arrays that make them a solution."""
    x, t = sympy.symbols("x t")
    two_pi = 2 * sympy.pi
    rho = 2 + sympy.Rational(1, 2) * sympy.sin(two_pi * (x - 0.37 * t))
    u = sympy.Rational(2, 5) + sympy.Rational(3, 20) * sympy.sin(two_pi * (x + 0.21 * t))
    th = sympy.Rational(6, 5) + sympy.Rational(1, 5) * sympy.cos(two_pi * (x - 0.11 * t))
    gm1 = sympy.Rational(2, 5)
    p = gm1 * rho * th
    m = rho * u
    E = rho * (th + u ** 2 / 2)
    s1 = sympy.diff(rho, t) + sympy.diff(m, x)
    s2 = sympy.diff(m, t) + sympy.diff(rho * u ** 2 + p, x)
    s3 = sympy.diff(E, t) + sympy.diff(u * (E + p), x)
    fr = sympy.lambdify((x, t), rho, "numpy")
    fu = sympy.lambdify((x, t), u, "numpy")
    ft = sympy.lambdify((x, t), th, "numpy")
    fs = [sympy.lambdify((x, t), s, "numpy") for s in (s1, s2, s3)]
    return fr, fu, ft, fs


class TestManufacturedSolution:
    def test_euler_l1_order(self):
        gas = GasModel(GAMMA, 0.5)
        fr, fu, ft, fs = manufactured_fields()
        t_end = 0.4
        errs = {}
        for n in (64, 128, 256):
            grid = Grid(0.0, 1.0, n)
            x = grid.centers()
            state = state_from_primitives(
                grid, 0.0, fr(x, 0.0), fu(x, 0.0), ft(x, 0.0),
                (fr(0.0, 0.0), fu(0.0, 0.0), ft(0.0, 0.0)),
                (fr(1.0, 0.0), fu(1.0, 0.0), ft(1.0, 0.0)))

            def source(xs, ts):
                return fs[0](xs, ts), fs[1](xs, ts), fs[2](xs, ts)

            def bc_fill(xg, ts):
                return fr(xg, ts), fu(xg, ts), ft(xg, ts)

            cfg = SolverConfig(t_end=t_end, bc="exact")
            res = run(state, cfg, gas, source=source, bc_fill=bc_fill)
            rho, _, _ = res.final.primitives()
            errs[n] = np.sum(np.abs(rho - fr(x, t_end))) * grid.dx
        slope = np.polyfit(np.log([64, 128, 256]),
                           np.log([errs[64], errs[128], errs[256]]), 1)[0]
        assert -slope >= 1.8, f"observed L1 order {-slope:.3f}"


def linearized_oracle(x_centers, dx, t, gas, eps, rho0, theta0, amp, width):
    """Exact cell-averaged solution of the constant-state linearization.

    Gaussian temperature bump; solved mode by mode in Fourier space with a
    matrix exponential, inverted with a sinc factor for the cell average.
    """
    mu0 = theta0 ** gas.alpha
    gm1 = gas.gamma - 1.0
    kmax = 30.0 / width
    ks = np.arange(0.0, kmax, 0.05)
    hat0 = amp * width * math.sqrt(2 * math.pi) * np.exp(-0.5 * (width * ks) ** 2)
    fields = np.zeros((3, len(x_centers)))
    for k, h0 in zip(ks, hat0):
        M = np.array([
            [0.0, -1j * k * rho0, 0.0],
            [-1j * k * gm1 * theta0 / rho0, -eps * mu0 * k * k / rho0,
             -1j * k * gm1],
            [0.0, -1j * k * gm1 * theta0, -eps * mu0 * k * k / rho0],
        ])
        v = expm(M * t) @ np.array([0.0, 0.0, h0])
        cell_avg = np.sinc(k * dx / (2 * math.pi))
        phase = np.exp(1j * k * x_centers) * cell_avg
        # real signal: k and -k contributions are conjugate
        weight = 0.05 / (2 * math.pi) * (1.0 if k == 0.0 else 2.0)
        fields += weight * np.real(phase[None, :] * v[:, None])
    return rho0 + fields[0], fields[1], theta0 + fields[2]


class TestLinearizedDiffusion:
    def test_energy_field_order_against_fourier_oracle(self):
        gas = GasModel(GAMMA, 0.5)
        eps, amp, width, t_end = 0.05, 1e-6, 0.1, 0.5
        errs = []
        ns = (128, 256, 512)
        for n in ns:
            grid = Grid(-2.0, 2.0, n)
            x = grid.centers()
            theta = 1.0 + amp * np.exp(-x * x / (2 * width ** 2))
            state = state_from_primitives(grid, eps, np.ones(n), np.zeros(n),
                                          theta, (1.0, 0.0, 1.0), (1.0, 0.0, 1.0))
            cfg = SolverConfig(t_end=t_end)
            res = run(state, cfg, gas)
            r_o, u_o, t_o = linearized_oracle(x, grid.dx, t_end, gas, eps,
                                              1.0, 1.0, amp, width)
            e_o = r_o * (t_o + 0.5 * u_o * u_o)
            e_sim = res.final.en[res.final.interior]
            errs.append(math.sqrt(np.sum((e_sim - e_o) ** 2) * grid.dx))
        slope = np.polyfit(np.log(ns), np.log(errs), 1)[0]
        assert -slope >= 1.8, f"observed L2 order {-slope:.3f}"

    def test_central_lobe_diffuses_like_the_oracle(self):
        # after the sound waves leave, the temperature remnant near the
        # origin is the diffusing lobe of the linearized dynamics: the
        # simulation must track it closely and its peak must have decayed
        gas = GasModel(GAMMA, 0.5)
        eps, amp, width, t_end = 0.05, 1e-6, 0.1, 0.5
        n = 512
        grid = Grid(-2.0, 2.0, n)
        x = grid.centers()
        theta = 1.0 + amp * np.exp(-x * x / (2 * width ** 2))
        state = state_from_primitives(grid, eps, np.ones(n), np.zeros(n),
                                      theta, (1.0, 0.0, 1.0), (1.0, 0.0, 1.0))
        res = run(state, SolverConfig(t_end=t_end), gas)
        _, _, th = res.final.primitives()
        zeta = th - 1.0
        _, _, t_o = linearized_oracle(x, grid.dx, t_end, gas, eps,
                                      1.0, 1.0, amp, width)
        zeta_o = t_o - 1.0
        core = np.abs(x) < 0.3
        mismatch = (np.linalg.norm(zeta[core] - zeta_o[core])
                    / np.linalg.norm(zeta_o[core]))
        assert mismatch < 0.02
        assert np.max(zeta[core]) < 0.5 * amp  # the lobe has decayed/spread


class TestConvergence:
    @staticmethod
    def _restrict(fine, factor):
        return fine.reshape(-1, factor).mean(axis=1)

    def test_self_convergence_sup_order(self):
        results = {}
        for n in (350, 700, 1400, 2800):
            setup, cut, delta, state, cfg = rarefaction_problem(
                eps=1e-2, n_cells=n, t_end=1.0)
            res = run(state, cfg, setup.gas)
            results[n] = res.final.rho[res.final.interior]
        ref = results[2800]
        errs = []
        for n in (350, 700, 1400):
            coarse_ref = self._restrict(ref, 2800 // n)
            # same boundary-margin convention as the error measurements:
            # the fixed Dirichlet ghosts pin the exact far field against the
            # profile tail, leaving a non-converging strip at the walls
            skip = int(0.05 * n)
            diff = np.abs(results[n] - coarse_ref)[skip:-skip]
            errs.append(float(np.max(diff)))
        orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
        assert min(orders) >= 1.0, f"observed sup orders {orders}"

    def test_temporal_order(self):
        gas = GasModel(GAMMA, 0.5)
        n = 200
        grid = Grid(-2.0, 2.0, n)
        x = grid.centers()
        rho = 1.0 + 0.2 * np.exp(-x * x / 0.32)
        u = 0.1 * np.sin(np.pi * x / 2)
        th = 1.0 + 0.1 * np.exp(-x * x / 0.5)
        mk = lambda: state_from_primitives(grid, 0.05, rho, u, th,
                                           (rho[0], u[0], th[0]),
                                           (rho[-1], u[-1], th[-1]))
        d0 = 1.2e-3
        finals = {}
        for dt in (d0, d0 / 2, d0 / 4, d0 / 32):
            cfg = SolverConfig(t_end=0.3, fixed_dt=dt)
            finals[dt] = run(mk(), cfg, gas).final.en[2:-2]
        ref = finals[d0 / 32]
        errs = [np.max(np.abs(finals[d] - ref)) for d in (d0, d0 / 2, d0 / 4)]
        orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
        assert min(orders) >= 1.9, f"observed temporal orders {orders}"

    def test_cfl_halving_changes_less_than_spatial_error(self):
        setup, cut, delta, state, _ = rarefaction_problem(eps=1e-2, n_cells=400)
        gas = setup.gas
        res_a = run(state, SolverConfig(t_end=0.5, cfl=0.45), gas)
        res_b = run(state, SolverConfig(t_end=0.5, cfl=0.225), gas)
        temporal = np.max(np.abs(res_a.final.rho - res_b.final.rho))

        setup2, cut2, delta2, state2, _ = rarefaction_problem(eps=1e-2, n_cells=800)
        res_f = run(state2, SolverConfig(t_end=0.5), gas)
        fine = self._restrict(res_f.final.rho[res_f.final.interior], 2)
        spatial = np.max(np.abs(res_a.final.rho[res_a.final.interior] - fine))
        assert temporal < spatial
