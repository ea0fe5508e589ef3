"""Property suites behind the `verify` subcommand and the acceptance tests.

Each check returns a CheckResult with the sampled ratios in its detail
string; constants that the analysis leaves non-constructive are reported as
sampled extrema and only boundedness or sign is asserted.
"""

import inspect
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import burgers, gas, profile, waves
from .gas import GasModel, PrimitiveState


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _res(name, passed, detail=""):
    return CheckResult(name=name, passed=bool(passed), detail=detail)


def sigma3_quadrature(g: GasModel, rho: float, u: float, theta: float) -> float:
    """Independent Riemann-invariant evaluation by adaptive quadrature.

    Integrates sqrt(p_z(z, S))/z from the exact vacuum endpoint; the
    integrable endpoint singularity is handled by the quadrature's own
    extrapolation, a truncated lower limit would lose mass for gamma
    near 1.
    """
    s_val = float(gas.entropy(g, PrimitiveState(rho, u, theta)))
    gm1 = g.gamma - 1.0

    def integrand(z):
        return np.sqrt(g.gamma * gm1 * z ** gm1 * np.exp(s_val)) / z

    val, _ = quad(integrand, 0.0, rho, epsabs=1e-12, epsrel=1e-12, limit=400)
    return u - val


def check_sigma3_closed_form(seed: int = 12345, n_states: int = 100) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    gammas = [1.2, 1.4, 5.0 / 3.0, 2.0, 3.0]
    for i in range(n_states):
        gm = GasModel(gamma=gammas[i % len(gammas)], alpha=1.0)
        rho = 10.0 ** rng.uniform(-6, 1)
        theta = 10.0 ** rng.uniform(-3, 1)
        u = rng.uniform(-5, 5)
        st = PrimitiveState(rho, u, theta)
        closed = float(gas.sigma3(gm, st))
        oracle = sigma3_quadrature(gm, rho, u, theta)
        worst = max(worst, abs(closed - oracle) / max(abs(oracle), 1e-30))
    return _res("sigma3 closed form vs quadrature", worst <= 1e-10,
                f"max rel err {worst:.2e} over {n_states} states (tol 1e-10)")


def check_entropy_roundtrip(seed: int = 12345, n_states: int = 200) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_states):
        gm = GasModel(gamma=rng.uniform(1.1, 3.0), alpha=1.0)
        rho = 10.0 ** rng.uniform(-4, 1)
        theta = 10.0 ** rng.uniform(-4, 1)
        s_val = gas.entropy(gm, PrimitiveState(rho, 0.0, theta))
        back = rho ** (gm.gamma - 1.0) * np.exp(s_val)
        worst = max(worst, abs(back - theta) / theta)
    return _res("entropy/temperature inversion", worst <= 1e-14,
                f"max rel err {worst:.2e} (tol 1e-14)")


def check_eta_positivity(seed: int = 12345, n_pairs: int = 400) -> CheckResult:
    rng = np.random.default_rng(seed)
    ok = True
    min_eta = np.inf
    for _ in range(n_pairs):
        gm = GasModel(gamma=rng.uniform(1.1, 2.5), alpha=1.0)
        ref = PrimitiveState(10.0 ** rng.uniform(-2, 1), rng.uniform(-2, 2),
                             10.0 ** rng.uniform(-2, 1))
        st = PrimitiveState(ref.rho * rng.uniform(0.3, 3.0),
                            ref.u + rng.uniform(-2, 2),
                            ref.theta * rng.uniform(0.3, 3.0))
        eta, _ = gas.relative_entropy_eta(gm, st, ref)
        same = (st.rho == ref.rho and st.u == ref.u and st.theta == ref.theta)
        if eta < 0 or (not same and eta <= 0):
            ok = False
        min_eta = min(min_eta, float(eta))
        eta0, q0 = gas.relative_entropy_eta(gm, ref, ref)
        if eta0 != 0.0 or q0 != 0.0:
            ok = False
    return _res("relative entropy nonnegative, zero only at coincidence", ok,
                f"min eta over distinct pairs {min_eta:.3e}")


def check_f_beta_hessian(beta: float = 0.75) -> CheckResult:
    h = 1e-4
    ok = True
    worst = 0.0
    for gamma in (1.2, 1.4, 5.0 / 3.0, 2.0, 3.0):
        gm = GasModel(gamma=gamma, alpha=1.0)
        f = lambda a, b: float(gas.f_beta(gm, beta, a, b))
        fd = np.array([
            [(f(1 + h, 1) - 2 * f(1, 1) + f(1 - h, 1)) / h ** 2,
             (f(1 + h, 1 + h) - f(1 + h, 1 - h) - f(1 - h, 1 + h)
              + f(1 - h, 1 - h)) / (4 * h ** 2)],
            [0.0,
             (f(1, 1 + h) - 2 * f(1, 1) + f(1, 1 - h)) / h ** 2],
        ])
        fd[1, 0] = fd[0, 1]
        closed = gas.f_beta_hessian_at_one(gm, beta)
        worst = max(worst, float(np.max(np.abs(fd - closed))))
        det = gas.hessian_det_f_beta(gm, beta)
        if not det > 0.0:
            ok = False
        if abs(det - np.linalg.det(closed)) > 1e-12:
            ok = False
    ok = ok and worst <= 1e-6
    return _res("f_beta Hessian matches finite differences", ok,
                f"max matrix err {worst:.2e} (tol 1e-6), det positive for all gamma")


def check_f_beta_grid(gamma: float = 1.4, beta: float = 0.75) -> CheckResult:
    gm = GasModel(gamma=gamma, alpha=1.0)
    xs = np.linspace(0.9, 1.1, 81)
    x1, x2 = np.meshgrid(xs, xs)
    vals = gas.f_beta(gm, beta, x1, x2)
    center = (np.abs(x1 - 1.0) < 1e-12) & (np.abs(x2 - 1.0) < 1e-12)
    ok = bool(np.all(vals[~center] > 0.0)) and abs(float(vals[center][0])) < 1e-15
    return _res("f_beta positive on [0.9,1.1]^2 off (1,1)", ok,
                f"min off-center value {float(np.min(vals[~center])):.3e}")


def check_h_lower_bound(seed: int = 12345, n_refs: int = 30,
                        n_pert: int = 60) -> CheckResult:
    """Sampled coercivity constant of the expansion form near coincidence."""
    rng = np.random.default_rng(seed)
    c0 = np.inf
    for _ in range(n_refs):
        gm = GasModel(gamma=rng.uniform(1.2, 2.0), alpha=1.0)
        ref = PrimitiveState(10.0 ** rng.uniform(-1.5, 0.5), rng.uniform(-2, 2),
                             10.0 ** rng.uniform(-1.5, 0.5))
        for _ in range(n_pert):
            st = PrimitiveState(ref.rho * (1 + rng.uniform(-0.1, 0.1)),
                                ref.u + rng.uniform(-0.1, 0.1) * np.sqrt(ref.theta),
                                ref.theta * (1 + rng.uniform(-0.1, 0.1)))
            hval = float(gas.expansion_coercive_form(gm, st, ref))
            w = float(gas.coercivity_weight_norm(gm, st, ref))
            if w > 0:
                c0 = min(c0, hval / w)
    return _res("expansion form coercive near coincidence", c0 > 0.0,
                f"sampled min ratio c0 = {c0:.4f} (must be positive)")


def _standard_setup(gamma=2.0):
    gm = GasModel(gamma=gamma, alpha=1.0)
    return waves.make_setup(gm, PrimitiveState(1.0, 0.0, 1.0))


def check_fan_invariants(n_samples: int = 1000) -> CheckResult:
    ok = True
    details = []
    for gamma in (1.4, 2.0):
        setup = _standard_setup(gamma)
        xi = np.linspace(setup.u_minus, setup.lambda3_right, n_samples)
        st = waves.eval_vacuum_wave(setup, xi)
        sig = gas.sigma3(setup.gas, st)
        lam = gas.lambda3(setup.gas, st)
        ent = gas.entropy(setup.gas, PrimitiveState(
            np.maximum(st.rho, 1e-300), st.u, np.maximum(st.theta, 1e-300)))
        inner = slice(1, None)  # entropy undefined at the vacuum edge itself
        e_sig = float(np.max(np.abs(sig - setup.u_minus)))
        e_lam = float(np.max(np.abs(lam - xi)))
        e_ent = float(np.max(np.abs(ent[inner] - setup.s_plus)))
        mono = bool(np.all(np.diff(st.rho) >= 0) and np.all(np.diff(st.u) >= 0)
                    and np.all(np.diff(st.theta) >= 0))
        if max(e_sig, e_lam, e_ent) > 1e-11 or not mono:
            ok = False
        details.append(f"gamma={gamma}: |dSigma|={e_sig:.1e} |dLam|={e_lam:.1e} "
                       f"|dS|={e_ent:.1e} monotone={mono}")
    return _res("fan constancy of invariants (tol 1e-11)", ok, "; ".join(details))


def check_fan_edges() -> CheckResult:
    setup = _standard_setup(2.0)
    ok = True
    h = 1e-13
    for edge in (setup.u_minus, setup.lambda3_right):
        left = waves.eval_vacuum_wave(setup, edge - h)
        right = waves.eval_vacuum_wave(setup, edge + h)
        at = waves.eval_vacuum_wave(setup, edge)
        for f in ("rho", "m", "n"):
            vals = [float(getattr(s, f)) for s in (left, at, right)]
            if max(vals) - min(vals) > 1e-10:
                ok = False
    cut = waves.make_cutoff(setup, 0.3)
    xi = np.linspace(cut.lambda3_cut, setup.lambda3_right + 1.0, 500)
    vac = waves.eval_vacuum_wave(setup, xi)
    cu = waves.eval_cutoff_wave(setup, cut, xi)
    agree = float(np.max(np.abs(vac.rho - cu.rho)))
    ok = ok and agree == 0.0
    return _res("fan edge continuity and cut/vacuum agreement", ok,
                f"cut/vacuum agreement right of the cut: {agree:.1e}")


def check_implicit_residual(seed: int = 12345, n_queries: int = 1_000_000
                            ) -> CheckResult:
    rng = np.random.default_rng(seed)
    bp = burgers.BurgersProfile(w_minus=-1.3, w_plus=0.9, delta=1e-2)
    x = rng.uniform(-50, 50, n_queries)
    t = 10.0 ** rng.uniform(-3, 2, n_queries)
    w, x0 = burgers.w_eval(bp, x, t)
    resid = np.abs(x0 + burgers.w_init(bp, x0) * t - x)
    bound = 1e-12 * (1.0 + np.abs(x))
    worst = float(np.max(resid / bound))
    return _res("implicit solve residual <= 1e-12*(1+|x|)", worst <= 1.0,
                f"worst residual ratio {worst:.3f} over {n_queries} queries")


def check_curvature_bound() -> CheckResult:
    """Pointwise |w_xx| <= (4/delta) w_x; positivity of w_x where it is
    representable (the slope underflows to zero in the far tails)."""
    ok = True
    worst = 0.0
    for delta in (1e-1, 1e-2, 1e-3):
        bp = burgers.BurgersProfile(-1.0, 1.0, delta)
        for t in (0.1, 1.0, 10.0):
            x = np.concatenate([np.linspace(-1 - 2 * t, 1 + 2 * t, 4000),
                                np.linspace(-40 * delta, 40 * delta, 4000)])
            wx, wxx = burgers.w_derivs(bp, x, t)
            if np.any(np.abs(wxx) > (4.0 / delta) * wx):
                ok = False
            if np.any(wx < 0.0):
                ok = False
            pos = wx > 0.0
            if not pos.any():
                ok = False
                continue
            worst = max(worst, float(np.max(
                np.abs(wxx[pos]) / ((4.0 / delta) * wx[pos]))))
    return _res("|w_xx| <= (4/delta) w_x on the (delta, t) ladder", ok,
                f"max ratio {worst:.3f} (must be <= 1)")


def check_sharp_distance_ratios() -> CheckResult:
    """Distance to the sharp wave against delta/t * (log(1+t) + |log delta|)."""
    ratios = []
    for delta in (1e-1, 1e-2, 1e-3):
        bp = burgers.BurgersProfile(-1.0, 1.0, delta)
        for t in (0.1, 1.0, 10.0):
            d = burgers.sup_distance_to_sharp(bp, t)
            env = delta / t * (np.log1p(t) + abs(np.log(delta)))
            ratios.append(d / env)
    spread = max(ratios) / min(ratios)
    return _res("sharp-wave distance tracks its envelope (spread < 10x)",
                spread < 10.0,
                f"ratio range [{min(ratios):.3f}, {max(ratios):.3f}], "
                f"spread {spread:.2f}x")


def check_lp_ratio_table() -> CheckResult:
    rows_all = []
    for delta in (1e-1, 1e-2, 1e-3):
        bp = burgers.BurgersProfile(-1.0, 1.0, delta)
        for t in (0.1, 1.0, 10.0):
            rows_all.extend(burgers.lp_envelope_report(bp, t, [1.0, 2.0, np.inf]))
    wx = [r["wx_ratio"] for r in rows_all]
    wxx = [r["wxx_ratio"] for r in rows_all]
    spread_x = max(wx) / min(wx)
    spread_xx = max(wxx) / min(wxx)
    ok = spread_x < 10.0 and spread_xx < 10.0
    return _res("Lp norm ratios stable across the ladder (spread < 10x)", ok,
                f"wx spread {spread_x:.2f}x, wxx spread {spread_xx:.2f}x")


def check_cutoff_convergence() -> CheckResult:
    """Cut-off error decay in nu on a wave with an inflowing right state.

    With u_+ = 0 the exact momentum gap is nu*|u_nu| and |u_nu| still drifts
    by tens of percent over nu in [1e-4, 1e-1], flattening the observed
    slope below its asymptotic value 1; an inflow velocity keeps |u_nu|
    nearly constant so the ladder probes the genuine scaling.
    """
    gm = GasModel(gamma=2.0, alpha=1.0)
    setup = waves.make_setup(gm, PrimitiveState(1.0, -1.0, 1.0))
    nus = np.array([1e-1, 1e-2, 1e-3, 1e-4])
    errs = {"rho": [], "m": [], "n": []}
    for nu in nus:
        er, em, en_ = waves.cutoff_sup_error(setup, nu)
        errs["rho"].append(er)
        errs["m"].append(em)
        errs["n"].append(en_)
    ok = True
    details = []
    for fld, vals in errs.items():
        vals = np.array(vals)
        if np.any(np.diff(vals) >= 0):
            ok = False
        slope = np.polyfit(np.log(nus), np.log(vals), 1)[0]
        if slope < 0.95:
            ok = False
        details.append(f"{fld}: slope {slope:.3f}")
    ratio = max(e / n for e, n in zip(errs["rho"], nus))
    details.append(f"max err_rho/nu = {ratio:.3f}")
    return _res("cut-off error decays at least linearly in nu (slope >= 0.95)",
                ok, "; ".join(details))


def check_profile_derivatives(seed: int = 12345, n_pts: int = 200) -> CheckResult:
    """Analytic profile derivatives against central finite differences.

    The second derivative is differenced from the analytic first
    derivative: a double difference of the value field sits on a rounding
    floor of (root-solve tolerance)/h^2, orders of magnitude above the
    1e-6 target, while the truncation error here stays second order.
    Queries are drawn through the characteristic map so none land in the
    saturated far tails, and near-zero derivatives are compared against a
    floor tied to the field's largest derivative.
    """
    rng = np.random.default_rng(seed)
    setup = _standard_setup(1.4)
    cut = waves.make_cutoff(setup, 0.2)
    delta = 0.1
    bp = profile.burgers_for(setup, cut, delta)
    x0 = rng.uniform(-8 * delta, 8 * delta, n_pts)
    t = rng.uniform(0.0, 5.0, n_pts)
    x = x0 + np.asarray(burgers.w_init(bp, x0)) * t

    worst = 0.0
    ps = profile.profile_eval(setup, cut, delta, x, t)
    h = 1e-5 * max(delta, 1.0)
    pp = profile.profile_eval(setup, cut, delta, x + h, t)
    pm = profile.profile_eval(setup, cut, delta, x - h, t)
    for fld in ("rho", "u", "theta"):
        d1 = getattr(ps, fld + "_x")
        d2 = getattr(ps, fld + "_xx")
        fd1 = (getattr(pp, fld) - getattr(pm, fld)) / (2 * h)
        fd2 = (getattr(pp, fld + "_x") - getattr(pm, fld + "_x")) / (2 * h)
        scale1 = np.maximum(np.abs(d1), 1e-4 * np.max(np.abs(d1)))
        scale2 = np.maximum(np.abs(d2), 1e-4 * np.max(np.abs(d2)))
        worst = max(worst, float(np.max(np.abs(d1 - fd1) / scale1)))
        worst = max(worst, float(np.max(np.abs(d2 - fd2) / scale2)))
    return _res("profile derivatives match finite differences (tol 1e-6)",
                worst <= 1e-6, f"max rel mismatch {worst:.2e}")


def check_profile_euler_residual() -> CheckResult:
    setup = _standard_setup(1.4)
    cut = waves.make_cutoff(setup, 0.2)
    delta = 0.1
    x = np.linspace(-3.5, 2.5, 400)
    hs = np.array([4e-3, 2e-3, 1e-3, 5e-4])
    norms = []
    for h in hs:
        r1, r2, r3 = profile.euler_residual(setup, cut, delta, x, 1.0, h)
        norms.append(max(float(np.max(np.abs(r))) for r in (r1, r2, r3)))
    slope = np.polyfit(np.log(hs), np.log(norms), 1)[0]
    return _res("profile solves the inviscid system (residual order >= 1.8)",
                slope >= 1.8, f"time-difference order {slope:.3f}, "
                f"residual at h=5e-4: {norms[-1]:.2e}")


def check_profile_cutoff_decay() -> CheckResult:
    setup = _standard_setup(1.4)
    ratios = []
    for delta in (1e-1, 1e-2, 1e-3):
        cut = waves.make_cutoff(setup, 0.2)
        for t in (0.5, 1.0, 5.0):
            x = np.linspace(setup.u_minus * t - 1, setup.lambda3_right * t + 1,
                            20001)
            ps = profile.profile_eval(setup, cut, delta, x, t)
            cw = waves.eval_cutoff_wave(setup, cut, x / t)
            dist = max(float(np.max(np.abs(ps.rho - cw.rho))),
                       float(np.max(np.abs(ps.u - cw.u))),
                       float(np.max(np.abs(ps.theta - cw.theta))))
            env = delta / t * (np.log1p(t) + abs(np.log(delta)))
            ratios.append(dist / env)
    spread = max(ratios) / min(ratios)
    return _res("profile-to-cutoff distance tracks its envelope (spread < 10x)",
                spread < 10.0,
                f"ratio range [{min(ratios):.3f}, {max(ratios):.3f}]")


SUITES = {
    "gas_model": [check_sigma3_closed_form, check_entropy_roundtrip,
                  check_eta_positivity, check_f_beta_hessian,
                  check_f_beta_grid, check_h_lower_bound],
    "fan": [check_fan_invariants, check_fan_edges],
    "smoothed_wave": [check_implicit_residual, check_curvature_bound,
                      check_sharp_distance_ratios, check_lp_ratio_table],
    "cutoff": [check_cutoff_convergence],
    "profile": [check_profile_derivatives, check_profile_euler_residual,
                check_profile_cutoff_decay],
}


def run_all(seed: int = 12345):
    """Run every suite; returns (results, all_passed)."""
    results = []
    for suite, checks in SUITES.items():
        for fn in checks:
            kwargs = {}
            if "seed" in inspect.signature(fn).parameters:
                kwargs["seed"] = seed
            res = fn(**kwargs)
            res.name = f"{suite}: {res.name}"
            results.append(res)
    return results, all(r.passed for r in results)
