"""Dissipation sweeps: sup-norm errors, rate fits and energy functionals."""

import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import solver
from .burgers import ImplicitSolveError
from .gas import GasModel
from .profile import ProfileState, profile_eval
from .waves import WaveSetup, eval_cutoff_wave, eval_vacuum_wave, make_cutoff


class ScheduleError(ValueError):
    """Requested parameter schedule is outside its range of validity."""


def theoretical_rate(gas: GasModel) -> float:
    """Convergence-rate exponent 1 / (18*gamma + 12*alpha*(gamma-1))."""
    return 1.0 / (18.0 * gas.gamma + 12.0 * gas.alpha * (gas.gamma - 1.0))


@dataclass(frozen=True)
class Schedule:
    """Coupling of the cut-off density and smoothing width to the dissipation.

    The asymptotic mode nu = eps**a * |ln eps|, delta = eps**a is only
    meaningful for extremely small eps; the practical mode uses a plain
    power nu = delta = eps**b.
    """

    mode: str
    a: float | None = None
    b: float | None = None
    rho_plus: float = 1.0

    @classmethod
    def asymptotic(cls, gas: GasModel, rho_plus: float = 1.0) -> "Schedule":
        return cls(mode="asymptotic", a=theoretical_rate(gas),
                   rho_plus=rho_plus)

    @classmethod
    def practical(cls, b: float, rho_plus: float = 1.0) -> "Schedule":
        if not 0.0 < b < 1.0:
            raise ScheduleError(f"practical exponent must lie in (0, 1), got {b}")
        return cls(mode="practical-power", b=b, rho_plus=rho_plus)


def schedule_params(schedule: Schedule, eps: float):
    """(nu, delta) for one dissipation value; validates nu against rho_plus."""
    if not 0.0 < eps < 1.0:
        raise ScheduleError(f"eps must lie in (0, 1), got {eps}")
    if schedule.mode == "asymptotic":
        nu = eps ** schedule.a * abs(math.log(eps))
        delta = eps ** schedule.a
        if nu >= schedule.rho_plus:
            raise ScheduleError(
                f"asymptotic schedule gives nu={nu:.4g} >= rho_+={schedule.rho_plus}; "
                f"this regime needs far smaller eps, use the practical schedule")
        if nu >= 1.0:
            warnings.warn(f"asymptotic schedule gives nu={nu:.4g} >= 1; "
                          "only meaningful asymptotically", stacklevel=2)
    elif schedule.mode == "practical-power":
        nu = delta = eps ** schedule.b
        if nu >= schedule.rho_plus:
            raise ScheduleError(
                f"practical schedule gives nu={nu:.4g} >= rho_+={schedule.rho_plus}")
    else:
        raise ScheduleError(f"unknown schedule mode {schedule.mode!r}")
    return float(nu), float(delta)


@dataclass
class SupErrors:
    rho: float
    m: float
    n: float
    rho_cut: float
    m_cut: float
    n_cut: float


def sup_errors(snapshot: "solver.SimState", setup: WaveSetup, cutoff,
               t: float, margin_frac: float = 0.05) -> SupErrors:
    """Sup-norm distances of a snapshot to the vacuum and cut-off waves.

    Cell-centered pointwise comparison at xi = x/t over the interior,
    excluding a margin_frac strip of cells on each side.
    """
    if not t > 0.0:
        raise ValueError("self-similar comparison requires t > 0")
    rho, u, theta = snapshot.primitives()
    m = rho * u
    n = rho * theta
    x = snapshot.x()
    skip = int(margin_frac * len(x))
    sl = slice(skip, len(x) - skip if skip else None)
    xi = x[sl] / t

    vac = eval_vacuum_wave(setup, xi)
    cut = eval_cutoff_wave(setup, cutoff, xi)
    return SupErrors(
        rho=float(np.max(np.abs(rho[sl] - vac.rho))),
        m=float(np.max(np.abs(m[sl] - vac.m))),
        n=float(np.max(np.abs(n[sl] - vac.n))),
        rho_cut=float(np.max(np.abs(rho[sl] - cut.rho))),
        m_cut=float(np.max(np.abs(m[sl] - cut.m))),
        n_cut=float(np.max(np.abs(n[sl] - cut.n))),
    )


def _deriv_y(f: np.ndarray, dy: float) -> np.ndarray:
    """Second-order central difference, one-sided at the margins."""
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - f[:-2]) / (2.0 * dy)
    out[0] = (f[1] - f[0]) / dy
    out[-1] = (f[-1] - f[-2]) / dy
    return out


def energy_functionals(snapshot: "solver.SimState", prof: ProfileState,
                       gas: GasModel, eps: float):
    """Weighted perturbation energies in dissipation-scaled variables.

    With y = x/eps and (phi, psi, zeta) the deviation from the profile:
    E1 integrates the weighted squares, E2 the weighted density-gradient
    square, E3 the plain velocity/temperature gradient squares.
    """
    rho, u, theta = snapshot.primitives()
    phi = rho - prof.rho
    psi = u - prof.u
    zeta = theta - prof.theta
    g = gas.gamma
    dy = snapshot.grid.dx / eps
    rb, tb = prof.rho, prof.theta

    e1 = float(np.sum(rb ** (g - 2.0) * phi * phi
                      + rb * psi * psi
                      + rb ** (2.0 - g) * zeta * zeta) * dy)
    phi_y = _deriv_y(phi, dy)
    e2 = float(np.sum(tb ** (2.0 * gas.alpha) / rb ** 3 * phi_y * phi_y) * dy)
    psi_y = _deriv_y(psi, dy)
    zeta_y = _deriv_y(zeta, dy)
    e3 = float(np.sum(psi_y * psi_y + zeta_y * zeta_y) * dy)
    return e1, e2, e3


@dataclass
class SweepRecord:
    eps: float
    nu: float
    delta: float
    n_cells: int
    t_measure: float
    err_rho: float
    err_m: float
    err_n: float
    err_rho_cut: float
    err_m_cut: float
    err_n_cut: float
    E1: float
    E2: float
    E3: float
    wall_seconds: float
    sup_phi: float = math.nan
    sup_psi: float = math.nan
    sup_zeta: float = math.nan
    monitor_ok: bool = True
    flag: str = ""


CSV_COLUMNS = ("eps", "nu", "delta", "n_cells", "t_measure",
               "err_rho", "err_m", "err_n",
               "err_rho_cut", "err_m_cut", "err_n_cut",
               "E1", "E2", "E3", "wall_seconds")


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_sweep_csv(records, fh):
    fh.write(",".join(CSV_COLUMNS) + "\n")
    for r in records:
        fh.write(",".join(_fmt(getattr(r, c)) for c in CSV_COLUMNS) + "\n")


def _sweep_job(args):
    (eps, nu, delta, gas, setup, cfg_fields, cells_per_eps, measure_times,
     margin_frac, monitor_factor, kernel_choice) = args
    t0 = time.perf_counter()
    cutoff = make_cutoff(setup, nu)
    cfg = solver.SolverConfig(**cfg_fields)
    cfg.snapshot_times = tuple(measure_times)
    cfg.t_end = max(measure_times)
    xl, xr = solver.preflight_domain(setup, cfg.t_end)
    solver.check_domain(xl, xr, setup, cfg.t_end)
    n_cells = int(math.ceil((xr - xl) * cells_per_eps / eps))
    grid = solver.Grid(xl, xr, n_cells)
    state = solver.init_well_prepared(grid, setup, cutoff, delta, eps)
    kernel = solver.select_kernel(kernel_choice)

    rec = SweepRecord(eps=eps, nu=nu, delta=delta, n_cells=n_cells,
                      t_measure=max(measure_times),
                      err_rho=math.nan, err_m=math.nan, err_n=math.nan,
                      err_rho_cut=math.nan, err_m_cut=math.nan,
                      err_n_cut=math.nan, E1=math.nan, E2=math.nan,
                      E3=math.nan, wall_seconds=0.0)
    try:
        result = solver.run(state, cfg, gas, kernel=kernel)
        a = theoretical_rate(gas)
        thr_phi = monitor_factor * eps ** a
        thr_zeta = monitor_factor * eps ** ((gas.gamma - 1.0) * a)
        errs, e123, sups = [], [], []
        for snap in result.snapshots:
            se = sup_errors(snap, setup, cutoff, snap.t, margin_frac)
            prof = profile_eval(setup, cutoff, delta, snap.x(), snap.t)
            e123.append(energy_functionals(snap, prof, gas, eps))
            errs.append(se)
            rho, u, theta = snap.primitives()
            sups.append((float(np.max(np.abs(rho - prof.rho))),
                         float(np.max(np.abs(u - prof.u))),
                         float(np.max(np.abs(theta - prof.theta)))))
        rec.err_rho = max(e.rho for e in errs)
        rec.err_m = max(e.m for e in errs)
        rec.err_n = max(e.n for e in errs)
        rec.err_rho_cut = max(e.rho_cut for e in errs)
        rec.err_m_cut = max(e.m_cut for e in errs)
        rec.err_n_cut = max(e.n_cut for e in errs)
        rec.E1 = max(e[0] for e in e123)
        rec.E2 = max(e[1] for e in e123)
        rec.E3 = max(e[2] for e in e123)
        rec.sup_phi = max(s[0] for s in sups)
        rec.sup_psi = max(s[1] for s in sups)
        rec.sup_zeta = max(s[2] for s in sups)
        rec.monitor_ok = (rec.sup_phi < thr_phi and rec.sup_psi < thr_phi
                          and rec.sup_zeta < thr_zeta)
        if result.partial:
            rec.flag = "partial: wall-clock budget exceeded"
    except (solver.SolverAbort, ImplicitSolveError) as exc:
        rec.flag = f"aborted: {exc}"
    rec.wall_seconds = time.perf_counter() - t0
    return rec


def run_sweep(eps_list, schedule: Schedule, solver_cfg: "solver.SolverConfig",
              gas: GasModel, setup: WaveSetup, *, cells_per_eps: int = 8,
              l: float = 0.5, measure_times=None, margin_frac: float = 0.05,
              monitor_factor: float = 10.0, workers: int = 1,
              kernel_choice: str | None = None):
    """One solver run per dissipation value; records collected in eps order.

    eps_list must be strictly decreasing inside (0, 1). Runs are independent
    jobs over a process pool of at most `workers`; an aborted run yields a
    flagged record and the sweep continues. Errors and functionals are
    maximized over the measurement times (snapshot times at or above l,
    defaulting to three points spanning [l, t_end]).
    """
    eps_list = [float(e) for e in eps_list]
    if any(not 0.0 < e < 1.0 for e in eps_list):
        raise ValueError("every eps must lie in (0, 1)")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    if not eps_list:
        return []
    if measure_times is None:
        measure_times = [t for t in solver_cfg.snapshot_times if t >= l]
    if not measure_times:
        measure_times = list(np.linspace(l, solver_cfg.t_end, 3))
    if min(measure_times) < l or min(measure_times) <= 0.0:
        raise ValueError(f"measurement times must be >= l = {l} and positive")

    cfg_fields = {k: getattr(solver_cfg, k) for k in
                  ("cfl", "visc_safety", "flux", "bc", "t_end", "fixed_dt",
                   "max_wall_seconds")}
    jobs = []
    for eps in eps_list:
        nu, delta = schedule_params(schedule, eps)
        jobs.append((eps, nu, delta, gas, setup, cfg_fields, cells_per_eps,
                     list(measure_times), margin_frac, monitor_factor,
                     kernel_choice))

    if workers > 1 and len(jobs) > 1:
        # hardest jobs first for a tight makespan; output stays in eps order
        order = sorted(range(len(jobs)), key=lambda i: eps_list[i])
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            futures = {i: pool.submit(_sweep_job, jobs[i]) for i in order}
            records = [futures[i].result() for i in range(len(jobs))]
    else:
        records = [_sweep_job(j) for j in jobs]
    return records


@dataclass
class FitResult:
    C: float
    b: float
    residual: float


def fit_rate(records, field: str, log_corrected: bool = False) -> FitResult:
    """Least-squares fit err = C * eps**b (optionally times |ln eps|).

    Needs at least three records with positive error values; the residual
    is the rms misfit of log(err) around the fitted line.
    """
    eps = np.array([r.eps for r in records], dtype=float)
    err = np.array([getattr(r, field) for r in records], dtype=float)
    keep = np.isfinite(err)
    eps, err = eps[keep], err[keep]
    if len(eps) < 3:
        raise ValueError("rate fit needs at least 3 records")
    if np.any(err <= 0.0):
        raise ValueError("rate fit needs positive errors")
    y = np.log(err)
    if log_corrected:
        y = y - np.log(np.abs(np.log(eps)))
    A = np.vstack([np.log(eps), np.ones_like(eps)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return FitResult(C=float(np.exp(coef[1])), b=float(coef[0]),
                     residual=float(np.sqrt(np.mean(resid ** 2))))


def fit_summary(records) -> dict:
    """Plain and log-corrected fits for every error field, or a marker."""
    out = {}
    for fld in ("err_rho", "err_m", "err_n"):
        try:
            plain = fit_rate(records, fld)
            corr = fit_rate(records, fld, log_corrected=True)
            out[fld] = {
                "plain": {"C": plain.C, "b": plain.b, "residual": plain.residual},
                "log_corrected": {"C": corr.C, "b": corr.b,
                                  "residual": corr.residual},
            }
        except ValueError as exc:
            out[fld] = {"error": f"insufficient points: {exc}"}
    return out
