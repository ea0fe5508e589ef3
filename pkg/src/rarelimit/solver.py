"""Conservative finite-volume solver for the 1D viscous gas equations.

Explicit two-stage SSP time stepping over a MUSCL reconstruction with
monotonized-central slopes, a local two-wave convective flux, and central
viscous/heat fluxes. The hot kernels live in a compiled extension with a
numpy fallback selected at import; both share identical arithmetic.
"""

import os
import time
from dataclasses import dataclass

import numpy as np

from . import _kernels_numpy
from .gas import GasModel
from .profile import profile_eval
from .waves import CutoffState, WaveSetup

try:
    from . import _core
    HAVE_COMPILED = True
except ImportError:
    _core = None
    HAVE_COMPILED = False


def select_kernel(name: str | None = None):
    """Pick the kernel backend: 'compiled' or 'numpy' (env RARELIMIT_KERNEL)."""
    name = name or os.environ.get("RARELIMIT_KERNEL", "")
    if name == "numpy":
        return _kernels_numpy
    if name == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernel requested but not built")
        return _core
    return _core if HAVE_COMPILED else _kernels_numpy


def kernel_name(kernel=None) -> str:
    kernel = kernel or select_kernel()
    return "compiled" if HAVE_COMPILED and kernel is _core else "numpy"


class SolverAbort(RuntimeError):
    """Positivity loss or non-finite state; carries step context."""


class PreflightError(ValueError):
    """Domain too small for the wave to stay clear of the boundaries."""


@dataclass(frozen=True)
class Grid:
    x_left: float
    x_right: float
    n_cells: int
    n_ghost: int = 2

    def __post_init__(self):
        if not self.x_left < self.x_right:
            raise ValueError("x_left must be below x_right")
        if self.n_cells < 16:
            raise ValueError("need at least 16 cells")
        if self.n_ghost < 2:
            raise ValueError("need at least 2 ghost layers")

    @property
    def dx(self) -> float:
        return (self.x_right - self.x_left) / self.n_cells

    @property
    def n_tot(self) -> int:
        return self.n_cells + 2 * self.n_ghost

    def centers(self, with_ghosts: bool = False) -> np.ndarray:
        idx = np.arange(-self.n_ghost, self.n_cells + self.n_ghost) if with_ghosts \
            else np.arange(self.n_cells)
        return self.x_left + (idx + 0.5) * self.dx


@dataclass
class SolverConfig:
    cfl: float = 0.45
    visc_safety: float = 0.4
    flux: str = "rusanov"
    bc: str = "fixed"
    t_end: float = 1.0
    snapshot_times: tuple = ()
    fixed_dt: float | None = None
    max_wall_seconds: float | None = None
    threads: int = 1

    def __post_init__(self):
        if not 0.0 < self.cfl < 1.0:
            raise ValueError("cfl must lie in (0, 1)")
        if not 0.0 < self.visc_safety < 0.5:
            raise ValueError("visc_safety must lie in (0, 0.5)")
        if self.flux != "rusanov":
            raise ValueError(f"unknown flux {self.flux!r}")
        if self.bc not in ("fixed", "exact"):
            raise ValueError(f"unknown bc mode {self.bc!r}")


@dataclass
class SimState:
    """Cell-averaged conservative fields on a grid with ghost layers."""

    grid: Grid
    eps: float
    t: float
    rho: np.ndarray
    mom: np.ndarray
    en: np.ndarray

    def copy(self) -> "SimState":
        return SimState(self.grid, self.eps, self.t,
                        self.rho.copy(), self.mom.copy(), self.en.copy())

    @property
    def interior(self) -> slice:
        ng = self.grid.n_ghost
        return slice(ng, ng + self.grid.n_cells)

    def primitives(self):
        """Interior (rho, u, theta)."""
        s = self.interior
        rho = self.rho[s]
        u = self.mom[s] / rho
        theta = self.en[s] / rho - 0.5 * u * u
        return rho, u, theta

    def x(self) -> np.ndarray:
        return self.grid.centers()


def prim_to_cons(rho, u, theta):
    rho = np.asarray(rho, dtype=float)
    u = np.asarray(u, dtype=float)
    theta = np.asarray(theta, dtype=float)
    return rho, rho * u, rho * (theta + 0.5 * u * u)


def state_from_primitives(grid: Grid, eps: float, rho, u, theta,
                          left_state, right_state, t: float = 0.0) -> SimState:
    """Build a state from interior primitives plus constant ghost states."""
    ng, nc = grid.n_ghost, grid.n_cells
    arr_rho = np.empty(grid.n_tot)
    arr_mom = np.empty(grid.n_tot)
    arr_en = np.empty(grid.n_tot)
    r, m, e = prim_to_cons(rho, u, theta)
    arr_rho[ng:ng + nc], arr_mom[ng:ng + nc], arr_en[ng:ng + nc] = r, m, e
    rl, ml, el = prim_to_cons(*left_state)
    rr, mr, er = prim_to_cons(*right_state)
    arr_rho[:ng], arr_mom[:ng], arr_en[:ng] = rl, ml, el
    arr_rho[ng + nc:], arr_mom[ng + nc:], arr_en[ng + nc:] = rr, mr, er
    return SimState(grid=grid, eps=float(eps), t=float(t),
                    rho=arr_rho, mom=arr_mom, en=arr_en)


def init_well_prepared(grid: Grid, setup: WaveSetup, cutoff: CutoffState,
                       delta: float, eps: float) -> SimState:
    """Initial data equal to the approximate wave at t = 0.

    Ghost cells hold the cut-off state on the left and the right state on
    the right; the solver refuses a vanishing cut-off density.
    """
    if not cutoff.nu > 0.0:
        raise ValueError("cut-off density must be positive")
    ps = profile_eval(setup, cutoff, delta, grid.centers(), 0.0)
    left = (cutoff.nu, cutoff.u_nu, cutoff.theta_nu)
    right = (setup.right.rho, setup.right.u, setup.right.theta)
    return state_from_primitives(grid, eps, ps.rho, ps.u, ps.theta, left, right)


def preflight_domain(setup: WaveSetup, t_end: float,
                     margin_frac: float = 0.1) -> tuple:
    """Smallest domain keeping both fan edges margin_frac of the width clear.

    A floor on the span keeps the domain nondegenerate for very short runs,
    where only the initial transition around the origin matters.
    """
    left_edge = min(0.0, setup.u_minus * t_end)
    right_edge = max(0.0, setup.lambda3_right * t_end)
    if right_edge - left_edge < 2.0:
        pad = 0.5 * (2.0 - (right_edge - left_edge))
        left_edge -= pad
        right_edge += pad
    width = (right_edge - left_edge) / (1.0 - 2.0 * margin_frac)
    return left_edge - margin_frac * width, right_edge + margin_frac * width


def check_domain(x_left: float, x_right: float, setup: WaveSetup, t_end: float,
                 margin_frac: float = 0.1):
    """Raise PreflightError unless the fan stays clear of both boundaries."""
    width = x_right - x_left
    left_edge = min(0.0, setup.u_minus * t_end)
    right_edge = max(0.0, setup.lambda3_right * t_end)
    if (left_edge - x_left < margin_frac * width - 1e-12
            or x_right - right_edge < margin_frac * width - 1e-12):
        raise PreflightError(
            f"domain [{x_left}, {x_right}] leaves the wave edges "
            f"[{left_edge:.4g}, {right_edge:.4g}] less than "
            f"{margin_frac:.0%} of the width from the boundaries by t={t_end}")


@dataclass
class StepInfo:
    dt: float
    bflux: np.ndarray
    src_total: np.ndarray | None = None


@dataclass
class RunResult:
    snapshots: list
    final: "SimState"
    n_steps: int
    dt_min: float
    dt_max: float
    min_rho: float
    min_theta: float
    totals_first: np.ndarray
    totals_final: np.ndarray
    expected_change: np.ndarray
    drift: float
    wall_seconds: float
    partial: bool = False
    dt_history: np.ndarray | None = None
    min_rho_history: np.ndarray | None = None
    min_theta_history: np.ndarray | None = None


class Stepper:
    """Owns kernel scratch and advances a state in place."""

    def __init__(self, state: SimState, config: SolverConfig, gas: GasModel,
                 source=None, bc_fill=None, kernel=None):
        self.kernel = kernel or select_kernel()
        self.config = config
        self.gas = gas
        self.source = source
        self.bc_fill = bc_fill
        grid = state.grid
        self.grid = grid
        self.threads = max(1, int(config.threads))
        self._scr = [np.empty(grid.n_tot) for _ in range(5)]
        self._face = [np.empty(grid.n_cells + 1) for _ in range(4)]
        self._w1 = [np.empty(grid.n_tot) for _ in range(3)]
        self._w2 = [np.empty(grid.n_tot) for _ in range(3)]
        for buf in (self._w1, self._w2):
            buf[0][:] = state.rho
            buf[1][:] = state.mom
            buf[2][:] = state.en
        self._partials = np.empty(self.threads * 32)
        self._bf1 = np.empty(6)
        self._bf2 = np.empty(6)
        self._x = grid.centers() if source is not None else None
        self._xg = grid.centers(with_ghosts=True) if bc_fill is not None else None

    def scan(self, state: SimState):
        """(max |u|+c, max diffusivity, min rho, min theta) over all cells."""
        return self.kernel.scan(state.rho, state.mom, state.en,
                                self.gas.gamma, self.gas.alpha, state.eps,
                                self.threads, self._partials)

    def dt_from_scan(self, smax: float, dmax: float) -> float:
        if self.config.fixed_dt is not None:
            return self.config.fixed_dt
        dx = self.grid.dx
        dt = np.inf
        if smax > 0.0:
            dt = self.config.cfl * dx / smax
        if dmax > 0.0:
            dt = min(dt, self.config.visc_safety * dx * dx / dmax)
        return dt

    def stable_dt(self, state: SimState) -> float:
        smax, dmax, min_rho, min_theta = self.scan(state)
        if not (min_rho > 0.0 and min_theta > 0.0):
            raise SolverAbort(
                f"nonpositive state at t={state.t:.8g}: "
                f"min rho={min_rho:.3e}, min theta={min_theta:.3e}")
        dt = self.dt_from_scan(smax, dmax)
        if not np.isfinite(dt) or dt <= 0.0:
            raise SolverAbort(f"no finite stable time step at t={state.t:.8g}")
        return dt

    def _source_at(self, t):
        if self.source is None:
            return None, None, None
        s = self.source(self._x, t)
        return (np.ascontiguousarray(s[0], dtype=float),
                np.ascontiguousarray(s[1], dtype=float),
                np.ascontiguousarray(s[2], dtype=float))

    def _fill_ghosts(self, rho, mom, en, t):
        if self.bc_fill is None:
            return
        grid = self.grid
        ng = grid.n_ghost
        for sl in (slice(0, ng), slice(ng + grid.n_cells, grid.n_tot)):
            r, u, th = self.bc_fill(self._xg[sl], t)
            rho[sl], mom[sl], en[sl] = prim_to_cons(r, u, th)

    def advance(self, state: SimState, dt: float) -> StepInfo:
        """One SSP-RK2 step of size dt, in place; raises SolverAbort on failure."""
        gas, grid = self.gas, self.grid
        ng, dx = grid.n_ghost, grid.dx
        t = state.t
        self._fill_ghosts(state.rho, state.mom, state.en, t)

        u, th, sl_r, sl_u, sl_t = self._scr
        fr, fm, fe, mf = self._face
        w1r, w1m, w1e = self._w1
        w2r, w2m, w2e = self._w2

        s1 = self._source_at(t)
        bad = self.kernel.stage(state.rho, state.mom, state.en, u, th,
                                sl_r, sl_u, sl_t, fr, fm, fe, mf,
                                w1r, w1m, w1e, s1[0], s1[1], s1[2],
                                gas.gamma, gas.alpha, state.eps, dx, dt,
                                ng, self.threads, self._bf1)
        if bad:
            raise SolverAbort(self._abort_msg(state, "stage 1", bad))

        self._fill_ghosts(w1r, w1m, w1e, t + dt)
        s2 = self._source_at(t + dt)
        bad = self.kernel.stage(w1r, w1m, w1e, u, th,
                                sl_r, sl_u, sl_t, fr, fm, fe, mf,
                                w2r, w2m, w2e, s2[0], s2[1], s2[2],
                                gas.gamma, gas.alpha, state.eps, dx, dt,
                                ng, self.threads, self._bf2)
        if bad:
            raise SolverAbort(self._abort_msg(state, "stage 2", bad))

        self.kernel.combine(state.rho, state.mom, state.en, w2r, w2m, w2e,
                            state.rho, state.mom, state.en, ng)
        state.t = t + dt

        src_total = None
        if s1[0] is not None:
            src_total = 0.5 * dt * dx * np.array([
                np.sum(s1[0]) + np.sum(s2[0]),
                np.sum(s1[1]) + np.sum(s2[1]),
                np.sum(s1[2]) + np.sum(s2[2])])
        return StepInfo(dt=dt, bflux=0.5 * (self._bf1 + self._bf2),
                        src_total=src_total)

    def _abort_msg(self, state, where, bad):
        return (f"positivity lost in {where} at t={state.t:.8g} "
                f"(eps={state.eps:.3e}, n_cells={state.grid.n_cells}, "
                f"{bad} offending cells); state not clipped")


def step(state: SimState, config: SolverConfig, gas: GasModel,
         source=None, bc_fill=None) -> SimState:
    """Advance a copy of the state by one stable time step."""
    out = state.copy()
    stepper = Stepper(out, config, gas, source=source, bc_fill=bc_fill)
    dt = stepper.stable_dt(out)
    stepper.advance(out, dt)
    return out


def conserved_totals(state: SimState) -> np.ndarray:
    """dx-weighted interior sums of (mass, momentum, energy)."""
    s = state.interior
    dx = state.grid.dx
    return np.array([np.sum(state.rho[s]) * dx,
                     np.sum(state.mom[s]) * dx,
                     np.sum(state.en[s]) * dx])


class _Kahan:
    __slots__ = ("s", "c")

    def __init__(self, n):
        self.s = np.zeros(n)
        self.c = np.zeros(n)

    def add(self, x):
        y = x - self.c
        t = self.s + y
        self.c = (t - self.s) - y
        self.s = t


def run(state: SimState, config: SolverConfig, gas: GasModel,
        source=None, bc_fill=None, kernel=None) -> RunResult:
    """March to t_end, landing exactly on every requested snapshot time.

    Returns the trajectory snapshots plus step diagnostics and a discrete
    conservation audit (totals change against accumulated boundary fluxes
    and source integrals). A wall-clock budget overrun flags the result as
    partial instead of raising; positivity failures raise SolverAbort.
    """
    t_start = time.perf_counter()
    state = state.copy()
    stepper = Stepper(state, config, gas, source=source, bc_fill=bc_fill,
                      kernel=kernel)
    targets = sorted(t for t in config.snapshot_times if t >= state.t - 1e-14)
    snapshots = []
    if targets and abs(targets[0] - state.t) < 1e-14:
        snapshots.append(state.copy())
        targets.pop(0)

    totals_first = conserved_totals(state)
    expected = _Kahan(3)
    n_steps = 0
    dt_min, dt_max = np.inf, 0.0
    min_rho, min_theta = np.inf, np.inf
    dt_hist, rho_hist, theta_hist = [], [], []
    partial = False

    while state.t < config.t_end - 1e-14:
        smax, dmax, mr, mt = stepper.scan(state)
        min_rho = min(min_rho, mr)
        min_theta = min(min_theta, mt)
        if not (mr > 0.0 and mt > 0.0):
            raise SolverAbort(
                f"nonpositive state at t={state.t:.8g}: "
                f"min rho={mr:.3e}, min theta={mt:.3e}")
        dt = stepper.dt_from_scan(smax, dmax)
        if not np.isfinite(dt) or dt <= 0.0:
            raise SolverAbort(f"no finite stable time step at t={state.t:.8g}")
        target = min(targets[0], config.t_end) if targets else config.t_end
        clamped = state.t + dt >= target - 1e-14
        if clamped:
            dt = target - state.t
        info = stepper.advance(state, dt)
        if clamped:
            state.t = target
        n_steps += 1
        dt_min = min(dt_min, dt)
        dt_max = max(dt_max, dt)
        dt_hist.append(dt)
        rho_hist.append(mr)
        theta_hist.append(mt)
        expected.add(dt * (info.bflux[:3] - info.bflux[3:]))
        if info.src_total is not None:
            expected.add(info.src_total)
        if targets and state.t >= targets[0] - 1e-14:
            snapshots.append(state.copy())
            targets.pop(0)
        if (config.max_wall_seconds is not None
                and time.perf_counter() - t_start > config.max_wall_seconds):
            partial = True
            break

    _, _, mr, mt = stepper.scan(state)
    min_rho = min(min_rho, mr)
    min_theta = min(min_theta, mt)
    if not (mr > 0.0 and mt > 0.0):
        raise SolverAbort(f"nonpositive final state: min rho={mr:.3e}, "
                          f"min theta={mt:.3e}")

    totals_final = conserved_totals(state)
    change = totals_final - totals_first
    scale = np.maximum(np.maximum(np.abs(totals_first), np.abs(totals_final)),
                       np.maximum(np.abs(expected.s), 1.0))
    drift = float(np.max(np.abs(change - expected.s) / scale))
    return RunResult(snapshots=snapshots, final=state, n_steps=n_steps,
                     dt_min=float(dt_min) if n_steps else 0.0,
                     dt_max=float(dt_max), min_rho=float(min_rho),
                     min_theta=float(min_theta), totals_first=totals_first,
                     totals_final=totals_final, expected_change=expected.s,
                     drift=drift, wall_seconds=time.perf_counter() - t_start,
                     partial=partial, dt_history=np.asarray(dt_hist),
                     min_rho_history=np.asarray(rho_hist),
                     min_theta_history=np.asarray(theta_hist))
