"""Command-line front end.

Subcommands: wave, profile, simulate, sweep, verify, bench. Every numeric
table is CSV with a JSON sidecar embedding the fully resolved configuration,
so reruns are self-describing. Exit codes: 0 success, 1 configuration error,
2 numeric abort, 3 property failure.
"""

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, harness, solver, verify, waves
from .burgers import ImplicitSolveError
from .config import ConfigError, RunConfig
from .profile import profile_eval

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2
EXIT_PROPERTY = 3


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_csv(path: Path, header, columns):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _sidecar(path: Path, cfg: RunConfig, extra: dict):
    payload = {"tool": f"rarelimit {__version__}", "config": cfg.resolved()}
    payload.update(extra)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _out_dir(cfg, args) -> Path:
    out = Path(args.out if args.out else cfg["run"]["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_wave(cfg: RunConfig, args) -> int:
    setup = cfg.wave_setup()
    schedule = cfg.schedule(setup)
    nu_raw = cfg["wave"]["nu"]
    if nu_raw == "auto":
        nu, _ = harness.schedule_params(schedule, cfg["simulate"]["eps"])
    else:
        nu = float(nu_raw)
    cutoff = waves.make_cutoff(setup, nu)
    pad = cfg["wave"]["xi_pad"]
    lo = cfg["wave"]["xi_min"]
    hi = cfg["wave"]["xi_max"]
    lo = setup.u_minus - pad if lo == "auto" else float(lo)
    hi = setup.lambda3_right + pad if hi == "auto" else float(hi)
    xi = np.linspace(lo, hi, cfg["wave"]["n_points"])
    vac = waves.eval_vacuum_wave(setup, xi)
    cut = waves.eval_cutoff_wave(setup, cutoff, xi)

    out = _out_dir(cfg, args)
    _write_csv(out / "wave.csv",
               ["xi", "rho", "u", "theta", "m", "n",
                "rho_cut", "u_cut", "theta_cut", "m_cut", "n_cut"],
               [xi, vac.rho, vac.u, vac.theta, vac.m, vac.n,
                cut.rho, cut.u, cut.theta, cut.m, cut.n])
    _sidecar(out / "wave.json", cfg, {
        "u_minus": setup.u_minus, "s_plus": setup.s_plus,
        "lambda3_right": setup.lambda3_right, "nu": cutoff.nu,
        "u_nu": cutoff.u_nu, "theta_nu": cutoff.theta_nu,
        "max_abs_rho_gap": float(np.max(np.abs(cut.rho - vac.rho)))})
    print(f"wrote {out / 'wave.csv'} ({len(xi)} rows)")
    return EXIT_OK


def cmd_profile(cfg: RunConfig, args) -> int:
    setup = cfg.wave_setup()
    schedule = cfg.schedule(setup)
    eps = cfg["simulate"]["eps"]
    nu, delta = harness.schedule_params(schedule, eps)
    cutoff = waves.make_cutoff(setup, nu)
    t = cfg["profile"]["t"]
    pad = cfg["profile"]["x_pad"]
    x = np.linspace(min(0.0, setup.u_minus * t) - pad,
                    max(0.0, setup.lambda3_right * t) + pad,
                    cfg["profile"]["n_points"])
    ps = profile_eval(setup, cutoff, delta, x, t)

    if not args.no_selfcheck:
        h = 1e-6 * max(delta, 1.0)
        pp = profile_eval(setup, cutoff, delta, x + h, t)
        pm = profile_eval(setup, cutoff, delta, x - h, t)
        for fld in ("rho", "u", "theta"):
            fd = (getattr(pp, fld) - getattr(pm, fld)) / (2 * h)
            an = getattr(ps, fld + "_x")
            scale = np.max(np.abs(an)) + 1e-300
            err = float(np.max(np.abs(fd - an))) / scale
            if err > 1e-5:
                print(f"self-check failed: {fld}_x deviates from finite "
                      f"differences by {err:.2e} (tol 1e-5)", file=sys.stderr)
                return EXIT_PROPERTY

    out = _out_dir(cfg, args)
    _write_csv(out / "profile.csv",
               ["x", "rho", "u", "theta", "rho_x", "u_x", "theta_x",
                "rho_xx", "u_xx", "theta_xx"],
               [x, ps.rho, ps.u, ps.theta, ps.rho_x, ps.u_x, ps.theta_x,
                ps.rho_xx, ps.u_xx, ps.theta_xx])
    _sidecar(out / "profile.json", cfg, {
        "t": t, "eps": eps, "nu": nu, "delta": delta,
        "selfcheck": not args.no_selfcheck})
    print(f"wrote {out / 'profile.csv'} ({len(x)} rows)")
    return EXIT_OK


def _write_snapshot(out: Path, state, tag: str) -> Path:
    rho, u, theta = state.primitives()
    path = out / f"snapshot_{tag}.csv"
    _write_csv(path, ["x", "rho", "u", "theta", "m", "n"],
               [state.x(), rho, u, theta, rho * u, rho * theta])
    return path


def cmd_simulate(cfg: RunConfig, args) -> int:
    setup = cfg.wave_setup()
    schedule = cfg.schedule(setup)
    eps = cfg["simulate"]["eps"]
    nu, delta = harness.schedule_params(schedule, eps)
    cutoff = waves.make_cutoff(setup, nu)
    gas = setup.gas
    grid = cfg.simulate_grid(setup)
    scfg = cfg.solver_config(threads=args.workers or cfg["run"]["workers"])
    solver.check_domain(grid.x_left, grid.x_right, setup, scfg.t_end)

    out = _out_dir(cfg, args)
    state = solver.init_well_prepared(grid, setup, cutoff, delta, eps)
    written = [_write_snapshot(out, state, "t0")]

    targets = sorted({*scfg.snapshot_times, scfg.t_end})
    targets = [t for t in targets if t > state.t]
    dt_stats = {"min": np.inf, "max": 0.0, "n_steps": 0}
    drift = 0.0
    aborted = None
    t0 = time.perf_counter()
    for target in targets:
        seg = solver.SolverConfig(cfl=scfg.cfl, visc_safety=scfg.visc_safety,
                                  flux=scfg.flux, bc=scfg.bc, t_end=target,
                                  threads=scfg.threads)
        try:
            result = solver.run(state, seg, gas)
        except solver.SolverAbort as exc:
            aborted = str(exc)
            break
        state = result.final
        written.append(_write_snapshot(out, state, f"t{target:g}"))
        drift = max(drift, result.drift)
        dt_stats["min"] = min(dt_stats["min"], result.dt_min)
        dt_stats["max"] = max(dt_stats["max"], result.dt_max)
        dt_stats["n_steps"] += result.n_steps
    wall = time.perf_counter() - t0

    _sidecar(out / "simulate.json", cfg, {
        "eps": eps, "nu": nu, "delta": delta,
        "grid": {"x_left": grid.x_left, "x_right": grid.x_right,
                 "n_cells": grid.n_cells, "dx": grid.dx},
        "scheme": {"flux": scfg.flux, "reconstruction": "muscl-mc",
                   "time": "ssp-rk2", "kernel": solver.kernel_name()},
        "dt_stats": {k: (v if np.isfinite(v) else None)
                     for k, v in dt_stats.items()},
        "conservation_drift": drift,
        "wall_seconds": wall,
        "snapshots": [p.name for p in written],
        "aborted": aborted})
    print(f"conservation audit: max drift {drift:.3e} over "
          f"{dt_stats['n_steps']} steps")
    if aborted:
        print(f"numeric abort: {aborted}; last good snapshot: "
              f"{written[-1].name}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"wrote {len(written)} snapshots to {out}")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, args) -> int:
    setup = cfg.wave_setup()
    schedule = cfg.schedule(setup)
    gas = setup.gas
    scfg = cfg.solver_config()
    sw = cfg["sweep"]
    workers = args.workers or cfg["run"]["workers"]
    records = harness.run_sweep(
        list(sw["eps_ladder"]), schedule, scfg, gas, setup,
        cells_per_eps=int(sw["cells_per_eps"]), l=sw["l"],
        margin_frac=sw["margin_frac"], monitor_factor=sw["monitor_factor"],
        workers=int(workers))

    out = _out_dir(cfg, args)
    with open(out / "sweep.csv", "w") as fh:
        harness.write_sweep_csv(records, fh)
    summary = {
        "schedule": {"mode": schedule.mode, "a": schedule.a, "b": schedule.b,
                     "theoretical_rate": harness.theoretical_rate(gas)},
        "kernel": solver.kernel_name(),
        "fits": harness.fit_summary(records),
        "records": [{**{c: getattr(r, c) for c in harness.CSV_COLUMNS},
                     "sup_phi": r.sup_phi, "sup_psi": r.sup_psi,
                     "sup_zeta": r.sup_zeta, "monitor_ok": r.monitor_ok,
                     "flag": r.flag} for r in records],
    }
    _sidecar(out / "sweep_summary.json", cfg, summary)
    print(f"wrote {out / 'sweep.csv'} ({len(records)} rows)")
    for fld, fit in summary["fits"].items():
        if "error" in fit:
            print(f"{fld}: fit summary marked insufficient points")
        else:
            print(f"{fld}: plain b={fit['plain']['b']:.4f}, "
                  f"log-corrected b={fit['log_corrected']['b']:.4f}")
    flags = [r.flag for r in records if r.flag]
    if flags:
        print(f"{len(flags)} flagged runs: {flags}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    seed = args.seed if args.seed is not None else cfg["run"]["seed"]
    results, ok = verify.run_all(seed=int(seed))
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.name:<{width}}  {r.detail}")
    out = _out_dir(cfg, args)
    _sidecar(out / "verify.json", cfg, {
        "seed": int(seed),
        "results": [{"name": r.name, "passed": r.passed, "detail": r.detail}
                    for r in results]})
    if not ok:
        failed = [r.name for r in results if not r.passed]
        print(f"{len(failed)} failed: {failed}", file=sys.stderr)
        return EXIT_PROPERTY
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def cmd_bench(cfg: RunConfig, args) -> int:
    setup = cfg.wave_setup()
    schedule = cfg.schedule(setup)
    eps = cfg["simulate"]["eps"]
    nu, delta = harness.schedule_params(schedule, eps)
    cutoff = waves.make_cutoff(setup, nu)
    gas = setup.gas
    xl, xr = solver.preflight_domain(setup, 1.0)
    grid = solver.Grid(xl, xr, 20000)
    base = solver.init_well_prepared(grid, setup, cutoff, delta, eps)

    rows = []
    kernels = ["numpy"] + (["compiled"] if solver.HAVE_COMPILED else [])
    n_steps = int(args.bench_steps)
    for name in kernels:
        kern = solver.select_kernel(name)
        state = base.copy()
        scfg = solver.SolverConfig(threads=args.workers or 1)
        stepper = solver.Stepper(state, scfg, gas, kernel=kern)
        smax, dmax, _, _ = stepper.scan(state)
        dt = stepper.dt_from_scan(smax, dmax)
        for _ in range(3):
            stepper.advance(state, dt)
        t0 = time.perf_counter()
        for _ in range(n_steps):
            stepper.scan(state)
            stepper.advance(state, dt)
        el = time.perf_counter() - t0
        rows.append({"kernel": name, "ns_per_cell_step": el / (n_steps * grid.n_cells) * 1e9,
                     "steps_per_second": n_steps / el})
        print(f"{name:>8}: {rows[-1]['ns_per_cell_step']:8.1f} ns/cell-step")
    if len(rows) == 2:
        speedup = rows[0]["ns_per_cell_step"] / rows[1]["ns_per_cell_step"]
        print(f"compiled kernel speedup: {speedup:.1f}x")
        rows.append({"kernel": "speedup", "ns_per_cell_step": speedup,
                     "steps_per_second": 0.0})
    out = _out_dir(cfg, args)
    _sidecar(out / "bench.json", cfg, {"n_cells": grid.n_cells,
                                       "n_steps": n_steps, "rows": rows})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rarelimit",
        description="Vacuum rarefaction waves and the vanishing-dissipation "
                    "limit of 1D viscous gas flow")
    p.add_argument("--config", metavar="PATH", help="key=value config file")
    p.add_argument("--out", metavar="DIR", help="output directory")
    p.add_argument("--workers", type=int, default=None, metavar="N",
                   help="worker budget for sweeps")
    p.add_argument("--seed", type=int, default=None, metavar="N",
                   help="seed for sampling-based property reports")
    p.add_argument("--no-selfcheck", action="store_true",
                   help="skip embedded derivative self-checks")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("wave", help="tabulate the exact and cut-off waves")
    sub.add_parser("profile", help="tabulate the smooth approximate wave")
    sub.add_parser("simulate", help="run the viscous solver at one eps")
    sub.add_parser("sweep", help="run the dissipation ladder and fit rates")
    sub.add_parser("verify", help="run the property suites")
    bench = sub.add_parser("bench", help="compare compiled and numpy kernels")
    bench.add_argument("--bench-steps", type=int, default=40)
    return p


COMMANDS = {"wave": cmd_wave, "profile": cmd_profile, "simulate": cmd_simulate,
            "sweep": cmd_sweep, "verify": cmd_verify, "bench": cmd_bench}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if not hasattr(args, "bench_steps"):
        args.bench_steps = 40
    try:
        cfg = RunConfig.load(args.config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (harness.ScheduleError, solver.PreflightError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (solver.SolverAbort, ImplicitSolveError) as exc:
        print(f"numeric abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
