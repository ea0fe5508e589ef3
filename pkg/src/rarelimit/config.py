"""Plain-text run configuration: sections of key=value with strict keys.

Environment variables RARELIMIT_<SECTION>__<KEY> override file values, e.g.
RARELIMIT_SOLVER__T_END=2.0. Unknown sections or keys are errors so typos
cannot silently fall back to defaults.
"""

import configparser
import os
from dataclasses import dataclass, field

from .gas import GasModel, PrimitiveState
from .harness import Schedule
from .solver import Grid, SolverConfig, preflight_domain
from .waves import WaveSetup, make_setup

ENV_PREFIX = "RARELIMIT_"


class ConfigError(ValueError):
    """Bad configuration file, key or value."""


def _parse_floats(text: str):
    parts = text.replace(",", " ").split()
    return tuple(float(p) for p in parts)


DEFAULTS = {
    "gas": {"gamma": 1.4, "alpha": 0.5},
    "right_state": {"rho": 1.0, "u": 0.0, "theta": 1.0},
    "schedule": {"mode": "practical", "b": 1.0 / 3.0},
    "solver": {"cfl": 0.45, "visc_safety": 0.4, "flux": "rusanov",
               "bc": "fixed", "t_end": 1.0, "snapshot_times": (0.5, 0.75, 1.0)},
    "simulate": {"eps": 0.01, "n_cells": 2000, "domain": "auto"},
    "sweep": {"eps_ladder": (8e-3, 4e-3, 2e-3, 1e-3), "cells_per_eps": 8,
              "l": 0.5, "margin_frac": 0.05, "monitor_factor": 10.0},
    "wave": {"nu": "auto", "xi_min": "auto", "xi_max": "auto",
             "xi_pad": 1.0, "n_points": 2001},
    "profile": {"t": 1.0, "x_pad": 1.0, "n_points": 2001},
    "run": {"out_dir": "out", "workers": 2, "seed": 12345},
}


@dataclass
class RunConfig:
    """Fully resolved configuration; every field has a default."""

    values: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | None = None, env=None) -> "RunConfig":
        values = {s: dict(kv) for s, kv in DEFAULTS.items()}
        if path is not None:
            parser = configparser.ConfigParser()
            try:
                read = parser.read(path)
            except configparser.Error as exc:
                raise ConfigError(f"cannot parse config {path}: {exc}") from exc
            if not read:
                raise ConfigError(f"config file not found: {path}")
            for section in parser.sections():
                if section not in values:
                    raise ConfigError(f"unknown config section [{section}]")
                for key, raw in parser.items(section):
                    cls._assign(values, section, key, raw)
        env = os.environ if env is None else env
        for name, raw in env.items():
            if not name.startswith(ENV_PREFIX):
                continue
            rest = name[len(ENV_PREFIX):]
            if "__" not in rest:
                continue
            section, key = rest.lower().split("__", 1)
            if section not in values:
                raise ConfigError(f"unknown section in override {name}")
            cls._assign(values, section, key, raw)
        return cls(values=values)

    @staticmethod
    def _assign(values, section, key, raw):
        if key not in DEFAULTS[section]:
            raise ConfigError(f"unknown key '{key}' in section [{section}]")
        default = DEFAULTS[section][key]
        try:
            if isinstance(default, tuple):
                values[section][key] = _parse_floats(raw)
            elif isinstance(default, bool):
                values[section][key] = raw.strip().lower() in ("1", "true", "yes")
            elif isinstance(default, int):
                values[section][key] = int(raw)
            elif isinstance(default, float):
                values[section][key] = float(raw)
            else:
                values[section][key] = raw.strip()
        except ValueError as exc:
            raise ConfigError(
                f"bad value for '{key}' in section [{section}]: {raw!r}") from exc

    def __getitem__(self, section):
        return self.values[section]

    def resolved(self) -> dict:
        """JSON-ready copy of every setting, for output sidecars."""
        out = {}
        for section, kv in self.values.items():
            out[section] = {k: (list(v) if isinstance(v, tuple) else v)
                            for k, v in kv.items()}
        return out

    # object builders -----------------------------------------------------

    def gas_model(self) -> GasModel:
        g = self.values["gas"]
        try:
            return GasModel(gamma=g["gamma"], alpha=g["alpha"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def right_state(self) -> PrimitiveState:
        r = self.values["right_state"]
        return PrimitiveState(rho=r["rho"], u=r["u"], theta=r["theta"])

    def wave_setup(self) -> WaveSetup:
        try:
            return make_setup(self.gas_model(), self.right_state())
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def schedule(self, setup: WaveSetup) -> Schedule:
        s = self.values["schedule"]
        rho_plus = setup.right.rho
        if s["mode"] == "practical":
            return Schedule.practical(s["b"], rho_plus=rho_plus)
        if s["mode"] == "asymptotic":
            return Schedule.asymptotic(setup.gas, rho_plus=rho_plus)
        raise ConfigError(f"unknown schedule mode {s['mode']!r} "
                          "(expected 'practical' or 'asymptotic')")

    def solver_config(self, threads: int = 1) -> SolverConfig:
        s = self.values["solver"]
        try:
            return SolverConfig(cfl=s["cfl"], visc_safety=s["visc_safety"],
                                flux=s["flux"], bc=s["bc"], t_end=s["t_end"],
                                snapshot_times=tuple(s["snapshot_times"]),
                                threads=threads)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def simulate_grid(self, setup: WaveSetup) -> Grid:
        sim = self.values["simulate"]
        t_end = self.values["solver"]["t_end"]
        if sim["domain"] == "auto":
            xl, xr = preflight_domain(setup, t_end)
        else:
            try:
                xl, xr = _parse_floats(sim["domain"])
            except ValueError as exc:
                raise ConfigError(f"bad domain {sim['domain']!r}") from exc
        try:
            return Grid(x_left=xl, x_right=xr, n_cells=sim["n_cells"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
