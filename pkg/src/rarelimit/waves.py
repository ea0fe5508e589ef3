"""Exact self-similar expansion fan with one-side vacuum and its cut-off version."""

from dataclasses import dataclass, replace

import numpy as np

from .gas import GasModel, PrimitiveState, entropy, lambda3, sigma3


@dataclass(frozen=True)
class WaveSetup:
    """Right state plus the derived vacuum-edge speed and entropy level."""

    gas: GasModel
    right: PrimitiveState
    u_minus: float
    s_plus: float
    lambda3_right: float


@dataclass(frozen=True)
class CutoffState:
    """Left state of the wave truncated at density nu along the wave curve."""

    nu: float
    u_nu: float
    theta_nu: float
    lambda3_cut: float


def make_setup(gas: GasModel, right: PrimitiveState) -> WaveSetup:
    """Derive the vacuum-edge speed and entropy level from the right state."""
    if not (right.rho > 0.0 and right.theta > 0.0):
        raise ValueError("right state must have positive density and temperature")
    s_plus = float(entropy(gas, right))
    u_minus = float(sigma3(gas, right))
    lam_r = float(lambda3(gas, right))
    if not u_minus < lam_r:
        raise ValueError("degenerate fan: vacuum edge not slower than the right edge")
    gas = replace(gas, s_plus=s_plus)
    return WaveSetup(gas=gas, right=right, u_minus=u_minus, s_plus=s_plus,
                     lambda3_right=lam_r)


def _fan_state(setup: WaveSetup, xi):
    """Invert (lambda3 = xi, sigma3 = const, S = const) inside the fan."""
    g = setup.gas.gamma
    c = (g - 1.0) * (np.asarray(xi, dtype=float) - setup.u_minus) / (g + 1.0)
    c = np.maximum(c, 0.0)
    u = xi - c
    theta = c * c / (g * (g - 1.0))
    rho = (theta * np.exp(-setup.s_plus)) ** (1.0 / (g - 1.0))
    return rho, u, theta


def eval_vacuum_wave(setup: WaveSetup, xi) -> PrimitiveState:
    """Evaluate the vacuum wave at self-similar coordinates xi = x/t.

    Left of the fan the state is vacuum with the velocity reported as the
    edge speed; momentum and internal-energy density follow as the m and n
    properties of the returned state (identically zero at vacuum).
    """
    xi = np.asarray(xi, dtype=float)
    rho_f, u_f, th_f = _fan_state(setup, xi)
    r = setup.right
    in_vac = xi < setup.u_minus
    in_right = xi > setup.lambda3_right
    rho = np.where(in_vac, 0.0, np.where(in_right, r.rho, rho_f))
    u = np.where(in_vac, setup.u_minus, np.where(in_right, r.u, u_f))
    theta = np.where(in_vac, 0.0, np.where(in_right, r.theta, th_f))
    return PrimitiveState(rho=rho, u=u, theta=theta)


def make_cutoff(setup: WaveSetup, nu: float) -> CutoffState:
    """Truncate the wave at density nu; the cut state stays on the wave curve."""
    if not 0.0 < nu <= setup.right.rho:
        raise ValueError(f"cut-off density must lie in (0, rho_+], got {nu}")
    g = setup.gas.gamma
    theta_nu = nu ** (g - 1.0) * np.exp(setup.s_plus)
    u_nu = setup.u_minus + 2.0 * np.sqrt(g / (g - 1.0) * theta_nu)
    cut = PrimitiveState(rho=nu, u=u_nu, theta=theta_nu)
    return CutoffState(nu=float(nu), u_nu=float(u_nu), theta_nu=float(theta_nu),
                       lambda3_cut=float(lambda3(setup.gas, cut)))


def eval_cutoff_wave(setup: WaveSetup, cutoff: CutoffState, xi) -> PrimitiveState:
    """Evaluate the cut-off wave; identical to the vacuum wave right of the cut."""
    xi = np.asarray(xi, dtype=float)
    rho_f, u_f, th_f = _fan_state(setup, xi)
    r = setup.right
    in_left = xi < cutoff.lambda3_cut
    in_right = xi > setup.lambda3_right
    rho = np.where(in_left, cutoff.nu, np.where(in_right, r.rho, rho_f))
    u = np.where(in_left, cutoff.u_nu, np.where(in_right, r.u, u_f))
    theta = np.where(in_left, cutoff.theta_nu, np.where(in_right, r.theta, th_f))
    return PrimitiveState(rho=rho, u=u, theta=theta)


def cutoff_sup_error(setup: WaveSetup, nu: float, n_samples: int = 100_000):
    """Sup-norm distance between cut-off and vacuum waves in (rho, m, n).

    Dense uniform sampling of xi across the fan plus the branch points; the
    branches are monotone and Lipschitz so this resolves the sup.
    """
    cutoff = make_cutoff(setup, nu)
    lo = setup.u_minus - 1.0
    hi = setup.lambda3_right + 1.0
    xi = np.concatenate([
        np.linspace(lo, hi, int(n_samples)),
        [setup.u_minus, cutoff.lambda3_cut, setup.lambda3_right,
         np.nextafter(cutoff.lambda3_cut, -np.inf)],
    ])
    vac = eval_vacuum_wave(setup, xi)
    cut = eval_cutoff_wave(setup, cutoff, xi)
    err_rho = float(np.max(np.abs(cut.rho - vac.rho)))
    err_m = float(np.max(np.abs(cut.m - vac.m)))
    err_n = float(np.max(np.abs(cut.n - vac.n)))
    return err_rho, err_m, err_n
