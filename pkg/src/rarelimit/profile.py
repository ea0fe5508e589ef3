"""Smooth approximate wave for the viscous system, with analytic derivatives.

The profile carries the smoothed Burgers wave along the 3-wave curve of the
cut-off fan: the Burgers value plays the role of the fast characteristic
speed while the Riemann invariant and the entropy stay at their right-state
levels.
"""

from dataclasses import dataclass

import numpy as np

from .burgers import BurgersProfile, w_derivs, w_eval
from .waves import CutoffState, WaveSetup


@dataclass(frozen=True)
class ProfileState:
    """Profile values and their first/second space derivatives on a grid."""

    rho: np.ndarray
    u: np.ndarray
    theta: np.ndarray
    rho_x: np.ndarray
    u_x: np.ndarray
    theta_x: np.ndarray
    rho_xx: np.ndarray
    u_xx: np.ndarray
    theta_xx: np.ndarray


def burgers_for(setup: WaveSetup, cutoff: CutoffState, delta: float) -> BurgersProfile:
    """Burgers wave whose edge speeds are the fast speeds of the cut-off fan."""
    return BurgersProfile(w_minus=cutoff.lambda3_cut, w_plus=setup.lambda3_right,
                          delta=delta)


def profile_eval(setup: WaveSetup, cutoff: CutoffState, delta: float,
                 x, t) -> ProfileState:
    """Evaluate (rho, u, theta) and x-derivatives of the approximate wave.

    Inverts (lambda3 = w, sigma3 = const, S = const) at the smoothed Burgers
    value w; derivative fields follow by the chain rule along the wave curve
    and are exact, not differenced.
    """
    bp = burgers_for(setup, cutoff, delta)
    w, _ = w_eval(bp, x, t)
    w_x, w_xx = w_derivs(bp, x, t)
    g = setup.gas.gamma
    gm1 = g - 1.0
    es = np.exp(setup.s_plus)

    c = gm1 * (np.asarray(w) - setup.u_minus) / (g + 1.0)
    u = w - c
    theta = c * c / (g * gm1)
    rho = (theta / es) ** (1.0 / gm1)

    u_x = 2.0 / (g + 1.0) * w_x
    u_xx = 2.0 / (g + 1.0) * w_xx
    root = np.sqrt(g * gm1 * es)
    rho_x = rho ** (0.5 * (3.0 - g)) * u_x / root
    rho_xx = (rho ** (0.5 * (3.0 - g)) * u_xx / root
              + (3.0 - g) / (2.0 * g * gm1 * es) * rho ** (2.0 - g) * u_x * u_x)
    theta_x = np.sqrt(gm1 / g) * np.sqrt(theta) * u_x
    theta_xx = np.sqrt(gm1 / g) * np.sqrt(theta) * u_xx + gm1 / (2.0 * g) * u_x * u_x
    return ProfileState(rho=np.asarray(rho), u=np.asarray(u), theta=np.asarray(theta),
                        rho_x=np.asarray(rho_x), u_x=np.asarray(u_x),
                        theta_x=np.asarray(theta_x), rho_xx=np.asarray(rho_xx),
                        u_xx=np.asarray(u_xx), theta_xx=np.asarray(theta_xx))


def euler_residual(setup: WaveSetup, cutoff: CutoffState, delta: float,
                   x, t: float, dt: float):
    """Residual of the three conservation laws along the profile.

    Space derivatives are analytic; time derivatives are central differences
    with step dt, so the residual vanishes at second order as dt shrinks.
    """
    g = setup.gas.gamma
    gm1 = g - 1.0

    def conserved(ps):
        rho, u, th = ps.rho, ps.u, ps.theta
        return rho, rho * u, rho * (th + 0.5 * u * u)

    plus = conserved(profile_eval(setup, cutoff, delta, x, t + dt))
    minus = conserved(profile_eval(setup, cutoff, delta, x, t - dt))
    now = profile_eval(setup, cutoff, delta, x, t)
    rho, u, th = now.rho, now.u, now.theta
    rho_x, u_x, th_x = now.rho_x, now.u_x, now.theta_x

    mass_flux_x = rho_x * u + rho * u_x
    mom_flux_x = rho_x * u * u + 2.0 * rho * u * u_x + gm1 * (rho_x * th + rho * th_x)
    h = g * th + 0.5 * u * u
    en_flux_x = rho_x * u * h + rho * u_x * h + rho * u * (g * th_x + u * u_x)

    r1 = (plus[0] - minus[0]) / (2.0 * dt) + mass_flux_x
    r2 = (plus[1] - minus[1]) / (2.0 * dt) + mom_flux_x
    r3 = (plus[2] - minus[2]) / (2.0 * dt) + en_flux_x
    return r1, r2, r3
