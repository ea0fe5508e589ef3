"""Ideal polytropic gas closures, characteristic speeds and entropy machinery.

Normalization: the gas constant and the pressure prefactor both equal
``gamma - 1``, so p = (gamma-1)*rho*theta, e = theta and
theta = rho**(gamma-1) * exp(S).
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GasModel:
    """Adiabatic exponent, viscosity exponent and reference entropy."""

    gamma: float
    alpha: float
    s_plus: float = 0.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if not self.alpha > 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")


@dataclass(frozen=True)
class PrimitiveState:
    """Density, velocity and temperature; scalars or same-shape arrays.

    rho = theta = 0 is the vacuum state; momentum and internal-energy
    density are identically zero there.
    """

    rho: object
    u: object
    theta: object

    def __post_init__(self):
        if np.any(np.asarray(self.rho) < 0.0):
            raise ValueError("density must be nonnegative")
        if np.any(np.asarray(self.theta) < 0.0):
            raise ValueError("temperature must be nonnegative")

    @property
    def m(self):
        return self.rho * self.u

    @property
    def n(self):
        return self.rho * self.theta


def pressure(gas: GasModel, s: PrimitiveState):
    """p = (gamma-1)*rho*theta; zero at vacuum."""
    return (gas.gamma - 1.0) * s.rho * s.theta


def internal_energy(gas: GasModel, s: PrimitiveState):
    """Specific internal energy e = theta under the fixed normalization."""
    return s.theta


def entropy(gas: GasModel, s: PrimitiveState):
    """S = ln(theta) - (gamma-1) ln(rho). Undefined at vacuum."""
    if np.any(np.asarray(s.rho) <= 0.0) or np.any(np.asarray(s.theta) <= 0.0):
        raise ValueError("entropy requires positive density and temperature")
    return np.log(s.theta) - (gas.gamma - 1.0) * np.log(s.rho)


def sound_speed(gas: GasModel, s: PrimitiveState):
    """c = sqrt(gamma*(gamma-1)*theta); vanishes at vacuum."""
    return np.sqrt(gas.gamma * (gas.gamma - 1.0) * s.theta)


def lambda3(gas: GasModel, s: PrimitiveState):
    """Fast characteristic speed u + c."""
    return s.u + sound_speed(gas, s)


def sigma3(gas: GasModel, s: PrimitiveState):
    """3-Riemann invariant u - 2c/(gamma-1), normalized to u at vacuum."""
    return s.u - 2.0 * sound_speed(gas, s) / (gas.gamma - 1.0)


def mu_visc(gas: GasModel, theta):
    """Dynamic viscosity theta**alpha (unit prefactor)."""
    return np.asarray(theta, dtype=float) ** gas.alpha


def kappa_heat(gas: GasModel, theta):
    """Heat conductivity theta**alpha (unit prefactor)."""
    return np.asarray(theta, dtype=float) ** gas.alpha


def phi_convex(x):
    """Phi(x) = x - ln(x) - 1, nonnegative with equality only at x = 1."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("phi_convex requires positive argument")
    return x - np.log(x) - 1.0


def relative_entropy_eta(gas: GasModel, s: PrimitiveState, ref: PrimitiveState):
    """Relative entropy pair (eta, q) of a state against a reference state.

    eta is a nonnegative convex distance, zero only when s coincides with
    ref; q is the associated flux. Both states must be away from vacuum.
    """
    for st in (s, ref):
        if np.any(np.asarray(st.rho) <= 0.0) or np.any(np.asarray(st.theta) <= 0.0):
            raise ValueError("relative entropy requires non-vacuum states")
    gm1 = gas.gamma - 1.0
    psi = s.u - ref.u
    eta = (gm1 * s.rho * ref.theta * phi_convex(ref.rho / s.rho)
           + 0.5 * s.rho * psi * psi
           + s.rho * ref.theta * phi_convex(s.theta / ref.theta))
    q = s.u * eta + gm1 * psi * (s.rho * s.theta - ref.rho * ref.theta)
    return eta, q


def f_beta(gas: GasModel, beta: float, x1, x2):
    """Coercivity test function behind the expansion-form lower bound."""
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if np.any(x1 <= 0.0) or np.any(x2 <= 0.0):
        raise ValueError("f_beta requires positive arguments")
    gm1 = gas.gamma - 1.0
    lin = gm1 * np.log(x2) + np.log(x1)
    return (x1 - np.log(x1) - 1.0
            + gm1 * (x2 - np.log(x2) - 1.0)
            - lin * lin / (4.0 * beta * gas.gamma))


def f_beta_hessian_at_one(gas: GasModel, beta: float) -> np.ndarray:
    """Hessian of f_beta at (1, 1) in closed form."""
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    g = gas.gamma
    gm1 = g - 1.0
    return np.array([
        [1.0 - 1.0 / (2.0 * beta * g), -gm1 / (2.0 * beta * g)],
        [-gm1 / (2.0 * beta * g), gm1 * (1.0 - gm1 / (2.0 * beta * g))],
    ])


def hessian_det_f_beta(gas: GasModel, beta: float) -> float:
    """det of the f_beta Hessian at (1, 1): (gamma-1)*(1 - 1/(2*beta))."""
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    return (gas.gamma - 1.0) * (1.0 - 1.0 / (2.0 * beta))


def expansion_coercive_form(gas: GasModel, s: PrimitiveState, ref: PrimitiveState):
    """Quadratic-order form paired with the expansion rate in the entropy balance.

    Near coincidence it dominates the weighted perturbation square norm, see
    coercivity_weight_norm.
    """
    for st in (s, ref):
        if np.any(np.asarray(st.rho) <= 0.0) or np.any(np.asarray(st.theta) <= 0.0):
            raise ValueError("expansion form requires non-vacuum states")
    g = gas.gamma
    gm1 = g - 1.0
    psi = s.u - ref.u
    cross = gm1 * np.log(ref.rho / s.rho) + np.log(s.theta / ref.theta)
    return (s.rho * psi * psi
            + gm1 * s.rho * ref.theta * phi_convex(s.theta / ref.theta)
            + gm1 * gm1 * s.rho * ref.theta * phi_convex(ref.rho / s.rho)
            + np.sqrt(gm1 / g) * np.sqrt(ref.theta) * s.rho * psi * cross)


def coercivity_weight_norm(gas: GasModel, s: PrimitiveState, ref: PrimitiveState):
    """Weighted square norm rb*psi^2 + (tb/rb)*phi^2 + (rb/tb)*zeta^2."""
    phi = s.rho - ref.rho
    psi = s.u - ref.u
    zeta = s.theta - ref.theta
    return (ref.rho * psi * psi
            + (ref.theta / ref.rho) * phi * phi
            + (ref.rho / ref.theta) * zeta * zeta)
