"""Pure-numpy finite-volume kernels, the fallback for the compiled core.

Formula order matches rarelimit._core so the two backends agree to rounding.
"""

import numpy as np


def compiled_with_openmp():
    return False


def _mc_slope(a, b):
    # monotonized central: min(|a+b|/2, 2|a|, 2|b|) with the common sign
    m = np.minimum(np.minimum(np.abs(0.5 * (a + b)), 2.0 * np.abs(a)),
                   2.0 * np.abs(b))
    return np.where(a * b > 0.0, np.where(a > 0.0, m, -m), 0.0)


def _pow_alpha(x, alpha):
    if alpha == 0.5:
        return np.sqrt(x)
    if alpha == 1.0:
        return x
    if alpha == 2.0:
        return x * x
    return x ** alpha


def stage(rho, mom, en, u, th, sl_r, sl_u, sl_t, fr, fm, fe, mf,
          out_rho, out_mom, out_en, src_r, src_m, src_e,
          gamma, alpha, eps, dx, dt, ng, threads, bflux):
    """One forward-Euler stage in conservation form; returns 0 on success."""
    n_tot = rho.shape[0]
    n_cells = n_tot - 2 * ng
    gm1 = gamma - 1.0
    lam = dt / dx

    inv = 1.0 / rho
    u[:] = mom * inv
    th[:] = en * inv - 0.5 * u * u
    if not np.all((rho > 0.0) & (th > 0.0)):
        return int(np.sum(~((rho > 0.0) & (th > 0.0))))

    sl_r[1:-1] = _mc_slope(rho[1:-1] - rho[:-2], rho[2:] - rho[1:-1])
    sl_u[1:-1] = _mc_slope(u[1:-1] - u[:-2], u[2:] - u[1:-1])
    sl_t[1:-1] = _mc_slope(th[1:-1] - th[:-2], th[2:] - th[1:-1])

    L = slice(ng - 1, ng + n_cells)
    R = slice(ng, ng + n_cells + 1)
    rL = rho[L] + 0.5 * sl_r[L]
    uL = u[L] + 0.5 * sl_u[L]
    tL = th[L] + 0.5 * sl_t[L]
    rR = rho[R] - 0.5 * sl_r[R]
    uR = u[R] - 0.5 * sl_u[R]
    tR = th[R] - 0.5 * sl_t[R]

    pL = gm1 * rL * tL
    cL = np.sqrt(gamma * gm1 * tL)
    EL = rL * (tL + 0.5 * uL * uL)
    pR = gm1 * rR * tR
    cR = np.sqrt(gamma * gm1 * tR)
    ER = rR * (tR + 0.5 * uR * uR)
    smax = np.maximum(np.abs(uL) + cL, np.abs(uR) + cR)

    fr[:] = 0.5 * (rL * uL + rR * uR) - 0.5 * smax * (rR - rL)
    fm[:] = (0.5 * (rL * uL * uL + pL + rR * uR * uR + pR)
             - 0.5 * smax * (rR * uR - rL * uL))
    fe[:] = (0.5 * (uL * (EL + pL) + uR * (ER + pR))
             - 0.5 * smax * (ER - EL))

    dudx = (u[R] - u[L]) / dx
    dtdx = (th[R] - th[L]) / dx
    mf[:] = _pow_alpha(0.5 * (th[L] + th[R]), alpha)
    uf = 0.5 * (u[L] + u[R])
    evis = eps * mf
    fm[:] = fm - evis * dudx
    fe[:] = fe - (evis * dtdx + evis * uf * dudx)

    C = slice(ng, ng + n_cells)
    if src_r is not None:
        out_rho[C] = rho[C] - lam * (fr[1:] - fr[:-1]) + dt * src_r
        out_mom[C] = mom[C] - lam * (fm[1:] - fm[:-1]) + dt * src_m
        out_en[C] = en[C] - lam * (fe[1:] - fe[:-1]) + dt * src_e
    else:
        out_rho[C] = rho[C] - lam * (fr[1:] - fr[:-1])
        out_mom[C] = mom[C] - lam * (fm[1:] - fm[:-1])
        out_en[C] = en[C] - lam * (fe[1:] - fe[:-1])

    bflux[0] = fr[0]
    bflux[1] = fm[0]
    bflux[2] = fe[0]
    bflux[3] = fr[-1]
    bflux[4] = fm[-1]
    bflux[5] = fe[-1]
    return 0


def scan(rho, mom, en, gamma, alpha, eps, threads, partials):
    """Max signal speed, max diffusivity and min density/temperature."""
    gm1 = gamma - 1.0
    inv = 1.0 / rho
    u = mom * inv
    th = en * inv - 0.5 * u * u
    pos = th > 0.0
    s = np.where(pos, np.abs(u) + np.sqrt(gamma * gm1 * np.maximum(th, 0.0)), np.abs(u))
    d = np.where(pos, eps * _pow_alpha(np.maximum(th, 0.0), alpha) * inv, 0.0)
    return float(np.max(s)), float(np.max(d)), float(np.min(rho)), float(np.min(th))


def combine(a0, a1, a2, b0, b1, b2, o0, o1, o2, ng):
    """Interior midpoint of two stage states: o = (a + b) / 2."""
    sl = slice(ng, a0.shape[0] - ng)
    o0[sl] = 0.5 * (a0[sl] + b0[sl])
    o1[sl] = 0.5 * (a1[sl] + b1[sl])
    o2[sl] = 0.5 * (a2[sl] + b2[sl])
