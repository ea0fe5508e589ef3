/* Finite-volume stage, state scan and stage combine for the 1D viscous gas
 * solver. Arithmetic order must match rarelimit._kernels_numpy exactly.
 *
 * OpenMP pragmas are no-ops when the extension is built without -fopenmp;
 * results are bitwise independent of the thread count either way. When the
 * positivity count comes back nonzero the flux/update output is garbage and
 * the caller must discard it. */

#ifndef RARELIMIT_CORE_IMPL_H
#define RARELIMIT_CORE_IMPL_H

#include <math.h>

static double rl_pow_alpha(double x, double alpha)
{
    if (alpha == 0.5) return sqrt(x);
    if (alpha == 1.0) return x;
    if (alpha == 2.0) return x * x;
    return pow(x, alpha);
}

static long rl_stage(const double *restrict rho, const double *restrict mom,
                     const double *restrict en,
                     double *restrict u, double *restrict th,
                     double *restrict sl_r, double *restrict sl_u,
                     double *restrict sl_t,
                     double *restrict fr, double *restrict fm,
                     double *restrict fe, double *restrict mf,
                     double *restrict out_rho, double *restrict out_mom,
                     double *restrict out_en,
                     const double *restrict src_r, const double *restrict src_m,
                     const double *restrict src_e,
                     double gamma, double alpha, double eps, double dx,
                     double dt, long ng, long n_cells, int threads,
                     double *restrict bflux)
{
    const long n_tot = n_cells + 2 * ng;
    const long n_face = n_cells + 1;
    const double gm1 = gamma - 1.0;
    const double lam = dt / dx;
    const int amode = alpha == 0.5 ? 0 : (alpha == 1.0 ? 1 : (alpha == 2.0 ? 2 : 3));
    long bad = 0;

#pragma omp parallel num_threads(threads) if(threads > 1) reduction(+:bad)
    {
#pragma omp for simd schedule(static) reduction(+:bad)
        for (long i = 0; i < n_tot; i++) {
            double inv = 1.0 / rho[i];
            double uu = mom[i] * inv;
            u[i] = uu;
            th[i] = en[i] * inv - 0.5 * uu * uu;
            if (!(rho[i] > 0.0 && th[i] > 0.0)) bad += 1;
        }

        /* monotonized-central slopes: face values stay inside the closed
         * neighbor range, so positive density/temperature are preserved */
#pragma omp for simd schedule(static)
        for (long i = 1; i < n_tot - 1; i++) {
            double a, b, m, t2;
            a = rho[i] - rho[i - 1]; b = rho[i + 1] - rho[i];
            m = fabs(0.5 * (a + b));
            t2 = 2.0 * fabs(a); if (t2 < m) m = t2;
            t2 = 2.0 * fabs(b); if (t2 < m) m = t2;
            sl_r[i] = a * b > 0.0 ? (a > 0.0 ? m : -m) : 0.0;
            a = u[i] - u[i - 1]; b = u[i + 1] - u[i];
            m = fabs(0.5 * (a + b));
            t2 = 2.0 * fabs(a); if (t2 < m) m = t2;
            t2 = 2.0 * fabs(b); if (t2 < m) m = t2;
            sl_u[i] = a * b > 0.0 ? (a > 0.0 ? m : -m) : 0.0;
            a = th[i] - th[i - 1]; b = th[i + 1] - th[i];
            m = fabs(0.5 * (a + b));
            t2 = 2.0 * fabs(a); if (t2 < m) m = t2;
            t2 = 2.0 * fabs(b); if (t2 < m) m = t2;
            sl_t[i] = a * b > 0.0 ? (a > 0.0 ? m : -m) : 0.0;
        }

        /* amode is uniform across threads, so the branch around the
         * worksharing loops below is legal. */
        if (amode == 0) {
#pragma omp for simd schedule(static)
            for (long f = 0; f < n_face; f++)
                mf[f] = sqrt(0.5 * (th[ng - 1 + f] + th[ng + f]));
        } else if (amode == 1) {
#pragma omp for simd schedule(static)
            for (long f = 0; f < n_face; f++)
                mf[f] = 0.5 * (th[ng - 1 + f] + th[ng + f]);
        } else if (amode == 2) {
#pragma omp for simd schedule(static)
            for (long f = 0; f < n_face; f++) {
                double thf = 0.5 * (th[ng - 1 + f] + th[ng + f]);
                mf[f] = thf * thf;
            }
        } else {
#pragma omp for simd schedule(static)
            for (long f = 0; f < n_face; f++)
                mf[f] = pow(0.5 * (th[ng - 1 + f] + th[ng + f]), alpha);
        }

#pragma omp for simd schedule(static)
        for (long f = 0; f < n_face; f++) {
            long iL = ng - 1 + f;
            long iR = iL + 1;
            double rL = rho[iL] + 0.5 * sl_r[iL];
            double uL = u[iL] + 0.5 * sl_u[iL];
            double tL = th[iL] + 0.5 * sl_t[iL];
            double rR = rho[iR] - 0.5 * sl_r[iR];
            double uR = u[iR] - 0.5 * sl_u[iR];
            double tR = th[iR] - 0.5 * sl_t[iR];

            double pL = gm1 * rL * tL;
            double cL = sqrt(gamma * gm1 * tL);
            double EL = rL * (tL + 0.5 * uL * uL);
            double pR = gm1 * rR * tR;
            double cR = sqrt(gamma * gm1 * tR);
            double ER = rR * (tR + 0.5 * uR * uR);
            double sLs = fabs(uL) + cL;
            double sRs = fabs(uR) + cR;
            double smax = sLs > sRs ? sLs : sRs;

            double f0 = 0.5 * (rL * uL + rR * uR) - 0.5 * smax * (rR - rL);
            double f1 = 0.5 * (rL * uL * uL + pL + rR * uR * uR + pR)
                        - 0.5 * smax * (rR * uR - rL * uL);
            double f2 = 0.5 * (uL * (EL + pL) + uR * (ER + pR))
                        - 0.5 * smax * (ER - EL);

            double dudx = (u[iR] - u[iL]) / dx;
            double dtdx = (th[iR] - th[iL]) / dx;
            double uf = 0.5 * (u[iL] + u[iR]);
            double evis = eps * mf[f];
            fr[f] = f0;
            fm[f] = f1 - evis * dudx;
            fe[f] = f2 - (evis * dtdx + evis * uf * dudx);
        }

        if (src_r != 0) {
#pragma omp for simd schedule(static)
            for (long c = 0; c < n_cells; c++) {
                long j = ng + c;
                out_rho[j] = rho[j] - lam * (fr[c + 1] - fr[c]) + dt * src_r[c];
                out_mom[j] = mom[j] - lam * (fm[c + 1] - fm[c]) + dt * src_m[c];
                out_en[j] = en[j] - lam * (fe[c + 1] - fe[c]) + dt * src_e[c];
            }
        } else {
#pragma omp for simd schedule(static)
            for (long c = 0; c < n_cells; c++) {
                long j = ng + c;
                out_rho[j] = rho[j] - lam * (fr[c + 1] - fr[c]);
                out_mom[j] = mom[j] - lam * (fm[c + 1] - fm[c]);
                out_en[j] = en[j] - lam * (fe[c + 1] - fe[c]);
            }
        }
    }

    if (bad == 0) {
        bflux[0] = fr[0];
        bflux[1] = fm[0];
        bflux[2] = fe[0];
        bflux[3] = fr[n_face - 1];
        bflux[4] = fm[n_face - 1];
        bflux[5] = fe[n_face - 1];
    }
    return bad;
}

static void rl_scan(const double *restrict rho, const double *restrict mom,
                    const double *restrict en,
                    double gamma, double alpha, double eps, long n,
                    double *restrict out4)
{
    const double gm1 = gamma - 1.0;
    double smax = 0.0, dmax = 0.0, rmin = 1e300, tmin = 1e300;
    for (long i = 0; i < n; i++) {
        double inv = 1.0 / rho[i];
        double uu = mom[i] * inv;
        double tt = en[i] * inv - 0.5 * uu * uu;
        double s, d;
        if (rho[i] < rmin) rmin = rho[i];
        if (tt < tmin) tmin = tt;
        if (tt > 0.0) {
            s = fabs(uu) + sqrt(gamma * gm1 * tt);
            d = eps * rl_pow_alpha(tt, alpha) * inv;
        } else {
            s = fabs(uu);
            d = 0.0;
        }
        if (s > smax) smax = s;
        if (d > dmax) dmax = d;
    }
    out4[0] = smax;
    out4[1] = dmax;
    out4[2] = rmin;
    out4[3] = tmin;
}

static void rl_combine(const double *restrict a0, const double *restrict a1,
                       const double *restrict a2,
                       const double *restrict b0, const double *restrict b1,
                       const double *restrict b2,
                       double *restrict o0, double *restrict o1,
                       double *restrict o2, long ng, long n_cells)
{
    for (long i = ng; i < ng + n_cells; i++) {
        o0[i] = 0.5 * (a0[i] + b0[i]);
        o1[i] = 0.5 * (a1[i] + b1[i]);
        o2[i] = 0.5 * (a2[i] + b2[i]);
    }
}

#endif
