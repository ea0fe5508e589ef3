# cython: boundscheck=False, wraparound=False, language_level=3
"""Compiled finite-volume kernels; thin wrapper over _core_impl.h.

Semantics mirror rarelimit._kernels_numpy exactly; keep the two in sync.
"""


cdef extern from "_core_impl.h":
    long rl_stage(const double* rho, const double* mom, const double* en,
                  double* u, double* th,
                  double* sl_r, double* sl_u, double* sl_t,
                  double* fr, double* fm, double* fe, double* mf,
                  double* out_rho, double* out_mom, double* out_en,
                  const double* src_r, const double* src_m, const double* src_e,
                  double gamma, double alpha, double eps, double dx,
                  double dt, long ng, long n_cells, int threads,
                  double* bflux) nogil
    void rl_scan(const double* rho, const double* mom, const double* en,
                 double gamma, double alpha, double eps, long n,
                 double* out4) nogil
    void rl_combine(const double* a0, const double* a1, const double* a2,
                    const double* b0, const double* b1, const double* b2,
                    double* o0, double* o1, double* o2,
                    long ng, long n_cells) nogil


cdef extern from *:
    """
    #ifdef RARELIMIT_WITH_OPENMP
    #define RL_OMP 1
    #else
    #define RL_OMP 0
    #endif
    """
    int RL_OMP


def compiled_with_openmp():
    return bool(RL_OMP)


def stage(double[::1] rho, double[::1] mom, double[::1] en,
          double[::1] u, double[::1] th,
          double[::1] sl_r, double[::1] sl_u, double[::1] sl_t,
          double[::1] fr, double[::1] fm, double[::1] fe, double[::1] mf,
          double[::1] out_rho, double[::1] out_mom, double[::1] out_en,
          src_r, src_m, src_e,
          double gamma, double alpha, double eps, double dx, double dt,
          int ng, int threads, double[::1] bflux):
    """One forward-Euler stage in conservation form; returns 0 on success.

    Writes interior cells of the out arrays, leaves ghosts untouched, and
    stores the boundary-face fluxes (left then right, 3 components each)
    into bflux. A nonzero return counts cells with nonpositive density or
    temperature; the outputs are then meaningless.
    """
    cdef long n_cells = rho.shape[0] - 2 * ng
    cdef double[::1] sr, sm, se
    cdef const double *pr = NULL
    cdef const double *pm = NULL
    cdef const double *pe = NULL
    cdef long bad
    if src_r is not None:
        sr, sm, se = src_r, src_m, src_e
        pr, pm, pe = &sr[0], &sm[0], &se[0]
    with nogil:
        bad = rl_stage(&rho[0], &mom[0], &en[0], &u[0], &th[0],
                       &sl_r[0], &sl_u[0], &sl_t[0], &fr[0], &fm[0], &fe[0],
                       &mf[0], &out_rho[0], &out_mom[0], &out_en[0], pr, pm, pe,
                       gamma, alpha, eps, dx, dt, ng, n_cells, threads,
                       &bflux[0])
    return bad


def scan(double[::1] rho, double[::1] mom, double[::1] en,
         double gamma, double alpha, double eps, int threads,
         double[::1] partials):
    """Max signal speed, max diffusivity and min density/temperature."""
    with nogil:
        rl_scan(&rho[0], &mom[0], &en[0], gamma, alpha, eps,
                rho.shape[0], &partials[0])
    return partials[0], partials[1], partials[2], partials[3]


def combine(double[::1] a0, double[::1] a1, double[::1] a2,
            double[::1] b0, double[::1] b1, double[::1] b2,
            double[::1] o0, double[::1] o1, double[::1] o2, int ng):
    """Interior midpoint of two stage states: o = (a + b) / 2."""
    cdef long n_cells = a0.shape[0] - 2 * ng
    with nogil:
        rl_combine(&a0[0], &a1[0], &a2[0], &b0[0], &b1[0], &b2[0],
                   &o0[0], &o1[0], &o2[0], ng, n_cells)
