/*
 * susylame: SUSY partners of Lamé elliptic potentials and the band-structure
 * machinery that verifies them.
 *
 * Every function returns an sl_status. On failure a description of the most
 * recent error on the calling thread is available from sl_last_error().
 * Objects returned through sl_potential** / sl_report** are owned by the
 * caller and released with the matching _destroy function.
 */
#ifndef SUSYLAME_SUSYLAME_H
#define SUSYLAME_SUSYLAME_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(SUSYLAME_BUILDING_LIBRARY)
#    define SUSYLAME_API __declspec(dllexport)
#  else
#    define SUSYLAME_API __declspec(dllimport)
#  endif
#else
#  define SUSYLAME_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sl_status {
  SL_OK = 0,
  SL_ERR_DOMAIN = 1,              /* argument outside the mathematical domain */
  SL_ERR_UNSUPPORTED = 2,         /* no closed form; use the numerical pipeline */
  SL_ERR_NUMERICAL = 3,           /* integrator/eigensolver failure, nodal ground state */
  SL_ERR_INCOMPLETE_SPECTRUM = 4, /* fewer band edges found than requested */
  SL_ERR_INVALID_ARGUMENT = 5,    /* null pointer, zero-size buffer, bad enum */
  SL_ERR_INTERNAL = 6
} sl_status;

typedef enum sl_family {
  SL_FAMILY_VMINUS = 0, /* zero-ground-energy Lamé potential V- */
  SL_FAMILY_VPLUS = 1,  /* SUSY partner V+ = W^2 + W' */
  SL_FAMILY_W = 2,      /* superpotential W = -(log psi0)' */
  SL_FAMILY_RAW_LAME = 3 /* m j (j+1) sn^2(x, m) */
} sl_family;

typedef enum sl_boundary { SL_PERIODIC = 0, SL_ANTIPERIODIC = 1 } sl_boundary;

typedef enum sl_partner { SL_PARTNER_MINUS = 0, SL_PARTNER_PLUS = 1 } sl_partner;

typedef enum sl_scope {
  SL_SCOPE_ALL = 0,
  SL_SCOPE_TABLE1 = 1,
  SL_SCOPE_LIMITS = 2,
  SL_SCOPE_ISO = 3,
  SL_SCOPE_SELFISO = 4
} sl_scope;

typedef struct sl_band_edge {
  int n;
  double energy;
  sl_boundary boundary;
  int degenerate; /* nonzero when the gap above/below this edge is closed */
} sl_band_edge;

typedef struct sl_solver_options {
  double relative_tolerance; /* ODE integrator, default 1e-10 */
  double absolute_tolerance; /* ODE integrator, default 1e-12 */
  double energy_tolerance;   /* bisection, default 1e-12 */
} sl_solver_options;

typedef struct sl_selfiso_result {
  double best_shift;
  int reflected;
  double distance;
  int self_isospectral;
} sl_selfiso_result;

typedef struct sl_claim {
  const char* claim_id;     /* owned by the report */
  double measured;
  double tolerance;
  int passed;
  const char* context_json; /* owned by the report */
} sl_claim;

typedef struct sl_potential sl_potential;
typedef struct sl_report sl_report;

SUSYLAME_API const char* sl_version(void);
SUSYLAME_API const char* sl_last_error(void);
SUSYLAME_API sl_solver_options sl_solver_options_default(void);

/* Special functions. */
SUSYLAME_API sl_status sl_complete_k(double m, double* k);
SUSYLAME_API sl_status sl_jacobi(double x, double m, double* sn, double* cn, double* dn);
SUSYLAME_API sl_status sl_jacobi_derivatives(double x, double m, double* dsn, double* dcn,
                                             double* ddn);

/* Closed forms. */
SUSYLAME_API sl_status sl_band_edge_energy(int j, double m, int n, double* energy);
SUSYLAME_API sl_status sl_psi(sl_partner partner, int j, int n, double m, double x, double* value);

/* Potentials. */
SUSYLAME_API sl_status sl_potential_closed(sl_family family, int j, double m, sl_potential** out);
/* m j(j+1) sn^2 shifted so that its lowest band edge sits at zero; any j >= 1. */
SUSYLAME_API sl_status sl_potential_lame_shifted(int j, double m, sl_potential** out);
SUSYLAME_API sl_status sl_potential_numeric_partner(const sl_potential* v, size_t grid_n,
                                                    sl_potential** out);
SUSYLAME_API void sl_potential_destroy(sl_potential* v);
SUSYLAME_API sl_status sl_potential_period(const sl_potential* v, double* period);
SUSYLAME_API sl_status sl_potential_eval(const sl_potential* v, double x, double* value);

/* Band structure. options may be NULL for defaults. e_max may be NaN to use
 * a ceiling derived from max V. out must hold count entries. */
SUSYLAME_API sl_status sl_monodromy_trace(const sl_potential* v, double energy,
                                          const sl_solver_options* options, double* trace);
SUSYLAME_API sl_status sl_band_edges(const sl_potential* v, int count, double e_max,
                                     const sl_solver_options* options, sl_band_edge* out);
SUSYLAME_API sl_status sl_galerkin_edges(const sl_potential* v, int basis_n, int count,
                                         sl_band_edge* out);
/* Samples the band-edge state on grid_n points of [0, period); psi must hold
 * grid_n values. degenerate may be NULL. */
SUSYLAME_API sl_status sl_bloch_edge_state(const sl_potential* v, const sl_band_edge* edge,
                                           size_t grid_n, const sl_solver_options* options,
                                           double* psi, int* degenerate);

/* Translation/reflection distance between two potentials of equal period. */
SUSYLAME_API sl_status sl_selfiso_distance(const sl_potential* plus, const sl_potential* minus,
                                           size_t grid_n, int shift_samples,
                                           sl_selfiso_result* out);

/* Verification suites. m_list may be NULL (defaults 0.1, 0.5, 0.9). */
SUSYLAME_API sl_status sl_verify(sl_scope scope, const double* m_list, size_t m_count,
                                 sl_report** out);
SUSYLAME_API size_t sl_report_size(const sl_report* r);
SUSYLAME_API sl_status sl_report_claim(const sl_report* r, size_t index, sl_claim* out);
SUSYLAME_API int sl_report_all_passed(const sl_report* r);
/* JSON array of {claim_id, measured, tolerance, passed, context}; owned by r. */
SUSYLAME_API const char* sl_report_json(const sl_report* r);
SUSYLAME_API void sl_report_destroy(sl_report* r);

#ifdef __cplusplus
}
#endif

#endif /* SUSYLAME_SUSYLAME_H */
