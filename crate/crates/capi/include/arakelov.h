/* C interface for the arakelov library.
 *
 * Conventions:
 *  - fallible calls return an arakelov_status (ARAKELOV_STATUS_OK == 0 on
 *    success) and write results through out-pointers;
 *  - strings returned through `char **` are NUL-terminated UTF-8, owned by
 *    the caller, and released with arakelov_string_free();
 *  - after a failure, arakelov_last_error_message() describes it; the
 *    pointer is thread-local and valid until the next failing call on the
 *    same thread.
 */

#ifndef ARAKELOV_H
#define ARAKELOV_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum arakelov_status {
  ARAKELOV_STATUS_OK = 0,
  ARAKELOV_STATUS_INVALID_ARGUMENT = 1,
  ARAKELOV_STATUS_INTERNAL = 2,
  ARAKELOV_STATUS_NULL_POINTER = 3,
  ARAKELOV_STATUS_UTF8 = 4,
  ARAKELOV_STATUS_IO = 5,
} arakelov_status;

/* Component targets for vertical-divisor solving. */
typedef enum arakelov_target_kind {
  ARAKELOV_TARGET_INFINITY = 0,
  ARAKELOV_TARGET_ZERO = 1,
  ARAKELOV_TARGET_INTERIOR = 2,
} arakelov_target_kind;

/* Error-term regimes for the height bound. */
typedef enum arakelov_err_mode {
  ARAKELOV_ERR_MODE_P3 = 0,
  ARAKELOV_ERR_MODE_AUTISSIER = 1,
} arakelov_err_mode;

/* Opaque handles. */
typedef struct ArakelovFiber ArakelovFiber;
typedef struct ArakelovLedger ArakelovLedger;

/* Special fiber of the minimal regular model of X0(p) at a place with
 * ramification index e and residual degree f. Requires p prime, p > 17. */
arakelov_status arakelov_fiber_new(uint64_t p, uint32_t e, uint32_t f,
                                   ArakelovFiber **out);
void arakelov_fiber_free(ArakelovFiber *fiber);

/* Genus / branch count; UINT64_MAX on a null handle. */
uint64_t arakelov_fiber_genus(const ArakelovFiber *fiber);
uint64_t arakelov_fiber_branch_count(const ArakelovFiber *fiber);

/* JSON descriptions. Rationals are canonical "num/den" strings; fiber
 * components are {"t":"inf"|"zero"|"int","n":...,"m":...}. */
arakelov_status arakelov_fiber_json(const ArakelovFiber *fiber, char **out_json);
arakelov_status arakelov_intersection_matrix_json(const ArakelovFiber *fiber,
                                                  char **out_json);

/* Vertical divisor with coefficient 0 at the infinity component solving
 * [C, target - infinity - Phi] = 0 for every component C. `branch` and
 * `position` are read only for ARAKELOV_TARGET_INTERIOR. */
arakelov_status arakelov_vertical_divisor_json(const ArakelovFiber *fiber,
                                               int target_kind, uint64_t branch,
                                               uint64_t position, char **out_json);

/* Vertical part of the relative dualizing sheaf, (g-1)*Phi_{C0}. */
arakelov_status arakelov_dualizing_divisor_json(const ArakelovFiber *fiber,
                                                char **out_json);

/* Antisymmetrized cuspidal divisor class (nonzero infinity coefficient). */
arakelov_status arakelov_cuspidal_divisor_json(const ArakelovFiber *fiber,
                                               char **out_json);

/* Constant ledger: built-in defaults, or parsed from the flat
 * `#provenance:` / `key = num/den` text format. */
arakelov_status arakelov_ledger_default(ArakelovLedger **out);
arakelov_status arakelov_ledger_from_file(const char *path, ArakelovLedger **out);
void arakelov_ledger_free(ArakelovLedger *ledger);

/* Quadratic-point j-height bound b(p) with its full trace as JSON.
 * Requires p prime, p > 71. A null ledger selects the defaults. */
arakelov_status arakelov_height_bound_json(uint64_t p, int err_mode,
                                           const ArakelovLedger *ledger,
                                           char **out_json);

/* Winding-quotient report for one prime p > 17, as JSON. */
arakelov_status arakelov_winding_report_json(uint64_t p, char **out_json);

/* Winding survey over the primes of [from, to], 17 < from <= to, as CSV
 * with header `p,g,dim_plus,dim_minus,dim_Je,ratio,brumer_weak`. */
arakelov_status arakelov_brumer_scan_csv(uint64_t from, uint64_t to,
                                         uint32_t jobs, char **out_csv);

/* Riemann theta value and analytic norm. tau_re/tau_im hold genus*genus
 * doubles (row-major, symmetric), z_re/z_im hold genus doubles. */
arakelov_status arakelov_theta_eval(uint32_t genus, const double *tau_re,
                                    const double *tau_im, const double *z_re,
                                    const double *z_im, double tol,
                                    double *out_re, double *out_im,
                                    double *out_norm, uint32_t *out_radius,
                                    double *out_error);

void arakelov_string_free(char *s);
const char *arakelov_last_error_message(void);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ARAKELOV_H */
