#ifndef DEPHASE_H
#define DEPHASE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum DephaseStatus {
  DEPHASE_STATUS_OK = 0,
  DEPHASE_STATUS_NULL_POINTER = 1,
  DEPHASE_STATUS_INVALID_ARGUMENT = 2,
  DEPHASE_STATUS_INVALID_UTF8 = 3,
  DEPHASE_STATUS_INFEASIBLE = 4,
  DEPHASE_STATUS_CUTOFF_TOO_SMALL = 5,
  DEPHASE_STATUS_SCHEME_UNAVAILABLE = 6,
  DEPHASE_STATUS_NUMERICAL = 7,
  DEPHASE_STATUS_CONFIG = 8,
  DEPHASE_STATUS_PANIC = 9,
} DephaseStatus;

// Bath mode list.
typedef struct DephaseBath DephaseBath;

// Kraus operator set.
typedef struct DephaseKrausSet DephaseKrausSet;

// Channel coefficients at one time.
typedef struct DephaseCoefficients {
  double t;
  double l1_re;
  double l1_im;
  double l2;
  double l3;
  double gamma;
  double g_total;
} DephaseCoefficients;

// Copy of the calling thread's last error message, or null when the last
// call succeeded. Free with [`dephase_string_free`].
char *dephase_last_error(void);

// Frees a string returned by this library. Null is ignored.
void dephase_string_free(char *s);

// Builds a bath from `n_modes` angular frequencies and couplings.
enum DephaseStatus dephase_bath_new(const double *omegas,
                                    const double *gs,
                                    size_t n_modes,
                                    struct DephaseBath **out);

void dephase_bath_free(struct DephaseBath *bath);

enum DephaseStatus dephase_bath_coefficients(const struct DephaseBath *bath,
                                             double t,
                                             struct DephaseCoefficients *out);

// Vacuum/odd/even triple for two qubits in a common bath.
enum DephaseStatus dephase_kraus_common_nonru(const struct DephaseBath *bath,
                                              double t,
                                              struct DephaseKrausSet **out);

// Four-operator RU set for two qubits in a common bath, phase included.
// Returns `Infeasible` above the coherence threshold.
enum DephaseStatus dephase_kraus_common_ru(const struct DephaseBath *bath,
                                           double t,
                                           struct DephaseKrausSet **out);

// Even/odd pair for one qubit in its own bath.
enum DephaseStatus dephase_kraus_single_qubit_parity(const struct DephaseBath *bath,
                                                     double t,
                                                     struct DephaseKrausSet **out);

// Sign-basis RU decomposition of the `n_qubits` Schur channel at `gamma`.
enum DephaseStatus dephase_kraus_schur_ru(size_t n_qubits,
                                          double gamma,
                                          struct DephaseKrausSet **out);

void dephase_kraus_free(struct DephaseKrausSet *set);

// Hilbert-space dimension, or 0 for null.
size_t dephase_kraus_dim(const struct DephaseKrausSet *set);

// Number of operators, or 0 for null.
size_t dephase_kraus_len(const struct DephaseKrausSet *set);

// RU weight of operator `i`; `InvalidArgument` for sets without weights.
enum DephaseStatus dephase_kraus_weight(const struct DephaseKrausSet *set, size_t i, double *out);

// Writes operator `i` into `buf`, which must hold `2 * dim * dim` doubles.
// The label is not exposed here.
enum DephaseStatus dephase_kraus_operator(const struct DephaseKrausSet *set,
                                          size_t i,
                                          double *buf,
                                          size_t buf_len);

// `max |Σ K†K - I|`.
enum DephaseStatus dephase_kraus_completeness_deviation(const struct DephaseKrausSet *set,
                                                        double *out);

// `Σ K ρ K†` for a `dim × dim` interleaved complex input; `rho_out` must
// hold `2 * dim * dim` doubles and may not alias `rho_in`.
enum DephaseStatus dephase_kraus_apply(const struct DephaseKrausSet *set,
                                       const double *rho_in,
                                       double *rho_out,
                                       size_t dim);

// Runs a CLI command (`coefficients`, `decompose`, `fock`, `basis`,
// `restore`) on a JSON config without touching the filesystem.
//
// `*out_report` receives the pretty-printed report (free with
// [`dephase_string_free`]) and `*out_exit_code` the CLI exit code. Schema
// errors still produce a report and return `Config`.
enum DephaseStatus dephase_run_config(const char *command,
                                      const char *config_json,
                                      char **out_report,
                                      int32_t *out_exit_code);

#endif  /* DEPHASE_H */
