#ifndef CATSIM_H
#define CATSIM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define CATSIM_COUPLING_NONE 0

#define CATSIM_COUPLING_LINEAR 1

#define CATSIM_COUPLING_NONLINEAR 2

#define CATSIM_PARITY_EVEN 0

#define CATSIM_PARITY_ODD 1

#define CATSIM_STEADY_KERNEL 0

#define CATSIM_STEADY_PROPAGATE 1

#define CATSIM_MODE_A 0

#define CATSIM_MODE_B 1

// Result code of every fallible entry point.
typedef enum CatsimStatus {
  CATSIM_STATUS_OK = 0,
  CATSIM_STATUS_NULL_POINTER = 1,
  CATSIM_STATUS_INVALID_ARGUMENT = 2,
  CATSIM_STATUS_DIMENSION = 3,
  CATSIM_STATUS_NUMERICAL = 4,
  CATSIM_STATUS_DEGENERATE_KERNEL = 5,
  CATSIM_STATUS_NON_CONVERGENCE = 6,
  CATSIM_STATUS_IO = 7,
  CATSIM_STATUS_PANIC = 8,
} CatsimStatus;

// Opaque system model.
typedef struct CatsimModel CatsimModel;

// Opaque density matrix.
typedef struct CatsimState CatsimState;

typedef struct CatsimComplex {
  double re;
  double im;
} CatsimComplex;

// Parameters of one mode; see `catsim::ModeParams`.
typedef struct CatsimModeParams {
  double detuning;
  double kerr;
  struct CatsimComplex drive;
  double gamma;
  double eta;
} CatsimModeParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *catsim_version(void);

// Copies the calling thread's last error message into `buf` (truncated and
// NUL-terminated) and returns the full message length in bytes.
size_t catsim_last_error(char *buf, size_t len);

// One driven mode truncated at `n` Fock states.
enum CatsimStatus catsim_model_one_mode(const struct CatsimModeParams *params,
                                        size_t n,
                                        struct CatsimModel **out);

// Two coupled modes; `coupling` is one of the `CATSIM_COUPLING_*` values.
enum CatsimStatus catsim_model_two_mode(const struct CatsimModeParams *params_a,
                                        const struct CatsimModeParams *params_b,
                                        int coupling,
                                        double strength,
                                        size_t n_a,
                                        size_t n_b,
                                        struct CatsimModel **out);

// Hilbert-space dimension of the model, or 0 for a null handle.
size_t catsim_model_dim(const struct CatsimModel *model);

void catsim_model_free(struct CatsimModel *model);

// Fock state |k⟩ of one mode truncated at `n`.
enum CatsimStatus catsim_state_fock(size_t n, size_t k, struct CatsimState **out);

// Coherent state |α⟩ of one mode truncated at `n`.
enum CatsimStatus catsim_state_coherent(struct CatsimComplex alpha,
                                        size_t n,
                                        struct CatsimState **out);

// Cat state (|ξ⟩ ± |−ξ⟩)/√𝒩; `parity` is `CATSIM_PARITY_EVEN` or `_ODD`.
enum CatsimStatus catsim_state_cat(struct CatsimComplex xi,
                                   int parity,
                                   size_t n,
                                   struct CatsimState **out);

// Density matrix from `dim × dim` column-major entries. Pass `n_b = 0` for a
// single mode of truncation `n_a = dim`, otherwise `dim` must be `n_a · n_b`.
enum CatsimStatus catsim_state_from_matrix(const struct CatsimComplex *data,
                                           size_t dim,
                                           size_t n_a,
                                           size_t n_b,
                                           struct CatsimState **out);

// Pure state from `len` amplitudes, normalized; `n_b` as in
// [`catsim_state_from_matrix`].
enum CatsimStatus catsim_state_from_amplitudes(const struct CatsimComplex *amplitudes,
                                               size_t len,
                                               size_t n_a,
                                               size_t n_b,
                                               struct CatsimState **out);

// ρ_a ⊗ ρ_b of two single-mode states.
enum CatsimStatus catsim_state_tensor(const struct CatsimState *a,
                                      const struct CatsimState *b,
                                      struct CatsimState **out);

// Matrix dimension of the state, or 0 for a null handle.
size_t catsim_state_dim(const struct CatsimState *state);

// Copies ρ column-major into `out`, which must hold `dim²` entries.
enum CatsimStatus catsim_state_copy_matrix(const struct CatsimState *state,
                                           struct CatsimComplex *out,
                                           size_t len);

void catsim_state_free(struct CatsimState *state);

// ρ(t) from ρ(0) = `state` under default integrator settings.
enum CatsimStatus catsim_evolve(const struct CatsimModel *model,
                                const struct CatsimState *state,
                                double t,
                                struct CatsimState **out);

// Stationary state. `method` is `CATSIM_STEADY_KERNEL` (`initial` may be
// null) or `CATSIM_STEADY_PROPAGATE` (`initial` required, stops once
// max|dρ/dt| < `tol`).
enum CatsimStatus catsim_steady_state(const struct CatsimModel *model,
                                      int method,
                                      const struct CatsimState *initial,
                                      double tol,
                                      struct CatsimState **out);

// ⟨a†a⟩ of `mode` (`CATSIM_MODE_A` / `_B`).
enum CatsimStatus catsim_photon_number(const struct CatsimState *state, int mode, double *out);

// ⟨(−1)^{a†a}⟩ of `mode`.
enum CatsimStatus catsim_parity(const struct CatsimState *state, int mode, double *out);

// Von Neumann entropy (natural log) of the whole state.
enum CatsimStatus catsim_entropy(const struct CatsimState *state, double *out);

enum CatsimStatus catsim_purity(const struct CatsimState *state, double *out);

// Sum of |negative eigenvalues| of the partial transpose; two-mode states only.
enum CatsimStatus catsim_negativity(const struct CatsimState *state, double *out);

// S_a + S_b − S_ab; two-mode states only.
enum CatsimStatus catsim_mutual_information(const struct CatsimState *state, double *out);

// ⟨ψ|ρ|ψ⟩ for `len` amplitudes of ψ (normalized internally).
enum CatsimStatus catsim_fidelity_pure(const struct CatsimState *state,
                                       const struct CatsimComplex *amplitudes,
                                       size_t len,
                                       double *out);

// Wigner function of `mode` on the grid `re × im`. `out` holds
// `n_re · n_im` values, row-major with one row per `im` point.
enum CatsimStatus catsim_wigner(const struct CatsimState *state,
                                int mode,
                                const double *re,
                                size_t n_re,
                                const double *im,
                                size_t n_im,
                                double *out);

// Quadrature density 𝒫(X) of `mode` at phase `phi` for each of `n` points.
enum CatsimStatus catsim_quadrature(const struct CatsimState *state,
                                    int mode,
                                    double phi,
                                    const double *xs,
                                    size_t n,
                                    double *out);

// Runs a scenario given as JSON text, writing its outputs under `out_dir`.
enum CatsimStatus catsim_run_scenario_json(const char *json, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CATSIM_H */
