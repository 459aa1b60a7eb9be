#ifndef DIPNE_H
#define DIPNE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>

typedef enum DipneStatus {
  DIPNE_STATUS_OK = 0,
  DIPNE_STATUS_NULL_POINTER = 1,
  DIPNE_STATUS_INVALID_ARGUMENT = 2,
  // Truncation leakage above threshold; the message suggests a cutoff.
  DIPNE_STATUS_LEAKAGE = 3,
  DIPNE_STATUS_NOT_NORMALIZABLE = 4,
  DIPNE_STATUS_CONFIG = 5,
  DIPNE_STATUS_NUMERICAL = 6,
  // `dipne_run_experiment` finished but a tolerance check failed.
  DIPNE_STATUS_TOLERANCE_BREACH = 7,
  DIPNE_STATUS_PANIC = 8,
} DipneStatus;

// Photon bookkeeping used by `dipne_fit_squeezed_cat`.
typedef enum DipneAccounting {
  DIPNE_ACCOUNTING_COMPONENT = 0,
  DIPNE_ACCOUNTING_STATE = 1,
} DipneAccounting;

// Opaque quantum state.
typedef struct DipneState DipneState;

// Best squeezed-cat fit of a single-mode state.
typedef struct DipneCatFit {
  double fidelity;
  double squeeze_fraction;
  double alpha;
  double r;
  double phi;
  double plain_cat_fidelity;
  double axis;
  double squeeze_theta;
  double mean_photons;
} DipneCatFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static NUL-terminated string.
const char *dipne_version(void);

// Message for the last failed call on this thread; empty after a success.
// Valid until the next library call on the same thread.
const char *dipne_last_error(void);

// Release a string returned by the library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void dipne_string_free(char *s);

// Release a state. Null is ignored.
//
// # Safety
// `state` must come from this library and not have been freed.
void dipne_state_free(struct DipneState *state);

// Vacuum on `modes` modes, each truncated at `cutoff` photons.
//
// # Safety
// `out` must be valid for writes.
enum DipneStatus dipne_vacuum(size_t modes, size_t cutoff, struct DipneState **out);

// Basis state `|occupation⟩` with per-mode `cutoffs`, both of length `modes`.
//
// # Safety
// Arrays must hold `modes` elements; `out` must be valid for writes.
enum DipneStatus dipne_fock(const size_t *cutoffs,
                            const size_t *occupation,
                            size_t modes,
                            struct DipneState **out);

// Single-mode coherent state.
//
// # Safety
// `out` must be valid for writes.
enum DipneStatus dipne_coherent(double re, double im, size_t cutoff, struct DipneState **out);

// Single-mode squeezed vacuum with `ξ = r e^{iθ}`.
//
// # Safety
// `out` must be valid for writes.
enum DipneStatus dipne_squeezed_vacuum(double r,
                                       double theta,
                                       size_t cutoff,
                                       struct DipneState **out);

// Normalized `(D(α) + e^{iφ}D(−α)) S(r e^{iθ})|0⟩`.
//
// # Safety
// `out` must be valid for writes.
enum DipneStatus dipne_cat(double alpha_re,
                           double alpha_im,
                           double phi,
                           double r,
                           double theta,
                           size_t cutoff,
                           struct DipneState **out);

// Kitten state after counting `k` photons in the tapped arm of a beamsplitter
// at `theta_sub`. A non-finite `squeeze_photons` selects the
// infinite-squeezing limit. `probability` (nullable) receives the count
// probability, or -1 in the infinite limit.
//
// # Safety
// `out` must be valid for writes; `probability` may be null.
enum DipneStatus dipne_kitten(double squeeze_photons,
                              double theta_sub,
                              size_t k,
                              size_t cutoff,
                              struct DipneState **out,
                              double *probability);

// Number of modes.
//
// # Safety
// `state` must be a live handle; `out` valid for writes.
enum DipneStatus dipne_state_modes(const struct DipneState *state, size_t *out);

// Number of stored amplitudes.
//
// # Safety
// `state` must be a live handle; `out` valid for writes.
enum DipneStatus dipne_state_dim(const struct DipneState *state, size_t *out);

// Amplitude of `|occupation⟩`; `len` must equal the number of modes.
//
// # Safety
// `occupation` must hold `len` elements; `re` and `im` valid for writes.
enum DipneStatus dipne_state_amplitude(const struct DipneState *state,
                                       const size_t *occupation,
                                       size_t len,
                                       double *re,
                                       double *im);

// Copy all amplitudes as interleaved `(re, im)` pairs into `buf`, which must
// hold `2 * dim` doubles; `len` is its length in doubles.
//
// # Safety
// `buf` must be valid for `len` writes.
enum DipneStatus dipne_state_amplitudes(const struct DipneState *state, double *buf, size_t len);

// Mean photon number of one mode.
//
// # Safety
// `state` must be a live handle; `out` valid for writes.
enum DipneStatus dipne_state_mean_photons(const struct DipneState *state, size_t mode, double *out);

// Truncation diagnostic: the larger of the recorded leakage and the mass in
// the guard band below each cutoff.
//
// # Safety
// `state` must be a live handle; `out` valid for writes.
enum DipneStatus dipne_state_leakage(const struct DipneState *state, double *out);

// `|⟨a|b⟩|²` of two states on the same layout.
//
// # Safety
// Handles must be live; `out` valid for writes.
enum DipneStatus dipne_fidelity(const struct DipneState *a,
                                const struct DipneState *b,
                                double *out);

// Product state `a ⊗ b`, modes of `a` first.
//
// # Safety
// Handles must be live; `out` valid for writes.
enum DipneStatus dipne_tensor(const struct DipneState *a,
                              const struct DipneState *b,
                              struct DipneState **out);

// Beamsplitter `exp(iθ(a†b + ab†))` on modes `mode_a`, `mode_b`.
//
// # Safety
// `state` must be a live handle; `out` valid for writes.
enum DipneStatus dipne_beamsplit(const struct DipneState *state,
                                 size_t mode_a,
                                 size_t mode_b,
                                 double theta,
                                 struct DipneState **out);

// Displacement `D(α)` on one mode.
//
// # Safety
// `state` must be a live handle; `out` valid for writes.
enum DipneStatus dipne_displace(const struct DipneState *state,
                                size_t mode,
                                double re,
                                double im,
                                struct DipneState **out);

// Squeezing `S(r e^{iθ})` on one mode.
//
// # Safety
// `state` must be a live handle; `out` valid for writes.
enum DipneStatus dipne_squeeze(const struct DipneState *state,
                               size_t mode,
                               double r,
                               double theta,
                               struct DipneState **out);

// Phase shift `exp(iφ n̂)` on one mode.
//
// # Safety
// `state` must be a live handle; `out` valid for writes.
enum DipneStatus dipne_phase_shift(const struct DipneState *state,
                                   size_t mode,
                                   double phi,
                                   struct DipneState **out);

// Fit a single-mode state with squeezed cats of relative phase `phi`.
//
// # Safety
// `state` must be a live handle; `out` valid for writes.
enum DipneStatus dipne_fit_squeezed_cat(const struct DipneState *state,
                                        double phi,
                                        enum DipneAccounting accounting,
                                        struct DipneCatFit *out);

// Amplitude of `|p, p⟩` after a 50:50 beamsplitter on `|n, m⟩`.
//
// # Safety
// `re` and `im` must be valid for writes.
enum DipneStatus dipne_c_equal(size_t n, size_t m, double *re, double *im);

// Closed-form interference loss of the coupling gadget for coherent inputs.
//
// # Safety
// `out` must be valid for writes.
enum DipneStatus dipne_interference_loss_theory(double a1_re,
                                                double a1_im,
                                                double a2_re,
                                                double a2_im,
                                                double theta_split,
                                                double theta_interfere,
                                                bool pi_shift,
                                                double *out);

// Photon-number peak estimate `−k / (2 ln cos θ_sub)`.
//
// # Safety
// `out` must be valid for writes.
enum DipneStatus dipne_peak_estimate(size_t k, double theta_sub, double *out);

// Run a named experiment with `key = value` configuration text (may be
// null for defaults). On `DIPNE_STATUS_OK` or `DIPNE_STATUS_TOLERANCE_BREACH`
// `csv` receives the table, to be released with `dipne_string_free`.
//
// # Safety
// Strings must be NUL-terminated; `csv` valid for writes.
enum DipneStatus dipne_run_experiment(const char *name, const char *config, char **csv);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIPNE_H */
