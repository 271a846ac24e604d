#ifndef INVBINOM_H
#define INVBINOM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  INVBINOM_STATUS_OK = 0,
  INVBINOM_STATUS_NULL_POINTER = 1,
  INVBINOM_STATUS_INVALID_ARGUMENT = 2,
  INVBINOM_STATUS_NOT_PRIME = 3,
  INVBINOM_STATUS_CAP_EXCEEDED = 4,
  INVBINOM_STATUS_PRECISION_EXHAUSTED = 5,
  INVBINOM_STATUS_ENGINE_DISAGREEMENT = 6,
  INVBINOM_STATUS_IO = 7,
  INVBINOM_STATUS_INTERNAL = 8,
} InvbinomStatus;

typedef enum {
  INVBINOM_VERDICT_CAUCHY_EVIDENCE = 0,
  INVBINOM_VERDICT_DIVERGENCE_EVIDENCE = 1,
  INVBINOM_VERDICT_INCONCLUSIVE = 2,
} InvbinomVerdict;

/**
 * Opaque evaluation context with its caches.
 */
typedef struct InvbinomContext InvbinomContext;

/**
 * Opaque list of scan exceptions.
 */
typedef struct InvbinomScan InvbinomScan;

/**
 * Engine caps and working precision; zero fields take the library defaults.
 */
typedef struct {
  uint64_t exact_cap;
  uint64_t modular_cap;
  uint32_t precision;
} InvbinomConfig;

typedef struct {
  uint64_t p;
  /**
   * `n` for good-prime exceptions; 0 for Wieferich rows.
   */
  uint64_t n;
  /**
   * Valuation, or the working depth when `censored` is set.
   */
  uint32_t nu;
  bool censored;
} InvbinomScanRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *invbinom_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void invbinom_string_free(char *s);

/**
 * # Safety
 * `config` may be null; `out` must be writable.
 */
InvbinomStatus invbinom_context_new(const InvbinomConfig *config, InvbinomContext **out);

/**
 * # Safety
 * `ctx` must be null or a live handle from [`invbinom_context_new`].
 */
void invbinom_context_free(InvbinomContext *ctx);

/**
 * `f(n)` as a reduced fraction `"a/b"`.
 *
 * # Safety
 * `ctx` must be a live handle and `out` writable.
 */
InvbinomStatus invbinom_f_exact(const InvbinomContext *ctx, uint64_t n, char **out);

/**
 * `ν_p(f(n))`.
 *
 * # Safety
 * `ctx` must be a live handle and `out` writable.
 */
InvbinomStatus invbinom_f_valuation(const InvbinomContext *ctx,
                                    uint64_t n,
                                    uint64_t p,
                                    int64_t *out);

/**
 * `f(n) mod p^digits` in decimal; `InvalidArgument` when `ν_p(f(n)) < 0`.
 *
 * # Safety
 * `ctx` must be a live handle and `out` writable.
 */
InvbinomStatus invbinom_f_residue(const InvbinomContext *ctx,
                                  uint64_t n,
                                  uint64_t p,
                                  uint32_t digits,
                                  char **out);

/**
 * `ν_p(f(m) − f(n))`. `is_lower_bound` is set when precision ran out before
 * the valuation was pinned down; `is_infinite` when the values coincide.
 *
 * # Safety
 * `ctx` must be a live handle; all out-pointers writable.
 */
InvbinomStatus invbinom_f_diff_valuation(const InvbinomContext *ctx,
                                         uint64_t m,
                                         uint64_t n,
                                         uint64_t p,
                                         int64_t *out,
                                         bool *is_lower_bound,
                                         bool *is_infinite);

/**
 * Runs a verifier suite (`prop1.1`, `thm1.2`, `sec2` … `sec5`, `all`) with
 * default parameters. Rows are written as a JSON array; `failures` counts
 * asserted rows that did not hold.
 *
 * # Safety
 * `ctx` must be a live handle, `suite` a NUL-terminated string, and the
 * out-pointers writable. `json_out` may be null to skip the rows.
 */
InvbinomStatus invbinom_verify(const InvbinomContext *ctx,
                               const char *suite,
                               char **json_out,
                               uint64_t *failures);

/**
 * Odd primes `p` in `[lo, hi)` with some `n ≤ p − 2` and `ν_p(f(n)) > 0`,
 * resolved to `depth` digits.
 *
 * # Safety
 * `out` must be writable; release the result with [`invbinom_scan_free`].
 */
InvbinomStatus invbinom_scan_good_primes(uint64_t lo,
                                         uint64_t hi,
                                         uint32_t depth,
                                         InvbinomScan **out);

/**
 * Primes `p` in `[lo, hi)` with `2^{p−1} ≡ 1 (mod p²)`.
 *
 * # Safety
 * `out` must be writable; release the result with [`invbinom_scan_free`].
 */
InvbinomStatus invbinom_scan_wieferich(uint64_t lo, uint64_t hi, InvbinomScan **out);

/**
 * # Safety
 * `scan` must be null or a live scan handle.
 */
size_t invbinom_scan_len(const InvbinomScan *scan);

/**
 * Number of primes examined.
 *
 * # Safety
 * `scan` must be null or a live scan handle.
 */
uint64_t invbinom_scan_checked(const InvbinomScan *scan);

/**
 * # Safety
 * `scan` must be a live scan handle and `out` writable.
 */
InvbinomStatus invbinom_scan_get(const InvbinomScan *scan, size_t index, InvbinomScanRow *out);

/**
 * # Safety
 * `scan` must be null or a live scan handle, not used afterwards.
 */
void invbinom_scan_free(InvbinomScan *scan);

/**
 * Definability report for a p-adic integer description (`rational:-1`,
 * `digits:1,2/0,1`, `sparse2:1,4,21`) up to `depth`. The report is written as JSON.
 *
 * # Safety
 * `ctx` must be a live handle, `spec` a NUL-terminated string, and the
 * out-pointers writable. `json_out` may be null.
 */
InvbinomStatus invbinom_definable(const InvbinomContext *ctx,
                                  const char *spec,
                                  uint64_t p,
                                  uint64_t depth,
                                  InvbinomVerdict *verdict,
                                  char **json_out);

/**
 * Smallest `m` in the witness family with `ν_2(m − n) = eps_exp` and
 * `ν_2(f(m) − f(n)) ≤ −1`; `image_exp` receives that valuation.
 *
 * # Safety
 * `ctx` must be a live handle and the out-pointers writable.
 */
InvbinomStatus invbinom_witness(const InvbinomContext *ctx,
                                uint64_t n,
                                uint32_t eps_exp,
                                uint64_t *m,
                                int64_t *image_exp);

/**
 * Library version, static storage.
 */
const char *invbinom_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INVBINOM_H */
