#ifndef CANTOR_H
#define CANTOR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CantorBoolOp {
  CANTOR_BOOL_OP_UNION = 0,
  CANTOR_BOOL_OP_INTERSECTION = 1,
  CANTOR_BOOL_OP_COMPLEMENT = 2,
  CANTOR_BOOL_OP_BOOLEAN_SUM = 3,
  CANTOR_BOOL_OP_DIFFERENCE = 4,
} CantorBoolOp;

typedef enum CantorStatus {
  CANTOR_STATUS_OK = 0,
  /**
   * The computation finished with a negative answer (for example a
   * certificate with discrepancies).
   */
  CANTOR_STATUS_NEGATIVE = 1,
  CANTOR_STATUS_NULL_ARGUMENT = 2,
  CANTOR_STATUS_INVALID_UTF8 = 3,
  CANTOR_STATUS_PARSE = 4,
  CANTOR_STATUS_INVALID_INPUT = 5,
  CANTOR_STATUS_BUDGET = 6,
  CANTOR_STATUS_PANIC = 7,
} CantorStatus;

/**
 * A clopen subset of the Cantor space.
 */
typedef struct CantorClopen CantorClopen;

/**
 * A continuous self-map given by a transducer.
 */
typedef struct CantorMap CantorMap;

/**
 * A cylinder-weight measure.
 */
typedef struct CantorMeasure CantorMeasure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *cantor_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void cantor_string_free(char *s);

/**
 * Parses `{"antichain":[...]}` (or a bare word list) into a handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum CantorStatus cantor_clopen_from_json(const char *json, struct CantorClopen **out);

/**
 * # Safety
 * `set` must be a live handle and `out` writable.
 */
enum CantorStatus cantor_clopen_to_json(const struct CantorClopen *set, char **out);

/**
 * `b` is ignored (and may be NULL) for the complement.
 *
 * # Safety
 * `a` (and `b` unless complementing) must be live handles; `out` writable.
 */
enum CantorStatus cantor_clopen_boolop(enum CantorBoolOp op,
                                       const struct CantorClopen *a,
                                       const struct CantorClopen *b,
                                       struct CantorClopen **out);

/**
 * # Safety
 * `set` must be NULL or a handle not yet freed.
 */
void cantor_clopen_free(struct CantorClopen *set);

/**
 * Parses a transducer, or one of the names `fold`, `identity`,
 * `flip-first`, `shift`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum CantorStatus cantor_map_from_json(const char *json, struct CantorMap **out);

/**
 * # Safety
 * `map` must be a live handle and `out` writable.
 */
enum CantorStatus cantor_map_to_json(const struct CantorMap *map, char **out);

/**
 * # Safety
 * `map` and `set` must be live handles; `out` writable.
 */
enum CantorStatus cantor_map_preimage(const struct CantorMap *map,
                                      const struct CantorClopen *set,
                                      struct CantorClopen **out);

/**
 * Writes `{"surjectivity":...,"injectivity":...}` as JSON.
 *
 * # Safety
 * `map` must be a live handle and `out` writable.
 */
enum CantorStatus cantor_map_certificates(const struct CantorMap *map, char **out);

/**
 * # Safety
 * `map` must be NULL or a handle not yet freed.
 */
void cantor_map_free(struct CantorMap *map);

/**
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum CantorStatus cantor_measure_from_json(const char *json, struct CantorMeasure **out);

/**
 * Writes the measure of `set` as a string `"p/q"`.
 *
 * # Safety
 * `measure` and `set` must be live handles; `out` writable.
 */
enum CantorStatus cantor_measure_of(const struct CantorMeasure *measure,
                                    const struct CantorClopen *set,
                                    char **out);

/**
 * # Safety
 * `measure` must be NULL or a handle not yet freed.
 */
void cantor_measure_free(struct CantorMeasure *measure);

/**
 * Checks `mu(f^-1[w]) = nu([w])` for all words up to `depth`. Returns
 * `CANTOR_STATUS_NEGATIVE` with the violation in `out` when it fails.
 *
 * # Safety
 * All handles must be live; `out` writable.
 */
enum CantorStatus cantor_check_preserves(const struct CantorMap *map,
                                         const struct CantorMeasure *mu,
                                         const struct CantorMeasure *nu,
                                         size_t depth,
                                         char **out);

/**
 * Certificate for a homeomorphism within `2^-n` of `map`, as JSON.
 *
 * # Safety
 * `map` must be a live handle and `out` writable.
 */
enum CantorStatus cantor_approx_homeo(const struct CantorMap *map, size_t n, char **out);

/**
 * Measure-preserving version of [`cantor_approx_homeo`]. A `budget` of 0
 * picks the default.
 *
 * # Safety
 * All handles must be live; `out` writable.
 */
enum CantorStatus cantor_approx_measure_homeo(const struct CantorMap *map,
                                              const struct CantorMeasure *mu,
                                              const struct CantorMeasure *nu,
                                              size_t n,
                                              size_t budget,
                                              char **out);

/**
 * Re-verifies a certificate. Writes the list of discrepancies as a JSON
 * array and returns `CANTOR_STATUS_NEGATIVE` when it is nonempty.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum CantorStatus cantor_verify_certificate(const char *json, char **out);

/**
 * Runs one `cantor` command line. `argv[0]` is the program name. The exit
 * code goes to `exit_code`; stdout and stderr to the two strings.
 *
 * # Safety
 * `argv` must hold `argc` NUL-terminated strings; outputs writable.
 */
enum CantorStatus cantor_run(int argc,
                             const char *const *argv,
                             int *exit_code,
                             char **stdout_out,
                             char **stderr_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CANTOR_H */
