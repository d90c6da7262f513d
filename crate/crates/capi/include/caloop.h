#ifndef CALOOP_H
#define CALOOP_H

/* Generated by cbindgen from caloop-capi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of a caloop call.
typedef enum CaloopStatus {
  CALOOP_STATUS_OK = 0,
  // A required pointer argument was NULL.
  CALOOP_STATUS_NULL_ARGUMENT = 1,
  // An input string was not valid UTF-8.
  CALOOP_STATUS_INVALID_UTF8 = 2,
  // The input text did not parse or failed validation.
  CALOOP_STATUS_PARSE = 3,
  // The inputs parsed but violate a mathematical precondition.
  CALOOP_STATUS_DOMAIN = 4,
  // The result would exceed a size budget.
  CALOOP_STATUS_BUDGET = 5,
  // An internal invariant failed; the handle state is unchanged.
  CALOOP_STATUS_PANIC = 6,
} CaloopStatus;

// A Lie algebra over F2 with a validated bracket table.
typedef struct CaloopLie CaloopLie;

// A finite loop given by its Cayley table.
typedef struct CaloopLoop CaloopLoop;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failing call on this thread, or NULL.
// The pointer is invalidated by the next caloop call on this thread.
const char *caloop_last_error_message(void);

// Frees a string returned by this library. NULL is a no-op.
void caloop_string_free(char *s);

// Parses cayley-v1 text into a loop handle.
enum CaloopStatus caloop_loop_parse(const char *text, struct CaloopLoop **out);

// Frees a loop handle. NULL is a no-op.
void caloop_loop_free(struct CaloopLoop *q);

// Writes the loop order.
enum CaloopStatus caloop_loop_order(const struct CaloopLoop *q, size_t *out);

// Writes the product x * y. Arguments must be below the order.
enum CaloopStatus caloop_loop_mul(const struct CaloopLoop *q, size_t x, size_t y, size_t *out);

// Writes whether every inner generator is an automorphism.
enum CaloopStatus caloop_loop_is_automorphic(const struct CaloopLoop *q, bool *out);

// Renders the loop as cayley-v1 text.
enum CaloopStatus caloop_loop_to_cayley(const struct CaloopLoop *q, char **out);

// Writes the full analysis report (predicates, nuclei, center,
// automorphic check, split attempt) as JSON.
enum CaloopStatus caloop_loop_analyze_json(const struct CaloopLoop *q,
                                           size_t split_budget,
                                           char **out);

// Parses lief2-v1 JSON and checks the Jacobi identity.
enum CaloopStatus caloop_lie_parse(const char *json, struct CaloopLie **out);

// Frees a Lie algebra handle. NULL is a no-op.
void caloop_lie_free(struct CaloopLie *l);

// Writes the dimension.
enum CaloopStatus caloop_lie_dim(const struct CaloopLie *l, size_t *out);

// Writes whether [[x,y],[z,y]] = 0 holds identically.
enum CaloopStatus caloop_lie_check_w2(const struct CaloopLie *l, bool *out);

// Renders the algebra as lief2-v1 JSON.
enum CaloopStatus caloop_lie_to_json(const struct CaloopLie *l, char **out);

// Builds the loop x * y = x + y + [x, y], refusing orders above
// max_order.
enum CaloopStatus caloop_lie_to_loop(const struct CaloopLie *l,
                                     size_t max_order,
                                     struct CaloopLoop **out);

// Builds the subfield loop on GF(2^m) over GF(2^d), order 2^(m+1).
enum CaloopStatus caloop_example2(uint32_t m, uint32_t d, struct CaloopLoop **out);

// Default budget for the split search inside analyze.
size_t caloop_default_split_budget(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CALOOP_H */
