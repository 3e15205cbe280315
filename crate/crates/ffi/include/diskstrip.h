#ifndef DISKSTRIP_H
#define DISKSTRIP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum DsStatus {
  DS_STATUS_OK = 0,
  DS_STATUS_NULL_POINTER = 1,
  DS_STATUS_INVALID_UTF8 = 2,
  DS_STATUS_PARSE = 3,
  DS_STATUS_INVALID_INPUT = 4,
  DS_STATUS_UNSUPPORTED = 5,
  DS_STATUS_NOT_CRITICAL = 6,
  DS_STATUS_NOT_A_CYCLE = 7,
  DS_STATUS_INTERNAL = 8,
} DsStatus;

typedef enum DsVariant {
  DS_VARIANT_FULL = 0,
  DS_VARIANT_DESC = 1,
} DsVariant;

// Opaque integer chain.
typedef struct DsChain DsChain;

// Opaque cell symbol.
typedef struct DsSymbol DsSymbol;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Caller frees
// with `ds_string_free`.
char *ds_last_error(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void ds_string_free(char *s);

// Parses a symbol such as `"2|5 3|1 4"`.
//
// # Safety
// `text` must be a valid C string; `out` must be writable.
enum DsStatus ds_symbol_parse(const char *text, struct DsSymbol **out);

// # Safety
// `sym` must be null or a handle from this library, not yet freed.
void ds_symbol_free(struct DsSymbol *sym);

// # Safety
// `sym` must be a live handle; `out` must be writable.
enum DsStatus ds_symbol_dimension(const struct DsSymbol *sym, size_t *out);

// # Safety
// `sym` must be a live handle; `out` must be writable.
enum DsStatus ds_symbol_to_string(const struct DsSymbol *sym, char **out);

// Boundary of a single cell.
//
// # Safety
// `sym` must be a live handle; `out` must be writable.
enum DsStatus ds_symbol_boundary(const struct DsSymbol *sym, struct DsChain **out);

// Whether `sym` is a critical cell of the complex at level `n`.
//
// # Safety
// `sym` must be a live handle; `out` must be writable.
enum DsStatus ds_is_critical(const struct DsSymbol *sym,
                             size_t n,
                             size_t w,
                             enum DsVariant variant,
                             bool *out);

// The basis cycle z(e) of a critical cell.
//
// # Safety
// `sym` must be a live handle; `out` must be writable.
enum DsStatus ds_z_cycle(const struct DsSymbol *sym,
                         size_t n,
                         size_t w,
                         enum DsVariant variant,
                         struct DsChain **out);

// # Safety
// `chain` must be null or a handle from this library, not yet freed.
void ds_chain_free(struct DsChain *chain);

// Number of nonzero terms.
//
// # Safety
// `chain` must be a live handle; `out` must be writable.
enum DsStatus ds_chain_len(const struct DsChain *chain, size_t *out);

// Text form, greatest cell first, e.g. `"1|3 2 - 2 1|3"`.
//
// # Safety
// `chain` must be a live handle; `out` must be writable.
enum DsStatus ds_chain_to_string(const struct DsChain *chain, char **out);

// Chain file JSON (`{"n", "dimension", "terms": [{"symbol", "coeff"}]}`).
//
// # Safety
// `chain` must be a live handle; `out` must be writable.
enum DsStatus ds_chain_to_json(const struct DsChain *chain, size_t n, char **out);

// Parses a chain file JSON document.
//
// # Safety
// `json` must be a valid C string; `out` must be writable.
enum DsStatus ds_chain_from_json(const char *json, struct DsChain **out);

// Homology summary as JSON (`{"spec", "betti", "torsion"}`).
//
// # Safety
// `out` must be writable.
enum DsStatus ds_homology_json(size_t n,
                               size_t w,
                               enum DsVariant variant,
                               bool torsion,
                               char **out);

// Basis coordinates of a cycle at level `n` as a JSON object mapping
// critical cells to coefficients.
//
// # Safety
// `chain` must be a live handle; `out` must be writable.
enum DsStatus ds_reduce_json(const struct DsChain *chain,
                             size_t n,
                             size_t w,
                             enum DsVariant variant,
                             char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DISKSTRIP_H */
