#ifndef XMLKR_H
#define XMLKR_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum XmlkrStatus {
  XMLKR_STATUS_OK = 0,
  XMLKR_STATUS_NULL_ARGUMENT = 1,
  XMLKR_STATUS_INVALID_UTF8 = 2,
  /**
   * The document is malformed or violates the XMLKR grammar.
   */
  XMLKR_STATUS_PARSE_ERROR = 3,
  XMLKR_STATUS_UNKNOWN_OBJECT = 4,
  XMLKR_STATUS_DUPLICATE_OBJECT = 5,
  XMLKR_STATUS_DUPLICATE_ATTRIBUTE = 6,
  /**
   * An argument failed validation.
   */
  XMLKR_STATUS_INVALID_ARGUMENT = 7,
  XMLKR_STATUS_QUERY_SYNTAX = 8,
  /**
   * The requested attribute is not defined or inherited.
   */
  XMLKR_STATUS_NOT_FOUND = 9,
  XMLKR_STATUS_PANIC = 99,
} XmlkrStatus;

/**
 * Opaque knowledge base handle.
 */
typedef struct XmlkrKb XmlkrKb;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an empty knowledge base.
 */
struct XmlkrKb *xmlkr_kb_new(void);

/**
 * Releases a handle. NULL is ignored.
 */
void xmlkr_kb_free(struct XmlkrKb *kb);

/**
 * Parses `len` bytes of an XMLKR document into a new handle stored in
 * `*out`. On [`XmlkrStatus::ParseError`] the error position is available
 * from [`xmlkr_last_error_line`] and [`xmlkr_last_error_column`].
 */
enum XmlkrStatus xmlkr_kb_parse(const uint8_t *data, size_t len, struct XmlkrKb **out);

/**
 * Defines an object with `count` scalar attributes given as parallel
 * arrays of names and values. The arrays may be NULL when `count` is 0.
 */
enum XmlkrStatus xmlkr_kb_add_object(struct XmlkrKb *kb,
                                     const char *name,
                                     const char *const *attr_names,
                                     const char *const *attr_values,
                                     size_t count);

/**
 * Adds `source -kind-> target`. `kind` is `isa`, `ako` or a relation
 * label; a missing target becomes a stub.
 */
enum XmlkrStatus xmlkr_kb_add_relation(struct XmlkrKb *kb,
                                       const char *source,
                                       const char *kind,
                                       const char *target);

/**
 * Number of objects, stubs included. 0 for NULL.
 */
size_t xmlkr_kb_object_count(const struct XmlkrKb *kb);

enum XmlkrStatus xmlkr_kb_serialize_flat(const struct XmlkrKb *kb, char **out);

enum XmlkrStatus xmlkr_kb_serialize_nested(const struct XmlkrKb *kb, const char *root, char **out);

/**
 * Runs a query; `*out` receives the rows, one per line, tab-separated.
 */
enum XmlkrStatus xmlkr_kb_query(const struct XmlkrKb *kb, const char *text, char **out);

/**
 * Validation findings, one `LEVEL\tCODE\tmessage` line each.
 */
enum XmlkrStatus xmlkr_kb_validate(const struct XmlkrKb *kb, bool strict, char **out);

/**
 * Resolves a dot-separated attribute path with inheritance. On success
 * `*value` and `*provider` receive new strings and `*distance` the number
 * of inheritance hops. Returns [`XmlkrStatus::NotFound`] when no object
 * along the ISA/AKO hierarchy defines the path.
 */
enum XmlkrStatus xmlkr_kb_resolve_attr(const struct XmlkrKb *kb,
                                       const char *object,
                                       const char *path,
                                       char **value,
                                       char **provider,
                                       size_t *distance);

enum XmlkrStatus xmlkr_kb_is_a(const struct XmlkrKb *kb,
                               const char *object,
                               const char *class_,
                               bool *out);

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *xmlkr_last_error(void);

/**
 * Line of the last positioned error, 0 if none.
 */
uint32_t xmlkr_last_error_line(void);

/**
 * Column of the last positioned error, 0 if none.
 */
uint32_t xmlkr_last_error_column(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 */
void xmlkr_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XMLKR_H */
