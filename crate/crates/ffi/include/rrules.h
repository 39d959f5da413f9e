#ifndef RRULES_H
#define RRULES_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RrAlgorithm {
  RR_ALGORITHM_RULES = 0,
  RR_ALGORITHM_RRULES = 1,
} RrAlgorithm;

typedef enum RrStatus {
  RR_STATUS_OK = 0,
  RR_STATUS_NULL_POINTER = 1,
  RR_STATUS_INVALID_ARGUMENT = 2,
  RR_STATUS_PARSE = 3,
  RR_STATUS_IO = 4,
  RR_STATUS_UNDEFINED = 5,
  RR_STATUS_PANIC = 6,
} RrStatus;

// Opaque dataset handle.
typedef struct RrDataset RrDataset;

// Opaque rule-set handle.
typedef struct RrRuleSet RrRuleSet;

// Metrics of a rule set. `test_accuracy` is NaN and `default_rule_uses`
// is 0 when no test set was given.
typedef struct RrMetrics {
  size_t n_rules;
  double mean_precision;
  double overall_coverage;
  double test_accuracy;
  size_t default_rule_uses;
} RrMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *rr_last_error(void);

// Loads a CSV file. `class_column` is "first", "last", a zero-based index
// or a header name; NULL means "last". Numeric columns with more than
// `n_bins` distinct values are binned; `n_bins == 0` keeps every column
// categorical.
//
// # Safety
// `path` and a non-NULL `class_column` must be NUL-terminated strings;
// `out` must be writable.
enum RrStatus rr_dataset_load_csv(const char *path,
                                  bool has_header,
                                  const char *class_column,
                                  size_t n_bins,
                                  struct RrDataset **out);

// Loads a built-in dataset by name ("toy").
//
// # Safety
// `name` must be a NUL-terminated string; `out` must be writable.
enum RrStatus rr_dataset_fixture(const char *name, struct RrDataset **out);

// # Safety
// `dataset` must be a live handle; the out pointers must be writable or NULL.
enum RrStatus rr_dataset_shape(const struct RrDataset *dataset,
                               size_t *rows,
                               size_t *attributes,
                               size_t *classes);

// Class index of row `row`.
//
// # Safety
// `dataset` must be a live handle; `out` must be writable.
enum RrStatus rr_dataset_class_of(const struct RrDataset *dataset, size_t row, size_t *out);

// Name of class `index` as a new string; release it with [`rr_string_free`].
//
// # Safety
// `dataset` must be a live handle; `out` must be writable.
enum RrStatus rr_dataset_class_name(const struct RrDataset *dataset, size_t index, char **out);

// Seeded train/test split; both parts share the parent's encoding.
//
// # Safety
// `dataset` must be a live handle; `train` and `test` must be writable.
enum RrStatus rr_dataset_split(const struct RrDataset *dataset,
                               double test_fraction,
                               uint64_t seed,
                               struct RrDataset **train,
                               struct RrDataset **test);

// # Safety
// `dataset` must be NULL or a handle not yet freed.
void rr_dataset_free(struct RrDataset *dataset);

// # Safety
// `train` must be a live handle; `out` must be writable.
enum RrStatus rr_induce(const struct RrDataset *train,
                        enum RrAlgorithm algorithm,
                        struct RrRuleSet **out);

// # Safety
// `rules` must be a live handle; `out` must be writable.
enum RrStatus rr_ruleset_len(const struct RrRuleSet *rules, size_t *out);

// Predicts the class of row `row` of `dataset`, which must share the
// training set's encoding (the training set itself or a split of it).
//
// # Safety
// Handles must be live; `out` must be writable.
enum RrStatus rr_ruleset_predict_row(const struct RrRuleSet *rules,
                                     const struct RrDataset *dataset,
                                     size_t row,
                                     size_t *out);

// Predicts the class of an example given as `n` attribute value indices.
//
// # Safety
// `values` must point to `n` readable elements; `out` must be writable.
enum RrStatus rr_ruleset_predict(const struct RrRuleSet *rules,
                                 const size_t *values,
                                 size_t n,
                                 size_t *out);

// Rules as text, one per line, followed by the default class. Release the
// string with [`rr_string_free`].
//
// # Safety
// `rules` must be a live handle; `out` must be writable.
enum RrStatus rr_ruleset_dump(const struct RrRuleSet *rules, char **out);

// Rules as a JSON document. Release the string with [`rr_string_free`].
//
// # Safety
// `rules` must be a live handle; `out` must be writable.
enum RrStatus rr_ruleset_json(const struct RrRuleSet *rules, char **out);

// Training precision and coverage, plus test accuracy when `test` is not
// NULL. No timing is measured.
//
// # Safety
// `rules` and `train` must be live handles, `test` a live handle or NULL;
// `out` must be writable.
enum RrStatus rr_metrics(const struct RrRuleSet *rules,
                         const struct RrDataset *train,
                         const struct RrDataset *test,
                         struct RrMetrics *out);

// Checks rule purity and coverage of every training row, and for RRULES
// that each rule classified a new row. `violations` receives the number
// of problems found.
//
// # Safety
// Handles must be live; `passed` and `violations` must be writable or NULL.
enum RrStatus rr_verify(const struct RrRuleSet *rules,
                        const struct RrDataset *train,
                        bool *passed,
                        size_t *violations);

// # Safety
// `rules` must be NULL or a handle not yet freed.
void rr_ruleset_free(struct RrRuleSet *rules);

// # Safety
// `s` must be NULL or a string returned by this library and not yet freed.
void rr_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RRULES_H */
