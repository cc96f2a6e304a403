#ifndef GQMS_H
#define GQMS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum {
  GQMS_STATUS_OK = 0,
  // A required pointer was null, a string was not UTF-8, or a name was unknown.
  GQMS_STATUS_INVALID_ARGUMENT = 1,
  GQMS_STATUS_PARSE_ERROR = 2,
  // The model has validation errors and cannot be evaluated.
  GQMS_STATUS_INVALID_MODEL = 3,
  GQMS_STATUS_INGEST_ERROR = 4,
  GQMS_STATUS_MERGE_CONFLICT = 5,
  GQMS_STATUS_NOT_FOUND = 6,
  // A bug inside the library; the call had no effect.
  GQMS_STATUS_PANIC = 7,
} GqmsStatus;

// Verdict of a goal.
typedef enum {
  GQMS_GOAL_STATUS_SATISFIED = 0,
  GQMS_GOAL_STATUS_NOT_SATISFIED = 1,
  GQMS_GOAL_STATUS_UNDETERMINED = 2,
} GqmsGoalStatus;

typedef struct GqmsDataset GqmsDataset;

typedef struct GqmsModel GqmsModel;

typedef struct GqmsReport GqmsReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// The error message of the last call on this thread, empty if it succeeded.
// Valid until the next `gqms_*` call on the same thread.
const char *gqms_last_error_message(void);

// Library version, a static string.
const char *gqms_version(void);

// Frees a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void gqms_string_free(char *s);

// Parses model source text. `file_name` labels source locations.
//
// # Safety
// `source` and `file_name` must be NUL-terminated; `out` must be writable.
GqmsStatus gqms_model_parse(const char *source, const char *file_name, GqmsModel **out);

// # Safety
// `model` must be null or come from [`gqms_model_parse`] and not have been freed.
void gqms_model_free(GqmsModel *model);

// Validation and conflict diagnostics as a JSON array. Finding problems is
// not a failure; the call succeeds whenever the array was produced.
//
// # Safety
// `model` must be a live handle; `json_out` must be writable.
GqmsStatus gqms_model_validate(const GqmsModel *model, bool strict, char **json_out);

// The model in canonical source form.
//
// # Safety
// `model` must be a live handle; `out` must be writable.
GqmsStatus gqms_model_format(const GqmsModel *model, char **out);

// Renders the model as `tree`, `dot` or `md`, without statuses.
//
// # Safety
// `model` must be a live handle; `format` NUL-terminated; `out` writable.
GqmsStatus gqms_model_render(const GqmsModel *model, const char *format, char **out);

// Reads `metric,period,value` CSV, checked against the model's metrics.
//
// # Safety
// `model` must be a live handle; `csv` NUL-terminated; `out` writable.
GqmsStatus gqms_dataset_from_csv(const GqmsModel *model, const char *csv, GqmsDataset **out);

// Reads one JSON observation per line, checked against the model's metrics.
//
// # Safety
// `model` must be a live handle; `jsonl` NUL-terminated; `out` writable.
GqmsStatus gqms_dataset_from_jsonl(const GqmsModel *model, const char *jsonl, GqmsDataset **out);

// Union of two datasets. Fails with `MergeConflict` if they disagree on
// any observation; the inputs are left untouched.
//
// # Safety
// `a` and `b` must be live handles; `out` writable.
GqmsStatus gqms_dataset_merge(const GqmsDataset *a, const GqmsDataset *b, GqmsDataset **out);

// Number of observations.
//
// # Safety
// `dataset` must be null or a live handle.
size_t gqms_dataset_len(const GqmsDataset *dataset);

// # Safety
// `dataset` must be null or a live handle.
void gqms_dataset_free(GqmsDataset *dataset);

// Evaluates every goal at `period`. The report keeps its own copy of the
// model, so both inputs may be freed afterwards.
//
// # Safety
// `model` and `dataset` must be live handles; `out` writable.
GqmsStatus gqms_evaluate(const GqmsModel *model,
                         const GqmsDataset *dataset,
                         uint32_t period,
                         GqmsReport **out);

// Status of one goal.
//
// # Safety
// `report` must be a live handle; `goal` NUL-terminated; `out` writable.
GqmsStatus gqms_report_goal_status(const GqmsReport *report, const char *goal, GqmsGoalStatus *out);

// Annotated explanation of one goal's verdict.
//
// # Safety
// `report` must be a live handle; `goal` NUL-terminated; `out` writable.
GqmsStatus gqms_report_explain(const GqmsReport *report, const char *goal, char **out);

// Renders the model with this report's statuses as `tree`, `dot` or `md`.
//
// # Safety
// `report` must be a live handle; `format` NUL-terminated; `out` writable.
GqmsStatus gqms_report_render(const GqmsReport *report, const char *format, char **out);

// The whole report as JSON.
//
// # Safety
// `report` must be a live handle; `json_out` writable.
GqmsStatus gqms_report_to_json(const GqmsReport *report, char **json_out);

// # Safety
// `report` must be null or a live handle.
void gqms_report_free(GqmsReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GQMS_H */
