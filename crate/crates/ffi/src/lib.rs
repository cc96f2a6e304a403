//! C ABI over the gqms core library.
//!
//! Objects are opaque handles created by a `gqms_*` constructor and released
//! with the matching `*_free`. Fallible calls return a [`GqmsStatus`]; after a
//! failure [`gqms_last_error_message`] describes it until the next call on the
//! same thread. Strings handed out by the library are NUL-terminated UTF-8
//! owned by the caller, who frees them with [`gqms_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gqms::data::{ingest_csv, ingest_jsonl, merge};
use gqms::eval::{evaluate, explain};
use gqms::expr::GoalStatus;
use gqms::model::{detect_conflicts, validate};
use gqms::report::{render, Format, RenderOptions};
use gqms::syntax::{format_model, parse_model};
use gqms::{Dataset, EvaluationReport, Model};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GqmsStatus {
    Ok = 0,
    /// A required pointer was null, a string was not UTF-8, or a name was unknown.
    InvalidArgument = 1,
    ParseError = 2,
    /// The model has validation errors and cannot be evaluated.
    InvalidModel = 3,
    IngestError = 4,
    MergeConflict = 5,
    NotFound = 6,
    /// A bug inside the library; the call had no effect.
    Panic = 7,
}

/// Verdict of a goal.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GqmsGoalStatus {
    Satisfied = 0,
    NotSatisfied = 1,
    Undetermined = 2,
}

pub struct GqmsModel(Model);

pub struct GqmsDataset(Dataset);

pub struct GqmsReport {
    model: Model,
    report: EvaluationReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(GqmsStatus, String);

type Attempt<T> = Result<T, Failure>;

fn fail<T>(status: GqmsStatus, message: impl Into<String>) -> Attempt<T> {
    Err(Failure(status, message.into()))
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Attempt<()>) -> GqmsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            GqmsStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal error");
            GqmsStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Attempt<&'a str> {
    if p.is_null() {
        return fail(GqmsStatus::InvalidArgument, format!("{what} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(GqmsStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Attempt<&'a T> {
    p.as_ref()
        .map_or_else(|| fail(GqmsStatus::InvalidArgument, format!("{what} is null")), Ok)
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Attempt<()> {
    if out.is_null() {
        return fail(GqmsStatus::InvalidArgument, "output pointer is null");
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Attempt<()> {
    if out.is_null() {
        return fail(GqmsStatus::InvalidArgument, "output pointer is null");
    }
    *out = CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw();
    Ok(())
}

unsafe fn clear<T>(out: *mut *mut T) {
    if !out.is_null() {
        *out = ptr::null_mut();
    }
}

/// The error message of the last call on this thread, empty if it succeeded.
/// Valid until the next `gqms_*` call on the same thread.
#[no_mangle]
pub extern "C" fn gqms_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn gqms_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gqms_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses model source text. `file_name` labels source locations.
///
/// # Safety
/// `source` and `file_name` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gqms_model_parse(
    source: *const c_char,
    file_name: *const c_char,
    out: *mut *mut GqmsModel,
) -> GqmsStatus {
    clear(out);
    guard(|| {
        let source = text(source, "source")?;
        let file = text(file_name, "file_name")?;
        match parse_model(source, file) {
            Ok(model) => put(out, GqmsModel(model)),
            Err(errors) => {
                let lines: Vec<String> = errors.iter().map(ToString::to_string).collect();
                fail(GqmsStatus::ParseError, lines.join("\n"))
            }
        }
    })
}

/// # Safety
/// `model` must be null or come from [`gqms_model_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gqms_model_free(model: *mut GqmsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Validation and conflict diagnostics as a JSON array. Finding problems is
/// not a failure; the call succeeds whenever the array was produced.
///
/// # Safety
/// `model` must be a live handle; `json_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gqms_model_validate(
    model: *const GqmsModel,
    strict: bool,
    json_out: *mut *mut c_char,
) -> GqmsStatus {
    clear(json_out);
    guard(|| {
        let model = &handle(model, "model")?.0;
        let mut diagnostics = validate(model, strict);
        diagnostics.extend(detect_conflicts(model));
        let json = serde_json::to_string(&diagnostics).or_else(|e| fail(GqmsStatus::Panic, e.to_string()))?;
        put_string(json_out, json)
    })
}

/// The model in canonical source form.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gqms_model_format(model: *const GqmsModel, out: *mut *mut c_char) -> GqmsStatus {
    clear(out);
    guard(|| put_string(out, format_model(&handle(model, "model")?.0)))
}

/// Renders the model as `tree`, `dot` or `md`, without statuses.
///
/// # Safety
/// `model` must be a live handle; `format` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gqms_model_render(
    model: *const GqmsModel,
    format: *const c_char,
    out: *mut *mut c_char,
) -> GqmsStatus {
    clear(out);
    guard(|| {
        let model = &handle(model, "model")?.0;
        let format = parse_format(text(format, "format")?)?;
        put_string(out, render(model, None, &RenderOptions::new(format)))
    })
}

fn parse_format(name: &str) -> Attempt<Format> {
    name.parse()
        .or_else(|_| fail(GqmsStatus::InvalidArgument, format!("unknown format `{name}`")))
}

unsafe fn ingest(
    model: *const GqmsModel,
    data: *const c_char,
    out: *mut *mut GqmsDataset,
    read: fn(&str, &Model) -> Result<Dataset, Vec<gqms::IngestError>>,
) -> GqmsStatus {
    clear(out);
    guard(|| {
        let model = &handle(model, "model")?.0;
        match read(text(data, "data")?, model) {
            Ok(ds) => put(out, GqmsDataset(ds)),
            Err(errors) => {
                let lines: Vec<String> = errors.iter().map(ToString::to_string).collect();
                fail(GqmsStatus::IngestError, lines.join("\n"))
            }
        }
    })
}

/// Reads `metric,period,value` CSV, checked against the model's metrics.
///
/// # Safety
/// `model` must be a live handle; `csv` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gqms_dataset_from_csv(
    model: *const GqmsModel,
    csv: *const c_char,
    out: *mut *mut GqmsDataset,
) -> GqmsStatus {
    ingest(model, csv, out, ingest_csv)
}

/// Reads one JSON observation per line, checked against the model's metrics.
///
/// # Safety
/// `model` must be a live handle; `jsonl` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gqms_dataset_from_jsonl(
    model: *const GqmsModel,
    jsonl: *const c_char,
    out: *mut *mut GqmsDataset,
) -> GqmsStatus {
    ingest(model, jsonl, out, ingest_jsonl)
}

/// Union of two datasets. Fails with `MergeConflict` if they disagree on
/// any observation; the inputs are left untouched.
///
/// # Safety
/// `a` and `b` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gqms_dataset_merge(
    a: *const GqmsDataset,
    b: *const GqmsDataset,
    out: *mut *mut GqmsDataset,
) -> GqmsStatus {
    clear(out);
    guard(|| {
        let (a, b) = (&handle(a, "a")?.0, &handle(b, "b")?.0);
        match merge(a, b) {
            Ok(ds) => put(out, GqmsDataset(ds)),
            Err(conflicts) => {
                let lines: Vec<String> = conflicts.iter().map(ToString::to_string).collect();
                fail(GqmsStatus::MergeConflict, lines.join("\n"))
            }
        }
    })
}

/// Number of observations.
///
/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gqms_dataset_len(dataset: *const GqmsDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.0.len())
}

/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gqms_dataset_free(dataset: *mut GqmsDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Evaluates every goal at `period`. The report keeps its own copy of the
/// model, so both inputs may be freed afterwards.
///
/// # Safety
/// `model` and `dataset` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gqms_evaluate(
    model: *const GqmsModel,
    dataset: *const GqmsDataset,
    period: u32,
    out: *mut *mut GqmsReport,
) -> GqmsStatus {
    clear(out);
    guard(|| {
        let model = &handle(model, "model")?.0;
        let dataset = &handle(dataset, "dataset")?.0;
        match evaluate(model, dataset, period) {
            Ok(report) => put(
                out,
                GqmsReport {
                    model: model.clone(),
                    report,
                },
            ),
            Err(e) => fail(GqmsStatus::InvalidModel, e.to_string()),
        }
    })
}

/// Status of one goal.
///
/// # Safety
/// `report` must be a live handle; `goal` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gqms_report_goal_status(
    report: *const GqmsReport,
    goal: *const c_char,
    out: *mut GqmsGoalStatus,
) -> GqmsStatus {
    guard(|| {
        let report = &handle(report, "report")?.report;
        let goal = text(goal, "goal")?;
        if out.is_null() {
            return fail(GqmsStatus::InvalidArgument, "output pointer is null");
        }
        let Some(status) = report.status(goal) else {
            return fail(GqmsStatus::NotFound, format!("no goal `{goal}` in the report"));
        };
        *out = match status {
            GoalStatus::Satisfied => GqmsGoalStatus::Satisfied,
            GoalStatus::NotSatisfied => GqmsGoalStatus::NotSatisfied,
            GoalStatus::Undetermined => GqmsGoalStatus::Undetermined,
        };
        Ok(())
    })
}

/// Annotated explanation of one goal's verdict.
///
/// # Safety
/// `report` must be a live handle; `goal` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gqms_report_explain(
    report: *const GqmsReport,
    goal: *const c_char,
    out: *mut *mut c_char,
) -> GqmsStatus {
    clear(out);
    guard(|| {
        let report = &handle(report, "report")?.report;
        let goal = text(goal, "goal")?;
        match explain(report, goal) {
            Ok(e) => put_string(out, e.to_string()),
            Err(e) => fail(GqmsStatus::NotFound, e.to_string()),
        }
    })
}

/// Renders the model with this report's statuses as `tree`, `dot` or `md`.
///
/// # Safety
/// `report` must be a live handle; `format` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gqms_report_render(
    report: *const GqmsReport,
    format: *const c_char,
    out: *mut *mut c_char,
) -> GqmsStatus {
    clear(out);
    guard(|| {
        let r = handle(report, "report")?;
        let format = parse_format(text(format, "format")?)?;
        put_string(out, render(&r.model, Some(&r.report), &RenderOptions::new(format)))
    })
}

/// The whole report as JSON.
///
/// # Safety
/// `report` must be a live handle; `json_out` writable.
#[no_mangle]
pub unsafe extern "C" fn gqms_report_to_json(report: *const GqmsReport, json_out: *mut *mut c_char) -> GqmsStatus {
    clear(json_out);
    guard(|| {
        let report = &handle(report, "report")?.report;
        let json = serde_json::to_string(report).or_else(|e| fail(GqmsStatus::Panic, e.to_string()))?;
        put_string(json_out, json)
    })
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gqms_report_free(report: *mut GqmsReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn message() -> String {
        unsafe { CStr::from_ptr(gqms_last_error_message()) }
            .to_string_lossy()
            .into_owned()
    }

    #[test]
    fn panics_become_a_status() {
        assert_eq!(guard(|| panic!("boom")), GqmsStatus::Panic);
        assert_eq!(message(), "internal error");
        assert_eq!(guard(|| Ok(())), GqmsStatus::Ok);
        assert_eq!(message(), "");
    }

    #[test]
    fn interior_nul_is_replaced() {
        let mut out = ptr::null_mut();
        unsafe {
            put_string(&mut out, "a\0b".into()).ok().unwrap();
            assert_eq!(CStr::from_ptr(out).to_str().unwrap(), "a b");
            gqms_string_free(out);
        }
    }
}
