//! C ABI for the rrules library.
//!
//! Every fallible function returns an [`RrStatus`]; on failure a message is
//! available from [`rr_last_error`] on the same thread. Handles are opaque
//! and owned by the caller, who releases them with the matching `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rrules::dataset::{discretize_numeric, encode_categorical, fixture, split, RawTable};
use rrules::metrics::MetricsReport;
use rrules::{induce, verify_ruleset, Algorithm, ClassColumn, Dataset, Error, RuleSet, Schema, SplitSpec};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    Undefined = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RrAlgorithm {
    Rules = 0,
    Rrules = 1,
}

/// Metrics of a rule set. `test_accuracy` is NaN and `default_rule_uses`
/// is 0 when no test set was given.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RrMetrics {
    pub n_rules: usize,
    pub mean_precision: f64,
    pub overall_coverage: f64,
    pub test_accuracy: f64,
    pub default_rule_uses: usize,
}

/// Opaque dataset handle.
pub struct RrDataset(Dataset);

/// Opaque rule-set handle.
pub struct RrRuleSet {
    rules: RuleSet,
    schema: std::sync::Arc<Schema>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RrStatus {
    match e {
        Error::InvalidArgument(_) => RrStatus::InvalidArgument,
        Error::Undefined(_) => RrStatus::Undefined,
        Error::Io(_) => RrStatus::Io,
        _ => RrStatus::Parse,
    }
}

struct Failure(RrStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(RrStatus::NullPointer, format!("{what} is null"))
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(RrStatus::InvalidArgument, message.into())
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> RrStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => RrStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RrStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads a CSV file. `class_column` is "first", "last", a zero-based index
/// or a header name; NULL means "last". Numeric columns with more than
/// `n_bins` distinct values are binned; `n_bins == 0` keeps every column
/// categorical.
///
/// # Safety
/// `path` and a non-NULL `class_column` must be NUL-terminated strings;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rr_dataset_load_csv(
    path: *const c_char,
    has_header: bool,
    class_column: *const c_char,
    n_bins: usize,
    out: *mut *mut RrDataset,
) -> RrStatus {
    guard(|| {
        let out = self::out(out, "out")?;
        let path = str_arg(path, "path")?;
        let class_column: ClassColumn = if class_column.is_null() {
            ClassColumn::Last
        } else {
            str_arg(class_column, "class_column")?.parse()?
        };
        let file = File::open(path).map_err(|e| Failure(RrStatus::Io, format!("{path}: {e}")))?;
        let table = RawTable::read(BufReader::new(file), has_header, &class_column)?;
        let dataset = if n_bins == 0 {
            encode_categorical(&table)?
        } else {
            discretize_numeric(&table, n_bins)?.0
        };
        *out = Box::into_raw(Box::new(RrDataset(dataset)));
        Ok(())
    })
}

/// Loads a built-in dataset by name ("toy").
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rr_dataset_fixture(name: *const c_char, out: *mut *mut RrDataset) -> RrStatus {
    guard(|| {
        let out = self::out(out, "out")?;
        let name = str_arg(name, "name")?;
        let dataset = fixture(name).ok_or_else(|| invalid(format!("unknown fixture {name:?}")))?;
        *out = Box::into_raw(Box::new(RrDataset(dataset)));
        Ok(())
    })
}

/// # Safety
/// `dataset` must be a live handle; the out pointers must be writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn rr_dataset_shape(
    dataset: *const RrDataset,
    rows: *mut usize,
    attributes: *mut usize,
    classes: *mut usize,
) -> RrStatus {
    guard(|| {
        let d = &handle(dataset, "dataset")?.0;
        if let Some(r) = rows.as_mut() {
            *r = d.len();
        }
        if let Some(a) = attributes.as_mut() {
            *a = d.n_attributes();
        }
        if let Some(c) = classes.as_mut() {
            *c = d.schema().n_classes();
        }
        Ok(())
    })
}

/// Class index of row `row`.
///
/// # Safety
/// `dataset` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rr_dataset_class_of(dataset: *const RrDataset, row: usize, out: *mut usize) -> RrStatus {
    guard(|| {
        let d = &handle(dataset, "dataset")?.0;
        let out = self::out(out, "out")?;
        if row >= d.len() {
            return Err(invalid(format!("row {row} out of range")));
        }
        *out = d.class_of(row);
        Ok(())
    })
}

/// Name of class `index` as a new string; release it with [`rr_string_free`].
///
/// # Safety
/// `dataset` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rr_dataset_class_name(
    dataset: *const RrDataset,
    index: usize,
    out: *mut *mut c_char,
) -> RrStatus {
    guard(|| {
        let schema = handle(dataset, "dataset")?.0.schema();
        let out = self::out(out, "out")?;
        if index >= schema.n_classes() {
            return Err(invalid(format!("class {index} out of range")));
        }
        *out = c_string(schema.class_name(index).to_string());
        Ok(())
    })
}

/// Seeded train/test split; both parts share the parent's encoding.
///
/// # Safety
/// `dataset` must be a live handle; `train` and `test` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rr_dataset_split(
    dataset: *const RrDataset,
    test_fraction: f64,
    seed: u64,
    train: *mut *mut RrDataset,
    test: *mut *mut RrDataset,
) -> RrStatus {
    guard(|| {
        let d = &handle(dataset, "dataset")?.0;
        let train = out(train, "train")?;
        let test = out(test, "test")?;
        let (a, b) = split(d, &SplitSpec { test_fraction, seed })?;
        *train = Box::into_raw(Box::new(RrDataset(a)));
        *test = Box::into_raw(Box::new(RrDataset(b)));
        Ok(())
    })
}

/// # Safety
/// `dataset` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rr_dataset_free(dataset: *mut RrDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// # Safety
/// `train` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rr_induce(
    train: *const RrDataset,
    algorithm: RrAlgorithm,
    out: *mut *mut RrRuleSet,
) -> RrStatus {
    guard(|| {
        let d = &handle(train, "train")?.0;
        let out = self::out(out, "out")?;
        let algorithm = match algorithm {
            RrAlgorithm::Rules => Algorithm::Rules,
            RrAlgorithm::Rrules => Algorithm::Rrules,
        };
        let (rules, _) = induce(algorithm, d);
        *out = Box::into_raw(Box::new(RrRuleSet {
            rules,
            schema: d.shared_schema().clone(),
        }));
        Ok(())
    })
}

/// # Safety
/// `rules` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rr_ruleset_len(rules: *const RrRuleSet, out: *mut usize) -> RrStatus {
    guard(|| {
        *self::out(out, "out")? = handle(rules, "rules")?.rules.len();
        Ok(())
    })
}

/// Predicts the class of row `row` of `dataset`, which must share the
/// training set's encoding (the training set itself or a split of it).
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rr_ruleset_predict_row(
    rules: *const RrRuleSet,
    dataset: *const RrDataset,
    row: usize,
    out: *mut usize,
) -> RrStatus {
    guard(|| {
        let rs = handle(rules, "rules")?;
        let d = &handle(dataset, "dataset")?.0;
        let out = self::out(out, "out")?;
        if row >= d.len() {
            return Err(invalid(format!("row {row} out of range")));
        }
        *out = rs.rules.predict(d.row(row))?;
        Ok(())
    })
}

/// Predicts the class of an example given as `n` attribute value indices.
///
/// # Safety
/// `values` must point to `n` readable elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rr_ruleset_predict(
    rules: *const RrRuleSet,
    values: *const usize,
    n: usize,
    out: *mut usize,
) -> RrStatus {
    guard(|| {
        let rs = handle(rules, "rules")?;
        let out = self::out(out, "out")?;
        if values.is_null() {
            return Err(null("values"));
        }
        let example = std::slice::from_raw_parts(values, n);
        *out = rs.rules.predict(example)?;
        Ok(())
    })
}

/// Rules as text, one per line, followed by the default class. Release the
/// string with [`rr_string_free`].
///
/// # Safety
/// `rules` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rr_ruleset_dump(rules: *const RrRuleSet, out: *mut *mut c_char) -> RrStatus {
    guard(|| {
        let rs = handle(rules, "rules")?;
        *self::out(out, "out")? = c_string(rs.rules.dump(&rs.schema));
        Ok(())
    })
}

/// Rules as a JSON document. Release the string with [`rr_string_free`].
///
/// # Safety
/// `rules` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rr_ruleset_json(rules: *const RrRuleSet, out: *mut *mut c_char) -> RrStatus {
    guard(|| {
        let rs = handle(rules, "rules")?;
        let out = self::out(out, "out")?;
        let json = serde_json::to_string(&rs.rules.export(&rs.schema))
            .map_err(|e| Failure(RrStatus::Panic, e.to_string()))?;
        *out = c_string(json);
        Ok(())
    })
}

/// Training precision and coverage, plus test accuracy when `test` is not
/// NULL. No timing is measured.
///
/// # Safety
/// `rules` and `train` must be live handles, `test` a live handle or NULL;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rr_metrics(
    rules: *const RrRuleSet,
    train: *const RrDataset,
    test: *const RrDataset,
    out: *mut RrMetrics,
) -> RrStatus {
    guard(|| {
        let rs = handle(rules, "rules")?;
        let train = &handle(train, "train")?.0;
        let test = test.as_ref().map(|t| &t.0);
        let out = self::out(out, "out")?;
        let report = MetricsReport::compute(&rs.rules, train, test, None)?;
        *out = RrMetrics {
            n_rules: report.n_rules,
            mean_precision: report.mean_precision,
            overall_coverage: report.overall_coverage,
            test_accuracy: report.test_accuracy.unwrap_or(f64::NAN),
            default_rule_uses: report.default_rule_uses.unwrap_or(0),
        };
        Ok(())
    })
}

/// Checks rule purity and coverage of every training row, and for RRULES
/// that each rule classified a new row. `violations` receives the number
/// of problems found.
///
/// # Safety
/// Handles must be live; `passed` and `violations` must be writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn rr_verify(
    rules: *const RrRuleSet,
    train: *const RrDataset,
    passed: *mut bool,
    violations: *mut usize,
) -> RrStatus {
    guard(|| {
        let rs = handle(rules, "rules")?;
        let train = &handle(train, "train")?.0;
        let report = verify_ruleset(&rs.rules, train);
        if let Some(p) = passed.as_mut() {
            *p = report.passed();
        }
        if let Some(v) = violations.as_mut() {
            *v = report.violations.len();
        }
        Ok(())
    })
}

/// # Safety
/// `rules` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rr_ruleset_free(rules: *mut RrRuleSet) {
    if !rules.is_null() {
        drop(Box::from_raw(rules));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
