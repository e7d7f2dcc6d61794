//! C ABI over the flowsel library.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free` function. Every fallible call returns a
//! [`FlowselStatus`]; on failure a message is kept per thread and can be read
//! with [`flowsel_last_error`]. Output buffers are caller-allocated; when one
//! is too small the call fails with `FLOWSEL_STATUS_BUFFER_TOO_SMALL` and
//! reports the required length.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use flowsel::classify::{self, Algorithm, Hyperparams, TrainedModel};
use flowsel::eval::ConfusionMatrix;
use flowsel::fselect::{self, ScoreMatrix};
use flowsel::tabular::{self, CategoryMapping, Column, Table};
use flowsel::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowselStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Data = 5,
    Training = 6,
    Mismatch = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// A table plus the category codes of its text columns.
pub struct FlowselTable {
    table: Table,
    mapping: CategoryMapping,
}

/// Normalized, aggregated feature scores.
pub struct FlowselScores {
    scores: ScoreMatrix,
}

pub struct FlowselModel {
    model: TrainedModel,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FlowselMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FlowselStatus {
    match e {
        Error::Io { .. } => FlowselStatus::Io,
        Error::Csv { .. } | Error::Json(_) => FlowselStatus::Parse,
        Error::Training { .. } => FlowselStatus::Training,
        Error::ManifestMismatch { .. } | Error::WidthMismatch { .. } => FlowselStatus::Mismatch,
        Error::Config(_) | Error::Hyperparams(_) => FlowselStatus::InvalidArgument,
        Error::Stage { source, .. } | Error::Context { source, .. } => status_of(source),
        _ => FlowselStatus::Data,
    }
}

enum Failure {
    Status(FlowselStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn fail<T>(status: FlowselStatus, msg: impl Into<String>) -> std::result::Result<T, Failure> {
    Err(Failure::Status(status, msg.into()))
}

/// Runs `f`, records any error and converts panics into `FLOWSEL_STATUS_PANIC`.
fn guard(f: impl FnOnce() -> Outcome) -> FlowselStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FlowselStatus::Ok,
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Failure::Lib(e))) => {
            let s = status_of(&e);
            set_error(e.to_string());
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            FlowselStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> std::result::Result<&'a str, Failure> {
    if p.is_null() {
        return fail(FlowselStatus::NullPointer, format!("{what} is null"));
    }
    CStr::from_ptr(p).to_str().or_else(|_| {
        fail(
            FlowselStatus::InvalidArgument,
            format!("{what} is not UTF-8"),
        )
    })
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> std::result::Result<&'a T, Failure> {
    p.as_ref().map_or_else(
        || fail(FlowselStatus::NullPointer, format!("{what} is null")),
        Ok,
    )
}

fn out_arg<T>(p: *mut T, what: &str) -> std::result::Result<*mut T, Failure> {
    if p.is_null() {
        fail(FlowselStatus::NullPointer, format!("{what} is null"))
    } else {
        Ok(p)
    }
}

/// Copies `s` plus a terminating NUL into `buf`; `needed` receives the
/// length including the NUL.
unsafe fn write_string(s: &str, buf: *mut c_char, cap: usize, needed: *mut usize) -> Outcome {
    let len = s.len() + 1;
    if !needed.is_null() {
        *needed = len;
    }
    if buf.is_null() || cap < len {
        return fail(
            FlowselStatus::BufferTooSmall,
            format!("buffer holds {cap} bytes, {len} needed"),
        );
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf as *mut u8, s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn flowsel_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn flowsel_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Reads a CSV file. Text columns are coded lexicographically.
///
/// # Safety
/// `path` and `label_column` are NUL-terminated strings; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn flowsel_table_load_csv(
    path: *const c_char,
    label_column: *const c_char,
    out: *mut *mut FlowselTable,
) -> FlowselStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let path = str_arg(path, "path")?;
        let label = str_arg(label_column, "label_column")?;
        let loaded = tabular::load_csv(path, label)?;
        *out = boxed(FlowselTable {
            table: loaded.table,
            mapping: loaded.mapping,
        });
        Ok(())
    })
}

/// Builds a binary table from row-major feature values and 0/1 labels.
///
/// # Safety
/// `values` holds `rows * features` doubles, `names` holds `features`
/// NUL-terminated strings, `labels` holds `rows` bytes.
#[no_mangle]
pub unsafe extern "C" fn flowsel_table_from_rows(
    values: *const f64,
    rows: usize,
    features: usize,
    names: *const *const c_char,
    labels: *const u8,
    out: *mut *mut FlowselTable,
) -> FlowselStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        if (values.is_null() && rows * features > 0) || names.is_null() || labels.is_null() {
            return fail(
                FlowselStatus::NullPointer,
                "values, names or labels is null",
            );
        }
        let values = if rows * features == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(values, rows * features)
        };
        let names = std::slice::from_raw_parts(names, features);
        let labels = std::slice::from_raw_parts(labels, rows);
        let mut columns = Vec::with_capacity(features + 1);
        for (j, &name) in names.iter().enumerate() {
            let name = str_arg(name, "feature name")?;
            let col: Vec<f64> = (0..rows).map(|r| values[r * features + j]).collect();
            columns.push(Column::numeric(name, col));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l > 1) {
            return fail(
                FlowselStatus::InvalidArgument,
                format!("label {bad} is not 0 or 1"),
            );
        }
        columns.push(Column::label(
            "Label",
            labels.iter().map(|&l| l as f64).collect(),
        ));
        *out = boxed(FlowselTable {
            table: Table::new(columns)?,
            mapping: CategoryMapping::default(),
        });
        Ok(())
    })
}

/// # Safety
/// `table` is a live handle; `rows` and `features` are writable.
#[no_mangle]
pub unsafe extern "C" fn flowsel_table_shape(
    table: *const FlowselTable,
    rows: *mut usize,
    features: *mut usize,
) -> FlowselStatus {
    guard(|| {
        let t = &ref_arg(table, "table")?.table;
        *out_arg(rows, "rows")? = t.row_count();
        *out_arg(features, "features")? = t.feature_count();
        Ok(())
    })
}

/// Drops non-finite and negative rows and single-valued columns, then
/// min-max normalizes every feature. The input handle is left untouched.
///
/// # Safety
/// `table` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn flowsel_table_clean(
    table: *const FlowselTable,
    out: *mut *mut FlowselTable,
) -> FlowselStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let src = ref_arg(table, "table")?;
        let (t, _) = tabular::drop_invalid_rows(&src.table);
        let (t, _) = tabular::drop_single_valued_columns(&t);
        let t = tabular::minmax_normalize(&t)?;
        *out = boxed(FlowselTable {
            table: t,
            mapping: src.mapping.clone(),
        });
        Ok(())
    })
}

/// Keeps the rows labelled `benign` or `attack` and binarizes the label
/// (benign 0, attack 1).
///
/// # Safety
/// `table` is a live handle; the labels are NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn flowsel_table_binarize(
    table: *const FlowselTable,
    benign: *const c_char,
    attack: *const c_char,
    out: *mut *mut FlowselTable,
) -> FlowselStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let src = ref_arg(table, "table")?;
        let benign = str_arg(benign, "benign")?;
        let attack = str_arg(attack, "attack")?.to_string();
        let mut split = tabular::split_by_attack(
            &src.table,
            &src.mapping,
            benign,
            std::slice::from_ref(&attack),
        )?;
        *out = boxed(FlowselTable {
            table: split.tables.remove(&attack).expect("attack present"),
            mapping: src.mapping.clone(),
        });
        Ok(())
    })
}

/// Projection onto the given feature indices, in the given order.
///
/// # Safety
/// `table` is a live handle; `indices` holds `count` entries.
#[no_mangle]
pub unsafe extern "C" fn flowsel_table_select(
    table: *const FlowselTable,
    indices: *const usize,
    count: usize,
    out: *mut *mut FlowselTable,
) -> FlowselStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let src = ref_arg(table, "table")?;
        if indices.is_null() && count > 0 {
            return fail(FlowselStatus::NullPointer, "indices is null");
        }
        let indices = if count == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(indices, count)
        };
        let names = src.table.feature_names();
        let mut picked = Vec::with_capacity(count);
        for &i in indices {
            match names.get(i) {
                Some(n) => picked.push(n.clone()),
                None => {
                    return fail(
                        FlowselStatus::InvalidArgument,
                        format!("feature index {i} out of range ({} features)", names.len()),
                    )
                }
            }
        }
        *out = boxed(FlowselTable {
            table: src.table.select_features(&picked)?,
            mapping: src.mapping.clone(),
        });
        Ok(())
    })
}

/// # Safety
/// `table` is NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn flowsel_table_free(table: *mut FlowselTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Scores every feature of a cleaned binary table with all six methods and
/// aggregates the normalized scores. `relief_m` 0 means `min(rows, 5000)`.
///
/// # Safety
/// `table` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn flowsel_scores_compute(
    table: *const FlowselTable,
    bins: usize,
    relief_m: usize,
    seed: u64,
    out: *mut *mut FlowselScores,
) -> FlowselStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let t = &ref_arg(table, "table")?.table;
        let n = t.row_count();
        let m = if relief_m == 0 {
            fselect::relief::default_sample_size(n)
        } else {
            relief_m
        }
        .min(n);
        let (scores, _) = fselect::rank_features(t, bins, m, seed)?;
        *out = boxed(FlowselScores { scores });
        Ok(())
    })
}

/// Mean scores in feature order; `count` receives the feature count.
///
/// # Safety
/// `scores` is a live handle; `buf` holds `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn flowsel_scores_mean(
    scores: *const FlowselScores,
    buf: *mut f64,
    cap: usize,
    count: *mut usize,
) -> FlowselStatus {
    guard(|| {
        let s = &ref_arg(scores, "scores")?.scores;
        let n = s.features.len();
        *out_arg(count, "count")? = n;
        if buf.is_null() || cap < n {
            return fail(
                FlowselStatus::BufferTooSmall,
                format!("{n} scores, room for {cap}"),
            );
        }
        for (i, f) in s.features.iter().enumerate() {
            *buf.add(i) = f.mean_score.unwrap_or(0.0);
        }
        Ok(())
    })
}

/// Indices of features scoring at least `threshold`, best first.
///
/// # Safety
/// `scores` is a live handle; `buf` holds `cap` entries.
#[no_mangle]
pub unsafe extern "C" fn flowsel_scores_select(
    scores: *const FlowselScores,
    threshold: f64,
    buf: *mut usize,
    cap: usize,
    count: *mut usize,
) -> FlowselStatus {
    guard(|| {
        let s = &ref_arg(scores, "scores")?.scores;
        let sel = fselect::select_by_threshold(s, threshold)?;
        let n = sel.features.len();
        *out_arg(count, "count")? = n;
        if n > 0 && (buf.is_null() || cap < n) {
            return fail(
                FlowselStatus::BufferTooSmall,
                format!("{n} indices, room for {cap}"),
            );
        }
        for (i, f) in sel.features.iter().enumerate() {
            *buf.add(i) = f.index;
        }
        Ok(())
    })
}

/// The score table as CSV text.
///
/// # Safety
/// `scores` is a live handle; `buf` holds `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn flowsel_scores_csv(
    scores: *const FlowselScores,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> FlowselStatus {
    guard(|| {
        let s = &ref_arg(scores, "scores")?.scores;
        write_string(&s.to_csv()?, buf, cap, needed)
    })
}

/// # Safety
/// `scores` is NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn flowsel_scores_free(scores: *mut FlowselScores) {
    if !scores.is_null() {
        drop(Box::from_raw(scores));
    }
}

/// Trains a classifier. `algorithm` is one of `logistic`, `naive_bayes`,
/// `svm`, `tree`, `forest`. `params_json` is NULL for defaults or a JSON
/// object of that algorithm's settings, e.g. `{"tree_count": 25}`.
///
/// # Safety
/// `table` is a live handle; strings are NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn flowsel_model_train(
    table: *const FlowselTable,
    algorithm: *const c_char,
    params_json: *const c_char,
    out: *mut *mut FlowselModel,
) -> FlowselStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let t = &ref_arg(table, "table")?.table;
        let algorithm: Algorithm = str_arg(algorithm, "algorithm")?.parse()?;
        let hp = if params_json.is_null() {
            Hyperparams::default_for(algorithm)
        } else {
            let mut v: serde_json::Value =
                serde_json::from_str(str_arg(params_json, "params_json")?).map_err(Error::from)?;
            let Some(obj) = v.as_object_mut() else {
                return fail(
                    FlowselStatus::InvalidArgument,
                    "params_json must be an object",
                );
            };
            obj.insert("algorithm".into(), algorithm.tag().into());
            serde_json::from_value(v).map_err(|e| Error::Hyperparams(e.to_string()))?
        };
        *out = boxed(FlowselModel {
            model: classify::train(t, &hp)?,
        });
        Ok(())
    })
}

/// # Safety
/// `model` is a live handle; `buf` holds `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn flowsel_model_to_json(
    model: *const FlowselModel,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> FlowselStatus {
    guard(|| {
        let m = &ref_arg(model, "model")?.model;
        write_string(&m.to_json()?, buf, cap, needed)
    })
}

/// # Safety
/// `json` is NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn flowsel_model_from_json(
    json: *const c_char,
    out: *mut *mut FlowselModel,
) -> FlowselStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let model = TrainedModel::from_json(str_arg(json, "json")?)?;
        *out = boxed(FlowselModel { model });
        Ok(())
    })
}

/// # Safety
/// `model` is a live handle; `path` is NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn flowsel_model_save(
    model: *const FlowselModel,
    path: *const c_char,
) -> FlowselStatus {
    guard(|| {
        let m = &ref_arg(model, "model")?.model;
        m.save(str_arg(path, "path")?)?;
        Ok(())
    })
}

/// # Safety
/// `path` is NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn flowsel_model_load(
    path: *const c_char,
    out: *mut *mut FlowselModel,
) -> FlowselStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let model = TrainedModel::load(str_arg(path, "path")?)?;
        *out = boxed(FlowselModel { model });
        Ok(())
    })
}

/// Predicts every row of `table`, whose features must match the model's
/// manifest exactly. `classes` and `scores` (either may be NULL) hold `cap`
/// entries; `count` receives the row count.
///
/// # Safety
/// Handles are live; buffers hold `cap` entries when non-NULL.
#[no_mangle]
pub unsafe extern "C" fn flowsel_model_predict(
    model: *const FlowselModel,
    table: *const FlowselTable,
    classes: *mut u8,
    scores: *mut f64,
    cap: usize,
    count: *mut usize,
) -> FlowselStatus {
    guard(|| {
        let m = &ref_arg(model, "model")?.model;
        let t = &ref_arg(table, "table")?.table;
        let n = t.row_count();
        *out_arg(count, "count")? = n;
        if cap < n {
            return fail(
                FlowselStatus::BufferTooSmall,
                format!("{n} rows, room for {cap}"),
            );
        }
        let preds = classify::predict(m, t)?;
        for (i, p) in preds.iter().enumerate() {
            if !classes.is_null() {
                *classes.add(i) = p.class;
            }
            if !scores.is_null() {
                *scores.add(i) = p.score;
            }
        }
        Ok(())
    })
}

/// Predicts one row given in manifest order.
///
/// # Safety
/// `model` is a live handle; `row` holds `len` doubles; outputs are writable.
#[no_mangle]
pub unsafe extern "C" fn flowsel_model_predict_row(
    model: *const FlowselModel,
    row: *const f64,
    len: usize,
    class: *mut u8,
    score: *mut f64,
) -> FlowselStatus {
    guard(|| {
        let m = &ref_arg(model, "model")?.model;
        if row.is_null() && len > 0 {
            return fail(FlowselStatus::NullPointer, "row is null");
        }
        let row = if len == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(row, len)
        };
        let p = m.predict_row(row)?;
        *out_arg(class, "class")? = p.class;
        *out_arg(score, "score")? = p.score;
        Ok(())
    })
}

/// # Safety
/// `model` is NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn flowsel_model_free(model: *mut FlowselModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Accuracy, precision, recall and F1 from confusion counts, attack
/// positive. Undefined ratios are 0.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn flowsel_metrics(
    tp: u64,
    fp: u64,
    fn_: u64,
    tn: u64,
    out: *mut FlowselMetrics,
) -> FlowselStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let m = ConfusionMatrix::new(tp, fp, fn_, tn).metrics()?;
        *out = FlowselMetrics {
            accuracy: m.accuracy,
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
        };
        Ok(())
    })
}
