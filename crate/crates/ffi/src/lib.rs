//! C ABI for sensegan.
//!
//! Objects cross the boundary as opaque handles that the caller releases
//! with the matching `*_free` function. Every fallible call returns an
//! [`SgStatus`]; on failure a description is available from
//! [`sg_last_error`] on the same thread. Panics are caught and reported as
//! [`SgStatus::Panic`] instead of unwinding into the caller.
//!
//! The header `include/sensegan.h` is generated from this file at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use sensegan::classify::io::{read_classifier_file, write_classifier_file};
use sensegan::classify::{accuracy, train, Classifier, ClassifierKind, ClassifierParams};
use sensegan::nncore::TrainHyper;
use sensegan::pipelines::{run_augmentation, AugmentSpec, Method, SynthSize};
use sensegan::signalgen::siqd::{read_siqd_file, write_siqd_file};
use sensegan::signalgen::{generate_dataset, ChannelEnv, LabeledDataset, OfdmConfig};
use sensegan::{Error, Matrix};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    ShapeMismatch = 3,
    MalformedFile = 4,
    Config = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgClassifierKind {
    RandomForest = 0,
    SvmRbf = 1,
}

impl From<SgClassifierKind> for ClassifierKind {
    fn from(k: SgClassifierKind) -> Self {
        match k {
            SgClassifierKind::RandomForest => ClassifierKind::RandomForest,
            SgClassifierKind::SvmRbf => ClassifierKind::SvmRbf,
        }
    }
}

/// A labeled set of received frames.
pub struct SgDataset {
    inner: LabeledDataset,
}

/// A trained spectrum-sensing classifier.
pub struct SgClassifier {
    inner: Classifier,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(SgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidInput(_) => SgStatus::InvalidInput,
            Error::Shape(_) => SgStatus::ShapeMismatch,
            Error::Format(_) => SgStatus::MalformedFile,
            Error::Config(_) => SgStatus::Config,
            Error::Io(_) => SgStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SgStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SgStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            SgStatus::Panic
        }
    }
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(SgStatus::InvalidInput, "path is not valid UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn dataset_arg<'a>(p: *const SgDataset) -> Result<&'a LabeledDataset, Failure> {
    p.as_ref().map(|d| &d.inner).ok_or_else(|| null("dataset"))
}

unsafe fn classifier_arg<'a>(p: *const SgClassifier) -> Result<&'a Classifier, Failure> {
    p.as_ref().map(|c| &c.inner).ok_or_else(|| null("classifier"))
}

/// Message for the last failed call on this thread, or NULL if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Generates `n_samples` frames with the default OFDM settings, alternating
/// labels 0 and 1, through a Rayleigh channel with `n_taps` taps of total
/// variance `variance` at `snr_db`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn sg_dataset_generate(
    n_samples: usize,
    snr_db: f64,
    variance: f64,
    n_taps: usize,
    seed: u64,
    out: *mut *mut SgDataset,
) -> SgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let env = ChannelEnv { n_taps, variance, snr_db, ..ChannelEnv::default() };
        let inner = generate_dataset(n_samples, &OfdmConfig::default(), &env, seed)?;
        *out = Box::into_raw(Box::new(SgDataset { inner }));
        Ok(())
    })
}

/// Reads a SIQD file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_dataset_read(path: *const c_char, out: *mut *mut SgDataset) -> SgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let inner = read_siqd_file(&path_arg(path)?)?;
        *out = Box::into_raw(Box::new(SgDataset { inner }));
        Ok(())
    })
}

/// Writes a SIQD file atomically.
///
/// # Safety
/// `ds` must be a live dataset handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sg_dataset_write(ds: *const SgDataset, path: *const c_char) -> SgStatus {
    guard(|| Ok(write_siqd_file(dataset_arg(ds)?, &path_arg(path)?)?))
}

/// Number of frames, or 0 for a null handle.
///
/// # Safety
/// `ds` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn sg_dataset_len(ds: *const SgDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.inner.len())
}

/// Real features per frame (interleaved I and Q), or 0 for a null handle.
///
/// # Safety
/// `ds` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn sg_dataset_feature_len(ds: *const SgDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.inner.feature_len())
}

/// Copies the feature matrix, row-major, into `buf` of `len` doubles;
/// `len` must equal frames times features.
///
/// # Safety
/// `ds` must be a live dataset handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sg_dataset_features(ds: *const SgDataset, buf: *mut f64, len: usize) -> SgStatus {
    guard(|| {
        let d = dataset_arg(ds)?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let m = d.features();
        if m.as_slice().len() != len {
            return Err(Failure(
                SgStatus::ShapeMismatch,
                format!("buffer holds {len} values, features need {}", m.as_slice().len()),
            ));
        }
        ptr::copy_nonoverlapping(m.as_slice().as_ptr(), buf, len);
        Ok(())
    })
}

/// Copies the labels (0 or 1) into `buf` of `len` bytes; `len` must equal
/// the frame count.
///
/// # Safety
/// `ds` must be a live dataset handle; `buf` must hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn sg_dataset_labels(ds: *const SgDataset, buf: *mut u8, len: usize) -> SgStatus {
    guard(|| {
        let d = dataset_arg(ds)?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        if d.labels.len() != len {
            return Err(Failure(
                SgStatus::ShapeMismatch,
                format!("buffer holds {len} labels, dataset has {}", d.labels.len()),
            ));
        }
        ptr::copy_nonoverlapping(d.labels.as_ptr(), buf, len);
        Ok(())
    })
}

/// Releases a dataset. Null is ignored.
///
/// # Safety
/// `ds` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sg_dataset_free(ds: *mut SgDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Trains a classifier with default hyperparameters.
///
/// # Safety
/// `ds` must be a live dataset handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_classifier_train(
    kind: SgClassifierKind,
    ds: *const SgDataset,
    seed: u64,
    out: *mut *mut SgClassifier,
) -> SgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let d = dataset_arg(ds)?;
        let inner = train(kind.into(), &d.features(), &d.labels, &ClassifierParams::default(), seed)?;
        *out = Box::into_raw(Box::new(SgClassifier { inner }));
        Ok(())
    })
}

/// Predicts labels for `rows` feature rows of width `cols` stored row-major
/// in `features`, writing one byte per row to `labels`.
///
/// # Safety
/// `clf` must be a live handle; `features` must hold `rows * cols` doubles
/// and `labels` `rows` bytes.
#[no_mangle]
pub unsafe extern "C" fn sg_classifier_predict(
    clf: *const SgClassifier,
    features: *const f64,
    rows: usize,
    cols: usize,
    labels: *mut u8,
) -> SgStatus {
    guard(|| {
        let c = classifier_arg(clf)?;
        if rows == 0 {
            return Ok(());
        }
        if features.is_null() || labels.is_null() {
            return Err(null("features or labels"));
        }
        let n = rows.checked_mul(cols).ok_or_else(|| Failure(SgStatus::InvalidInput, "size overflow".into()))?;
        let x = Matrix::from_vec(rows, cols, std::slice::from_raw_parts(features, n).to_vec())?;
        let pred = c.predict(&x)?;
        ptr::copy_nonoverlapping(pred.as_ptr(), labels, rows);
        Ok(())
    })
}

/// Fraction of `ds` the classifier labels correctly.
///
/// # Safety
/// `clf` and `ds` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_classifier_accuracy(
    clf: *const SgClassifier,
    ds: *const SgDataset,
    out: *mut f64,
) -> SgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let d = dataset_arg(ds)?;
        *out = accuracy(classifier_arg(clf)?, &d.features(), &d.labels)?;
        Ok(())
    })
}

/// Writes an SCLF file atomically.
///
/// # Safety
/// `clf` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sg_classifier_save(clf: *const SgClassifier, path: *const c_char) -> SgStatus {
    guard(|| Ok(write_classifier_file(classifier_arg(clf)?, &path_arg(path)?)?))
}

/// Reads an SCLF file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_classifier_load(path: *const c_char, out: *mut *mut SgClassifier) -> SgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let inner = read_classifier_file(&path_arg(path)?)?;
        *out = Box::into_raw(Box::new(SgClassifier { inner }));
        Ok(())
    })
}

/// Releases a classifier. Null is ignored.
///
/// # Safety
/// `clf` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sg_classifier_free(clf: *mut SgClassifier) {
    if !clf.is_null() {
        drop(Box::from_raw(clf));
    }
}

/// Trains a CGAN on `train_ds` for `epochs` epochs, adds
/// `round(synth_multiplier * n_train)` label-balanced synthetic rows, and
/// scores a real-only and an augmented classifier on `test_ds`.
///
/// # Safety
/// `train_ds` and `test_ds` must be live handles; `baseline` and
/// `augmented` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_augment(
    train_ds: *const SgDataset,
    test_ds: *const SgDataset,
    kind: SgClassifierKind,
    synth_multiplier: f64,
    epochs: usize,
    seed: u64,
    baseline: *mut f64,
    augmented: *mut f64,
) -> SgStatus {
    guard(|| {
        let baseline = out_arg(baseline, "baseline")?;
        let augmented = out_arg(augmented, "augmented")?;
        let spec = AugmentSpec {
            synth: SynthSize::Multiplier(synth_multiplier),
            gan: TrainHyper { epochs, ..TrainHyper::default() },
            classifiers: vec![kind.into()],
            ..AugmentSpec::default()
        };
        let run = run_augmentation(dataset_arg(train_ds)?, dataset_arg(test_ds)?, &spec, seed)?;
        for r in &run.report.records {
            match r.method {
                Method::Baseline => *baseline = r.accuracy,
                _ => *augmented = r.accuracy,
            }
        }
        Ok(())
    })
}
