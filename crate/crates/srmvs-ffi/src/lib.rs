//! C ABI for the srmvs pipeline: point-cloud I/O, evaluation, and dataset
//! reconstruction behind opaque handles with integer status codes.
//!
//! Conventions: every fallible function returns [`SrmvsStatus`]; on failure
//! the thread-local message from [`srmvs_last_error_message`] explains what
//! went wrong. Handles are created and released strictly through this API.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use srmvs::error::Error;
use srmvs::eval::{evaluate, ScoreTable, DEFAULT_TOLERANCES_CM};
use srmvs::fusion::PointCloud;
use srmvs::io::{load_dataset, read_ply, write_ply};
use srmvs::pipeline::{reconstruct, PipelineConfig, ReconstructOptions};

/// Outcome of an FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrmvsStatus {
    Ok = 0,
    /// A pointer argument was null.
    NullPointer = 1,
    /// An argument value was rejected.
    InvalidArgument = 2,
    /// A referenced file or directory does not exist.
    NotFound = 3,
    /// A file exists but its contents are malformed.
    Format = 4,
    /// Input data violates a pipeline invariant.
    Validation = 5,
    /// Operating-system I/O failure.
    Io = 6,
    /// The implementation panicked; state may be inconsistent.
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(err: &Error) -> SrmvsStatus {
    match err {
        Error::InvalidArgument(_) => SrmvsStatus::InvalidArgument,
        Error::NotFound(_) => SrmvsStatus::NotFound,
        Error::Format { .. } => SrmvsStatus::Format,
        Error::Validation(_) => SrmvsStatus::Validation,
        Error::Io { .. } => SrmvsStatus::Io,
    }
}

fn fail(err: Error) -> SrmvsStatus {
    let code = status_of(&err);
    set_error(err.to_string());
    code
}

/// Runs `f`, converting errors and panics into status codes.
fn guarded(f: impl FnOnce() -> Result<(), Error>) -> SrmvsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SrmvsStatus::Ok
        }
        Ok(Err(e)) => fail(e),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal panic: {msg}"));
            SrmvsStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be a valid NUL-terminated UTF-8 string.
unsafe fn path_arg<'a>(ptr: *const c_char) -> Result<&'a Path, Error> {
    if ptr.is_null() {
        return Err(Error::invalid("null path"));
    }
    let s = CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| Error::invalid("path is not valid UTF-8"))?;
    Ok(Path::new(s))
}

/// Opaque 3D point cloud handle.
pub struct SrmvsPointCloud(PointCloud);

/// Opaque accuracy/completeness/F1 score table handle.
pub struct SrmvsScores(ScoreTable);

/// Copies the most recent error message of the calling thread into `buf`
/// (NUL-terminated, truncated to `len` bytes) and returns the full message
/// length in bytes, excluding the NUL. `buf` may be null to query the
/// length only.
///
/// # Safety
/// `buf`, when non-null, must point to at least `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn srmvs_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Reads a PLY point cloud (ASCII or binary little-endian) from `path`.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be a valid
/// pointer. On success `*out` owns a new handle.
#[no_mangle]
pub unsafe extern "C" fn srmvs_point_cloud_load(
    path: *const c_char,
    out: *mut *mut SrmvsPointCloud,
) -> SrmvsStatus {
    if out.is_null() {
        set_error("null output pointer");
        return SrmvsStatus::NullPointer;
    }
    guarded(|| {
        let cloud = read_ply(path_arg(path)?)?;
        *out = Box::into_raw(Box::new(SrmvsPointCloud(cloud)));
        Ok(())
    })
}

/// Writes a point cloud to `path` as binary little-endian PLY.
///
/// # Safety
/// `cloud` must be a live handle from this API; `path` must be a valid
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn srmvs_point_cloud_save(
    cloud: *const SrmvsPointCloud,
    path: *const c_char,
) -> SrmvsStatus {
    let Some(cloud) = cloud.as_ref() else {
        set_error("null cloud handle");
        return SrmvsStatus::NullPointer;
    };
    guarded(|| write_ply(path_arg(path)?, &cloud.0))
}

/// Number of points in the cloud; 0 for a null handle.
///
/// # Safety
/// `cloud` must be null or a live handle from this API.
#[no_mangle]
pub unsafe extern "C" fn srmvs_point_cloud_len(cloud: *const SrmvsPointCloud) -> usize {
    cloud.as_ref().map_or(0, |c| c.0.len())
}

/// Copies point `index` into `xyz[3]` (world coordinates, meters).
///
/// # Safety
/// `cloud` must be a live handle; `xyz` must point to 3 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn srmvs_point_cloud_get_point(
    cloud: *const SrmvsPointCloud,
    index: usize,
    xyz: *mut f64,
) -> SrmvsStatus {
    let Some(cloud) = cloud.as_ref() else {
        set_error("null cloud handle");
        return SrmvsStatus::NullPointer;
    };
    if xyz.is_null() {
        set_error("null output pointer");
        return SrmvsStatus::NullPointer;
    }
    guarded(|| {
        let p = cloud
            .0
            .points
            .get(index)
            .ok_or_else(|| Error::invalid(format!("point index {index} out of range")))?;
        std::ptr::copy_nonoverlapping([p.x, p.y, p.z].as_ptr(), xyz, 3);
        Ok(())
    })
}

/// Releases a point-cloud handle. Null is a no-op.
///
/// # Safety
/// `cloud` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn srmvs_point_cloud_free(cloud: *mut SrmvsPointCloud) {
    if !cloud.is_null() {
        drop(Box::from_raw(cloud));
    }
}

/// Scores `rec` against ground truth `gt` at `n_tolerances` distance
/// tolerances in centimeters; pass `tolerances_cm = NULL` for the default
/// sweep {1, 2, 5, 10, 20, 50}.
///
/// # Safety
/// `rec` and `gt` must be live handles; `tolerances_cm`, when non-null,
/// must point to `n_tolerances` doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn srmvs_evaluate(
    rec: *const SrmvsPointCloud,
    gt: *const SrmvsPointCloud,
    tolerances_cm: *const f64,
    n_tolerances: usize,
    out: *mut *mut SrmvsScores,
) -> SrmvsStatus {
    let (Some(rec), Some(gt)) = (rec.as_ref(), gt.as_ref()) else {
        set_error("null cloud handle");
        return SrmvsStatus::NullPointer;
    };
    if out.is_null() {
        set_error("null output pointer");
        return SrmvsStatus::NullPointer;
    }
    let tolerances: Vec<f64> = if tolerances_cm.is_null() {
        DEFAULT_TOLERANCES_CM.to_vec()
    } else {
        std::slice::from_raw_parts(tolerances_cm, n_tolerances).to_vec()
    };
    guarded(|| {
        let table = evaluate(&rec.0, &gt.0, &tolerances)?;
        *out = Box::into_raw(Box::new(SrmvsScores(table)));
        Ok(())
    })
}

/// Number of tolerance rows in a score table; 0 for a null handle.
///
/// # Safety
/// `scores` must be null or a live handle from this API.
#[no_mangle]
pub unsafe extern "C" fn srmvs_scores_row_count(scores: *const SrmvsScores) -> usize {
    scores.as_ref().map_or(0, |s| s.0.rows.len())
}

/// Copies row `index` as {tau_cm, accuracy, completeness, f1} into `row[4]`.
///
/// # Safety
/// `scores` must be a live handle; `row` must point to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn srmvs_scores_get_row(
    scores: *const SrmvsScores,
    index: usize,
    row: *mut f64,
) -> SrmvsStatus {
    let Some(scores) = scores.as_ref() else {
        set_error("null scores handle");
        return SrmvsStatus::NullPointer;
    };
    if row.is_null() {
        set_error("null output pointer");
        return SrmvsStatus::NullPointer;
    }
    guarded(|| {
        let r = scores
            .0
            .rows
            .get(index)
            .ok_or_else(|| Error::invalid(format!("row index {index} out of range")))?;
        std::ptr::copy_nonoverlapping([r.tau_cm, r.accuracy, r.completeness, r.f1].as_ptr(), row, 4);
        Ok(())
    })
}

/// Releases a score-table handle. Null is a no-op.
///
/// # Safety
/// `scores` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn srmvs_scores_free(scores: *mut SrmvsScores) {
    if !scores.is_null() {
        drop(Box::from_raw(scores));
    }
}

/// Loads the dataset at `dir` (cameras.txt plus images) and reconstructs a
/// dense point cloud with default settings, `seed`, and `jobs` worker
/// threads (0 = automatic).
///
/// # Safety
/// `dir` must be a valid NUL-terminated string; `out` must be a valid
/// pointer. On success `*out` owns a new handle.
#[no_mangle]
pub unsafe extern "C" fn srmvs_reconstruct_dataset(
    dir: *const c_char,
    seed: u64,
    jobs: usize,
    out: *mut *mut SrmvsPointCloud,
) -> SrmvsStatus {
    if out.is_null() {
        set_error("null output pointer");
        return SrmvsStatus::NullPointer;
    }
    guarded(|| {
        let (dataset, _warnings) = load_dataset(path_arg(dir)?)?;
        let cfg = PipelineConfig::default();
        let opts = ReconstructOptions {
            seed,
            jobs,
            ..Default::default()
        };
        let rec = reconstruct(&dataset.views, &cfg, &opts)?;
        *out = Box::into_raw(Box::new(SrmvsPointCloud(rec.cloud)));
        Ok(())
    })
}
