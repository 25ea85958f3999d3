//! Multi-view stereo reconstruction with a super-resolution front end.
//!
//! The library covers the full pipeline: bicubic super-resolution of
//! calibrated image sets (`sisr`), PatchMatch depth estimation
//! (`patchmatch`), speckle filtering (`speckle`), geometric fusion into a
//! point cloud (`fusion`), accuracy/completeness/F1 scoring against
//! ground truth (`eval`), synthetic benchmark scenes (`synth`), file
//! formats (`io`), and orchestration plus the LR/BC/EXT/HR comparison
//! experiment (`pipeline`). The `srmvs` binary exposes all of it.

pub mod error;
pub mod eval;
pub mod fusion;
pub mod geometry;
pub mod image;
pub mod io;
pub mod patchmatch;
pub mod pipeline;
pub mod sisr;
pub mod speckle;
pub mod synth;

pub use error::{Error, Result};
