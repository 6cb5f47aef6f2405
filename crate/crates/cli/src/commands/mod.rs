pub mod export;
pub mod generate;
pub mod solve;
pub mod verify;

use crate::failure;

/// Status recorded in the manifest and the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub status: &'static str,
    pub code: u8,
}

impl Outcome {
    pub fn ok() -> Self {
        Self { status: "ok", code: failure::OK }
    }

    pub fn check_failed() -> Self {
        Self { status: "check-failed", code: failure::CHECK_FAILED }
    }

    pub fn non_convergence() -> Self {
        Self { status: "non-convergence", code: failure::NON_CONVERGENCE }
    }
}

/// Every file a run may write, for the overwrite check.
pub const OUTPUT_FILES: &[&str] = &[
    "manifest.json",
    "mesh.obj",
    "mesh.csv",
    "geometry.csv",
    "summary.json",
    "multigraph.csv",
    "separation.csv",
    "solution.csv",
    "report.json",
    "convergence.json",
    "blowup.json",
    "structure.json",
    "singular_set.csv",
    "curve.csv",
    "one_sided.json",
    "separation.json",
    "fits.csv",
];
