//! Scheduling checks over a worker pool and mapping outcomes to exit codes.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use gklo_core::gklo::{GkloError, GkloFamily, Perturbation, DEFAULT_MODE_CACHE};
use gklo_core::quiver::{FramedQuiver, QuiverError};
use gklo_core::verify::{self, CheckKind, RelationCheck, Suite, VerifyOptions};

use crate::spec_file::{self, QuiverSpec, SpecError};

/// Process exit status by category.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    CheckFailed = 1,
    Parse = 2,
    Validation = 3,
    Internal = 4,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Gklo(#[from] GkloError),
    #[error("{0}")]
    Internal(String),
}

impl RunError {
    pub fn exit(&self) -> Exit {
        match self {
            RunError::Spec(SpecError::Parse(_)) => Exit::Parse,
            RunError::Spec(SpecError::Invalid(_)) => Exit::Validation,
            RunError::Quiver(QuiverError::Invalid(_)) => Exit::Validation,
            RunError::Io { .. } | RunError::Quiver(_) | RunError::Gklo(_) | RunError::Internal(_) => Exit::Internal,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub suites: Vec<Suite>,
    pub parallel: usize,
    pub options: VerifyOptions,
    pub fail_fast: bool,
    pub perturbation: Option<Perturbation>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suites: Suite::ALL.to_vec(),
            parallel: 1,
            options: VerifyOptions::default(),
            fail_fast: false,
            perturbation: None,
        }
    }
}

pub fn load(path: &str) -> Result<(Vec<u8>, QuiverSpec), RunError> {
    let bytes = std::fs::read(path).map_err(|source| RunError::Io { path: path.to_string(), source })?;
    let text = String::from_utf8_lossy(&bytes);
    let spec = spec_file::parse_spec(&text)?;
    Ok((bytes, spec))
}

pub fn family(spec: &QuiverSpec, cfg: &RunConfig) -> Result<GkloFamily, RunError> {
    let fq = FramedQuiver::new(spec.quiver.clone(), spec.dims.clone())?;
    // cache enough modes for the spot-checks, which reach max_mode + 2
    let cache = DEFAULT_MODE_CACHE.max(cfg.options.max_mode + 3);
    Ok(GkloFamily::build(fq, cfg.perturbation, cache)?)
}

/// Runs `kinds` on `parallel` workers. Results come back in plan order.
///
/// With `fail_fast`, the result is the plan prefix ending at the first
/// failing check in plan order; every check in that prefix has run, so the
/// outcome does not depend on the schedule.
pub fn run_checks(fam: &GkloFamily, kinds: &[CheckKind], cfg: &RunConfig) -> Result<Vec<RelationCheck>, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallel.max(1))
        .build()
        .map_err(|e| RunError::Internal(e.to_string()))?;
    let first_fail = AtomicUsize::new(usize::MAX);
    let results: Vec<Option<RelationCheck>> = pool.install(|| {
        kinds
            .par_iter()
            .enumerate()
            .map(|(idx, &k)| {
                if cfg.fail_fast && idx > first_fail.load(Ordering::SeqCst) {
                    return None;
                }
                let c = verify::run(fam, k, &cfg.options);
                if cfg.fail_fast && c.failed() {
                    first_fail.fetch_min(idx, Ordering::SeqCst);
                }
                Some(c)
            })
            .collect()
    });
    let stop = first_fail.load(Ordering::SeqCst);
    let mut out = Vec::with_capacity(results.len());
    for (idx, r) in results.into_iter().enumerate() {
        if idx > stop {
            break;
        }
        out.push(r.ok_or_else(|| RunError::Internal(format!("check {idx} was not run")))?);
    }
    Ok(out)
}

/// Exit status for a finished run.
pub fn verdict(checks: &[RelationCheck]) -> Exit {
    if checks.iter().any(|c| c.failed()) {
        Exit::CheckFailed
    } else {
        Exit::Ok
    }
}
