//! Command implementations behind the `simpers` binary. Each command takes
//! file contents and returns the text to print, so the binary only does I/O.

pub mod format;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::annotation::AnnotationMatrix;
use crate::audit::{audit_annotation, check_coning, check_transfer, AuditFailure};
use crate::complex::VertexMap;
use crate::diagram::{bottleneck, DiagramError};
use crate::engine::{diagram_of_pairs, Engine, EngineOptions, Filtration, OpKind, RunError};
use crate::oracle::{betti_numbers, reduce_persistence, OracleError};
use crate::tda::{
    exact_rips_filtration, gic_filtration, sparse_rips_filtration, RipsParams, TdaError,
};

pub use format::{
    format_g9, parse_diagram, parse_filtration, parse_points, write_diagram, write_filtration,
    ParseError,
};

/// Errors of the command layer, each with a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Tda(#[from] TdaError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("audit failed at op {index}: {failure}")]
    Audit { index: usize, failure: AuditFailure },
}

impl CliError {
    /// 1 for usage and parse errors, 2 for semantic errors, 3 for audits.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 1,
            CliError::Audit { .. } => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunFlags {
    pub keep_zero: bool,
    pub lenient: bool,
    pub audit: bool,
    pub max_dim: Option<usize>,
}

impl RunFlags {
    fn engine_options(&self) -> EngineOptions {
        let mut o = EngineOptions {
            lenient: self.lenient,
            ..EngineOptions::default()
        };
        if let Some(d) = self.max_dim {
            o.max_dim = d;
        }
        o
    }
}

/// Runs the engine on a filtration file and returns the diagram file.
pub fn cmd_run(text: &str, flags: RunFlags) -> Result<String, CliError> {
    let f = parse_filtration(text)?;
    let mut e = Engine::new(flags.engine_options());
    for (index, op) in f.ops().iter().enumerate() {
        e.apply(op).map_err(|source| RunError { index, source })?;
        if flags.audit {
            audit_annotation(e.complex(), e.annotations())
                .map_err(|failure| CliError::Audit { index, failure })?;
        }
    }
    Ok(write_diagram(&diagram_of_pairs(
        &e.finish(),
        flags.keep_zero,
    )))
}

/// Runs the boundary-matrix reduction on an inclusion-only filtration file.
pub fn cmd_oracle(text: &str, keep_zero: bool) -> Result<String, CliError> {
    let f = parse_filtration(text)?;
    Ok(write_diagram(&reduce_persistence(&f, keep_zero)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenerateMode {
    Exact,
    Sparse,
    Gic,
}

/// Builds a filtration file from a point-cloud file.
pub fn cmd_generate(
    points: &str,
    params: RipsParams,
    mode: GenerateMode,
) -> Result<String, CliError> {
    let cloud = parse_points(points)?;
    let f: Filtration = match mode {
        GenerateMode::Exact => exact_rips_filtration(&cloud, &params)?,
        GenerateMode::Sparse => sparse_rips_filtration(&cloud, &params)?.filtration,
        GenerateMode::Gic => gic_filtration(&cloud, &params)?.filtration,
    };
    Ok(write_filtration(&f))
}

/// Per-dimension bottleneck distances between two diagram files, one
/// `dim value` line each, then `max value`. `dims` restricts the comparison,
/// e.g. to the dimensions a truncated filtration computes faithfully.
pub fn cmd_bottleneck(
    a: &str,
    b: &str,
    log_scale: bool,
    dims: Option<&BTreeSet<usize>>,
) -> Result<String, CliError> {
    let (mut da, mut db) = (parse_diagram(a)?, parse_diagram(b)?);
    if let Some(dims) = dims {
        da = da.restrict_dims(dims);
        db = db.restrict_dims(dims);
    }
    if log_scale {
        da = da.log_scale()?;
        db = db.log_scale()?;
    }
    let r = bottleneck(&da, &db)?;
    let mut out = String::new();
    for (dim, v) in &r.per_dim {
        let _ = writeln!(out, "{dim} {}", format_g9(*v));
    }
    let _ = writeln!(out, "max {}", format_g9(r.max));
    Ok(out)
}

#[derive(Debug, Clone, Default)]
pub struct ValidateFlags {
    pub lenient: bool,
    pub max_dim: Option<usize>,
    /// An annotation dump to audit against the final complex instead of
    /// the engine's own annotation.
    pub check_dump: Option<String>,
}

/// Result of a validation run: the printed report and the final annotation.
#[derive(Debug, Clone)]
pub struct Validation {
    pub report: String,
    pub final_dump: String,
    pub collapses: usize,
}

/// Replays a filtration with every audit switched on and reports one line
/// per op. Fails with the op index and invariant name on the first failure.
pub fn cmd_validate(text: &str, flags: &ValidateFlags) -> Result<Validation, CliError> {
    let f = parse_filtration(text)?;
    let opts = RunFlags {
        lenient: flags.lenient,
        max_dim: flags.max_dim,
        ..RunFlags::default()
    }
    .engine_options();
    let mut e = Engine::new(opts);
    let mut report = String::new();
    let mut collapses = 0;
    for (index, op) in f.ops().iter().enumerate() {
        let audit = |failure| CliError::Audit { index, failure };
        match &op.kind {
            OpKind::Insert(s) => {
                e.apply(op).map_err(|source| RunError { index, source })?;
                audit_annotation(e.complex(), e.annotations()).map_err(audit)?;
                let _ = writeln!(report, "op {index} insert {s}: annotation ok");
            }
            &OpKind::Collapse { keep, remove } => {
                collapses += 1;
                let before = e.complex().clone();
                let coning = check_coning(&before, keep, remove).map_err(audit)?;
                let named = [
                    ("image-in-cone", coning.image_in_cone),
                    ("cone-betti", coning.betti_equal),
                    ("inclusion-contiguous", coning.inclusion_contiguous),
                    ("projection-contiguous", coning.projection_contiguous),
                ];
                if let Some((name, _)) = named.iter().find(|(_, ok)| !ok) {
                    return Err(audit(AuditFailure {
                        invariant: name,
                        detail: format!("collapse of {remove} onto {keep}"),
                    }));
                }
                let mut transfer = Ok(());
                let r = e
                    .step_collapse_inspect(keep, remove, op.grade, |k, ann| {
                        transfer = check_transfer(k, ann, keep, remove);
                    })
                    .map_err(|source| RunError { index, source })?;
                transfer.map_err(audit)?;
                audit_annotation(e.complex(), e.annotations()).map_err(audit)?;
                let image = before.image(&VertexMap::collapse(keep, remove));
                if e.complex() != &image {
                    return Err(audit(AuditFailure {
                        invariant: "collapse-image",
                        detail: format!(
                            "complex after collapsing {remove} onto {keep} is not the image"
                        ),
                    }));
                }
                let mut line = format!(
                    "op {index} collapse {keep} {remove}: repair {}, vanishing {}, transfer ok, coning ok",
                    r.repair.len(),
                    r.vanishing.len()
                );
                if r.repair.is_empty() {
                    let top = before.dim().unwrap_or(0);
                    if betti_numbers(&before, top) != betti_numbers(e.complex(), top) {
                        return Err(audit(AuditFailure {
                            invariant: "homotopy-betti",
                            detail: "link condition held but Betti numbers changed".into(),
                        }));
                    }
                    line.push_str(", betti preserved");
                }
                let _ = writeln!(report, "{line}");
            }
        }
    }
    if let Some(dump) = &flags.check_dump {
        let ann = AnnotationMatrix::from_dump(dump).map_err(|err| {
            CliError::Parse(ParseError {
                line: 0,
                msg: err.to_string(),
            })
        })?;
        audit_annotation(e.complex(), &ann).map_err(|failure| CliError::Audit {
            index: f.len(),
            failure,
        })?;
        let _ = writeln!(report, "supplied annotation ok");
    }
    let _ = writeln!(
        report,
        "all checks passed: {} ops, {collapses} collapses",
        f.len()
    );
    Ok(Validation {
        report,
        final_dump: e.annotations().dump(),
        collapses,
    })
}
