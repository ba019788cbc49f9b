use thiserror::Error;

/// Errors for the whole crate.
///
/// Budget exhaustion is kept separate from genuine violations: a budget
/// error means "undecided within the configured work bound", never a
/// mathematical verdict.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{p} is not a prime below 2^31")]
    NotPrime { p: u64 },

    #[error("matrix is not {side}-invertible (rank {rank}, need {need})")]
    NotOneSidedInvertible {
        side: &'static str,
        rank: usize,
        need: usize,
    },

    #[error("matrix shape mismatch: {context}")]
    ShapeMismatch { context: String },

    #[error("linear system has no solution ({context})")]
    Inconsistent { context: String },

    #[error("invalid quiver data: {0}")]
    BadQuiver(String),

    #[error("relation term has path of length {len} < 2")]
    RelationTooShort { len: usize },

    #[error("relation terms do not share source and target")]
    RelationNotParallel,

    #[error(
        "ideal not admissible within cap {cap}: {survivors} basis paths of length {cap} survive"
    )]
    NotAdmissible { cap: usize, survivors: usize },

    #[error("length cap {cap} too small to certify the path basis; raise it to at least {needed}")]
    CapTooSmall { cap: usize, needed: usize },

    #[error("{k} is not a projective dimension vector: {reason}")]
    NotProjectiveDimVector { k: String, reason: String },

    #[error("graded map is not a module map (arrow {arrow}, entry ({row},{col}))")]
    NotModuleMap {
        arrow: usize,
        row: usize,
        col: usize,
    },

    #[error("representation violates relation {relation} at vertex pair entry ({row},{col})")]
    RelationViolated {
        relation: usize,
        row: usize,
        col: usize,
    },

    #[error("decomposition inconclusive after {trials} trials (dim End = {end_dim})")]
    DecomposeInconclusive { trials: usize, end_dim: usize },

    #[error("rejection sampling budget {budget} exhausted (~{accepted}/{budget} accepted)")]
    RejectionBudget { budget: usize, accepted: usize },

    #[error("sampling requires a prime field")]
    NeedPrimeField,

    #[error("differential composite at degree {degree} is nonzero (vertex {vertex}, entry ({row},{col}))")]
    NotAComplex {
        degree: i64,
        vertex: usize,
        row: usize,
        col: usize,
    },

    #[error("complex data does not match the dimension array at degree {degree}")]
    ComplexShape { degree: i64 },

    #[error("profile infeasible: {reason}")]
    InfeasibleProfile { reason: String },

    #[error("stratum possibly empty: sampler budget {budget} exhausted for the profile")]
    StratumPossiblyEmpty { budget: usize },

    #[error("kernel of the differential at degree {degree} is not projective")]
    KernelNotProjective { degree: i64 },

    #[error("graded module is not in the presentable locus at degree {degree}")]
    NotPresentable { degree: i64 },

    #[error("condition `{condition}` fails at degree {degree}")]
    RealizationCondition {
        condition: &'static str,
        degree: i64,
    },

    #[error("enumeration needs {needed} points, budget is {budget}; lower the bound or raise the budget")]
    EnumerationBudget { needed: u128, budget: u128 },

    #[error(
        "counting {coords} coordinates over p = {p} needs {points} points, budget is {budget}"
    )]
    CountingBudget {
        coords: usize,
        p: u64,
        points: u128,
        budget: u128,
    },

    #[error("indecomposable table bound {bound} does not cover dimension vector {requested}")]
    TableBound { bound: String, requested: String },

    #[error("degeneration order inconsistent with orbit dimensions: {witness}")]
    HomOrderInconsistent { witness: String },

    #[error("algebra is not hereditary (global dimension {gldim})")]
    NotHereditary { gldim: String },

    #[error("document error: {0}")]
    Document(String),

    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code classes used by the CLI: 1 usage/parse,
    /// 2 infeasibility/violation, 3 budget.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            Document(_) | Json(_) | NotPrime { .. } | BadQuiver(_) => 1,
            DecomposeInconclusive { .. }
            | RejectionBudget { .. }
            | StratumPossiblyEmpty { .. }
            | EnumerationBudget { .. }
            | CountingBudget { .. } => 3,
            _ => 2,
        }
    }
}
