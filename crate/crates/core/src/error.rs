use thiserror::Error;

/// Every failure the engine can report.
///
/// Variants fall into three groups: invalid input (the linkage or a label
/// cannot be accepted), implementation faults (a structural invariant that
/// the construction guarantees was broken), and claim falsifications (a
/// computed object disagrees with a combinatorial prediction). See
/// [`Error::severity`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid length list: {0}")]
    Parse(String),
    #[error("edge {edge} has non-positive length {value}")]
    NonPositiveLength { edge: usize, value: String },
    #[error("a linkage needs at least 3 edges, got {0}")]
    TooFewEdges(usize),
    #[error("too many edges: {0} (hard limit {max})", max = crate::linkage::MAX_EDGES)]
    TooManyEdges(usize),
    #[error("degenerate: subset {subset} sums to half-perimeter")]
    DegenerateLinkage { subset: String },
    #[error("empty moduli space: edge {edge} is at least half the perimeter")]
    EmptyModuliSpace { edge: usize },
    #[error("invalid cell label `{label}`: {reason}")]
    InvalidLabel { label: String, reason: String },
    #[error("refusing to build a complex for n = {n} (limit {max_n}); pass an override to force")]
    SizeGuard { n: usize, max_n: usize },
    #[error("entry {entry} already belongs to the set")]
    MemberOverlap { entry: usize },

    #[error("pair search is not an involution at {cell} (partner {partner})")]
    InconsistentMatch { cell: String, partner: String },
    #[error("step {step} offers two partners for {cell}")]
    AmbiguousStep { step: usize, cell: String },
    #[error("{0} is not critical")]
    NotCritical(String),
    #[error("{0} is not matched with a coface")]
    Unmatched(String),
    #[error("vector field axiom violated: {0}")]
    FieldAxiomViolation(String),
    #[error("closed V-path detected through {0}")]
    Cyclic(String),
    #[error("path enumeration exceeded the cap of {cap} paths")]
    PathCapExceeded { cap: usize },

    #[error("critical cell {0} fits neither critical type")]
    ClassificationGap(String),
    #[error("expected exactly one gradient path from {beta} to {alpha}, found {count}")]
    NonUniquePath { beta: String, alpha: String, count: u128 },
    #[error("cell {0} is an endpoint of two reversed paths")]
    DuplicateEndpoint(String),
    #[error("reversal partner {0} is not a critical cell of the second type")]
    MissingPartner(String),
    #[error("surviving critical cells differ from the prediction: {0}")]
    PredictionMismatch(String),
    #[error("Morse differential is nonzero: {0}")]
    NonzeroDifferential(String),
    #[error("{0} is not a short set")]
    NotShort(String),
    #[error("{0} does not contain the largest entry")]
    MissingN(String),
}

/// Coarse classification used for exit codes and report text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    InvalidInput,
    ImplementationFault,
    Falsification,
}

impl Error {
    pub fn severity(&self) -> Severity {
        use Error::*;
        match self {
            Parse(_)
            | NonPositiveLength { .. }
            | TooFewEdges(_)
            | TooManyEdges(_)
            | DegenerateLinkage { .. }
            | EmptyModuliSpace { .. }
            | InvalidLabel { .. }
            | SizeGuard { .. }
            | MemberOverlap { .. }
            | NotShort(_)
            | MissingN(_)
            | NotCritical(_)
            | Unmatched(_) => Severity::InvalidInput,
            InconsistentMatch { .. } | AmbiguousStep { .. } | FieldAxiomViolation(_) | PathCapExceeded { .. } => {
                Severity::ImplementationFault
            }
            Cyclic(_)
            | ClassificationGap(_)
            | NonUniquePath { .. }
            | DuplicateEndpoint(_)
            | MissingPartner(_)
            | PredictionMismatch(_)
            | NonzeroDifferential(_) => Severity::Falsification,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
