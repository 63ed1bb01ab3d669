use thiserror::Error;

/// Errors produced by the simulation and loss-budget routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain of the requested relation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested Hilbert space is larger than the configured cap.
    #[error("Hilbert space dimension {dimension} exceeds the cap of {cap}")]
    DimensionCap { dimension: usize, cap: usize },

    /// The eigensolver did not produce an accurate decomposition.
    #[error("eigensolver failure: {0}")]
    Numerical(String),

    /// A bare label could not be matched to a dressed state unambiguously.
    #[error(
        "strong mixing: bare state {label:?} has best squared overlap {overlap:.4} \
         (needs > 0.5); parameters are too close to a resonance"
    )]
    StrongMixing { label: [usize; 3], overlap: f64 },

    /// A sweep point failed; wraps the underlying cause with the coupler frequency.
    #[error("evaluation failed at coupler frequency {coupler_mhz} MHz: {source}")]
    AtCouplerFrequency {
        coupler_mhz: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("no idle point in bracket [{lo}, {hi}] MHz: zeta does not change sign")]
    NoIdlePoint { lo: f64, hi: f64 },

    #[error(
        "multiple roots: zeta changes sign {count} times in [{lo}, {hi}] MHz; \
         narrow the bracket"
    )]
    MultipleRoots { count: usize, lo: f64, hi: f64 },

    /// Some noise samples pushed the system into a region where labeling fails.
    #[error("{failed} of {total} noise samples failed to label: {first}")]
    EnsembleFailures {
        failed: usize,
        total: usize,
        first: Box<Error>,
    },

    /// Malformed tabular input. `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
