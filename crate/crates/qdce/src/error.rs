//! Error taxonomy for the simulator.
//!
//! Validation problems (bad parameters, malformed configuration) are kept
//! apart from numerical-invariant violations (leakage, norm drift, lost
//! purity) so the command-line front end can map them to distinct exit
//! statuses.

use serde::Serialize;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// One problem found while validating a run configuration, with the line or
/// flag it came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigIssue {
    /// Where the offending value came from, e.g. `line 3` or `flag --alpha`.
    pub source: String,
    /// The key or flag name involved.
    pub key: String,
    pub message: String,
}

impl std::fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({}): {}", self.key, self.source, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("generator is not Hermitian (max entry deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error(
        "rotation map is not unitary at theta={theta}, chi={chi} \
         (deviation {deviation:.3e}); this convention only admits \
         chi = pi/2 modulo pi"
    )]
    NonUnitaryConvention { theta: f64, chi: f64, deviation: f64 },

    #[error("Fock truncation leakage {leakage:.3e} at checkpoint {label}; raise n_max")]
    Leakage { label: String, leakage: f64 },

    #[error("state norm drifted to {norm} at checkpoint {label}")]
    NormDrift { label: String, norm: f64 },

    #[error("cavity failed to return to vacuum (population {population})")]
    CavityNotReset { population: f64 },

    #[error("reduced two-atom state is not pure (purity {purity})")]
    ImpureReduction { purity: f64 },

    #[error("postselection branch '{branch}' has probability {probability:.3e}; conditional undefined")]
    EmptyBranch { branch: String, probability: f64 },

    #[error("matrix is not a valid density operator: {context}")]
    InvalidDensity { context: String },

    #[error("noise weight {epsilon} outside [0, 1]")]
    InvalidNoise { epsilon: f64 },

    #[error("visibility needs at least 3 samples, got {got}")]
    TooFewSamples { got: usize },

    #[error("visibility undefined: curve is identically zero")]
    UndefinedVisibility,

    #[error("phase fit needs at least {needed} distinct dispersive phases, got {got}")]
    InsufficientGrid { needed: usize, got: usize },

    #[error("no interference branch to fit at alpha={alpha}; branch weight {weight:.3e}")]
    NoWaveBranch { alpha: f64, weight: f64 },

    #[error("branch state does not carry a single interference phase (deviation {deviation:.3e})")]
    PhaseExtraction { deviation: f64 },

    #[error("configuration invalid:\n{}", format_issues(.0))]
    Config(Vec<ConfigIssue>),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

fn format_issues(issues: &[ConfigIssue]) -> String {
    issues
        .iter()
        .map(|i| format!("  - {i}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl Error {
    /// Process exit status: 1 for validation problems, 2 for numerical
    /// invariant violations.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DimensionMismatch { .. }
            | Error::InvalidParameter(_)
            | Error::InvalidNoise { .. }
            | Error::TooFewSamples { .. }
            | Error::InsufficientGrid { .. }
            | Error::NoWaveBranch { .. }
            | Error::EmptyBranch { .. }
            | Error::Config(_)
            | Error::Io(_) => 1,
            Error::NotHermitian { .. }
            | Error::NonUnitaryConvention { .. }
            | Error::Leakage { .. }
            | Error::NormDrift { .. }
            | Error::CavityNotReset { .. }
            | Error::ImpureReduction { .. }
            | Error::InvalidDensity { .. }
            | Error::UndefinedVisibility
            | Error::PhaseExtraction { .. } => 2,
        }
    }

    /// Stable machine-readable name of the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NonUnitaryConvention { .. } => "non_unitary_convention",
            Error::Leakage { .. } => "leakage",
            Error::NormDrift { .. } => "norm_drift",
            Error::CavityNotReset { .. } => "cavity_not_reset",
            Error::ImpureReduction { .. } => "impure_reduction",
            Error::EmptyBranch { .. } => "empty_branch",
            Error::InvalidDensity { .. } => "invalid_density",
            Error::InvalidNoise { .. } => "invalid_noise",
            Error::TooFewSamples { .. } => "too_few_samples",
            Error::UndefinedVisibility => "undefined_visibility",
            Error::InsufficientGrid { .. } => "insufficient_grid",
            Error::NoWaveBranch { .. } => "no_wave_branch",
            Error::PhaseExtraction { .. } => "phase_extraction",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }

    /// One-line JSON record for scripting against the CLI.
    pub fn to_json_record(&self) -> String {
        let body = match self {
            Error::Config(issues) => serde_json::json!({
                "kind": self.kind(),
                "message": "configuration invalid",
                "issues": issues,
            }),
            other => serde_json::json!({
                "kind": other.kind(),
                "message": other.to_string(),
            }),
        };
        serde_json::json!({ "error": body }).to_string()
    }
}
