use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid photon-number distribution: {0}")]
    InvalidDistribution(&'static str),

    #[error("matrix has {entries} entries, expected {dim}x{dim}")]
    Shape { dim: usize, entries: usize },

    #[error("operation needs a {expected}x{expected} matrix, got {dim}x{dim}")]
    Dimension { expected: usize, dim: usize },

    #[error("matrix dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("truncation at n_max = {n_max} moves the result by {shift:e} (tolerance {tolerance:e})")]
    TruncationInsufficient { n_max: usize, shift: f64, tolerance: f64 },

    #[error("degenerate splitter: |D - P| = {0:e}")]
    DegenerateSplitter(f64),

    #[error(
        "integrator did not converge: {halvings} step halvings, last step {step:e} ns, \
         last change {change:e}"
    )]
    IntegratorNonConvergence { halvings: u32, step: f64, change: f64 },

    #[error("fit did not converge after {iterations} iterations (chi2 = {chi2})")]
    FitNonConvergence { iterations: usize, chi2: f64 },

    #[error("degenerate data: {0}")]
    DegenerateData(&'static str),

    #[error("histogram has no side peaks to normalise against")]
    NoSidePeaks,

    #[error("division hazard: {0}")]
    DivisionHazard(&'static str),

    #[error("invalid figure of merit: {0}")]
    InvalidFigure(&'static str),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain { name, value, expected }
    }
}

/// Checks that `value` is a probability.
pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::domain(name, value, "[0, 1]"))
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::domain(name, value, "> 0"))
    }
}
