use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Dicke probe requires an even number of qubits, got {0}")]
    OddQubitCount(usize),
    #[error("{what}: size {requested} exceeds the cap of {cap}")]
    Capacity {
        what: &'static str,
        requested: usize,
        cap: usize,
    },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("excitation index {k} out of range for L = {l}")]
    IndexOutOfRange { k: usize, l: usize },
    #[error("dipolar field is singular at the origin")]
    Singularity,
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("expected probe count {0:.3} is below one spin")]
    EmptyLattice(f64),
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("Bessel argument {0} exceeds the overflow guard")]
    BesselOverflow(f64),
    #[error("objective returned a non-finite value at x = {0}")]
    NonFiniteObjective(f64),
    #[error("all {0} optimizer restarts diverged")]
    AllRestartsDiverged(usize),
    #[error("integrator step count {steps} too small: Richardson difference {diff:.3e}")]
    StepsTooFew { steps: usize, diff: f64 },
    #[error("parameter regime violated: {0}")]
    Regime(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Non-fatal conditions that callers may want to surface next to a result.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Spin density outside the range where the density/T2* relation was measured.
    OutsideDensityWindow { rho_cm3: f64 },
    /// `|sum omega| * t` too large for the first-order expansion in the field.
    Linearization { phase: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::OutsideDensityWindow { rho_cm3 } => write!(
                f,
                "density {rho_cm3:.3e} cm^-3 lies outside the 1e16..1e19 cm^-3 window of the T2*-density relation"
            ),
            Warning::Linearization { phase } => write!(
                f,
                "accumulated phase |sum omega|*t = {phase:.3e} exceeds 0.1, linear response is unreliable"
            ),
        }
    }
}

/// A value together with any warnings raised while computing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Warned<T> {
    pub value: T,
    pub warnings: Vec<Warning>,
}

impl<T> Warned<T> {
    pub fn clean(value: T) -> Self {
        Self {
            value,
            warnings: Vec::new(),
        }
    }

    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }
}
