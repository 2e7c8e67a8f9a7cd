//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad argument or violated precondition, with context.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Least-squares design matrix is rank deficient; names the monomial
    /// whose column collapsed.
    #[error("degenerate fit: design matrix rank {rank} of {cols}, deficient monomial `{monomial}`")]
    FitDegenerate {
        rank: usize,
        cols: usize,
        monomial: &'static str,
    },

    /// The equilibrium-separation search could not bracket a minimum
    /// inside the sampled range.
    #[error("w0 search not bracketed: best candidate {w0} sits on the sampled boundary [{lo}, {hi}]")]
    W0NotBracketed { w0: f64, lo: f64, hi: f64 },

    /// Coefficients fail both boundedness hypotheses; solving is refused.
    #[error("unbounded potential: a3^2 - 4 a1 a4 = {excess:e} > 0 (or marginal with a2 < 0)")]
    Unbounded { excess: f64 },

    /// Iterative eigensolver ran out of its iteration budget.
    #[error("eigensolver did not converge within {iterations} iterations; best residuals {residuals:?}")]
    SolverDiverged {
        iterations: usize,
        residuals: Vec<f64>,
    },

    /// Gap-dependent operation requested on a level that is degenerate
    /// within tolerance.
    #[error("level {level} is degenerate: relative gap {gap:e} <= tolerance {tol:e}")]
    DegenerateLevel { level: usize, gap: f64, tol: f64 },

    /// Eigenvector mixes z-parities beyond tolerance.
    #[error("parity unresolved for level {level}: off-parity weight {weight:e}")]
    ParityUnresolved { level: usize, weight: f64 },

    /// Finite-difference grid exceeds the memory guard.
    #[error("grid too large: {points} interior points exceeds guard {guard}")]
    GridTooLarge { points: usize, guard: usize },

    /// Richardson pairing failed: levels cannot be matched across spacings.
    #[error("ambiguous level pairing at index {index}: |e_h - e_h2| = {delta:e} vs adjacent gap {gap:e}")]
    AmbiguousLevelPairing { index: usize, delta: f64, gap: f64 },

    /// Quasimode scan quadrature failed its refinement self-check.
    #[error("scan unresolved at epsilon = {epsilon}: ratio changed by {change:e} under grid refinement")]
    ScanUnresolved { epsilon: f64, change: f64 },

    /// Hamiltonian assembly produced non-finite entries.
    #[error("assembly overflow: non-finite matrix entry from coefficient scale {scale:e}")]
    AssemblyOverflow { scale: f64 },

    /// Input file problem, with line context where available.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
