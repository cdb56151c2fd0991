use thiserror::Error;

/// Errors shared by the simulation and analysis modules.
#[derive(Debug, Error)]
pub enum WalkError {
    /// Input failed validation before any computation ran.
    #[error("invalid input: {0}")]
    Validation(String),

    /// A translation would move amplitude past the allocated lattice window.
    /// Windows are sized so this cannot happen for a well-formed config; it
    /// signals a misconfigured window, not a physical boundary.
    #[error("translation reached the lattice window edge at site {site}")]
    LatticeOverflow { site: i64 },

    /// Operation not defined for the given configuration.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// The winding pair is undefined because a quasienergy gap is closed.
    #[error(
        "winding undefined: gap0 = {gap0:.3e}, gap_pi = {gap_pi:.3e} (both must exceed {tol:.1e})"
    )]
    GaplessWinding { gap0: f64, gap_pi: f64, tol: f64 },

    /// Numerical routine failed (eigensolver non-convergence and the like).
    #[error("numeric failure: {0}")]
    Numeric(String),
}
