use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter combination that cannot be evaluated faithfully
    /// (aliasing, Fock dimension above the cap, violated scan conditions).
    #[error("configuration error: {0}")]
    Config(String),

    /// Fock-space truncation is too coarse for the requested quantity.
    #[error("truncation defect {defect:.3e} exceeds {tolerance:.1e}; increase n_max (currently {n_max})")]
    Truncation { defect: f64, tolerance: f64, n_max: usize },

    /// An operator expected to be Hermitian is not.
    #[error("operator is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    /// Relative entropy requested with `supp Γ ⊄ supp Γ'`.
    #[error("support violation: weight {0:.3e} of the first state lies in the kernel of the second")]
    Support(f64),

    /// The operation is not available for these inputs (e.g. too many modes).
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
