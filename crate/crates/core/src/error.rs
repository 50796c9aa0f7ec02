use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An element, window or character does not conform to the group spec
    /// it is used with.
    #[error("spec mismatch: {0}")]
    SpecMismatch(String),

    /// A plain argument error (bad range, degenerate box, ...).
    #[error("argument error: {0}")]
    Argument(String),

    /// The integer enumeration behind a model set cannot be bounded.
    #[error("enumeration bound unavailable: {0}")]
    EnumerationBound(String),

    /// The requested construction is only supported for some scheme shapes.
    #[error("unsupported scheme: {0}")]
    UnsupportedScheme(String),

    /// Unknown gallery preset.
    #[error("catalog error: unknown gallery entry `{0}`")]
    Catalog(String),

    /// The truncated data cannot answer the question (region too small,
    /// transversal incomplete, no representative close enough, ...).
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A covering witness could not be built because the base set is not
    /// relatively dense on the region.
    #[error("witness unavailable: {0}")]
    WitnessUnavailable(String),

    /// The support function fails the uniform-continuity pre-check.
    #[error("not liftable: {0}")]
    NotLiftable(String),

    /// A p-adic operation would need digits beyond the stored depth.
    #[error("precision exceeded: {0}")]
    Precision(String),
}

pub type Result<T> = std::result::Result<T, Error>;
