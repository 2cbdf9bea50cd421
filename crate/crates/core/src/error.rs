use thiserror::Error;

/// Errors raised while building devices, solving, or selecting scenarios.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {field}: {constraint}")]
    InvalidSpec {
        field: &'static str,
        constraint: String,
    },

    #[error("atom host n={n} out of range for N={ring_size}")]
    AtomIndexOutOfRange { n: usize, ring_size: usize },

    #[error("device matrix already contains an atom row")]
    AtomAlreadyEmbedded,

    #[error("{lead} lead attached to site a_{j}, out of range for N={ring_size}")]
    AttachmentOutOfRange {
        lead: &'static str,
        j: usize,
        ring_size: usize,
    },

    #[error("{lead} lead attached to a non-upper-layer site; leads attach to a_j only")]
    AttachmentNotUpper { lead: &'static str },

    #[error("left and right leads share attachment site a_{j}")]
    DuplicateAttachment { j: usize },

    #[error("linear system singular at E={energy} (pole of the resolvent); retry with eta > 0")]
    Pole { energy: f64 },

    #[error("energy {energy} lies outside the lead band [{band_min}, {band_max}]")]
    NotPropagating {
        energy: f64,
        band_min: f64,
        band_max: f64,
    },

    #[error("leads must share omega and zeta for the scattering oracle")]
    MismatchedLeads,

    #[error("unknown preset {0:?}")]
    UnknownPreset(String),

    #[error("scenario requires {0}")]
    WrongSweep(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
