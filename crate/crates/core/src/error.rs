use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("iterated log undefined at depth {depth}: intermediate value {value} is not positive")]
    LogDomain { depth: u32, value: f64 },

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("base point search failed: {0}")]
    BasePoint(String),

    #[error("integration failure at {coordinate} = {location}: {reason}")]
    Integration {
        coordinate: &'static str,
        location: f64,
        reason: String,
    },

    #[error("explicit boundary spectrum exhausted: last level {last} is below the requested bound")]
    SpectrumExhausted { last: f64 },

    #[error(
        "zero count increased with the boundary eigenvalue: Z(ln zeta = {zeta_lo_ln}) = {z_lo} \
         but Z(ln zeta = {zeta_hi_ln}) = {z_hi}"
    )]
    Monotonicity {
        zeta_lo_ln: f64,
        z_lo: u64,
        zeta_hi_ln: f64,
        z_hi: u64,
    },

    #[error("mode enumeration needs about {required} levels, above the cutoff {cutoff}")]
    CutoffTooLarge { required: u64, cutoff: u64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("insufficient rows for slope fit: {usable} usable of {total} (need {needed})")]
    InsufficientRows {
        usable: usize,
        total: usize,
        needed: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
