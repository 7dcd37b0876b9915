use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid Cartan type {label}{rank}")]
    InvalidType { label: char, rank: usize },

    #[error("orbit exceeded the cap of {cap} elements")]
    OrbitCap { cap: usize },

    #[error("Weyl group of order {order} exceeds the enumeration cap {cap}")]
    EnumerationCap { order: u128, cap: usize },

    #[error("vector is not dominant")]
    NotDominant,

    #[error("Cartan matrix of the subsystem is not of finite type")]
    NotFiniteType,

    #[error("root system is reducible")]
    Reducible,

    #[error("subsystem is not semi-dense: S + r < i at sigma={sigma:?}, i={i}, w={w}")]
    NotSemidense { sigma: Vec<usize>, i: usize, w: usize },

    #[error("argument {s} lies within 1e-8 of a pole")]
    PoleProximity { s: String },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("rejection sampler acceptance rate {rate:.2e} below 1e-4; use a larger t")]
    RejectionRate { rate: f64 },

    #[error("matrix is numerically singular")]
    Singular,

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
