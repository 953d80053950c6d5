use exactalg::AlgError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum K3Error {
    #[error("bad rank {0} for root lattice type {1}")]
    BadRank(usize, char),
    #[error("degenerate lattice")]
    Degenerate,
    #[error("finite group of order {0} exceeds the brute-force bound")]
    TooLarge(u64),
    #[error("subgroup is not isotropic")]
    NotIsotropic,
    #[error("no admissible torsion group: {0}")]
    Inconsistent(String),
    #[error("negative Mordell-Weil rank {0}")]
    NegativeRank(i64),
    #[error("unknown type {0}")]
    UnknownType(String),
    #[error("identity failed: {0}")]
    IdentityFailed(String),
    #[error("pullback is not a monomial times a Weierstrass cubic: {0}")]
    PullbackMismatch(String),
    #[error("non-minimal Weierstrass model at a place")]
    NonMinimal,
    #[error("no Kodaira type for orders ({0}, {1}, {2})")]
    NoMatch(u32, u32, u32),
    #[error("residual discriminant factor is not squarefree")]
    ResidualNotSquarefree,
    #[error("Euler numbers sum to {0}, not 24")]
    EulerMismatch(u32),
    #[error("specialization has vanishing discriminant")]
    DegenerateSpecialization,
    #[error("input polynomial has a nonzero t^5 coefficient")]
    BadQuintic,
    #[error("J4 must be nonzero")]
    DegenerateJ4,
    #[error("models are not equivalent: {0}")]
    Mismatch(String),
    #[error("no rescaling found")]
    NoRescalingFound,
    #[error("unknown fiber type {0}")]
    UnknownFiber(String),
    #[error("inconsistent exponent system")]
    InconsistentSystem,
    #[error("unknown pencil {0}")]
    UnknownPencil(String),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("{0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

pub type Result<T> = std::result::Result<T, K3Error>;
