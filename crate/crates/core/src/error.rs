use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },

    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("expected {expected} generator images, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("word is not free-by-cyclic: {0}")]
    NotFreeByCyclic(String),

    #[error("homomorphism is not surjective onto {0}")]
    NotSurjective(String),

    #[error("budget of {budget} exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("iteration bound of {bound} exceeded: {context}")]
    BoundExceeded { bound: u64, context: String },

    #[error("no surjection onto {target} found within budget")]
    NoSurjection { target: String },

    #[error("determinant of the abelianized endomorphism is zero (invariant factors {invariant_factors:?}); the map is singular modulo every prime")]
    SingularAbelianization { invariant_factors: Vec<String> },

    #[error("witness {0} is the identity element")]
    IdentityWitness(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

impl Error {
    /// True for errors caused by a search or iteration budget rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. } | Error::BoundExceeded { .. }
        )
    }
}
