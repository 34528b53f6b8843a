use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch in {op}: expected {expected}, found {found}")]
    Shape {
        op: &'static str,
        expected: String,
        found: String,
    },
    #[error("matrix is not Hermitian: deviation {deviation:.3e} exceeds {allowed:.3e}")]
    NotHermitian { deviation: f64, allowed: f64 },
    #[error("singular matrix in {0}")]
    Singular(&'static str),
    #[error("invalid Jordan data: {0}")]
    InvalidSpec(String),
    #[error("map is not *-linear")]
    NotStarLinear,
    #[error("Lyapunov operator is singular: eigenvalues {0} and {1} satisfy a + conj(b) = 0")]
    NotLyapunovRegular(String, String),
    #[error("Stein operator is singular: eigenvalues {0} and {1} satisfy a * conj(b) = 1")]
    NotSteinRegular(String, String),
    #[error("block rank {blocks} differs from Choi rank {choi}")]
    RankMismatch { blocks: usize, choi: usize },
    #[error("block ({row}, {col}) is not spanned by the selected blocks (residual {residual:.3e})")]
    SpanViolation { row: usize, col: usize, residual: f64 },
    #[error("invalid selection: {0}")]
    InvalidSelection(String),
    #[error("coefficient matrix has dependent rows (rank {rank} < {rows})")]
    DependentRows { rank: usize, rows: usize },
    #[error("kernel of the coefficient matrix is not contained in the kernel of the Choi matrix (residual {0:.3e})")]
    KernelMismatch(f64),
    #[error(
        "matrix is not in the bicommutant: entry ({row}, {col}) of the Jordan-basis form is {found}, expected {expected}"
    )]
    NotInBicommutant {
        row: usize,
        col: usize,
        found: String,
        expected: String,
    },
    #[error("{0} requires a complex problem")]
    RequiresComplex(&'static str),
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
