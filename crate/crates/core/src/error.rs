use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dilation matrix must be square and non-empty (got {rows} rows, row lengths {row_lengths:?})")]
    NotSquare { rows: usize, row_lengths: Vec<usize> },

    #[error("dilation matrix has zero determinant")]
    ZeroDeterminant,

    #[error("dilation matrix is not expansive: eigenvalue moduli {moduli:?}")]
    NotExpansive { moduli: Vec<f64> },

    #[error("dimension {0} is not supported (1..=8)")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("lattice sum does not converge: tail {tail:e} did not shrink from {previous_tail:e} when the radius doubled")]
    NonConvergent { tail: f64, previous_tail: f64 },

    #[error("infinite-product depth must be at least 1")]
    DepthTooSmall,

    #[error("probe budget exceeded: {requested} evaluations requested, limit {limit}")]
    ProbeBudgetExceeded { requested: usize, limit: usize },

    #[error("grid resolution {resolution} is not a multiple of the coset denominator {denominator}")]
    GridNotCosetCompatible { resolution: usize, denominator: i64 },

    #[error("filter bank carries no OEP weight S")]
    MissingWeight,

    #[error("OEP weight is negative ({value:e}) at t = {t:?}")]
    NegativeWeight { t: Vec<f64>, value: f64 },

    #[error("fundamental function partial sums diverged ({value:e} after {terms} terms)")]
    Divergent { value: f64, terms: usize },

    #[error("sub-QMF condition violated: sum of |H0|^2 over the coset orbit is {value} at t = {t:?}")]
    SubQmfViolated { t: Vec<f64>, value: f64 },

    #[error("coset orbit of grid point {index} leaves the grid")]
    OrbitNotOnGrid { index: usize },

    #[error("q = {q:?} lies in the dilated lattice A*Z^n")]
    QInDilatedLattice { q: Vec<i64> },

    #[error("quadrature budget exceeded: {requested} evaluations requested, limit {limit}")]
    QuadratureBudget { requested: usize, limit: usize },

    #[error("every grid point is masked by the zero set")]
    EmptyAfterMask,

    #[error("omitted-scale energy indicator {indicator} exceeds 10%")]
    TruncationDominates { indicator: f64 },

    #[error("test function rejected: {0}")]
    BadTestFunction(String),

    #[error("sampled filter lives on a {filter}-point grid and cannot be read on a {requested}-point grid")]
    GridMismatch { filter: usize, requested: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
