use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("scalar mode mismatch: the operation requires every operand in the algebra's mode")]
    ModeMismatch,

    #[error("unsupported nilpotency order {order}: the closed-form group law covers order <= 3")]
    UnsupportedOrder { order: usize },

    #[error("invalid graded algebra: {0}")]
    InvalidAlgebra(String),

    #[error("the split does not satisfy the per-layer compatibility condition: {0}")]
    IncompatibleSplit(String),

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("linear part is not a Lie algebra automorphism (pair e_{i}, e_{j}, residual {residual:.3e})")]
    NotAutomorphism { i: usize, j: usize, residual: f64 },

    #[error("unknown catalog key {0:?}")]
    UnknownKey(String),

    #[error("basis is not closed under the commutator: pair ({i}, {j}) leaves the span")]
    NotClosed { i: usize, j: usize },

    #[error("invalid split Cartan: {0}")]
    BadCartan(String),

    #[error("ad eigenvalues failed rational clustering: {0}")]
    NonSemisimpleResidue(String),

    #[error("sigma contains a functional that is not a simple root")]
    SigmaNotSimple,

    #[error("sigma equals the full simple system, so the nilradical is zero")]
    EmptyNilradical,

    #[error("element does not belong to the Levi factor")]
    NotInLevi,

    #[error("subspace is not a subalgebra: bracket of generators {i} and {j} leaves the span")]
    NotSubalgebra { i: usize, j: usize },

    #[error("ray geometry does not have rank one (rank = {rank})")]
    RankNotOne { rank: usize },

    #[error("linear part does not act by strict expansions on the target subspace")]
    NotExpanding,

    #[error("translation part does not lie in the required subspace F")]
    TranslationNotInF,

    #[error("translation part does not lie in the invisible subspace I")]
    TranslationNotInI,

    #[error("subspace is not invariant under the supplied holonomy part (index {index})")]
    NotInvariant { index: usize },

    #[error("subspace is not compatible with the degree grading")]
    NotGraded,

    #[error("numeric omega-degree trend is ambiguous for basis vector {index} (slope {slope:.3e})")]
    AmbiguousTrend { index: usize, slope: f64 },

    #[error("hyperplane normal is zero")]
    ZeroNormal,

    #[error("{0}")]
    InvalidInput(String),
}
