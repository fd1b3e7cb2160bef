//! Computable model spaces `K_θ = H² ⊖ θH²` for finite Blaschke products.
//!
//! The crate represents a finite Blaschke product θ together with its model
//! space, and builds the objects that live there: truncated Toeplitz operators
//! and their quasisymbols, Clark measures, Carleson-type embedding constants,
//! and the constructive four-term factorization of functions in `K¹_{θ²/z}`.
//!
//! Everything is finite dimensional. Elements of `K_θ` are coefficient vectors
//! in the Takenaka–Malmquist orthonormal basis, paired with boundary samples on
//! a uniform grid of the unit circle; the DFT bridges the two pictures. All
//! integrals on the circle are with respect to normalized Lebesgue measure.

pub mod clark;
pub mod cplx;
pub mod dft;
pub mod embedding;
pub mod error;
pub mod factor;
pub mod inner;
pub mod linalg;
pub mod measure;
pub mod modelspace;
pub mod poly;
pub mod random;
pub mod tto;

pub use clark::{clark_isometry_check, clark_measure, clark_union_partition, ClarkData, ClarkPartition};
pub use embedding::{
    abel_means_check, commutator_check, constants_dashboard, embedding_matrix, embedding_norm,
    embedding_norm_rayleigh, AbelTable, DashboardOptions, EmbeddingReport, RayleighCheck,
};
pub use error::{Error, Result};
pub use factor::{
    dyakonov_root, factorize4, factorize4_with, majorant_clark, pw_factorize, pw_majorant,
    xnorm_bounds, DyakonovRoot, FactorOptions, FactorizationResult, LineGrid, Majorant, PwFactorization,
    PwFunction, PwKernel, PwMajorant, XNormBounds,
};
pub use inner::{ArgBranch, InnerFunction};
pub use measure::BoundaryMeasure;
pub use modelspace::{KFun, ModelSpace};
pub use tto::{
    crofoot_conjugate, fit_nonneg_quasisymbol, nonneg_quasisymbol, rank_one, sarason_test,
    standard_symbol, tto_from_measure, tto_from_symbol, tto_space_basis, Crofoot, QuasisymbolFit,
    StandardSymbol, Support, Symbol, TtOperator,
};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

/// Default number of boundary samples.
pub const DEFAULT_GRID: usize = 4096;
