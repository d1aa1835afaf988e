//! Quadratic generating functions of C-equivariant maps of `C^{d+1}`.
//!
//! Vectors of `(C^{d+1})^n` are stored flat, block `k` at `k(d+1)..(k+1)(d+1)`.
//! The real inner product is `⟨x, y⟩ = Re Σ conj(x_j) y_j`, so `w ↦ w*Hw`
//! has gradient `2Hw` and generates the Cayley map `(H + iI)^{-1}(iI − H)`.

mod forms;
mod hermitian;
mod identities;
mod maslov;
mod relation;
mod rotation;
mod smith;
mod spectrum;
mod tuple;

use thiserror::Error;

pub use forms::{
    a_n, a_n_solve, assemble_f, blocks, build_qn, build_sigma_mt, chi, delta_angles, delta_form,
    eval_f, eval_f_w, eval_f_w_split, grad_f, qn_w, DEFAULT_N0,
};
pub use hermitian::{index_signature, inner, norm_sqr, HermitianForm, Signature, C64, DEFAULT_TOL};
pub use identities::{b_tilde, identity_suite, IdentityReport};
pub use maslov::{maslov_index_check, MaslovReport};
pub use relation::{generating_relation_check, symplectic_defect};
pub use rotation::{kappa, rotation_barcode, sweep_jumps, Jump, RotationResult};
pub use smith::{involution_p2, smith_fixed_locus_check, SmithLocusReport};
pub use spectrum::{critical_spectrum, SpectrumPoint, SpectrumSample};
pub use tuple::{
    cayley, random_hermitian, random_vector, Elementary, ElementaryOracle, GFTuple, LinearMap,
    PerturbedQuadratic,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenfunError {
    #[error("tuple size {0} is even; generating functions need odd size")]
    EvenTuple(usize),
    #[error("eigenvalue {value:e} lies in the guard band of tolerance {tol:e}")]
    BorderlineEigenvalue { value: f64, tol: f64 },
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("A_n is singular for even n = {0}")]
    SingularChange(usize),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("n0 must be even and at least 4, got {0}")]
    BadN0(usize),
    #[error("t = {0} is an integer; the index jumps there")]
    IntegerTime(f64),
    #[error("a quadratic tuple is required")]
    NotQuadratic,
    #[error("coefficients {0} and {1} agree mod 1: fixed points are not isolated")]
    DegenerateRotation(usize, usize),
    #[error("generating relation fails for the step map, residual {0:e}")]
    ConventionMismatch(f64),
    #[error("q = {q} is not an admissible residue for p = {p}")]
    BadResidue { p: u32, q: i64 },
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("critical set is not isolated near t = {0}")]
    DegenerateSpectrum(f64),
    #[error("search budget exceeded: {0}")]
    Budget(String),
    #[error("fixed-point iteration for a step map did not converge")]
    StepNonConvergence,
    #[error("tuple json: {0}")]
    Json(String),
}
