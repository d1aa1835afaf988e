//! Barcodes of filtered complexes, Z-periodic barcodes on CP^d, quadratic
//! generating functions and projective-join algebra.

pub mod complex;
pub mod field;
pub mod genfun;
pub mod periodic;
pub mod persistence;
pub mod pjoin;

pub use complex::{
    fixed_subcomplex, parse_complex, parse_complex_with_action, smith_dimension_check,
    ComplexBuilder, ComplexError, CyclicAction, FilteredChainComplex, Generator, SmithReport,
};
pub use field::{FieldError, FieldSpec, Rational, Scalar};
pub use genfun::{GFTuple, GenfunError, HermitianForm};
pub use periodic::{FiniteOrbit, PeriodicBarcode, PeriodicError};
pub use persistence::{
    bottleneck_distance, compute_barcode, window_dimension, Bar, Barcode, Extended,
    PersistenceError,
};
pub use pjoin::{PjoinError, ProjClass, TruncatedPoly};
