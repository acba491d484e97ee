//! Desk-scale laboratory for weighted simplicial complexes: boundary
//! operators, Laplacian spectra, Betti numbers (incremental and by matrix
//! reduction), effective resistance/capacitance of cycles, Smith normal
//! form and relative torsion, worst-case complex generators, collapsing
//! machinery, embedded-complex duality, and a dense classical simulation
//! of the span-program null-homology tester.
//!
//! Everything that certifies a value runs in exact rational (or big
//! integer) arithmetic; floating point appears only in eigensolves and in
//! the explicitly float-tagged fallbacks.

pub mod betti;
pub mod chain;
pub mod collapse;
pub mod complex;
pub mod corpus;
pub mod duality;
pub mod error;
pub mod families;
pub mod flow;
pub mod jsonio;
pub mod linalg;
pub mod maps;
pub mod snf;
pub mod span;
pub mod spectra;

pub use chain::Chain;
pub use complex::{BoundaryOperator, Simplex, SimplicialComplex};
pub use error::{Error, Result};

/// Rational scalar used by every exact code path.
pub type Rat = num_rational::BigRational;
/// Integer scalar used by the Smith-normal-form machinery.
pub type Int = num_bigint::BigInt;

pub(crate) fn rat(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}
