//! Exact computations with complexes of projective modules over bound quiver
//! algebras `kQ/I`.
//!
//! Everything here is exact: scalars are either residues in a prime field
//! `F_p` or arbitrary-precision rationals, and there is no floating point
//! anywhere. The crate builds the path-basis of a bound quiver algebra,
//! its projective indecomposables and Cartan matrix, quiver representations
//! with kernels/images/quotients and Krull–Schmidt decompositions, complexes
//! of projectives with fixed rank profiles, the pairing of a complex with an
//! explicit realization of its homology (with the two projections and their
//! section constructions), fibre-dimension bookkeeping for the bundle
//! decompositions of those projections, irreducible-component reports for
//! graded module varieties at representation-finite scale, and an exhaustive
//! finite-field point-counting oracle with exact polynomial interpolation.
//!
//! The [`document`] module defines the JSON instance format shared by the
//! CLI and the browser demo; [`analysis`] drives whole-instance reports.

pub mod algebra;
pub mod analysis;
pub mod complexes;
pub mod components;
pub mod counting;
pub mod document;
pub mod error;
pub mod field;
pub mod matrix;
pub mod realization;
pub mod rep;
pub mod rng;
#[cfg(test)]
pub(crate) mod testutil;

pub use algebra::{Algebra, Arrow, CartanMatrix, DimVec, Quiver, Relation};
pub use error::Error;
pub use field::{Field, Scalar};
pub use matrix::Mat;
pub use rng::Rng;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod shared_state {
    // all values are immutable after construction; concurrent reads are
    // free, and the compiler should keep it that way
    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn core_types_are_send_and_sync() {
        assert_send_sync::<crate::Algebra>();
        assert_send_sync::<crate::rep::Representation>();
        assert_send_sync::<crate::rep::GradedMap>();
        assert_send_sync::<crate::complexes::ComplexPoint>();
        assert_send_sync::<crate::complexes::StrataProfile>();
        assert_send_sync::<crate::realization::RealizationPoint>();
        assert_send_sync::<crate::Mat>();
    }
}
