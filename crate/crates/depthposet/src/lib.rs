//! Depth posets of filtered Lefschetz complexes.
//!
//! A Lefschetz complex is a set of cells with a mod-2 facet relation between
//! consecutive dimensions. A filter (an injective cell map that grows along
//! the facet relation) orders the cells and pairs them up into birth-death
//! pairs. The *depth poset* records which shallow-pair cancellations must
//! happen before which others; it is computed here as the transitive closure
//! of two relations extracted from a pair of dual matrix reductions
//! (bottom-to-top over columns, left-to-right over rows).
//!
//! The [`homotopy`] module walks the straight-line homotopy between two
//! filters one adjacent transposition at a time, classifies every
//! transposition, and checks the predecessor/successor update equations at
//! every switch. The [`random`] and [`experiments`] modules generate seeded
//! random filters on cubical tori and drive batch statistics.

pub mod complex;
pub mod depth;
pub mod experiments;
pub mod filter;
pub mod fixtures;
pub mod homotopy;
pub mod io;
pub mod matrix;
pub mod random;
pub mod reduction;
pub mod torus;

mod error;

pub use complex::{CellIdx, LefschetzComplex};
pub use depth::{poset_stats, ArcSet, PairRelation, PosetStats, StatsRow};
pub use error::{Error, Result};
pub use filter::{CellOrder, Filter};
pub use homotopy::{CaseLabel, HomotopyConfig, HomotopyRun, SwitchType, TranspositionEvent};
pub use reduction::{BirthDeathPair, PersistenceDiagram, ReductionState};

/// Exact scalar used for filter values and homotopy parameters.
///
/// Crossing parameters are ratios of filter-value differences, so even dyadic
/// inputs produce general rationals; everything stays exact.
pub type Rational = num_rational::BigRational;

/// Shorthand for building a [`Rational`] from an integer pair.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}
