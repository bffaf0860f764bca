//! `Z2` filtered chain complexes, chain maps and direct limits.

mod complex;
mod limit;
pub mod models;
mod z2;

pub use complex::{
    check_square, filtration_subquotient, homology, mutate, random_complex, total_dim, validate_complex, ChainMap,
    ChainMapReport, FilteredZ2Complex, Generator, Mutation, SquareReport, ValidationReport, Violation, ViolationKind,
};
pub use limit::{direct_limit, DirectedSystem, ExtraMap, LimitReport};
pub use z2::Z2Matrix;

/// Consecutive equal stages required before a limit is reported as stable.
pub const DEFAULT_WINDOW: usize = 3;
