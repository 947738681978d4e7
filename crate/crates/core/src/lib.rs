//! Search engine for monochromatic Pythagorean triples under morphic
//! colorings of the positive integers.
//!
//! A `P0`-partial morphism `f: N+ -> Z/mZ` is additive across the split of
//! `n` into its `P0`-smooth part and the prime powers of the other primes,
//! so it is fixed by its values on `S(P0)`. The crate decides whether such a
//! coloring can avoid monochromatic triples on `[1, M]`, computes the
//! largest such `M`, searches standard morphisms, exports instances to
//! DIMACS CNF and runs sweeps over families of prime sets.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod arithmetic;
pub mod cnf;
pub mod coloring;
mod engine;
pub mod error;
pub mod fixtures;
pub mod solver;
pub mod standard;
pub mod sweep;
pub mod triples;

pub use arithmetic::{oddsupp, s_decompose, sieve, supp, PrimeSet};
pub use coloring::{verify_certificate, Certificate, Claim, ColoringKind, GroupElement, MorphicColoring, VerifyError};
pub use engine::Counters;
pub use error::{Error, Result};
pub use solver::{compute_n, exists_avoiding, Instance, NValue, Outcome, SearchOptions, SearchStats};
pub use triples::{all_triples, primitive_triples, restrict_to_oddsupp, Triple};
