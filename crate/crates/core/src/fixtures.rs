//! Published colorings, used as regression fixtures.
//!
//! Primes are addressed by index: `p_1 = 2`, `p_2 = 3`, `p_3 = 5`, ...

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::arithmetic::{first_primes, sieve};
use crate::coloring::{Certificate, MorphicColoring};

/// Raw fixture file for the `Z/3Z` standard morphism.
pub const Z3_MORPHISM_JSON: &str = include_str!("../data/z3_morphism.json");

/// SHA-256 of [`Z3_MORPHISM_JSON`].
pub const Z3_MORPHISM_SHA256: &str =
    "459575393c9ffa5b457f80b3b6a958477afc6a25931f8d604a6d35d80e715957";

/// The two 13-bit vectors `(f(p_1), ..., f(p_13))` of the standard
/// `Z/2Z` morphisms avoiding every triple of `T13`.
pub const W1: &str = "0101111101001";
pub const W2: &str = "0101111111001";

#[derive(Deserialize)]
struct Z3File {
    modulus: u32,
    interval: u64,
    ones: Vec<usize>,
    twos: Vec<usize>,
}

fn z3_file() -> Z3File {
    serde_json::from_str(Z3_MORPHISM_JSON).expect("fixture parses")
}

/// Indices `i` with `f(p_i) = 1` and with `f(p_i) = 2`.
pub fn z3_index_sets() -> (Vec<usize>, Vec<usize>) {
    let f = z3_file();
    (f.ones, f.twos)
}

/// The standard morphism into `Z/3Z` with no monochromatic triple on
/// `[1, 4632]`. Every prime up to 4632 is assigned; unlisted ones get 0.
pub fn published_z3_morphism() -> MorphicColoring {
    let f = z3_file();
    let primes = sieve(f.interval);
    let mut assignment: BTreeMap<u64, u32> = primes.iter().map(|&p| (p, 0)).collect();
    for (indices, value) in [(&f.ones, 1), (&f.twos, 2)] {
        for &i in indices {
            assignment.insert(primes[i - 1], value);
        }
    }
    MorphicColoring::standard(f.modulus, assignment).expect("valid fixture")
}

pub fn published_z3_certificate() -> Certificate {
    Certificate::avoiding(published_z3_morphism(), z3_file().interval)
}

/// Forced values of a family of `Z/2Z` standard morphisms avoiding all
/// primitive triples in `[1, 532]`; all other primes are free.
#[derive(Clone, Copy, Debug)]
pub struct PrimeConstraints {
    pub zeros: &'static [usize],
    pub ones: &'static [usize],
}

pub const FAMILY_W1: PrimeConstraints = PrimeConstraints {
    zeros: &[1, 3, 9, 11, 12, 18, 21, 30, 57, 74, 80, 89],
    ones: &[2, 4, 5, 6, 7, 8, 10, 13, 16, 24, 26, 55, 65],
};

// The published list leaves out indices 10 and 13, but every avoiding
// morphism extends `W2`, which sets both to 1.
pub const FAMILY_W2: PrimeConstraints = PrimeConstraints {
    zeros: &[1, 3, 11, 12, 18, 21, 25, 30, 59, 74, 89],
    ones: &[2, 4, 5, 6, 7, 8, 9, 10, 13, 24, 26, 55, 65, 70],
};

impl PrimeConstraints {
    /// A standard morphism on all primes up to `bound`, with `free(p)`
    /// choosing the value of every unconstrained prime.
    pub fn coloring(&self, bound: u64, mut free: impl FnMut(u64) -> u32) -> MorphicColoring {
        let primes = sieve(bound);
        let mut assignment: BTreeMap<u64, u32> =
            primes.iter().map(|&p| (p, free(p) % 2)).collect();
        let largest = self.zeros.iter().chain(self.ones).copied().max().unwrap_or(0);
        let indexed = first_primes(largest);
        for (indices, value) in [(self.zeros, 0), (self.ones, 1)] {
            for &i in indices {
                assignment.insert(indexed[i - 1], value);
            }
        }
        MorphicColoring::standard(2, assignment).expect("valid constraints")
    }

    /// The first 13 forced values as a bit string.
    pub fn prefix_bits(&self) -> String {
        (1..=13)
            .map(|i| {
                if self.ones.contains(&i) {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }
}
