//! Small-integer number theory: sieving, factorization, supports and the
//! decomposition of an integer into maximal `S(P0)` factors.
//!
//! Everything here works on `u64` values that stay well below `2^32`, so
//! trial division against a sieve is exact and fast enough.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Returns all primes `p <= limit` in ascending order.
pub fn sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// Returns the `count` first primes.
pub fn first_primes(count: usize) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    let mut bound = 16u64;
    loop {
        let primes = sieve(bound);
        if primes.len() >= count {
            return primes[..count].to_vec();
        }
        bound *= 2;
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Prime factorization `n = prod p^e`, primes strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn of(n: u64) -> Self {
        assert!(n >= 1, "cannot factor 0");
        let mut rest = n;
        let mut factors = Vec::new();
        let mut d = 2u64;
        while d * d <= rest {
            if rest.is_multiple_of(d) {
                let mut e = 0;
                while rest.is_multiple_of(d) {
                    rest /= d;
                    e += 1;
                }
                factors.push((d, e));
            }
            d += if d == 2 { 1 } else { 2 };
        }
        if rest > 1 {
            factors.push((rest, 1));
        }
        Self { n, factors }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Exponent of `p` in `n`.
    pub fn valuation(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }
}

/// The set of prime factors of `n`.
pub fn supp(n: u64) -> BTreeSet<u64> {
    Factorization::of(n).factors.iter().map(|&(p, _)| p).collect()
}

/// Primes dividing `n` to an odd power.
pub fn oddsupp(n: u64) -> BTreeSet<u64> {
    residue_support(n, 2)
}

/// Primes whose exponent in `n` is nonzero modulo `modulus`. For
/// `modulus = 2` this is the odd support.
pub fn residue_support(n: u64, modulus: u32) -> BTreeSet<u64> {
    Factorization::of(n)
        .factors
        .iter()
        .filter(|&&(_, e)| e % modulus != 0)
        .map(|&(p, _)| p)
        .collect()
}

/// A finite set of primes, kept sorted and duplicate-free.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct PrimeSet(Vec<u64>);

impl PrimeSet {
    pub fn new<I: IntoIterator<Item = u64>>(primes: I) -> Result<Self, Error> {
        let mut v: Vec<u64> = primes.into_iter().collect();
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidPrimeSet(format!("duplicate prime {}", w[0])));
        }
        if let Some(&bad) = v.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::InvalidPrimeSet(format!("{bad} is not prime")));
        }
        Ok(Self(v))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// All primes up to `bound`.
    pub fn up_to(bound: u64) -> Self {
        Self(sieve(bound))
    }

    /// The `count` first primes `p_1, ..., p_count`.
    pub fn first(count: usize) -> Self {
        Self(first_primes(count))
    }

    pub fn contains(&self, p: u64) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().copied()
    }

    pub fn is_subset(&self, other: &PrimeSet) -> bool {
        self.0.iter().all(|&p| other.contains(p))
    }

    /// Parses a comma separated list such as `2,3,5`. The empty string is the
    /// empty set.
    pub fn parse(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::empty());
        }
        let primes = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::InvalidPrimeSet(format!("{t:?}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(primes)
    }
}

impl TryFrom<Vec<u64>> for PrimeSet {
    type Error = Error;

    fn try_from(v: Vec<u64>) -> Result<Self, Error> {
        Self::new(v)
    }
}

impl From<PrimeSet> for Vec<u64> {
    fn from(p: PrimeSet) -> Vec<u64> {
        p.0
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// Splits `n` into its maximal factors in `S(P0)`: the `P0`-smooth part of
/// `n` (when it exceeds 1) and one full prime power `p^v` for each prime
/// `p` outside `P0`. The result is sorted ascending; `n = 1` gives an empty
/// decomposition.
pub fn s_decompose(n: u64, p0: &PrimeSet) -> Vec<u64> {
    let f = Factorization::of(n);
    let mut smooth = 1u64;
    let mut parts = Vec::with_capacity(f.factors.len());
    for &(p, e) in &f.factors {
        let pe = p.pow(e);
        if p0.contains(p) {
            smooth *= pe;
        } else {
            parts.push(pe);
        }
    }
    if smooth > 1 {
        parts.push(smooth);
    }
    parts.sort_unstable();
    parts
}

/// Whether `q` belongs to `S(P0)`.
pub fn in_s_set(q: u64, p0: &PrimeSet) -> bool {
    if q < 2 {
        return false;
    }
    let f = Factorization::of(q);
    f.factors.iter().all(|&(p, _)| p0.contains(p))
        || (f.factors.len() == 1 && !p0.contains(f.factors[0].0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(v: &[u64]) -> BTreeSet<u64> {
        v.iter().copied().collect()
    }

    #[test]
    fn sieve_small_and_published_counts() {
        assert_eq!(sieve(10), vec![2, 3, 5, 7]);
        let p41 = sieve(41);
        assert_eq!(p41.len(), 13);
        assert_eq!(*p41.last().unwrap(), 41);
        assert_eq!(sieve(100).len(), 25);
        assert!(sieve(1).is_empty());
        assert!(sieve(0).is_empty());
        assert_eq!(first_primes(13), p41);
    }

    #[test]
    fn supports() {
        assert_eq!(supp(60), set(&[2, 3, 5]));
        assert!(supp(1).is_empty());
        assert_eq!(supp(49), set(&[7]));
        assert_eq!(oddsupp(12), set(&[3]));
        assert!(oddsupp(36).is_empty());
        assert_eq!(oddsupp(308), set(&[7, 11]));
    }

    #[test]
    fn decompose_examples() {
        let p235 = PrimeSet::new([2, 3, 5]).unwrap();
        assert_eq!(s_decompose(64680, &p235), vec![11, 49, 120]);
        assert_eq!(s_decompose(533, &p235), vec![13, 41]);
        assert_eq!(s_decompose(97, &p235), vec![97]);
        assert!(s_decompose(1, &p235).is_empty());
    }

    #[test]
    fn prime_set_validation() {
        assert!(PrimeSet::new([2, 4]).is_err());
        assert!(PrimeSet::new([3, 3]).is_err());
        assert_eq!(PrimeSet::parse("5, 2,3").unwrap().as_slice(), &[2, 3, 5]);
        assert!(PrimeSet::parse("").unwrap().is_empty());
        assert!(PrimeSet::parse("2,x").is_err());
        assert_eq!(PrimeSet::new([2, 3, 5]).unwrap().to_string(), "{2,3,5}");
    }

    #[test]
    fn decomposition_extremes() {
        for n in 2..2000u64 {
            let all = PrimeSet::up_to(n);
            assert_eq!(s_decompose(n, &all), vec![n]);
            let mut pp: Vec<u64> = Factorization::of(n)
                .factors()
                .iter()
                .map(|&(p, e)| p.pow(e))
                .collect();
            pp.sort_unstable();
            assert_eq!(s_decompose(n, &PrimeSet::empty()), pp);
        }
    }

    #[test]
    fn refinement_brute_force() {
        // every factor for the larger prime set is a product of factors for
        // the smaller one
        let small = PrimeSet::new([2, 3]).unwrap();
        let large = PrimeSet::new([2, 3, 5, 7]).unwrap();
        for n in 2..=10_000u64 {
            let fine = s_decompose(n, &small);
            for q in s_decompose(n, &large) {
                let prod: u64 = fine.iter().filter(|&&f| q % f == 0).product();
                assert_eq!(prod, q, "n={n} q={q}");
            }
        }
    }

    #[test]
    fn s_set_membership() {
        let p = PrimeSet::new([2, 3]).unwrap();
        assert!(in_s_set(12, &p));
        assert!(in_s_set(25, &p));
        assert!(!in_s_set(10, &p));
        assert!(!in_s_set(1, &p));
        for n in 2..500 {
            for q in s_decompose(n, &p) {
                assert!(in_s_set(q, &p));
            }
        }
    }

    proptest! {
        #[test]
        fn factorization_multiplies_back(n in 1u64..200_000) {
            let f = Factorization::of(n);
            let prod: u64 = f.factors().iter().map(|&(p, e)| p.pow(e)).product();
            prop_assert_eq!(prod, n);
            prop_assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
            prop_assert!(f.factors().iter().all(|&(p, e)| e >= 1 && is_prime(p)));
        }

        #[test]
        fn decomposition_product(n in 2u64..100_000, mask in 0u32..(1 << 10)) {
            let primes = first_primes(10);
            let p0 = PrimeSet::new(
                primes.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p),
            ).unwrap();
            let parts = s_decompose(n, &p0);
            prop_assert_eq!(parts.iter().product::<u64>(), n);
            // pairwise coprime
            for (i, &x) in parts.iter().enumerate() {
                for &y in &parts[i + 1..] {
                    prop_assert_eq!(gcd(x, y), 1);
                }
            }
        }

        #[test]
        fn oddsupp_ignores_squares(n in 1u64..=100, k in 1u64..=100) {
            prop_assert_eq!(oddsupp(n * k * k), oddsupp(n));
        }
    }
}
