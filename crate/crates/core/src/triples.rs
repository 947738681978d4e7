//! Pythagorean triple enumeration.
//!
//! Primitive triples come from the `(m^2 - n^2, 2mn, m^2 + n^2)`
//! parametrization and are ordered by hypotenuse, then by the generator `m`.
//! Under that order `(308, 435, 533)` (generator `m = 22`) precedes
//! `(92, 525, 533)` (`m = 23`).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arithmetic::{gcd, residue_support, PrimeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub primitive: bool,
    /// `(m, n)` with `c = m^2 + n^2`; only set for primitive triples.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub generator: Option<(u64, u64)>,
}

impl Triple {
    /// Builds a triple from two legs and a hypotenuse, sorting the legs. The
    /// equation is checked; primitivity is computed.
    pub fn new(x: u64, y: u64, c: u64) -> Option<Self> {
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        if a == 0 || a * a + b * b != c * c {
            return None;
        }
        let mut t = Self {
            a,
            b,
            c,
            primitive: gcd(gcd(a, b), c) == 1,
            generator: None,
        };
        t.generator = generator_of(&t);
        Some(t)
    }

    pub fn members(&self) -> [u64; 3] {
        [self.a, self.b, self.c]
    }

    /// `d * self`, marked non-primitive when `d > 1`.
    pub fn scaled(&self, d: u64) -> Self {
        if d == 1 {
            return *self;
        }
        Self {
            a: self.a * d,
            b: self.b * d,
            c: self.c * d,
            primitive: false,
            generator: None,
        }
    }

    /// Divides out `gcd(a, b, c)`.
    pub fn primitive_part(&self) -> Self {
        let g = gcd(gcd(self.a, self.b), self.c);
        Triple::new(self.a / g, self.b / g, self.c / g).expect("reduced triple")
    }

    /// Member set, ignoring flags.
    pub fn key(&self) -> (u64, u64, u64) {
        (self.a, self.b, self.c)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

fn generator_of(t: &Triple) -> Option<(u64, u64)> {
    if !t.primitive {
        return None;
    }
    let even_leg = if t.a.is_multiple_of(2) { t.a } else { t.b };
    (1u64..)
        .take_while(|n| 2 * n * n < t.c)
        .find_map(|n| {
            let m = isqrt(t.c - n * n);
            (m * m + n * n == t.c && 2 * m * n == even_leg).then_some((m, n))
        })
}

fn isqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// All primitive triples with hypotenuse at most `limit`, ordered by
/// `(c, m)`.
pub fn primitive_triples(limit: u64) -> Vec<Triple> {
    let mut out = Vec::new();
    let mut m = 2u64;
    while m * m < limit {
        let mut n = 1 + (m % 2);
        while n < m && m * m + n * n <= limit {
            if gcd(m, n) == 1 {
                let c = m * m + n * n;
                let mut t = Triple::new(m * m - n * n, 2 * m * n, c).expect("parametrized triple");
                t.generator = Some((m, n));
                out.push(t);
            }
            n += 2;
        }
        m += 1;
    }
    out.sort_by_key(|t| (t.c, t.generator.map(|g| g.0)));
    out
}

/// Every Pythagorean triple inside `[1, limit]`, ordered by `(c, a)`.
pub fn all_triples(limit: u64) -> Vec<Triple> {
    let mut out = Vec::new();
    for t in primitive_triples(limit) {
        let mut d = 1;
        while d * t.c <= limit {
            out.push(t.scaled(d));
            d += 1;
        }
    }
    out.sort_by_key(|t| (t.c, t.a));
    out
}

/// Keeps the triples whose three members have odd support inside `primes`.
pub fn restrict_to_oddsupp(triples: &[Triple], primes: &PrimeSet) -> Vec<Triple> {
    triples
        .iter()
        .filter(|t| {
            t.members()
                .iter()
                .all(|&n| residue_support(n, 2).iter().all(|&p| primes.contains(p)))
        })
        .copied()
        .collect()
}

/// Sorted list of distinct hypotenuses up to `limit`.
pub fn hypotenuses(limit: u64) -> Vec<u64> {
    let mut cs: Vec<u64> = all_triples(limit).iter().map(|t| t.c).collect();
    cs.dedup();
    cs
}
