//! Colorings of the positive integers into `Z/mZ` that are determined by a
//! finite table of values: on `S(P0)` for partial morphisms, on primes for
//! standard morphisms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arithmetic::{in_s_set, is_prime, s_decompose, Factorization, PrimeSet};
use crate::error::{Error, Result};
use crate::triples::{all_triples, Triple};

/// An element of the cyclic group `Z/mZ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    value: u32,
    modulus: u32,
}

impl GroupElement {
    pub fn new(value: u32, modulus: u32) -> Self {
        assert!(modulus >= 2);
        Self {
            value: value % modulus,
            modulus,
        }
    }

    pub fn zero(modulus: u32) -> Self {
        Self::new(0, modulus)
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn times(self, k: u64) -> Self {
        Self::new(((self.value as u64 * (k % self.modulus as u64)) % self.modulus as u64) as u32, self.modulus)
    }
}

impl Add for GroupElement {
    type Output = GroupElement;

    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Self::new(self.value + rhs.value, self.modulus)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColoringKind {
    /// Values on `S(P0)`; `f(n)` is the sum over the maximal `S(P0)` factors.
    Partial,
    /// Values on primes; `f(n) = sum v_p(n) f(p)`.
    Standard,
}

/// A (possibly partial) morphic coloring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphicColoring {
    modulus: u32,
    p0: PrimeSet,
    kind: ColoringKind,
    assignment: BTreeMap<u64, u32>,
}

impl MorphicColoring {
    /// A `P0`-partial morphism given by its values on elements of `S(P0)`.
    pub fn partial(modulus: u32, p0: PrimeSet, assignment: BTreeMap<u64, u32>) -> Result<Self> {
        check_modulus(modulus)?;
        for (&q, &v) in &assignment {
            if !in_s_set(q, &p0) {
                return Err(Error::MalformedCertificate(format!("{q} is not in S({p0})")));
            }
            check_value(v, modulus)?;
        }
        Ok(Self {
            modulus,
            p0,
            kind: ColoringKind::Partial,
            assignment,
        })
    }

    /// A monoid morphism given by its values on primes.
    pub fn standard(modulus: u32, assignment: BTreeMap<u64, u32>) -> Result<Self> {
        check_modulus(modulus)?;
        for (&p, &v) in &assignment {
            if !is_prime(p) {
                return Err(Error::MalformedCertificate(format!("{p} is not prime")));
            }
            check_value(v, modulus)?;
        }
        Ok(Self {
            modulus,
            p0: PrimeSet::empty(),
            kind: ColoringKind::Standard,
            assignment,
        })
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn p0(&self) -> &PrimeSet {
        &self.p0
    }

    pub fn kind(&self) -> ColoringKind {
        self.kind
    }

    pub fn assignment(&self) -> &BTreeMap<u64, u32> {
        &self.assignment
    }

    pub fn get(&self, key: u64) -> Option<GroupElement> {
        self.assignment
            .get(&key)
            .map(|&v| GroupElement::new(v, self.modulus))
    }

    /// The keys `f(n)` depends on. For standard colorings, primes whose
    /// exponent is a multiple of the modulus are left out.
    pub fn variables_of(&self, n: u64) -> Vec<u64> {
        match self.kind {
            ColoringKind::Partial => s_decompose(n, &self.p0),
            ColoringKind::Standard => Factorization::of(n)
                .factors()
                .iter()
                .filter(|&&(_, e)| e % self.modulus != 0)
                .map(|&(p, _)| p)
                .collect(),
        }
    }

    /// Color of `n`, or `None` when a needed value is unassigned.
    pub fn eval(&self, n: u64) -> Option<GroupElement> {
        let zero = GroupElement::zero(self.modulus);
        match self.kind {
            ColoringKind::Partial => s_decompose(n, &self.p0)
                .into_iter()
                .try_fold(zero, |acc, q| Some(acc + self.get(q)?)),
            ColoringKind::Standard => Factorization::of(n)
                .factors()
                .iter()
                .filter(|&&(_, e)| e % self.modulus != 0)
                .try_fold(zero, |acc, &(p, e)| Some(acc + self.get(p)?.times(e as u64))),
        }
    }

    /// `Some(true)` iff all three members share a color; `None` if any
    /// member is undefined.
    pub fn is_monochromatic(&self, t: &Triple) -> Option<bool> {
        let a = self.eval(t.a)?;
        let b = self.eval(t.b)?;
        let c = self.eval(t.c)?;
        Some(a == b && b == c)
    }

    /// Composes with the automorphism `x -> multiplier * x` of `Z/mZ`.
    pub fn apply_automorphism(&self, multiplier: u32) -> Result<Self> {
        if crate::arithmetic::gcd(multiplier as u64, self.modulus as u64) != 1 {
            return Err(Error::NotAUnit {
                multiplier,
                modulus: self.modulus,
            });
        }
        let m = self.modulus as u64;
        let assignment = self
            .assignment
            .iter()
            .map(|(&k, &v)| (k, ((v as u64 * multiplier as u64) % m) as u32))
            .collect();
        Ok(Self {
            assignment,
            ..self.clone()
        })
    }

    /// Drops every key not needed to color the members of `triples`.
    pub fn restricted_to(&self, triples: &[Triple]) -> Self {
        let needed: BTreeSet<u64> = triples
            .iter()
            .flat_map(|t| t.members())
            .flat_map(|n| self.variables_of(n))
            .collect();
        let assignment = self
            .assignment
            .iter()
            .filter(|(k, _)| needed.contains(k))
            .map(|(&k, &v)| (k, v))
            .collect();
        Self {
            assignment,
            ..self.clone()
        }
    }
}

fn check_modulus(m: u32) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidModulus(m));
    }
    Ok(())
}

fn check_value(v: u32, m: u32) -> Result<()> {
    if v >= m {
        return Err(Error::MalformedCertificate(format!("value {v} out of range for Z/{m}Z")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    Avoiding,
    NoneExists,
}

/// A coloring together with the interval `[1, interval_end]` it is claimed
/// to handle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub coloring: MorphicColoring,
    pub interval_end: u64,
    pub claim: Claim,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("{triple} is monochromatic with color {color}")]
    Monochromatic { triple: Triple, color: u32 },
    #[error("member {member} of {triple} has no color")]
    Undefined { triple: Triple, member: u64 },
    #[error("certificate does not claim an avoiding coloring")]
    NotAvoidingClaim,
    #[error("triple {triple} lies outside [1,{interval_end}]")]
    OutsideInterval { triple: Triple, interval_end: u64 },
}

impl Certificate {
    pub fn avoiding(coloring: MorphicColoring, interval_end: u64) -> Self {
        Self {
            coloring,
            interval_end,
            claim: Claim::Avoiding,
        }
    }

    /// Checks the certificate against a freshly enumerated `all_triples`.
    pub fn verify(&self) -> Result<(), VerifyError> {
        verify_certificate(self, &all_triples(self.interval_end))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CertificateJson::from(self)).expect("certificate serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&CertificateJson::from(self)).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wire: CertificateJson = serde_json::from_str(s)?;
        wire.try_into()
    }
}

impl Serialize for Certificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CertificateJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Certificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = CertificateJson::deserialize(d)?;
        wire.try_into().map_err(serde::de::Error::custom)
    }
}

/// Wire form. Field order is fixed and the assignment is sorted by key, so
/// equal certificates serialize to identical bytes.
#[derive(Serialize, Deserialize)]
struct CertificateJson {
    m: u32,
    p0: Vec<u64>,
    kind: ColoringKind,
    interval: [u64; 2],
    assignment: Vec<(u64, u32)>,
    #[serde(default, skip_serializing_if = "is_avoiding")]
    claim: Option<Claim>,
}

fn is_avoiding(c: &Option<Claim>) -> bool {
    matches!(c, None | Some(Claim::Avoiding))
}

impl From<&Certificate> for CertificateJson {
    fn from(c: &Certificate) -> Self {
        Self {
            m: c.coloring.modulus,
            p0: c.coloring.p0.as_slice().to_vec(),
            kind: c.coloring.kind,
            interval: [1, c.interval_end],
            assignment: c.coloring.assignment.iter().map(|(&k, &v)| (k, v)).collect(),
            claim: Some(c.claim),
        }
    }
}

impl TryFrom<CertificateJson> for Certificate {
    type Error = Error;

    fn try_from(w: CertificateJson) -> Result<Self> {
        if w.interval[0] != 1 {
            return Err(Error::MalformedCertificate(format!(
                "interval must start at 1, got {}",
                w.interval[0]
            )));
        }
        let mut assignment = BTreeMap::new();
        for (k, v) in w.assignment {
            if assignment.insert(k, v).is_some() {
                return Err(Error::MalformedCertificate(format!("duplicate variable {k}")));
            }
        }
        let coloring = match w.kind {
            ColoringKind::Partial => MorphicColoring::partial(w.m, PrimeSet::new(w.p0)?, assignment)?,
            ColoringKind::Standard => MorphicColoring::standard(w.m, assignment)?,
        };
        Ok(Certificate {
            coloring,
            interval_end: w.interval[1],
            claim: w.claim.unwrap_or(Claim::Avoiding),
        })
    }
}

/// Checks that no triple is monochromatic and every member is colored.
/// `triples` is expected to be `all_triples(cert.interval_end)`.
pub fn verify_certificate(cert: &Certificate, triples: &[Triple]) -> Result<(), VerifyError> {
    if cert.claim != Claim::Avoiding {
        return Err(VerifyError::NotAvoidingClaim);
    }
    for t in triples {
        if t.c > cert.interval_end {
            return Err(VerifyError::OutsideInterval {
                triple: *t,
                interval_end: cert.interval_end,
            });
        }
        let mut colors = [0u32; 3];
        for (slot, n) in colors.iter_mut().zip(t.members()) {
            *slot = cert
                .coloring
                .eval(n)
                .ok_or(VerifyError::Undefined {
                    triple: *t,
                    member: n,
                })?
                .value();
        }
        if colors[0] == colors[1] && colors[1] == colors[2] {
            return Err(VerifyError::Monochromatic {
                triple: *t,
                color: colors[0],
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triples::primitive_triples;

    fn p(v: &[u64]) -> PrimeSet {
        PrimeSet::new(v.iter().copied()).unwrap()
    }

    fn standard_from_bits(bits: &str) -> MorphicColoring {
        let primes = crate::arithmetic::first_primes(bits.len());
        let assignment = primes
            .iter()
            .zip(bits.bytes())
            .map(|(&p, b)| (p, (b - b'0') as u32))
            .collect();
        MorphicColoring::standard(2, assignment).unwrap()
    }

    #[test]
    fn partial_eval_sums_over_factors() {
        let f = MorphicColoring::partial(
            2,
            p(&[2, 3, 5]),
            BTreeMap::from([(120, 1), (49, 0), (11, 1)]),
        )
        .unwrap();
        assert_eq!(f.eval(64680).unwrap().value(), 0);
        assert_eq!(f.eval(1).unwrap().value(), 0);
        assert_eq!(f.eval(7), None);
    }

    #[test]
    fn rejects_keys_outside_s_set() {
        assert!(MorphicColoring::partial(2, p(&[2, 3]), BTreeMap::from([(10, 1)])).is_err());
        assert!(MorphicColoring::standard(2, BTreeMap::from([(4, 1)])).is_err());
        assert!(MorphicColoring::standard(3, BTreeMap::from([(2, 3)])).is_err());
        assert!(MorphicColoring::standard(1, BTreeMap::new()).is_err());
    }

    #[test]
    fn w1_colors_the_85th_triple_black() {
        let f = standard_from_bits("0101111101001");
        for n in [308, 435, 533] {
            assert_eq!(f.eval(n).unwrap().value(), 0, "{n}");
        }
        let t = Triple::new(308, 435, 533).unwrap();
        assert_eq!(f.is_monochromatic(&t), Some(true));
    }

    #[test]
    fn parity_coloring_avoids_primitive_triples() {
        // f(2^v) = 1, f(p^v) = 0 otherwise, as an empty-set partial morphism
        let limit = 1000;
        let mut assignment = BTreeMap::new();
        for t in primitive_triples(limit) {
            for n in t.members() {
                for q in s_decompose(n, &PrimeSet::empty()) {
                    assignment.insert(q, u32::from(q % 2 == 0));
                }
            }
        }
        let f = MorphicColoring::partial(2, PrimeSet::empty(), assignment).unwrap();
        for t in primitive_triples(limit) {
            assert_eq!(f.is_monochromatic(&t), Some(false), "{t}");
        }
    }

    #[test]
    fn undefined_propagates() {
        let f = MorphicColoring::partial(2, p(&[2]), BTreeMap::from([(4, 0), (5, 1)])).unwrap();
        assert_eq!(f.is_monochromatic(&Triple::new(3, 4, 5).unwrap()), None);
    }

    #[test]
    fn automorphisms() {
        let f = MorphicColoring::standard(3, BTreeMap::from([(2, 1), (3, 2), (5, 0)])).unwrap();
        let g = f.apply_automorphism(2).unwrap();
        assert_eq!(g.assignment(), &BTreeMap::from([(2, 2), (3, 1), (5, 0)]));
        assert!(f.apply_automorphism(3).is_err());
        let h = MorphicColoring::standard(2, BTreeMap::from([(2, 1)])).unwrap();
        assert_eq!(h.apply_automorphism(1).unwrap(), h);
        assert!(h.apply_automorphism(2).is_err());
    }

    #[test]
    fn empty_interval_certificate() {
        let f = MorphicColoring::partial(2, p(&[2, 3, 5]), BTreeMap::new()).unwrap();
        for m in 1..5 {
            assert_eq!(Certificate::avoiding(f.clone(), m).verify(), Ok(()));
        }
        assert!(matches!(
            Certificate::avoiding(f, 5).verify(),
            Err(VerifyError::Undefined { member: 3, .. })
        ));
    }

    #[test]
    fn json_is_canonical() {
        let f = MorphicColoring::partial(
            2,
            p(&[5, 3, 2]),
            BTreeMap::from([(5, 1), (3, 0), (4, 1)]),
        )
        .unwrap();
        let cert = Certificate::avoiding(f, 5);
        let s = cert.to_json();
        assert_eq!(
            s,
            r#"{"m":2,"p0":[2,3,5],"kind":"partial","interval":[1,5],"assignment":[[3,0],[4,1],[5,1]]}"#
        );
        assert_eq!(Certificate::from_json(&s).unwrap(), cert);
        assert!(Certificate::from_json(r#"{"m":2,"p0":[2],"kind":"partial","interval":[2,5],"assignment":[]}"#).is_err());
    }

    #[test]
    fn monochromatic_failure_is_reported() {
        let f = MorphicColoring::partial(2, p(&[2]), BTreeMap::from([(3, 0), (4, 0), (5, 0)])).unwrap();
        let err = Certificate::avoiding(f, 5).verify().unwrap_err();
        assert_eq!(
            err,
            VerifyError::Monochromatic {
                triple: Triple::new(3, 4, 5).unwrap(),
                color: 0
            }
        );
    }
}
