//! Algebraic properties of colorings and consistency of search results.

mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use morphic::arithmetic::in_s_set;
use morphic::solver::{compute_n, solve};
use morphic::{
    all_triples, exists_avoiding, s_decompose, sieve, Certificate, Instance, MorphicColoring,
    PrimeSet, SearchOptions,
};

fn set(v: &[u64]) -> PrimeSet {
    PrimeSet::new(v.iter().copied()).unwrap()
}

/// A P0-coloring with random values on every `S(P0)` element up to `bound`.
fn random_partial(rng: &mut ChaCha8Rng, m: u32, p0: &PrimeSet, bound: u64) -> MorphicColoring {
    let assignment: BTreeMap<u64, u32> = (2..=bound)
        .filter(|&q| in_s_set(q, p0))
        .map(|q| (q, rng.gen_range(0..m)))
        .collect();
    MorphicColoring::partial(m, p0.clone(), assignment).unwrap()
}

fn random_standard(rng: &mut ChaCha8Rng, m: u32, bound: u64) -> MorphicColoring {
    let assignment = sieve(bound).into_iter().map(|p| (p, rng.gen_range(0..m))).collect();
    MorphicColoring::standard(m, assignment).unwrap()
}

fn touches(n: u64, p0: &PrimeSet) -> bool {
    p0.iter().any(|p| n.is_multiple_of(p))
}

/// The smooth part is one variable, so additivity holds across coprime
/// factors as long as at most one of them meets `P0`.
#[test]
fn additive_on_coprime_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (m, p0) in [(2, set(&[2, 3, 5])), (3, set(&[2, 7])), (4, set(&[]))] {
        let f = random_partial(&mut rng, m, &p0, 500 * 500);
        for x in 1..=500u64 {
            for y in x..=500u64 {
                if common::gcd(x, y) != 1 || (touches(x, &p0) && touches(y, &p0)) {
                    continue;
                }
                let lhs = f.eval(x * y).unwrap();
                let rhs = f.eval(x).unwrap() + f.eval(y).unwrap();
                assert_eq!(lhs, rhs, "x {x}, y {y}, P0 {p0}");
            }
        }
    }
}

#[test]
fn standard_colorings_are_fully_additive() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for m in [2, 3, 7] {
        let f = random_standard(&mut rng, m, 500);
        for x in 1..=500u64 {
            for y in x..=500u64 {
                assert_eq!(f.eval(x * y).unwrap(), f.eval(x).unwrap() + f.eval(y).unwrap());
            }
        }
    }
}

#[test]
fn smooth_part_is_not_split() {
    let p0 = set(&[2, 3]);
    let mut values = BTreeMap::new();
    values.insert(2, 1);
    values.insert(3, 1);
    values.insert(6, 1);
    let f = MorphicColoring::partial(2, p0, values).unwrap();
    assert_eq!(f.eval(6).unwrap().value(), 1);
    assert_eq!((f.eval(2).unwrap() + f.eval(3).unwrap()).value(), 0);
}

#[test]
fn standard_mod_2_ignores_squares() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let f = random_standard(&mut rng, 2, 100 * 100 * 100);
    for n in 1..=100u64 {
        for k in 1..=100u64 {
            assert_eq!(f.eval(n * k * k), f.eval(n), "n {n}, k {k}");
        }
    }
}

#[test]
fn standard_monochromatic_iff_primitive_part_is() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let triples = all_triples(1000);
    for m in [2, 3, 5] {
        for _ in 0..10 {
            let f = random_standard(&mut rng, m, 1000);
            for t in &triples {
                assert_eq!(
                    f.is_monochromatic(t),
                    f.is_monochromatic(&t.primitive_part()),
                    "{t} under m = {m}"
                );
            }
        }
    }
}

#[test]
fn automorphisms_preserve_monochromatic_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let triples = all_triples(600);
    for (m, units) in [(3, vec![2]), (5, vec![2, 3, 4]), (6, vec![5]), (8, vec![3, 5, 7])] {
        let f = random_partial(&mut rng, m, &set(&[2, 3]), 600);
        for u in units {
            let g = f.apply_automorphism(u).unwrap();
            for t in &triples {
                assert_eq!(f.is_monochromatic(t), g.is_monochromatic(t));
            }
        }
        assert!(f.apply_automorphism(m).is_err());
    }
}

#[test]
fn smaller_prime_set_colorings_lift() {
    // every P0-coloring is a P1-coloring when P0 is inside P1
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (small, big) in [(set(&[2]), set(&[2, 3, 5])), (set(&[]), set(&[3, 7])), (set(&[3]), set(&[2, 3, 11]))] {
        let f = random_partial(&mut rng, 2, &small, 2000);
        let lifted: BTreeMap<u64, u32> = (2..=2000)
            .filter(|&q| in_s_set(q, &big))
            .map(|q| (q, f.eval(q).unwrap().value()))
            .collect();
        let g = MorphicColoring::partial(2, big.clone(), lifted).unwrap();
        for n in 1..=2000 {
            assert_eq!(f.eval(n), g.eval(n), "n {n}");
        }
    }
}

#[test]
fn search_is_deterministic() {
    let p0 = set(&[2, 3, 5]);
    for limit in [300, 532, 533] {
        let inst = Instance::new(&p0, 2, limit).unwrap();
        let (a, sa) = solve(&inst, &SearchOptions::new()).unwrap();
        let (b, sb) = solve(&inst, &SearchOptions::new()).unwrap();
        assert_eq!(a, b);
        assert_eq!((sa.nodes, sa.backtracks), (sb.nodes, sb.backtracks));
    }
    let x = compute_n(&set(&[2, 3, 13]), 2, 1000).unwrap();
    let y = compute_n(&set(&[2, 3, 13]), 2, 1000).unwrap();
    assert_eq!(x.value, y.value);
    assert_eq!(x.certificate.to_json(), y.certificate.to_json());
}

#[test]
fn unavoidability_is_closed_upward() {
    // once no coloring avoids [1, M], none avoids a longer interval
    for (p0, n) in [(set(&[2, 3, 5]), 532), (set(&[2, 3, 13]), 544)] {
        assert!(exists_avoiding(&p0, 2, n).unwrap().is_some());
        for limit in [n + 1, n + 7, n + 40, 1000] {
            assert!(exists_avoiding(&p0, 2, limit).unwrap().is_none(), "{p0} at {limit}");
        }
        let cert = exists_avoiding(&p0, 2, n).unwrap().unwrap();
        for shorter in [5, 100, n - 1] {
            let c = Certificate::avoiding(cert.coloring.clone(), shorter);
            c.verify().unwrap();
        }
    }
}

#[test]
fn n_grows_with_the_prime_set() {
    let chain = [set(&[2, 3, 5]), set(&[2, 3, 5, 7]), set(&[2, 3, 5, 7, 11])];
    let values: Vec<u64> = chain
        .iter()
        .map(|p| compute_n(p, 2, 1000).unwrap().value.value())
        .collect();
    assert!(values.windows(2).all(|w| w[0] <= w[1]), "{values:?}");
}

proptest! {
    #[test]
    fn certificate_json_round_trips(
        values in proptest::collection::btree_map(2u64..400, 0u32..5, 0..40),
        end in 1u64..400,
    ) {
        let p0 = set(&[2, 3]);
        let values: BTreeMap<u64, u32> =
            values.into_iter().filter(|&(q, _)| in_s_set(q, &p0)).collect();
        let cert = Certificate::avoiding(MorphicColoring::partial(5, p0, values).unwrap(), end);
        let json = cert.to_json();
        let back = Certificate::from_json(&json).unwrap();
        prop_assert_eq!(&back, &cert);
        prop_assert_eq!(back.to_json(), json);
    }

    #[test]
    fn decomposition_reassembles(n in 1u64..1_000_000, mask in 0u32..64) {
        let primes = [2u64, 3, 5, 7, 11, 13];
        let p0 = PrimeSet::new(primes.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p)).unwrap();
        let parts = s_decompose(n, &p0);
        prop_assert_eq!(parts.iter().product::<u64>(), n);
        for q in &parts {
            prop_assert!(in_s_set(*q, &p0));
        }
        let expected = common::fact(n, p0.as_slice());
        let mut sorted = parts.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, expected);
    }
}
