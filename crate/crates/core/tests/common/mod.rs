//! Brute-force oracles. Nothing here calls into the library, so the tests
//! compare two independent computations.
#![allow(dead_code)]

/// Every `(a, b, c)` with `a < b`, `a^2 + b^2 = c^2`, `c <= limit`, by
/// exhaustive search.
pub fn brute_triples(limit: u64) -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    for c in 1..=limit {
        for a in 1..c {
            for b in a + 1..c {
                if a * a + b * b == c * c {
                    out.push((a, b, c));
                }
            }
        }
    }
    out
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn brute_primitive(limit: u64) -> Vec<(u64, u64, u64)> {
    brute_triples(limit)
        .into_iter()
        .filter(|&(a, b, _)| gcd(a, b) == 1)
        .collect()
}

pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Maximal `S(P0)` factors: the `P0`-smooth part (if > 1) and `p^e` for
/// the other primes.
pub fn fact(n: u64, p0: &[u64]) -> Vec<u64> {
    let mut smooth = 1;
    let mut out = Vec::new();
    for (p, e) in factor(n) {
        if p0.contains(&p) {
            smooth *= p.pow(e);
        } else {
            out.push(p.pow(e));
        }
    }
    if smooth > 1 {
        out.push(smooth);
    }
    out.sort_unstable();
    out
}

/// Variables of the instance and each triple as three lists of variable
/// indices.
pub fn brute_instance(p0: &[u64], limit: u64) -> (Vec<u64>, Vec<[Vec<usize>; 3]>) {
    let triples = brute_triples(limit);
    let mut vars: Vec<u64> = triples
        .iter()
        .flat_map(|&(a, b, c)| [a, b, c])
        .flat_map(|n| fact(n, p0))
        .collect();
    vars.sort_unstable();
    vars.dedup();
    let idx = |q: u64| vars.binary_search(&q).unwrap();
    let forms = triples
        .iter()
        .map(|&(a, b, c)| [a, b, c].map(|n| fact(n, p0).into_iter().map(idx).collect()))
        .collect();
    (vars, forms)
}

/// Whether some assignment of the variables into `Z/m` leaves no triple
/// monochromatic, by trying all `m^k` of them. `None` if `m^k > max`.
pub fn brute_avoidable(p0: &[u64], m: u32, limit: u64, max: u64) -> Option<bool> {
    let (vars, forms) = brute_instance(p0, limit);
    let total = (m as u64).checked_pow(vars.len() as u32)?;
    if total > max {
        return None;
    }
    let mut values = vec![0u32; vars.len()];
    for code in 0..total {
        let mut c = code;
        for v in values.iter_mut() {
            *v = (c % m as u64) as u32;
            c /= m as u64;
        }
        let ok = forms.iter().all(|f| {
            let col = f
                .each_ref()
                .map(|vs| vs.iter().map(|&i| values[i]).sum::<u32>() % m);
            !(col[0] == col[1] && col[1] == col[2])
        });
        if ok {
            return Some(true);
        }
    }
    Some(false)
}

/// Residue support of `n` modulo `m`: primes whose exponent is not a
/// multiple of `m`, with that exponent reduced.
pub fn residues(n: u64, m: u32) -> Vec<(u64, u32)> {
    factor(n)
        .into_iter()
        .filter(|&(_, e)| e % m != 0)
        .map(|(p, e)| (p, e % m))
        .collect()
}

pub fn first_primes(k: usize) -> Vec<u64> {
    (2..).filter(|&n| factor(n).len() == 1 && factor(n)[0].1 == 1).take(k).collect()
}

/// Primitive triples in `[1, limit]` whose members have residue support
/// inside `primes`.
pub fn covered_primitive(limit: u64, m: u32, primes: &[u64]) -> Vec<(u64, u64, u64)> {
    brute_primitive(limit)
        .into_iter()
        .filter(|&(a, b, c)| {
            [a, b, c]
                .iter()
                .all(|&n| residues(n, m).iter().all(|(p, _)| primes.contains(p)))
        })
        .collect()
}

/// Number of value vectors `primes -> Z/m` under which no triple of
/// `triples` is monochromatic, over all `m^k` vectors.
pub fn count_avoiding_vectors(m: u32, primes: &[u64], triples: &[(u64, u64, u64)]) -> u64 {
    let k = primes.len();
    let mut count = 0;
    for code in 0..(m as u64).pow(k as u32) {
        let mut c = code;
        let vals: Vec<u32> = (0..k)
            .map(|_| {
                let v = (c % m as u64) as u32;
                c /= m as u64;
                v
            })
            .collect();
        let color = |n: u64| {
            residues(n, m)
                .iter()
                .map(|(p, e)| e * vals[primes.iter().position(|q| q == p).unwrap()])
                .sum::<u32>()
                % m
        };
        if triples.iter().all(|&(a, b, c)| {
            let (x, y, z) = (color(a), color(b), color(c));
            !(x == y && y == z)
        }) {
            count += 1;
        }
    }
    count
}

/// The 32 primitive triples in `[1, 532]` with odd support in the first 13
/// primes, as published.
pub const T13: [(u64, u64, u64); 32] = [
    (3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25), (20, 21, 29), (12, 35, 37),
    (9, 40, 41), (33, 56, 65), (16, 63, 65), (13, 84, 85), (36, 77, 85), (44, 117, 125),
    (17, 144, 145), (24, 143, 145), (119, 120, 169), (57, 176, 185), (104, 153, 185),
    (133, 156, 205), (84, 187, 205), (21, 220, 221), (140, 171, 221), (161, 240, 289),
    (204, 253, 325), (36, 323, 325), (135, 352, 377), (152, 345, 377), (87, 416, 425),
    (297, 304, 425), (31, 480, 481), (319, 360, 481), (155, 468, 493), (132, 475, 493),
];
