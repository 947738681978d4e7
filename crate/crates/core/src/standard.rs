//! Search over standard monoid morphisms `f: N+ -> Z/mZ`, which are fixed
//! by their values on primes: `f(n) = sum v_p(n) f(p)`.
//!
//! A standard coloring has a monochromatic triple iff it has a monochromatic
//! primitive one, so only primitive triples are constrained here. Only
//! exponents modulo `m` matter; for `m = 2` this reduces every member to its
//! odd support.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::ControlFlow;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::arithmetic::{sieve, Factorization, PrimeSet};
use crate::coloring::{verify_certificate, Certificate, MorphicColoring};
use crate::engine::{self, AscendHooks, AscentError, Config, Counters, Problem};
use crate::error::{Error, Result};
use crate::solver::{SearchStats, DEFAULT_WARM_BUDGET};
use crate::triples::{all_triples, primitive_triples, Triple};

/// `(prime, exponent mod m)` for the primes that matter in `n`.
fn residue_form(n: u64, m: u32) -> Vec<(u64, u8)> {
    Factorization::of(n)
        .factors()
        .iter()
        .filter(|&&(_, e)| e % m != 0)
        .map(|&(p, e)| (p, (e % m) as u8))
        .collect()
}

/// Constraint problem over the given primes (in that branching order).
fn build_problem(m: u32, primes: &[u64], triples: &[Triple]) -> Problem {
    let var_index: HashMap<u64, u32> = primes
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i as u32))
        .collect();
    let members: Vec<u64> = triples
        .iter()
        .flat_map(|t| t.members())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let member_index: HashMap<u64, u32> = members
        .iter()
        .enumerate()
        .map(|(i, &n)| (n, i as u32))
        .collect();
    Problem {
        modulus: m as u8,
        num_vars: primes.len(),
        forms: members
            .iter()
            .map(|&n| {
                residue_form(n, m)
                    .into_iter()
                    .map(|(p, e)| (var_index[&p], e))
                    .collect()
            })
            .collect(),
        triples: triples
            .iter()
            .map(|t| t.members().map(|n| member_index[&n]))
            .collect(),
        order: (0..primes.len() as u32).collect(),
    }
}

/// Orders `primes` by the number of triples they occur in (descending),
/// then by value.
fn by_incidence(m: u32, primes: impl IntoIterator<Item = u64>, triples: &[Triple]) -> Vec<u64> {
    let mut weight: BTreeMap<u64, u64> = primes.into_iter().map(|p| (p, 0)).collect();
    for t in triples {
        let touched: BTreeSet<u64> = t
            .members()
            .iter()
            .flat_map(|&n| residue_form(n, m))
            .map(|(p, _)| p)
            .collect();
        for p in touched {
            if let Some(w) = weight.get_mut(&p) {
                *w += 1;
            }
        }
    }
    let mut v: Vec<(u64, u64)> = weight.into_iter().collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    v.into_iter().map(|(p, _)| p).collect()
}

fn check_modulus(m: u32) -> Result<()> {
    if !(2..u8::MAX as u32).contains(&m) {
        return Err(Error::InvalidModulus(m));
    }
    Ok(())
}

/// Every assignment `primes -> Z/mZ` under which no triple in `triples` is
/// monochromatic, sorted by the value vector over `primes` ascending.
///
/// Each member must have all its relevant primes (exponent nonzero mod `m`)
/// inside `primes`.
pub fn avoiding_prime_vectors(
    m: u32,
    primes: &PrimeSet,
    triples: &[Triple],
) -> Result<Vec<BTreeMap<u64, u32>>> {
    check_modulus(m)?;
    for t in triples {
        for n in t.members() {
            if residue_form(n, m).iter().any(|&(p, _)| !primes.contains(p)) {
                return Err(Error::UncoveredMember {
                    member: n,
                    triple: *t,
                });
            }
        }
    }
    let order = by_incidence(m, primes.iter(), triples);
    let problem = build_problem(m, &order, triples);
    let mut found = Vec::new();
    let mut counters = Counters::default();
    engine::search(&problem, Config::default(), &mut counters, |values| {
        found.push(
            order
                .iter()
                .zip(values)
                .map(|(&p, &v)| (p, v as u32))
                .collect::<BTreeMap<_, _>>(),
        );
        ControlFlow::Continue(())
    });
    found.sort_by_key(|a| a.values().copied().collect::<Vec<_>>());
    Ok(found)
}

/// Values on `primes` (ascending) as a digit string, e.g. `0101111101001`.
pub fn vector_string(assignment: &BTreeMap<u64, u32>, primes: &PrimeSet) -> String {
    primes
        .iter()
        .map(|p| {
            assignment
                .get(&p)
                .and_then(|&v| char::from_digit(v, 36))
                .unwrap_or('?')
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    /// Least `M` at which every standard morphism has a monochromatic
    /// triple in `[1, M]`.
    Exact(u64),
    /// Still avoidable on `[1, cap]`.
    Above(u64),
}

#[derive(Clone, Debug)]
pub struct ThresholdReport {
    pub value: Threshold,
    /// Avoiding standard coloring of `[1, M - 1]` (or `[1, cap]`).
    pub witness: Certificate,
    pub stats: SearchStats,
}

/// Resumable state of a long threshold run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub modulus: u32,
    pub cap: u64,
    /// Hypotenuse being worked on.
    pub level: u64,
    /// Avoiding assignment of the previous level.
    pub witness: Vec<(u64, u32)>,
    /// Branch of the full search at `level` to continue from; empty when the
    /// level has not started.
    pub path: Vec<u8>,
    pub nodes: u64,
}

pub struct ThresholdOptions<'a> {
    pub node_budget: Option<u64>,
    pub warm_budget: u64,
    /// Emit a checkpoint every this many nodes of a full search.
    pub checkpoint_every: u64,
    pub on_checkpoint: Option<&'a mut dyn FnMut(&Checkpoint)>,
    pub resume: Option<Checkpoint>,
}

impl Default for ThresholdOptions<'_> {
    fn default() -> Self {
        Self {
            node_budget: None,
            warm_budget: DEFAULT_WARM_BUDGET,
            checkpoint_every: 1_000_000,
            on_checkpoint: None,
            resume: None,
        }
    }
}

/// Least `M <= cap` such that no standard morphism into `Z/mZ` avoids all
/// primitive triples in `[1, M]`.
pub fn standard_threshold(m: u32, cap: u64) -> Result<ThresholdReport> {
    standard_threshold_with(m, cap, ThresholdOptions::default())
}

pub fn standard_threshold_with(m: u32, cap: u64, mut opts: ThresholdOptions<'_>) -> Result<ThresholdReport> {
    check_modulus(m)?;
    let start = Instant::now();
    let prims = primitive_triples(cap);
    let mut levels: Vec<u64> = prims.iter().map(|t| t.c).collect();
    levels.dedup();

    let build = |level: u64| {
        let end = prims.partition_point(|t| t.c <= level);
        let triples = &prims[..end];
        let relevant: BTreeSet<u64> = triples
            .iter()
            .flat_map(|t| t.members())
            .flat_map(|n| residue_form(n, m))
            .map(|(p, _)| p)
            .collect();
        let order = by_incidence(m, relevant, triples);
        (build_problem(m, &order, triples), order)
    };

    let (start_witness, resume) = match opts.resume.take() {
        Some(cp) => {
            if cp.modulus != m || cp.cap != cap {
                return Err(Error::Unsupported(format!(
                    "checkpoint is for m={} cap={}",
                    cp.modulus, cp.cap
                )));
            }
            (cp.witness.into_iter().collect(), Some((cp.level, cp.path)))
        }
        None => (BTreeMap::new(), None),
    };

    let mut shortcut = |level: u64, w: &BTreeMap<u64, u32>| {
        let from = prims.partition_point(|t| t.c < level);
        let upto = prims.partition_point(|t| t.c <= level);
        let fresh: Vec<[Vec<(u64, u32)>; 3]> = prims[from..upto]
            .iter()
            .map(|t| {
                t.members().map(|n| {
                    residue_form(n, m)
                        .into_iter()
                        .map(|(p, e)| (p, e as u32))
                        .collect()
                })
            })
            .collect();
        engine::extend_witness(m, w, &fresh)
    };
    let sink = std::cell::RefCell::new(opts.on_checkpoint.take());
    let last_witness = std::cell::RefCell::new(Vec::new());
    let mut on_level = |level: u64, w: &BTreeMap<u64, u32>| {
        *last_witness.borrow_mut() = w.iter().map(|(&k, &v)| (k, v)).collect();
        if let Some(f) = sink.borrow_mut().as_mut() {
            f(&Checkpoint {
                modulus: m,
                cap,
                level,
                witness: last_witness.borrow().clone(),
                path: Vec::new(),
                nodes: 0,
            });
        }
    };
    let mut on_progress = |level: u64, path: &[u8], c: &Counters| {
        if let Some(f) = sink.borrow_mut().as_mut() {
            f(&Checkpoint {
                modulus: m,
                cap,
                level,
                witness: last_witness.borrow().clone(),
                path: path.to_vec(),
                nodes: c.nodes,
            });
        }
    };
    let mut hooks = AscendHooks {
        budget: opts.node_budget,
        warm_budget: opts.warm_budget,
        symmetry: true,
        on_level: Some(&mut on_level),
        progress: Some((opts.checkpoint_every.max(1), &mut on_progress)),
        resume,
        shortcut: Some(&mut shortcut),
    };
    let ascent = engine::ascend(&levels, build, start_witness, &mut hooks).map_err(|e| match e {
        AscentError::Budget { at } => Error::BudgetExceeded {
            budget: opts.node_budget.unwrap_or_default(),
            at,
        },
    })?;
    drop(hooks);

    let (value, end) = match ascent.blocked_at {
        Some(c) => (Threshold::Exact(c), c - 1),
        None => (Threshold::Above(cap), cap),
    };
    let witness = witness_certificate(m, &ascent.witness, end)?;
    Ok(ThresholdReport {
        value,
        witness,
        stats: SearchStats {
            nodes: ascent.counters.nodes,
            backtracks: ascent.counters.backtracks,
            wall: start.elapsed(),
        },
    })
}

/// Extends `values` by 0 on every other prime up to `end` and verifies the
/// result on all triples of `[1, end]`.
fn witness_certificate(m: u32, values: &BTreeMap<u64, u32>, end: u64) -> Result<Certificate> {
    let mut assignment: BTreeMap<u64, u32> = sieve(end).into_iter().map(|p| (p, 0)).collect();
    assignment.extend(values.iter().map(|(&k, &v)| (k, v)));
    let cert = Certificate::avoiding(MorphicColoring::standard(m, assignment)?, end);
    verify_certificate(&cert, &all_triples(end))
        .map_err(|e| Error::Invariant(format!("standard witness rejected: {e}")))?;
    Ok(cert)
}
