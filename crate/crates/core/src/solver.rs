//! Deciding whether a `P0`-morphism can color `[1, M]` without a
//! monochromatic Pythagorean triple, and computing the largest such `M`.
//!
//! Variables are the elements of `S(P0)` occurring in the maximal-factor
//! decompositions of triple members. They are assigned by decreasing weight
//! (number of triples touching the variable), ties broken by the smaller
//! integer, values tried in the order `0, 1, ..., m-1`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::arithmetic::{s_decompose, PrimeSet};
use crate::coloring::{verify_certificate, Certificate, MorphicColoring};
use crate::engine::{self, AscendHooks, AscentError, Config, Counters, Finish, Problem};
use crate::error::{Error, Result};
use crate::triples::{all_triples, hypotenuses, Triple};

/// Warm-started attempts give up after this many nodes and fall back to a
/// full search.
pub const DEFAULT_WARM_BUDGET: u64 = 20_000;

/// One avoidance question: `P0`, the modulus and the interval `[1, M]`.
#[derive(Clone, Debug)]
pub struct Instance {
    p0: PrimeSet,
    modulus: u32,
    limit: u64,
    triples: Vec<Triple>,
    /// Ordered by weight descending, then value ascending.
    variables: Vec<u64>,
    weights: Vec<u64>,
    /// Distinct triple members, ascending, with their decompositions.
    members: Vec<u64>,
    decompositions: Vec<Vec<u64>>,
}

impl Instance {
    pub fn new(p0: &PrimeSet, modulus: u32, limit: u64) -> Result<Self> {
        Self::with_triples(p0, modulus, limit, all_triples(limit))
    }

    /// `triples` must be `all_triples(limit)`.
    fn with_triples(p0: &PrimeSet, modulus: u32, limit: u64, triples: Vec<Triple>) -> Result<Self> {
        if !(2..=u8::MAX as u32 - 1).contains(&modulus) {
            return Err(Error::InvalidModulus(modulus));
        }
        let members: Vec<u64> = triples
            .iter()
            .flat_map(|t| t.members())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let decompositions: Vec<Vec<u64>> = members.iter().map(|&n| s_decompose(n, p0)).collect();
        let member_index: HashMap<u64, usize> =
            members.iter().enumerate().map(|(i, &n)| (n, i)).collect();

        let mut weight: BTreeMap<u64, u64> = BTreeMap::new();
        for d in &decompositions {
            for &q in d {
                weight.entry(q).or_insert(0);
            }
        }
        for t in &triples {
            let touched: BTreeSet<u64> = t
                .members()
                .iter()
                .flat_map(|n| decompositions[member_index[n]].iter().copied())
                .collect();
            for q in touched {
                *weight.get_mut(&q).expect("variable registered") += 1;
            }
        }
        let mut vars: Vec<(u64, u64)> = weight.into_iter().collect();
        vars.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        Ok(Self {
            p0: p0.clone(),
            modulus,
            limit,
            triples,
            variables: vars.iter().map(|v| v.0).collect(),
            weights: vars.iter().map(|v| v.1).collect(),
            members,
            decompositions,
        })
    }

    pub fn p0(&self) -> &PrimeSet {
        &self.p0
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    /// Variables in branching order.
    pub fn variables(&self) -> &[u64] {
        &self.variables
    }

    /// Number of triples in `T_M` with `q` in the decomposition of one of
    /// their members; 0 for anything that is not a variable here.
    pub fn weight(&self, q: u64) -> u64 {
        self.variables
            .iter()
            .position(|&v| v == q)
            .map_or(0, |i| self.weights[i])
    }

    /// Decomposition of a triple member, if `n` is one.
    pub fn decomposition(&self, n: u64) -> Option<&[u64]> {
        self.members
            .binary_search(&n)
            .ok()
            .map(|i| self.decompositions[i].as_slice())
    }

    pub(crate) fn problem(&self) -> Problem {
        let var_index: HashMap<u64, u32> = self
            .variables
            .iter()
            .enumerate()
            .map(|(i, &q)| (q, i as u32))
            .collect();
        let member_index: HashMap<u64, u32> = self
            .members
            .iter()
            .enumerate()
            .map(|(i, &n)| (n, i as u32))
            .collect();
        Problem {
            modulus: self.modulus as u8,
            num_vars: self.variables.len(),
            forms: self
                .decompositions
                .iter()
                .map(|d| d.iter().map(|q| (var_index[q], 1u8)).collect())
                .collect(),
            triples: self
                .triples
                .iter()
                .map(|t| t.members().map(|n| member_index[&n]))
                .collect(),
            order: (0..self.variables.len() as u32).collect(),
        }
    }

    fn certificate(&self, values: &[u8]) -> Result<Certificate> {
        let assignment = self
            .variables
            .iter()
            .zip(values)
            .map(|(&q, &v)| (q, v as u32))
            .collect();
        let coloring = MorphicColoring::partial(self.modulus, self.p0.clone(), assignment)?;
        checked(Certificate::avoiding(coloring, self.limit))
    }
}

/// Re-verifies against a fresh enumeration before handing a certificate out.
fn checked(cert: Certificate) -> Result<Certificate> {
    verify_certificate(&cert, &all_triples(cert.interval_end))
        .map_err(|e| Error::Invariant(format!("engine produced a bad certificate: {e}")))?;
    Ok(cert)
}

#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    /// Abort with an unknown outcome after this many nodes.
    pub node_budget: Option<u64>,
    /// Explore one representative per orbit of `Aut(Z/mZ)` (no effect for
    /// `m = 2`).
    pub symmetry_breaking: bool,
    /// Preferred values, tried first.
    pub seed: Option<BTreeMap<u64, u32>>,
}

impl SearchOptions {
    pub fn new() -> Self {
        Self {
            symmetry_breaking: true,
            ..Self::default()
        }
    }

    pub fn with_budget(mut self, nodes: u64) -> Self {
        self.node_budget = Some(nodes);
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub backtracks: u64,
    #[serde(skip)]
    pub wall: Duration,
}

impl SearchStats {
    fn from_counters(c: Counters, wall: Duration) -> Self {
        Self {
            nodes: c.nodes,
            backtracks: c.backtracks,
            wall,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Avoiding(Certificate),
    /// Exhaustive search found no avoiding coloring.
    Unavoidable,
    /// The node budget ran out first.
    Unknown,
}

impl Outcome {
    /// Exit-code convention: 0 found, 1 proven impossible, 2 unknown.
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Avoiding(_) => 0,
            Outcome::Unavoidable => 1,
            Outcome::Unknown => 2,
        }
    }
}

/// Runs the backtracking search on one instance.
pub fn solve(inst: &Instance, opts: &SearchOptions) -> Result<(Outcome, SearchStats)> {
    let start = Instant::now();
    let problem = inst.problem();
    let seed: Option<Vec<u8>> = opts.seed.as_ref().map(|s| {
        inst.variables
            .iter()
            .map(|q| s.get(q).map_or(0, |&v| (v % inst.modulus) as u8))
            .collect()
    });
    let cfg = Config {
        budget: opts.node_budget,
        symmetry: opts.symmetry_breaking,
        seed: seed.as_deref(),
        ..Config::default()
    };
    let mut counters = Counters::default();
    let finish = engine::search(&problem, cfg, &mut counters, |_| ControlFlow::Break(()));
    let stats = SearchStats::from_counters(counters, start.elapsed());
    let outcome = match finish {
        Finish::Stopped(values) => Outcome::Avoiding(inst.certificate(&values)?),
        Finish::Exhausted => Outcome::Unavoidable,
        Finish::BudgetExceeded => Outcome::Unknown,
    };
    Ok((outcome, stats))
}

/// An avoiding certificate on `[1, limit]`, or `None` when none exists.
pub fn exists_avoiding(p0: &PrimeSet, modulus: u32, limit: u64) -> Result<Option<Certificate>> {
    let inst = Instance::new(p0, modulus, limit)?;
    match solve(&inst, &SearchOptions::new())?.0 {
        Outcome::Avoiding(c) => Ok(Some(c)),
        Outcome::Unavoidable => Ok(None),
        Outcome::Unknown => unreachable!("no budget"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NValue {
    Exact(u64),
    /// Avoidable on the whole range up to the cap.
    AtLeast(u64),
}

impl NValue {
    pub fn value(self) -> u64 {
        match self {
            NValue::Exact(n) | NValue::AtLeast(n) => n,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, NValue::Exact(_))
    }
}

impl std::fmt::Display for NValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NValue::Exact(n) => write!(f, "{n}"),
            NValue::AtLeast(n) => write!(f, ">={n}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct NReport {
    pub value: NValue,
    /// Avoiding coloring of `[1, N]` (or of `[1, cap]`).
    pub certificate: Certificate,
    pub stats: SearchStats,
}

/// Options for `compute_n`.
#[derive(Clone, Debug)]
pub struct NOptions {
    pub node_budget: Option<u64>,
    pub warm_budget: u64,
}

impl Default for NOptions {
    fn default() -> Self {
        Self {
            node_budget: None,
            warm_budget: DEFAULT_WARM_BUDGET,
        }
    }
}

/// `N(P0)` for colorings into `Z/mZ`: the largest `M <= cap` such that some
/// `P0`-morphism avoids monochromatic triples on `[1, M]`. Hypotenuses are
/// visited in ascending order, each instance seeded by the previous
/// witness.
pub fn compute_n(p0: &PrimeSet, modulus: u32, cap: u64) -> Result<NReport> {
    compute_n_with(p0, modulus, cap, &NOptions::default())
}

pub fn compute_n_with(p0: &PrimeSet, modulus: u32, cap: u64, opts: &NOptions) -> Result<NReport> {
    if !(2..u8::MAX as u32).contains(&modulus) {
        return Err(Error::InvalidModulus(modulus));
    }
    let start = Instant::now();
    let levels = hypotenuses(cap);
    let mut hooks = AscendHooks {
        budget: opts.node_budget,
        warm_budget: opts.warm_budget,
        symmetry: true,
        on_level: None,
        progress: None,
        resume: None,
        shortcut: None,
    };
    // sorted by hypotenuse, so every level is a prefix
    let all = all_triples(cap);
    let mut shortcut = |level: u64, w: &BTreeMap<u64, u32>| {
        let from = all.partition_point(|t| t.c < level);
        let upto = all.partition_point(|t| t.c <= level);
        let fresh: Vec<[Vec<(u64, u32)>; 3]> = all[from..upto]
            .iter()
            .map(|t| {
                t.members()
                    .map(|n| s_decompose(n, p0).into_iter().map(|q| (q, 1)).collect())
            })
            .collect();
        engine::extend_witness(modulus, w, &fresh)
    };
    hooks.shortcut = Some(&mut shortcut);
    let build = |level: u64| {
        let upto = all.partition_point(|t| t.c <= level);
        let inst = Instance::with_triples(p0, modulus, level, all[..upto].to_vec())
            .expect("modulus checked");
        (inst.problem(), inst.variables.clone())
    };
    let ascent = match engine::ascend(&levels, build, BTreeMap::new(), &mut hooks) {
        Ok(a) => a,
        Err(AscentError::Budget { at }) => {
            return Err(Error::BudgetExceeded {
                budget: opts.node_budget.unwrap_or_default(),
                at,
            })
        }
    };
    let (value, interval_end) = match ascent.blocked_at {
        Some(c) => (NValue::Exact(c - 1), c - 1),
        None => (NValue::AtLeast(cap), cap),
    };
    if ascent.witness_at > interval_end {
        return Err(Error::Invariant("witness beyond reported N".into()));
    }
    let coloring = MorphicColoring::partial(modulus, p0.clone(), ascent.witness)?;
    let certificate = checked(Certificate::avoiding(coloring, interval_end))?;
    Ok(NReport {
        value,
        certificate,
        stats: SearchStats::from_counters(ascent.counters, start.elapsed()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u64]) -> PrimeSet {
        PrimeSet::new(v.iter().copied()).unwrap()
    }

    #[test]
    fn weights_on_smallest_interval() {
        let inst = Instance::new(&p(&[2, 3, 5]), 2, 5).unwrap();
        assert_eq!(inst.weight(3), 1);
        assert_eq!(inst.weight(4), 1);
        assert_eq!(inst.weight(5), 1);
        assert_eq!(inst.weight(7), 0);
        assert_eq!(inst.variables(), &[3, 4, 5]);
    }

    #[test]
    fn no_triples_means_trivial_certificate() {
        for m in 2..5 {
            let cert = exists_avoiding(&p(&[2, 3]), m, 4).unwrap().unwrap();
            assert!(cert.coloring.assignment().is_empty());
            assert_eq!(cert.interval_end, 4);
        }
    }

    #[test]
    fn budget_yields_unknown() {
        let inst = Instance::new(&p(&[2, 3, 5]), 2, 533).unwrap();
        let (o, stats) = solve(&inst, &SearchOptions::new().with_budget(10)).unwrap();
        assert_eq!(o, Outcome::Unknown);
        assert_eq!(o.exit_code(), 2);
        assert!(stats.nodes >= stats.backtracks);
    }

    #[test]
    fn rejects_bad_modulus() {
        assert!(Instance::new(&p(&[2]), 1, 10).is_err());
        assert!(compute_n(&p(&[2]), 0, 10).is_err());
    }

    #[test]
    fn lower_bound_when_cap_is_small() {
        let r = compute_n(&p(&[2, 3, 5]), 2, 100).unwrap();
        assert_eq!(r.value, NValue::AtLeast(100));
        assert_eq!(r.certificate.interval_end, 100);
        r.certificate.verify().unwrap();
    }
}
