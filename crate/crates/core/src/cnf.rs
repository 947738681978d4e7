//! DIMACS export of `Z/2Z` avoidance instances, and the way back.
//!
//! Variable numbering is canonical: the `S(P0)` variables in ascending
//! order, then one variable per distinct triple member in ascending order,
//! then the auxiliaries of the parity chains.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::arithmetic::{s_decompose, PrimeSet};
use crate::coloring::{verify_certificate, Certificate, MorphicColoring};
use crate::error::{Error, Result};
use crate::triples::all_triples;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    /// An element of `S(P0)`.
    S(u64),
    /// The color of a triple member.
    Member(u64),
    Aux,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfInstance {
    pub p0: PrimeSet,
    pub limit: u64,
    /// `kinds[i]` describes DIMACS variable `i + 1`.
    pub kinds: Vec<VarKind>,
    pub clauses: Vec<Vec<i64>>,
}

/// `y <-> a xor b` as four clauses.
fn xor_step(y: i64, a: i64, b: i64, out: &mut Vec<Vec<i64>>) {
    out.push(vec![-y, a, b]);
    out.push(vec![-y, -a, -b]);
    out.push(vec![y, -a, b]);
    out.push(vec![y, a, -b]);
}

/// Encodes "some `P0`-morphism into `Z/2Z` has no monochromatic triple in
/// `[1, limit]`". Only `m = 2` is supported.
pub fn encode(p0: &PrimeSet, modulus: u32, limit: u64) -> Result<CnfInstance> {
    if modulus != 2 {
        return Err(Error::Unsupported(format!(
            "CNF export needs m = 2, got {modulus}"
        )));
    }
    let triples = all_triples(limit);
    let members: BTreeSet<u64> = triples.iter().flat_map(|t| t.members()).collect();
    let decomposition: BTreeMap<u64, Vec<u64>> =
        members.iter().map(|&n| (n, s_decompose(n, p0))).collect();
    let s_vars: BTreeSet<u64> = decomposition.values().flatten().copied().collect();

    let mut kinds: Vec<VarKind> = s_vars.iter().map(|&q| VarKind::S(q)).collect();
    let s_index: BTreeMap<u64, i64> = s_vars
        .iter()
        .enumerate()
        .map(|(i, &q)| (q, i as i64 + 1))
        .collect();
    kinds.extend(members.iter().map(|&n| VarKind::Member(n)));
    let member_index: BTreeMap<u64, i64> = members
        .iter()
        .enumerate()
        .map(|(i, &n)| (n, (s_vars.len() + i) as i64 + 1))
        .collect();

    let mut clauses = Vec::new();
    for (&n, parts) in &decomposition {
        let e = member_index[&n];
        let mut xs: Vec<i64> = parts.iter().map(|q| s_index[q]).collect();
        xs.sort_unstable();
        match xs.as_slice() {
            [] => clauses.push(vec![-e]),
            [x] => {
                clauses.push(vec![-e, *x]);
                clauses.push(vec![e, -*x]);
            }
            [first, rest @ ..] => {
                let mut acc = *first;
                for (i, &x) in rest.iter().enumerate() {
                    let y = if i + 1 == rest.len() {
                        e
                    } else {
                        kinds.push(VarKind::Aux);
                        kinds.len() as i64
                    };
                    xor_step(y, acc, x, &mut clauses);
                    acc = y;
                }
            }
        }
    }
    for t in &triples {
        let [a, b, c] = t.members().map(|n| member_index[&n]);
        clauses.push(vec![-a, -b, -c]);
        clauses.push(vec![a, b, c]);
    }
    Ok(CnfInstance {
        p0: p0.clone(),
        limit,
        kinds,
        clauses,
    })
}

impl CnfInstance {
    pub fn num_vars(&self) -> usize {
        self.kinds.len()
    }

    /// DIMACS index of an `S(P0)` variable.
    pub fn s_var(&self, q: u64) -> Option<i64> {
        self.kinds
            .iter()
            .position(|k| *k == VarKind::S(q))
            .map(|i| i as i64 + 1)
    }

    pub fn member_var(&self, n: u64) -> Option<i64> {
        self.kinds
            .iter()
            .position(|k| *k == VarKind::Member(n))
            .map(|i| i as i64 + 1)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        let p0: Vec<String> = self.p0.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(out, "c morphic avoidance instance, m = 2");
        let _ = writeln!(out, "c p0 {}", p0.join(","));
        let _ = writeln!(out, "c interval 1 {}", self.limit);
        for (i, k) in self.kinds.iter().enumerate() {
            let _ = match k {
                VarKind::S(q) => writeln!(out, "c var {} = S {q}", i + 1),
                VarKind::Member(n) => writeln!(out, "c var {} = member {n}", i + 1),
                VarKind::Aux => writeln!(out, "c var {} = aux", i + 1),
            };
        }
        let _ = writeln!(out, "p cnf {} {}", self.kinds.len(), self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(out, "{l} ");
            }
            out.push_str("0\n");
        }
        out
    }

    /// Reads text written by [`to_dimacs`](Self::to_dimacs). The comment
    /// map is required; variables it leaves out count as auxiliaries.
    pub fn from_dimacs(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::Cnf(msg);
        let mut p0 = None;
        let mut limit = None;
        let mut named: BTreeMap<usize, VarKind> = BTreeMap::new();
        let mut header = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if let Some(rest) = line.strip_prefix('c') {
                let words: Vec<&str> = rest.split_whitespace().collect();
                match words.as_slice() {
                    ["p0", list] => p0 = Some(PrimeSet::parse(list)?),
                    ["p0"] => p0 = Some(PrimeSet::empty()),
                    ["interval", "1", m] => {
                        limit = Some(m.parse().map_err(|_| bad(format!("bad interval {m}")))?)
                    }
                    ["var", idx, "=", kind, rest @ ..] => {
                        let idx: usize =
                            idx.parse().map_err(|_| bad(format!("bad index {idx}")))?;
                        let value = || -> Result<u64> {
                            rest.first()
                                .and_then(|v| v.parse().ok())
                                .ok_or_else(|| bad(format!("line {}: missing value", lineno + 1)))
                        };
                        let k = match *kind {
                            "S" => VarKind::S(value()?),
                            "member" => VarKind::Member(value()?),
                            _ => VarKind::Aux,
                        };
                        named.insert(idx, k);
                    }
                    _ => {}
                }
                continue;
            }
            if let Some(rest) = line.strip_prefix("p cnf") {
                let nums: Vec<usize> = rest
                    .split_whitespace()
                    .map(|w| w.parse().map_err(|_| bad(format!("bad header {line}"))))
                    .collect::<Result<_>>()?;
                match nums.as_slice() {
                    [v, c] => header = Some((*v, *c)),
                    _ => return Err(bad(format!("bad header {line}"))),
                }
                continue;
            }
            for w in line.split_whitespace() {
                let lit: i64 = w
                    .parse()
                    .map_err(|_| bad(format!("line {}: bad literal {w}", lineno + 1)))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else {
                    current.push(lit);
                }
            }
        }
        if !current.is_empty() {
            clauses.push(current);
        }
        let (num_vars, num_clauses) = header.ok_or_else(|| bad("missing p cnf header".into()))?;
        if clauses.len() != num_clauses {
            return Err(bad(format!(
                "header announces {num_clauses} clauses, found {}",
                clauses.len()
            )));
        }
        if let Some(l) = clauses.iter().flatten().find(|l| l.unsigned_abs() as usize > num_vars) {
            return Err(bad(format!("literal {l} exceeds {num_vars} variables")));
        }
        let kinds = (1..=num_vars)
            .map(|i| named.get(&i).copied().unwrap_or(VarKind::Aux))
            .collect();
        Ok(Self {
            p0: p0.ok_or_else(|| bad("missing `c p0` line".into()))?,
            limit: limit.ok_or_else(|| bad("missing `c interval` line".into()))?,
            kinds,
            clauses,
        })
    }

    /// Index of the first clause not satisfied by `model`; unlisted
    /// variables count as false.
    pub fn first_violated(&self, model: &[i64]) -> Option<usize> {
        let truth = self.truth_table(model);
        self.clauses
            .iter()
            .position(|c| !c.iter().any(|&l| truth[l.unsigned_abs() as usize] == (l > 0)))
    }

    fn truth_table(&self, model: &[i64]) -> Vec<bool> {
        let mut truth = vec![false; self.kinds.len() + 1];
        for &l in model {
            if let Some(t) = truth.get_mut(l.unsigned_abs() as usize) {
                *t = l > 0;
            }
        }
        truth
    }

    /// Turns a model into a verified certificate on `[1, limit]`.
    pub fn decode(&self, model: &[i64]) -> Result<Certificate> {
        if let Some(index) = self.first_violated(model) {
            return Err(Error::NotAModel {
                index,
                clause: self.clauses[index].clone(),
            });
        }
        let truth = self.truth_table(model);
        let assignment = self
            .kinds
            .iter()
            .enumerate()
            .filter_map(|(i, k)| match k {
                VarKind::S(q) => Some((*q, truth[i + 1] as u32)),
                _ => None,
            })
            .collect();
        let coloring = MorphicColoring::partial(2, self.p0.clone(), assignment)?;
        let cert = Certificate::avoiding(coloring, self.limit);
        verify_certificate(&cert, &all_triples(self.limit))?;
        Ok(cert)
    }

    /// The full model induced by a coloring of the `S(P0)` variables:
    /// member and auxiliary values follow from the definitions.
    pub fn extend_model(&self, coloring: &MorphicColoring) -> Option<Vec<i64>> {
        let mut truth = vec![None; self.kinds.len() + 1];
        for (i, k) in self.kinds.iter().enumerate() {
            if let VarKind::S(q) = k {
                truth[i + 1] = Some(coloring.get(*q)?.value() == 1);
            }
        }
        // Definitions only ever look back, so one pass in clause order
        // settles every chain.
        let mut changed = true;
        while changed {
            changed = false;
            for c in &self.clauses {
                let open: Vec<i64> = c
                    .iter()
                    .copied()
                    .filter(|l| truth[l.unsigned_abs() as usize].is_none())
                    .collect();
                let sat = c
                    .iter()
                    .any(|&l| truth[l.unsigned_abs() as usize] == Some(l > 0));
                if !sat && open.len() == 1 {
                    truth[open[0].unsigned_abs() as usize] = Some(open[0] > 0);
                    changed = true;
                }
            }
        }
        truth[1..]
            .iter()
            .enumerate()
            .map(|(i, t)| t.map(|b| if b { i as i64 + 1 } else { -(i as i64 + 1) }))
            .collect()
    }
}

/// Reads a solver's model output. Accepts competition format (`s` and `v`
/// lines) or a bare list of literals; a terminating 0 is optional.
pub fn parse_model(text: &str) -> Result<Vec<i64>> {
    let mut lits = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        let body = match line.split_once(char::is_whitespace) {
            _ if line.is_empty() || line.starts_with('c') => continue,
            Some(("s", _)) => continue,
            Some(("v", rest)) => rest,
            _ if line == "v" => continue,
            _ => line,
        };
        if body.contains("UNSAT") {
            return Err(Error::Cnf("solver reported UNSATISFIABLE".into()));
        }
        for w in body.split_whitespace() {
            let l: i64 = w
                .parse()
                .map_err(|_| Error::Cnf(format!("bad literal {w:?} in model")))?;
            if l != 0 {
                lits.push(l);
            }
        }
    }
    Ok(lits)
}

/// A small DPLL solver (two watched literals, chronological backtracking),
/// meant for cross-checking the native search on modest instances.
pub fn dpll(num_vars: usize, clauses: &[Vec<i64>]) -> Option<Vec<i64>> {
    Dpll::new(num_vars, clauses)?.run()
}

struct Dpll {
    clauses: Vec<Vec<i64>>,
    /// Clause indices watching each literal, indexed by `code(lit)`.
    watches: Vec<Vec<usize>>,
    value: Vec<i8>,
    trail: Vec<i64>,
    head: usize,
    order: Vec<i64>,
}

fn code(lit: i64) -> usize {
    2 * lit.unsigned_abs() as usize + (lit < 0) as usize
}

impl Dpll {
    /// `None` if the clause set is trivially unsatisfiable.
    fn new(num_vars: usize, clauses: &[Vec<i64>]) -> Option<Self> {
        let mut s = Self {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars + 2],
            value: vec![0; num_vars + 1],
            trail: Vec::new(),
            head: 0,
            order: Vec::new(),
        };
        let mut occurrences = vec![0usize; num_vars + 1];
        let mut units = Vec::new();
        for c in clauses {
            let mut c = c.clone();
            c.sort_unstable();
            c.dedup();
            if c.iter().any(|&l| c.binary_search(&-l).is_ok()) {
                continue;
            }
            for &l in &c {
                occurrences[l.unsigned_abs() as usize] += 1;
            }
            match c.len() {
                0 => return None,
                1 => units.push(c[0]),
                _ => {
                    let idx = s.clauses.len();
                    s.watches[code(c[0])].push(idx);
                    s.watches[code(c[1])].push(idx);
                    s.clauses.push(c);
                }
            }
        }
        let mut order: Vec<i64> = (1..=num_vars as i64).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(occurrences[v as usize]));
        s.order = order;
        for u in units {
            if !s.enqueue(u) {
                return None;
            }
        }
        Some(s)
    }

    fn lit_value(&self, lit: i64) -> i8 {
        let v = self.value[lit.unsigned_abs() as usize];
        if lit > 0 {
            v
        } else {
            -v
        }
    }

    fn enqueue(&mut self, lit: i64) -> bool {
        match self.lit_value(lit) {
            1 => true,
            -1 => false,
            _ => {
                self.value[lit.unsigned_abs() as usize] = if lit > 0 { 1 } else { -1 };
                self.trail.push(lit);
                true
            }
        }
    }

    /// Propagates pending assignments; false on a conflict.
    fn propagate(&mut self) -> bool {
        while self.head < self.trail.len() {
            let falsified = -self.trail[self.head];
            self.head += 1;
            let watching = std::mem::take(&mut self.watches[code(falsified)]);
            let mut keep = Vec::with_capacity(watching.len());
            let mut ok = true;
            for (k, &ci) in watching.iter().enumerate() {
                if !ok {
                    keep.extend_from_slice(&watching[k..]);
                    break;
                }
                let clause = &mut self.clauses[ci];
                if clause[0] == falsified {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                let v = self.value[first.unsigned_abs() as usize];
                if (first > 0 && v == 1) || (first < 0 && v == -1) {
                    keep.push(ci);
                    continue;
                }
                let replacement = (2..clause.len()).find(|&j| {
                    let l = clause[j];
                    let v = self.value[l.unsigned_abs() as usize];
                    !((l > 0 && v == -1) || (l < 0 && v == 1))
                });
                if let Some(j) = replacement {
                    clause.swap(1, j);
                    let new_watch = clause[1];
                    self.watches[code(new_watch)].push(ci);
                    continue;
                }
                keep.push(ci);
                if !self.enqueue(first) {
                    ok = false;
                }
            }
            self.watches[code(falsified)] = keep;
            if !ok {
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        for lit in self.trail.drain(mark..) {
            self.value[lit.unsigned_abs() as usize] = 0;
        }
        self.head = mark;
    }

    fn run(mut self) -> Option<Vec<i64>> {
        // (trail mark, decision literal, flipped already)
        let mut decisions: Vec<(usize, i64, bool)> = Vec::new();
        let mut ok = self.propagate();
        loop {
            if !ok {
                loop {
                    let (mark, lit, flipped) = decisions.pop()?;
                    self.undo_to(mark);
                    if !flipped {
                        decisions.push((mark, -lit, true));
                        self.enqueue(-lit);
                        break;
                    }
                }
                ok = self.propagate();
                continue;
            }
            let Some(&var) = self.order.iter().find(|&&v| self.value[v as usize] == 0) else {
                return Some(
                    (1..self.value.len() as i64)
                        .map(|v| if self.value[v as usize] == 1 { v } else { -v })
                        .collect(),
                );
            };
            decisions.push((self.trail.len(), -var, false));
            self.enqueue(-var);
            ok = self.propagate();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u64]) -> PrimeSet {
        PrimeSet::new(v.iter().copied()).unwrap()
    }

    #[test]
    fn smallest_instance_layout() {
        let inst = encode(&p(&[2, 3, 5]), 2, 5).unwrap();
        assert_eq!(
            inst.kinds,
            vec![
                VarKind::S(3),
                VarKind::S(4),
                VarKind::S(5),
                VarKind::Member(3),
                VarKind::Member(4),
                VarKind::Member(5)
            ]
        );
        assert_eq!(inst.clauses.len(), 3 * 2 + 2);
        assert_eq!(inst.clauses[6..], [vec![-4, -5, -6], vec![4, 5, 6]]);
    }

    #[test]
    fn rejects_other_moduli() {
        assert!(encode(&p(&[2]), 3, 10).is_err());
    }

    #[test]
    fn dimacs_round_trip_is_exact() {
        let inst = encode(&p(&[2, 3]), 2, 60).unwrap();
        let text = inst.to_dimacs();
        let back = CnfInstance::from_dimacs(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.to_dimacs(), text);
    }

    #[test]
    fn empty_instance_decodes_to_empty_certificate() {
        let inst = encode(&p(&[2]), 2, 4).unwrap();
        assert_eq!(inst.num_vars(), 0);
        let cert = inst.decode(&[]).unwrap();
        assert!(cert.coloring.assignment().is_empty());
    }

    #[test]
    fn fake_model_is_rejected() {
        let inst = CnfInstance {
            p0: p(&[2]),
            limit: 4,
            kinds: vec![VarKind::Aux],
            clauses: vec![vec![-1]],
        };
        match inst.decode(&[1]) {
            Err(Error::NotAModel { index, clause }) => {
                assert_eq!(index, 0);
                assert_eq!(clause, vec![-1]);
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn model_formats() {
        assert_eq!(parse_model("s SATISFIABLE\nv 1 -2\nv 3 0\n").unwrap(), vec![1, -2, 3]);
        assert_eq!(parse_model("1 -2 3 0").unwrap(), vec![1, -2, 3]);
        assert!(parse_model("s UNSATISFIABLE\n").is_ok());
        assert!(parse_model("v x").is_err());
    }

    #[test]
    fn dpll_basics() {
        assert!(dpll(1, &[vec![1], vec![-1]]).is_none());
        assert!(dpll(0, &[vec![]]).is_none());
        let m = dpll(3, &[vec![1, 2], vec![-1, 3], vec![-3]]).unwrap();
        assert_eq!(m, vec![-1, 2, -3]);
        // pigeonhole 3 into 2
        let v = |i: i64, h: i64| i * 2 + h + 1;
        let mut cls: Vec<Vec<i64>> = (0..3).map(|i| vec![v(i, 0), v(i, 1)]).collect();
        for h in 0..2 {
            for i in 0..3 {
                for j in i + 1..3 {
                    cls.push(vec![-v(i, h), -v(j, h)]);
                }
            }
        }
        assert!(dpll(6, &cls).is_none());
    }

    #[test]
    fn dpll_agrees_near_the_first_threshold() {
        let set = p(&[2, 3, 5]);
        for (limit, sat) in [(200, true), (532, true), (533, false)] {
            let inst = encode(&set, 2, limit).unwrap();
            let model = dpll(inst.num_vars(), &inst.clauses);
            assert_eq!(model.is_some(), sat, "limit {limit}");
            if let Some(m) = model {
                inst.decode(&m).unwrap();
            }
        }
    }
}
