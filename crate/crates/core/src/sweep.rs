//! `N(P0)` over every `k`-subset of the primes up to a bound.
//!
//! Subsets are solved in parallel; a single writer thread appends one JSON
//! line per finished subset to a journal, so an interrupted sweep resumes
//! where it stopped. A finished journal is rewritten in lexicographic
//! order.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::Instant;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arithmetic::{sieve, PrimeSet};
use crate::coloring::Certificate;
use crate::error::{Error, Result};
use crate::solver::{compute_n, NValue};

pub const ENGINE_VERSION: &str = concat!("morphic ", env!("CARGO_PKG_VERSION"));

/// Cap used when none is given; above every value seen for `k <= 5`.
pub const DEFAULT_CAP: u64 = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub p0: Vec<u64>,
    pub m: u32,
    pub cap: u64,
    pub n_value: NValue,
    /// Avoiding coloring of `[1, N]`.
    pub certificate: Certificate,
    pub nodes: u64,
    pub engine_version: String,
    pub timing: Timing,
}

impl SweepRecord {
    pub fn compute(p0: &PrimeSet, m: u32, cap: u64) -> Result<Self> {
        let start = Instant::now();
        let report = compute_n(p0, m, cap)?;
        Ok(Self {
            p0: p0.as_slice().to_vec(),
            m,
            cap,
            n_value: report.value,
            certificate: report.certificate,
            nodes: report.stats.nodes,
            engine_version: ENGINE_VERSION.to_string(),
            timing: Timing {
                wall_ms: start.elapsed().as_secs_f64() * 1e3,
            },
        })
    }

    /// The value hit the cap and is only a lower bound.
    pub fn capped(&self) -> bool {
        !self.n_value.is_exact()
    }

    /// Re-checks the certificate and that it covers the recorded value.
    pub fn verify(&self) -> Result<()> {
        if self.certificate.interval_end != self.n_value.value() {
            return Err(Error::Invariant(format!(
                "record {:?}: certificate covers [1,{}] but N = {}",
                self.p0,
                self.certificate.interval_end,
                self.n_value
            )));
        }
        if self.certificate.coloring.p0().as_slice() != self.p0.as_slice() {
            return Err(Error::Invariant(format!(
                "record {:?}: certificate is for another prime set",
                self.p0
            )));
        }
        self.certificate.verify()?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub k: usize,
    pub bound: u64,
    pub m: u32,
    pub cap: u64,
    /// Worker threads; `None` lets rayon decide.
    pub threads: Option<usize>,
    pub journal: Option<PathBuf>,
    /// Keep records already in the journal instead of starting over.
    pub resume: bool,
    /// Stop after this many new subsets (partial runs).
    pub max_subsets: Option<usize>,
    /// Subsets containing this set are scheduled first.
    pub priority: Option<PrimeSet>,
}

impl SweepConfig {
    pub fn new(k: usize, bound: u64) -> Self {
        Self {
            k,
            bound,
            m: 2,
            cap: DEFAULT_CAP,
            threads: None,
            journal: None,
            resume: false,
            max_subsets: None,
            priority: None,
        }
    }
}

/// All `k`-subsets of the primes up to `bound`, lexicographic.
pub fn subsets(k: usize, bound: u64) -> Vec<PrimeSet> {
    sieve(bound)
        .into_iter()
        .combinations(k)
        .map(|c| PrimeSet::new(c).expect("primes"))
        .collect()
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    /// Records for every finished subset of the sweep, lexicographic.
    pub records: Vec<SweepRecord>,
    /// Subsets not finished yet (partial runs only).
    pub pending: usize,
    /// Subsets computed by this call.
    pub computed: usize,
}

/// Reads a journal, ignoring a torn last line.
pub fn read_journal(path: &Path) -> Result<Vec<SweepRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let lines: Vec<String> = BufReader::new(file)
        .lines()
        .collect::<std::io::Result<_>>()
        .map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(line) {
            Ok(r) => out.push(r),
            Err(_) if i + 1 == lines.len() => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out)
}

fn record_line(r: &SweepRecord) -> String {
    let mut s = serde_json::to_string(r).expect("record serializes");
    s.push('\n');
    s
}

/// Rewrites the journal sorted and deduplicated, via a temporary file.
pub fn compact_journal(path: &Path, records: &[SweepRecord]) -> Result<()> {
    let tmp = path.with_extension("jsonl.tmp");
    let mut body = String::new();
    for r in records {
        body.push_str(&record_line(r));
    }
    fs::write(&tmp, body).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    if cfg.k == 0 || cfg.bound < 2 {
        return Err(Error::Unsupported(format!(
            "sweep needs k >= 1 and bound >= 2, got k={} bound={}",
            cfg.k, cfg.bound
        )));
    }
    let all = subsets(cfg.k, cfg.bound);
    let wanted: BTreeSet<Vec<u64>> = all.iter().map(|s| s.as_slice().to_vec()).collect();

    let mut done: BTreeMap<Vec<u64>, SweepRecord> = BTreeMap::new();
    if let Some(path) = &cfg.journal {
        if cfg.resume && path.exists() {
            for r in read_journal(path)? {
                if r.m == cfg.m && r.cap == cfg.cap && wanted.contains(&r.p0) {
                    done.insert(r.p0.clone(), r);
                }
            }
            // drop anything torn or foreign before appending
            compact_journal(path, &done.values().cloned().collect::<Vec<_>>())?;
        } else {
            File::create(path).map_err(|e| Error::io(path, e))?;
        }
    }

    let mut todo: Vec<PrimeSet> = all
        .into_iter()
        .filter(|s| !done.contains_key(s.as_slice()))
        .collect();
    if let Some(pri) = &cfg.priority {
        // stable: lexicographic within each group
        todo.sort_by_key(|s| !pri.is_subset(s));
    }
    if let Some(n) = cfg.max_subsets {
        todo.truncate(n);
    }

    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = cfg.threads {
            b = b.num_threads(t);
        }
        b.build()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?
    };
    let mut journal = match &cfg.journal {
        Some(path) => Some(
            OpenOptions::new()
                .append(true)
                .open(path)
                .map(|f| (path.clone(), f))
                .map_err(|e| Error::io(path, e))?,
        ),
        None => None,
    };

    let (tx, rx) = mpsc::channel::<Result<SweepRecord>>();
    let (m, cap) = (cfg.m, cfg.cap);
    let fresh = std::thread::scope(|scope| {
        let writer = scope.spawn(move || -> Result<Vec<SweepRecord>> {
            let mut got = Vec::new();
            let mut first_err = None;
            for r in rx {
                match r {
                    Ok(rec) => {
                        if let Some((path, f)) = journal.as_mut() {
                            f.write_all(record_line(&rec).as_bytes())
                                .and_then(|_| f.flush())
                                .map_err(|e| Error::io(&*path, e))?;
                        }
                        got.push(rec);
                    }
                    Err(e) => {
                        first_err.get_or_insert(e);
                    }
                }
            }
            match first_err {
                Some(e) => Err(e),
                None => Ok(got),
            }
        });
        pool.install(|| {
            todo.par_iter().for_each_with(tx, |tx, p0| {
                let _ = tx.send(SweepRecord::compute(p0, m, cap));
            });
        });
        writer.join().expect("journal writer panicked")
    })?;

    let computed = fresh.len();
    for r in fresh {
        done.insert(r.p0.clone(), r);
    }
    let records: Vec<SweepRecord> = done.into_values().collect();
    let pending = wanted.len() - records.len();
    if pending == 0 {
        if let Some(path) = &cfg.journal {
            compact_journal(path, &records)?;
        }
    }
    Ok(SweepOutcome {
        records,
        pending,
        computed,
    })
}

/// Record selection for reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Filter {
    /// `contains:7,11`
    Contains(PrimeSet),
    /// `value:628`
    Value(u64),
    /// `k:4`
    Size(usize),
    /// `exceptions:532`: values other than the given one
    Except(u64),
    /// `capped`
    Capped,
}

impl Filter {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Unsupported(format!("unknown filter {s:?}"));
        let num = |v: &str| v.trim().parse::<u64>().map_err(|_| bad());
        match s.trim().split_once(':') {
            Some(("contains", v)) => Ok(Filter::Contains(PrimeSet::parse(v)?)),
            Some(("value", v)) => Ok(Filter::Value(num(v)?)),
            Some(("k", v)) => Ok(Filter::Size(num(v)? as usize)),
            Some(("exceptions", v)) => Ok(Filter::Except(num(v)?)),
            None if s.trim() == "capped" => Ok(Filter::Capped),
            _ => Err(bad()),
        }
    }

    pub fn matches(&self, r: &SweepRecord) -> bool {
        match self {
            Filter::Contains(s) => s.iter().all(|p| r.p0.contains(&p)),
            Filter::Value(v) => r.n_value.value() == *v,
            Filter::Size(k) => r.p0.len() == *k,
            Filter::Except(v) => r.n_value.value() != *v,
            Filter::Capped => r.capped(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HistogramRow {
    pub n_value: String,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub p0: Vec<u64>,
    pub n_value: String,
}

/// Aggregates over the selected records. Contains nothing run-dependent,
/// so equal journals give byte-identical reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub filters: Vec<String>,
    pub total: usize,
    pub histogram: Vec<HistogramRow>,
    pub max: Option<String>,
    pub argmax: Vec<Vec<u64>>,
    pub rows: Vec<ReportRow>,
}

pub fn query(records: &[SweepRecord], filters: &[Filter]) -> Report {
    let mut selected: Vec<&SweepRecord> = records
        .iter()
        .filter(|r| filters.iter().all(|f| f.matches(r)))
        .collect();
    selected.sort_by(|a, b| a.p0.cmp(&b.p0));
    selected.dedup_by(|a, b| a.p0 == b.p0);
    let mut hist: BTreeMap<NValue, usize> = BTreeMap::new();
    for r in &selected {
        *hist.entry(r.n_value).or_default() += 1;
    }
    let max = selected.iter().map(|r| r.n_value).max_by_key(|v| (v.value(), !v.is_exact()));
    let argmax = selected
        .iter()
        .filter(|r| Some(r.n_value) == max)
        .map(|r| r.p0.clone())
        .collect();
    Report {
        filters: filters.iter().map(|f| format!("{f:?}")).collect(),
        total: selected.len(),
        histogram: hist
            .into_iter()
            .map(|(v, count)| HistogramRow {
                n_value: v.to_string(),
                count,
            })
            .collect(),
        max: max.map(|v| v.to_string()),
        argmax,
        rows: selected
            .iter()
            .map(|r| ReportRow {
                p0: r.p0.clone(),
                n_value: r.n_value.to_string(),
            })
            .collect(),
    }
}

fn set_str(p0: &[u64]) -> String {
    format!("{{{}}}", p0.iter().join(","))
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per selected record.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p0,n_value\n");
        for r in &self.rows {
            out.push_str(&format!("\"{}\",{}\n", r.p0.iter().join(","), r.n_value));
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("{} records\n\n| N(P0) | count |\n|---|---|\n", self.total);
        for h in &self.histogram {
            out.push_str(&format!("| {} | {} |\n", h.n_value, h.count));
        }
        if let Some(max) = &self.max {
            out.push_str(&format!(
                "\nmaximum {max} at {}\n",
                self.argmax.iter().map(|s| set_str(s)).join(", ")
            ));
        }
        out
    }
}

/// Pairs `(smaller, larger)` of recorded sets, one a subset of the other
/// by one prime, where `N` decreases. Lower bounds only count against
/// exact values below them.
pub fn monotonicity_violations(records: &[SweepRecord]) -> Vec<(Vec<u64>, Vec<u64>)> {
    let by_set: HashMap<&[u64], NValue> =
        records.iter().map(|r| (r.p0.as_slice(), r.n_value)).collect();
    let mut out = Vec::new();
    for r in records {
        for skip in 0..r.p0.len() {
            let sub: Vec<u64> = r
                .p0
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &p)| p)
                .collect();
            let Some(&small) = by_set.get(sub.as_slice()) else {
                continue;
            };
            let broken = match (small, r.n_value) {
                (_, NValue::AtLeast(_)) => false,
                (s, NValue::Exact(b)) => s.value() > b,
            };
            if broken {
                out.push((sub, r.p0.clone()));
            }
        }
    }
    out.sort();
    out
}
