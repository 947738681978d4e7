//! Command-line front end. Exit codes: 0 found / avoiding, 1 proven
//! unavoidable or rejected, 2 unknown (budget or cap), 64 usage or bad
//! input, 70 internal invariant violation, 74 I/O failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use morphic::cnf::{self, CnfInstance};
use morphic::fixtures;
use morphic::solver::{self, NOptions, NValue};
use morphic::standard::{self, Checkpoint, Threshold, ThresholdOptions};
use morphic::sweep::{self, Filter, SweepConfig};
use morphic::{Certificate, Error, Instance, Outcome, PrimeSet, SearchOptions};

const MAX_INT: u64 = 1 << 31;
const JOURNAL_DIR_VAR: &str = "MORPHIC_JOURNAL_DIR";

fn bounded(s: &str) -> Result<u64, String> {
    let v: u64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > MAX_INT {
        return Err(format!("{v} exceeds 2^31"));
    }
    Ok(v)
}

fn modulus(s: &str) -> Result<u32, String> {
    let v = bounded(s)?;
    if !(2..255).contains(&v) {
        return Err(format!("modulus must be in 2..=254, got {v}"));
    }
    Ok(v as u32)
}

fn prime_set(s: &str) -> Result<PrimeSet, String> {
    let set = PrimeSet::parse(s).map_err(|e| e.to_string())?;
    let too_big = set.iter().find(|&p| p > MAX_INT);
    match too_big {
        Some(p) => Err(format!("{p} exceeds 2^31")),
        None => Ok(set),
    }
}

#[derive(Parser)]
#[command(name = "morphic", version, about = "Monochromatic Pythagorean triples under morphic colorings")]
struct Cli {
    /// Emit one JSON document on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List Pythagorean triples in [1, M].
    Triples {
        #[arg(long, value_parser = bounded)]
        limit: u64,
        /// Primitive triples only.
        #[arg(long)]
        primitive: bool,
        /// Keep triples whose members have odd support in the first N primes.
        #[arg(long)]
        oddsupp_first: Option<usize>,
        /// Print only the count.
        #[arg(long)]
        count: bool,
    },
    /// Search for a P0-morphism avoiding monochromatic triples on [1, M].
    Solve {
        #[arg(long, value_parser = prime_set)]
        p0: PrimeSet,
        #[arg(long, default_value = "2", value_parser = modulus)]
        m: u32,
        #[arg(long, value_parser = bounded)]
        limit: u64,
        #[arg(long, value_parser = bounded)]
        budget: Option<u64>,
        /// Write the certificate here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute N(P0), the largest avoidable interval.
    NValue {
        #[arg(long, value_parser = prime_set)]
        p0: PrimeSet,
        #[arg(long, default_value = "2", value_parser = modulus)]
        m: u32,
        #[arg(long, default_value = "1000", value_parser = bounded)]
        cap: u64,
        #[arg(long, value_parser = bounded)]
        budget: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Threshold of standard morphisms into Z/mZ.
    SearchStandard {
        #[arg(long, default_value = "2", value_parser = modulus)]
        m: u32,
        #[arg(long, default_value = "1000", value_parser = bounded)]
        cap: u64,
        /// Run without a node budget.
        #[arg(long)]
        full: bool,
        /// Node budget per level when not running --full.
        #[arg(long, default_value = "10000000", value_parser = bounded)]
        budget: u64,
        /// Checkpoint file, rewritten as the search advances.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value = "1000000", value_parser = bounded)]
        checkpoint_every: u64,
        /// Continue from --checkpoint.
        #[arg(long, requires = "checkpoint")]
        resume: bool,
        /// Write the witness certificate here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a certificate against every triple in its interval.
    Verify {
        #[arg(long, required_unless_present = "fixture")]
        cert: Option<PathBuf>,
        /// Check a bundled coloring instead.
        #[arg(long, value_enum)]
        fixture: Option<Fixture>,
    },
    /// Write the Z/2Z avoidance instance as DIMACS CNF.
    ExportCnf {
        #[arg(long, value_parser = prime_set)]
        p0: PrimeSet,
        #[arg(long, value_parser = bounded)]
        limit: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Turn a SAT solver's model into a certificate.
    DecodeModel {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// N(P0) for every k-subset of the primes up to a bound.
    Sweep {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "100", value_parser = bounded)]
        bound: u64,
        #[arg(long, default_value = "2", value_parser = modulus)]
        m: u32,
        #[arg(long, default_value = "1000", value_parser = bounded)]
        cap: u64,
        /// Defaults to a file in $MORPHIC_JOURNAL_DIR (or the current directory).
        #[arg(long)]
        journal: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        resume: bool,
        /// Stop after this many new subsets.
        #[arg(long)]
        max_subsets: Option<usize>,
        /// Schedule subsets containing these primes first.
        #[arg(long, value_parser = prime_set)]
        priority: Option<PrimeSet>,
    },
    /// Summarize a sweep journal.
    Report {
        #[arg(long)]
        journal: PathBuf,
        /// contains:7,11 | value:628 | k:4 | exceptions:532 | capped (repeatable)
        #[arg(long)]
        filter: Vec<String>,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Fixture {
    /// The Z/3Z standard morphism avoiding triples on [1,4632].
    Z3,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
    Md,
}

/// Failure with its exit code.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Invariant(_) => 70,
            Error::Io { .. } => 74,
            _ => 64,
        };
        Fail(code, e.to_string())
    }
}

fn io_fail(path: &Path, e: std::io::Error) -> Fail {
    Fail(74, format!("{}: {e}", path.display()))
}

/// Writes, re-reads and re-verifies a certificate.
fn write_certificate(path: &Path, cert: &Certificate) -> Result<(), Fail> {
    fs::write(path, cert.to_json_pretty() + "\n").map_err(|e| io_fail(path, e))?;
    let text = fs::read_to_string(path).map_err(|e| io_fail(path, e))?;
    let back = Certificate::from_json(&text)
        .map_err(|e| Fail(70, format!("written certificate unreadable: {e}")))?;
    if &back != cert {
        return Err(Fail(70, "written certificate differs on re-read".into()));
    }
    back.verify()
        .map_err(|e| Fail(70, format!("written certificate fails verification: {e}")))
}

fn timing(start: Instant) -> Value {
    json!({ "wall_ms": start.elapsed().as_secs_f64() * 1e3 })
}

/// Result of a subcommand: exit code, JSON document, human text.
struct Done(u8, Value, String);

fn run(cli: Cli) -> Result<Done, Fail> {
    let start = Instant::now();
    match cli.cmd {
        Cmd::Triples {
            limit,
            primitive,
            oddsupp_first,
            count,
        } => {
            let mut ts = if primitive {
                morphic::primitive_triples(limit)
            } else {
                morphic::all_triples(limit)
            };
            if let Some(k) = oddsupp_first {
                ts = morphic::restrict_to_oddsupp(&ts, &PrimeSet::first(k));
            }
            let kind = if primitive { "primitive triples" } else { "triples" };
            let mut text = format!("{} {kind} in [1,{limit}]\n", ts.len());
            if !count {
                for t in &ts {
                    text.push_str(&format!("{t}\n"));
                }
            }
            let list: Vec<[u64; 3]> = ts.iter().map(|t| t.members()).collect();
            let mut doc = json!({ "limit": limit, "primitive": primitive, "count": ts.len() });
            if !count {
                doc["triples"] = json!(list);
            }
            Ok(Done(0, doc, text))
        }
        Cmd::Solve {
            p0,
            m,
            limit,
            budget,
            out,
        } => {
            let inst = Instance::new(&p0, m, limit)?;
            let mut opts = SearchOptions::new();
            opts.node_budget = budget;
            let (outcome, stats) = morphic::solver::solve(&inst, &opts)?;
            let (label, text) = match &outcome {
                Outcome::Avoiding(c) => (
                    "avoiding",
                    format!(
                        "found: a {p0}-morphism into Z/{m}Z avoids monochromatic triples on [1,{limit}] ({} variables)\n",
                        c.coloring.assignment().len()
                    ),
                ),
                Outcome::Unavoidable => (
                    "unavoidable",
                    format!("unavoidable: every {p0}-morphism into Z/{m}Z has a monochromatic triple in [1,{limit}]\n"),
                ),
                Outcome::Unknown => ("unknown", format!("unknown: node budget exhausted on [1,{limit}]\n")),
            };
            let mut doc = json!({
                "p0": p0, "m": m, "limit": limit, "outcome": label,
                "stats": { "nodes": stats.nodes, "backtracks": stats.backtracks },
                "timing": timing(start),
            });
            if let Outcome::Avoiding(c) = &outcome {
                if let Some(path) = &out {
                    write_certificate(path, c)?;
                }
                doc["certificate"] = serde_json::to_value(c).map_err(Error::from)?;
            }
            Ok(Done(outcome.exit_code() as u8, doc, text))
        }
        Cmd::NValue {
            p0,
            m,
            cap,
            budget,
            out,
        } => {
            let opts = NOptions {
                node_budget: budget,
                ..NOptions::default()
            };
            let r = match solver::compute_n_with(&p0, m, cap, &opts) {
                Err(Error::BudgetExceeded { at, .. }) => {
                    let doc = json!({ "p0": p0, "m": m, "cap": cap, "n_value": null, "budget_exhausted_at": at, "timing": timing(start) });
                    return Ok(Done(2, doc, format!("unknown: node budget exhausted at M = {at}\n")));
                }
                other => other?,
            };
            if let Some(path) = &out {
                write_certificate(path, &r.certificate)?;
            }
            let code = if r.value.is_exact() { 0 } else { 2 };
            let text = match r.value {
                NValue::Exact(n) => format!("{n}\n"),
                NValue::AtLeast(n) => format!(">={n} (avoidable up to the cap)\n"),
            };
            let doc = json!({
                "p0": p0, "m": m, "cap": cap,
                "n_value": r.value.value(), "exact": r.value.is_exact(),
                "certificate": r.certificate,
                "stats": { "nodes": r.stats.nodes, "backtracks": r.stats.backtracks },
                "timing": timing(start),
            });
            Ok(Done(code, doc, text))
        }
        Cmd::SearchStandard {
            m,
            cap,
            full,
            budget,
            checkpoint,
            checkpoint_every,
            resume,
            out,
        } => {
            let resume_from = match (&checkpoint, resume) {
                (Some(path), true) => {
                    let text = fs::read_to_string(path).map_err(|e| io_fail(path, e))?;
                    Some(serde_json::from_str::<Checkpoint>(&text).map_err(Error::from)?)
                }
                _ => None,
            };
            let mut write_err = None;
            let mut sink = |cp: &Checkpoint| {
                if let Some(path) = &checkpoint {
                    let tmp = path.with_extension("tmp");
                    let body = serde_json::to_string(cp).expect("checkpoint serializes");
                    if let Err(e) = fs::write(&tmp, body).and_then(|_| fs::rename(&tmp, path)) {
                        write_err.get_or_insert(io_fail(path, e));
                    }
                }
            };
            let opts = ThresholdOptions {
                node_budget: (!full).then_some(budget),
                checkpoint_every,
                on_checkpoint: Some(&mut sink),
                resume: resume_from,
                ..ThresholdOptions::default()
            };
            let result = standard::standard_threshold_with(m, cap, opts);
            if let Some(e) = write_err {
                return Err(e);
            }
            let r = match result {
                Err(Error::BudgetExceeded { at, .. }) => {
                    let doc = json!({ "m": m, "cap": cap, "threshold": null, "budget_exhausted_at": at, "timing": timing(start) });
                    return Ok(Done(
                        2,
                        doc,
                        format!("unknown: node budget exhausted at M = {at}; rerun with --full\n"),
                    ));
                }
                other => other?,
            };
            if let Some(path) = &out {
                write_certificate(path, &r.witness)?;
            }
            let (code, value, text) = match r.value {
                Threshold::Exact(t) => (
                    0,
                    t,
                    format!("threshold {t}: every standard morphism into Z/{m}Z has a monochromatic triple in [1,{t}]\n"),
                ),
                Threshold::Above(c) => (2, c, format!("above {c}: some standard morphism avoids [1,{c}]\n")),
            };
            let doc = json!({
                "m": m, "cap": cap, "threshold": value, "exact": matches!(r.value, Threshold::Exact(_)),
                "witness": r.witness,
                "stats": { "nodes": r.stats.nodes, "backtracks": r.stats.backtracks },
                "timing": timing(start),
            });
            Ok(Done(code, doc, text))
        }
        Cmd::Verify { cert, fixture } => {
            let c = match (fixture, cert) {
                (Some(Fixture::Z3), _) => fixtures::published_z3_certificate(),
                (None, Some(path)) => {
                    let text = fs::read_to_string(&path).map_err(|e| io_fail(&path, e))?;
                    Certificate::from_json(&text)?
                }
                (None, None) => return Err(Fail(64, "need --cert or --fixture".into())),
            };
            let end = c.interval_end;
            match c.verify() {
                Ok(()) => Ok(Done(
                    0,
                    json!({ "valid": true, "interval": [1, end] }),
                    format!("avoiding on [1,{end}]\n"),
                )),
                Err(e) => Ok(Done(
                    1,
                    json!({ "valid": false, "interval": [1, end], "reason": e.to_string() }),
                    format!("rejected: {e}\n"),
                )),
            }
        }
        Cmd::ExportCnf { p0, limit, out } => {
            let inst = cnf::encode(&p0, 2, limit)?;
            fs::write(&out, inst.to_dimacs()).map_err(|e| io_fail(&out, e))?;
            let text = format!(
                "wrote {}: {} variables, {} clauses\n",
                out.display(),
                inst.num_vars(),
                inst.clauses.len()
            );
            let doc = json!({ "path": out, "variables": inst.num_vars(), "clauses": inst.clauses.len() });
            Ok(Done(0, doc, text))
        }
        Cmd::DecodeModel { cnf, model, out } => {
            let text = fs::read_to_string(&cnf).map_err(|e| io_fail(&cnf, e))?;
            let inst = CnfInstance::from_dimacs(&text)?;
            let mtext = fs::read_to_string(&model).map_err(|e| io_fail(&model, e))?;
            let lits = cnf::parse_model(&mtext)?;
            let c = match inst.decode(&lits) {
                Ok(c) => c,
                Err(e @ Error::NotAModel { .. }) => {
                    return Ok(Done(1, json!({ "valid": false, "reason": e.to_string() }), format!("rejected: {e}\n")))
                }
                Err(e) => return Err(e.into()),
            };
            if let Some(path) = &out {
                write_certificate(path, &c)?;
            }
            let doc = json!({ "valid": true, "certificate": c });
            Ok(Done(0, doc, format!("avoiding on [1,{}]\n", c.interval_end)))
        }
        Cmd::Sweep {
            k,
            bound,
            m,
            cap,
            journal,
            threads,
            resume,
            max_subsets,
            priority,
        } => {
            let journal = journal.unwrap_or_else(|| {
                let dir = std::env::var_os(JOURNAL_DIR_VAR).map_or_else(|| PathBuf::from("."), PathBuf::from);
                dir.join(format!("sweep-k{k}-b{bound}-m{m}-cap{cap}.jsonl"))
            });
            let cfg = SweepConfig {
                m,
                cap,
                threads,
                journal: Some(journal.clone()),
                resume,
                max_subsets,
                priority,
                ..SweepConfig::new(k, bound)
            };
            let outcome = sweep::sweep(&cfg)?;
            for r in &outcome.records {
                r.verify()?;
            }
            let report = sweep::query(&outcome.records, &[Filter::Except(532)]);
            let mut text = format!(
                "{} of {} subsets done ({} computed now), journal {}\n",
                outcome.records.len(),
                outcome.records.len() + outcome.pending,
                outcome.computed,
                journal.display()
            );
            text.push_str(&sweep::query(&outcome.records, &[]).to_markdown());
            let doc = json!({
                "journal": journal, "done": outcome.records.len(), "pending": outcome.pending,
                "computed": outcome.computed,
                "histogram": sweep::query(&outcome.records, &[]).histogram,
                "exceptions_to_532": report.rows,
                "timing": timing(start),
            });
            Ok(Done(if outcome.pending == 0 { 0 } else { 2 }, doc, text))
        }
        Cmd::Report {
            journal,
            filter,
            format,
        } => {
            let records = sweep::read_journal(&journal)?;
            let filters = filter
                .iter()
                .map(|f| Filter::parse(f))
                .collect::<Result<Vec<_>, _>>()?;
            let report = sweep::query(&records, &filters);
            let text = match format {
                Format::Csv => report.to_csv(),
                Format::Json => report.to_json() + "\n",
                Format::Md => report.to_markdown(),
            };
            let doc = serde_json::to_value(&report).map_err(Error::from)?;
            Ok(Done(0, doc, text))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    let json_out = cli.json;
    match run(cli) {
        Ok(Done(code, doc, text)) => {
            let out = if json_out {
                serde_json::to_string_pretty(&doc).expect("json") + "\n"
            } else {
                text
            };
            // a closed pipe downstream is not an error
            match std::io::stdout().lock().write_all(out.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    eprintln!("morphic: {e}");
                    ExitCode::from(74)
                }
                _ => ExitCode::from(code),
            }
        }
        Err(Fail(code, msg)) => {
            if json_out {
                println!("{}", json!({ "error": msg, "exit_code": code }));
            }
            eprintln!("morphic: {msg}");
            ExitCode::from(code)
        }
    }
}
