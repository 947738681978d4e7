//! Backtracking search with forward checking over linear colorings.
//!
//! A problem has `num_vars` variables ranging over `Z/mZ`. Every triple
//! member is a linear form `sum coeff * var`, and a triple is violated when
//! its three members are fully assigned and share a value. Variables are
//! assigned in a fixed static order. After each assignment, every member
//! whose form just became complete is evaluated and the triples containing
//! it are checked.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

pub(crate) const UNSET: u8 = u8::MAX;

#[derive(Clone, Debug)]
pub(crate) struct Problem {
    pub modulus: u8,
    pub num_vars: usize,
    /// Per member: `(variable, coefficient)` pairs, coefficients nonzero.
    pub forms: Vec<Vec<(u32, u8)>>,
    /// Member indices of each triple.
    pub triples: Vec<[u32; 3]>,
    /// Variable assignment order.
    pub order: Vec<u32>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub nodes: u64,
    pub backtracks: u64,
}

impl std::ops::AddAssign for Counters {
    fn add_assign(&mut self, rhs: Self) {
        self.nodes += rhs.nodes;
        self.backtracks += rhs.backtracks;
    }
}

pub(crate) enum Finish {
    /// The solution callback asked to stop; carries the assignment it saw.
    Stopped(Vec<u8>),
    /// The whole space was explored.
    Exhausted,
    BudgetExceeded,
}


pub(crate) struct Config<'a> {
    pub budget: Option<u64>,
    /// Remove values that would complete a monochromatic triple from the
    /// domains of unassigned variables, failing on an empty domain and
    /// assigning single-valued domains at once. Without it a triple is only
    /// checked once all three members are colored.
    pub prune: bool,
    /// Restrict the first nonzero value (in branching order) to one
    /// representative per orbit of the unit group.
    pub symmetry: bool,
    /// Preferred value per variable, tried first.
    pub seed: Option<&'a [u8]>,
    /// Decision values of a node to restart from; everything before it in
    /// search order is skipped.
    pub resume: Option<&'a [u8]>,
    pub progress: Option<(u64, &'a mut ProgressFn<'a>)>,
}

type ProgressFn<'a> = dyn FnMut(&[u8], &Counters) + 'a;
type LevelProgressFn<'a> = dyn FnMut(u64, &[u8], &Counters) + 'a;
type Assignment = BTreeMap<u64, u32>;
type LevelFn<'a> = dyn FnMut(u64, &Assignment) + 'a;
type ShortcutFn<'a> = dyn FnMut(u64, &Assignment) -> Option<Assignment> + 'a;

impl Default for Config<'_> {
    fn default() -> Self {
        Self {
            budget: None,
            prune: true,
            symmetry: false,
            seed: None,
            resume: None,
            progress: None,
        }
    }
}

struct State<'p> {
    p: &'p Problem,
    m: usize,
    prune: bool,
    var_members: Vec<Vec<(u32, u8)>>,
    member_triples: Vec<Vec<u32>>,
    values: Vec<u8>,
    remaining: Vec<u32>,
    sum: Vec<u8>,
    /// Per `(var, value)`: number of reasons excluding it.
    forbid: Vec<u16>,
    /// Per var: number of values not excluded.
    allowed: Vec<u8>,
    trail: Vec<u32>,
    forbid_trail: Vec<u32>,
    units: Vec<u32>,
    touched: Vec<u32>,
}

impl<'p> State<'p> {
    fn new(p: &'p Problem, prune: bool) -> Self {
        let mut var_members = vec![Vec::new(); p.num_vars];
        for (mem, form) in p.forms.iter().enumerate() {
            for &(v, c) in form {
                var_members[v as usize].push((mem as u32, c));
            }
        }
        let mut member_triples = vec![Vec::new(); p.forms.len()];
        for (t, tri) in p.triples.iter().enumerate() {
            for &mem in tri {
                member_triples[mem as usize].push(t as u32);
            }
        }
        let m = p.modulus as usize;
        Self {
            p,
            m,
            prune,
            var_members,
            member_triples,
            values: vec![UNSET; p.num_vars],
            remaining: p.forms.iter().map(|f| f.len() as u32).collect(),
            sum: vec![0; p.forms.len()],
            forbid: vec![0; p.num_vars * m],
            allowed: vec![p.modulus; p.num_vars],
            trail: Vec::with_capacity(p.num_vars),
            forbid_trail: Vec::new(),
            units: Vec::new(),
            touched: Vec::new(),
        }
    }

    /// Checks every triple once and propagates; false on a conflict.
    fn init(&mut self) -> bool {
        (0..self.p.triples.len() as u32).all(|t| self.examine(t)) && self.propagate()
    }

    fn is_forbidden(&self, var: u32, value: u8) -> bool {
        self.forbid[var as usize * self.m + value as usize] > 0
    }

    fn exclude(&mut self, var: u32, value: u8) -> bool {
        let idx = var as usize * self.m + value as usize;
        if self.forbid[idx] == 0 {
            self.allowed[var as usize] -= 1;
            if self.allowed[var as usize] == 1 {
                self.units.push(var);
            }
        }
        self.forbid[idx] += 1;
        self.forbid_trail.push(idx as u32);
        self.allowed[var as usize] > 0
    }

    /// The only unassigned variable of `mem` and its coefficient.
    fn last_free(&self, mem: usize) -> (u32, u8) {
        *self.p.forms[mem]
            .iter()
            .find(|&&(v, _)| self.values[v as usize] == UNSET)
            .expect("member has one free variable")
    }

    /// False if triple `t` is monochromatic or forces an empty domain.
    fn examine(&mut self, t: u32) -> bool {
        let tri = self.p.triples[t as usize];
        let known = tri.map(|x| self.remaining[x as usize] == 0);
        let color = tri.map(|x| self.sum[x as usize]);
        match known {
            [true, true, true] => !(color[0] == color[1] && color[1] == color[2]),
            _ if !self.prune => true,
            [true, true, false] | [true, false, true] | [false, true, true] => {
                let open = known.iter().position(|&k| !k).expect("one open member");
                let (i, j) = match open {
                    0 => (1, 2),
                    1 => (0, 2),
                    _ => (0, 1),
                };
                let mem = tri[open] as usize;
                if color[i] != color[j] || self.remaining[mem] != 1 {
                    return true;
                }
                let (var, coeff) = self.last_free(mem);
                let m = self.m as u32;
                let partial = self.sum[mem] as u32;
                for v in 0..self.p.modulus {
                    if (partial + coeff as u32 * v as u32) % m == color[i] as u32
                        && !self.exclude(var, v)
                    {
                        return false;
                    }
                }
                true
            }
            _ => true,
        }
    }

    /// Assigns and reports whether the state is still consistent. The
    /// assignment is recorded either way; undo with `undo_to`.
    fn assign(&mut self, var: u32, value: u8) -> bool {
        let m = self.m as u32;
        self.values[var as usize] = value;
        self.trail.push(var);
        let mut touched = std::mem::take(&mut self.touched);
        touched.clear();
        for &(mem, c) in &self.var_members[var as usize] {
            let i = mem as usize;
            self.remaining[i] -= 1;
            self.sum[i] = ((self.sum[i] as u32 + c as u32 * value as u32) % m) as u8;
            if self.remaining[i] <= 1 {
                touched.push(mem);
            }
        }
        let mut ok = true;
        'outer: for &mem in &touched {
            for k in 0..self.member_triples[mem as usize].len() {
                let t = self.member_triples[mem as usize][k];
                if !self.examine(t) {
                    ok = false;
                    break 'outer;
                }
            }
        }
        self.touched = touched;
        ok
    }

    /// Assigns every variable left with a single allowed value.
    fn propagate(&mut self) -> bool {
        while let Some(var) = self.units.pop() {
            if self.values[var as usize] != UNSET {
                continue;
            }
            let Some(value) = (0..self.p.modulus).find(|&v| !self.is_forbidden(var, v)) else {
                return false;
            };
            if !self.assign(var, value) {
                return false;
            }
        }
        true
    }

    fn unassign_last(&mut self) {
        let var = self.trail.pop().expect("trail not empty");
        let m = self.m as u32;
        let value = self.values[var as usize] as u32;
        for &(mem, c) in &self.var_members[var as usize] {
            let i = mem as usize;
            self.remaining[i] += 1;
            let delta = (c as u32 * value) % m;
            self.sum[i] = ((self.sum[i] as u32 + m - delta) % m) as u8;
        }
        self.values[var as usize] = UNSET;
    }

    fn undo_to(&mut self, trail_mark: usize, forbid_mark: usize) {
        self.units.clear();
        while self.forbid_trail.len() > forbid_mark {
            let idx = self.forbid_trail.pop().expect("nonempty") as usize;
            self.forbid[idx] -= 1;
            if self.forbid[idx] == 0 {
                self.allowed[idx / self.m] += 1;
            }
        }
        while self.trail.len() > trail_mark {
            self.unassign_last();
        }
    }

    fn next_unassigned(&self, from: usize) -> usize {
        (from..self.p.order.len())
            .find(|&pos| self.values[self.p.order[pos] as usize] == UNSET)
            .unwrap_or(self.p.order.len())
    }

    /// Extends the all-zero prefix of the branching order; false if it ends
    /// at a value that is not an orbit representative.
    fn advance_zero_prefix(&self, zp: &mut usize, is_rep: &[bool]) -> bool {
        while let Some(&var) = self.p.order.get(*zp) {
            match self.values[var as usize] {
                UNSET => return true,
                0 => *zp += 1,
                v => return is_rep[v as usize],
            }
        }
        true
    }
}

/// Nonzero values that are the smallest element of their orbit under
/// multiplication by units.
pub(crate) fn orbit_representatives(m: u8) -> Vec<u8> {
    let m32 = m as u32;
    let units: Vec<u32> = (1..m32)
        .filter(|&u| crate::arithmetic::gcd(u as u64, m as u64) == 1)
        .collect();
    (1..m32)
        .filter(|&v| units.iter().all(|&u| (u * v) % m32 >= v))
        .map(|v| v as u8)
        .collect()
}

struct Frame {
    pos: usize,
    cursor: usize,
    trail_mark: usize,
    forbid_mark: usize,
    zero_prefix: usize,
}

/// Depth-first search. Decisions follow `order`; forced values are
/// assigned as soon as they appear. `on_solution` receives complete
/// assignments indexed by variable and decides whether to continue.
pub(crate) fn search(
    p: &Problem,
    cfg: Config<'_>,
    counters: &mut Counters,
    mut on_solution: impl FnMut(&[u8]) -> ControlFlow<()>,
) -> Finish {
    debug_assert_eq!(p.order.len(), p.num_vars);
    let Config {
        budget,
        prune,
        symmetry,
        seed,
        resume,
        mut progress,
    } = cfg;
    let n = p.order.len();
    let mut st = State::new(p, prune);
    let reps = orbit_representatives(p.modulus);
    let mut is_rep = vec![false; p.modulus as usize];
    for &r in &reps {
        is_rep[r as usize] = true;
    }
    let mut zp = 0usize;
    if !st.init() || (symmetry && !st.advance_zero_prefix(&mut zp, &is_rep)) {
        return Finish::Exhausted;
    }
    let resume = resume.unwrap_or(&[]);
    let mut replaying = !resume.is_empty();
    let mut frames: Vec<Frame> = Vec::with_capacity(n);
    let mut candidates: Vec<Vec<u8>> = Vec::new();
    let mut next_pos = st.next_unassigned(0);

    loop {
        if next_pos == n {
            if on_solution(&st.values).is_break() {
                return Finish::Stopped(st.values.clone());
            }
            let Some(f) = frames.last() else {
                return Finish::Exhausted;
            };
            st.undo_to(f.trail_mark, f.forbid_mark);
            zp = f.zero_prefix;
        } else {
            let depth = frames.len();
            if candidates.len() <= depth {
                candidates.push(Vec::with_capacity(p.modulus as usize));
            }
            let var = p.order[next_pos];
            let list = &mut candidates[depth];
            list.clear();
            if symmetry && next_pos == zp {
                list.push(0);
                list.extend_from_slice(&reps);
            } else {
                list.extend(0..p.modulus);
            }
            list.retain(|&v| !st.is_forbidden(var, v));
            if let Some(seed) = seed {
                if let Some(pos) = list.iter().position(|&v| v == seed[var as usize]) {
                    list[..=pos].rotate_right(1);
                }
            }
            let mut cursor = 0;
            if replaying {
                match resume.get(depth) {
                    Some(&v) => cursor = list.iter().position(|&x| x == v).unwrap_or(list.len()),
                    None => replaying = false,
                }
            }
            frames.push(Frame {
                pos: next_pos,
                cursor,
                trail_mark: st.trail.len(),
                forbid_mark: st.forbid_trail.len(),
                zero_prefix: zp,
            });
        }

        loop {
            let depth = frames.len();
            let Some(f) = frames.last_mut() else {
                return Finish::Exhausted;
            };
            if f.cursor < candidates[depth - 1].len() {
                let value = candidates[depth - 1][f.cursor];
                f.cursor += 1;
                let (pos, trail_mark, forbid_mark, zero_prefix) =
                    (f.pos, f.trail_mark, f.forbid_mark, f.zero_prefix);
                counters.nodes += 1;
                if budget.is_some_and(|b| counters.nodes > b) {
                    return Finish::BudgetExceeded;
                }
                if let Some((every, report)) = progress.as_mut() {
                    if counters.nodes.is_multiple_of(*every) {
                        let path: Vec<u8> = frames[..depth - 1]
                            .iter()
                            .zip(&candidates)
                            .map(|(fr, c)| c[fr.cursor - 1])
                            .collect();
                        report(&path, counters);
                    }
                }
                let ok = st.assign(p.order[pos], value)
                    && st.propagate()
                    && (!symmetry || st.advance_zero_prefix(&mut zp, &is_rep));
                if ok {
                    next_pos = st.next_unassigned(pos + 1);
                    break;
                }
                st.undo_to(trail_mark, forbid_mark);
                zp = zero_prefix;
            } else {
                counters.backtracks += 1;
                replaying = false;
                frames.pop();
                let Some(parent) = frames.last() else {
                    return Finish::Exhausted;
                };
                st.undo_to(parent.trail_mark, parent.forbid_mark);
                zp = parent.zero_prefix;
            }
        }
    }
}

/// Result of scanning hypotenuses upward until the constraints become
/// unsatisfiable.
pub(crate) struct Ascent {
    /// First hypotenuse with no avoiding assignment, if found within the
    /// range.
    pub blocked_at: Option<u64>,
    /// Last avoiding assignment, keyed by variable integer.
    pub witness: BTreeMap<u64, u32>,
    /// Hypotenuse of the last satisfiable instance (0 if none).
    pub witness_at: u64,
    pub counters: Counters,
}

pub(crate) enum AscentError {
    /// A full search ran out of nodes at this level.
    Budget { at: u64 },
}

/// Per-level callbacks for `ascend`.
pub(crate) struct AscendHooks<'a> {
    /// Node budget of each full search; `None` for unlimited.
    pub budget: Option<u64>,
    /// Node budget of the seeded attempt that precedes each full search.
    pub warm_budget: u64,
    pub symmetry: bool,
    /// Called before each hypotenuse level.
    pub on_level: Option<&'a mut LevelFn<'a>>,
    /// `(every, f)`: progress of full searches, with the current level.
    pub progress: Option<(u64, &'a mut LevelProgressFn<'a>)>,
    /// Resume a full search at the given level from a path.
    pub resume: Option<(u64, Vec<u8>)>,
    /// Cheap test run before building a level: returns the previous
    /// witness, extended to the level's new variables, if it still works.
    pub shortcut: Option<&'a mut ShortcutFn<'a>>,
}

/// Extends `witness` by 0 on unseen variables and returns it if no triple
/// in `fresh` is monochromatic. Members are given as `(variable,
/// coefficient)` forms.
pub(crate) fn extend_witness(
    modulus: u32,
    witness: &BTreeMap<u64, u32>,
    fresh: &[[Vec<(u64, u32)>; 3]],
) -> Option<BTreeMap<u64, u32>> {
    let mut extended = witness.clone();
    for forms in fresh {
        let colors = forms.each_ref().map(|form| {
            form.iter()
                .map(|&(q, c)| c * *extended.entry(q).or_insert(0))
                .sum::<u32>()
                % modulus
        });
        if colors[0] == colors[1] && colors[1] == colors[2] {
            return None;
        }
    }
    Some(extended)
}

/// Walks `levels` in ascending order. `build(level)` returns the problem
/// and the integer naming each variable. The previous witness seeds each
/// level; when the cheap seeded attempt is inconclusive a full search runs.
pub(crate) fn ascend(
    levels: &[u64],
    mut build: impl FnMut(u64) -> (Problem, Vec<u64>),
    start_witness: BTreeMap<u64, u32>,
    hooks: &mut AscendHooks<'_>,
) -> Result<Ascent, AscentError> {
    let mut witness = start_witness;
    let mut witness_at = 0;
    let mut counters = Counters::default();
    let mut resume = hooks.resume.take();
    for &level in levels {
        if let Some((at, _)) = &resume {
            if level < *at {
                continue;
            }
        }
        if let Some(f) = hooks.on_level.as_mut() {
            f(level, &witness);
        }
        if resume.is_none() {
            if let Some(w) = hooks.shortcut.as_mut().and_then(|f| f(level, &witness)) {
                witness = w;
                witness_at = level;
                continue;
            }
        }
        let (problem, keys) = build(level);
        let mut outcome = None;
        if resume.is_none() {
            let seed: Vec<u8> = keys
                .iter()
                .map(|k| witness.get(k).map_or(0, |&v| v as u8))
                .collect();
            let mut local = Counters::default();
            let cfg = Config {
                budget: Some(hooks.warm_budget),
                seed: Some(&seed),
                ..Config::default()
            };
            outcome = match search(&problem, cfg, &mut local, |_| ControlFlow::Break(())) {
                Finish::Stopped(v) => Some(Some(v)),
                Finish::Exhausted => Some(None),
                Finish::BudgetExceeded => None,
            };
            local.nodes = local.nodes.min(hooks.warm_budget);
            counters += local;
        }
        let outcome = match outcome {
            Some(o) => o,
            None => {
                let path = resume.take().map(|(_, p)| p);
                let mut local = Counters::default();
                let mut adapter;
                let progress: Option<(u64, &mut ProgressFn<'_>)> =
                    match hooks.progress.as_mut() {
                        Some((every, f)) => {
                            adapter = |path: &[u8], c: &Counters| f(level, path, c);
                            Some((*every, &mut adapter))
                        }
                        None => None,
                    };
                let cfg = Config {
                    budget: hooks.budget,
                    symmetry: hooks.symmetry,
                    resume: path.as_deref(),
                    progress,
                    ..Config::default()
                };
                let finish = search(&problem, cfg, &mut local, |_| ControlFlow::Break(()));
                counters += local;
                match finish {
                    Finish::Stopped(v) => Some(v),
                    Finish::Exhausted => None,
                    Finish::BudgetExceeded => {
                        return Err(AscentError::Budget { at: level });
                    }
                }
            }
        };
        match outcome {
            Some(values) => {
                witness = keys
                    .iter()
                    .zip(&values)
                    .map(|(&k, &v)| (k, v as u32))
                    .collect();
                witness_at = level;
            }
            None => {
                return Ok(Ascent {
                    blocked_at: Some(level),
                    witness,
                    witness_at,
                    counters,
                })
            }
        }
    }
    Ok(Ascent {
        blocked_at: None,
        witness,
        witness_at,
        counters,
    })
}
