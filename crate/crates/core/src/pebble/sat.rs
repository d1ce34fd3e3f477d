//! Incremental CDCL solver: two watched literals, VSIDS, phase saving, Luby
//! restarts, first-UIP learning and learnt-clause reduction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cnf::{ClauseSink, CnfFormula};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveResult {
    Sat,
    Unsat,
    /// The conflict budget ran out.
    Unknown,
}

/// Incremental satisfiability engine. Assumptions hold for one `solve` call
/// only.
pub trait SatSolver: ClauseSink {
    fn num_vars(&self) -> u32;
    fn solve(&mut self, assumptions: &[i32]) -> SolveResult;
    /// Value of `var` in the last model; `None` before a satisfiable call.
    fn value(&self, var: i32) -> Option<bool>;
    /// Caps the number of conflicts per `solve` call.
    fn set_conflict_budget(&mut self, budget: Option<u64>);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Lit(u32);

impl Lit {
    fn from_dimacs(l: i32) -> Lit {
        Lit((l.unsigned_abs() - 1) << 1 | (l < 0) as u32)
    }

    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    fn negated(self) -> bool {
        self.0 & 1 == 1
    }

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }

    fn idx(self) -> usize {
        self.0 as usize
    }
}

const TRUE: i8 = 1;
const FALSE: i8 = -1;
const UNDEF: i8 = 0;

#[derive(Debug, Clone)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    activity: f64,
    removed: bool,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: usize,
    blocker: Lit,
}

/// Binary max-heap of variables ordered by activity.
#[derive(Debug, Clone, Default)]
struct VarHeap {
    heap: Vec<usize>,
    pos: Vec<Option<usize>>,
}

impl VarHeap {
    fn grow(&mut self) {
        self.pos.push(None);
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v].is_some()
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v] = Some(self.heap.len());
        self.heap.push(v);
        self.up(self.heap.len() - 1, act);
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if let Some(i) = self.pos[v] {
            self.up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.pos[top] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = Some(0);
            self.down(0, act);
        }
        Some(top)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if act[self.heap[parent]] >= act[v] {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i]] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let left = 2 * i + 1;
            if left >= self.heap.len() {
                break;
            }
            let right = left + 1;
            let child = if right < self.heap.len() && act[self.heap[right]] > act[self.heap[left]] { right } else { left };
            if act[self.heap[child]] <= act[v] {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i]] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }
}

/// The bundled solver.
#[derive(Debug, Clone)]
pub struct CdclSolver {
    clauses: Vec<Clause>,
    learnts: Vec<usize>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    phase: Vec<bool>,
    activity: Vec<f64>,
    var_inc: f64,
    clause_inc: f64,
    heap: VarHeap,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    ok: bool,
    model: Vec<bool>,
    has_model: bool,
    rng: ChaCha8Rng,
    budget: Option<u64>,
    max_learnts: f64,
    pub stats: SolverStats,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
}

const VAR_DECAY: f64 = 0.95;
const CLAUSE_DECAY: f64 = 0.999;
const RESTART_BASE: f64 = 100.0;
const RANDOM_FREQ: f64 = 0.01;

impl Default for CdclSolver {
    fn default() -> Self {
        CdclSolver::new(0)
    }
}

impl CdclSolver {
    pub fn new(seed: u64) -> Self {
        CdclSolver {
            clauses: Vec::new(),
            learnts: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            phase: Vec::new(),
            activity: Vec::new(),
            var_inc: 1.0,
            clause_inc: 1.0,
            heap: VarHeap::default(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: Vec::new(),
            ok: true,
            model: Vec::new(),
            has_model: false,
            rng: ChaCha8Rng::seed_from_u64(seed),
            budget: None,
            max_learnts: 0.0,
            stats: SolverStats::default(),
        }
    }

    pub fn from_formula(formula: &CnfFormula, seed: u64) -> Self {
        let mut s = CdclSolver::new(seed);
        while s.num_vars() < formula.variable_count() {
            s.new_var();
        }
        for c in formula.clauses() {
            s.add_clause(c);
        }
        s
    }

    /// The last model as `model[v - 1]`.
    pub fn model(&self) -> Option<&[bool]> {
        self.has_model.then_some(&self.model[..])
    }

    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.assigns[l.var()];
        if l.negated() {
            -v
        } else {
            v
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var();
        self.assigns[v] = if l.negated() { FALSE } else { TRUE };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn attach(&mut self, cref: usize) {
        let c = &self.clauses[cref];
        let (a, b) = (c.lits[0], c.lits[1]);
        self.watches[a.idx()].push(Watcher { cref, blocker: b });
        self.watches[b.idx()].push(Watcher { cref, blocker: a });
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let start = self.trail_lim[level as usize];
        for i in (start..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var();
            self.phase[v] = !l.negated();
            self.assigns[v] = UNDEF;
            self.reason[v] = None;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(level as usize);
        self.qhead = start;
    }

    fn propagate(&mut self) -> Option<usize> {
        let mut conflict = None;
        while self.qhead < self.trail.len() && conflict.is_none() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = p.not();
            let mut ws = std::mem::take(&mut self.watches[false_lit.idx()]);
            let (mut i, mut j) = (0, 0);
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.lit_value(w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                if self.clauses[w.cref].removed {
                    continue;
                }
                let cref = w.cref;
                {
                    let lits = &mut self.clauses[cref].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                if first != w.blocker && self.lit_value(first) == TRUE {
                    ws[j] = Watcher { cref, blocker: first };
                    j += 1;
                    continue;
                }
                let len = self.clauses[cref].lits.len();
                let mut moved = false;
                for k in 2..len {
                    let l = self.clauses[cref].lits[k];
                    if self.lit_value(l) != FALSE {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[l.idx()].push(Watcher { cref, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher { cref, blocker: first };
                j += 1;
                if self.lit_value(first) == FALSE {
                    conflict = Some(cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, Some(cref));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.idx()] = ws;
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: usize) {
        let c = &mut self.clauses[cref];
        if !c.learnt {
            return;
        }
        c.activity += self.clause_inc;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l].activity *= 1e-20;
            }
            self.clause_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, mut confl: usize) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit(0)];
        let mut path = 0;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let current = self.decision_level();
        loop {
            self.bump_clause(confl);
            let skip = usize::from(p.is_some());
            let lits = self.clauses[confl].lits[skip..].to_vec();
            for q in lits {
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var()] {
                    break;
                }
            }
            let lit = self.trail[index];
            self.seen[lit.var()] = false;
            path -= 1;
            p = Some(lit);
            if path == 0 {
                break;
            }
            confl = self.reason[lit.var()].expect("implied literal has a reason");
        }
        learnt[0] = p.expect("conflict at positive level").not();

        // drop literals implied by other literals of the clause
        let original = learnt.clone();
        let mut kept = vec![learnt[0]];
        for &l in &learnt[1..] {
            let redundant = match self.reason[l.var()] {
                None => false,
                Some(r) => self.clauses[r].lits[1..]
                    .iter()
                    .all(|q| self.seen[q.var()] || self.level[q.var()] == 0),
            };
            if !redundant {
                kept.push(l);
            }
        }
        for l in &original {
            self.seen[l.var()] = false;
        }
        learnt = kept;

        let mut bt = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var()] > self.level[learnt[max_i].var()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            bt = self.level[learnt[1].var()];
        }
        (learnt, bt)
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        if self.rng.gen_bool(RANDOM_FREQ) && !self.heap.heap.is_empty() {
            let v = self.heap.heap[self.rng.gen_range(0..self.heap.heap.len())];
            if self.assigns[v] == UNDEF {
                return Some(Lit((v as u32) << 1 | (!self.phase[v]) as u32));
            }
        }
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v] == UNDEF {
                return Some(Lit((v as u32) << 1 | (!self.phase[v]) as u32));
            }
        }
        None
    }

    fn locked(&self, cref: usize) -> bool {
        let l = self.clauses[cref].lits[0];
        self.reason[l.var()] == Some(cref) && self.lit_value(l) == TRUE
    }

    fn reduce_db(&mut self) {
        let mut learnts = std::mem::take(&mut self.learnts);
        learnts.sort_by(|&a, &b| self.clauses[a].activity.total_cmp(&self.clauses[b].activity));
        let half = learnts.len() / 2;
        let mut keep = Vec::with_capacity(learnts.len());
        for (i, &cref) in learnts.iter().enumerate() {
            if i < half && self.clauses[cref].lits.len() > 2 && !self.locked(cref) {
                self.clauses[cref].removed = true;
                self.clauses[cref].lits = Vec::new();
            } else {
                keep.push(cref);
            }
        }
        self.learnts = keep;
    }

    fn search(&mut self, assumptions: &[Lit], conflicts_allowed: u64, spent: &mut u64) -> Option<SolveResult> {
        let mut local = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                local += 1;
                *spent += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Some(SolveResult::Unsat);
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let cref = self.clauses.len();
                    self.clauses.push(Clause { lits: learnt.clone(), learnt: true, activity: 0.0, removed: false });
                    self.learnts.push(cref);
                    self.attach(cref);
                    self.bump_clause(cref);
                    self.enqueue(learnt[0], Some(cref));
                }
                self.var_inc /= VAR_DECAY;
                self.clause_inc /= CLAUSE_DECAY;
                continue;
            }
            if let Some(b) = self.budget {
                if *spent >= b {
                    return Some(SolveResult::Unknown);
                }
            }
            if local >= conflicts_allowed {
                return None;
            }
            if self.learnts.len() as f64 - self.trail.len() as f64 >= self.max_learnts {
                self.reduce_db();
            }
            let mut next = None;
            while (self.decision_level() as usize) < assumptions.len() {
                let a = assumptions[self.decision_level() as usize];
                match self.lit_value(a) {
                    TRUE => self.trail_lim.push(self.trail.len()),
                    FALSE => return Some(SolveResult::Unsat),
                    _ => {
                        next = Some(a);
                        break;
                    }
                }
            }
            let decision = match next {
                Some(a) => a,
                None => match self.pick_branch() {
                    Some(l) => l,
                    None => return Some(SolveResult::Sat),
                },
            };
            self.stats.decisions += 1;
            self.trail_lim.push(self.trail.len());
            self.enqueue(decision, None);
        }
    }
}

fn luby(y: f64, mut x: u64) -> f64 {
    let (mut size, mut seq) = (1u64, 0i32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq)
}

impl ClauseSink for CdclSolver {
    fn new_var(&mut self) -> i32 {
        let v = self.assigns.len();
        self.assigns.push(UNDEF);
        self.level.push(0);
        self.reason.push(None);
        self.phase.push(false);
        self.activity.push(self.rng.gen::<f64>() * 1e-5);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.heap.grow();
        self.heap.insert(v, &self.activity);
        v as i32 + 1
    }

    fn add_clause(&mut self, lits: &[i32]) {
        assert!(!lits.is_empty(), "empty clauses are not allowed");
        self.cancel_until(0);
        if !self.ok {
            return;
        }
        let mut c: Vec<Lit> = lits
            .iter()
            .map(|&l| {
                assert!(l != 0 && l.unsigned_abs() as usize <= self.assigns.len(), "undeclared variable in {l}");
                Lit::from_dimacs(l)
            })
            .collect();
        c.sort_by_key(|l| l.0);
        c.dedup();
        if c.windows(2).any(|w| w[0].var() == w[1].var()) {
            return;
        }
        if c.iter().any(|&l| self.lit_value(l) == TRUE) {
            return;
        }
        c.retain(|&l| self.lit_value(l) != FALSE);
        match c.len() {
            0 => self.ok = false,
            1 => {
                self.enqueue(c[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                let cref = self.clauses.len();
                self.clauses.push(Clause { lits: c, learnt: false, activity: 0.0, removed: false });
                self.attach(cref);
            }
        }
    }
}

impl SatSolver for CdclSolver {
    fn num_vars(&self) -> u32 {
        self.assigns.len() as u32
    }

    fn solve(&mut self, assumptions: &[i32]) -> SolveResult {
        self.has_model = false;
        self.cancel_until(0);
        if !self.ok {
            return SolveResult::Unsat;
        }
        let assumptions: Vec<Lit> = assumptions.iter().map(|&l| Lit::from_dimacs(l)).collect();
        let originals = self.clauses.iter().filter(|c| !c.learnt && !c.removed).count();
        self.max_learnts = self.max_learnts.max(originals as f64 / 3.0 + 1000.0);
        let mut spent = 0u64;
        let mut restarts = 0u64;
        let result = loop {
            let allowed = (luby(2.0, restarts) * RESTART_BASE) as u64;
            match self.search(&assumptions, allowed, &mut spent) {
                Some(r) => break r,
                None => {
                    restarts += 1;
                    self.stats.restarts += 1;
                    self.max_learnts *= 1.05;
                    self.cancel_until(0);
                }
            }
        };
        if result == SolveResult::Sat {
            self.model = self.assigns.iter().map(|&a| a == TRUE).collect();
            self.has_model = true;
        }
        self.cancel_until(0);
        result
    }

    fn value(&self, var: i32) -> Option<bool> {
        if !self.has_model {
            return None;
        }
        self.model.get(var.unsigned_abs() as usize - 1).copied()
    }

    fn set_conflict_budget(&mut self, budget: Option<u64>) {
        self.budget = budget;
    }
}
