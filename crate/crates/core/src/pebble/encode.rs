//! CNF unrolling of the pebble game.
//!
//! Variable `x_i^s` says node `i` holds a pebble after `s` steps. Each XOR
//! node also gets a move variable `m_v^s` per transition, true when the node
//! itself is placed or removed in place. A pebble of an XOR child that is
//! consumed or restored by its parent flips without a move of its own, which
//! the move variables make expressible.

use super::cnf::{ClauseSink, CnfFormula};
use super::{FinalMode, PebbleError};
use crate::xag::{GateKind, NodeId, XagNetwork};

/// Adds clauses stating that at most `k` of `lits` are true (sequential
/// counter).
pub fn at_most<S: ClauseSink + ?Sized>(sink: &mut S, lits: &[i32], k: usize) {
    let n = lits.len();
    if k >= n {
        return;
    }
    if k == 0 {
        for &l in lits {
            sink.add_clause(&[-l]);
        }
        return;
    }
    // reg[i][j] is true when at least j+1 of lits[0..=i] are true
    let mut prev: Vec<i32> = Vec::new();
    for (i, &x) in lits.iter().enumerate().take(n - 1) {
        let cur: Vec<i32> = (0..k).map(|_| sink.new_var()).collect();
        sink.add_clause(&[-x, cur[0]]);
        if i == 0 {
            for &r in &cur[1..] {
                sink.add_clause(&[-r]);
            }
        } else {
            for j in 0..k {
                sink.add_clause(&[-prev[j], cur[j]]);
                if j > 0 {
                    sink.add_clause(&[-x, -prev[j - 1], cur[j]]);
                }
            }
            sink.add_clause(&[-x, -prev[k - 1]]);
        }
        prev = cur;
    }
    sink.add_clause(&[-lits[n - 1], -prev[k - 1]]);
}

/// Incremental unrolling of the transition system for one network and
/// pebble bound.
#[derive(Debug, Clone)]
pub struct Unroller<'a> {
    network: &'a XagNetwork,
    max_pebbles: usize,
    mode: FinalMode,
    /// `frames[s][i]` is the variable of node `i` (index 0 unused).
    frames: Vec<Vec<i32>>,
    /// Move variables of XOR nodes, per transition.
    moves: Vec<Vec<(NodeId, i32)>>,
    xor_parents: Vec<Vec<NodeId>>,
    /// XOR pairs `(i, i', c)` sharing the child `c`.
    shared: Vec<(NodeId, NodeId, NodeId)>,
    /// Output roots that are steps; these must be visited.
    targets: Vec<NodeId>,
    /// Fewest transitions needed to pebble each node from the initial
    /// configuration (and, symmetrically, to clear it again).
    depth: Vec<usize>,
    progress: bool,
}

impl<'a> Unroller<'a> {
    pub fn new(network: &'a XagNetwork, max_pebbles: usize, mode: FinalMode) -> Result<Self, PebbleError> {
        if !network.is_normalized() {
            return Err(PebbleError::NotNormalized);
        }
        if max_pebbles < network.num_inputs() {
            return Err(PebbleError::TooFewPebbles { pebbles: max_pebbles, inputs: network.num_inputs() });
        }
        let mut xor_parents = vec![Vec::new(); network.num_nodes() + 1];
        let mut xors = Vec::new();
        for (id, step) in network.step_ids() {
            if step.kind == GateKind::Xor {
                for c in step.children() {
                    xor_parents[c.index()].push(id);
                }
                xors.push((id, *step));
            }
        }
        let mut shared = Vec::new();
        for (a, (i, si)) in xors.iter().enumerate() {
            for (ip, sip) in &xors[a + 1..] {
                for c in si.children() {
                    if sip.children().contains(&c) {
                        shared.push((*i, *ip, c));
                    }
                }
            }
        }
        let mut targets: Vec<NodeId> = network
            .outputs()
            .iter()
            .map(|o| o.root)
            .filter(|r| r.raw() as usize > network.num_inputs())
            .collect();
        targets.sort();
        targets.dedup();
        let mut depth = vec![0; network.num_nodes() + 1];
        for (id, step) in network.step_ids() {
            depth[id.index()] = 1 + depth[step.left.index()].max(depth[step.right.index()]);
        }
        Ok(Unroller {
            network,
            max_pebbles,
            mode,
            frames: Vec::new(),
            moves: Vec::new(),
            xor_parents,
            shared,
            targets,
            depth,
            progress: false,
        })
    }

    /// Forbids idle transitions. Sound when the walk length is searched
    /// upward from 1, since a shortest walk never idles.
    pub fn require_progress(mut self, on: bool) -> Self {
        self.progress = on;
        self
    }

    pub fn network(&self) -> &XagNetwork {
        self.network
    }

    pub fn max_pebbles(&self) -> usize {
        self.max_pebbles
    }

    pub fn mode(&self) -> FinalMode {
        self.mode
    }

    /// Number of transitions added so far.
    pub fn steps(&self) -> usize {
        self.moves.len()
    }

    pub fn frames(&self) -> usize {
        self.frames.len()
    }

    pub fn pebble(&self, node: NodeId, step: usize) -> i32 {
        self.frames[step][node.index()]
    }

    pub fn move_var(&self, node: NodeId, transition: usize) -> Option<i32> {
        self.moves[transition].iter().find(|(n, _)| *n == node).map(|&(_, v)| v)
    }

    /// Allocates the pebble variables of the next frame. Frame 0 also gets
    /// the initial-configuration unit clauses.
    pub fn add_frame<S: ClauseSink + ?Sized>(&mut self, sink: &mut S) {
        let nodes = self.network.num_nodes();
        let mut frame = vec![0];
        frame.extend((0..nodes).map(|_| sink.new_var()));
        self.frames.push(frame);
        let s = self.frames.len() - 1;
        if s == 0 {
            for lit in self.configuration_units(0, |i| i <= self.network.num_inputs()) {
                sink.add_clause(&[lit]);
            }
        } else {
            // implied by the move rules, but cheap for the solver to know
            for i in self.network.num_inputs() + 1..=self.network.num_nodes() {
                if self.depth[i] > s {
                    sink.add_clause(&[-self.frames[s][i]]);
                }
            }
        }
    }

    fn configuration_units(&self, step: usize, pebbled: impl Fn(usize) -> bool) -> Vec<i32> {
        (1..=self.network.num_nodes())
            .map(|i| if pebbled(i) { self.frames[step][i] } else { -self.frames[step][i] })
            .collect()
    }

    /// Unit literals fixing the last configuration of a walk with `steps`
    /// transitions.
    pub fn final_literals(&self, steps: usize) -> Vec<i32> {
        let n = self.network.num_inputs();
        match self.mode {
            FinalMode::RoundTrip => {
                let mut lits = self.configuration_units(steps, |i| i <= n);
                // a pebble on a node of depth d takes at least d more steps to clear
                for i in n + 1..=self.network.num_nodes() {
                    for s in (steps + 1).saturating_sub(self.depth[i])..steps {
                        lits.push(-self.frames[s][i]);
                    }
                }
                lits
            }
            FinalMode::OutputsPebbled => {
                self.configuration_units(steps, |i| i <= n || self.targets.contains(&NodeId::new(i as u32)))
            }
        }
    }

    /// In round-trip mode, the clauses requiring every output root to be
    /// pebbled at some step `0..=steps`. With `guard`, each clause is
    /// weakened by the negation of a fresh activation literal, which is
    /// returned.
    pub fn visit_clauses<S: ClauseSink + ?Sized>(&self, sink: &mut S, steps: usize, guard: bool) -> Option<i32> {
        if self.mode != FinalMode::RoundTrip || self.targets.is_empty() {
            return None;
        }
        let act = guard.then(|| sink.new_var());
        for &t in &self.targets {
            let mut clause: Vec<i32> = (0..=steps).map(|s| self.pebble(t, s)).collect();
            if let Some(a) = act {
                clause.push(-a);
            }
            sink.add_clause(&clause);
        }
        act
    }

    /// Adds the move variables and transition clauses between frames
    /// `s` and `s + 1`. Both frames must exist.
    pub fn add_transition<S: ClauseSink + ?Sized>(&mut self, sink: &mut S) {
        let s = self.moves.len();
        assert!(self.frames.len() > s + 1, "both frames of the transition must be allocated");
        let x = |i: NodeId| self.frames[s][i.index()];
        let y = |i: NodeId| self.frames[s + 1][i.index()];

        let mut moves = Vec::new();
        for (id, step) in self.network.step_ids() {
            if step.kind == GateKind::Xor {
                moves.push((id, sink.new_var()));
            }
        }
        let m = |node: NodeId| moves.iter().find(|(n, _)| *n == node).map(|&(_, v)| v);
        let parent_moves = |c: NodeId| -> Vec<i32> { self.xor_parents[c.index()].iter().map(|&p| m(p).unwrap()).collect() };

        // a flip of `c` needs `extra` unless a parent XOR moves
        let explain = |sink: &mut S, c: NodeId, extra: &[i32]| {
            let parents = parent_moves(c);
            for flip in [[-x(c), y(c)], [x(c), -y(c)]] {
                let mut clause = flip.to_vec();
                clause.extend_from_slice(extra);
                clause.extend_from_slice(&parents);
                sink.add_clause(&clause);
            }
        };

        for i in self.network.input_ids() {
            explain(sink, i, &[]);
        }
        for (id, step) in self.network.step_ids() {
            let (j, k) = (step.left, step.right);
            match step.kind {
                GateKind::And => {
                    for lit in [x(j), y(j), x(k), y(k)] {
                        explain(sink, id, &[lit]);
                    }
                }
                GateKind::Xor => {
                    let mv = m(id).unwrap();
                    explain(sink, id, &[mv]);
                    // an own move flips the node
                    sink.add_clause(&[-mv, x(id), y(id)]);
                    sink.add_clause(&[-mv, -x(id), -y(id)]);
                    // placing: both children before, exactly one after
                    let place = [-mv, x(id)];
                    for extra in [vec![x(j)], vec![x(k)], vec![y(j), y(k)], vec![-y(j), -y(k)]] {
                        sink.add_clause(&[&place[..], &extra].concat());
                    }
                    // removing: exactly one child before, both after
                    let remove = [-mv, -x(id)];
                    for extra in [vec![y(j)], vec![y(k)], vec![x(j), x(k)], vec![-x(j), -x(k)]] {
                        sink.add_clause(&[&remove[..], &extra].concat());
                    }
                    // a child XOR cannot move in place while its parent does
                    for c in [j, k] {
                        if let Some(mc) = m(c) {
                            sink.add_clause(&[-mv, -mc]);
                        }
                    }
                }
            }
        }
        if self.progress {
            let mut flips = Vec::new();
            for i in 1..=self.network.num_nodes() {
                let node = NodeId::new(i as u32);
                let f = sink.new_var();
                sink.add_clause(&[-f, x(node), y(node)]);
                sink.add_clause(&[-f, -x(node), -y(node)]);
                flips.push(f);
            }
            sink.add_clause(&flips);
        }
        for &(i, ip, c) in &self.shared {
            sink.add_clause(&[x(i), x(ip), -x(c), -y(i), -y(ip), y(c)]);
            sink.add_clause(&[-x(i), -x(ip), x(c), y(i), y(ip), -y(c)]);
        }
        self.moves.push(moves);
    }

    /// Bounds the number of pebbles in frame `s`.
    pub fn add_cardinality<S: ClauseSink + ?Sized>(&self, sink: &mut S, s: usize) {
        at_most(sink, &self.frames[s][1..], self.max_pebbles);
    }

    /// Appends one more step: a frame, its transition and its cardinality
    /// bound.
    pub fn extend<S: ClauseSink + ?Sized>(&mut self, sink: &mut S) {
        if self.frames.is_empty() {
            self.add_frame(sink);
        }
        self.add_frame(sink);
        self.add_transition(sink);
        self.add_cardinality(sink, self.frames.len() - 1);
    }

    /// Reads the configurations `0..=steps` from a model.
    pub fn configurations(&self, steps: usize, value: impl Fn(i32) -> bool) -> Vec<Vec<bool>> {
        (0..=steps)
            .map(|s| {
                let mut config = vec![false];
                config.extend(self.frames[s][1..].iter().map(|&v| value(v)));
                config
            })
            .collect()
    }
}

/// A standalone encoding of the game with exactly `steps` transitions.
///
/// Variables are laid out as the pebble block, then the cardinality
/// auxiliaries, then the per-transition move variables.
#[derive(Debug, Clone)]
pub struct PebbleEncoding {
    pub formula: CnfFormula,
    /// Pebble variables are `1..=pebble_vars`, with `x_i^s` numbered
    /// `s * (n + r) + i`.
    pub pebble_vars: u32,
    pub cardinality_vars: u32,
    /// In-place move variables, after everything else.
    pub move_vars: u32,
}

impl PebbleEncoding {
    pub fn var(&self, nodes: usize, node: NodeId, step: usize) -> i32 {
        (step * nodes + node.index()) as i32
    }
}

/// Encodes the game with the final configuration as unit clauses.
pub fn encode(network: &XagNetwork, max_pebbles: usize, steps: usize, mode: FinalMode) -> Result<PebbleEncoding, PebbleError> {
    if steps < 1 {
        return Err(PebbleError::NoSteps);
    }
    let mut unroller = Unroller::new(network, max_pebbles, mode)?;
    let mut formula = CnfFormula::new();
    for _ in 0..=steps {
        unroller.add_frame(&mut formula);
    }
    let pebble_vars = formula.variable_count();
    for s in 1..=steps {
        unroller.add_cardinality(&mut formula, s);
    }
    let cardinality_vars = formula.variable_count() - pebble_vars;
    for _ in 0..steps {
        unroller.add_transition(&mut formula);
    }
    for lit in unroller.final_literals(steps) {
        formula.add_clause(&[lit]);
    }
    unroller.visit_clauses(&mut formula, steps, false);
    let move_vars = formula.variable_count() - pebble_vars - cardinality_vars;
    Ok(PebbleEncoding { formula, pebble_vars, cardinality_vars, move_vars })
}
