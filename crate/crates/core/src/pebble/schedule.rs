use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use super::FinalMode;
use crate::xag::{GateKind, NodeId, XagNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Place,
    Remove,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Place => "PLACE",
            Direction::Remove => "REMOVE",
        })
    }
}

/// One move. XOR moves are in place: placing consumes the pebble of one
/// child, removing restores it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub node: NodeId,
    pub direction: Direction,
    pub consumed: Option<NodeId>,
}

/// Configurations `0..=S` (indexed by node, index 0 unused) and the moves of
/// every transition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PebbleSchedule {
    pub configs: Vec<Vec<bool>>,
    pub moves: Vec<Vec<Move>>,
    pub mode: FinalMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    InitialConfiguration,
    FinalConfiguration,
    OutputNeverPebbled,
    TooManyPebbles,
    AndChildrenNotPebbled,
    XorPlacement,
    XorRemoval,
    /// Two moves touch the same node in one step (e.g. two XOR gates
    /// consuming a shared child).
    SharedNode,
    UnexplainedFlip,
    WrongDirection,
    Shape,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {step}: {rule:?} at {node}")]
pub struct Violation {
    /// Index of the configuration (for configuration rules) or of the
    /// transition `step -> step + 1` (for move rules).
    pub step: usize,
    pub rule: Rule,
    pub node: NodeId,
}

impl PebbleSchedule {
    pub fn steps(&self) -> usize {
        self.moves.len()
    }

    pub fn pebble_count(&self, step: usize) -> usize {
        self.configs[step].iter().filter(|&&b| b).count()
    }

    pub fn max_pebbles(&self) -> usize {
        (0..self.configs.len()).map(|s| self.pebble_count(s)).max().unwrap_or(0)
    }

    /// Moves of all transitions placing an AND node.
    pub fn and_placements(&self, network: &XagNetwork) -> usize {
        self.moves
            .iter()
            .flatten()
            .filter(|m| m.direction == Direction::Place && network.is_and(m.node))
            .count()
    }

    /// Builds a schedule from configurations, deriving the moves.
    pub fn from_configs(network: &XagNetwork, configs: Vec<Vec<bool>>, mode: FinalMode) -> Self {
        let moves = configs.windows(2).map(|w| derive_moves(network, &w[0], &w[1])).collect();
        PebbleSchedule { configs, moves, mode }
    }

    /// Turns a walk ending with the outputs pebbled into a round trip by
    /// appending its mirror image.
    pub fn into_round_trip(self) -> PebbleSchedule {
        if self.mode == FinalMode::RoundTrip {
            return self;
        }
        let mut configs = self.configs.clone();
        configs.extend(self.configs.iter().rev().skip(1).cloned());
        let mut moves = self.moves.clone();
        for step in self.moves.iter().rev() {
            moves.push(
                step.iter()
                    .map(|m| Move {
                        direction: match m.direction {
                            Direction::Place => Direction::Remove,
                            Direction::Remove => Direction::Place,
                        },
                        ..*m
                    })
                    .collect(),
            );
        }
        PebbleSchedule { configs, moves, mode: FinalMode::RoundTrip }
    }

    /// Drops AND place/remove pairs whose pebble is never used in between,
    /// then drops empty steps. The result is valid whenever `self` is.
    pub fn prune(&self, network: &XagNetwork) -> PebbleSchedule {
        let mut current = self.clone();
        loop {
            let Some((from, to, node)) = current.find_idle_and(network) else { break };
            for s in from + 1..=to {
                current.configs[s][node.index()] = false;
            }
            current.moves[from].retain(|m| m.node != node);
            current.moves[to].retain(|m| m.node != node);
        }
        current.drop_idle_steps();
        current
    }

    fn find_idle_and(&self, network: &XagNetwork) -> Option<(usize, usize, NodeId)> {
        let outputs: Vec<NodeId> = network.outputs().iter().map(|o| o.root).collect();
        for (from, step) in self.moves.iter().enumerate() {
            for m in step {
                if m.direction != Direction::Place || !network.is_and(m.node) {
                    continue;
                }
                let node = m.node;
                let Some(to) = (from + 1..self.moves.len())
                    .find(|&t| self.moves[t].iter().any(|r| r.node == node && r.direction == Direction::Remove))
                else {
                    continue;
                };
                let used = (from + 1..to).any(|t| self.moves[t].iter().any(|r| reads(network, r, node)))
                    || self.moves[from].iter().any(|r| r.node != node && reads(network, r, node))
                    || self.moves[to].iter().any(|r| r.node != node && reads(network, r, node))
                    || (self.mode == FinalMode::RoundTrip
                        && outputs.contains(&node)
                        && !(0..=from).chain(to + 1..self.configs.len()).any(|s| self.configs[s][node.index()]));
                if !used {
                    return Some((from, to, node));
                }
            }
        }
        None
    }

    fn drop_idle_steps(&mut self) {
        let mut configs = vec![self.configs[0].clone()];
        let mut moves = Vec::new();
        for (s, step) in self.moves.iter().enumerate() {
            if !step.is_empty() {
                configs.push(self.configs[s + 1].clone());
                moves.push(step.clone());
            }
        }
        if moves.is_empty() && !self.moves.is_empty() {
            configs.push(self.configs[0].clone());
            moves.push(Vec::new());
        }
        self.configs = configs;
        self.moves = moves;
    }

    /// One CSV row per move: `step,node,direction,consumed_child`, where
    /// `step` is the configuration the move leads to.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,node,direction,consumed_child\n");
        for (s, step) in self.moves.iter().enumerate() {
            for m in step {
                let consumed = m.consumed.map(|c| c.raw().to_string()).unwrap_or_default();
                writeln!(out, "{},{},{},{}", s + 1, m.node.raw(), m.direction, consumed).unwrap();
            }
        }
        out
    }
}

/// True when move `m` needs the pebble of `node` without changing it.
fn reads(network: &XagNetwork, m: &Move, node: NodeId) -> bool {
    match network.step(m.node) {
        Some(step) => step.children().contains(&node) || m.consumed == Some(node),
        None => false,
    }
}

/// Explains the flips between two configurations as moves. XOR nodes are
/// resolved from the highest index down so that a node consumed by an
/// in-place parent is not reported as a move of its own.
pub fn derive_moves(network: &XagNetwork, before: &[bool], after: &[bool]) -> Vec<Move> {
    let nodes = network.num_nodes();
    let flips = |i: usize| before[i] != after[i];
    let mut explained = vec![false; nodes + 1];
    let mut moves = Vec::new();
    for i in (network.num_inputs() + 1..=nodes).rev() {
        if !flips(i) || explained[i] {
            continue;
        }
        let node = NodeId::new(i as u32);
        let step = network.step(node).expect("non-input node is a step");
        let direction = if after[i] { Direction::Place } else { Direction::Remove };
        let consumed = match step.kind {
            GateKind::And => None,
            GateKind::Xor => {
                let c = step.children().into_iter().find(|c| flips(c.index()) && !explained[c.index()]);
                if let Some(c) = c {
                    explained[c.index()] = true;
                }
                c
            }
        };
        explained[i] = true;
        moves.push(Move { node, direction, consumed });
    }
    moves.reverse();
    moves
}

/// Checks a schedule against the game rules, independently of how it was
/// produced.
pub fn validate(schedule: &PebbleSchedule, network: &XagNetwork, max_pebbles: usize) -> Result<(), Violation> {
    let nodes = network.num_nodes();
    let n = network.num_inputs();
    let none = NodeId::CONSTANT;
    let shape = |step| Violation { step, rule: Rule::Shape, node: none };
    if schedule.configs.len() != schedule.moves.len() + 1 {
        return Err(shape(0));
    }
    for (s, c) in schedule.configs.iter().enumerate() {
        if c.len() != nodes + 1 {
            return Err(shape(s));
        }
    }
    let is_input = |i: usize| (1..=n).contains(&i);
    for i in 1..=nodes {
        if schedule.configs[0][i] != is_input(i) {
            return Err(Violation { step: 0, rule: Rule::InitialConfiguration, node: NodeId::new(i as u32) });
        }
    }
    for (s, step_moves) in schedule.moves.iter().enumerate() {
        let (before, after) = (&schedule.configs[s], &schedule.configs[s + 1]);
        if before.iter().filter(|&&b| b).count() > max_pebbles {
            return Err(Violation { step: s, rule: Rule::TooManyPebbles, node: none });
        }
        let mut touched = vec![false; nodes + 1];
        let mut touch = |node: NodeId| -> Result<(), Violation> {
            if std::mem::replace(&mut touched[node.index()], true) {
                return Err(Violation { step: s, rule: Rule::SharedNode, node });
            }
            Ok(())
        };
        for m in step_moves {
            let v = m.node;
            let Some(step) = network.step(v) else {
                return Err(Violation { step: s, rule: Rule::UnexplainedFlip, node: v });
            };
            let expected = (m.direction == Direction::Remove, m.direction == Direction::Place);
            if (before[v.index()], after[v.index()]) != expected {
                return Err(Violation { step: s, rule: Rule::WrongDirection, node: v });
            }
            touch(v)?;
            let stable = |c: NodeId| before[c.index()] && after[c.index()];
            match step.kind {
                GateKind::And => {
                    if m.consumed.is_some() || !step.children().into_iter().all(stable) {
                        return Err(Violation { step: s, rule: Rule::AndChildrenNotPebbled, node: v });
                    }
                }
                GateKind::Xor => {
                    let rule = match m.direction {
                        Direction::Place => Rule::XorPlacement,
                        Direction::Remove => Rule::XorRemoval,
                    };
                    let bad = Violation { step: s, rule, node: v };
                    let c = m.consumed.ok_or(bad.clone())?;
                    let [j, k] = step.children();
                    let other = if c == j {
                        k
                    } else if c == k {
                        j
                    } else {
                        return Err(bad);
                    };
                    let consumed_ok = match m.direction {
                        Direction::Place => before[c.index()] && !after[c.index()],
                        Direction::Remove => !before[c.index()] && after[c.index()],
                    };
                    if !consumed_ok || !stable(other) {
                        return Err(bad);
                    }
                    touch(c)?;
                }
            }
        }
        for i in 1..=nodes {
            if before[i] != after[i] && !touched[i] {
                return Err(Violation { step: s, rule: Rule::UnexplainedFlip, node: NodeId::new(i as u32) });
            }
        }
    }
    let last = schedule.configs.len() - 1;
    if schedule.configs[last].iter().filter(|&&b| b).count() > max_pebbles {
        return Err(Violation { step: last, rule: Rule::TooManyPebbles, node: none });
    }
    let roots: Vec<NodeId> = network.outputs().iter().map(|o| o.root).filter(|r| r.index() > n).collect();
    for i in 1..=nodes {
        let want = match schedule.mode {
            FinalMode::RoundTrip => is_input(i),
            FinalMode::OutputsPebbled => is_input(i) || roots.contains(&NodeId::new(i as u32)),
        };
        if schedule.configs[last][i] != want {
            return Err(Violation { step: last, rule: Rule::FinalConfiguration, node: NodeId::new(i as u32) });
        }
    }
    if schedule.mode == FinalMode::RoundTrip {
        for &r in &roots {
            if !schedule.configs.iter().any(|c| c[r.index()]) {
                return Err(Violation { step: last, rule: Rule::OutputNeverPebbled, node: r });
            }
        }
    }

    Ok(())
}
