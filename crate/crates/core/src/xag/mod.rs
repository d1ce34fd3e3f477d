//! XOR-AND graphs: Boolean chains over `{AND, XOR}` with complemented AND
//! fan-ins and complementable outputs.
//!
//! Node `0` is the constant-0 pseudo-node, nodes `1..=n` are primary inputs
//! and nodes `n+1..=n+r` are steps in topological order.

mod bristol;
mod ltfi;
mod native;
pub mod random;

use std::fmt;

use thiserror::Error;

pub use bristol::parse_bristol;
pub use ltfi::{ltfi, ltfi_all, LtfiSet};
pub use native::{parse_native, serialize_native};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub const CONSTANT: NodeId = NodeId(0);

    pub fn new(index: u32) -> Self {
        NodeId(index)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn raw(self) -> u32 {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    And,
    Xor,
}

/// One step of the chain. Polarity bits are `true` when the fan-in is
/// complemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Step {
    pub kind: GateKind,
    pub left: NodeId,
    pub right: NodeId,
    pub left_pol: bool,
    pub right_pol: bool,
}

impl Step {
    pub fn and(left: NodeId, right: NodeId, left_pol: bool, right_pol: bool) -> Self {
        Step { kind: GateKind::And, left, right, left_pol, right_pol }
    }

    pub fn xor(left: NodeId, right: NodeId) -> Self {
        Step { kind: GateKind::Xor, left, right, left_pol: false, right_pol: false }
    }

    pub fn children(&self) -> [NodeId; 2] {
        [self.left, self.right]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Output {
    pub root: NodeId,
    pub complemented: bool,
}

/// A node reference with an optional complement, used while building
/// networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signal {
    pub node: NodeId,
    pub complemented: bool,
}

impl Signal {
    pub const FALSE: Signal = Signal { node: NodeId::CONSTANT, complemented: false };
    pub const TRUE: Signal = Signal { node: NodeId::CONSTANT, complemented: true };

    pub fn new(node: NodeId, complemented: bool) -> Self {
        Signal { node, complemented }
    }

    pub fn is_constant(self) -> bool {
        self.node == NodeId::CONSTANT
    }
}

impl std::ops::Not for Signal {
    type Output = Signal;

    fn not(self) -> Signal {
        Signal { node: self.node, complemented: !self.complemented }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum XagError {
    #[error("step {node}: fan-in {child} is not defined before it")]
    DanglingReference { node: NodeId, child: NodeId },
    #[error("step {node}: fan-ins must satisfy left < right (got {left}, {right})")]
    OrderViolation { node: NodeId, left: NodeId, right: NodeId },
    #[error("output {index} refers to undefined node {root}")]
    DanglingOutput { index: usize, root: NodeId },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {kind}")]
    Located { line: usize, kind: Box<XagError> },
    #[error("line {line}: unsupported gate `{tag}`")]
    UnsupportedGate { line: usize, tag: String },
    #[error("line {line}: wire {wire} used before definition")]
    UndefinedWire { line: usize, wire: usize },
    #[error("line {line}: {message}")]
    ArityMismatch { line: usize, message: String },
}

impl XagError {
    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        XagError::Syntax { line, message: message.into() }
    }
}

/// A validated XOR-AND graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct XagNetwork {
    inputs: u32,
    steps: Vec<Step>,
    outputs: Vec<Output>,
}

impl XagNetwork {
    pub fn new(inputs: u32, steps: Vec<Step>, outputs: Vec<Output>) -> Result<Self, XagError> {
        for (offset, step) in steps.iter().enumerate() {
            let own = NodeId(inputs + 1 + offset as u32);
            for child in step.children() {
                if child >= own {
                    return Err(XagError::DanglingReference { node: own, child });
                }
            }
            if step.left >= step.right {
                return Err(XagError::OrderViolation { node: own, left: step.left, right: step.right });
            }
        }
        let last = inputs as usize + steps.len();
        for (index, out) in outputs.iter().enumerate() {
            if out.root.index() > last {
                return Err(XagError::DanglingOutput { index, root: out.root });
            }
        }
        Ok(XagNetwork { inputs, steps, outputs })
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs as usize
    }

    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Inputs plus steps, i.e. every node except the constant.
    pub fn num_nodes(&self) -> usize {
        self.num_inputs() + self.num_steps()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn outputs(&self) -> &[Output] {
        &self.outputs
    }

    pub fn is_input(&self, node: NodeId) -> bool {
        node.0 >= 1 && node.0 <= self.inputs
    }

    pub fn step(&self, node: NodeId) -> Option<&Step> {
        if node.0 <= self.inputs {
            return None;
        }
        self.steps.get((node.0 - self.inputs - 1) as usize)
    }

    pub fn is_and(&self, node: NodeId) -> bool {
        matches!(self.step(node), Some(s) if s.kind == GateKind::And)
    }

    pub fn is_xor(&self, node: NodeId) -> bool {
        matches!(self.step(node), Some(s) if s.kind == GateKind::Xor)
    }

    pub fn input_ids(&self) -> impl Iterator<Item = NodeId> {
        (1..=self.inputs).map(NodeId)
    }

    /// Step nodes paired with their definitions, in index order.
    pub fn step_ids(&self) -> impl Iterator<Item = (NodeId, &Step)> + '_ {
        let base = self.inputs + 1;
        self.steps.iter().enumerate().map(move |(i, s)| (NodeId(base + i as u32), s))
    }

    pub fn and_count(&self) -> usize {
        self.steps.iter().filter(|s| s.kind == GateKind::And).count()
    }

    pub fn xor_count(&self) -> usize {
        self.steps.len() - self.and_count()
    }

    /// `live[i]` is true when node `i` is in the transitive fan-in of some
    /// output.
    pub fn live_nodes(&self) -> Vec<bool> {
        let mut live = vec![false; self.num_nodes() + 1];
        for o in &self.outputs {
            live[o.root.index()] = true;
        }
        for (id, step) in self.step_ids().collect::<Vec<_>>().into_iter().rev() {
            if live[id.index()] {
                for c in step.children() {
                    live[c.index()] = true;
                }
            }
        }
        live
    }

    /// The same function with every step outside the fan-in of the outputs
    /// dropped and the rest renumbered.
    pub fn without_dead_nodes(&self) -> XagNetwork {
        let live = self.live_nodes();
        let mut map: Vec<NodeId> = (0..=self.inputs).map(NodeId).collect();
        let mut steps = Vec::new();
        for (id, step) in self.step_ids() {
            let new = NodeId(self.inputs + steps.len() as u32 + 1);
            map.push(new);
            if live[id.index()] {
                let mut s = *step;
                s.left = map[s.left.index()];
                s.right = map[s.right.index()];
                steps.push(s);
            }
        }
        let outputs = self.outputs.iter().map(|o| Output { root: map[o.root.index()], complemented: o.complemented }).collect();
        XagNetwork::new(self.inputs, steps, outputs).expect("renumbering keeps the topological order")
    }

    /// True when no step references the constant node and XOR steps carry no
    /// complement marks.
    pub fn is_normalized(&self) -> bool {
        self.steps.iter().all(|s| {
            s.left != NodeId::CONSTANT && (s.kind == GateKind::And || (!s.left_pol && !s.right_pol))
        })
    }

    /// Evaluates the network on one assignment (`assignment[i]` is the value
    /// of input `x_{i+1}`).
    pub fn evaluate(&self, assignment: &[bool]) -> Vec<bool> {
        assert_eq!(assignment.len(), self.num_inputs(), "assignment length must equal the input count");
        let words: Vec<u64> = assignment.iter().map(|&b| if b { 1 } else { 0 }).collect();
        self.evaluate_words(&words).into_iter().map(|w| w & 1 == 1).collect()
    }

    /// Bit-parallel evaluation: each bit lane of the input words is an
    /// independent assignment.
    pub fn evaluate_words(&self, inputs: &[u64]) -> Vec<u64> {
        let values = self.node_values_words(inputs);
        self.outputs
            .iter()
            .map(|o| values[o.root.index()] ^ mask(o.complemented))
            .collect()
    }

    /// Values of all nodes (index 0 is the constant) for 64 assignments at
    /// once.
    pub fn node_values_words(&self, inputs: &[u64]) -> Vec<u64> {
        assert_eq!(inputs.len(), self.num_inputs(), "input word count must equal the input count");
        let mut values = Vec::with_capacity(self.num_nodes() + 1);
        values.push(0u64);
        values.extend_from_slice(inputs);
        for step in &self.steps {
            let a = values[step.left.index()] ^ mask(step.left_pol);
            let b = values[step.right.index()] ^ mask(step.right_pol);
            values.push(match step.kind {
                GateKind::And => a & b,
                GateKind::Xor => a ^ b,
            });
        }
        values
    }

    /// Pushes constants and XOR complements towards the outputs.
    ///
    /// The result uses only `{AND, XOR}` with AND fan-in polarities and output
    /// complement bits, computes the same function and never has more AND
    /// steps than `self`.
    pub fn normalize(&self) -> XagNetwork {
        let mut builder = XagBuilder::new(self.inputs);
        let mut map: Vec<Signal> = Vec::with_capacity(self.num_nodes() + 1);
        map.push(Signal::FALSE);
        map.extend((1..=self.inputs).map(|i| Signal::new(NodeId(i), false)));
        for step in &self.steps {
            let a = map[step.left.index()];
            let a = if step.left_pol { !a } else { a };
            let b = map[step.right.index()];
            let b = if step.right_pol { !b } else { b };
            map.push(match step.kind {
                GateKind::And => builder.and(a, b),
                GateKind::Xor => builder.xor(a, b),
            });
        }
        for out in &self.outputs {
            let s = map[out.root.index()];
            builder.add_output(if out.complemented { !s } else { s });
        }
        builder.build()
    }
}

pub(crate) fn mask(bit: bool) -> u64 {
    if bit {
        u64::MAX
    } else {
        0
    }
}

/// Incremental constructor for normalized networks. Constant fan-ins and
/// trivial repeats are folded away, XOR complements move to the consumer.
#[derive(Debug, Clone)]
pub struct XagBuilder {
    inputs: u32,
    steps: Vec<Step>,
    outputs: Vec<Output>,
}

impl XagBuilder {
    pub fn new(inputs: u32) -> Self {
        XagBuilder { inputs, steps: Vec::new(), outputs: Vec::new() }
    }

    /// Input `x_{index}`, 1-based.
    pub fn input(&self, index: u32) -> Signal {
        assert!(index >= 1 && index <= self.inputs, "input index out of range");
        Signal::new(NodeId(index), false)
    }

    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    fn push(&mut self, step: Step) -> NodeId {
        self.steps.push(step);
        NodeId(self.inputs + self.steps.len() as u32)
    }

    pub fn and(&mut self, a: Signal, b: Signal) -> Signal {
        if a.is_constant() {
            return if a.complemented { b } else { Signal::FALSE };
        }
        if b.is_constant() {
            return if b.complemented { a } else { Signal::FALSE };
        }
        if a.node == b.node {
            return if a.complemented == b.complemented { a } else { Signal::FALSE };
        }
        let (lo, hi) = if a.node < b.node { (a, b) } else { (b, a) };
        let id = self.push(Step::and(lo.node, hi.node, lo.complemented, hi.complemented));
        Signal::new(id, false)
    }

    pub fn xor(&mut self, a: Signal, b: Signal) -> Signal {
        let complemented = a.complemented ^ b.complemented;
        if a.node == b.node {
            return Signal::new(NodeId::CONSTANT, complemented);
        }
        if a.is_constant() {
            return Signal::new(b.node, complemented);
        }
        if b.is_constant() {
            return Signal::new(a.node, complemented);
        }
        let (lo, hi) = if a.node < b.node { (a.node, b.node) } else { (b.node, a.node) };
        let id = self.push(Step::xor(lo, hi));
        Signal::new(id, complemented)
    }

    pub fn add_output(&mut self, signal: Signal) {
        self.outputs.push(Output { root: signal.node, complemented: signal.complemented });
    }

    pub fn build(self) -> XagNetwork {
        XagNetwork::new(self.inputs, self.steps, self.outputs).expect("builder maintains network invariants")
    }
}

#[cfg(test)]
pub(crate) fn majority() -> XagNetwork {
    XagNetwork::new(
        3,
        vec![
            Step::xor(NodeId(1), NodeId(2)),
            Step::xor(NodeId(2), NodeId(3)),
            Step::and(NodeId(4), NodeId(5), false, false),
            Step::xor(NodeId(2), NodeId(6)),
        ],
        vec![Output { root: NodeId(7), complemented: false }],
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(v: u32, n: usize) -> Vec<bool> {
        (0..n).map(|i| v >> i & 1 == 1).collect()
    }

    #[test]
    fn majority_evaluates_by_hand() {
        let maj = majority();
        assert_eq!(maj.evaluate(&[true, true, false]), vec![true]);
        assert_eq!(maj.evaluate(&[false, false, false]), vec![false]);
        assert_eq!(maj.evaluate(&[true, false, true]), vec![true]);
        for v in 0..8u32 {
            let x = bits(v, 3);
            let expected = x.iter().filter(|&&b| b).count() >= 2;
            assert_eq!(maj.evaluate(&x), vec![expected]);
        }
    }

    #[test]
    fn dead_steps_are_dropped() {
        let mut b = XagBuilder::new(3);
        let (x1, x2, x3) = (b.input(1), b.input(2), b.input(3));
        let dead = b.and(x1, x2);
        let g = b.xor(x2, x3);
        let h = b.and(g, Signal::new(x1.node, true));
        b.xor(dead, h);
        b.add_output(Signal::new(h.node, true));
        let net = b.build();
        assert_eq!(net.live_nodes(), vec![false, true, true, true, false, true, true, false]);
        let swept = net.without_dead_nodes();
        assert_eq!(swept.num_steps(), 2);
        for x in 0..8u32 {
            let bits: Vec<bool> = (0..3).map(|i| x >> i & 1 == 1).collect();
            assert_eq!(swept.evaluate(&bits), net.evaluate(&bits));
        }
    }

    #[test]
    fn and_counts() {
        assert_eq!(majority().and_count(), 1);
        let empty = XagNetwork::new(2, vec![], vec![Output { root: NodeId(1), complemented: false }]).unwrap();
        assert_eq!(empty.and_count(), 0);
        let mut b = XagBuilder::new(6);
        let mut acc = b.input(1);
        for i in 2..=6 {
            let x = b.input(i);
            acc = b.xor(acc, x);
        }
        b.add_output(acc);
        let linear = b.build();
        assert_eq!(linear.num_steps(), 5);
        assert_eq!(linear.and_count(), 0);
    }

    #[test]
    fn constructor_rejects_bad_references() {
        let err = XagNetwork::new(3, vec![Step::xor(NodeId(1), NodeId(5))], vec![]).unwrap_err();
        assert!(matches!(err, XagError::DanglingReference { .. }));
        let err = XagNetwork::new(3, vec![Step::xor(NodeId(2), NodeId(1))], vec![]).unwrap_err();
        assert!(matches!(err, XagError::OrderViolation { .. }));
        let err = XagNetwork::new(1, vec![], vec![Output { root: NodeId(2), complemented: false }]).unwrap_err();
        assert!(matches!(err, XagError::DanglingOutput { .. }));
    }

    #[test]
    fn normalize_folds_constant_one() {
        // x2 = 1 xor x1
        let net = XagNetwork::new(
            1,
            vec![Step { kind: GateKind::Xor, left: NodeId(0), right: NodeId(1), left_pol: true, right_pol: false }],
            vec![Output { root: NodeId(2), complemented: false }],
        )
        .unwrap();
        let norm = net.normalize();
        assert_eq!(norm.num_steps(), 0);
        assert_eq!(norm.outputs(), &[Output { root: NodeId(1), complemented: true }]);

        // x2 = 1 and x1
        let net = XagNetwork::new(
            1,
            vec![Step::and(NodeId(0), NodeId(1), true, false)],
            vec![Output { root: NodeId(2), complemented: false }],
        )
        .unwrap();
        let norm = net.normalize();
        assert_eq!(norm.num_steps(), 0);
        assert_eq!(norm.outputs(), &[Output { root: NodeId(1), complemented: false }]);
    }

    #[test]
    fn normalize_moves_xor_complements_into_and_polarity() {
        // x3 = x1 xor !x2 ; x4 = x3 and x1
        let net = XagNetwork::new(
            2,
            vec![
                Step { kind: GateKind::Xor, left: NodeId(1), right: NodeId(2), left_pol: false, right_pol: true },
                Step::and(NodeId(1), NodeId(3), false, false),
            ],
            vec![Output { root: NodeId(4), complemented: false }, Output { root: NodeId(3), complemented: false }],
        )
        .unwrap();
        assert!(!net.is_normalized());
        let norm = net.normalize();
        assert!(norm.is_normalized());
        assert_eq!(norm.steps()[1], Step::and(NodeId(1), NodeId(3), false, true));
        assert_eq!(norm.outputs()[1], Output { root: NodeId(3), complemented: true });
        for v in 0..4 {
            let x = bits(v, 2);
            assert_eq!(net.evaluate(&x), norm.evaluate(&x));
        }
    }

    #[test]
    fn constant_network_outputs() {
        let net = XagNetwork::new(0, vec![], vec![Output { root: NodeId::CONSTANT, complemented: true }]).unwrap();
        assert_eq!(net.evaluate(&[]), vec![true]);
    }
}
