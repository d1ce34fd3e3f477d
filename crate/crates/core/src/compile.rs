//! The heuristic oracle compiler.
//!
//! Every AND step is computed out of place onto a fresh ancilla. Its two
//! fan-ins are never materialized: each is staged in place as the parity of
//! its linear transitive fan-in on one member qubit, used as a control, and
//! unstaged. Outputs are copied between the compute and uncompute halves, so
//! the T-count is exactly four times the AND count.

use thiserror::Error;

use crate::qir::{adjoint, Circuit, CircuitError, CostReport, Gate, QubitId};
use crate::xag::{ltfi_all, GateKind, LtfiSet, NodeId, XagNetwork};

/// Which member to pick when the algorithm allows several.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum TieBreak {
    #[default]
    Lowest,
    Highest,
}

impl TieBreak {
    fn pick(self, set: &LtfiSet) -> Option<NodeId> {
        match self {
            TieBreak::Lowest => set.members().first().copied(),
            TieBreak::Highest => set.members().last().copied(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CompileOptions {
    /// When one fan-in's parity set strictly contains the other, stage the
    /// smaller one first and reuse it for the larger one.
    pub use_inclusion_optimization: bool,
    pub tie_break: TieBreak,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { use_inclusion_optimization: true, tie_break: TieBreak::Lowest }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompileError {
    #[error("network is not normalized (constant fan-ins or XOR complements present)")]
    NotNormalized,
    #[error("AND step {node}: both fan-ins have the same parity set, the gate is redundant")]
    RedundantAnd { node: NodeId },
    #[error("AND step {node}: fan-in {child} is a constant function")]
    ConstantFanIn { node: NodeId, child: NodeId },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Map from inputs and AND steps to the qubits holding their values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QubitBinding {
    slots: Vec<Option<QubitId>>,
}

impl QubitBinding {
    /// Inputs `x_1..x_n` bound to `i0..i(n-1)`.
    pub fn for_inputs(network: &XagNetwork) -> Self {
        let mut slots = vec![None; network.num_nodes() + 1];
        for id in network.input_ids() {
            slots[id.index()] = Some(QubitId::input(id.raw() - 1));
        }
        QubitBinding { slots }
    }

    pub fn bind(&mut self, node: NodeId, qubit: QubitId) {
        if self.slots.len() <= node.index() {
            self.slots.resize(node.index() + 1, None);
        }
        self.slots[node.index()] = Some(qubit);
    }

    pub fn get(&self, node: NodeId) -> Option<QubitId> {
        self.slots.get(node.index()).copied().flatten()
    }

    fn qubit(&self, node: NodeId) -> QubitId {
        self.get(node).unwrap_or_else(|| panic!("node {node} is not bound to a qubit"))
    }
}

/// Gates emitted for one AND step, with the choices that produced them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AndEmission {
    pub t1: NodeId,
    pub t2: NodeId,
    /// The fan-ins were exchanged because the first was included in the
    /// second.
    pub swapped: bool,
    /// The inclusion optimization was applied.
    pub inclusion: bool,
    /// Number of gates before the `AndCompute`.
    pub staging_len: usize,
    pub gates: Vec<Gate>,
}

/// Emits compute gates for an AND whose fan-ins have parity sets `l1`, `l2`
/// and complement bits `p`, `q`. The sets must be distinct and non-empty.
pub fn emit_and_step(
    l1: &LtfiSet,
    l2: &LtfiSet,
    p: bool,
    q: bool,
    binding: &QubitBinding,
    target: QubitId,
    options: &CompileOptions,
) -> AndEmission {
    assert!(l1 != l2 && !l1.is_empty() && !l2.is_empty(), "fan-in parity sets must be distinct and non-empty");
    let swapped = l1.is_subset(l2);
    let (l1, l2, p, q) = if swapped { (l2, l1, q, p) } else { (l1, l2, p, q) };
    let only1 = l1.difference(l2);
    let only2 = l2.difference(l1);
    let tb = options.tie_break;
    let t1 = tb.pick(&only1).expect("l1 is not a subset of l2");
    let inclusion = options.use_inclusion_optimization && only2.is_empty();
    let t2 = if only2.is_empty() { tb.pick(l2) } else { tb.pick(&only2) }.expect("l2 is non-empty");
    let (q1, q2) = (binding.qubit(t1), binding.qubit(t2));
    let fold = |into: NodeId, from: &mut dyn Iterator<Item = &NodeId>, staging: &mut Vec<Gate>| {
        let target = binding.qubit(into);
        for &m in from {
            if m != into {
                staging.push(Gate::Cnot { control: binding.qubit(m), target });
            }
        }
    };

    let mut staging = Vec::new();
    if inclusion {
        fold(t2, &mut l2.members().iter(), &mut staging);
        fold(t1, &mut only1.members().iter(), &mut staging);
        staging.push(Gate::Cnot { control: q2, target: q1 });
    } else {
        fold(t1, &mut l1.members().iter(), &mut staging);
        fold(t2, &mut l2.members().iter(), &mut staging);
    }

    let mut nots = Vec::new();
    if p {
        nots.push(Gate::Not(q1));
    }
    if q {
        nots.push(Gate::Not(q2));
    }
    let mut gates = staging.clone();
    gates.extend_from_slice(&nots);
    let staging_len = gates.len();
    gates.push(Gate::AndCompute { a: q1, b: q2, target });
    gates.extend(nots.iter().rev());
    gates.extend(staging.iter().rev());
    AndEmission { t1, t2, swapped, inclusion, staging_len, gates }
}

/// Compiles a normalized network into `compute; copy; compute^-1`.
pub fn compile(network: &XagNetwork, options: CompileOptions) -> Result<(Circuit, CostReport), CompileError> {
    if !network.is_normalized() {
        return Err(CompileError::NotNormalized);
    }
    let sets = ltfi_all(network);
    let mut binding = QubitBinding::for_inputs(network);
    let mut compute = Vec::new();
    let mut ancillae = 0u32;
    for (id, step) in network.step_ids() {
        if step.kind != GateKind::And {
            continue;
        }
        let (l1, l2) = (&sets[step.left.index()], &sets[step.right.index()]);
        for (child, set) in [(step.left, l1), (step.right, l2)] {
            if set.is_empty() {
                return Err(CompileError::ConstantFanIn { node: id, child });
            }
        }
        if l1 == l2 {
            return Err(CompileError::RedundantAnd { node: id });
        }
        let target = QubitId::ancilla(ancillae);
        ancillae += 1;
        let emission = emit_and_step(l1, l2, step.left_pol, step.right_pol, &binding, target, &options);
        compute.extend(emission.gates);
        binding.bind(id, target);
    }

    let mut gates = compute.clone();
    gates.extend(copy_outputs(network, &sets, &binding));
    gates.extend(adjoint(&compute)?);
    let circuit = Circuit::new(network.num_inputs() as u32, network.num_outputs() as u32, ancillae, gates)?;
    let cost = circuit.cost();
    Ok((circuit, cost))
}

/// CNOT-folds the parity set of every output root into its output qubit.
pub(crate) fn copy_outputs(network: &XagNetwork, sets: &[LtfiSet], binding: &QubitBinding) -> Vec<Gate> {
    let mut gates = Vec::new();
    for (o, out) in network.outputs().iter().enumerate() {
        let target = QubitId::output(o as u32);
        for &m in sets[out.root.index()].members() {
            gates.push(Gate::Cnot { control: binding.qubit(m), target });
        }
        if out.complemented {
            gates.push(Gate::Not(target));
        }
    }
    gates
}
