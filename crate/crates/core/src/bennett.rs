//! Baseline compiler: one ancilla per step, Bennett clean-up.

use crate::compile::CompileError;
use crate::qir::{adjoint, Circuit, CostReport, Gate, QubitId};
use crate::xag::{GateKind, NodeId, XagNetwork};

/// Computes every step onto its own ancilla, copies the outputs and
/// uncomputes in reverse order. Qubits: `n + m + r`.
pub fn compile_bennett(network: &XagNetwork) -> Result<(Circuit, CostReport), CompileError> {
    if !network.is_normalized() {
        return Err(CompileError::NotNormalized);
    }
    let n = network.num_inputs() as u32;
    let qubit = |node: NodeId| -> QubitId {
        assert!(node != NodeId::CONSTANT, "normalized steps never read the constant node");
        if node.raw() <= n {
            QubitId::input(node.raw() - 1)
        } else {
            QubitId::ancilla(node.raw() - n - 1)
        }
    };

    let mut compute = Vec::new();
    for (id, step) in network.step_ids() {
        let (a, b, target) = (qubit(step.left), qubit(step.right), qubit(id));
        match step.kind {
            GateKind::And => {
                let nots: Vec<Gate> = [(step.left_pol, a), (step.right_pol, b)]
                    .into_iter()
                    .filter(|(p, _)| *p)
                    .map(|(_, q)| Gate::Not(q))
                    .collect();
                compute.extend(&nots);
                compute.push(Gate::AndCompute { a, b, target });
                compute.extend(nots.iter().rev());
            }
            GateKind::Xor => {
                compute.push(Gate::Cnot { control: a, target });
                compute.push(Gate::Cnot { control: b, target });
            }
        }
    }

    let mut gates = compute.clone();
    for (o, out) in network.outputs().iter().enumerate() {
        let target = QubitId::output(o as u32);
        if out.root != NodeId::CONSTANT {
            gates.push(Gate::Cnot { control: qubit(out.root), target });
        }
        if out.complemented {
            gates.push(Gate::Not(target));
        }
    }
    gates.extend(adjoint(&compute)?);
    let circuit = Circuit::new(n, network.num_outputs() as u32, network.num_steps() as u32, gates)?;
    let cost = circuit.cost();
    Ok((circuit, cost))
}
