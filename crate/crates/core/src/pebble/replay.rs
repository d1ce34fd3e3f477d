//! Turns a pebble schedule into a circuit. Each pebble is a qubit; XOR moves
//! are in-place CNOTs, AND moves compute or uncompute onto a pooled qubit.

use super::schedule::{Direction, Move, PebbleSchedule};
use super::FinalMode;
use crate::qir::{Circuit, CircuitError, CostReport, Gate, QubitId, Register};
use crate::xag::{GateKind, NodeId, XagNetwork};

/// Replays a valid schedule. A schedule that ends with the outputs pebbled is
/// first mirrored into a round trip.
///
/// Within a step, moves are emitted as AND removals, then XOR moves, then AND
/// placements, so the number of occupied qubits never exceeds the pebble
/// count of the surrounding configurations. Input values may end up in other
/// qubits than they started in; a final permutation moves them back.
pub fn replay(schedule: &PebbleSchedule, network: &XagNetwork) -> Result<(Circuit, CostReport), CircuitError> {
    let schedule = if schedule.mode == FinalMode::RoundTrip { schedule.clone() } else { schedule.clone().into_round_trip() };
    let n = network.num_inputs();
    let mut state = Pool::new(network);
    let mut gates = Vec::new();
    let mut copied = vec![false; network.num_outputs()];

    for s in 0..=schedule.steps() {
        for (o, out) in network.outputs().iter().enumerate() {
            if copied[o] {
                continue;
            }
            let target = QubitId::output(o as u32);
            if out.root == NodeId::CONSTANT {
                copied[o] = true;
            } else if let Some(q) = state.location[out.root.index()] {
                gates.push(Gate::Cnot { control: q, target });
                copied[o] = true;
            } else {
                continue;
            }
            if out.complemented {
                gates.push(Gate::Not(target));
            }
        }
        if s == schedule.steps() {
            break;
        }
        let moves = &schedule.moves[s];
        let is_and = |m: &&Move| network.is_and(m.node);
        let removals = moves.iter().filter(|m| is_and(m) && m.direction == Direction::Remove);
        let xors = moves.iter().filter(|m| !network.is_and(m.node));
        let places = moves.iter().filter(|m| is_and(m) && m.direction == Direction::Place);
        for m in removals.chain(xors).chain(places) {
            state.apply(network, m, &mut gates);
        }
    }
    assert!(copied.iter().all(|&c| c), "every output root is pebbled at some step");

    // move input values back to their own qubits
    for i in 1..=n {
        let home = QubitId::input(i as u32 - 1);
        let at = state.location[i].expect("inputs are pebbled at the end");
        if at == home {
            continue;
        }
        match state.holder(home) {
            Some(other) => {
                gates.push(Gate::Cnot { control: at, target: home });
                gates.push(Gate::Cnot { control: home, target: at });
                gates.push(Gate::Cnot { control: at, target: home });
                state.location[other.index()] = Some(at);
            }
            None => {
                gates.push(Gate::Cnot { control: at, target: home });
                gates.push(Gate::Cnot { control: home, target: at });
                state.release(at);
                state.free.retain(|&q| q != home);
            }
        }
        state.location[i] = Some(home);
    }

    let circuit = Circuit::new(n as u32, network.num_outputs() as u32, state.ancillae, gates)?;
    let cost = circuit.cost();
    Ok((circuit, cost))
}

struct Pool {
    /// Qubit currently holding each node's value.
    location: Vec<Option<QubitId>>,
    /// Zero qubits available for AND targets; inputs first.
    free: Vec<QubitId>,
    ancillae: u32,
}

impl Pool {
    fn new(network: &XagNetwork) -> Self {
        let mut location = vec![None; network.num_nodes() + 1];
        for i in network.input_ids() {
            location[i.index()] = Some(QubitId::input(i.raw() - 1));
        }
        Pool { location, free: Vec::new(), ancillae: 0 }
    }

    fn holder(&self, q: QubitId) -> Option<NodeId> {
        self.location.iter().position(|&l| l == Some(q)).map(|i| NodeId::new(i as u32))
    }

    fn acquire(&mut self) -> QubitId {
        if self.free.is_empty() {
            self.free.push(QubitId::ancilla(self.ancillae));
            self.ancillae += 1;
        }
        self.free.sort_by_key(|q| (q.register != Register::Input, q.offset));
        self.free.remove(0)
    }

    fn release(&mut self, q: QubitId) {
        self.free.push(q);
    }

    fn at(&self, node: NodeId) -> QubitId {
        self.location[node.index()].unwrap_or_else(|| panic!("{node} is not pebbled"))
    }

    fn apply(&mut self, network: &XagNetwork, m: &Move, gates: &mut Vec<Gate>) {
        let step = network.step(m.node).expect("moves act on steps");
        match step.kind {
            GateKind::And => {
                let (a, b) = (self.at(step.left), self.at(step.right));
                let nots: Vec<Gate> = [(step.left_pol, a), (step.right_pol, b)]
                    .into_iter()
                    .filter(|(p, _)| *p)
                    .map(|(_, q)| Gate::Not(q))
                    .collect();
                gates.extend(&nots);
                match m.direction {
                    Direction::Place => {
                        let target = self.acquire();
                        gates.push(Gate::AndCompute { a, b, target });
                        self.location[m.node.index()] = Some(target);
                    }
                    Direction::Remove => {
                        let target = self.at(m.node);
                        gates.push(Gate::AndUncompute { a, b, target });
                        self.location[m.node.index()] = None;
                        self.release(target);
                    }
                }
                gates.extend(nots.iter().rev());
            }
            GateKind::Xor => {
                let c = m.consumed.expect("XOR moves name their consumed child");
                let other = if c == step.left { step.right } else { step.left };
                let control = self.at(other);
                match m.direction {
                    Direction::Place => {
                        let q = self.at(c);
                        gates.push(Gate::Cnot { control, target: q });
                        self.location[c.index()] = None;
                        self.location[m.node.index()] = Some(q);
                    }
                    Direction::Remove => {
                        let q = self.at(m.node);
                        gates.push(Gate::Cnot { control, target: q });
                        self.location[m.node.index()] = None;
                        self.location[c.index()] = Some(q);
                    }
                }
            }
        }
    }
}
