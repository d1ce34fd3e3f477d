//! Classical simulation of circuits and oracle-equivalence checking.
//!
//! The engine is bit-parallel: every qubit is a `u64` whose 64 lanes are
//! independent basis states.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::qir::{Circuit, Gate, QubitId, Register};
use crate::xag::XagNetwork;

pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_SEED: u64 = 0x0dd5_eed5;
/// Largest `n + m` for which exhaustive checking is permitted.
pub const EXHAUSTIVE_LIMIT: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("gate {index} ({gate}): AND compute on a non-zero target")]
    DirtyTarget { index: usize, gate: Gate },
    #[error("gate {index} ({gate}): AND uncompute target does not hold the conjunction")]
    InconsistentUncompute { index: usize, gate: Gate },
    #[error("expected {expected} {what} bits, got {got}")]
    Arity { what: &'static str, expected: usize, got: usize },
}

/// Final basis state of one simulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimState {
    pub inputs: Vec<bool>,
    pub outputs: Vec<bool>,
    pub ancillae: Vec<bool>,
    /// Maximum number of ancillae occupied at the same time (see
    /// [`peak_live`]).
    pub peak_live: usize,
    /// Maximum number of ancillae observed non-zero at the same time in this
    /// run.
    pub peak_nonzero: usize,
}

impl SimState {
    pub fn get(&self, q: QubitId) -> bool {
        let reg = match q.register {
            Register::Input => &self.inputs,
            Register::Output => &self.outputs,
            Register::Ancilla => &self.ancillae,
        };
        reg[q.offset as usize]
    }
}

struct Lanes {
    regs: [Vec<u64>; 3],
}

impl Lanes {
    fn new(circuit: &Circuit) -> Self {
        Lanes {
            regs: [
                vec![0; circuit.n_inputs()],
                vec![0; circuit.n_outputs()],
                vec![0; circuit.n_ancillae()],
            ],
        }
    }

    fn slot(q: QubitId) -> usize {
        match q.register {
            Register::Input => 0,
            Register::Output => 1,
            Register::Ancilla => 2,
        }
    }

    fn get(&self, q: QubitId) -> u64 {
        self.regs[Self::slot(q)][q.offset as usize]
    }

    fn set(&mut self, q: QubitId, v: u64) {
        self.regs[Self::slot(q)][q.offset as usize] = v;
    }

    /// Applies one gate and returns the lanes on which an AND gadget saw an
    /// inconsistent target. Those lanes continue with the target forced to
    /// the intended value.
    fn apply(&mut self, gate: &Gate) -> u64 {
        match *gate {
            Gate::Not(q) => {
                self.set(q, !self.get(q));
                0
            }
            Gate::Cnot { control, target } => {
                self.set(target, self.get(target) ^ self.get(control));
                0
            }
            Gate::AndCompute { a, b, target } => {
                let bad = self.get(target);
                self.set(target, self.get(a) & self.get(b));
                bad
            }
            Gate::AndUncompute { a, b, target } => {
                let bad = self.get(target) ^ (self.get(a) & self.get(b));
                self.set(target, 0);
                bad
            }
        }
    }
}

/// Simulates `circuit` on `|x>|y>|0...0>`.
pub fn simulate(circuit: &Circuit, x: &[bool], y: &[bool]) -> Result<SimState, SimError> {
    if x.len() != circuit.n_inputs() {
        return Err(SimError::Arity { what: "input", expected: circuit.n_inputs(), got: x.len() });
    }
    if y.len() != circuit.n_outputs() {
        return Err(SimError::Arity { what: "output", expected: circuit.n_outputs(), got: y.len() });
    }
    let mut lanes = Lanes::new(circuit);
    lanes.regs[0] = x.iter().map(|&b| b as u64).collect();
    lanes.regs[1] = y.iter().map(|&b| b as u64).collect();
    let mut peak_nonzero = 0;
    for (index, gate) in circuit.gates().iter().enumerate() {
        if lanes.apply(gate) & 1 != 0 {
            return Err(match gate {
                Gate::AndCompute { .. } => SimError::DirtyTarget { index, gate: *gate },
                _ => SimError::InconsistentUncompute { index, gate: *gate },
            });
        }
        peak_nonzero = peak_nonzero.max(lanes.regs[2].iter().filter(|&&w| w & 1 != 0).count());
    }
    let bits = |reg: &Vec<u64>| reg.iter().map(|&w| w & 1 == 1).collect::<Vec<bool>>();
    Ok(SimState {
        inputs: bits(&lanes.regs[0]),
        outputs: bits(&lanes.regs[1]),
        ancillae: bits(&lanes.regs[2]),
        peak_live: peak_live(circuit),
        peak_nonzero,
    })
}

/// Largest number of ancillae that are occupied simultaneously.
///
/// An ancilla becomes occupied when a gate writes to it while it is free. It
/// is released by an `AndUncompute` on it, or otherwise after the last gate
/// that touches it. This depends only on the gate list, not on input values.
pub fn peak_live(circuit: &Circuit) -> usize {
    let k = circuit.n_ancillae();
    let gates = circuit.gates();
    let mut last_touch = vec![None; k];
    for (index, gate) in gates.iter().enumerate() {
        for q in gate.operands() {
            if q.register == Register::Ancilla {
                last_touch[q.offset as usize] = Some(index);
            }
        }
    }
    let mut occupied = vec![false; k];
    let mut live = 0usize;
    let mut peak = 0usize;
    for (index, gate) in gates.iter().enumerate() {
        let target = gate.target();
        if target.register == Register::Ancilla {
            let t = target.offset as usize;
            match gate {
                Gate::AndUncompute { .. } => {
                    if occupied[t] {
                        occupied[t] = false;
                        live -= 1;
                    }
                }
                _ if !occupied[t] => {
                    occupied[t] = true;
                    live += 1;
                    peak = peak.max(live);
                }
                _ => {}
            }
        }
        for q in gate.operands() {
            let o = q.offset as usize;
            if q.register == Register::Ancilla && occupied[o] && last_touch[o] == Some(index) {
                occupied[o] = false;
                live -= 1;
            }
        }
    }
    peak
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// All `2^(n+m)` pairs `(x, y)`.
    Exhaustive,
    /// `samples` pairs drawn from a generator seeded with `seed`.
    Sampled { samples: usize, seed: u64 },
}

impl Mode {
    /// Exhaustive when `n + m <= 14`, otherwise the default sampled mode.
    pub fn auto(n_inputs: usize, n_outputs: usize) -> Mode {
        if n_inputs + n_outputs <= 14 {
            Mode::Exhaustive
        } else {
            Mode::Sampled { samples: DEFAULT_SAMPLES, seed: DEFAULT_SEED }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("circuit has {circuit} {what} qubits but the network has {network}")]
    ArityMismatch { what: &'static str, circuit: usize, network: usize },
    #[error("exhaustive checking needs n + m <= {EXHAUSTIVE_LIMIT}, got {0}")]
    TooLarge(usize),
}

/// A failing basis state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub x: Vec<bool>,
    pub y: Vec<bool>,
    pub expected: Vec<bool>,
    pub got: Vec<bool>,
    pub reason: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(x={}, y={}, expected={}, got={})",
            bit_string(&self.x),
            bit_string(&self.y),
            bit_string(&self.expected),
            bit_string(&self.got)
        )
    }
}

pub fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass { cases: u64 },
    Fail(Box<Counterexample>),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }
}

/// Checks that `circuit` maps `|x>|y>|0>` to `|x>|y xor f(x)>|0>`.
pub fn check_oracle(circuit: &Circuit, network: &XagNetwork, mode: Mode) -> Result<Verdict, VerifyError> {
    let (n, m) = (network.num_inputs(), network.num_outputs());
    if circuit.n_inputs() != n {
        return Err(VerifyError::ArityMismatch { what: "input", circuit: circuit.n_inputs(), network: n });
    }
    if circuit.n_outputs() != m {
        return Err(VerifyError::ArityMismatch { what: "output", circuit: circuit.n_outputs(), network: m });
    }
    let width = n + m;
    match mode {
        Mode::Exhaustive => {
            if width > EXHAUSTIVE_LIMIT {
                return Err(VerifyError::TooLarge(width));
            }
            let total: u64 = 1 << width;
            let mut base = 0u64;
            while base < total {
                let lanes = (total - base).min(64);
                let active = if lanes == 64 { u64::MAX } else { (1u64 << lanes) - 1 };
                let words: Vec<u64> = (0..width).map(|bit| counting_word(base, bit) & active).collect();
                if let Some(cex) = check_batch(circuit, network, &words, active) {
                    return Ok(Verdict::Fail(Box::new(cex)));
                }
                base += 64;
            }
            Ok(Verdict::Pass { cases: total })
        }
        Mode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut done = 0usize;
            while done < samples {
                let lanes = (samples - done).min(64);
                let active = if lanes == 64 { u64::MAX } else { (1u64 << lanes) - 1 };
                let words: Vec<u64> = (0..width).map(|_| rng.gen::<u64>() & active).collect();
                if let Some(cex) = check_batch(circuit, network, &words, active) {
                    return Ok(Verdict::Fail(Box::new(cex)));
                }
                done += lanes;
            }
            Ok(Verdict::Pass { cases: samples as u64 })
        }
    }
}

/// Lane `l` of the result is bit `bit` of `base + l`.
fn counting_word(base: u64, bit: usize) -> u64 {
    let mut w = 0u64;
    for lane in 0..64u64 {
        w |= ((base + lane) >> bit & 1) << lane;
    }
    w
}

fn check_batch(circuit: &Circuit, network: &XagNetwork, words: &[u64], active: u64) -> Option<Counterexample> {
    let n = network.num_inputs();
    let (xw, yw) = words.split_at(n);
    let f = network.evaluate_words(xw);
    let mut lanes = Lanes::new(circuit);
    lanes.regs[0] = xw.to_vec();
    lanes.regs[1] = yw.to_vec();
    let mut gadget_fail = 0u64;
    let mut first_gadget: Vec<(u64, usize, Gate)> = Vec::new();
    for (index, gate) in circuit.gates().iter().enumerate() {
        let bad = lanes.apply(gate) & active & !gadget_fail;
        if bad != 0 {
            first_gadget.push((bad, index, *gate));
            gadget_fail |= bad;
        }
    }
    let mut wrong = gadget_fail;
    for (o, &fw) in f.iter().enumerate() {
        wrong |= lanes.regs[1][o] ^ yw[o] ^ fw;
    }
    for (i, &xi) in xw.iter().enumerate() {
        wrong |= lanes.regs[0][i] ^ xi;
    }
    for &a in &lanes.regs[2] {
        wrong |= a;
    }
    wrong &= active;
    if wrong == 0 {
        return None;
    }
    let lane = wrong.trailing_zeros();
    let bit = |w: u64| w >> lane & 1 == 1;
    let x: Vec<bool> = xw.iter().map(|&w| bit(w)).collect();
    let y: Vec<bool> = yw.iter().map(|&w| bit(w)).collect();
    let expected: Vec<bool> = yw.iter().zip(&f).map(|(&yv, &fv)| bit(yv ^ fv)).collect();
    let got: Vec<bool> = lanes.regs[1].iter().map(|&w| bit(w)).collect();
    let reason = if let Some((_, index, gate)) = first_gadget.iter().find(|(mask, _, _)| mask >> lane & 1 == 1) {
        format!("AND gadget at gate {index} ({gate}) saw an inconsistent target")
    } else if expected != got {
        "output register differs from y xor f(x)".to_string()
    } else if lanes.regs[0].iter().zip(xw).any(|(&a, &b)| bit(a ^ b)) {
        "input register not restored".to_string()
    } else {
        let dirty = lanes.regs[2].iter().position(|&w| bit(w)).unwrap_or(0);
        format!("ancilla a{dirty} not returned to zero")
    };
    Some(Counterexample { x, y, expected, got, reason })
}
