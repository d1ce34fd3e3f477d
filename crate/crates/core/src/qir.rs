//! Reversible circuit IR with a fault-tolerant cost model.
//!
//! AND gates are out-of-place: `AndCompute` costs 4 T gates and requires a
//! clean target, `AndUncompute` costs no T gates but one measurement.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Register {
    Input,
    Output,
    Ancilla,
}

impl Register {
    fn tag(self) -> char {
        match self {
            Register::Input => 'i',
            Register::Output => 'o',
            Register::Ancilla => 'a',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QubitId {
    pub register: Register,
    pub offset: u32,
}

impl QubitId {
    pub fn input(offset: u32) -> Self {
        QubitId { register: Register::Input, offset }
    }

    pub fn output(offset: u32) -> Self {
        QubitId { register: Register::Output, offset }
    }

    pub fn ancilla(offset: u32) -> Self {
        QubitId { register: Register::Ancilla, offset }
    }
}

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.register.tag(), self.offset)
    }
}

impl FromStr for QubitId {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        let register = match chars.next() {
            Some('i') => Register::Input,
            Some('o') => Register::Output,
            Some('a') => Register::Ancilla,
            _ => return Err(CircuitError::UnknownRegister(s.to_string())),
        };
        let digits = chars.as_str();
        // reject "+1", "01" and friends so that parsing stays canonical
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || (digits.len() > 1 && digits.starts_with('0')) {
            return Err(CircuitError::UnknownRegister(s.to_string()));
        }
        let offset = digits.parse().map_err(|_| CircuitError::UnknownRegister(s.to_string()))?;
        Ok(QubitId { register, offset })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    Not(QubitId),
    Cnot { control: QubitId, target: QubitId },
    AndCompute { a: QubitId, b: QubitId, target: QubitId },
    AndUncompute { a: QubitId, b: QubitId, target: QubitId },
}

impl Gate {
    pub fn operands(&self) -> Vec<QubitId> {
        match *self {
            Gate::Not(q) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::AndCompute { a, b, target } | Gate::AndUncompute { a, b, target } => vec![a, b, target],
        }
    }

    pub fn target(&self) -> QubitId {
        match *self {
            Gate::Not(q) => q,
            Gate::Cnot { target, .. } | Gate::AndCompute { target, .. } | Gate::AndUncompute { target, .. } => target,
        }
    }

    pub fn is_and(&self) -> bool {
        matches!(self, Gate::AndCompute { .. } | Gate::AndUncompute { .. })
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Not(q) => write!(f, "X {q}"),
            Gate::Cnot { control, target } => write!(f, "CX {control} {target}"),
            Gate::AndCompute { a, b, target } => write!(f, "ANDC {a} {b} {target}"),
            Gate::AndUncompute { a, b, target } => write!(f, "ANDU {a} {b} {target}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("gate {index} ({gate}): operand {qubit} is outside the declared registers")]
    OutOfRange { index: usize, gate: Gate, qubit: QubitId },
    #[error("gate {index} ({gate}): operands must be pairwise distinct")]
    RepeatedOperand { index: usize, gate: Gate },
    #[error("gate {index} ({gate}): AND target must be an ancilla or output qubit")]
    InputTarget { index: usize, gate: Gate },
    #[error("adjoint of an AND uncompute gadget is not representable (gate {index})")]
    AdjointOfUncompute { index: usize },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("unknown qubit `{0}`")]
    UnknownRegister(String),
}

/// A validated circuit over the registers `|x>` (inputs), `|y>` (outputs) and
/// ancillae.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    n_inputs: u32,
    n_outputs: u32,
    n_ancillae: u32,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_inputs: u32, n_outputs: u32, n_ancillae: u32, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        let circuit = Circuit { n_inputs, n_outputs, n_ancillae, gates };
        for (index, gate) in circuit.gates.iter().enumerate() {
            circuit.check_gate(index, gate)?;
        }
        Ok(circuit)
    }

    fn check_gate(&self, index: usize, gate: &Gate) -> Result<(), CircuitError> {
        let ops = gate.operands();
        for &qubit in &ops {
            if !self.contains(qubit) {
                return Err(CircuitError::OutOfRange { index, gate: *gate, qubit });
            }
        }
        for (i, a) in ops.iter().enumerate() {
            if ops[i + 1..].contains(a) {
                return Err(CircuitError::RepeatedOperand { index, gate: *gate });
            }
        }
        if let Gate::AndCompute { target, .. } = gate {
            if target.register == Register::Input {
                return Err(CircuitError::InputTarget { index, gate: *gate });
            }
        }
        Ok(())
    }

    pub fn contains(&self, q: QubitId) -> bool {
        q.offset < self.register_size(q.register)
    }

    pub fn register_size(&self, register: Register) -> u32 {
        match register {
            Register::Input => self.n_inputs,
            Register::Output => self.n_outputs,
            Register::Ancilla => self.n_ancillae,
        }
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs as usize
    }

    pub fn n_outputs(&self) -> usize {
        self.n_outputs as usize
    }

    pub fn n_ancillae(&self) -> usize {
        self.n_ancillae as usize
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn into_gates(self) -> Vec<Gate> {
        self.gates
    }

    pub fn cost(&self) -> CostReport {
        let mut report = CostReport {
            qubit_count: (self.n_inputs + self.n_outputs + self.n_ancillae) as usize,
            ..CostReport::default()
        };
        for gate in &self.gates {
            match gate {
                Gate::Not(_) => report.not_count += 1,
                Gate::Cnot { .. } => report.cnot_count += 1,
                Gate::AndCompute { .. } => report.t_count += 4,
                Gate::AndUncompute { .. } => report.measurement_count += 1,
            }
        }
        report
    }

    /// Appends the gates of `other`, which must use registers of the same
    /// shape.
    pub fn concat(&self, other: &Circuit) -> Result<Circuit, CircuitError> {
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&other.gates);
        Circuit::new(
            self.n_inputs.max(other.n_inputs),
            self.n_outputs.max(other.n_outputs),
            self.n_ancillae.max(other.n_ancillae),
            gates,
        )
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QC {} {} {}", self.n_inputs, self.n_outputs, self.n_ancillae)?;
        for gate in &self.gates {
            writeln!(f, "{gate}")?;
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = CircuitError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let malformed = |line: usize, message: &str| CircuitError::Malformed { line, message: message.to_string() };
        let (line, header) = lines.next().ok_or_else(|| malformed(0, "empty circuit file"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "QC" {
            return Err(malformed(line, "expected `QC <inputs> <outputs> <ancillae>`"));
        }
        let size = |s: &str| s.parse::<u32>().map_err(|_| malformed(line, "register sizes must be integers"));
        let (n, m, k) = (size(fields[1])?, size(fields[2])?, size(fields[3])?);

        let mut gates = Vec::new();
        for (line, content) in lines {
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let qubits = tokens[1..]
                .iter()
                .map(|t| t.parse::<QubitId>().map_err(|e| CircuitError::Malformed { line, message: e.to_string() }))
                .collect::<Result<Vec<_>, _>>()?;
            let gate = match (tokens[0], qubits.as_slice()) {
                ("X", &[q]) => Gate::Not(q),
                ("CX", &[control, target]) => Gate::Cnot { control, target },
                ("ANDC", &[a, b, target]) => Gate::AndCompute { a, b, target },
                ("ANDU", &[a, b, target]) => Gate::AndUncompute { a, b, target },
                _ => return Err(malformed(line, &format!("cannot parse gate `{content}`"))),
            };
            gates.push(gate);
        }
        Circuit::new(n, m, k, gates)
    }
}

/// Per-circuit resource tally.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct CostReport {
    pub t_count: usize,
    pub qubit_count: usize,
    pub cnot_count: usize,
    pub not_count: usize,
    pub measurement_count: usize,
}

/// Reverses a gate sequence, turning every `AndCompute` into the matching
/// `AndUncompute`.
pub fn adjoint(gates: &[Gate]) -> Result<Vec<Gate>, CircuitError> {
    gates
        .iter()
        .enumerate()
        .rev()
        .map(|(index, gate)| match *gate {
            Gate::AndCompute { a, b, target } => Ok(Gate::AndUncompute { a, b, target }),
            Gate::AndUncompute { .. } => Err(CircuitError::AdjointOfUncompute { index }),
            other => Ok(other),
        })
        .collect()
}
