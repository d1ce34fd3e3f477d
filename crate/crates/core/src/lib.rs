//! Compile Boolean functions given as XOR-AND graphs (XAGs) into quantum
//! oracle circuits over a Clifford+T cost model.
//!
//! The pipeline is:
//!
//! * [`xag`] parses, normalizes and evaluates networks and computes linear
//!   transitive fan-ins.
//! * [`compile`] emits an oracle whose T-count is exactly four times the
//!   number of AND nodes, computing every XOR block in place.
//! * [`bennett`] is the baseline that spends one ancilla per node.
//! * [`pebble`] trades ancillae for T gates by solving a resource-constrained
//!   reversible pebble game with incremental SAT.
//! * [`verify`] simulates circuits bit by bit and checks oracle semantics
//!   against [`xag::XagNetwork::evaluate`].

pub mod bennett;
pub mod compile;
pub mod pebble;
pub mod qir;
pub mod verify;
pub mod xag;

pub use compile::{compile, CompileOptions};
pub use qir::{Circuit, CostReport, Gate, QubitId, Register};
pub use xag::{NodeId, XagNetwork};
