use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};

use oracleforge::bennett::compile_bennett;
use oracleforge::compile::{compile, CompileOptions};
use oracleforge::qir::Circuit;
use oracleforge::verify::{check_oracle, Mode};
use oracleforge::xag::XagNetwork;

use crate::{read_network, Format, Strategy};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub name: String,
    pub inputs: usize,
    pub outputs: usize,
    pub xor_count: usize,
    pub and_count: usize,
    pub qubits: usize,
    pub t_count: usize,
    pub cnot_count: usize,
    pub not_count: usize,
    pub wall_time_seconds: f64,
}

impl BenchRow {
    pub const HEADER: &'static str = "name,inputs,outputs,xor_count,and_count,qubits,t_count,cnot_count,not_count,wall_time_seconds";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{:.6}",
            self.name,
            self.inputs,
            self.outputs,
            self.xor_count,
            self.and_count,
            self.qubits,
            self.t_count,
            self.cnot_count,
            self.not_count,
            self.wall_time_seconds
        )
    }
}

/// Compiles, verifies and tallies one network. The clock covers compilation
/// only.
pub fn compile_row(
    name: &str,
    network: &XagNetwork,
    strategy: Strategy,
    options: CompileOptions,
    timing: bool,
) -> Result<(Circuit, BenchRow)> {
    let start = Instant::now();
    let (circuit, cost) = match strategy {
        Strategy::Heuristic => compile(network, options),
        Strategy::Bennett => compile_bennett(network),
    }
    .with_context(|| format!("{name}: cannot compile"))?;
    let elapsed = start.elapsed().as_secs_f64();
    let mode = Mode::auto(network.num_inputs(), network.num_outputs());
    let verdict = check_oracle(&circuit, network, mode)?;
    if !verdict.is_pass() {
        bail!("{name}: compiled circuit failed verification: {verdict:?}");
    }
    let row = BenchRow {
        name: name.to_string(),
        inputs: network.num_inputs(),
        outputs: network.num_outputs(),
        xor_count: network.xor_count(),
        and_count: network.and_count(),
        qubits: cost.qubit_count,
        t_count: cost.t_count,
        cnot_count: cost.cnot_count,
        not_count: cost.not_count,
        wall_time_seconds: if timing { elapsed } else { 0.0 },
    };
    Ok((circuit, row))
}

/// Rows for every `.xag`, `.bristol` and `.txt` file directly in `dir`, by
/// file name.
pub fn bench_dir(dir: &Path, strategy: Strategy, timing: bool) -> Result<Vec<BenchRow>> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("cannot read {}", dir.display()))? {
        let path = entry?.path();
        let known = matches!(path.extension().and_then(|e| e.to_str()), Some("xag" | "bristol" | "txt"));
        if path.is_file() && known {
            paths.push(path);
        }
    }
    paths.sort();
    let mut rows = Vec::new();
    for path in paths {
        let network = read_network(&path, Format::Auto)?;
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        rows.push(compile_row(&name, &network, strategy, CompileOptions::default(), timing)?.1);
    }
    Ok(rows)
}
