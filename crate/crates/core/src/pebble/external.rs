//! Out-of-process solver speaking DIMACS on stdin and the competition output
//! format (`s SATISFIABLE`, `v ... 0`) on stdout.

use std::io::Write;
use std::process::{Command, Stdio};

use super::cnf::{ClauseSink, CnfFormula};
use super::sat::{SatSolver, SolveResult};

/// Environment variable naming the external solver command line.
pub const SOLVER_ENV: &str = "ORACLEFORGE_SOLVER";

/// Re-runs the whole formula on every `solve`; assumptions become unit
/// clauses. Any failure to run or parse the solver yields `Unknown`.
#[derive(Debug, Clone)]
pub struct ExternalSolver {
    program: String,
    args: Vec<String>,
    formula: CnfFormula,
    model: Option<Vec<bool>>,
    pub last_error: Option<String>,
}

impl ExternalSolver {
    /// `command` is split on whitespace into program and arguments.
    pub fn new(command: &str) -> Option<Self> {
        let mut parts = command.split_whitespace().map(str::to_string);
        let program = parts.next()?;
        Some(ExternalSolver { program, args: parts.collect(), formula: CnfFormula::new(), model: None, last_error: None })
    }

    pub fn from_env() -> Option<Self> {
        std::env::var(SOLVER_ENV).ok().and_then(|c| ExternalSolver::new(&c))
    }

    fn run(&mut self, assumptions: &[i32]) -> Result<SolveResult, String> {
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| format!("cannot start `{}`: {e}", self.program))?;
        let input = self.formula.to_dimacs_with(assumptions);
        child
            .stdin
            .take()
            .expect("stdin is piped")
            .write_all(input.as_bytes())
            .map_err(|e| format!("cannot write to solver: {e}"))?;
        let output = child.wait_with_output().map_err(|e| format!("solver failed: {e}"))?;
        let text = String::from_utf8_lossy(&output.stdout);
        let mut status = None;
        let mut model = vec![false; self.formula.variable_count() as usize];
        for line in text.lines() {
            let line = line.trim();
            if let Some(rest) = line.strip_prefix("s ") {
                status = Some(match rest.trim() {
                    "SATISFIABLE" => SolveResult::Sat,
                    "UNSATISFIABLE" => SolveResult::Unsat,
                    _ => SolveResult::Unknown,
                });
            } else if let Some(rest) = line.strip_prefix("v ") {
                for token in rest.split_whitespace() {
                    let lit: i32 = token.parse().map_err(|_| format!("bad model literal `{token}`"))?;
                    if lit != 0 {
                        if let Some(slot) = model.get_mut(lit.unsigned_abs() as usize - 1) {
                            *slot = lit > 0;
                        }
                    }
                }
            }
        }
        let status = status.ok_or_else(|| "solver printed no status line".to_string())?;
        if status == SolveResult::Sat {
            if !self.formula.is_satisfied_by(&model)
                || assumptions.iter().any(|&a| model[a.unsigned_abs() as usize - 1] != (a > 0))
            {
                return Err("solver model does not satisfy the formula".to_string());
            }
            self.model = Some(model);
        }
        Ok(status)
    }
}

impl ClauseSink for ExternalSolver {
    fn new_var(&mut self) -> i32 {
        self.formula.new_var()
    }

    fn add_clause(&mut self, lits: &[i32]) {
        self.formula.add_clause(lits);
    }
}

impl SatSolver for ExternalSolver {
    fn num_vars(&self) -> u32 {
        self.formula.variable_count()
    }

    fn solve(&mut self, assumptions: &[i32]) -> SolveResult {
        self.model = None;
        match self.run(assumptions) {
            Ok(r) => {
                self.last_error = None;
                r
            }
            Err(e) => {
                self.last_error = Some(e);
                SolveResult::Unknown
            }
        }
    }

    fn value(&self, var: i32) -> Option<bool> {
        self.model.as_ref()?.get(var.unsigned_abs() as usize - 1).copied()
    }

    fn set_conflict_budget(&mut self, _budget: Option<u64>) {}
}
