use std::fmt::Write as _;

use thiserror::Error;

/// Anything clauses can be streamed into: a formula under construction or a
/// live solver.
pub trait ClauseSink {
    /// Allocates a fresh variable and returns its (positive) index.
    fn new_var(&mut self) -> i32;
    fn add_clause(&mut self, lits: &[i32]);
}

/// A CNF formula with DIMACS-style signed literals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CnfFormula {
    variable_count: u32,
    clauses: Vec<Vec<i32>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

impl CnfFormula {
    pub fn new() -> Self {
        CnfFormula::default()
    }

    pub fn with_vars(variable_count: u32) -> Self {
        CnfFormula { variable_count, clauses: Vec::new() }
    }

    pub fn variable_count(&self) -> u32 {
        self.variable_count
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    pub fn to_dimacs(&self) -> String {
        self.to_dimacs_with(&[])
    }

    /// DIMACS text with `units` appended as extra unit clauses.
    pub fn to_dimacs_with(&self, units: &[i32]) -> String {
        let mut out = format!("p cnf {} {}\n", self.variable_count, self.clauses.len() + units.len());
        for clause in &self.clauses {
            for lit in clause {
                write!(out, "{lit} ").unwrap();
            }
            out.push_str("0\n");
        }
        for u in units {
            writeln!(out, "{u} 0").unwrap();
        }
        out
    }

    pub fn from_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
        let mut formula = CnfFormula::default();
        let mut declared: Option<(u32, usize)> = None;
        let mut current = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('c') || content.starts_with('%') {
                continue;
            }
            let bad = |message: &str| DimacsError::Malformed { line, message: message.to_string() };
            if content.starts_with('p') {
                let fields: Vec<&str> = content.split_whitespace().collect();
                if fields.len() != 4 || fields[1] != "cnf" || declared.is_some() {
                    return Err(bad("expected a single `p cnf <vars> <clauses>` header"));
                }
                let vars = fields[2].parse().map_err(|_| bad("bad variable count"))?;
                let count = fields[3].parse().map_err(|_| bad("bad clause count"))?;
                declared = Some((vars, count));
                formula.variable_count = vars;
                continue;
            }
            let Some((vars, _)) = declared else {
                return Err(bad("clause before header"));
            };
            for token in content.split_whitespace() {
                let lit: i32 = token.parse().map_err(|_| bad("literal is not an integer"))?;
                if lit == 0 {
                    if current.is_empty() {
                        return Err(bad("empty clause"));
                    }
                    formula.clauses.push(std::mem::take(&mut current));
                } else if lit.unsigned_abs() > vars {
                    return Err(bad("literal exceeds declared variable count"));
                } else {
                    current.push(lit);
                }
            }
        }
        if !current.is_empty() {
            formula.clauses.push(current);
        }
        match declared {
            None => Err(DimacsError::Malformed { line: 0, message: "missing header".into() }),
            Some((_, count)) if count != formula.clauses.len() => Err(DimacsError::Malformed {
                line: 0,
                message: format!("header declares {count} clauses, found {}", formula.clauses.len()),
            }),
            Some(_) => Ok(formula),
        }
    }

    /// Evaluates the formula under `model[v - 1]`.
    pub fn is_satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| model[l.unsigned_abs() as usize - 1] == (l > 0)))
    }
}

impl ClauseSink for CnfFormula {
    fn new_var(&mut self) -> i32 {
        self.variable_count += 1;
        self.variable_count as i32
    }

    fn add_clause(&mut self, lits: &[i32]) {
        assert!(!lits.is_empty(), "empty clauses are not allowed");
        for &l in lits {
            assert!(l != 0 && l.unsigned_abs() <= self.variable_count, "literal {l} references an undeclared variable");
        }
        self.clauses.push(lits.to_vec());
    }
}
