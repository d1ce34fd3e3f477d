//! Browser bindings. Every entry point takes text and returns a JSON string,
//! so the page needs no generated type glue.

use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

use oracleforge::bennett::compile_bennett;
use oracleforge::compile::{compile, CompileOptions};
use oracleforge::pebble::{pareto_svg, sweep, PebbleOptions, PointOutcome};
use oracleforge::qir::{Circuit, CostReport};
use oracleforge::verify::{check_oracle, Mode, Verdict};
use oracleforge::xag::{parse_bristol, parse_native, XagNetwork};

#[derive(Serialize)]
struct Cost {
    t_count: usize,
    qubits: usize,
    cnots: usize,
    nots: usize,
    measurements: usize,
}

impl From<CostReport> for Cost {
    fn from(c: CostReport) -> Self {
        Cost {
            t_count: c.t_count,
            qubits: c.qubit_count,
            cnots: c.cnot_count,
            nots: c.not_count,
            measurements: c.measurement_count,
        }
    }
}

fn error(message: impl std::fmt::Display) -> String {
    json!({ "ok": false, "error": message.to_string() }).to_string()
}

/// Native text unless the first line looks like a Bristol header.
fn parse(source: &str) -> Result<XagNetwork, String> {
    let first = source.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("");
    let bristol = first.split_whitespace().all(|t| t.parse::<usize>().is_ok()) && !first.is_empty();
    let network = if bristol { parse_bristol(source) } else { parse_native(source) };
    network.map(|n| n.normalize()).map_err(|e| e.to_string())
}

fn verdict_json(verdict: &Verdict) -> serde_json::Value {
    match verdict {
        Verdict::Pass { cases } => json!({ "pass": true, "cases": cases }),
        Verdict::Fail(cex) => json!({ "pass": false, "counterexample": cex.to_string(), "reason": cex.reason }),
    }
}

/// Compiles with `strategy` (`heuristic` or `bennett`) and checks the result.
#[wasm_bindgen]
pub fn compile_network(source: &str, strategy: &str) -> String {
    let network = match parse(source) {
        Ok(n) => n,
        Err(e) => return error(e),
    };
    let compiled = match strategy {
        "heuristic" => compile(&network, CompileOptions::default()),
        "bennett" => compile_bennett(&network),
        other => return error(format!("unknown strategy `{other}`")),
    };
    let (circuit, cost) = match compiled {
        Ok(c) => c,
        Err(e) => return error(e),
    };
    let verdict = match check_oracle(&circuit, &network, Mode::auto(network.num_inputs(), network.num_outputs())) {
        Ok(v) => v,
        Err(e) => return error(e),
    };
    json!({
        "ok": true,
        "inputs": network.num_inputs(),
        "outputs": network.num_outputs(),
        "and_count": network.and_count(),
        "xor_count": network.xor_count(),
        "cost": Cost::from(cost),
        "circuit": circuit.to_string(),
        "verify": verdict_json(&verdict),
    })
    .to_string()
}

/// Checks a circuit in the text format against a network.
#[wasm_bindgen]
pub fn verify_circuit(circuit: &str, source: &str) -> String {
    let network = match parse(source) {
        Ok(n) => n,
        Err(e) => return error(e),
    };
    let circuit: Circuit = match circuit.parse() {
        Ok(c) => c,
        Err(e) => return error(e),
    };
    match check_oracle(&circuit, &network, Mode::auto(network.num_inputs(), network.num_outputs())) {
        Ok(v) => json!({ "ok": true, "verify": verdict_json(&v) }).to_string(),
        Err(e) => error(e),
    }
}

/// Pebbles the network for every bound in `low..=high`.
#[wasm_bindgen]
pub fn pebble_sweep(source: &str, low: usize, high: usize, step_cap: usize) -> String {
    let network = match parse(source) {
        Ok(n) => n,
        Err(e) => return error(e),
    };
    if low > high {
        return error(format!("empty range {low}..{high}"));
    }
    let base = PebbleOptions { step_cap, conflict_budget: Some(50_000), ..PebbleOptions::new(low) };
    let points = match sweep(&network, low..=high, &[0], &base) {
        Ok(p) => p,
        Err(e) => return error(e),
    };
    let rows: Vec<_> = points
        .iter()
        .map(|p| match &p.outcome {
            PointOutcome::Found(r) => json!({
                "pebbles": p.max_pebbles,
                "status": "found",
                "steps": r.steps,
                "ancillae": r.ancillae,
                "t_count": r.t_count,
                "schedule": r.schedule.to_csv(),
            }),
            PointOutcome::Infeasible => json!({ "pebbles": p.max_pebbles, "status": "infeasible" }),
            PointOutcome::Unknown { .. } => json!({ "pebbles": p.max_pebbles, "status": "budget" }),
        })
        .collect();
    json!({ "ok": true, "points": rows, "svg": pareto_svg(&points) }).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    const MAJORITY: &str = ".i 3\n.o 1\nXOR 1 2\nXOR 2 3\nAND 4 5 0 0\nXOR 2 6\nOUT 7 0\n";

    fn value(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn compile_reports_cost_and_verdict() {
        let v = value(compile_network(MAJORITY, "heuristic"));
        assert_eq!(v["ok"], true);
        assert_eq!(v["cost"]["t_count"], 4);
        assert_eq!(v["cost"]["qubits"], 5);
        assert_eq!(v["verify"]["pass"], true);
        assert_eq!(v["verify"]["cases"], 16);
        let b = value(compile_network(MAJORITY, "bennett"));
        assert_eq!(b["cost"]["qubits"], 8);
    }

    #[test]
    fn bristol_text_is_detected() {
        let v = value(compile_network("1 3\n2 1 1\n1 1\n\n2 1 0 1 2 AND\n", "heuristic"));
        assert_eq!(v["ok"], true, "{v}");
        assert_eq!(v["and_count"], 1);
    }

    #[test]
    fn errors_are_json() {
        let v = value(compile_network("garbage", "heuristic"));
        assert_eq!(v["ok"], false);
        assert!(v["error"].as_str().unwrap().len() > 0);
        assert_eq!(value(compile_network(MAJORITY, "fast"))["ok"], false);
        assert_eq!(value(pebble_sweep(MAJORITY, 5, 4, 8))["ok"], false);
    }

    #[test]
    fn verify_round_trip_and_mutation() {
        let compiled = value(compile_network(MAJORITY, "heuristic"));
        let circuit = compiled["circuit"].as_str().unwrap();
        assert_eq!(value(verify_circuit(circuit, MAJORITY))["verify"]["pass"], true);
        let mutated = format!("{circuit}X o0\n");
        let v = value(verify_circuit(&mutated, MAJORITY));
        assert_eq!(v["verify"]["pass"], false);
        assert!(v["verify"]["counterexample"].as_str().unwrap().starts_with("(x="));
    }

    #[test]
    fn sweep_points() {
        let v = value(pebble_sweep(MAJORITY, 3, 4, 12));
        assert_eq!(v["ok"], true);
        let points = v["points"].as_array().unwrap();
        assert_eq!(points.len(), 2);
        assert_eq!(points[1]["status"], "found");
        assert_eq!(points[1]["t_count"], 4);
        assert!(v["svg"].as_str().unwrap().starts_with("<svg"));
    }
}
