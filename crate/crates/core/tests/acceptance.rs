//! One pass/fail line per acceptance criterion. Runs without the libtest
//! harness so the report reads top to bottom.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use oracleforge::bennett::compile_bennett;
use oracleforge::compile::{compile, CompileOptions};
use oracleforge::pebble::{
    encode, replay, solve, sweep, validate, CdclSolver, Direction, FinalMode, Move, PebbleOptions,
    PebbleSchedule, PointOutcome, Rule, SatSolver, SolveResult, Unroller,
};
use oracleforge::qir::{Circuit, Gate};
use oracleforge::verify::{check_oracle, Mode, Verdict};
use oracleforge::xag::random::{random_network, RandomSpec};
use oracleforge::xag::{parse_native, serialize_native, NodeId, XagNetwork};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Random networks with `n <= 10` and `r <= 40`, from one seeded stream.
fn random_small(count: usize, seed: u64) -> Vec<XagNetwork> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let spec = RandomSpec {
                inputs: rng.gen_range(2..=10),
                steps: rng.gen_range(1..=40),
                outputs: rng.gen_range(1..=4),
                and_ratio: rng.gen_range(0.0..1.0),
            };
            random_network(&spec, rng.gen())
        })
        .collect()
}

fn test_networks() -> Vec<(String, XagNetwork)> {
    let mut all: Vec<_> = common::all_fixtures().into_iter().map(|(n, x)| (n, x.normalize())).collect();
    all.extend(random_small(500, 1).into_iter().enumerate().map(|(i, n)| (format!("random #{i}"), n)));
    all
}

fn t_count_law() -> Outcome {
    let start = Instant::now();
    let networks = test_networks();
    for (name, net) in &networks {
        let (_, cost) = compile(net, CompileOptions::default()).map_err(|e| format!("{name}: {e}"))?;
        ensure(cost.t_count == 4 * net.and_count(), || format!("{name}: t={} and={}", cost.t_count, net.and_count()))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{} networks in {:.2}s", networks.len(), elapsed.as_secs_f64()))
}

fn oracle_correctness() -> Outcome {
    let start = Instant::now();
    let mut exhaustive = 0;
    for (name, net) in common::all_fixtures() {
        let net = net.normalize();
        if net.num_inputs() + net.num_outputs() > 14 {
            continue;
        }
        let (circuit, _) = compile(&net, CompileOptions::default()).map_err(|e| format!("{name}: {e}"))?;
        let verdict = check_oracle(&circuit, &net, Mode::Exhaustive).map_err(|e| e.to_string())?;
        ensure(verdict.is_pass(), || format!("{name}: {verdict:?}"))?;
        exhaustive += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut sampled = 0;
    for i in 0..60 {
        let spec = RandomSpec { inputs: rng.gen_range(12..=24), steps: rng.gen_range(20..=80), outputs: rng.gen_range(3..=8), and_ratio: 0.4 };
        let net = random_network(&spec, rng.gen());
        let (circuit, _) = compile(&net, CompileOptions::default()).map_err(|e| format!("random #{i}: {e}"))?;
        let verdict = check_oracle(&circuit, &net, Mode::Sampled { samples: 1000, seed: i }).map_err(|e| e.to_string())?;
        ensure(verdict == Verdict::Pass { cases: 1000 }, || format!("random #{i}: {verdict:?}"))?;
        sampled += 1;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{exhaustive} fixtures exhaustive, {sampled} networks sampled (k=1000) in {:.2}s", elapsed.as_secs_f64()))
}

fn baseline_relations() -> Outcome {
    let networks = test_networks();
    let mut equal = 0;
    for (name, net) in &networks {
        let (_, h) = compile(net, CompileOptions::default()).map_err(|e| format!("{name}: {e}"))?;
        let (circuit, b) = compile_bennett(net).map_err(|e| format!("{name}: {e}"))?;
        let xors = net.xor_count();
        ensure(b.t_count == h.t_count, || format!("{name}: T {} vs {}", b.t_count, h.t_count))?;
        ensure(b.qubit_count - h.qubit_count == xors, || format!("{name}: qubits {} - {} != {xors}", b.qubit_count, h.qubit_count))?;
        ensure((b.qubit_count == h.qubit_count) == (xors == 0), || format!("{name}: equality"))?;
        equal += (xors == 0) as usize;
        if net.num_inputs() + net.num_outputs() <= 14 {
            ensure(check_oracle(&circuit, net, Mode::Exhaustive).unwrap().is_pass(), || format!("{name}: bennett circuit"))?;
        }
    }
    Ok(format!("{} networks, {equal} without XOR", networks.len()))
}

fn majority_fixture() -> Outcome {
    let net = common::fixture("majority.xag");
    let (circuit, cost) = compile(&net, CompileOptions::default()).map_err(|e| e.to_string())?;
    let count = |pred: fn(&Gate) -> bool| circuit.gates().iter().filter(|g| pred(g)).count();
    let andc = count(|g| matches!(g, Gate::AndCompute { .. }));
    let andu = count(|g| matches!(g, Gate::AndUncompute { .. }));
    let cx = count(|g| matches!(g, Gate::Cnot { .. }));
    let verdict = check_oracle(&circuit, &net, Mode::Exhaustive).map_err(|e| e.to_string())?;
    let got = (andc, andu, cx, cost.t_count, verdict.clone());
    ensure(got == (1, 1, 10, 4, Verdict::Pass { cases: 16 }), || format!("got {got:?}"))?;
    Ok("1 ANDC, 1 ANDU, 10 CNOT, T=4, 16 cases".into())
}

fn pebbling_matches_game_search() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut compared = 0;
    let mut unreachable = 0;
    while compared < 40 {
        let spec = RandomSpec { inputs: rng.gen_range(2..=4), steps: rng.gen_range(1..=6), outputs: rng.gen_range(1..=2), and_ratio: 0.5 };
        let seed = rng.gen();
        let net = random_network(&spec, seed);
        if net.num_nodes() > 8 {
            continue;
        }
        for mode in [FinalMode::RoundTrip, FinalMode::OutputsPebbled] {
            let tag = || format!("seed {seed} {mode:?}");
            let cap = 12;
            let bmc_min = (net.num_inputs()..=net.num_nodes()).find_map(|l| {
                let options = PebbleOptions { mode, step_cap: cap, conflict_budget: None, ..PebbleOptions::new(l) };
                solve(&net, &options).unwrap().schedule().cloned().map(|s| (l, s))
            });
            let search_min = common::min_pebbles_search(&net, mode);
            ensure(bmc_min.as_ref().map(|b| b.0) == search_min.map(|s| s.0), || {
                format!("{}: BMC {:?} vs search {:?}", tag(), bmc_min.as_ref().map(|b| b.0), search_min)
            })?;
            let Some((l, schedule)) = bmc_min else {
                unreachable += 1;
                continue;
            };
            validate(&schedule, &net, l).map_err(|v| format!("{}: {v}", tag()))?;
            let (circuit, cost) = replay(&schedule, &net).map_err(|e| format!("{}: {e}", tag()))?;
            let placements = schedule.into_round_trip().and_placements(&net);
            ensure(cost.t_count == 4 * placements, || format!("{}: T={} placements={placements}", tag(), cost.t_count))?;
            ensure(check_oracle(&circuit, &net, Mode::Exhaustive).unwrap().is_pass(), || format!("{}: oracle", tag()))?;
        }
        compared += 1;
    }
    Ok(format!("{compared} networks in both modes, {unreachable} goals unreachable by both"))
}

fn pareto_behavior() -> Outcome {
    let net = common::fixture("pareto.xag");
    let (n, c) = (net.num_inputs(), net.and_count());
    let top = n + c;
    let base = PebbleOptions { step_cap: 30, ..PebbleOptions::new(n) };
    let points = sweep(&net, n..=top, &[0], &base).map_err(|e| e.to_string())?;
    let first = points.iter().position(|p| p.result().is_some()).ok_or("no feasible bound")?;
    let undecided: Vec<usize> =
        points[..first].iter().filter(|p| matches!(p.outcome, PointOutcome::Unknown { .. })).map(|p| p.max_pebbles).collect();
    let mut distinct = BTreeSet::new();
    let mut over = Vec::new();
    let mut line = Vec::new();
    for p in &points[first..] {
        match p.result() {
            Some(r) => {
                distinct.insert((r.ancillae, r.t_count));
                if p.max_pebbles < top && r.t_count > 4 * c {
                    over.push(p.max_pebbles);
                }
                line.push(format!("L={} anc={} T={}", p.max_pebbles, r.ancillae, r.t_count));
            }
            None => line.push(format!("L={} {:?}", p.max_pebbles, p.outcome)),
        }
    }
    let at_top = points.last().and_then(|p| p.result()).map(|r| r.t_count);
    let summary = format!("n={n} c={c}, from L={}: {}", points[first].max_pebbles, line.join(", "));
    ensure(distinct.len() >= 3, || format!("{} distinct points; {summary}", distinct.len()))?;
    ensure(!over.is_empty(), || format!("T never exceeds {}; {summary}", 4 * c))?;
    ensure(at_top == Some(4 * c), || format!("T at L={top} is {at_top:?}; {summary}"))?;
    ensure(undecided.is_empty(), || format!("bounds {undecided:?} below the first schedule are undecided; {summary}"))?;
    Ok(summary)
}

/// x4 = x1 ^ x2 and x5 = x2 ^ x3 share the child x2.
fn shared_child_network() -> XagNetwork {
    parse_native(".i 3\n.o 2\nXOR 1 2\nXOR 2 3\nOUT 4 0\nOUT 5 0\n").unwrap()
}

fn encoding_sanity() -> Outcome {
    let mut checked = 0;
    for (name, net) in common::all_fixtures() {
        let net = net.normalize();
        let nodes = net.num_nodes();
        for mode in [FinalMode::RoundTrip, FinalMode::OutputsPebbled] {
            for steps in [1, 3] {
                let enc = encode(&net, nodes, steps, mode).map_err(|e| e.to_string())?;
                let tag = || format!("{name} {mode:?} S={steps}");
                ensure(enc.pebble_vars as usize == nodes * (steps + 1), || format!("{}: {} pebble vars", tag(), enc.pebble_vars))?;
                let aux_min = enc.formula.clauses().iter().flatten().map(|l| l.unsigned_abs()).filter(|&v| v > enc.pebble_vars).min();
                ensure(aux_min.map_or(true, |v| v == enc.pebble_vars + 1), || format!("{}: auxiliaries start at {aux_min:?}", tag()))?;
                let units: BTreeSet<i32> = enc.formula.clauses().iter().filter(|c| c.len() == 1).map(|c| c[0]).collect();
                for i in 1..=nodes {
                    let node = NodeId::new(i as u32);
                    for s in [0, steps] {
                        let v = enc.var(nodes, node, s);
                        ensure(units.contains(&v) || units.contains(&-v), || format!("{}: no unit for node {i} at {s}", tag()))?;
                    }
                }
                checked += 1;
            }
        }
    }

    // the illegal double move: both XORs consume x2 in one step
    let net = shared_child_network();
    let forced = |lits: &[(u32, bool)]| -> SolveResult {
        let mut solver = CdclSolver::new(0);
        let mut unroller = Unroller::new(&net, 5, FinalMode::OutputsPebbled).unwrap();
        unroller.extend(&mut solver);
        let assumptions: Vec<i32> =
            lits.iter().map(|&(i, on)| unroller.pebble(NodeId::new(i), 1) * if on { 1 } else { -1 }).collect();
        solver.solve(&assumptions)
    };
    let double = forced(&[(4, true), (5, true), (2, false)]);
    let single = forced(&[(4, true), (2, false)]);
    ensure(double == SolveResult::Unsat, || format!("double move gives {double:?}"))?;
    ensure(single == SolveResult::Sat, || format!("single move gives {single:?}"))?;

    let config = |on: &[usize]| (0..=5).map(|i| on.contains(&i)).collect::<Vec<bool>>();
    let place = |node: u32| Move { node: NodeId::new(node), direction: Direction::Place, consumed: Some(NodeId::new(2)) };
    let schedule = PebbleSchedule {
        configs: vec![config(&[1, 2, 3]), config(&[1, 3, 4, 5])],
        moves: vec![vec![place(4), place(5)]],
        mode: FinalMode::OutputsPebbled,
    };
    let violation = validate(&schedule, &net, 5).err().ok_or("validate accepted the double move")?;
    ensure(violation.rule == Rule::SharedNode, || format!("rejected as {:?}", violation.rule))?;
    Ok(format!("{checked} encodings; double move UNSAT and rejected as SharedNode"))
}

fn round_trips() -> Outcome {
    let mut count = 0;
    for (name, net) in common::all_fixtures() {
        if !name.ends_with(".bristol") {
            let text = common::fixture_text(&name);
            let again = serialize_native(&parse_native(&text).map_err(|e| e.to_string())?);
            ensure(again == text, || format!("{name}: native text changed"))?;
        }
        let net = net.normalize();
        let text = serialize_native(&net);
        let reparsed = parse_native(&text).map_err(|e| format!("{name}: {e}"))?;
        ensure(reparsed == net && serialize_native(&reparsed) == text, || format!("{name}: native round trip"))?;
        for (circuit, _) in [compile(&net, CompileOptions::default()).unwrap(), compile_bennett(&net).unwrap()] {
            let text = circuit.to_string();
            let parsed: Circuit = text.parse().map_err(|e| format!("{name}: {e}"))?;
            ensure(parsed == circuit && parsed.to_string() == text, || format!("{name}: circuit round trip"))?;
        }
        count += 1;
    }
    Ok(format!("{count} fixtures, native and circuit text"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("T-count law", t_count_law),
        ("oracle correctness", oracle_correctness),
        ("baseline relations", baseline_relations),
        ("majority fixture", majority_fixture),
        ("pebbling vs game search", pebbling_matches_game_search),
        ("Pareto behavior", pareto_behavior),
        ("encoding sanity", encoding_sanity),
        ("round trips", round_trips),
    ];
    // failures are reported on the criterion line
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}) [{:.1}s]", i + 1, start.elapsed().as_secs_f64()),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail}) [{:.1}s]", i + 1, start.elapsed().as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
