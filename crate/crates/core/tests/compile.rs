mod common;

use oracleforge::bennett::compile_bennett;
use oracleforge::compile::{compile, CompileOptions, TieBreak};
use oracleforge::qir::{adjoint, Circuit, Gate, QubitId};
use oracleforge::verify::{check_oracle, peak_live, simulate, Mode, Verdict};
use oracleforge::xag::random::{random_network, RandomSpec};
use oracleforge::xag::XagNetwork;
use proptest::prelude::*;

fn random_normalized() -> impl Strategy<Value = XagNetwork> {
    (2u32..=10, 1usize..=40, 1usize..4, 0.0f64..1.0, any::<u64>())
        .prop_map(|(inputs, steps, outputs, and_ratio, seed)| {
            random_network(&RandomSpec { inputs, steps, outputs, and_ratio }, seed)
        })
}

fn count(circuit: &Circuit, pred: impl Fn(&Gate) -> bool) -> usize {
    circuit.gates().iter().filter(|g| pred(g)).count()
}

#[test]
fn majority_gate_counts() {
    let net = common::fixture("majority.xag");
    let (circuit, cost) = compile(&net, CompileOptions::default()).unwrap();
    assert_eq!(count(&circuit, |g| matches!(g, Gate::AndCompute { .. })), 1);
    assert_eq!(count(&circuit, |g| matches!(g, Gate::AndUncompute { .. })), 1);
    assert_eq!(cost.cnot_count, 10);
    assert_eq!(cost.t_count, 4);
    assert_eq!(cost.qubit_count, 5);
    assert_eq!(check_oracle(&circuit, &net, Mode::Exhaustive).unwrap(), Verdict::Pass { cases: 16 });
}

#[test]
fn both_tie_breaks_are_correct_on_fixtures() {
    for (name, net) in common::all_fixtures() {
        for tie_break in [TieBreak::Lowest, TieBreak::Highest] {
            let options = CompileOptions { tie_break, ..CompileOptions::default() };
            let (circuit, _) = compile(&net, options).unwrap();
            let mode = Mode::auto(net.num_inputs(), net.num_outputs());
            assert!(check_oracle(&circuit, &net, mode).unwrap().is_pass(), "{name} {tie_break:?}");
        }
    }
}

#[test]
fn bristol_circuits_compute_integer_functions() {
    for (name, net) in common::all_fixtures().into_iter().filter(|(n, _)| n.ends_with(".bristol")) {
        let (circuit, _) = compile(&net, CompileOptions::default()).unwrap();
        let (n, m) = (net.num_inputs(), net.num_outputs());
        for x in 0..1u64 << n {
            let bits = common::bits(x, n);
            let state = simulate(&circuit, &bits, &vec![false; m]).unwrap();
            assert_eq!(state.outputs, common::bristol_reference(&name, &bits), "{name} x={x}");
            assert_eq!(state.inputs, bits);
            assert!(state.ancillae.iter().all(|&a| !a));
        }
    }
}

#[test]
fn broken_circuit_yields_a_counterexample() {
    let net = common::fixture("majority.xag");
    let (circuit, _) = compile(&net, CompileOptions::default()).unwrap();
    let mut gates = circuit.gates().to_vec();
    gates.push(Gate::Not(QubitId::output(0)));
    let broken = Circuit::new(3, 1, circuit.n_ancillae() as u32, gates).unwrap();
    match check_oracle(&broken, &net, Mode::Exhaustive).unwrap() {
        Verdict::Fail(cex) => {
            assert_eq!(cex.x, vec![false; 3]);
            assert_ne!(cex.expected, cex.got);
        }
        Verdict::Pass { .. } => panic!("a flipped output must be caught"),
    }
}

fn compute_gate(q: u32) -> impl Strategy<Value = Gate> {
    let qubit = (0..3u32, 0..q).prop_map(|(reg, off)| match reg {
        0 => QubitId::input(off),
        1 => QubitId::output(off),
        _ => QubitId::ancilla(off),
    });
    let targets = (0..2u32, 0..q).prop_map(|(reg, off)| if reg == 0 { QubitId::output(off) } else { QubitId::ancilla(off) });
    prop_oneof![
        targets.clone().prop_map(Gate::Not),
        (qubit.clone(), targets.clone()).prop_map(|(control, target)| Gate::Cnot { control, target }),
        (qubit.clone(), qubit, targets).prop_map(|(a, b, target)| Gate::AndCompute { a, b, target }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn t_count_is_four_per_and(net in random_normalized()) {
        let (circuit, cost) = compile(&net, CompileOptions::default()).unwrap();
        prop_assert_eq!(cost.t_count, 4 * net.and_count());
        prop_assert_eq!(cost.measurement_count, net.and_count());
        prop_assert_eq!(cost, circuit.cost());
        prop_assert_eq!(peak_live(&circuit), circuit.n_ancillae());
    }

    #[test]
    fn compiled_circuits_are_oracles(net in random_normalized()) {
        let (circuit, _) = compile(&net, CompileOptions::default()).unwrap();
        let mode = Mode::auto(net.num_inputs(), net.num_outputs());
        prop_assert!(check_oracle(&circuit, &net, mode).unwrap().is_pass());
    }

    #[test]
    fn inclusion_optimization_only_saves_cnots(net in random_normalized()) {
        let (_, with) = compile(&net, CompileOptions::default()).unwrap();
        let (plain, without) = compile(&net, CompileOptions { use_inclusion_optimization: false, ..CompileOptions::default() }).unwrap();
        prop_assert!(with.cnot_count <= without.cnot_count);
        prop_assert_eq!(with.t_count, without.t_count);
        prop_assert_eq!(with.qubit_count, without.qubit_count);
        let mode = Mode::auto(net.num_inputs(), net.num_outputs());
        prop_assert!(check_oracle(&plain, &net, mode).unwrap().is_pass());
    }

    #[test]
    fn bennett_relations(net in random_normalized()) {
        let (heuristic, h) = compile(&net, CompileOptions::default()).unwrap();
        let (baseline, b) = compile_bennett(&net).unwrap();
        prop_assert_eq!(b.t_count, h.t_count);
        prop_assert_eq!(b.qubit_count - h.qubit_count, net.xor_count());
        prop_assert_eq!(b.qubit_count == h.qubit_count, net.xor_count() == 0);
        prop_assert_eq!(baseline.n_ancillae(), net.num_steps());
        let mode = Mode::auto(net.num_inputs(), net.num_outputs());
        prop_assert!(check_oracle(&baseline, &net, mode).unwrap().is_pass());
        prop_assert_eq!(heuristic.n_ancillae(), net.and_count());
    }

    #[test]
    fn adjoint_reverses_and_swaps_and_kinds(gates in prop::collection::vec(compute_gate(4), 0..20)) {
        let gates: Vec<Gate> = gates
            .into_iter()
            .filter(|g| {
                let ops = g.operands();
                ops.iter().enumerate().all(|(i, q)| !ops[..i].contains(q))
            })
            .collect();
        let back = adjoint(&gates).unwrap();
        prop_assert_eq!(back.len(), gates.len());
        let no_compute = back.iter().all(|g| !matches!(g, Gate::AndCompute { .. }));
        prop_assert!(no_compute);
        let inverted: Vec<Gate> = back
            .iter()
            .rev()
            .map(|g| match *g {
                Gate::AndUncompute { a, b, target } => Gate::AndCompute { a, b, target },
                other => other,
            })
            .collect();
        prop_assert_eq!(inverted, gates);
    }

    #[test]
    fn circuit_text_round_trips(net in random_normalized()) {
        for (circuit, _) in [compile(&net, CompileOptions::default()).unwrap(), compile_bennett(&net).unwrap()] {
            let text = circuit.to_string();
            let back: Circuit = text.parse().unwrap();
            prop_assert_eq!(&back, &circuit);
            prop_assert_eq!(back.to_string(), text);
        }
    }

    #[test]
    fn cost_is_additive_over_concatenation(a in random_normalized(), seed in any::<u64>()) {
        let b = random_network(&RandomSpec { inputs: a.num_inputs() as u32, outputs: a.num_outputs(), ..RandomSpec::default() }, seed);
        let (ca, ka) = compile(&a, CompileOptions::default()).unwrap();
        let (cb, kb) = compile(&b, CompileOptions::default()).unwrap();
        let k = ca.concat(&cb).unwrap().cost();
        prop_assert_eq!(k.t_count, ka.t_count + kb.t_count);
        prop_assert_eq!(k.cnot_count, ka.cnot_count + kb.cnot_count);
        prop_assert_eq!(k.not_count, ka.not_count + kb.not_count);
        prop_assert_eq!(k.measurement_count, ka.measurement_count + kb.measurement_count);
        prop_assert_eq!(k.qubit_count, ka.qubit_count.max(kb.qubit_count));
    }
}
