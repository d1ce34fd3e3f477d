//! Seeded random XAG generator for fuzzing and demos.
//!
//! Generated networks are normalized and every AND step has two distinct,
//! non-empty linear fan-ins, so they are accepted by the heuristic compiler.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GateKind, LtfiSet, NodeId, Output, Step, XagNetwork};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSpec {
    pub inputs: u32,
    pub steps: usize,
    pub outputs: usize,
    /// Probability that a step is an AND.
    pub and_ratio: f64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec { inputs: 6, steps: 20, outputs: 2, and_ratio: 0.4 }
    }
}

pub fn random_network(spec: &RandomSpec, seed: u64) -> XagNetwork {
    assert!(spec.inputs >= 2, "random networks need at least two inputs");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.inputs;
    let mut sets: Vec<LtfiSet> = vec![LtfiSet::default()];
    sets.extend((1..=n).map(|i| LtfiSet::singleton(NodeId::new(i))));
    let mut steps: Vec<Step> = Vec::with_capacity(spec.steps);
    let mut fanout = vec![0usize; n as usize + 1 + spec.steps];

    for _ in 0..spec.steps {
        let own = NodeId::new(n + 1 + steps.len() as u32);
        let kind = if rng.gen_bool(spec.and_ratio) { GateKind::And } else { GateKind::Xor };
        let mut chosen = None;
        for _ in 0..64 {
            let last = own.raw() - 1;
            // favour recent nodes so that networks have some depth
            let a = pick(&mut rng, last);
            let b = pick(&mut rng, last);
            if a == b {
                continue;
            }
            let (lo, hi) = (a.min(b), a.max(b));
            let (l1, l2) = (&sets[lo as usize], &sets[hi as usize]);
            if l1 == l2 {
                continue;
            }
            chosen = Some((NodeId::new(lo), NodeId::new(hi)));
            break;
        }
        let (left, right) = chosen.unwrap_or((NodeId::new(1), NodeId::new(2)));
        let step = match kind {
            GateKind::And => Step::and(left, right, rng.gen_bool(0.3), rng.gen_bool(0.3)),
            GateKind::Xor => Step::xor(left, right),
        };
        let set = match kind {
            GateKind::And => LtfiSet::singleton(own),
            GateKind::Xor => sets[left.index()].symmetric_difference(&sets[right.index()]),
        };
        fanout[left.index()] += 1;
        fanout[right.index()] += 1;
        sets.push(set);
        steps.push(step);
    }

    let total = n as usize + steps.len();
    let mut sinks: Vec<u32> = (1..=total as u32).rev().filter(|&i| fanout[i as usize] == 0).collect();
    sinks.truncate(spec.outputs);
    let mut outputs: Vec<Output> = sinks
        .into_iter()
        .map(|root| Output { root: NodeId::new(root), complemented: rng.gen_bool(0.25) })
        .collect();
    let all: Vec<u32> = (1..=total as u32).collect();
    while outputs.len() < spec.outputs {
        let root = *all.choose(&mut rng).expect("network has nodes");
        outputs.push(Output { root: NodeId::new(root), complemented: rng.gen_bool(0.25) });
    }
    XagNetwork::new(n, steps, outputs).expect("generator produces valid networks")
}

fn pick(rng: &mut ChaCha8Rng, last: u32) -> u32 {
    if rng.gen_bool(0.5) {
        let window = last.min(6);
        last - rng.gen_range(0..window)
    } else {
        rng.gen_range(1..=last)
    }
}
