//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};
use std::path::PathBuf;

use oracleforge::pebble::FinalMode;
use oracleforge::xag::{parse_bristol, parse_native, GateKind, XagNetwork};

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn fixture(name: &str) -> XagNetwork {
    let text = fixture_text(name);
    if name.ends_with(".bristol") {
        parse_bristol(&text).unwrap()
    } else {
        parse_native(&text).unwrap()
    }
}

/// Every shipped fixture, by file name relative to `fixtures/`.
pub fn all_fixtures() -> Vec<(String, XagNetwork)> {
    let mut names = Vec::new();
    for dir in ["", "bristol"] {
        let path = fixture_dir().join(dir);
        for entry in std::fs::read_dir(&path).unwrap() {
            let entry = entry.unwrap();
            if entry.file_type().unwrap().is_file() {
                let file = entry.file_name().into_string().unwrap();
                names.push(if dir.is_empty() { file } else { format!("{dir}/{file}") });
            }
        }
    }
    names.sort();
    names.into_iter().map(|n| (n.clone(), fixture(&n))).collect()
}

/// Reads `bits` bits of `x` starting at `offset`, least significant first.
pub fn word(x: &[bool], offset: usize, bits: usize) -> u64 {
    (0..bits).map(|i| (x[offset + i] as u64) << i).sum()
}

pub fn bits(value: u64, width: usize) -> Vec<bool> {
    (0..width).map(|i| value >> i & 1 == 1).collect()
}

/// Integer reference for the shipped Bristol samples.
pub fn bristol_reference(name: &str, x: &[bool]) -> Vec<bool> {
    match name {
        "bristol/adder2.bristol" => bits(word(x, 0, 2) + word(x, 2, 2), 3),
        "bristol/adder4.bristol" => bits(word(x, 0, 4) + word(x, 4, 4), 5),
        "bristol/less_than2.bristol" => vec![word(x, 0, 2) < word(x, 2, 2)],
        _ => panic!("no reference for {name}"),
    }
}

/// Brute-force search of the pebble game with one move per step.
///
/// Returns the fewest moves needed under `pebbles`, or `None` if the goal is
/// unreachable. Written from the game rules directly, without the encoder.
pub fn game_search(network: &XagNetwork, pebbles: usize, mode: FinalMode) -> Option<usize> {
    let n = network.num_inputs();
    assert!(network.num_nodes() <= 24, "state space too large");
    let mut targets: Vec<usize> = network.outputs().iter().map(|o| o.root.index()).filter(|&r| r > n).collect();
    targets.sort();
    targets.dedup();
    let bit = |i: usize| 1u32 << (i - 1);
    let initial: u32 = (1..=n).map(bit).sum();
    if pebbles < n {
        return None;
    }
    let goal_config = match mode {
        FinalMode::RoundTrip => initial,
        FinalMode::OutputsPebbled => initial | targets.iter().map(|&t| bit(t)).sum::<u32>(),
    };
    let all_visited = (1u32 << targets.len()) - 1;
    let visited_in = |config: u32| -> u32 {
        targets.iter().enumerate().filter(|(_, &t)| config & bit(t) != 0).map(|(k, _)| 1u32 << k).sum()
    };
    let is_goal = |config: u32, visited: u32| match mode {
        FinalMode::RoundTrip => config == goal_config && visited == all_visited,
        FinalMode::OutputsPebbled => config == goal_config,
    };

    let steps: Vec<(usize, GateKind, usize, usize)> =
        network.step_ids().map(|(id, s)| (id.index(), s.kind, s.left.index(), s.right.index())).collect();
    let has = |config: u32, i: usize| config & bit(i) != 0;

    let start = (initial, visited_in(initial));
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some(((config, visited), dist)) = queue.pop_front() {
        if is_goal(config, visited) {
            return Some(dist);
        }
        let mut next = Vec::new();
        for &(v, kind, j, k) in &steps {
            match kind {
                GateKind::And => {
                    if has(config, j) && has(config, k) {
                        next.push(config ^ bit(v));
                    }
                }
                GateKind::Xor => {
                    if !has(config, v) && has(config, j) && has(config, k) {
                        // the XOR overwrites one of its children
                        next.push((config | bit(v)) & !bit(j));
                        next.push((config | bit(v)) & !bit(k));
                    } else if has(config, v) && (has(config, j) != has(config, k)) {
                        // undo restores the overwritten child
                        next.push((config & !bit(v)) | bit(j) | bit(k));
                    }
                }
            }
        }
        for c in next {
            if c.count_ones() as usize > pebbles {
                continue;
            }
            let state = (c, visited | visited_in(c));
            if seen.insert(state) {
                queue.push_back((state, dist + 1));
            }
        }
    }
    None
}

/// Smallest bound in `n..=n+r` for which the game is winnable.
pub fn min_pebbles_search(network: &XagNetwork, mode: FinalMode) -> Option<(usize, usize)> {
    let n = network.num_inputs();
    (n..=network.num_nodes()).find_map(|l| game_search(network, l, mode).map(|d| (l, d)))
}
