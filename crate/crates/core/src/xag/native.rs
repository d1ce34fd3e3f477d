//! Line-based native format.
//!
//! ```text
//! .i 3
//! .o 1
//! XOR 1 2
//! XOR 2 3
//! AND 4 5 0 0
//! XOR 2 6
//! OUT 7 0
//! ```
//!
//! Step lines appear in index order starting at `n + 1`. `XOR` lines may carry
//! two optional complement bits; they are dropped by normalization.

use std::fmt::Write as _;

use super::{GateKind, NodeId, Output, Step, XagError, XagNetwork};

pub fn parse_native(text: &str) -> Result<XagNetwork, XagError> {
    let mut records = text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("").trim();
        (!content.is_empty()).then(|| (i + 1, content))
    });

    let header = |rec: Option<(usize, &str)>, tag: &str| -> Result<u32, XagError> {
        let (line, content) = rec.ok_or_else(|| XagError::syntax(0, format!("missing `{tag}` header")))?;
        let mut parts = content.split_whitespace();
        if parts.next() != Some(tag) {
            return Err(XagError::syntax(line, format!("expected `{tag} <count>`")));
        }
        let value = parse_u32(line, parts.next())?;
        if parts.next().is_some() {
            return Err(XagError::syntax(line, "trailing tokens"));
        }
        Ok(value)
    };
    let inputs = header(records.next(), ".i")?;
    let expected_outputs = header(records.next(), ".o")? as usize;

    let mut steps = Vec::new();
    let mut outputs = Vec::new();
    for (line, content) in records {
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let own = NodeId::new(inputs + 1 + steps.len() as u32);
        match tokens[0] {
            "AND" | "XOR" => {
                if !outputs.is_empty() {
                    return Err(XagError::syntax(line, "step after output lines"));
                }
                let kind = if tokens[0] == "AND" { GateKind::And } else { GateKind::Xor };
                let (left_pol, right_pol) = match (kind, tokens.len()) {
                    (GateKind::And, 5) | (GateKind::Xor, 5) => (parse_bit(line, tokens[3])?, parse_bit(line, tokens[4])?),
                    (GateKind::Xor, 3) => (false, false),
                    _ => return Err(XagError::syntax(line, format!("wrong number of fields for {}", tokens[0]))),
                };
                let left = NodeId::new(parse_u32(line, tokens.get(1).copied())?);
                let right = NodeId::new(parse_u32(line, tokens.get(2).copied())?);
                for child in [left, right] {
                    if child >= own {
                        return Err(at(line, XagError::DanglingReference { node: own, child }));
                    }
                }
                if left >= right {
                    return Err(at(line, XagError::OrderViolation { node: own, left, right }));
                }
                steps.push(Step { kind, left, right, left_pol, right_pol });
            }
            "OUT" => {
                if tokens.len() != 3 {
                    return Err(XagError::syntax(line, "expected `OUT <root> <c>`"));
                }
                let root = NodeId::new(parse_u32(line, Some(tokens[1]))?);
                if root.index() > inputs as usize + steps.len() {
                    return Err(at(line, XagError::DanglingOutput { index: outputs.len(), root }));
                }
                outputs.push(Output { root, complemented: parse_bit(line, tokens[2])? });
            }
            other => return Err(XagError::syntax(line, format!("unknown record `{other}`"))),
        }
    }
    if outputs.len() != expected_outputs {
        return Err(XagError::syntax(
            0,
            format!("header declares {expected_outputs} outputs but {} OUT lines were found", outputs.len()),
        ));
    }
    XagNetwork::new(inputs, steps, outputs)
}

pub fn serialize_native(network: &XagNetwork) -> String {
    let mut out = String::new();
    writeln!(out, ".i {}", network.num_inputs()).unwrap();
    writeln!(out, ".o {}", network.num_outputs()).unwrap();
    for step in network.steps() {
        match step.kind {
            GateKind::And => writeln!(
                out,
                "AND {} {} {} {}",
                step.left.raw(),
                step.right.raw(),
                step.left_pol as u8,
                step.right_pol as u8
            ),
            GateKind::Xor if step.left_pol || step.right_pol => writeln!(
                out,
                "XOR {} {} {} {}",
                step.left.raw(),
                step.right.raw(),
                step.left_pol as u8,
                step.right_pol as u8
            ),
            GateKind::Xor => writeln!(out, "XOR {} {}", step.left.raw(), step.right.raw()),
        }
        .unwrap();
    }
    for o in network.outputs() {
        writeln!(out, "OUT {} {}", o.root.raw(), o.complemented as u8).unwrap();
    }
    out
}

fn at(line: usize, err: XagError) -> XagError {
    XagError::Located { line, kind: Box::new(err) }
}

fn parse_u32(line: usize, token: Option<&str>) -> Result<u32, XagError> {
    let token = token.ok_or_else(|| XagError::syntax(line, "missing field"))?;
    token.parse().map_err(|_| XagError::syntax(line, format!("`{token}` is not a non-negative integer")))
}

fn parse_bit(line: usize, token: &str) -> Result<bool, XagError> {
    match token {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(XagError::syntax(line, format!("`{token}` is not a bit"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xag::majority;

    const MAJORITY: &str = ".i 3\n.o 1\nXOR 1 2\nXOR 2 3\nAND 4 5 0 0\nXOR 2 6\nOUT 7 0\n";

    #[test]
    fn parses_majority_fixture() {
        let net = parse_native(MAJORITY).unwrap();
        assert_eq!(net, majority());
        assert_eq!((net.num_inputs(), net.num_steps(), net.and_count()), (3, 4, 1));
        assert_eq!(serialize_native(&net), MAJORITY);
    }

    #[test]
    fn zero_step_identity() {
        let net = parse_native(".i 2\n.o 1\nOUT 1 0\n").unwrap();
        assert_eq!(net.num_steps(), 0);
        for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
            assert_eq!(net.evaluate(&[a, b]), vec![a]);
        }
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# majority\n.i 3  # inputs\n.o 1\n\nXOR 1 2\nXOR 2 3\nAND 4 5 0 0\nXOR 2 6\nOUT 7 0 # root\n";
        assert_eq!(parse_native(text).unwrap(), majority());
    }

    #[test]
    fn forward_reference_is_dangling() {
        let err = parse_native(".i 4\n.o 1\nXOR 1 6\nXOR 1 2\nOUT 5 0\n").unwrap_err();
        match err {
            XagError::Located { line, kind } => {
                assert_eq!(line, 3);
                assert!(matches!(*kind, XagError::DanglingReference { .. }));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let err = parse_native(".i 2\n.o 1\nNAND 1 2\nOUT 3 0\n").unwrap_err();
        assert!(matches!(err, XagError::Syntax { line: 3, .. }));
        let err = parse_native(".i 2\n.o 1\nAND 1 2 0\nOUT 3 0\n").unwrap_err();
        assert!(matches!(err, XagError::Syntax { line: 3, .. }));
        let err = parse_native(".i 2\n.o 2\nAND 1 2 0 1\nOUT 3 0\n").unwrap_err();
        assert!(matches!(err, XagError::Syntax { .. }));
        let err = parse_native(".i 2\n.o 1\nXOR 2 1\nOUT 3 0\n").unwrap_err();
        assert!(matches!(err, XagError::Located { .. }));
    }
}
