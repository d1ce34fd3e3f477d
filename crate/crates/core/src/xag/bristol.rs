//! Reader for Bristol Fashion circuits (`AND`, `XOR`, `INV`, `EQ` gates).
//!
//! Input wires are numbered first, output wires are the last wires of the
//! circuit. `INV` is folded into complement bits and `EQ` aliases a wire, so
//! the result is a normalized XAG.

use super::{Signal, XagBuilder, XagError, XagNetwork};

pub fn parse_bristol(text: &str) -> Result<XagNetwork, XagError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (line, header) = lines.next().ok_or_else(|| XagError::syntax(0, "empty file"))?;
    let header = numbers(line, header)?;
    let [num_gates, num_wires] = header[..] else {
        return Err(XagError::syntax(line, "expected `<gates> <wires>`"));
    };

    let arity_line = |rec: Option<(usize, &str)>, what: &str| -> Result<Vec<usize>, XagError> {
        let (line, content) = rec.ok_or_else(|| XagError::syntax(0, format!("missing {what} line")))?;
        let values = numbers(line, content)?;
        match values.split_first() {
            Some((&count, rest)) if count == rest.len() => Ok(rest.to_vec()),
            _ => Err(XagError::ArityMismatch {
                line,
                message: format!("{what} line must start with the number of {what} values that follow"),
            }),
        }
    };
    let input_sizes = arity_line(lines.next(), "input")?;
    let output_sizes = arity_line(lines.next(), "output")?;
    let num_inputs: usize = input_sizes.iter().sum();
    let num_outputs: usize = output_sizes.iter().sum();
    if num_inputs + num_outputs > num_wires {
        return Err(XagError::syntax(line, "more input and output wires than wires"));
    }

    let mut builder = XagBuilder::new(num_inputs as u32);
    let mut wires: Vec<Option<Signal>> = vec![None; num_wires];
    for (i, w) in wires.iter_mut().take(num_inputs).enumerate() {
        *w = Some(builder.input(i as u32 + 1));
    }

    let mut gates_seen = 0;
    for (line, content) in lines {
        gates_seen += 1;
        if gates_seen > num_gates {
            return Err(XagError::syntax(line, format!("more gate lines than the {num_gates} declared")));
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let (tag, fields) = tokens.split_last().expect("line is non-empty");
        let fields = fields
            .iter()
            .map(|t| t.parse::<usize>().map_err(|_| XagError::syntax(line, format!("`{t}` is not an integer"))))
            .collect::<Result<Vec<_>, _>>()?;
        let (fan_in, fan_out) = match *tag {
            "AND" | "XOR" => (2, 1),
            "INV" | "EQ" => (1, 1),
            other => return Err(XagError::UnsupportedGate { line, tag: other.to_string() }),
        };
        if fields.len() != 2 + fan_in + fan_out || fields[0] != fan_in || fields[1] != fan_out {
            return Err(XagError::ArityMismatch { line, message: format!("{tag} takes {fan_in} input(s) and {fan_out} output") });
        }
        let read = |w: usize| -> Result<Signal, XagError> {
            wires.get(w).copied().flatten().ok_or(XagError::UndefinedWire { line, wire: w })
        };
        let value = match *tag {
            "AND" => {
                let (a, b) = (read(fields[2])?, read(fields[3])?);
                builder.and(a, b)
            }
            "XOR" => {
                let (a, b) = (read(fields[2])?, read(fields[3])?);
                builder.xor(a, b)
            }
            "INV" => !read(fields[2])?,
            _ => read(fields[2])?,
        };
        let target = fields[2 + fan_in];
        match wires.get_mut(target) {
            Some(slot @ None) => *slot = Some(value),
            Some(Some(_)) => return Err(XagError::syntax(line, format!("wire {target} assigned twice"))),
            None => return Err(XagError::syntax(line, format!("wire {target} exceeds the declared {num_wires} wires"))),
        }
    }
    if gates_seen != num_gates {
        return Err(XagError::syntax(0, format!("header declares {num_gates} gates but {gates_seen} gate lines were found")));
    }
    for w in num_wires - num_outputs..num_wires {
        let signal = wires[w].ok_or(XagError::UndefinedWire { line: 0, wire: w })?;
        builder.add_output(signal);
    }
    Ok(builder.build())
}

fn numbers(line: usize, content: &str) -> Result<Vec<usize>, XagError> {
    content
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| XagError::syntax(line, format!("`{t}` is not an integer"))))
        .collect()
}
