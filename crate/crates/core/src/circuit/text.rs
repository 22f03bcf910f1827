//! Line-oriented text format.
//!
//! ```text
//! # qubits 4
//! # role 0 parity
//! # role 1 input
//! # block resource 3 7
//! # pivot 9
//! # postselect m1 0
//! H 0
//! CR 0 2 0.7853981633974483
//! MEASURE 3
//! Z 2 cond=m0
//! ```
//!
//! Header lines start with `#`; any other `#` line is a comment. Angles are printed
//! with the shortest representation that round-trips exactly.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{Circuit, CircuitError, QubitRole};
use crate::gate::{GateKind, GateOp, MeasureId};

pub(crate) fn write_circuit(c: &Circuit) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# qubits {}", c.num_qubits);
    for (q, r) in c.roles.iter().enumerate() {
        let _ = writeln!(out, "# role {q} {}", r.name());
    }
    if let Some(b) = &c.resource_block {
        let _ = writeln!(out, "# block resource {} {}", b.start, b.end);
    }
    for p in &c.pivots {
        let _ = writeln!(out, "# pivot {p}");
    }
    for (m, v) in &c.postselect {
        let _ = writeln!(out, "# postselect {m} {v}");
    }
    for g in &c.gates {
        out.push_str(g.kind.name());
        for q in &g.qubits {
            let _ = write!(out, " {q}");
        }
        if let Some(a) = g.kind.angle() {
            let _ = write!(out, " {a:?}");
        }
        if let Some(m) = g.condition {
            let _ = write!(out, " cond={m}");
        }
        out.push('\n');
    }
    out
}

fn parse_measure_id(s: &str) -> Option<MeasureId> {
    s.strip_prefix('m')?.parse().ok().map(MeasureId)
}

/// Parses the text format back into a validated [`Circuit`].
pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitError> {
    let mut num_qubits: Option<usize> = None;
    let mut roles: BTreeMap<usize, QubitRole> = BTreeMap::new();
    let mut gates = Vec::new();
    let mut postselect = BTreeMap::new();
    let mut resource_block = None;
    let mut pivots = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |reason: &str| CircuitError::Parse { line: line_no, reason: reason.to_string() };
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            let words: Vec<&str> = header.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| err(&format!("bad number '{s}'")));
            match words.as_slice() {
                ["qubits", n] => num_qubits = Some(num(n)?),
                ["role", q, r] => {
                    let role = QubitRole::from_name(r).ok_or_else(|| err(&format!("unknown role '{r}'")))?;
                    roles.insert(num(q)?, role);
                }
                ["block", "resource", s, e] => resource_block = Some(num(s)?..num(e)?),
                ["pivot", p] => pivots.push(num(p)?),
                ["postselect", m, v] => {
                    let id = parse_measure_id(m).ok_or_else(|| err(&format!("bad measurement id '{m}'")))?;
                    let v: u8 = match *v {
                        "0" => 0,
                        "1" => 1,
                        _ => return Err(err("postselected value must be 0 or 1")),
                    };
                    postselect.insert(id, v);
                }
                _ => {}
            }
            continue;
        }
        let mut words = line.split_whitespace();
        let name = words.next().ok_or_else(|| err("empty gate line"))?;
        let mut qubits = Vec::new();
        let mut angle = None;
        let mut condition = None;
        for w in words {
            if let Some(m) = w.strip_prefix("cond=") {
                condition = Some(parse_measure_id(m).ok_or_else(|| err(&format!("bad condition '{w}'")))?);
            } else if let Ok(q) = w.parse::<usize>() {
                if angle.is_some() {
                    return Err(err("qubit index after angle"));
                }
                qubits.push(q);
            } else if let Ok(a) = w.parse::<f64>() {
                angle = Some(a);
            } else {
                return Err(err(&format!("unrecognized token '{w}'")));
            }
        }
        let mut kind = GateKind::from_name(name, angle);
        // integral angles such as "1" parse as qubit indices; take the last one back
        if kind.is_none() && angle.is_none() {
            if let Some(&last) = qubits.last() {
                if let Some(k) = GateKind::from_name(name, Some(last as f64)) {
                    qubits.pop();
                    kind = Some(k);
                }
            }
        }
        let kind = kind.ok_or_else(|| err(&format!("unknown gate '{name}' or missing/extra angle")))?;
        gates.push(GateOp { kind, qubits, condition });
    }

    let num_qubits = num_qubits.ok_or(CircuitError::Parse { line: 0, reason: "missing '# qubits' header".into() })?;
    let roles: Vec<QubitRole> = (0..num_qubits).map(|q| roles.get(&q).copied().unwrap_or(QubitRole::Input)).collect();
    let circuit = Circuit { num_qubits, gates, roles, postselect, resource_block, pivots };
    circuit.validate()?;
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::builders::{build_full_protocol, build_gadget_uj, build_parity_check_decomposed};

    #[test]
    fn round_trips_builders() {
        let circuits = [
            build_full_protocol(2, &[0.3, -1.1]).unwrap().circuit,
            build_gadget_uj(2, 2, std::f64::consts::PI / 8.0).unwrap(),
            build_parity_check_decomposed(1, 0.1 + 0.2).unwrap(),
        ];
        for c in circuits {
            let text = c.to_text();
            let back = parse_circuit(&text).unwrap();
            assert_eq!(back, c);
            assert_eq!(back.to_text(), text);
        }
    }

    #[test]
    fn integral_angles_parse() {
        let c = parse_circuit("# qubits 1\nR 0 1\n").unwrap();
        assert_eq!(c.gates()[0].kind, GateKind::R(1.0));
        assert_eq!(c.gates()[0].qubits, vec![0]);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(matches!(parse_circuit("H 0\n"), Err(CircuitError::Parse { line: 0, .. })));
        assert!(matches!(parse_circuit("# qubits 2\nFOO 0\n"), Err(CircuitError::Parse { line: 2, .. })));
        assert!(matches!(parse_circuit("# qubits 2\nH 0 x\n"), Err(CircuitError::Parse { line: 2, .. })));
        assert!(matches!(parse_circuit("# qubits 2\nH 5\n"), Err(CircuitError::InvalidGate { .. })));
        assert!(matches!(parse_circuit("# qubits 2\n# role 0 wizard\n"), Err(CircuitError::Parse { line: 2, .. })));
    }
}
