//! Circuit intermediate representation.
//!
//! A [`Circuit`] is an ordered gate list over a register whose qubits all start in
//! `|0>`, except those declared as inputs, which the caller supplies. Measurements
//! are numbered in order of appearance (`m0`, `m1`, ...). A measurement is either
//! postselected (the run is discarded unless it returns the declared value) or used
//! as the condition of later correction gates, never both.

mod builders;
mod channel;
mod exec;
mod identities;
mod text;

use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gate::{GateKind, GateOp, MeasureId};
use crate::statevec::StateError;

pub use builders::{
    build_full_protocol, build_gadget_uj, build_parity_check_decomposed, build_parity_check_decomposed_multi,
    build_parity_check_direct, build_parity_check_direct_multi, build_tilde_v, build_tilde_v_compressed,
    ProtocolCircuit,
};
pub use channel::{circuit_unitary, Channel};
pub use exec::{run, run_with_faults, Branch, Fault};
pub use identities::{
    kraus_k, random_angles, u_j_matrix, verify_all, verify_identity, Identity, IdentityReport, IDENTITY_TOLERANCE,
    MAX_DENSE_PAIRS,
};
pub use text::parse_circuit;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("gate {index}: {reason}")]
    InvalidGate { index: usize, reason: String },
    #[error("measurement {0} is both postselected and used as a correction condition")]
    PostselectedCondition(MeasureId),
    #[error("postselection refers to unknown measurement {0}")]
    UnknownMeasurement(MeasureId),
    #[error("roles list has {got} entries for {expected} qubits")]
    RoleCount { expected: usize, got: usize },
    #[error("N must be at least 1")]
    NoPairs,
    #[error("expected {expected} angles, got {got}")]
    AngleCount { expected: usize, got: usize },
    #[error("pair index j={j} outside 1..={n}")]
    PairIndex { j: usize, n: usize },
    #[error("dense comparison limited to N <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("input state has {got} qubits, circuit has {expected} inputs")]
    InputSize { expected: usize, got: usize },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QubitRole {
    Input,
    ParityAncilla,
    GadgetAncilla,
}

impl QubitRole {
    pub fn name(&self) -> &'static str {
        match self {
            QubitRole::Input => "input",
            QubitRole::ParityAncilla => "parity",
            QubitRole::GadgetAncilla => "gadget",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "input" => Some(QubitRole::Input),
            "parity" => Some(QubitRole::ParityAncilla),
            "gadget" => Some(QubitRole::GadgetAncilla),
            _ => None,
        }
    }
}

/// Mapping between protocol labels and register indices for `N` input pairs.
///
/// Labels follow the protocol's numbering: `0` is the parity ancilla, `1..=2N` are
/// the inputs (pair `j` is `2j-1, 2j`), and `-1..=-N` are the gadget ancillas.
/// Register index equals the label for `0..=2N`; gadget `-j` sits at `2N + j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitLayout {
    pub n_pairs: usize,
}

impl QubitLayout {
    pub fn new(n_pairs: usize) -> Self {
        QubitLayout { n_pairs }
    }

    pub const PARITY: usize = 0;

    pub fn input(&self, label: usize) -> usize {
        assert!((1..=2 * self.n_pairs).contains(&label), "input label {label} out of range");
        label
    }

    pub fn odd(&self, j: usize) -> usize {
        self.input(2 * j - 1)
    }

    pub fn even(&self, j: usize) -> usize {
        self.input(2 * j)
    }

    pub fn gadget(&self, j: usize) -> usize {
        assert!((1..=self.n_pairs).contains(&j), "gadget index {j} out of range");
        2 * self.n_pairs + j
    }

    /// Register index for a signed protocol label.
    pub fn machine(&self, label: i64) -> Option<usize> {
        let n = self.n_pairs as i64;
        match label {
            l if (0..=2 * n).contains(&l) => Some(l as usize),
            l if (-n..0).contains(&l) => Some((2 * n - l) as usize),
            _ => None,
        }
    }

    /// Inverse of [`QubitLayout::machine`].
    pub fn label(&self, index: usize) -> Option<i64> {
        let n = self.n_pairs;
        match index {
            i if i <= 2 * n => Some(i as i64),
            i if i <= 3 * n => Some(-((i - 2 * n) as i64)),
            _ => None,
        }
    }

    pub fn inputs(&self) -> Vec<usize> {
        (1..=2 * self.n_pairs).collect()
    }

    pub fn total_qubits(&self) -> usize {
        3 * self.n_pairs + 1
    }
}

/// Ordered gate list plus the metadata the simulator needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<GateOp>,
    roles: Vec<QubitRole>,
    postselect: BTreeMap<MeasureId, u8>,
    resource_block: Option<Range<usize>>,
    pivots: Vec<usize>,
}

impl Circuit {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn roles(&self) -> &[QubitRole] {
        &self.roles
    }

    pub fn postselection(&self) -> &BTreeMap<MeasureId, u8> {
        &self.postselect
    }

    /// Gate index range of the tagged resource (`CCZ_#N`) block, if any.
    pub fn resource_block(&self) -> Option<Range<usize>> {
        self.resource_block.clone()
    }

    /// Gate indices of the pivotal `R(2t)` rotations, one per gadget in order.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Qubits with the input role, in register order.
    pub fn input_qubits(&self) -> Vec<usize> {
        self.roles.iter().enumerate().filter(|(_, r)| **r == QubitRole::Input).map(|(q, _)| q).collect()
    }

    /// Qubits touched by the resource block, ascending.
    pub fn resource_support(&self) -> Vec<usize> {
        let Some(block) = &self.resource_block else { return Vec::new() };
        let mut qs: Vec<usize> = self.gates[block.clone()].iter().flat_map(|g| g.qubits.iter().copied()).collect();
        qs.sort_unstable();
        qs.dedup();
        qs
    }

    pub fn num_measurements(&self) -> usize {
        self.gates.iter().filter(|g| g.kind == GateKind::Measure).count()
    }

    pub fn count_kind(&self, name: &str) -> usize {
        self.gates.iter().filter(|g| g.kind.name() == name).count()
    }

    /// Measurement id of each measurement gate, keyed by gate index.
    pub fn measurement_ids(&self) -> BTreeMap<usize, MeasureId> {
        self.gates
            .iter()
            .enumerate()
            .filter(|(_, g)| g.kind == GateKind::Measure)
            .enumerate()
            .map(|(k, (i, _))| (i, MeasureId(k)))
            .collect()
    }

    /// Checks arities, ranges, condition ordering and the postselection/correction split.
    pub fn validate(&self) -> Result<(), CircuitError> {
        if self.roles.len() != self.num_qubits {
            return Err(CircuitError::RoleCount { expected: self.num_qubits, got: self.roles.len() });
        }
        let mut seen = 0usize;
        let mut conditions = Vec::new();
        for (index, g) in self.gates.iter().enumerate() {
            let bad = |reason: String| CircuitError::InvalidGate { index, reason };
            if g.qubits.len() != g.kind.arity() {
                return Err(bad(format!("{} needs {} qubits", g.kind.name(), g.kind.arity())));
            }
            for (k, &q) in g.qubits.iter().enumerate() {
                if q >= self.num_qubits {
                    return Err(bad(format!("qubit {q} out of range")));
                }
                if g.qubits[..k].contains(&q) {
                    return Err(bad(format!("qubit {q} repeated")));
                }
            }
            if let Some(m) = g.condition {
                if m.0 >= seen {
                    return Err(bad(format!("condition {m} does not precede the gate")));
                }
                if g.kind == GateKind::Measure {
                    return Err(bad("measurements cannot be conditioned".into()));
                }
                conditions.push(m);
            }
            if g.kind == GateKind::Measure {
                seen += 1;
            }
        }
        for &m in self.postselect.keys() {
            if m.0 >= seen {
                return Err(CircuitError::UnknownMeasurement(m));
            }
            if conditions.contains(&m) {
                return Err(CircuitError::PostselectedCondition(m));
            }
        }
        if let Some(b) = &self.resource_block {
            if b.end > self.gates.len() || b.start > b.end {
                return Err(CircuitError::InvalidGate { index: b.start, reason: "bad resource block".into() });
            }
        }
        for &p in &self.pivots {
            if p >= self.gates.len() {
                return Err(CircuitError::InvalidGate { index: p, reason: "pivot index out of range".into() });
            }
        }
        Ok(())
    }

    /// Serializes to the line-oriented text format.
    pub fn to_text(&self) -> String {
        text::write_circuit(self)
    }
}

/// Incremental circuit construction.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    circuit: Circuit,
    measurements: usize,
    block_start: Option<usize>,
}

impl CircuitBuilder {
    pub fn new(roles: Vec<QubitRole>) -> Self {
        CircuitBuilder {
            circuit: Circuit {
                num_qubits: roles.len(),
                gates: Vec::new(),
                roles,
                postselect: BTreeMap::new(),
                resource_block: None,
                pivots: Vec::new(),
            },
            measurements: 0,
            block_start: None,
        }
    }

    pub fn push(&mut self, gate: GateOp) -> &mut Self {
        self.circuit.gates.push(gate);
        self
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = GateOp>) -> &mut Self {
        self.circuit.gates.extend(gates);
        self
    }

    pub fn measure(&mut self, qubit: usize) -> MeasureId {
        self.circuit.gates.push(GateOp::measure(qubit));
        let id = MeasureId(self.measurements);
        self.measurements += 1;
        id
    }

    pub fn postselect(&mut self, m: MeasureId, outcome: u8) -> &mut Self {
        self.circuit.postselect.insert(m, outcome);
        self
    }

    /// Pushes a gate and records it as a pivot site.
    pub fn pivot(&mut self, gate: GateOp) -> &mut Self {
        self.circuit.pivots.push(self.circuit.gates.len());
        self.circuit.gates.push(gate);
        self
    }

    pub fn begin_resource_block(&mut self) -> &mut Self {
        self.block_start = Some(self.circuit.gates.len());
        self
    }

    pub fn end_resource_block(&mut self) -> &mut Self {
        let start = self.block_start.take().expect("resource block was not opened");
        self.circuit.resource_block = Some(start..self.circuit.gates.len());
        self
    }

    pub fn build(self) -> Result<Circuit, CircuitError> {
        self.circuit.validate()?;
        Ok(self.circuit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_a_bijection() {
        for n in 1..=4 {
            let layout = QubitLayout::new(n);
            let mut seen = vec![false; layout.total_qubits()];
            for label in -(n as i64)..=(2 * n as i64) {
                let m = layout.machine(label).unwrap();
                assert!(!seen[m]);
                seen[m] = true;
                assert_eq!(layout.label(m), Some(label));
            }
            assert!(seen.iter().all(|&s| s));
            assert_eq!(layout.machine(2 * n as i64 + 1), None);
            assert_eq!(layout.machine(-(n as i64) - 1), None);
            for j in 1..=n {
                assert_eq!(layout.machine(-(j as i64)), Some(layout.gadget(j)));
                assert_eq!(layout.machine(2 * j as i64 - 1), Some(layout.odd(j)));
                assert_eq!(layout.machine(2 * j as i64), Some(layout.even(j)));
            }
        }
    }

    #[test]
    fn validation_catches_bad_circuits() {
        let roles = vec![QubitRole::ParityAncilla, QubitRole::Input];
        let mut b = CircuitBuilder::new(roles.clone());
        b.push(GateOp::x(1).conditioned(MeasureId(0)));
        b.measure(0);
        assert!(matches!(b.build(), Err(CircuitError::InvalidGate { index: 0, .. })));

        let mut b = CircuitBuilder::new(roles.clone());
        let m = b.measure(0);
        b.push(GateOp::x(1).conditioned(m));
        b.postselect(m, 0);
        assert_eq!(b.build(), Err(CircuitError::PostselectedCondition(m)));

        let mut b = CircuitBuilder::new(roles.clone());
        b.postselect(MeasureId(3), 0);
        assert_eq!(b.build(), Err(CircuitError::UnknownMeasurement(MeasureId(3))));

        let mut b = CircuitBuilder::new(roles);
        b.push(GateOp::cx(0, 2));
        assert!(matches!(b.build(), Err(CircuitError::InvalidGate { .. })));
    }
}
