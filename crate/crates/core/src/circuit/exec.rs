//! Branching executor: every measurement splits the run, corrections are applied
//! per branch, and postselected outcomes prune branches as soon as they occur.

use num_complex::Complex64;

use super::{Circuit, CircuitError};
use crate::gate::{GateKind, GateOp};
use crate::statevec::StateVector;

/// One surviving measurement history with its unnormalized state.
#[derive(Debug, Clone)]
pub struct Branch {
    pub outcomes: Vec<u8>,
    pub state: StateVector,
}

impl Branch {
    pub fn weight(&self) -> f64 {
        self.state.norm_sqr()
    }
}

/// An extra gate injected right after gate `after_gate` has executed.
#[derive(Debug, Clone, PartialEq)]
pub struct Fault {
    pub after_gate: usize,
    pub gate: GateOp,
}

impl Circuit {
    /// Places `inputs` on the input-role qubits (first input qubit is bit 0 of the
    /// input state); every other qubit starts in `|0>`.
    pub fn embed_inputs(&self, inputs: &StateVector) -> Result<StateVector, CircuitError> {
        let input_qubits = self.input_qubits();
        if inputs.num_qubits() != input_qubits.len() {
            return Err(CircuitError::InputSize { expected: input_qubits.len(), got: inputs.num_qubits() });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << self.num_qubits];
        for (x, a) in inputs.amplitudes().iter().enumerate() {
            let idx: usize =
                input_qubits.iter().enumerate().filter(|(b, _)| x >> b & 1 == 1).map(|(_, &q)| 1 << q).sum();
            amps[idx] = *a;
        }
        Ok(StateVector::from_amplitudes(amps)?)
    }
}

/// Runs `circuit` from a full-register initial state.
pub fn run(circuit: &Circuit, initial: StateVector) -> Result<Vec<Branch>, CircuitError> {
    run_with_faults(circuit, initial, &[])
}

/// Runs `circuit` with `faults` spliced in. Branches whose weight is exactly zero
/// are dropped.
pub fn run_with_faults(circuit: &Circuit, initial: StateVector, faults: &[Fault]) -> Result<Vec<Branch>, CircuitError> {
    if initial.num_qubits() != circuit.num_qubits() {
        return Err(CircuitError::InputSize { expected: circuit.num_qubits(), got: initial.num_qubits() });
    }
    let mut branches = vec![Branch { outcomes: Vec::new(), state: initial }];
    let mut measured = 0usize;
    for (index, gate) in circuit.gates().iter().enumerate() {
        if gate.kind == GateKind::Measure {
            let id = crate::gate::MeasureId(measured);
            measured += 1;
            let wanted = circuit.postselection().get(&id).copied();
            let mut next = Vec::with_capacity(branches.len() * 2);
            for b in branches {
                let [(p0, s0), (p1, s1)] = b.state.measure_branch(gate.qubits[0])?;
                for (outcome, p, s) in [(0u8, p0, s0), (1u8, p1, s1)] {
                    if p == 0.0 || wanted.is_some_and(|w| w != outcome) {
                        continue;
                    }
                    let mut outcomes = b.outcomes.clone();
                    outcomes.push(outcome);
                    next.push(Branch { outcomes, state: s });
                }
            }
            branches = next;
        } else {
            for b in &mut branches {
                let active = gate.condition.is_none_or(|m| b.outcomes[m.0] == 1);
                if active {
                    b.state.apply(gate)?;
                }
            }
        }
        for f in faults.iter().filter(|f| f.after_gate == index) {
            for b in &mut branches {
                b.state.apply(&f.gate)?;
            }
        }
    }
    Ok(branches)
}
