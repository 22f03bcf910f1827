//! Builders for the parity-check circuits: the controlled-W form, its CNOT plus
//! phase-gate decomposition, the single-pair `U_j` gadget, the two forms of the
//! controlled-`M_j` layer, and the full step-two protocol.
//!
//! All builders share [`QubitLayout`]. Within pair `j`, the open-controlled half
//! is the even input `2j` and the closed-controlled half is the odd input `2j-1`,
//! which is the assignment the phase-gate circuit `V = prod_j U_j` implies.

use super::{Circuit, CircuitBuilder, CircuitError, QubitLayout, QubitRole};
use crate::gate::GateOp;

fn check_angles(n: usize, thetas: &[f64]) -> Result<(), CircuitError> {
    if n == 0 {
        return Err(CircuitError::NoPairs);
    }
    if thetas.len() != n {
        return Err(CircuitError::AngleCount { expected: n, got: thetas.len() });
    }
    Ok(())
}

fn small_roles(n: usize) -> Vec<QubitRole> {
    let mut roles = vec![QubitRole::Input; 2 * n + 1];
    roles[QubitLayout::PARITY] = QubitRole::ParityAncilla;
    roles
}

fn full_roles(n: usize) -> Vec<QubitRole> {
    let mut roles = small_roles(n);
    roles.extend(std::iter::repeat_n(QubitRole::GadgetAncilla, n));
    roles
}

/// Parity check built from (open-)controlled `W(t)` gates on `2N+1` qubits.
pub fn build_parity_check_direct(n: usize, theta: f64) -> Result<Circuit, CircuitError> {
    build_parity_check_direct_multi(&vec![theta; n])
}

/// As [`build_parity_check_direct`] with angle `thetas[j-1]` on pair `j`.
pub fn build_parity_check_direct_multi(thetas: &[f64]) -> Result<Circuit, CircuitError> {
    let n = thetas.len();
    check_angles(n, thetas)?;
    let layout = QubitLayout::new(n);
    let p = QubitLayout::PARITY;
    let mut b = CircuitBuilder::new(small_roles(n));
    b.push(GateOp::h(p));
    for (j, &t) in (1..=n).zip(thetas) {
        b.push(GateOp::ocw(p, layout.even(j), t));
        b.push(GateOp::cw(p, layout.odd(j), t));
    }
    b.push(GateOp::h(p));
    let m = b.measure(p);
    b.postselect(m, 0);
    b.build()
}

/// Parity check with each controlled `W` split into CNOTs followed by the
/// diagonal circuit `V`.
pub fn build_parity_check_decomposed(n: usize, theta: f64) -> Result<Circuit, CircuitError> {
    build_parity_check_decomposed_multi(&vec![theta; n])
}

pub fn build_parity_check_decomposed_multi(thetas: &[f64]) -> Result<Circuit, CircuitError> {
    let n = thetas.len();
    check_angles(n, thetas)?;
    let layout = QubitLayout::new(n);
    let p = QubitLayout::PARITY;
    let mut b = CircuitBuilder::new(small_roles(n));
    b.push(GateOp::h(p));
    push_cnot_layer(&mut b, layout);
    // U_j = |0><0|_0 R_{2j}(2t) + |1><1|_0 R_{2j-1}(2t)
    for (j, &t) in (1..=n).zip(thetas) {
        b.push(GateOp::x(p)).push(GateOp::cr(p, layout.even(j), 2.0 * t)).push(GateOp::x(p)).push(GateOp::cr(
            p,
            layout.odd(j),
            2.0 * t,
        ));
    }
    b.push(GateOp::h(p));
    let m = b.measure(p);
    b.postselect(m, 0);
    b.build()
}

/// The X part of the controlled-W gates: `X_{2j}`, `CX_{0,2j-1}`, `CX_{0,2j}`.
fn push_cnot_layer(b: &mut CircuitBuilder, layout: QubitLayout) {
    let p = QubitLayout::PARITY;
    for j in 1..=layout.n_pairs {
        b.push(GateOp::x(layout.even(j))).push(GateOp::cx(p, layout.odd(j))).push(GateOp::cx(p, layout.even(j)));
    }
}

/// `M_j = Z_{2j} CZ_{0,2j} CZ_{0,2j-1}`, optionally conditioned on a measurement.
fn m_j_gates(layout: QubitLayout, j: usize) -> [GateOp; 3] {
    let p = QubitLayout::PARITY;
    [GateOp::z(layout.even(j)), GateOp::cz(p, layout.even(j)), GateOp::cz(p, layout.odd(j))]
}

/// Controlled-`M_j` from gadget ancilla `-j`.
fn controlled_m_j(layout: QubitLayout, j: usize) -> [GateOp; 3] {
    let (a, p) = (layout.gadget(j), QubitLayout::PARITY);
    [GateOp::cz(a, layout.even(j)), GateOp::ccz(a, p, layout.even(j)), GateOp::ccz(a, p, layout.odd(j))]
}

/// Pivot rotation `H R(2t) H`, measurement and `M_j` correction for gadget `j`.
fn push_gadget_tail(b: &mut CircuitBuilder, layout: QubitLayout, j: usize, theta: f64) {
    let a = layout.gadget(j);
    b.push(GateOp::h(a));
    b.pivot(GateOp::r(a, 2.0 * theta));
    b.push(GateOp::h(a));
    let m = b.measure(a);
    for g in m_j_gates(layout, j) {
        b.push(g.conditioned(m));
    }
}

/// Gadget implementing `U_j` on qubits `0, 2j-1, 2j` of an `N`-pair layout, using
/// gadget ancilla `-j`. The other qubits are left idle.
pub fn build_gadget_uj(n: usize, j: usize, theta: f64) -> Result<Circuit, CircuitError> {
    if n == 0 {
        return Err(CircuitError::NoPairs);
    }
    if !(1..=n).contains(&j) {
        return Err(CircuitError::PairIndex { j, n });
    }
    let layout = QubitLayout::new(n);
    let mut b = CircuitBuilder::new(full_roles(n));
    b.push(GateOp::h(layout.gadget(j)));
    b.extend(controlled_m_j(layout, j));
    push_gadget_tail(&mut b, layout, j, theta);
    b.build()
}

/// `prod_j CZ_{-j,2j} CCZ_{-j,0,2j} CCZ_{-j,0,2j-1}`: 2N CCZ gates.
pub fn build_tilde_v(n: usize) -> Result<Circuit, CircuitError> {
    if n == 0 {
        return Err(CircuitError::NoPairs);
    }
    let layout = QubitLayout::new(n);
    let mut b = CircuitBuilder::new(full_roles(n));
    for j in 1..=n {
        b.extend(controlled_m_j(layout, j));
    }
    b.build()
}

fn push_compressed_tilde_v(b: &mut CircuitBuilder, layout: QubitLayout) {
    let p = QubitLayout::PARITY;
    let n = layout.n_pairs;
    for j in 1..=n {
        b.push(GateOp::cz(layout.gadget(j), layout.even(j)));
    }
    for j in 1..=n {
        b.push(GateOp::cx(layout.even(j), layout.odd(j)));
    }
    b.begin_resource_block();
    for j in 1..=n {
        b.push(GateOp::ccz(layout.gadget(j), p, layout.odd(j)));
    }
    b.end_resource_block();
    for j in 1..=n {
        b.push(GateOp::cx(layout.even(j), layout.odd(j)));
    }
}

/// Same unitary as [`build_tilde_v`] with only N CCZ gates, all sharing qubit 0.
/// The CCZ layer is tagged as the resource block.
pub fn build_tilde_v_compressed(n: usize) -> Result<Circuit, CircuitError> {
    if n == 0 {
        return Err(CircuitError::NoPairs);
    }
    let layout = QubitLayout::new(n);
    let mut b = CircuitBuilder::new(full_roles(n));
    push_compressed_tilde_v(&mut b, layout);
    b.build()
}

/// The full step-two circuit together with its per-pair angles.
#[derive(Debug, Clone)]
pub struct ProtocolCircuit {
    pub circuit: Circuit,
    pub layout: QubitLayout,
    pub thetas: Vec<f64>,
}

impl ProtocolCircuit {
    pub fn n_pairs(&self) -> usize {
        self.layout.n_pairs
    }

    /// Angle of the magic state expected on input label `label` (1-based).
    pub fn input_theta(&self, label: usize) -> f64 {
        self.thetas[(label - 1) / 2]
    }
}

/// Full step-two protocol on `3N+1` qubits: parity ancilla and gadget ancillas in
/// `|+>`, the CNOT layer, the compressed controlled-`M_j` layer with its tagged
/// `CCZ_#N` block, one corrected gadget per pair, and the postselected parity
/// measurement.
pub fn build_full_protocol(n: usize, thetas: &[f64]) -> Result<ProtocolCircuit, CircuitError> {
    check_angles(n, thetas)?;
    let layout = QubitLayout::new(n);
    let p = QubitLayout::PARITY;
    let mut b = CircuitBuilder::new(full_roles(n));
    b.push(GateOp::h(p));
    for j in 1..=n {
        b.push(GateOp::h(layout.gadget(j)));
    }
    push_cnot_layer(&mut b, layout);
    push_compressed_tilde_v(&mut b, layout);
    for (j, &t) in (1..=n).zip(thetas) {
        push_gadget_tail(&mut b, layout, j, t);
    }
    b.push(GateOp::h(p));
    let m = b.measure(p);
    b.postselect(m, 0);
    Ok(ProtocolCircuit { circuit: b.build()?, layout, thetas: thetas.to_vec() })
}
