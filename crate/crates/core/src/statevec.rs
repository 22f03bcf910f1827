//! Dense state-vector engine.
//!
//! Bit ordering: qubit `q` is bit `q` of the basis-state index, so qubit 0 is the
//! least-significant bit. `R(t) = exp(i t Z)` is applied literally, including its
//! global phase; identity checks elsewhere compare up to one global phase.
//!
//! Vectors produced by projection are left unnormalized. Their squared norm is the
//! probability of the branch that produced them.

use num_complex::Complex64;
use thiserror::Error;

use crate::gate::{GateKind, GateOp};

/// Default cap on the register size; 2^24 complex doubles is 256 MiB.
pub const DEFAULT_MAX_QUBITS: usize = 24;

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("{requested} qubits exceeds the configured cap of {cap}")]
    ResourceLimit { requested: usize, cap: usize },
    #[error("state needs at least one qubit")]
    Empty,
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("gate {0} expects {1} qubits, got {2}")]
    Arity(&'static str, usize, usize),
    #[error("gate acts twice on qubit {0}")]
    RepeatedQubit(usize),
    #[error("{0} is not a unitary gate")]
    NotUnitary(&'static str),
    #[error("amplitude vector of length {0} is not a power of two")]
    BadLength(usize),
    #[error("register sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("conditional probability undefined: branch has zero weight")]
    ZeroWeight,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
    normalized: bool,
}

fn check_size(num_qubits: usize, cap: usize) -> Result<(), StateError> {
    if num_qubits == 0 {
        return Err(StateError::Empty);
    }
    if num_qubits > cap {
        return Err(StateError::ResourceLimit { requested: num_qubits, cap });
    }
    Ok(())
}

impl StateVector {
    /// `|0...0>` on `num_qubits` qubits.
    pub fn zero_state(num_qubits: usize) -> Result<Self, StateError> {
        Self::zero_state_capped(num_qubits, DEFAULT_MAX_QUBITS)
    }

    pub fn zero_state_capped(num_qubits: usize, cap: usize) -> Result<Self, StateError> {
        check_size(num_qubits, cap)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps, normalized: true })
    }

    /// `|+>^n`.
    pub fn plus_state(num_qubits: usize) -> Result<Self, StateError> {
        Self::plus_state_capped(num_qubits, DEFAULT_MAX_QUBITS)
    }

    pub fn plus_state_capped(num_qubits: usize, cap: usize) -> Result<Self, StateError> {
        check_size(num_qubits, cap)?;
        let dim = 1usize << num_qubits;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(StateVector { num_qubits, amps: vec![a; dim], normalized: true })
    }

    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self, StateError> {
        let mut s = Self::zero_state(num_qubits)?;
        if index >= s.amps.len() {
            return Err(StateError::QubitOutOfRange { qubit: index, num_qubits });
        }
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Wraps raw amplitudes; the normalization flag is inferred.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, StateError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(StateError::BadLength(len));
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_size(num_qubits, DEFAULT_MAX_QUBITS)?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        Ok(StateVector { num_qubits, amps, normalized: (norm - 1.0).abs() < NORM_TOL })
    }

    /// Tensor product of single-qubit states; `qubits[0]` becomes qubit 0.
    pub fn product(qubits: &[[Complex64; 2]]) -> Result<Self, StateError> {
        check_size(qubits.len(), DEFAULT_MAX_QUBITS)?;
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for q in qubits {
            let mut next = Vec::with_capacity(amps.len() * 2);
            next.extend(amps.iter().map(|a| a * q[0]));
            next.extend(amps.iter().map(|a| a * q[1]));
            amps = next;
        }
        Self::from_amplitudes(amps)
    }

    /// `|R(t)> = R(t)|+>` as a single-qubit vector.
    pub fn r_qubit(theta: f64) -> [Complex64; 2] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        [Complex64::from_polar(s, theta), Complex64::from_polar(s, -theta)]
    }

    /// `Z|R(t)>`.
    pub fn zr_qubit(theta: f64) -> [Complex64; 2] {
        let [a, b] = Self::r_qubit(theta);
        [a, -b]
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64, StateError> {
        if self.num_qubits != other.num_qubits {
            return Err(StateError::SizeMismatch(self.num_qubits, other.num_qubits));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Largest entry-wise deviation `|a_i - b_i|`.
    pub fn max_deviation(&self, other: &StateVector) -> Result<f64, StateError> {
        if self.num_qubits != other.num_qubits {
            return Err(StateError::SizeMismatch(self.num_qubits, other.num_qubits));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    fn check_qubit(&self, q: usize) -> Result<(), StateError> {
        if q >= self.num_qubits {
            Err(StateError::QubitOutOfRange { qubit: q, num_qubits: self.num_qubits })
        } else {
            Ok(())
        }
    }

    /// Applies a unitary gate in place. The gate's classical condition, if any, is
    /// the caller's business and is ignored here.
    pub fn apply(&mut self, gate: &GateOp) -> Result<(), StateError> {
        let kind = gate.kind;
        if !kind.is_unitary() {
            return Err(StateError::NotUnitary(kind.name()));
        }
        if gate.qubits.len() != kind.arity() {
            return Err(StateError::Arity(kind.name(), kind.arity(), gate.qubits.len()));
        }
        for (i, &q) in gate.qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if gate.qubits[..i].contains(&q) {
                return Err(StateError::RepeatedQubit(q));
            }
        }
        let m = kind.target_matrix().expect("unitary kinds carry a matrix");
        let (controls, target) = gate.qubits.split_at(gate.qubits.len() - 1);
        let mask: usize = controls.iter().map(|&c| 1usize << c).sum();
        let want = if matches!(kind, GateKind::OCW(_)) { 0 } else { mask };
        self.apply_controlled(target[0], m, mask, want);
        Ok(())
    }

    /// Returns a new vector with `gate` applied.
    pub fn applied(&self, gate: &GateOp) -> Result<StateVector, StateError> {
        let mut s = self.clone();
        s.apply(gate)?;
        Ok(s)
    }

    fn apply_controlled(&mut self, target: usize, m: [Complex64; 4], mask: usize, want: usize) {
        let bit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & bit != 0 || i & mask != want {
                continue;
            }
            let j = i | bit;
            let (a0, a1) = (self.amps[i], self.amps[j]);
            self.amps[i] = m[0] * a0 + m[1] * a1;
            self.amps[j] = m[2] * a0 + m[3] * a1;
        }
    }

    /// Splits the state on a computational-basis measurement of `qubit`.
    ///
    /// Returns `[(p0, branch0), (p1, branch1)]` where each branch is the projected,
    /// unrenormalized vector and `p` is its squared norm.
    pub fn measure_branch(&self, qubit: usize) -> Result<[(f64, StateVector); 2], StateError> {
        self.check_qubit(qubit)?;
        let bit = 1usize << qubit;
        let zero = Complex64::new(0.0, 0.0);
        let mut b0 = self.amps.clone();
        let mut b1 = self.amps.clone();
        for (i, (a0, a1)) in b0.iter_mut().zip(b1.iter_mut()).enumerate() {
            if i & bit == 0 {
                *a1 = zero;
            } else {
                *a0 = zero;
            }
        }
        let wrap = |amps: Vec<Complex64>| {
            let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            (p, StateVector { num_qubits: self.num_qubits, amps, normalized: false })
        };
        Ok([wrap(b0), wrap(b1)])
    }

    /// In-place projection onto `qubit = outcome` without renormalizing.
    pub fn project(&mut self, qubit: usize, outcome: u8) -> Result<f64, StateError> {
        self.check_qubit(qubit)?;
        let bit = 1usize << qubit;
        let keep = if outcome == 0 { 0 } else { bit };
        let mut p = 0.0;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & bit != keep {
                *a = Complex64::new(0.0, 0.0);
            } else {
                p += a.norm_sqr();
            }
        }
        self.normalized = false;
        Ok(p)
    }

    /// Unnormalized 2x2 reduced block `[rho00, rho01, rho10, rho11]` of `qubit`,
    /// obtained by summing over the other qubits' basis indices.
    pub fn reduced_qubit(&self, qubit: usize) -> Result<[Complex64; 4], StateError> {
        self.check_qubit(qubit)?;
        let bit = 1usize << qubit;
        let zero = Complex64::new(0.0, 0.0);
        let (mut r00, mut r01, mut r11) = (0.0, zero, 0.0);
        for i in (0..self.amps.len()).filter(|i| i & bit == 0) {
            let (a0, a1) = (self.amps[i], self.amps[i | bit]);
            r00 += a0.norm_sqr();
            r11 += a1.norm_sqr();
            r01 += a0 * a1.conj();
        }
        Ok([Complex64::new(r00, 0.0), r01, r01.conj(), Complex64::new(r11, 0.0)])
    }

    /// Unnormalized weight `<Z R(t)| rho_q |Z R(t)>` of the reduced state on `qubit`.
    pub fn single_qubit_error_weight(&self, qubit: usize, theta: f64) -> Result<f64, StateError> {
        let rho = self.reduced_qubit(qubit)?;
        let v = Self::zr_qubit(theta);
        let w = v[0].conj() * (rho[0] * v[0] + rho[1] * v[1]) + v[1].conj() * (rho[2] * v[0] + rho[3] * v[1]);
        Ok(w.re)
    }

    /// Probability that `qubit` is found in `Z|R(t)>` rather than `|R(t)>`, after
    /// tracing out every other qubit and renormalizing.
    pub fn single_qubit_error_prob(&self, qubit: usize, theta: f64) -> Result<f64, StateError> {
        let rho = self.reduced_qubit(qubit)?;
        let total = rho[0].re + rho[3].re;
        if total <= 0.0 {
            return Err(StateError::ZeroWeight);
        }
        Ok((self.single_qubit_error_weight(qubit, theta)? / total).clamp(0.0, 1.0))
    }
}

/// Prepares `|+>^n`, failing past the configured cap.
pub fn make_plus_state(num_qubits: usize) -> Result<StateVector, StateError> {
    StateVector::plus_state(num_qubits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::{r_matrix, w_matrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
        let mut amps: Vec<Complex64> =
            (0..1 << n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        StateVector::from_amplitudes(amps).unwrap()
    }

    fn mul2(a: &[Complex64; 4], b: &[Complex64; 4]) -> [Complex64; 4] {
        [a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]]
    }

    #[test]
    fn plus_states() {
        let s = make_plus_state(1).unwrap();
        assert!(s.amplitudes().iter().all(|a| close(*a, c(FRAC_1_SQRT_2, 0.0))));
        let s = make_plus_state(2).unwrap();
        assert!(s.amplitudes().iter().all(|a| close(*a, c(0.5, 0.0))));
        assert!(s.is_normalized());
        assert_eq!(
            make_plus_state(25).unwrap_err(),
            StateError::ResourceLimit { requested: 25, cap: DEFAULT_MAX_QUBITS }
        );
        assert_eq!(
            StateVector::plus_state_capped(5, 4).unwrap_err(),
            StateError::ResourceLimit { requested: 5, cap: 4 }
        );
    }

    #[test]
    fn basic_gate_actions() {
        let s = StateVector::zero_state(1).unwrap().applied(&GateOp::x(0)).unwrap();
        assert!(close(s.amplitudes()[1], c(1.0, 0.0)));

        let theta = 0.37;
        let s = make_plus_state(1).unwrap().applied(&GateOp::r(0, theta)).unwrap();
        assert!(close(s.amplitudes()[0], Complex64::from_polar(FRAC_1_SQRT_2, theta)));
        assert!(close(s.amplitudes()[1], Complex64::from_polar(FRAC_1_SQRT_2, -theta)));

        let s = StateVector::basis_state(3, 0b111).unwrap().applied(&GateOp::ccz(0, 1, 2)).unwrap();
        assert!(close(s.amplitudes()[7], c(-1.0, 0.0)));
        let s = StateVector::basis_state(3, 0b011).unwrap().applied(&GateOp::ccz(0, 1, 2)).unwrap();
        assert!(close(s.amplitudes()[3], c(1.0, 0.0)));
    }

    #[test]
    fn w_pi8_swaps_x_and_y_up_to_sign() {
        let w = w_matrix(PI / 8.0);
        let x = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        let y = [c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)];
        let wxw = mul2(&mul2(&w, &x), &w);
        // equal to -Y: the same operator up to a global phase
        for i in 0..4 {
            assert!(close(wxw[i], -y[i]));
        }
    }

    #[test]
    fn errors_on_bad_gates() {
        let mut s = StateVector::zero_state(2).unwrap();
        assert!(matches!(s.apply(&GateOp::x(2)), Err(StateError::QubitOutOfRange { .. })));
        assert!(matches!(s.apply(&GateOp::measure(0)), Err(StateError::NotUnitary(_))));
        assert!(matches!(s.apply(&GateOp::new(GateKind::CX, &[0])), Err(StateError::Arity(..))));
        assert!(matches!(s.apply(&GateOp::cx(1, 1)), Err(StateError::RepeatedQubit(1))));
    }

    #[test]
    fn measurement_branches() {
        let [(p0, b0), (p1, b1)] = make_plus_state(1).unwrap().measure_branch(0).unwrap();
        assert!((p0 - 0.5).abs() < 1e-15 && (p1 - 0.5).abs() < 1e-15);
        assert!(close(b0.amplitudes()[0], c(FRAC_1_SQRT_2, 0.0)));
        assert!(close(b1.amplitudes()[1], c(FRAC_1_SQRT_2, 0.0)));
        assert!(!b0.is_normalized());

        let [(p0, b0), (p1, b1)] = StateVector::zero_state(1).unwrap().measure_branch(0).unwrap();
        assert_eq!((p0, p1), (1.0, 0.0));
        assert!(close(b0.amplitudes()[0], c(1.0, 0.0)));
        assert_eq!(b1.norm_sqr(), 0.0);

        let bell =
            StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0)])
                .unwrap();
        let [(p0, b0), (p1, b1)] = bell.measure_branch(1).unwrap();
        assert!((p0 - 0.5).abs() < 1e-15 && (p1 - 0.5).abs() < 1e-15);
        assert!(close(b0.amplitudes()[0], c(FRAC_1_SQRT_2, 0.0)));
        assert!(close(b1.amplitudes()[3], c(FRAC_1_SQRT_2, 0.0)));
    }

    #[test]
    fn error_probability_examples() {
        let theta = 0.41;
        let r = StateVector::product(&[StateVector::r_qubit(theta)]).unwrap();
        assert!(r.single_qubit_error_prob(0, theta).unwrap().abs() < 1e-14);
        let zr = StateVector::product(&[StateVector::zr_qubit(theta)]).unwrap();
        assert!((zr.single_qubit_error_prob(0, theta).unwrap() - 1.0).abs() < 1e-14);

        let rr = StateVector::product(&[StateVector::r_qubit(theta); 2]).unwrap();
        let ee = StateVector::product(&[StateVector::zr_qubit(theta); 2]).unwrap();
        let amps: Vec<Complex64> =
            rr.amplitudes().iter().zip(ee.amplitudes()).map(|(a, b)| (a + b) * FRAC_1_SQRT_2).collect();
        let mix = StateVector::from_amplitudes(amps).unwrap();
        assert!((mix.single_qubit_error_prob(0, theta).unwrap() - 0.5).abs() < 1e-14);

        let zero = StateVector::from_amplitudes(vec![c(0.0, 0.0); 2]).unwrap();
        assert_eq!(zero.single_qubit_error_prob(0, theta), Err(StateError::ZeroWeight));
    }

    fn all_gates(theta: f64) -> Vec<GateOp> {
        vec![
            GateOp::x(0),
            GateOp::z(1),
            GateOp::h(2),
            GateOp::r(0, theta),
            GateOp::w(1, theta),
            GateOp::cx(2, 0),
            GateOp::cz(0, 1),
            GateOp::ccz(0, 1, 2),
            GateOp::cr(1, 2, theta),
            GateOp::cw(2, 1, theta),
            GateOp::ocw(0, 2, theta),
        ]
    }

    #[test]
    fn every_gate_is_undone_by_its_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let theta = rng.gen_range(-PI..PI);
            let psi = random_state(3, &mut rng);
            for g in all_gates(theta) {
                let out = psi.applied(&g).unwrap();
                assert!((out.norm_sqr() - 1.0).abs() < 1e-12, "{:?} not norm-preserving", g.kind);
                let back = out.applied(&g.inverse().unwrap()).unwrap();
                assert!(back.max_deviation(&psi).unwrap() < 1e-12, "{:?}", g.kind);
            }
        }
    }

    #[test]
    fn w_is_r2theta_times_x_and_stabilizes_r() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        for _ in 0..20 {
            let theta = rng.gen_range(-PI..PI);
            let lhs = w_matrix(theta);
            let rhs = mul2(&r_matrix(2.0 * theta), &x);
            assert!((0..4).all(|i| close(lhs[i], rhs[i])));

            let r = StateVector::product(&[StateVector::r_qubit(theta)]).unwrap();
            let zr = StateVector::product(&[StateVector::zr_qubit(theta)]).unwrap();
            let wr = r.applied(&GateOp::w(0, theta)).unwrap();
            assert!(wr.max_deviation(&r).unwrap() < 1e-12);
            let wzr = zr.applied(&GateOp::w(0, theta)).unwrap();
            let neg = StateVector::from_amplitudes(zr.amplitudes().iter().map(|a| -a).collect()).unwrap();
            assert!(wzr.max_deviation(&neg).unwrap() < 1e-12);
        }
    }

    #[test]
    fn error_probability_ignores_w_on_other_qubits() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let theta = rng.gen_range(0.05..1.5);
            // a state that is diagonal in the W basis on qubit 1, entangled with qubit 0
            let p: f64 = rng.gen_range(0.0..1.0);
            let (ra, za) = (StateVector::r_qubit(theta), StateVector::zr_qubit(theta));
            let amps: Vec<Complex64> = {
                let a = StateVector::product(&[ra, ra]).unwrap();
                let b = StateVector::product(&[za, za]).unwrap();
                a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| x * (1.0 - p).sqrt() + y * p.sqrt()).collect()
            };
            let s = StateVector::from_amplitudes(amps).unwrap();
            let before = s.single_qubit_error_prob(0, theta).unwrap();
            let after = s.applied(&GateOp::w(1, theta)).unwrap().single_qubit_error_prob(0, theta).unwrap();
            assert!((before - p).abs() < 1e-12);
            assert!((before - after).abs() < 1e-12);
        }
    }

    proptest::proptest! {
        #[test]
        fn branch_probabilities_sum_to_norm(seed in 0u64..1000, q in 0usize..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut psi = random_state(3, &mut rng);
            let scale: f64 = rng.gen_range(0.1..1.0);
            psi = StateVector::from_amplitudes(psi.amplitudes().iter().map(|a| a * scale).collect()).unwrap();
            let [(p0, b0), (p1, b1)] = psi.measure_branch(q).unwrap();
            proptest::prop_assert!((p0 + p1 - psi.norm_sqr()).abs() < 1e-12);
            proptest::prop_assert!((b0.norm_sqr() - p0).abs() < 1e-12);
            proptest::prop_assert!((b1.norm_sqr() - p1).abs() < 1e-12);
        }
    }
}
