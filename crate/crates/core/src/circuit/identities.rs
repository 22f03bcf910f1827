//! Exact checks of the circuit identities behind the step-two construction.
//!
//! Each check evaluates both sides as dense operators (or as channels, when one
//! side contains measurements) and reports the largest entry-wise deviation up to
//! a single global phase.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::builders::{build_gadget_uj, build_tilde_v, build_tilde_v_compressed};
use super::channel::{circuit_unitary, Channel};
use super::{Circuit, CircuitBuilder, CircuitError, QubitRole};
use crate::gate::{w_matrix, GateOp};
use crate::linalg::DenseMatrix;
use crate::statevec::StateVector;

pub const IDENTITY_TOLERANCE: f64 = 1e-10;

/// Largest N for which the dense comparisons are run.
pub const MAX_DENSE_PAIRS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Identity {
    /// `1/2 (1⊗W^N + W^N⊗1) = 1/2 (1⊗W^N)(1 + W^2N)`.
    KFactorization,
    /// `|0><0|_0 Z_2j + |1><1|_0 Z_2j-1 = Z_2j CZ_0,2j CZ_0,2j-1`, and
    /// `U_j = cos(2t) + i sin(2t) M_j`.
    MjProjectorForm,
    /// `CX_3,2 CCZ_0,1,2 CX_3,2 = CCZ_0,1,2 CCZ_0,1,3`.
    CczPairCompression,
    /// The 2N-CCZ and N-CCZ forms of the controlled-`M_j` layer agree.
    TildeVCompression,
    /// The measured, corrected gadget implements `U_j` deterministically.
    GadgetEqualsUj,
}

impl Identity {
    pub const ALL: [Identity; 5] = [
        Identity::KFactorization,
        Identity::MjProjectorForm,
        Identity::CczPairCompression,
        Identity::TildeVCompression,
        Identity::GadgetEqualsUj,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Identity::KFactorization => "k-factorization",
            Identity::MjProjectorForm => "mj-projector-form",
            Identity::CczPairCompression => "ccz-pair-compression",
            Identity::TildeVCompression => "tilde-v-compression",
            Identity::GadgetEqualsUj => "gadget-equals-uj",
        }
    }

    /// Whether the identity involves the rotation angle at all.
    pub fn depends_on_angle(&self) -> bool {
        matches!(self, Identity::KFactorization | Identity::MjProjectorForm | Identity::GadgetEqualsUj)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: Identity,
    pub n_pairs: usize,
    pub thetas: Vec<f64>,
    pub max_deviation: f64,
    pub passed: bool,
}

fn w_dense(theta: f64) -> DenseMatrix {
    DenseMatrix::from_2x2(w_matrix(theta))
}

fn id2() -> DenseMatrix {
    DenseMatrix::identity(2)
}

/// Accepted Kraus operator of the parity check on `2N` inputs (data bit `b` is
/// input label `b + 1`): `1/2 (prod_j W_2j + prod_j W_2j-1)` with the angle of
/// pair `j` on both of its qubits.
pub fn kraus_k(thetas: &[f64]) -> DenseMatrix {
    let n = thetas.len();
    let half = |even: bool| {
        let ops: Vec<DenseMatrix> = (0..2 * n)
            .map(|b| {
                let label = b + 1;
                if (label % 2 == 0) == even {
                    w_dense(thetas[b / 2])
                } else {
                    id2()
                }
            })
            .collect();
        DenseMatrix::tensor_qubits(&ops)
    };
    half(true).add(&half(false)).scale(Complex64::new(0.5, 0.0))
}

fn bit(x: usize, q: usize) -> bool {
    x >> q & 1 == 1
}

/// Dense `U_j = |0><0|_0 R_2j(2t) + |1><1|_0 R_2j-1(2t)` on qubits `0..=2N`.
pub fn u_j_matrix(n: usize, j: usize, theta: f64) -> DenseMatrix {
    let entries = (0..1usize << (2 * n + 1))
        .map(|x| {
            let q = if bit(x, 0) { 2 * j - 1 } else { 2 * j };
            Complex64::from_polar(1.0, if bit(x, q) { -2.0 * theta } else { 2.0 * theta })
        })
        .collect();
    DenseMatrix::diagonal(entries)
}

fn m_j_projector_form(n: usize, j: usize) -> DenseMatrix {
    let entries = (0..1usize << (2 * n + 1))
        .map(|x| {
            let q = if bit(x, 0) { 2 * j - 1 } else { 2 * j };
            Complex64::new(if bit(x, q) { -1.0 } else { 1.0 }, 0.0)
        })
        .collect();
    DenseMatrix::diagonal(entries)
}

fn unitary_of(roles: usize, gates: &[GateOp]) -> Result<DenseMatrix, CircuitError> {
    let mut b = CircuitBuilder::new(vec![QubitRole::Input; roles]);
    b.extend(gates.iter().cloned());
    circuit_unitary(&b.build()?)
}

fn k_factorization(n: usize, theta: f64) -> f64 {
    let half = Complex64::new(0.5, 0.0);
    let lo: Vec<DenseMatrix> = (0..2 * n).map(|b| if b < n { id2() } else { w_dense(theta) }).collect();
    let hi: Vec<DenseMatrix> = (0..2 * n).map(|b| if b < n { w_dense(theta) } else { id2() }).collect();
    let (lo, hi) = (DenseMatrix::tensor_qubits(&lo), DenseMatrix::tensor_qubits(&hi));
    let all = DenseMatrix::tensor_qubits(&vec![w_dense(theta); 2 * n]);
    let dim = 1usize << (2 * n);
    let lhs = lo.add(&hi).scale(half);
    let rhs = lo.mul(&DenseMatrix::identity(dim).add(&all)).scale(half);
    // same factorization for the interleaved halves used by the circuits
    let k = kraus_k(&vec![theta; n]);
    let evens = DenseMatrix::tensor_qubits(
        &(0..2 * n).map(|b| if (b + 1) % 2 == 0 { w_dense(theta) } else { id2() }).collect::<Vec<_>>(),
    );
    let k_rhs = evens.mul(&DenseMatrix::identity(dim).add(&all)).scale(half);
    lhs.max_deviation(&rhs).max(k.max_deviation(&k_rhs))
}

fn mj_projector_form(n: usize, theta: f64) -> Result<f64, CircuitError> {
    let mut worst = 0.0f64;
    let dim = 1usize << (2 * n + 1);
    for j in 1..=n {
        let gates = [GateOp::z(2 * j), GateOp::cz(0, 2 * j), GateOp::cz(0, 2 * j - 1)];
        let circuit_form = unitary_of(2 * n + 1, &gates)?;
        let projector_form = m_j_projector_form(n, j);
        worst = worst.max(projector_form.max_deviation(&circuit_form));
        let cos_sin = DenseMatrix::identity(dim)
            .scale(Complex64::new((2.0 * theta).cos(), 0.0))
            .add(&circuit_form.scale(Complex64::new(0.0, (2.0 * theta).sin())));
        worst = worst.max(u_j_matrix(n, j, theta).max_deviation(&cos_sin));
        // M_j is Hermitian and unitary
        if !circuit_form.is_hermitian(1e-12) || !circuit_form.is_unitary(1e-12) {
            worst = worst.max(1.0);
        }
    }
    Ok(worst)
}

fn ccz_pair() -> Result<f64, CircuitError> {
    let lhs = unitary_of(4, &[GateOp::cx(3, 2), GateOp::ccz(0, 1, 2), GateOp::cx(3, 2)])?;
    let rhs = unitary_of(4, &[GateOp::ccz(0, 1, 2), GateOp::ccz(0, 1, 3)])?;
    Ok(lhs.deviation_up_to_phase(&rhs))
}

/// Column-by-column comparison of two measurement-free circuits, so the full
/// unitary is never stored. The global phase is fixed from column 0.
fn streamed_deviation(a: &Circuit, b: &Circuit, reference: impl Fn(usize) -> Complex64) -> Result<f64, CircuitError> {
    let n = a.num_qubits();
    let mut worst = 0.0f64;
    let mut phase: Option<Complex64> = None;
    for x in 0..1usize << n {
        let mut sa = StateVector::basis_state(n, x)?;
        let mut sb = sa.clone();
        a.gates().iter().try_for_each(|g| sa.apply(g))?;
        b.gates().iter().try_for_each(|g| sb.apply(g))?;
        // both sides are diagonal; check against the closed-form phase as well
        let (va, vb) = (sa.amplitudes()[x], sb.amplitudes()[x]);
        let ph = *phase.get_or_insert_with(|| if vb.norm() > 0.0 { va / vb } else { Complex64::new(1.0, 0.0) });
        let off_diag: f64 = sa.norm_sqr() - va.norm_sqr() + sb.norm_sqr() - vb.norm_sqr();
        worst = worst.max((va - vb * ph).norm()).max(off_diag.abs()).max((va - reference(x)).norm());
    }
    Ok(worst)
}

fn tilde_v(n: usize) -> Result<f64, CircuitError> {
    let full = build_tilde_v(n)?;
    let compressed = build_tilde_v_compressed(n)?;
    // prod_j (|0><0|_-j + |1><1|_-j M_j) as a phase on each basis state
    let reference = |x: usize| {
        let odd: u32 = (1..=n)
            .map(|j| {
                let a = bit(x, 2 * n + j) as u32;
                let m = bit(x, 2 * j) as u32
                    + (bit(x, 0) && bit(x, 2 * j)) as u32
                    + (bit(x, 0) && bit(x, 2 * j - 1)) as u32;
                a * m
            })
            .sum();
        Complex64::new(if odd.is_multiple_of(2) { 1.0 } else { -1.0 }, 0.0)
    };
    streamed_deviation(&full, &compressed, reference)
}

fn gadget(n: usize, theta: f64) -> Result<f64, CircuitError> {
    let mut worst = 0.0f64;
    for j in 1..=n {
        let c = build_gadget_uj(n, j, theta)?;
        let data = [0, 2 * j - 1, 2 * j];
        let got = Channel::of_circuit(&c, &data)?;
        // U_j on (qubit 0, 2j-1, 2j) -> local bits (0, 1, 2)
        let local = DenseMatrix::diagonal(
            (0..8usize)
                .map(|x| {
                    let q = if bit(x, 0) { 1 } else { 2 };
                    Complex64::from_polar(1.0, if bit(x, q) { -2.0 * theta } else { 2.0 * theta })
                })
                .collect(),
        );
        worst = worst.max(got.distance(&Channel::unitary(local)));
    }
    Ok(worst)
}

/// `count` seeded angles drawn uniformly from `[0.05, pi/2 - 0.05]`, away from
/// the degenerate multiples of `pi/2`.
pub fn random_angles(seed: u64, count: usize) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen_range(0.05..std::f64::consts::FRAC_PI_2 - 0.05)).collect()
}

/// Runs one identity check for `n` pairs at angle `theta`.
pub fn verify_identity(identity: Identity, n: usize, theta: f64) -> Result<IdentityReport, CircuitError> {
    if n == 0 {
        return Err(CircuitError::NoPairs);
    }
    if n > MAX_DENSE_PAIRS {
        return Err(CircuitError::TooLarge { n, max: MAX_DENSE_PAIRS });
    }
    let max_deviation = match identity {
        Identity::KFactorization => k_factorization(n, theta),
        Identity::MjProjectorForm => mj_projector_form(n, theta)?,
        Identity::CczPairCompression => ccz_pair()?,
        Identity::TildeVCompression => tilde_v(n)?,
        Identity::GadgetEqualsUj => gadget(n, theta)?,
    };
    let thetas = if identity.depends_on_angle() { vec![theta] } else { Vec::new() };
    Ok(IdentityReport { identity, n_pairs: n, thetas, max_deviation, passed: max_deviation < IDENTITY_TOLERANCE })
}

/// Runs every identity over all `thetas`, folding each into one report with the
/// worst deviation.
pub fn verify_all(n: usize, thetas: &[f64]) -> Result<Vec<IdentityReport>, CircuitError> {
    Identity::ALL
        .iter()
        .map(|&id| {
            let angles: &[f64] = if id.depends_on_angle() { thetas } else { &thetas[..thetas.len().min(1)] };
            let mut worst = verify_identity(id, n, angles.first().copied().unwrap_or(0.0))?;
            for &t in angles.iter().skip(1) {
                let r = verify_identity(id, n, t)?;
                worst.max_deviation = worst.max_deviation.max(r.max_deviation);
                worst.thetas.extend(r.thetas);
            }
            worst.passed = worst.max_deviation < IDENTITY_TOLERANCE;
            Ok(worst)
        })
        .collect()
}
