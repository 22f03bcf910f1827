//! Gate records shared by the state-vector engine and the circuit IR.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Ordinal of a measurement inside a circuit (`m0`, `m1`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MeasureId(pub usize);

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{}", self.0)
    }
}

/// Gate kinds. Angles are in radians, with `R(t) = exp(i t Z) = diag(e^{it}, e^{-it})`
/// and `W(t) = R(2t) X`.
///
/// Controlled kinds take the control first: `CX [c, t]`, `CR(t) [c, t]`,
/// `CW(t) [c, t]`. `OCW` fires when its control is `|0>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    X,
    Z,
    H,
    R(f64),
    W(f64),
    CX,
    CZ,
    CCZ,
    CR(f64),
    CW(f64),
    OCW(f64),
    Measure,
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::X | GateKind::Z | GateKind::H | GateKind::R(_) | GateKind::W(_) => 1,
            GateKind::Measure => 1,
            GateKind::CX | GateKind::CZ | GateKind::CR(_) | GateKind::CW(_) | GateKind::OCW(_) => 2,
            GateKind::CCZ => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::R(_) => "R",
            GateKind::W(_) => "W",
            GateKind::CX => "CX",
            GateKind::CZ => "CZ",
            GateKind::CCZ => "CCZ",
            GateKind::CR(_) => "CR",
            GateKind::CW(_) => "CW",
            GateKind::OCW(_) => "OCW",
            GateKind::Measure => "MEASURE",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            GateKind::R(t) | GateKind::W(t) | GateKind::CR(t) | GateKind::CW(t) | GateKind::OCW(t) => Some(t),
            _ => None,
        }
    }

    /// Builds a kind from its textual name and optional angle.
    pub fn from_name(name: &str, angle: Option<f64>) -> Option<GateKind> {
        let kind = match (name, angle) {
            ("X", None) => GateKind::X,
            ("Z", None) => GateKind::Z,
            ("H", None) => GateKind::H,
            ("CX", None) => GateKind::CX,
            ("CZ", None) => GateKind::CZ,
            ("CCZ", None) => GateKind::CCZ,
            ("MEASURE", None) => GateKind::Measure,
            ("R", Some(t)) => GateKind::R(t),
            ("W", Some(t)) => GateKind::W(t),
            ("CR", Some(t)) => GateKind::CR(t),
            ("CW", Some(t)) => GateKind::CW(t),
            ("OCW", Some(t)) => GateKind::OCW(t),
            _ => return None,
        };
        Some(kind)
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(self, GateKind::Measure)
    }

    /// Inverse of a unitary kind. `None` for measurements.
    pub fn inverse(&self) -> Option<GateKind> {
        match *self {
            GateKind::R(t) => Some(GateKind::R(-t)),
            GateKind::CR(t) => Some(GateKind::CR(-t)),
            GateKind::Measure => None,
            // the rest are Hermitian
            k => Some(k),
        }
    }

    /// 2x2 target matrix of the single-qubit action, row-major `[m00, m01, m10, m11]`.
    /// Multi-qubit kinds report the matrix applied to their last (target) qubit.
    pub(crate) fn target_matrix(&self) -> Option<[Complex64; 4]> {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let m = match *self {
            GateKind::X | GateKind::CX => [zero, one, one, zero],
            GateKind::Z | GateKind::CZ | GateKind::CCZ => [one, zero, zero, -one],
            GateKind::H => {
                let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                [s, s, s, -s]
            }
            GateKind::R(t) | GateKind::CR(t) => r_matrix(t),
            GateKind::W(t) | GateKind::CW(t) | GateKind::OCW(t) => w_matrix(t),
            GateKind::Measure => return None,
        };
        Some(m)
    }
}

/// `R(t) = diag(e^{it}, e^{-it})`.
pub fn r_matrix(theta: f64) -> [Complex64; 4] {
    let zero = Complex64::new(0.0, 0.0);
    [Complex64::from_polar(1.0, theta), zero, zero, Complex64::from_polar(1.0, -theta)]
}

/// `W(t) = R(2t) X`, Hermitian with `|R(t)>` as its +1 eigenvector.
pub fn w_matrix(theta: f64) -> [Complex64; 4] {
    let zero = Complex64::new(0.0, 0.0);
    [zero, Complex64::from_polar(1.0, 2.0 * theta), Complex64::from_polar(1.0, -2.0 * theta), zero]
}

/// A single gate application, optionally conditioned on an earlier measurement
/// having returned 1. Conditioned gates are the classical corrections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub condition: Option<MeasureId>,
}

impl GateOp {
    pub fn new(kind: GateKind, qubits: &[usize]) -> Self {
        GateOp { kind, qubits: qubits.to_vec(), condition: None }
    }

    pub fn conditioned(mut self, on: MeasureId) -> Self {
        self.condition = Some(on);
        self
    }

    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, &[q])
    }
    pub fn z(q: usize) -> Self {
        Self::new(GateKind::Z, &[q])
    }
    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, &[q])
    }
    pub fn r(q: usize, theta: f64) -> Self {
        Self::new(GateKind::R(theta), &[q])
    }
    pub fn w(q: usize, theta: f64) -> Self {
        Self::new(GateKind::W(theta), &[q])
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Self::new(GateKind::CX, &[control, target])
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self::new(GateKind::CZ, &[a, b])
    }
    pub fn ccz(a: usize, b: usize, c: usize) -> Self {
        Self::new(GateKind::CCZ, &[a, b, c])
    }
    pub fn cr(control: usize, target: usize, theta: f64) -> Self {
        Self::new(GateKind::CR(theta), &[control, target])
    }
    pub fn cw(control: usize, target: usize, theta: f64) -> Self {
        Self::new(GateKind::CW(theta), &[control, target])
    }
    pub fn ocw(control: usize, target: usize, theta: f64) -> Self {
        Self::new(GateKind::OCW(theta), &[control, target])
    }
    pub fn measure(q: usize) -> Self {
        Self::new(GateKind::Measure, &[q])
    }

    /// Inverse gate; `None` for measurements.
    pub fn inverse(&self) -> Option<GateOp> {
        Some(GateOp { kind: self.kind.inverse()?, qubits: self.qubits.clone(), condition: self.condition })
    }
}
