//! Operator-level views of circuits: full unitaries for measurement-free circuits
//! and Kraus decompositions of the accepted channel on a chosen set of data qubits.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::exec::run;
use super::{Circuit, CircuitError};
use crate::linalg::DenseMatrix;
use crate::statevec::StateVector;

/// Dense unitary of a measurement-free circuit over the whole register.
pub fn circuit_unitary(circuit: &Circuit) -> Result<DenseMatrix, CircuitError> {
    let dim = 1usize << circuit.num_qubits();
    let mut cols = Vec::with_capacity(dim);
    for x in 0..dim {
        let mut s = StateVector::basis_state(circuit.num_qubits(), x)?;
        for (index, g) in circuit.gates().iter().enumerate() {
            if !g.kind.is_unitary() || g.condition.is_some() {
                return Err(CircuitError::InvalidGate { index, reason: "circuit is not purely unitary".into() });
            }
            s.apply(g)?;
        }
        cols.push(s.into_amplitudes());
    }
    Ok(DenseMatrix::from_columns(dim, |x| std::mem::take(&mut cols[x])))
}

/// Completely positive map on `2^d`-dimensional data, stored as Kraus operators.
#[derive(Debug, Clone)]
pub struct Channel {
    dim: usize,
    kraus: Vec<DenseMatrix>,
}

impl Channel {
    pub fn from_kraus(kraus: Vec<DenseMatrix>) -> Self {
        let dim = kraus.first().map_or(1, DenseMatrix::dim);
        assert!(kraus.iter().all(|k| k.dim() == dim), "Kraus operators must share a dimension");
        Channel { dim, kraus }
    }

    pub fn unitary(u: DenseMatrix) -> Self {
        Self::from_kraus(vec![u])
    }

    /// Accepted channel of `circuit` restricted to `data` qubits.
    ///
    /// Each basis input `|x>` (bit `i` of `x` on `data[i]`, everything else `|0>`) is
    /// run through every branch. For a branch and a fixed configuration `c` of the
    /// non-data qubits, the data amplitudes form column `x` of one Kraus operator,
    /// so tracing out the non-data qubits is exact.
    pub fn of_circuit(circuit: &Circuit, data: &[usize]) -> Result<Self, CircuitError> {
        let n = circuit.num_qubits();
        let dim = 1usize << data.len();
        let data_mask: usize = data.iter().map(|&q| 1usize << q).sum();
        let spread = |x: usize| -> usize {
            data.iter().enumerate().filter(|(b, _)| x >> b & 1 == 1).map(|(_, &q)| 1usize << q).sum()
        };
        let mut kraus: BTreeMap<(Vec<u8>, usize), DenseMatrix> = BTreeMap::new();
        for x in 0..dim {
            let initial = StateVector::basis_state(n, spread(x))?;
            for branch in run(circuit, initial)? {
                let amps = branch.state.amplitudes();
                for (idx, a) in amps.iter().enumerate() {
                    if a.norm_sqr() == 0.0 {
                        continue;
                    }
                    let rest = idx & !data_mask;
                    let y = data.iter().enumerate().filter(|(_, &q)| idx >> q & 1 == 1).map(|(b, _)| 1usize << b).sum();
                    kraus
                        .entry((branch.outcomes.clone(), rest))
                        .or_insert_with(|| DenseMatrix::zeros(dim))
                        .set(y, x, *a);
                }
            }
        }
        Ok(Channel { dim, kraus: kraus.into_values().collect() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[DenseMatrix] {
        &self.kraus
    }

    /// Image of the matrix unit `|x><y|`.
    pub fn apply_unit(&self, x: usize, y: usize) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.dim);
        for k in &self.kraus {
            let (cx, cy) = (k.column(x), k.column(y));
            for (i, a) in cx.iter().enumerate() {
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for (j, b) in cy.iter().enumerate() {
                    let v = out.get(i, j) + a * b.conj();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Largest entry-wise difference between the two maps over the complete
    /// matrix-unit basis. Insensitive to Kraus-level global phases.
    pub fn distance(&self, other: &Channel) -> f64 {
        assert_eq!(self.dim, other.dim, "channel dimensions differ");
        let mut worst = 0.0f64;
        for x in 0..self.dim {
            for y in 0..self.dim {
                worst = worst.max(self.apply_unit(x, y).max_deviation(&other.apply_unit(x, y)));
            }
        }
        worst
    }

    /// Trace of the output for the pure input `|psi>`: the acceptance probability.
    pub fn acceptance(&self, psi: &[Complex64]) -> f64 {
        self.kraus
            .iter()
            .map(|k| {
                (0..self.dim)
                    .map(|i| (0..self.dim).map(|x| k.get(i, x) * psi[x]).sum::<Complex64>().norm_sqr())
                    .sum::<f64>()
            })
            .sum()
    }
}
