//! Small dense complex matrices for operator-level identity checks.

use num_complex::Complex64;

/// Square row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        DenseMatrix { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_2x2(m: [Complex64; 4]) -> Self {
        DenseMatrix { dim: 2, data: m.to_vec() }
    }

    pub fn diagonal(entries: Vec<Complex64>) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, e) in entries.into_iter().enumerate() {
            m.data[i * m.dim + i] = e;
        }
        m
    }

    /// Builds the matrix column by column: `column(x)` must return the image of `|x>`.
    pub fn from_columns(dim: usize, mut column: impl FnMut(usize) -> Vec<Complex64>) -> Self {
        let mut m = Self::zeros(dim);
        for x in 0..dim {
            let col = column(x);
            assert_eq!(col.len(), dim, "column length mismatch");
            for (row, v) in col.into_iter().enumerate() {
                m.data[row * dim + x] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.data[row * self.dim + col] = v;
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.dim).map(|r| self.get(r, col)).collect()
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, other.dim);
        DenseMatrix { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, s: Complex64) -> DenseMatrix {
        DenseMatrix { dim: self.dim, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn adjoint(&self) -> DenseMatrix {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`. With the LSB-first qubit convention,
    /// `other` acts on the low-order qubits.
    pub fn kron(&self, other: &DenseMatrix) -> DenseMatrix {
        let (a, b) = (self.dim, other.dim);
        let n = a * b;
        let mut out = Self::zeros(n);
        for i in 0..a {
            for j in 0..a {
                let s = self.data[i * a + j];
                for k in 0..b {
                    for l in 0..b {
                        out.data[(i * b + k) * n + (j * b + l)] = s * other.data[k * b + l];
                    }
                }
            }
        }
        out
    }

    /// Tensor product of single-qubit operators, `ops[q]` acting on qubit `q`.
    pub fn tensor_qubits(ops: &[DenseMatrix]) -> DenseMatrix {
        ops.iter().fold(DenseMatrix::identity(1), |acc, op| op.kron(&acc))
    }

    pub fn max_deviation(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Max entry-wise deviation after aligning `other` to `self` by the single
    /// global phase read off the largest entry of `self`.
    pub fn deviation_up_to_phase(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        let (idx, _) =
            self.data
                .iter()
                .enumerate()
                .fold((0, -1.0), |best, (i, a)| if a.norm() > best.1 { (i, a.norm()) } else { best });
        let (a, b) = (self.data[idx], other.data[idx]);
        let phase = if a.norm() > 0.0 && b.norm() > 0.0 { (a / b) / (a / b).norm() } else { Complex64::new(1.0, 0.0) };
        self.max_deviation(&other.scale(phase))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_deviation(&self.adjoint()) < tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.mul(&self.adjoint()).max_deviation(&DenseMatrix::identity(self.dim)) < tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kron_follows_lsb_first_qubits() {
        let x = DenseMatrix::from_2x2([c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let id = DenseMatrix::identity(2);
        // X on qubit 0 maps |00> (index 0) to |01> (index 1)
        let x0 = DenseMatrix::tensor_qubits(&[x.clone(), id.clone()]);
        assert_eq!(x0.get(1, 0), c(1., 0.));
        let x1 = DenseMatrix::tensor_qubits(&[id, x]);
        assert_eq!(x1.get(2, 0), c(1., 0.));
    }

    #[test]
    fn phase_alignment() {
        let m = DenseMatrix::diagonal(vec![c(1., 0.), c(0., 1.)]);
        let n = m.scale(Complex64::from_polar(1.0, 0.7));
        assert!(m.max_deviation(&n) > 0.1);
        assert!(m.deviation_up_to_phase(&n) < 1e-15);
    }
}
