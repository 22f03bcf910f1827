//! Sparse polynomials in the three noise rates `(eps_theta, eps_hash, eta)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Exponents of `(eps_theta, eps_hash, eta)`.
pub type Exponents = [u32; 3];

/// `sum coeff * eps_theta^a * eps_hash^b * eta^c`, keyed by `[a, b, c]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NoisePolynomial {
    terms: BTreeMap<Exponents, f64>,
}

/// Point at which a [`NoisePolynomial`] is evaluated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub eps_theta: f64,
    pub eps_hash: f64,
    pub eta: f64,
}

impl Rates {
    pub fn new(eps_theta: f64, eps_hash: f64, eta: f64) -> Self {
        Rates { eps_theta, eps_hash, eta }
    }

    fn as_array(&self) -> [f64; 3] {
        [self.eps_theta, self.eps_hash, self.eta]
    }
}

impl NoisePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial([0, 0, 0], c)
    }

    pub fn monomial(exps: Exponents, coeff: f64) -> Self {
        let mut p = Self::zero();
        p.add_term(exps, coeff);
        p
    }

    /// The variable with index `var` (0 = eps_theta, 1 = eps_hash, 2 = eta).
    pub fn var(var: usize) -> Self {
        let mut e = [0; 3];
        e[var] = 1;
        Self::monomial(e, 1.0)
    }

    /// `1 - var`.
    pub fn one_minus(var: usize) -> Self {
        Self::constant(1.0).sub(&Self::var(var))
    }

    pub fn add_term(&mut self, exps: Exponents, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        let e = self.terms.entry(exps).or_insert(0.0);
        *e += coeff;
        if *e == 0.0 {
            self.terms.remove(&exps);
        }
    }

    pub fn coeff(&self, exps: Exponents) -> f64 {
        self.terms.get(&exps).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponents, f64)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero();
        for (e, c) in self.terms() {
            out.add_term(e, c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_truncated(other, u32::MAX)
    }

    /// Product keeping only terms of total degree `<= max_degree`.
    pub fn mul_truncated(&self, other: &Self, max_degree: u32) -> Self {
        let mut out = Self::zero();
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                if e.iter().sum::<u32>() <= max_degree {
                    out.add_term(e, ca * cb);
                }
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(1.0), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, at: Rates) -> f64 {
        let x = at.as_array();
        self.terms
            .iter()
            .map(|(e, c)| c * x[0].powi(e[0] as i32) * x[1].powi(e[1] as i32) * x[2].powi(e[2] as i32))
            .sum()
    }

    /// Sets every variable with `keep[v] == false` to zero.
    pub fn restrict(&self, keep: [bool; 3]) -> Self {
        let mut out = Self::zero();
        for (e, c) in self.terms() {
            if (0..3).all(|v| keep[v] || e[v] == 0) {
                out.add_term(e, c);
            }
        }
        out
    }

    pub fn truncate(&self, max_degree: u32) -> Self {
        let mut out = Self::zero();
        for (e, c) in self.terms() {
            if e.iter().sum::<u32>() <= max_degree {
                out.add_term(e, c);
            }
        }
        out
    }

    /// Power series of `self / denom` up to total degree `max_degree`.
    ///
    /// Requires `denom` to have constant term 1: `1/denom = sum_k (1 - denom)^k`,
    /// and `(1 - denom)^k` has no terms below degree `k`.
    pub fn series_div(&self, denom: &Self, max_degree: u32) -> Option<Self> {
        if (denom.coeff([0, 0, 0]) - 1.0).abs() > 1e-12 {
            return None;
        }
        let rest = Self::constant(1.0).sub(denom).truncate(max_degree);
        let mut inverse = Self::constant(1.0);
        let mut power = Self::constant(1.0);
        for _ in 0..max_degree {
            power = power.mul_truncated(&rest, max_degree);
            inverse = inverse.add(&power);
        }
        Some(self.mul_truncated(&inverse, max_degree))
    }

    /// Largest absolute coefficient difference.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let diff = self.sub(other);
        diff.terms().map(|(_, c)| c.abs()).fold(0.0, f64::max)
    }
}

impl fmt::Display for NoisePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = ["et", "eh", "eta"];
        for (i, (e, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for v in 0..3 {
                match e[v] {
                    0 => {}
                    1 => write!(f, "*{}", names[v])?,
                    k => write!(f, "*{}^{k}", names[v])?,
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct Term {
    exponents: Exponents,
    coeff: f64,
}

impl Serialize for NoisePolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<Term> = self.terms().map(|(exponents, coeff)| Term { exponents, coeff }).collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for NoisePolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let terms = Vec::<Term>::deserialize(d)?;
        let mut p = NoisePolynomial::zero();
        for t in terms {
            p.add_term(t.exponents, t.coeff);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binomial_expansion() {
        // (1 - 2e)^2 = 1 - 4e + 4e^2
        let p = NoisePolynomial::constant(1.0).sub(&NoisePolynomial::var(0).scale(2.0)).pow(2);
        assert_eq!(p.coeff([0, 0, 0]), 1.0);
        assert_eq!(p.coeff([1, 0, 0]), -4.0);
        assert_eq!(p.coeff([2, 0, 0]), 4.0);
        assert_eq!(p.total_degree(), 2);
    }

    #[test]
    fn series_division_matches_geometric_series() {
        // e / (1 - e) = e + e^2 + ...
        let q = NoisePolynomial::var(0).series_div(&NoisePolynomial::one_minus(0), 3).unwrap();
        for k in 1..=3 {
            assert!((q.coeff([k, 0, 0]) - 1.0).abs() < 1e-15);
        }
        assert!(NoisePolynomial::var(0).series_div(&NoisePolynomial::var(1), 2).is_none());
    }

    #[test]
    fn json_round_trip() {
        let p = NoisePolynomial::var(0).mul(&NoisePolynomial::one_minus(2)).scale(0.5);
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"exponents\":[1,0,0]"));
        let back: NoisePolynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    proptest! {
        #[test]
        fn product_evaluates_pointwise(a in -2.0f64..2.0, b in -2.0f64..2.0, x in 0.0f64..0.5, y in 0.0f64..0.5, z in 0.0f64..0.5) {
            let p = NoisePolynomial::var(0).scale(a).add(&NoisePolynomial::var(2).mul(&NoisePolynomial::var(1)));
            let q = NoisePolynomial::constant(b).add(&NoisePolynomial::one_minus(0));
            let at = Rates::new(x, y, z);
            prop_assert!((p.mul(&q).eval(at) - p.eval(at) * q.eval(at)).abs() < 1e-12);
        }
    }
}
