use serde::{Deserialize, Serialize};

use super::sim::simulate_pattern;
use super::{ProtocolError, MAX_SIM_PAIRS};
use crate::circuit::ProtocolCircuit;
use crate::poly::NoisePolynomial;

/// Conditional distribution of the resource's `Z` pattern given that the
/// resource is faulty. Patterns are bit masks over the block's support in
/// ascending qubit order (bit `i` is the `i`-th support qubit).
#[derive(Debug, Clone, PartialEq)]
pub enum ResourceNoiseModel {
    /// Uniform over all `2^(2N+1) - 1` nontrivial patterns.
    UniformZ,
    /// Uniform over the `2N+1` single-qubit patterns.
    SingleZUniform,
    /// The single pattern that maximizes the linear `eps_hash` term of the worst
    /// output error; ties go to the smallest mask.
    WorstCase,
    /// Explicit `(mask, probability)` list over a support of `width` qubits.
    Custom { width: usize, entries: Vec<(u64, f64)> },
}

impl ResourceNoiseModel {
    pub fn name(&self) -> &'static str {
        match self {
            ResourceNoiseModel::UniformZ => "uniform",
            ResourceNoiseModel::SingleZUniform => "single",
            ResourceNoiseModel::WorstCase => "worst",
            ResourceNoiseModel::Custom { .. } => "custom",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "uniform" => Some(ResourceNoiseModel::UniformZ),
            "single" => Some(ResourceNoiseModel::SingleZUniform),
            "worst" => Some(ResourceNoiseModel::WorstCase),
            _ => None,
        }
    }

    /// Parses `<bits> <probability>` lines; `bits` lists the support qubits in
    /// ascending order, `1` meaning a `Z`. Blank lines and `#` comments are skipped.
    pub fn parse_custom(text: &str) -> Result<Self, ProtocolError> {
        let mut width = None;
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |why: &str| ProtocolError::CustomModel(format!("line {}: {why}", i + 1));
            let mut parts = line.split_whitespace();
            let (Some(bits), Some(prob), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(bad("expected '<bits> <probability>'"));
            };
            if bits.is_empty() || bits.len() > 63 || !bits.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(bad("pattern must be a string of 0/1"));
            }
            if *width.get_or_insert(bits.len()) != bits.len() {
                return Err(bad("patterns have different lengths"));
            }
            let p: f64 = prob.parse().map_err(|_| bad("bad probability"))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(bad("probability outside [0, 1]"));
            }
            let mask = bits.bytes().enumerate().filter(|(_, b)| *b == b'1').map(|(k, _)| 1u64 << k).sum();
            entries.push((mask, p));
        }
        let width = width.ok_or_else(|| ProtocolError::CustomModel("no patterns given".into()))?;
        let total: f64 = entries.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(ProtocolError::CustomModel(format!("probabilities sum to {total}, not 1")));
        }
        Ok(ResourceNoiseModel::Custom { width, entries })
    }

    /// Fixes the pattern distribution for a concrete circuit.
    pub fn resolve(&self, pc: &ProtocolCircuit) -> Result<ResolvedResourceModel, ProtocolError> {
        let support = pc.circuit.resource_support();
        let s = support.len();
        let patterns = match self {
            ResourceNoiseModel::UniformZ => {
                let count = (1u64 << s) - 1;
                (1..=count).map(|m| (m, 1.0 / count as f64)).collect()
            }
            ResourceNoiseModel::SingleZUniform => (0..s).map(|k| (1u64 << k, 1.0 / s as f64)).collect(),
            ResourceNoiseModel::WorstCase => vec![(worst_pattern(pc, &support)?, 1.0)],
            ResourceNoiseModel::Custom { width, entries } => {
                if *width != s {
                    return Err(ProtocolError::CustomModel(format!(
                        "patterns cover {width} qubits but the resource block touches {s}"
                    )));
                }
                entries.iter().copied().filter(|(_, p)| *p > 0.0).collect()
            }
        };
        Ok(ResolvedResourceModel { name: self.name().to_string(), support, patterns })
    }
}

fn worst_pattern(pc: &ProtocolCircuit, support: &[usize]) -> Result<u64, ProtocolError> {
    let mut best = (0u64, f64::NEG_INFINITY);
    for mask in 1..(1u64 << support.len()) {
        let probe = FaultPattern { n_pairs: pc.n_pairs(), input_z: 0, resource: Some((mask, 1.0)), pivot_z: 0 };
        let out = simulate_pattern(pc, support, &probe)?;
        let score = out.errors.iter().copied().fold(0.0, f64::max);
        if score > best.1 + 1e-12 {
            best = (mask, score);
        }
    }
    Ok(best.0)
}

/// A resource model bound to a circuit's resource support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedResourceModel {
    pub name: String,
    /// Register indices of the block's qubits, ascending.
    pub support: Vec<usize>,
    /// `(mask, conditional probability)`, probabilities summing to 1.
    pub patterns: Vec<(u64, f64)>,
}

impl ResolvedResourceModel {
    /// Register-level `Z` targets of `mask`.
    pub fn qubits(&self, mask: u64) -> Vec<usize> {
        pattern_qubits(&self.support, mask)
    }
}

pub(crate) fn pattern_qubits(support: &[usize], mask: u64) -> Vec<usize> {
    support.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &q)| q).collect()
}

/// One joint fault configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaultPattern {
    pub n_pairs: usize,
    /// Bit `b` set: `Z` on input label `b + 1`.
    pub input_z: u64,
    /// Resource `Z` mask and its conditional probability, if the resource is faulty.
    pub resource: Option<(u64, f64)>,
    /// Bit `j - 1` set: `Z` after the pivot of gadget `j`.
    pub pivot_z: u64,
}

impl FaultPattern {
    pub fn input_faults(&self) -> u32 {
        self.input_z.count_ones()
    }

    pub fn pivot_faults(&self) -> u32 {
        self.pivot_z.count_ones()
    }

    /// Probability of this pattern as a polynomial in the three rates.
    pub fn probability(&self) -> NoisePolynomial {
        let n = self.n_pairs as u32;
        let a = self.input_faults();
        let c = self.pivot_faults();
        let eps = NoisePolynomial::var(0).pow(a).mul(&NoisePolynomial::one_minus(0).pow(2 * n - a));
        let res = match self.resource {
            Some((_, q)) => NoisePolynomial::var(1).scale(q),
            None => NoisePolynomial::one_minus(1),
        };
        let eta = NoisePolynomial::var(2).pow(c).mul(&NoisePolynomial::one_minus(2).pow(n - c));
        eps.mul(&res).mul(&eta)
    }
}

/// All patterns for `n` pairs: resource choice outermost (fault-free first), then
/// pivot masks, then input masks.
pub fn enumerate_patterns(n: usize, model: &ResolvedResourceModel) -> Result<Vec<FaultPattern>, ProtocolError> {
    if n > MAX_SIM_PAIRS {
        return Err(ProtocolError::TooLarge { n, max: MAX_SIM_PAIRS });
    }
    if n == 0 {
        return Err(crate::circuit::CircuitError::NoPairs.into());
    }
    let resources = std::iter::once(None).chain(model.patterns.iter().map(|&p| Some(p)));
    let mut out = Vec::new();
    for resource in resources {
        for pivot_z in 0..1u64 << n {
            for input_z in 0..1u64 << (2 * n) {
                out.push(FaultPattern { n_pairs: n, input_z, resource, pivot_z });
            }
        }
    }
    Ok(out)
}
