use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::patterns::{FaultPattern, ResolvedResourceModel};
use super::sim::{simulate_pattern, PatternOutcome};
use super::ProtocolError;
use crate::circuit::ProtocolCircuit;
use crate::poly::Rates;

/// Sampled acceptance and conditional output errors with standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub samples: usize,
    pub seed: u64,
    pub p_parity: f64,
    pub p_parity_se: f64,
    /// Ratio estimate of `eps'` per output.
    pub epsilon_prime: Vec<f64>,
    /// Delta-method standard error of each ratio.
    pub epsilon_prime_se: Vec<f64>,
    /// Number of distinct fault patterns that were drawn.
    pub distinct_patterns: usize,
}

/// Draws fault patterns from the noise model at `at` and averages their exact
/// accepted and errored weights. Each distinct pattern is simulated once.
pub fn monte_carlo_estimate(
    pc: &ProtocolCircuit,
    model: &ResolvedResourceModel,
    at: Rates,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate, ProtocolError> {
    if samples == 0 {
        return Err(ProtocolError::NoSamples);
    }
    let n = pc.n_pairs();
    let clamp = |p: f64| p.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut memo: HashMap<(u64, Option<usize>, u64), PatternOutcome> = HashMap::new();
    let mut draws: Vec<(u64, Option<usize>, u64)> = Vec::with_capacity(samples);

    for _ in 0..samples {
        let mut input_z = 0u64;
        for b in 0..2 * n {
            if rng.gen_bool(clamp(at.eps_theta)) {
                input_z |= 1 << b;
            }
        }
        let resource = if rng.gen_bool(clamp(at.eps_hash)) {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut pick = model.patterns.len() - 1;
            for (k, (_, q)) in model.patterns.iter().enumerate() {
                acc += q;
                if u < acc {
                    pick = k;
                    break;
                }
            }
            Some(pick)
        } else {
            None
        };
        let mut pivot_z = 0u64;
        for j in 0..n {
            if rng.gen_bool(clamp(at.eta)) {
                pivot_z |= 1 << j;
            }
        }
        let key = (input_z, resource, pivot_z);
        if let std::collections::hash_map::Entry::Vacant(e) = memo.entry(key) {
            let pattern = FaultPattern { n_pairs: n, input_z, resource: resource.map(|k| model.patterns[k]), pivot_z };
            e.insert(simulate_pattern(pc, &model.support, &pattern)?);
        }
        draws.push(key);
    }

    let m = samples as f64;
    let n_out = 2 * n;
    let mut sum_a = 0.0;
    let mut sum_e = vec![0.0; n_out];
    for key in &draws {
        let o = &memo[key];
        sum_a += o.acceptance;
        for (s, e) in sum_e.iter_mut().zip(&o.errors) {
            *s += e;
        }
    }
    if sum_a <= 0.0 {
        return Err(ProtocolError::ZeroAcceptance);
    }
    let mean_a = sum_a / m;
    let ratios: Vec<f64> = sum_e.iter().map(|s| s / sum_a).collect();
    let mut var_a = 0.0;
    let mut var_r = vec![0.0; n_out];
    for key in &draws {
        let o = &memo[key];
        var_a += (o.acceptance - mean_a).powi(2);
        for i in 0..n_out {
            var_r[i] += (o.errors[i] - ratios[i] * o.acceptance).powi(2);
        }
    }
    let denom = if samples > 1 { m * (m - 1.0) } else { 1.0 };
    Ok(MonteCarloEstimate {
        samples,
        seed,
        p_parity: mean_a,
        p_parity_se: (var_a / denom).sqrt(),
        epsilon_prime: ratios,
        epsilon_prime_se: var_r.iter().map(|v| (v / denom).sqrt() / mean_a).collect(),
        distinct_patterns: memo.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::build_full_protocol;
    use crate::protocol::ResourceNoiseModel;

    fn setup() -> (ProtocolCircuit, ResolvedResourceModel) {
        let pc = build_full_protocol(1, &[0.3]).unwrap();
        let m = ResourceNoiseModel::SingleZUniform.resolve(&pc).unwrap();
        (pc, m)
    }

    #[test]
    fn noiseless_point_is_exact() {
        let (pc, m) = setup();
        for seed in [0, 7, 99] {
            let est = monte_carlo_estimate(&pc, &m, Rates::default(), 200, seed).unwrap();
            assert_eq!(est.p_parity, 1.0);
            assert_eq!(est.epsilon_prime, vec![0.0, 0.0]);
            assert_eq!(est.p_parity_se, 0.0);
        }
    }

    #[test]
    fn same_seed_same_estimate() {
        let (pc, m) = setup();
        let at = Rates::new(0.05, 0.05, 0.05);
        let a = monte_carlo_estimate(&pc, &m, at, 2000, 11).unwrap();
        let b = monte_carlo_estimate(&pc, &m, at, 2000, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(monte_carlo_estimate(&pc, &m, at, 0, 1).unwrap_err(), ProtocolError::NoSamples);
    }
}
