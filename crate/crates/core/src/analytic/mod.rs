//! Closed-form acceptance and error expressions, the resource-state error bound,
//! the output-error bound, and the input/output accounting of distillation
//! families.

mod overhead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use overhead::{
    chained_pi8_coefficient, concatenation_cost, leading_map_coefficient, overhead, stored_combined_pi8_coefficient,
    stored_p_synth_linear, tcount_cczhash, ConcatenationLevel, ConcatenationReport, Overhead, ProtocolFamily,
    ProtocolSpec, TCount,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("{name} = {value} outside [0, 0.5)")]
    RateOutOfRange { name: &'static str, value: f64 },
    #[error("N must be at least 1")]
    NoPairs,
    #[error("bound denominator is not positive ({0})")]
    NonPositiveDenominator(f64),
    #[error("k must be even and positive for {family}, got {k}")]
    OddK { family: &'static str, k: usize },
    #[error("no leading-order error map stored for {0}; supply one explicitly")]
    MissingCoefficient(String),
    #[error("success model is only available for this-work protocols")]
    NoSuccessModel,
    #[error("levels must be at least 1")]
    NoLevels,
    #[error("recursion diverges at level {level}: error {eps_in} -> {eps_out}")]
    Divergent { level: usize, eps_in: f64, eps_out: f64 },
    #[error("no stored constant for N={0}")]
    NoStoredConstant(usize),
}

fn check_rate(name: &'static str, value: f64) -> Result<(), AnalyticError> {
    if !(0.0..0.5).contains(&value) {
        return Err(AnalyticError::RateOutOfRange { name, value });
    }
    Ok(())
}

fn check_pairs(n: usize) -> Result<(), AnalyticError> {
    if n == 0 {
        return Err(AnalyticError::NoPairs);
    }
    Ok(())
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Probability that the parity check on `2N` inputs with independent `Z` errors
/// of rate `eps` reports even parity: `(1 + (1 - 2 eps)^2N) / 2`.
pub fn acceptance_closed_form(eps: f64, n: usize) -> f64 {
    0.5 * (1.0 + (1.0 - 2.0 * eps).powi(2 * n as i32))
}

/// Probability of even parity with a fixed output qubit errored:
/// `(eps / 2) (1 - (1 - 2 eps)^(2N-1))`.
pub fn p_bad_closed_form(eps: f64, n: usize) -> f64 {
    0.5 * eps * (1.0 - (1.0 - 2.0 * eps).powi(2 * n as i32 - 1))
}

/// Same quantity summed directly: the fixed qubit is errored and an odd number
/// of the other `2N - 1` inputs are.
pub fn p_bad_binomial(eps: f64, n: usize) -> f64 {
    let m = 2 * n as u32 - 1;
    let odd: f64 =
        (1..=m).step_by(2).map(|k| binomial(m, k) * eps.powi(k as i32) * (1.0 - eps).powi((m - k) as i32)).sum();
    eps * odd
}

/// Upper bound on the `CCZ_#N` error from `4N + 4` T states of error `eps`, with
/// its leading `eps^2` coefficient `6 + 14N + 8N^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthBound {
    pub value: f64,
    pub leading_coefficient: f64,
}

/// `1 - 2(1-eps)^m / (1 + (1-2eps)^m)` with `m = 4N + 4`.
///
/// Evaluated as `sum_{k>=2} C(m,k) (-eps)^k (2^k - 2) / (1 + (1-2eps)^m)`, which has
/// no cancellation for small `eps`.
pub fn synthillation_error_bound(eps: f64, n: usize) -> Result<SynthBound, AnalyticError> {
    check_pairs(n)?;
    check_rate("eps_pi8", eps)?;
    let m = 4 * n as u32 + 4;
    let numerator: f64 = (2..=m).map(|k| binomial(m, k) * (-eps).powi(k as i32) * (2f64.powi(k as i32) - 2.0)).sum();
    let value = numerator / (1.0 + (1.0 - 2.0 * eps).powi(m as i32));
    let nf = n as f64;
    Ok(SynthBound { value, leading_coefficient: 6.0 + 14.0 * nf + 8.0 * nf * nf })
}

/// Noise rates for the analytic bound. `eps_hash` wins over `eps_pi8` when both
/// are given.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NoisePoint {
    pub n: usize,
    pub eps_theta: f64,
    pub eps_pi8: Option<f64>,
    pub eps_hash: Option<f64>,
    pub eta: f64,
}

impl NoisePoint {
    /// The resource error used by the bound.
    pub fn resolved_eps_hash(&self) -> Result<f64, AnalyticError> {
        match (self.eps_hash, self.eps_pi8) {
            (Some(h), pi8) => {
                if pi8.is_some() {
                    log::warn!("both eps_hash and eps_pi8 given; using eps_hash = {h} and ignoring eps_pi8");
                }
                check_rate("eps_hash", h)?;
                Ok(h)
            }
            (None, Some(e)) => Ok(synthillation_error_bound(e, self.n)?.value),
            (None, None) => Ok(0.0),
        }
    }
}

/// Bound on the output error of step two:
///
/// `[(1-eta)^N ((2N-1)(1-eps_#) eps_theta^2 + eps_#) + 1 - (1-eta)^N]
///  / [(1-eta)^N (1-eps_#) (p_good + p_bad) + 1 - (1-eta)^N]`.
pub fn epsilon_prime_bound(point: &NoisePoint) -> Result<f64, AnalyticError> {
    check_pairs(point.n)?;
    check_rate("eps_theta", point.eps_theta)?;
    check_rate("eta", point.eta)?;
    let h = point.resolved_eps_hash()?;
    let n = point.n;
    let keep = (1.0 - point.eta).powi(n as i32);
    let e = point.eps_theta;
    let numerator = keep * ((2 * n - 1) as f64 * (1.0 - h) * e * e + h) + (1.0 - keep);
    let denominator = keep * (1.0 - h) * acceptance_closed_form(e, n) + (1.0 - keep);
    if denominator <= 0.0 {
        return Err(AnalyticError::NonPositiveDenominator(denominator));
    }
    Ok(numerator / denominator)
}

/// Leading-order coefficients of the bound on `(eps_theta^2, eps_pi8^2, eta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeadingCoefficients {
    pub eps_theta2: f64,
    pub eps_pi8_2: f64,
    pub eta: f64,
}

/// `(2N - 1, 6 + 14N + 8N^2, N)`.
pub fn leading_coefficients_closed_form(n: usize) -> LeadingCoefficients {
    let nf = n as f64;
    LeadingCoefficients { eps_theta2: 2.0 * nf - 1.0, eps_pi8_2: 6.0 + 14.0 * nf + 8.0 * nf * nf, eta: nf }
}

/// Extrapolates `f(h) / h^power` to `h -> 0` from a geometric sequence of step
/// sizes (Neville's scheme on the polynomial in `h`).
pub fn extrapolate_to_zero(f: impl Fn(f64) -> f64, power: i32, h0: f64, levels: usize) -> f64 {
    let hs: Vec<f64> = (0..levels).map(|k| h0 / 2f64.powi(k as i32)).collect();
    let mut t: Vec<f64> = hs.iter().map(|&h| f(h) / h.powi(power)).collect();
    for m in 1..levels {
        for i in (m..levels).rev() {
            t[i] = (hs[i - m] * t[i] - hs[i] * t[i - 1]) / (hs[i - m] - hs[i]);
        }
    }
    t[levels - 1]
}

/// Leading-order coefficients of [`epsilon_prime_bound`] obtained numerically by
/// switching on one rate at a time and extrapolating to zero.
pub fn leading_coefficients_numeric(n: usize) -> Result<LeadingCoefficients, AnalyticError> {
    check_pairs(n)?;
    let at = |eps_theta: f64, eps_pi8: f64, eta: f64| {
        epsilon_prime_bound(&NoisePoint { n, eps_theta, eps_pi8: Some(eps_pi8), eps_hash: None, eta })
    };
    // validate once so the closures below cannot fail
    at(1e-3, 1e-3, 1e-3)?;
    let (h0, levels) = (1e-3, 8);
    Ok(LeadingCoefficients {
        eps_theta2: extrapolate_to_zero(|h| at(h, 0.0, 0.0).unwrap_or(f64::NAN), 2, h0, levels),
        eps_pi8_2: extrapolate_to_zero(|h| at(0.0, h, 0.0).unwrap_or(f64::NAN), 2, h0, levels),
        eta: extrapolate_to_zero(|h| at(0.0, 0.0, h).unwrap_or(f64::NAN), 1, h0, levels),
    })
}
