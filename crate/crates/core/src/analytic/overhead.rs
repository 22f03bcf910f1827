use serde::{Deserialize, Serialize};

use super::{acceptance_closed_form, check_pairs, leading_coefficients_closed_form, AnalyticError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolFamily {
    /// `3k + 4 -> k` parity-check protocols, `k` even.
    ThisWork,
    /// `3k + 8 -> k` triorthogonal-code protocols, `k` even.
    BravyiHaah,
    /// `10 -> 2`.
    Mek,
    /// `2N` angle states plus `8N + 4` T states in, `2N` out.
    Dcp,
}

impl ProtocolFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ProtocolFamily::ThisWork => "this-work",
            ProtocolFamily::BravyiHaah => "bravyi-haah",
            ProtocolFamily::Mek => "mek",
            ProtocolFamily::Dcp => "dcp",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "this-work" => Some(ProtocolFamily::ThisWork),
            "bravyi-haah" => Some(ProtocolFamily::BravyiHaah),
            "mek" => Some(ProtocolFamily::Mek),
            "dcp" => Some(ProtocolFamily::Dcp),
            _ => None,
        }
    }
}

/// A family plus its size parameter: `k` for this-work and Bravyi-Haah, `N` for
/// DCP, ignored for MEK.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub family: ProtocolFamily,
    pub param: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Overhead {
    pub n: usize,
    pub k: usize,
    pub n_over_k: f64,
    /// T states consumed, where the family separates them from other inputs.
    pub t_states: Option<usize>,
}

fn even_k(family: &'static str, k: usize) -> Result<(), AnalyticError> {
    if k == 0 || k % 2 == 1 {
        return Err(AnalyticError::OddK { family, k });
    }
    Ok(())
}

pub fn overhead(spec: ProtocolSpec) -> Result<Overhead, AnalyticError> {
    let (n, k, t_states) = match spec.family {
        ProtocolFamily::ThisWork => {
            even_k("this-work", spec.param)?;
            (3 * spec.param + 4, spec.param, None)
        }
        ProtocolFamily::BravyiHaah => {
            even_k("bravyi-haah", spec.param)?;
            (3 * spec.param + 8, spec.param, Some(3 * spec.param + 8))
        }
        ProtocolFamily::Mek => (10, 2, Some(10)),
        ProtocolFamily::Dcp => {
            check_pairs(spec.param)?;
            let big_n = spec.param;
            (10 * big_n + 4, 2 * big_n, Some(8 * big_n + 4))
        }
    };
    Ok(Overhead { n, k, n_over_k: n as f64 / k as f64, t_states })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TCount {
    /// T gates in the `CCZ_#N` circuit.
    pub injected_t_count: usize,
    /// T states consumed when `|CCZ_#N>` is synthillated.
    pub synthillation_t_states: usize,
}

pub fn tcount_cczhash(n: usize) -> Result<TCount, AnalyticError> {
    check_pairs(n)?;
    Ok(TCount { injected_t_count: 4 * n + 3, synthillation_t_states: 4 * n + 4 })
}

/// Linear coefficient of the step-one success probability `1 - c eps + ...`:
/// 8 for N=1 and 12 for N=2.
pub fn stored_p_synth_linear(n: usize) -> Result<f64, AnalyticError> {
    match n {
        1 => Ok(8.0),
        2 => Ok(12.0),
        _ => Err(AnalyticError::NoStoredConstant(n)),
    }
}

/// `eps_pi8^2` coefficient of the output error contributed by the synthillated
/// resource at `theta = pi/8`: 8 for N=1 and 16 for N=2.
pub fn stored_combined_pi8_coefficient(n: usize) -> Result<f64, AnalyticError> {
    match n {
        1 => Ok(8.0),
        2 => Ok(16.0),
        _ => Err(AnalyticError::NoStoredConstant(n)),
    }
}

/// Total `eps^2` coefficient when every input is a T state of error `eps` and
/// the pivot is Clifford (`eta = 0`): stored resource term plus the simulated
/// `eps_theta^2` coefficient.
pub fn chained_pi8_coefficient(n: usize, eps_theta2_coefficient: f64) -> Result<f64, AnalyticError> {
    Ok(stored_combined_pi8_coefficient(n)? + eps_theta2_coefficient)
}

/// Leading-order map `eps -> c eps^2` used by [`concatenation_cost`].
///
/// This-work uses `9` (`k = 2`) and `19` (`k = 4`) from the `pi/8` chaining and
/// otherwise the analytic bound `(2N - 1) + (6 + 14N + 8N^2)` with `N = k/2`.
/// Bravyi-Haah uses `1 + 3k`. MEK and DCP have no stored map.
pub fn leading_map_coefficient(spec: ProtocolSpec) -> Result<f64, AnalyticError> {
    match spec.family {
        ProtocolFamily::ThisWork => {
            even_k("this-work", spec.param)?;
            let n = spec.param / 2;
            match n {
                1 => chained_pi8_coefficient(1, 1.0),
                2 => chained_pi8_coefficient(2, 3.0),
                _ => {
                    let c = leading_coefficients_closed_form(n);
                    Ok(c.eps_theta2 + c.eps_pi8_2)
                }
            }
        }
        ProtocolFamily::BravyiHaah => {
            even_k("bravyi-haah", spec.param)?;
            Ok(1.0 + 3.0 * spec.param as f64)
        }
        ProtocolFamily::Mek | ProtocolFamily::Dcp => Err(AnalyticError::MissingCoefficient(spec.family.name().into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcatenationLevel {
    pub eps_in: f64,
    pub eps_out: f64,
    pub success_probability: f64,
    /// `n / (k p)` for this level.
    pub inputs_per_output: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcatenationReport {
    pub spec: ProtocolSpec,
    pub map_coefficient: f64,
    pub levels: Vec<ConcatenationLevel>,
    pub eps_out: f64,
    /// Product of `n_i / (k_i p_i)` over levels.
    pub total_inputs_per_output: f64,
}

/// Repeats the leading-order map `eps -> c eps^2` for `levels` rounds.
///
/// With `success_model` the per-level success probability is the closed-form
/// acceptance `(1 + (1 - 2 eps)^k) / 2` of a this-work round; otherwise it is 1.
/// `coefficient` overrides the stored map.
pub fn concatenation_cost(
    spec: ProtocolSpec,
    levels: usize,
    eps_in: f64,
    success_model: bool,
    coefficient: Option<f64>,
) -> Result<ConcatenationReport, AnalyticError> {
    if levels == 0 {
        return Err(AnalyticError::NoLevels);
    }
    super::check_rate("eps_in", eps_in)?;
    if success_model && spec.family != ProtocolFamily::ThisWork {
        return Err(AnalyticError::NoSuccessModel);
    }
    let o = overhead(spec)?;
    let c = match coefficient {
        Some(c) => c,
        None => leading_map_coefficient(spec)?,
    };
    let mut eps = eps_in;
    let mut total = 1.0;
    let mut out = Vec::with_capacity(levels);
    for level in 1..=levels {
        let eps_out = c * eps * eps;
        if eps_out >= eps || eps_out >= 0.5 {
            return Err(AnalyticError::Divergent { level, eps_in: eps, eps_out });
        }
        let p = if success_model { acceptance_closed_form(eps, o.k / 2) } else { 1.0 };
        let factor = o.n as f64 / (o.k as f64 * p);
        total *= factor;
        out.push(ConcatenationLevel { eps_in: eps, eps_out, success_probability: p, inputs_per_output: factor });
        eps = eps_out;
    }
    Ok(ConcatenationReport { spec, map_coefficient: c, levels: out, eps_out: eps, total_inputs_per_output: total })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: ProtocolFamily, param: usize) -> ProtocolSpec {
        ProtocolSpec { family, param }
    }

    #[test]
    fn overhead_table() {
        let o = overhead(spec(ProtocolFamily::ThisWork, 2)).unwrap();
        assert_eq!((o.n, o.k, o.n_over_k), (10, 2, 5.0));
        let o = overhead(spec(ProtocolFamily::ThisWork, 4)).unwrap();
        assert_eq!((o.n, o.k, o.n_over_k), (16, 4, 4.0));
        let o = overhead(spec(ProtocolFamily::BravyiHaah, 8)).unwrap();
        assert_eq!((o.n, o.k, o.n_over_k), (32, 8, 4.0));
        assert_eq!(
            overhead(spec(ProtocolFamily::ThisWork, 3)).unwrap_err(),
            AnalyticError::OddK { family: "this-work", k: 3 }
        );
        for k in (2..=40).step_by(2) {
            let a = overhead(spec(ProtocolFamily::ThisWork, k)).unwrap();
            let b = overhead(spec(ProtocolFamily::BravyiHaah, k)).unwrap();
            assert_eq!(a.n as i64 - b.n as i64, -4);
        }
        let big = overhead(spec(ProtocolFamily::ThisWork, 1 << 20)).unwrap();
        assert!((big.n_over_k - 3.0).abs() < 1e-5);
        let d = overhead(spec(ProtocolFamily::Dcp, 2)).unwrap();
        assert_eq!((d.n, d.k, d.t_states), (24, 4, Some(20)));
    }

    #[test]
    fn t_counts() {
        assert_eq!(tcount_cczhash(1).unwrap(), TCount { injected_t_count: 7, synthillation_t_states: 8 });
        assert_eq!(tcount_cczhash(2).unwrap(), TCount { injected_t_count: 11, synthillation_t_states: 12 });
        assert_eq!(tcount_cczhash(0).unwrap_err(), AnalyticError::NoPairs);
    }

    #[test]
    fn concatenation_examples() {
        let r = concatenation_cost(spec(ProtocolFamily::ThisWork, 2), 1, 0.01, false, None).unwrap();
        assert_eq!(r.total_inputs_per_output, 5.0);
        assert!((r.eps_out - 9e-4).abs() < 1e-15);
        let a = concatenation_cost(spec(ProtocolFamily::ThisWork, 4), 2, 0.001, false, None).unwrap();
        let b = concatenation_cost(spec(ProtocolFamily::BravyiHaah, 8), 2, 0.001, false, None).unwrap();
        assert_eq!((a.total_inputs_per_output, b.total_inputs_per_output), (16.0, 16.0));
        let p = concatenation_cost(spec(ProtocolFamily::ThisWork, 2), 1, 0.01, true, None).unwrap();
        assert!((p.levels[0].success_probability - acceptance_closed_form(0.01, 1)).abs() < 1e-15);
        assert!(p.total_inputs_per_output > 5.0);
        assert!(matches!(
            concatenation_cost(spec(ProtocolFamily::ThisWork, 2), 2, 0.2, false, None),
            Err(AnalyticError::Divergent { level: 1, .. })
        ));
        assert!(concatenation_cost(spec(ProtocolFamily::Mek, 2), 1, 0.01, false, None).is_err());
        assert!(concatenation_cost(spec(ProtocolFamily::Mek, 2), 1, 0.01, false, Some(15.0)).is_ok());
        assert_eq!(
            concatenation_cost(spec(ProtocolFamily::BravyiHaah, 8), 1, 0.01, true, None).unwrap_err(),
            AnalyticError::NoSuccessModel
        );
    }

    #[test]
    fn chained_constants() {
        assert_eq!(chained_pi8_coefficient(1, 1.0).unwrap(), 9.0);
        assert_eq!(chained_pi8_coefficient(2, 3.0).unwrap(), 19.0);
        assert_eq!(stored_p_synth_linear(2).unwrap(), 12.0);
        assert!(stored_combined_pi8_coefficient(3).is_err());
    }
}
