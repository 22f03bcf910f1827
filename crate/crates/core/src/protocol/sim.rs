use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::patterns::{enumerate_patterns, pattern_qubits, FaultPattern, ResolvedResourceModel, ResourceNoiseModel};
use super::{check_angle, ProtocolError, MAX_SIM_PAIRS};
use crate::circuit::{build_full_protocol, run_with_faults, Fault, ProtocolCircuit};
use crate::gate::GateOp;
use crate::poly::{NoisePolynomial, Rates};
use crate::statevec::StateVector;

/// Accepted weight and per-output errored weight of one fault pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternOutcome {
    pub acceptance: f64,
    /// Entry `i` is the accepted weight on `Z|R>` for input label `i + 1`.
    pub errors: Vec<f64>,
}

/// Removes rounding residue around the exact values 0 and 1.
fn snap(x: f64) -> f64 {
    if x.abs() < 1e-13 {
        0.0
    } else if (x - 1.0).abs() < 1e-13 {
        1.0
    } else {
        x
    }
}

/// Runs the protocol once with `pattern` applied. Input faults replace
/// `|R(t)>` by `Z|R(t)>`; resource faults follow the last gate of the tagged block;
/// pivot faults follow the pivot `R(2t)`.
pub fn simulate_pattern(
    pc: &ProtocolCircuit,
    support: &[usize],
    pattern: &FaultPattern,
) -> Result<PatternOutcome, ProtocolError> {
    let c = &pc.circuit;
    let n_inputs = 2 * pc.n_pairs();
    let zero = Complex64::new(0.0, 0.0);
    let qubits: Vec<[Complex64; 2]> = (0..c.num_qubits())
        .map(|q| match q {
            label @ 1.. if label <= n_inputs => {
                let t = pc.input_theta(label);
                if pattern.input_z >> (label - 1) & 1 == 1 {
                    StateVector::zr_qubit(t)
                } else {
                    StateVector::r_qubit(t)
                }
            }
            _ => [Complex64::new(1.0, 0.0), zero],
        })
        .collect();
    let initial = StateVector::product(&qubits)?;

    let mut faults = Vec::new();
    if let Some((mask, _)) = pattern.resource {
        let block = c.resource_block().expect("protocol circuit tags its resource block");
        for q in pattern_qubits(support, mask) {
            faults.push(Fault { after_gate: block.end - 1, gate: GateOp::z(q) });
        }
    }
    for (j, &pivot) in c.pivots().iter().enumerate() {
        if pattern.pivot_z >> j & 1 == 1 {
            faults.push(Fault { after_gate: pivot, gate: GateOp::z(pc.layout.gadget(j + 1)) });
        }
    }

    let branches = run_with_faults(c, initial, &faults)?;
    let mut acceptance = 0.0;
    let mut errors = vec![0.0; n_inputs];
    for b in &branches {
        acceptance += b.weight();
        for (i, e) in errors.iter_mut().enumerate() {
            *e += b.state.single_qubit_error_weight(i + 1, pc.input_theta(i + 1))?;
        }
    }
    Ok(PatternOutcome { acceptance: snap(acceptance), errors: errors.into_iter().map(snap).collect() })
}

/// Combines per-pattern outcomes into the acceptance polynomial and one
/// unnormalized error polynomial per output.
///
/// Outcomes are first summed in pattern order within groups sharing a
/// probability monomial, so the result does not depend on scheduling.
pub fn assemble_polynomials(
    patterns: &[FaultPattern],
    outcomes: &[PatternOutcome],
) -> (NoisePolynomial, Vec<NoisePolynomial>) {
    let n_out = outcomes.first().map_or(0, |o| o.errors.len());
    let mut groups: BTreeMap<(u32, bool, u32), (f64, Vec<f64>)> = BTreeMap::new();
    for (p, o) in patterns.iter().zip(outcomes) {
        let q = p.resource.map_or(1.0, |(_, q)| q);
        let g =
            groups.entry((p.input_faults(), p.resource.is_some(), p.pivot_faults())).or_insert((0.0, vec![0.0; n_out]));
        g.0 += q * o.acceptance;
        for (acc, e) in g.1.iter_mut().zip(&o.errors) {
            *acc += q * e;
        }
    }
    let mut acceptance = NoisePolynomial::zero();
    let mut errors = vec![NoisePolynomial::zero(); n_out];
    let Some(first) = patterns.first() else { return (acceptance, errors) };
    for ((a, faulty, c), (acc, errs)) in groups {
        let rep = FaultPattern {
            n_pairs: first.n_pairs,
            input_z: (1u64 << a) - 1,
            resource: faulty.then_some((0, 1.0)),
            pivot_z: (1u64 << c) - 1,
        };
        let mono = rep.probability();
        acceptance = acceptance.add(&mono.scale(acc));
        for (poly, e) in errors.iter_mut().zip(errs) {
            *poly = poly.add(&mono.scale(e));
        }
    }
    (acceptance, errors)
}

/// Leading coefficients of the conditional output error `eps'` and of the
/// acceptance probability `p_parity`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    /// `eps_theta^2` coefficient of `eps'` (largest over outputs).
    pub eps_theta2: f64,
    /// Linear `eps_theta` coefficient of `eps'`; zero for an error-detecting check.
    pub eps_theta: f64,
    pub eta: f64,
    pub eps_hash: f64,
    pub p_parity_eps_theta: f64,
    pub p_parity_eps_hash: f64,
    pub p_parity_eta: f64,
    /// Linear `eps_theta` coefficient of `(1 + (1 - 2 eps)^2N) / 2`, i.e. `-2N`.
    pub p_parity_eps_theta_closed_form: f64,
    /// Largest spread of any `eps'` coefficient across the outputs.
    pub output_spread: f64,
}

impl Coefficients {
    /// Coefficients expected not to depend on the angle. The `eps_hash` terms are
    /// excluded: a `Z` on a gadget ancilla turns the pivot `R(2t)` into `R(-2t)`,
    /// so its effect depends on `t`.
    pub fn angle_independent(&self) -> [f64; 5] {
        [self.eps_theta2, self.eps_theta, self.eta, self.p_parity_eps_theta, self.p_parity_eta]
    }
}

/// Output of a full exhaustive simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub tool_version: String,
    pub n_pairs: usize,
    pub thetas: Vec<f64>,
    pub model: ResolvedResourceModel,
    pub pattern_count: usize,
    pub acceptance: NoisePolynomial,
    /// Unnormalized error polynomial per output, input label order.
    pub errors: Vec<NoisePolynomial>,
    /// `errors[i] / acceptance` expanded to total degree 2.
    pub epsilon_prime_series: Vec<NoisePolynomial>,
    pub coefficients: Coefficients,
}

impl SimulationReport {
    /// Exact conditional error of every output at `at`.
    pub fn epsilon_prime(&self, at: Rates) -> Result<Vec<f64>, ProtocolError> {
        let a = self.acceptance.eval(at);
        if a <= 0.0 {
            return Err(ProtocolError::ZeroAcceptance);
        }
        Ok(self.errors.iter().map(|e| e.eval(at) / a).collect())
    }

    pub fn max_epsilon_prime(&self, at: Rates) -> Result<f64, ProtocolError> {
        Ok(self.epsilon_prime(at)?.into_iter().fold(0.0, f64::max))
    }
}

/// Reads the leading coefficients off the report's series and acceptance.
pub fn extract_coefficients(report: &SimulationReport) -> Coefficients {
    let pick = |e: [u32; 3]| -> (f64, f64) {
        let vals: Vec<f64> = report.epsilon_prime_series.iter().map(|s| s.coeff(e)).collect();
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        (hi, hi - lo)
    };
    let (eps_theta2, s1) = pick([2, 0, 0]);
    let (eps_theta, s2) = pick([1, 0, 0]);
    let (eta, s3) = pick([0, 0, 1]);
    let (eps_hash, s4) = pick([0, 1, 0]);
    Coefficients {
        eps_theta2,
        eps_theta,
        eta,
        eps_hash,
        p_parity_eps_theta: report.acceptance.coeff([1, 0, 0]),
        p_parity_eps_hash: report.acceptance.coeff([0, 1, 0]),
        p_parity_eta: report.acceptance.coeff([0, 0, 1]),
        p_parity_eps_theta_closed_form: -2.0 * report.n_pairs as f64,
        output_spread: s1.max(s2).max(s3).max(s4),
    }
}

/// Exhaustive simulation with the same angle on every pair.
pub fn simulate(n: usize, theta: f64, model: &ResourceNoiseModel) -> Result<SimulationReport, ProtocolError> {
    simulate_with_model(&vec![theta; n], model)
}

/// Exhaustive simulation with angle `thetas[j-1]` on pair `j`.
pub fn simulate_with_model(thetas: &[f64], model: &ResourceNoiseModel) -> Result<SimulationReport, ProtocolError> {
    let n = thetas.len();
    if n > MAX_SIM_PAIRS {
        return Err(ProtocolError::TooLarge { n, max: MAX_SIM_PAIRS });
    }
    for &t in thetas {
        check_angle(t)?;
    }
    let pc = build_full_protocol(n, thetas)?;
    let resolved = model.resolve(&pc)?;
    let patterns = enumerate_patterns(n, &resolved)?;
    log::debug!("simulating {} fault patterns for N={n}", patterns.len());
    let outcomes =
        patterns.par_iter().map(|p| simulate_pattern(&pc, &resolved.support, p)).collect::<Result<Vec<_>, _>>()?;
    let (acceptance, errors) = assemble_polynomials(&patterns, &outcomes);
    let epsilon_prime_series = errors
        .iter()
        .map(|e| e.series_div(&acceptance, 2).ok_or(ProtocolError::ZeroAcceptance))
        .collect::<Result<Vec<_>, _>>()?;
    let mut report = SimulationReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        n_pairs: n,
        thetas: thetas.to_vec(),
        model: resolved,
        pattern_count: patterns.len(),
        acceptance,
        errors,
        epsilon_prime_series,
        coefficients: Coefficients {
            eps_theta2: 0.0,
            eps_theta: 0.0,
            eta: 0.0,
            eps_hash: 0.0,
            p_parity_eps_theta: 0.0,
            p_parity_eps_hash: 0.0,
            p_parity_eta: 0.0,
            p_parity_eps_theta_closed_form: 0.0,
            output_spread: 0.0,
        },
    };
    report.coefficients = extract_coefficients(&report);
    Ok(report)
}

/// Coefficients across several angles and their worst disagreement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaScan {
    pub n_pairs: usize,
    pub thetas: Vec<f64>,
    pub coefficients: Vec<Coefficients>,
    /// Largest pairwise difference over [`Coefficients::angle_independent`].
    pub max_deviation: f64,
    /// Largest pairwise difference of the `eps_hash` coefficient of `eps'`.
    pub eps_hash_deviation: f64,
}

pub fn theta_independence_scan(
    n: usize,
    thetas: &[f64],
    model: &ResourceNoiseModel,
) -> Result<ThetaScan, ProtocolError> {
    if thetas.len() < 2 {
        return Err(ProtocolError::TooFewAngles(thetas.len()));
    }
    for &t in thetas {
        check_angle(t)?;
    }
    let coefficients =
        thetas.iter().map(|&t| simulate(n, t, model).map(|r| r.coefficients)).collect::<Result<Vec<_>, _>>()?;
    let mut max_deviation = 0.0f64;
    let mut eps_hash_deviation = 0.0f64;
    for a in &coefficients {
        for b in &coefficients {
            for (x, y) in a.angle_independent().iter().zip(b.angle_independent()) {
                max_deviation = max_deviation.max((x - y).abs());
            }
            eps_hash_deviation = eps_hash_deviation.max((a.eps_hash - b.eps_hash).abs());
        }
    }
    Ok(ThetaScan { n_pairs: n, thetas: thetas.to_vec(), coefficients, max_deviation, eps_hash_deviation })
}
