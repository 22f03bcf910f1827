//! Exhaustive fault-pattern simulation of the full step-two protocol.
//!
//! Noise model: every input carries a `Z` with probability `eps_theta`, the
//! `CCZ_#N` resource suffers one aggregate event with probability `eps_hash` whose
//! `Z` pattern on the block's qubits is drawn from a [`ResourceNoiseModel`], and the
//! pivotal rotation of every gadget is followed by a `Z` with probability `eta`.
//! Each pattern is simulated exactly and the results are combined into
//! polynomials in `(eps_theta, eps_hash, eta)`.

mod montecarlo;
mod patterns;
mod report;
mod sim;

use thiserror::Error;

use crate::circuit::CircuitError;

pub use montecarlo::{monte_carlo_estimate, MonteCarloEstimate};
pub use patterns::{enumerate_patterns, FaultPattern, ResolvedResourceModel, ResourceNoiseModel};
pub use report::{coefficient_csv, coefficient_text};
pub use sim::{
    assemble_polynomials, extract_coefficients, simulate, simulate_pattern, simulate_with_model,
    theta_independence_scan, Coefficients, PatternOutcome, SimulationReport, ThetaScan,
};

/// Largest number of input pairs the enumerator accepts.
pub const MAX_SIM_PAIRS: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("N={n} exceeds the simulation limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("angle {0} is a multiple of pi/2; the pivot rotation is degenerate there")]
    DegenerateAngle(f64),
    #[error("theta scan needs at least two angles, got {0}")]
    TooFewAngles(usize),
    #[error("acceptance probability vanishes; conditional error is undefined")]
    ZeroAcceptance,
    #[error("custom resource model: {0}")]
    CustomModel(String),
    #[error("Monte Carlo needs at least one sample")]
    NoSamples,
}

impl From<crate::statevec::StateError> for ProtocolError {
    fn from(e: crate::statevec::StateError) -> Self {
        ProtocolError::Circuit(e.into())
    }
}

/// Rejects angles at which `R(2t)` is a Pauli or the identity.
pub fn check_angle(theta: f64) -> Result<(), ProtocolError> {
    let k = theta / std::f64::consts::FRAC_PI_2;
    if !theta.is_finite() || (k - k.round()).abs() < 1e-9 {
        return Err(ProtocolError::DegenerateAngle(theta));
    }
    Ok(())
}
