use std::f64::consts::PI;

use paritycheck::analytic::{epsilon_prime_bound, NoisePoint};
use paritycheck::circuit::{build_full_protocol, parse_circuit, Channel};
use paritycheck::poly::Rates;
use paritycheck::protocol::{monte_carlo_estimate, simulate, theta_independence_scan, ResourceNoiseModel};
use proptest::prelude::*;

#[test]
fn full_protocol_survives_text_round_trip() {
    for n in 1..=2 {
        let pc = build_full_protocol(n, &vec![0.3; n]).unwrap();
        let parsed = parse_circuit(&pc.circuit.to_text()).unwrap();
        assert_eq!(parsed, pc.circuit);
        let data: Vec<usize> = (1..=2 * n).collect();
        let a = Channel::of_circuit(&pc.circuit, &data).unwrap();
        let b = Channel::of_circuit(&parsed, &data).unwrap();
        assert_eq!(a.distance(&b), 0.0);
    }
}

#[test]
fn monte_carlo_agrees_with_exact_polynomials() {
    let rates = Rates::new(0.04, 0.03, 0.02);
    for model in [ResourceNoiseModel::UniformZ, ResourceNoiseModel::WorstCase] {
        let report = simulate(1, PI / 8.0, &model).unwrap();
        let pc = build_full_protocol(1, &[PI / 8.0]).unwrap();
        let resolved = model.resolve(&pc).unwrap();
        let mc = monte_carlo_estimate(&pc, &resolved, rates, 40_000, 9).unwrap();
        let p = report.acceptance.eval(rates);
        assert!((mc.p_parity - p).abs() < 5.0 * mc.p_parity_se, "{} vs {p}", mc.p_parity);
        for (est, (se, exact)) in
            mc.epsilon_prime.iter().zip(mc.epsilon_prime_se.iter().zip(report.epsilon_prime(rates).unwrap()))
        {
            assert!((est - exact).abs() < 5.0 * se + 1e-12, "{est} +- {se} vs {exact}");
        }
    }
}

#[test]
fn three_pairs_match_closed_form_acceptance() {
    let report = simulate(3, 0.3, &ResourceNoiseModel::SingleZUniform).unwrap();
    for e in [0.0, 0.01, 0.1, 0.3] {
        let sim = report.acceptance.eval(Rates::new(e, 0.0, 0.0));
        let closed = 0.5 * (1.0 + (1.0 - 2.0 * e).powi(6));
        assert!((sim - closed).abs() < 1e-12);
    }
    assert!((report.coefficients.eps_theta2 - 5.0).abs() < 1e-9);
}

#[test]
fn angle_scan_reports_hash_dependence_separately() {
    let scan = theta_independence_scan(1, &[PI / 8.0, 0.3, 0.5], &ResourceNoiseModel::SingleZUniform).unwrap();
    assert!(scan.max_deviation < 1e-9);
    assert!(scan.eps_hash_deviation > 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simulated_error_never_exceeds_bound(
        et in 0.0f64..0.1,
        eh in 0.0f64..0.1,
        eta in 0.0f64..0.1,
        model_idx in 0usize..3,
    ) {
        let model = [ResourceNoiseModel::UniformZ, ResourceNoiseModel::SingleZUniform, ResourceNoiseModel::WorstCase]
            [model_idx].clone();
        let report = simulate(1, 0.3, &model).unwrap();
        let sim = report.max_epsilon_prime(Rates::new(et, eh, eta)).unwrap();
        let bound = epsilon_prime_bound(&NoisePoint { n: 1, eps_theta: et, eps_pi8: None, eps_hash: Some(eh), eta }).unwrap();
        prop_assert!(sim <= bound + 1e-15, "{} > {}", sim, bound);
    }
}
