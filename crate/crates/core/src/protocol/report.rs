use std::fmt::Write;

use super::sim::SimulationReport;
use crate::poly::NoisePolynomial;

fn named_polynomials(r: &SimulationReport) -> Vec<(String, &NoisePolynomial)> {
    let mut out = vec![("acceptance".to_string(), &r.acceptance)];
    out.extend(r.errors.iter().enumerate().map(|(i, p)| (format!("error_{}", i + 1), p)));
    out.extend(r.epsilon_prime_series.iter().enumerate().map(|(i, p)| (format!("eps_prime_{}", i + 1), p)));
    out
}

/// Coefficient table with one row per polynomial term:
/// `quantity,eps_theta,eps_hash,eta,coeff`.
pub fn coefficient_csv(r: &SimulationReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = ["quantity", "eps_theta", "eps_hash", "eta", "coeff"];
    // writing into a Vec cannot fail
    w.write_record(header).expect("in-memory csv");
    for (name, poly) in named_polynomials(r) {
        for (e, c) in poly.terms() {
            w.write_record([name.clone(), e[0].to_string(), e[1].to_string(), e[2].to_string(), format!("{c:?}")])
                .expect("in-memory csv");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv output is utf-8")
}

/// Short human-readable summary.
pub fn coefficient_text(r: &SimulationReport) -> String {
    let c = &r.coefficients;
    let mut s = String::new();
    let _ = writeln!(s, "N = {}, theta = {:?}, resource model = {}", r.n_pairs, r.thetas, r.model.name);
    let _ = writeln!(s, "patterns simulated: {}", r.pattern_count);
    let _ = writeln!(s, "eps' ~ {:.6} eps_theta^2 + {:.6} eta + {:.6} eps_hash", c.eps_theta2, c.eta, c.eps_hash);
    let _ = writeln!(
        s,
        "p_parity ~ 1 + {:.6} eps_theta + {:.6} eta + {:.6} eps_hash (closed form eps_theta term: {:.1})",
        c.p_parity_eps_theta, c.p_parity_eta, c.p_parity_eps_hash, c.p_parity_eps_theta_closed_form
    );
    let _ = writeln!(s, "acceptance = {}", r.acceptance);
    for (i, e) in r.epsilon_prime_series.iter().enumerate() {
        let _ = writeln!(s, "eps'_{} = {} + O(3)", i + 1, e);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{simulate, ResourceNoiseModel};

    #[test]
    fn csv_lists_every_term() {
        let r = simulate(1, 0.3, &ResourceNoiseModel::SingleZUniform).unwrap();
        let text = coefficient_csv(&r);
        let mut rows = csv::Reader::from_reader(text.as_bytes());
        let n_terms: usize = named_polynomials(&r).iter().map(|(_, p)| p.terms().count()).sum();
        assert_eq!(rows.records().count(), n_terms);
        assert!(text.starts_with("quantity,eps_theta,eps_hash,eta,coeff\n"));
        assert!(text.contains("eps_prime_1,2,0,0,"));
    }
}
