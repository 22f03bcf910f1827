use std::fmt::Write;
use std::path::{Path, PathBuf};

use paritycheck::analytic::{
    acceptance_closed_form, concatenation_cost, epsilon_prime_bound, leading_map_coefficient, overhead,
    p_bad_closed_form, synthillation_error_bound, tcount_cczhash, AnalyticError, NoisePoint, ProtocolFamily,
    ProtocolSpec,
};
use paritycheck::circuit::{build_full_protocol, random_angles, verify_all, CircuitError, IDENTITY_TOLERANCE};
use paritycheck::poly::Rates;
use paritycheck::protocol::{
    coefficient_csv, coefficient_text, monte_carlo_estimate, simulate_with_model, ProtocolError, ResourceNoiseModel,
};
use paritycheck::triortho::{
    code_params, complete_14_qubit_code, max_span_weight, parse_matrix_file, search_triorthogonal, verify_d_lemma,
    SearchCertificate, TriorthoError, MAX_SPAN_ROWS, SEARCH_MAX_ROWS,
};
use serde_json::{json, Value};
use thiserror::Error;

use crate::angle::parse_angle_list;
use crate::args::{BoundsArgs, Format, OverheadArgs, SimulateArgs, TriorthoAction, TriorthoArgs, VerifyArgs};

/// Smallest `D` width allowed by the nonexistence argument.
const MIN_D_WIDTH: usize = 6;
/// Column count below which no distance-2 triorthogonal code with k >= 1 exists.
const MIN_CODE_LENGTH: usize = 14;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Triortho(#[from] TriorthoError),
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// What a command produced, in every output form it supports.
pub struct Outcome {
    pub result: Value,
    pub text: String,
    pub csv: Option<String>,
    /// False when the command's claim failed (identity off, unexpected witness).
    pub claim_holds: bool,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable result")
}

fn sci_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6e}")).collect::<Vec<_>>().join(", ")
}

fn csv_rows<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for r in rows {
        w.write_record(r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
}

pub fn verify_identities(a: &VerifyArgs) -> Result<Outcome, CliError> {
    if a.angles == 0 {
        return Err(CliError::Usage("--angles must be at least 1".into()));
    }
    let n = usize::from(a.n);
    let thetas = random_angles(a.seed, a.angles);
    let reports = verify_all(n, &thetas)?;
    let all_passed = reports.iter().all(|r| r.passed);
    let rows: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "identity": r.identity.name(),
                "max_deviation": r.max_deviation,
                "passed": r.passed,
                "angles": r.thetas,
            })
        })
        .collect();
    let mut text = String::new();
    for r in &reports {
        let status = if r.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(text, "{status} {:<22} N={n} max deviation {:.3e}", r.identity.name(), r.max_deviation);
    }
    let csv = csv_rows(
        &["identity", "n_pairs", "max_deviation", "passed"],
        reports.iter().map(|r| {
            [r.identity.name().to_string(), n.to_string(), format!("{:?}", r.max_deviation), r.passed.to_string()]
        }),
    );
    Ok(Outcome {
        result: json!({
            "n_pairs": n,
            "thetas": thetas,
            "tolerance": IDENTITY_TOLERANCE,
            "identities": rows,
            "all_passed": all_passed,
        }),
        text,
        csv: Some(csv),
        claim_holds: all_passed,
    })
}

fn parse_model(spec: &str) -> Result<ResourceNoiseModel, CliError> {
    if let Some(path) = spec.strip_prefix("custom:") {
        return Ok(ResourceNoiseModel::parse_custom(&read(Path::new(path))?)?);
    }
    ResourceNoiseModel::from_name(spec)
        .ok_or_else(|| CliError::Usage(format!("unknown model {spec:?}; use uniform, single, worst or custom:<file>")))
}

pub fn simulate(a: &SimulateArgs) -> Result<Outcome, CliError> {
    let n = usize::from(a.n);
    let mut thetas = parse_angle_list(&a.theta).map_err(CliError::Usage)?;
    if thetas.len() == 1 {
        thetas = vec![thetas[0]; n];
    } else if thetas.len() != n {
        return Err(CliError::Usage(format!("--theta lists {} angles for N={n}", thetas.len())));
    }
    let model = parse_model(&a.model)?;
    let report = simulate_with_model(&thetas, &model)?;
    let mut text = coefficient_text(&report);

    let wants_rates = a.eps_theta.is_some() || a.eps_hash.is_some() || a.eta.is_some() || a.mc_samples.is_some();
    let rates = Rates::new(a.eps_theta.unwrap_or(0.0), a.eps_hash.unwrap_or(0.0), a.eta.unwrap_or(0.0));
    for (name, v) in [("eps-theta", rates.eps_theta), ("eps-hash", rates.eps_hash), ("eta", rates.eta)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(CliError::Usage(format!("--{name} must lie in [0, 1], got {v}")));
        }
    }
    let evaluation = if wants_rates {
        let p = report.acceptance.eval(rates);
        let eps = report.epsilon_prime(rates)?;
        let _ = writeln!(text, "at {rates:?}: p_parity = {p:.9e}, eps' = [{}]", sci_list(&eps));
        Some(json!({ "rates": rates, "p_parity": p, "epsilon_prime": eps }))
    } else {
        None
    };
    let monte_carlo = match a.mc_samples {
        Some(samples) => {
            let pc = build_full_protocol(n, &thetas)?;
            let resolved = model.resolve(&pc)?;
            let mc = monte_carlo_estimate(&pc, &resolved, rates, samples, a.seed)?;
            let _ = writeln!(
                text,
                "monte carlo ({samples} samples, seed {}): p_parity = {:.6e} +- {:.1e}, eps' = [{}]",
                a.seed,
                mc.p_parity,
                mc.p_parity_se,
                sci_list(&mc.epsilon_prime)
            );
            Some(mc)
        }
        None => None,
    };
    Ok(Outcome {
        result: json!({ "report": report, "evaluation": evaluation, "monte_carlo": monte_carlo }),
        csv: Some(coefficient_csv(&report)),
        text,
        claim_holds: true,
    })
}

pub fn bounds(a: &BoundsArgs) -> Result<Outcome, CliError> {
    let n = a.n as usize;
    let point = NoisePoint { n, eps_theta: a.eps_theta, eps_pi8: a.eps_pi8, eps_hash: a.eps_hash, eta: a.eta };
    let eps_prime = epsilon_prime_bound(&point)?;
    let eps_hash = point.resolved_eps_hash()?;
    let synth = a.eps_pi8.map(|e| synthillation_error_bound(e, n)).transpose()?;
    let source = match (a.eps_hash, a.eps_pi8) {
        (Some(_), _) => "given",
        (None, Some(_)) => "eps-pi8",
        (None, None) => "zero",
    };
    let acceptance = acceptance_closed_form(a.eps_theta, n);
    let p_bad = p_bad_closed_form(a.eps_theta, n);
    let mut rows =
        vec![("acceptance", acceptance), ("p_good", acceptance - p_bad), ("p_bad", p_bad), ("eps_hash", eps_hash)];
    if let Some(s) = synth {
        rows.push(("eps_hash_leading_coefficient", s.leading_coefficient));
    }
    rows.push(("epsilon_prime_bound", eps_prime));
    let text = rows.iter().map(|(k, v)| format!("{k:<30} {v:.6e}\n")).collect();
    let csv = csv_rows(&["quantity", "value"], rows.iter().map(|(k, v)| [k.to_string(), format!("{v:?}")]));
    Ok(Outcome {
        result: json!({
            "acceptance": acceptance,
            "p_good": acceptance - p_bad,
            "p_bad": p_bad,
            "eps_hash": eps_hash,
            "eps_hash_source": source,
            "synthillation": synth,
            "epsilon_prime_bound": eps_prime,
        }),
        text,
        csv: Some(csv),
        claim_holds: true,
    })
}

pub fn overhead_cmd(a: &OverheadArgs) -> Result<Outcome, CliError> {
    let family = ProtocolFamily::from_name(&a.family).ok_or_else(|| {
        CliError::Usage(format!("unknown family {:?}; use this-work, bravyi-haah, mek or dcp", a.family))
    })?;
    let missing = || CliError::Usage(format!("--k or --N is required for {}", family.name()));
    let param = match family {
        ProtocolFamily::ThisWork | ProtocolFamily::BravyiHaah => match (a.k, a.pairs) {
            (Some(k), _) => k,
            (None, Some(p)) => 2 * p,
            (None, None) => return Err(missing()),
        },
        ProtocolFamily::Dcp => match (a.k, a.pairs) {
            (Some(k), _) if k % 2 == 1 => return Err(AnalyticError::OddK { family: "dcp", k }.into()),
            (Some(k), _) => k / 2,
            (None, Some(p)) => p,
            (None, None) => return Err(missing()),
        },
        ProtocolFamily::Mek => 2,
    };
    let spec = ProtocolSpec { family, param };
    let o = overhead(spec)?;
    if a.eps_in.is_none() && (a.success_model || a.coefficient.is_some()) {
        return Err(CliError::Usage("--success-model and --coefficient need --eps-in".into()));
    }
    let concatenation = match a.eps_in {
        Some(eps) => Some(concatenation_cost(spec, a.levels.unwrap_or(1), eps, a.success_model, a.coefficient)?),
        None => None,
    };
    let map_coefficient = leading_map_coefficient(spec).ok();
    let tcount = match family {
        ProtocolFamily::ThisWork => Some(tcount_cczhash(param / 2)?),
        _ => None,
    };

    let mut text = String::new();
    let _ = writeln!(text, "{}: n = {}, k = {}, n/k = {}", family.name(), o.n, o.k, o.n_over_k);
    if let Some(t) = o.t_states {
        let _ = writeln!(text, "T states consumed: {t}");
    }
    if let Some(t) = tcount {
        let _ = writeln!(
            text,
            "CCZ_# T count: {} injected, {} via synthillation",
            t.injected_t_count, t.synthillation_t_states
        );
    }
    if let Some(c) = map_coefficient {
        let _ = writeln!(text, "leading map: eps -> {c} eps^2");
    }
    let csv = match &concatenation {
        Some(rep) => {
            let _ =
                writeln!(text, "{:>5} {:>14} {:>14} {:>10} {:>12}", "level", "eps_in", "eps_out", "success", "in/out");
            for (i, l) in rep.levels.iter().enumerate() {
                let _ = writeln!(
                    text,
                    "{:>5} {:>14.6e} {:>14.6e} {:>10.6} {:>12.4}",
                    i + 1,
                    l.eps_in,
                    l.eps_out,
                    l.success_probability,
                    l.inputs_per_output
                );
            }
            let _ = writeln!(text, "total inputs per output: {:.4}", rep.total_inputs_per_output);
            csv_rows(
                &["level", "eps_in", "eps_out", "success_probability", "inputs_per_output"],
                rep.levels.iter().enumerate().map(|(i, l)| {
                    [
                        (i + 1).to_string(),
                        format!("{:?}", l.eps_in),
                        format!("{:?}", l.eps_out),
                        format!("{:?}", l.success_probability),
                        format!("{:?}", l.inputs_per_output),
                    ]
                }),
            )
        }
        None => csv_rows(
            &["quantity", "value"],
            [("n", o.n.to_string()), ("k", o.k.to_string()), ("n_over_k", format!("{:?}", o.n_over_k))]
                .into_iter()
                .map(|(k, v)| [k.to_string(), v]),
        ),
    };
    Ok(Outcome {
        result: json!({
            "family": family.name(),
            "param": param,
            "overhead": o,
            "map_coefficient": map_coefficient,
            "cczhash_tcount": tcount,
            "concatenation": concatenation,
        }),
        text,
        csv: Some(csv),
        claim_holds: true,
    })
}

fn certificate_text(c: &SearchCertificate) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "search: {}", c.search);
    let _ = writeln!(s, "columns {:?}, rows {:?}, nodes {}", c.n_range, c.m_range, c.nodes);
    for k in &c.constraints {
        let _ = writeln!(s, "constraint: {k}");
    }
    for r in &c.symmetry_reductions {
        let _ = writeln!(s, "symmetry: {r}");
    }
    match c.witness() {
        Some(w) => {
            let _ = writeln!(s, "WITNESS");
            let _ = writeln!(s, "{w}");
        }
        None => {
            let _ = writeln!(s, "NONE-FOUND");
        }
    }
    s
}

pub fn triortho(a: &TriorthoArgs) -> Result<Outcome, CliError> {
    if a.format == Format::Csv {
        return Err(CliError::Usage("triortho output is available as text or json".into()));
    }
    let (result, text, claim_holds) = match &a.action {
        TriorthoAction::Check { file } => {
            let parsed = parse_matrix_file(&read(file)?)?;
            let g = &parsed.matrix;
            let (g1, g0) = g.split_by_parity();
            let params = code_params(g);
            let span = if g0.len() <= MAX_SPAN_ROWS { Some(max_span_weight(&g0)?) } else { None };
            let split_consistent = parsed.declared_g1_rows.map(|s| {
                g.rows()[..s].iter().all(|r| r.count_ones() % 2 == 1)
                    && g.rows()[s..].iter().all(|r| r.count_ones() % 2 == 0)
            });
            let tri = g.is_triorthogonal();
            let mut text = String::new();
            let _ = writeln!(text, "{} x {} matrix", g.num_rows(), g.num_cols());
            let _ = writeln!(text, "biorthogonal: {}", g.is_biorthogonal());
            let _ = writeln!(text, "triorthogonal: {tri}");
            let _ = writeln!(text, "rank: {}", g.rank());
            match &params {
                Ok(p) => {
                    let _ = writeln!(text, "code: n = {}, k = {}, d >= 2: {}", p.n, p.k, p.distance_at_least_2);
                }
                Err(e) => {
                    let _ = writeln!(text, "code: {e}");
                }
            }
            if let Some(w) = span {
                let _ = writeln!(text, "max weight in span of G0: {w}");
            }
            if let Some(ok) = split_consistent {
                let _ = writeln!(text, "declared G1/G0 split matches row parities: {ok}");
            }
            let result = json!({
                "matrix": g,
                "rows": g.num_rows(),
                "cols": g.num_cols(),
                "biorthogonal": g.is_biorthogonal(),
                "triorthogonal": tri,
                "rank": g.rank(),
                "odd_rows": g1.len(),
                "even_rows": g0.len(),
                "code_params": params.as_ref().ok(),
                "code_params_error": params.as_ref().err().map(|e| e.to_string()),
                "g0_max_span_weight": span,
                "declared_g1_rows": parsed.declared_g1_rows,
                "declared_split_consistent": split_consistent,
            });
            (result, text, tri)
        }
        TriorthoAction::Search { n, m_max, k_min, no_d2 } => {
            let m_max = m_max.unwrap_or_else(|| (*n).min(SEARCH_MAX_ROWS));
            let cert = search_triorthogonal(*n, m_max, *k_min, !no_d2)?;
            let nonexistence_claim = *k_min >= 1 && !no_d2 && *n < MIN_CODE_LENGTH;
            let holds = !(nonexistence_claim && cert.witness().is_some());
            (to_value(&cert), certificate_text(&cert), holds)
        }
        TriorthoAction::LemmaD { u_max } => {
            let cert = verify_d_lemma(*u_max)?;
            let holds = cert.witness().is_none_or(|w| w.num_cols() >= MIN_D_WIDTH);
            (to_value(&cert), certificate_text(&cert), holds)
        }
        TriorthoAction::Complete14 => {
            let cert = complete_14_qubit_code()?;
            let mut text = certificate_text(&cert);
            if let Some(p) = cert.details.get("witness_code_params") {
                let _ = writeln!(text, "code params: {p}");
            }
            let holds = cert.witness().is_some();
            (to_value(&cert), text, holds)
        }
    };
    Ok(Outcome { result, text, csv: None, claim_holds })
}
