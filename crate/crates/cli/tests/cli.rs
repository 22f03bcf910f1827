use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_paritycheck");

fn manifest_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn run(args: &[&str]) -> Run {
    run_env(args, &[])
}

fn schema() -> Value {
    serde_json::from_str(&std::fs::read_to_string(manifest_path("schema/envelope.schema.json")).unwrap()).unwrap()
}

fn type_matches(v: &Value, ty: &str) -> bool {
    match ty {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "number" => v.is_number(),
        "integer" => v.is_u64() || v.is_i64() || v.as_f64().is_some_and(|f| f.fract() == 0.0),
        other => panic!("schema type {other} not handled by this checker"),
    }
}

/// Checks the schema keywords the shipped schema uses: type, enum, minimum,
/// required, properties, items.
fn validate(v: &Value, s: &Value, path: &str) -> Result<(), String> {
    if let Some(ty) = s.get("type") {
        let ok = match ty {
            Value::String(t) => type_matches(v, t),
            Value::Array(ts) => ts.iter().any(|t| type_matches(v, t.as_str().unwrap())),
            _ => panic!("bad type keyword"),
        };
        if !ok {
            return Err(format!("{path}: {v} is not of type {ty}"));
        }
    }
    if let Some(Value::Array(options)) = s.get("enum") {
        if !options.contains(v) {
            return Err(format!("{path}: {v} not in enum"));
        }
    }
    if let (Some(min), Some(x)) = (s.get("minimum").and_then(Value::as_f64), v.as_f64()) {
        if x < min {
            return Err(format!("{path}: {x} below minimum {min}"));
        }
    }
    if let Value::Object(map) = v {
        if let Some(Value::Array(req)) = s.get("required") {
            for r in req {
                let key = r.as_str().unwrap();
                if !map.contains_key(key) {
                    return Err(format!("{path}: missing required {key}"));
                }
            }
        }
        if let Some(Value::Object(props)) = s.get("properties") {
            for (k, sub) in props {
                if let Some(child) = map.get(k) {
                    validate(child, sub, &format!("{path}.{k}"))?;
                }
            }
        }
    }
    if let (Value::Array(items), Some(item_schema)) = (v, s.get("items")) {
        for (i, it) in items.iter().enumerate() {
            validate(it, item_schema, &format!("{path}[{i}]"))?;
        }
    }
    Ok(())
}

/// Runs a command with `--format json`, checks the exit code and validates the
/// envelope and its result against the shipped schema.
fn json_run(args: &[&str], expect_code: i32) -> Value {
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--format", "json"]);
    let r = run(&full);
    assert_eq!(r.code, expect_code, "{args:?}\nstdout: {}\nstderr: {}", r.stdout, r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("{args:?}: bad json {e}\n{}", r.stdout));
    let s = schema();
    validate(&v, &s, "$").unwrap();
    let command = v["command"].as_str().unwrap();
    validate(&v["result"], &s["definitions"][command], "$.result").unwrap();
    v
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn schema_checker_rejects_bad_documents() {
    let s = schema();
    let bad = serde_json::json!({"command": "simulate", "parameters": {}, "tool_version": "x", "result": {}});
    assert!(validate(&bad, &s, "$").is_err());
    let bad = serde_json::json!({
        "command": "nope", "parameters": {}, "tool_version": "x", "wall_time_ms": 1.0, "result": {}
    });
    assert!(validate(&bad, &s, "$").is_err());
    let bad_result = serde_json::json!({"acceptance": "1"});
    assert!(validate(&bad_result, &s["definitions"]["bounds"], "$").is_err());
}

#[test]
fn verify_identities_exit_codes() {
    let r = run(&["verify-identities", "--n", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines.iter().all(|l| l.starts_with("PASS ")));
    let v = json_run(&["verify-identities", "--n", "2"], 0);
    assert_eq!(v["result"]["all_passed"], Value::Bool(true));
    assert_eq!(v["result"]["identities"].as_array().unwrap().len(), 5);
    assert_eq!(run(&["verify-identities", "--n", "9"]).code, 2);
    assert_eq!(run(&["verify-identities"]).code, 2);
}

#[test]
fn simulate_single_pair_coefficients() {
    let v = json_run(&["simulate", "--n", "1", "--theta", "pi/8"], 0);
    let c = &v["result"]["report"]["coefficients"];
    assert!(close(c["eps_theta2"].as_f64().unwrap(), 1.0, 1e-9));
    assert!(close(c["eta"].as_f64().unwrap(), 0.25, 1e-9));
    assert!(close(v["result"]["report"]["thetas"][0].as_f64().unwrap(), std::f64::consts::PI / 8.0, 0.0));
}

#[test]
fn simulate_two_pairs() {
    let v = json_run(&["simulate", "--n", "2", "--theta", "0.3", "--model", "single"], 0);
    let c = &v["result"]["report"]["coefficients"];
    assert!(close(c["eps_theta2"].as_f64().unwrap(), 3.0, 1e-9));
}

#[test]
fn simulate_rejects_bad_input() {
    let r = run(&["simulate", "--n", "1", "--theta", "0"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("degenerate"), "{}", r.stderr);
    assert_eq!(run(&["simulate", "--n", "1", "--theta", "pi/x"]).code, 2);
    assert_eq!(run(&["simulate", "--n", "1", "--theta", "0.3", "--model", "gaussian"]).code, 2);
    assert_eq!(run(&["simulate", "--n", "4", "--theta", "0.3"]).code, 2);
    assert_eq!(run(&["simulate", "--n", "2", "--theta", "0.3,0.4,0.5"]).code, 2);
}

#[test]
fn simulate_custom_model() {
    // Z on the parity ancilla is always rejected; Z on the gadget ancilla at
    // theta = pi/8 halves acceptance and leaves each output wrong with weight 1/4
    let model = format!("custom:{}", manifest_path("tests/data/custom_model.txt").display());
    let v = json_run(&["simulate", "--n", "1", "--theta", "pi/8", "--model", &model], 0);
    let c = &v["result"]["report"]["coefficients"];
    assert!(close(c["p_parity_eps_hash"].as_f64().unwrap(), -0.75, 1e-9), "{c}");
    assert!(close(c["eps_hash"].as_f64().unwrap(), 0.125, 1e-9), "{c}");
}

#[test]
fn simulate_csv_and_monte_carlo() {
    let r = run(&["simulate", "--n", "1", "--theta", "pi/8", "--format", "csv"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("quantity,eps_theta,eps_hash,eta,coeff\n"));
    let v = json_run(
        &["simulate", "--n", "1", "--theta", "pi/8", "--eps-theta", "0.05", "--eta", "0.02", "--mc-samples", "20000"],
        0,
    );
    let exact = v["result"]["evaluation"]["epsilon_prime"][0].as_f64().unwrap();
    let mc = &v["result"]["monte_carlo"];
    let est = mc["epsilon_prime"][0].as_f64().unwrap();
    let se = mc["epsilon_prime_se"][0].as_f64().unwrap();
    assert!((est - exact).abs() < 5.0 * se + 1e-12, "mc {est} +- {se} vs exact {exact}");
}

#[test]
fn bounds_examples() {
    let v = json_run(&["bounds", "--n", "1"], 0);
    let r = &v["result"];
    assert_eq!(r["acceptance"].as_f64(), Some(1.0));
    assert_eq!(r["epsilon_prime_bound"].as_f64(), Some(0.0));
    assert_eq!(r["p_bad"].as_f64(), Some(0.0));
    assert_eq!(r["eps_hash"].as_f64(), Some(0.0));

    let v = json_run(&["bounds", "--n", "1", "--eps-theta", "0.01"], 0);
    // (2N-1) e^2 / ((1 + (1-2e)^2) / 2) with N=1
    let e: f64 = 0.01;
    let expect = e * e / ((1.0 + (1.0 - 2.0 * e).powi(2)) / 2.0);
    assert!(close(v["result"]["epsilon_prime_bound"].as_f64().unwrap(), expect, 1e-15));
    assert!(close(expect, 1.0202e-4, 1e-8));

    let v = json_run(&["bounds", "--n", "2", "--eps-pi8", "0.01"], 0);
    assert_eq!(v["result"]["eps_hash_source"], "eps-pi8");
    let synth = v["result"]["synthillation"]["value"].as_f64().unwrap();
    assert!(synth > 0.0 && close(v["result"]["eps_hash"].as_f64().unwrap(), synth, 0.0));

    assert_eq!(run(&["bounds", "--n", "1", "--eps-theta", "1.5"]).code, 2);
    assert_eq!(run(&["bounds", "--n", "1", "--eps-pi8", "0.1", "--eps-hash", "0.1"]).code, 2);
}

#[test]
fn overhead_examples() {
    let v = json_run(&["overhead", "--family", "this-work", "--k", "2"], 0);
    assert_eq!(v["result"]["overhead"]["n_over_k"].as_f64(), Some(5.0));
    let v = json_run(&["overhead", "--family", "bravyi-haah", "--k", "8"], 0);
    assert_eq!(v["result"]["overhead"]["n_over_k"].as_f64(), Some(4.0));
    let v = json_run(&["overhead", "--family", "this-work", "--N", "2"], 0);
    assert_eq!(v["result"]["overhead"]["n"].as_u64(), Some(16));
    let r = run(&["overhead", "--family", "this-work", "--k", "3"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("even"), "{}", r.stderr);
    assert_eq!(run(&["overhead", "--family", "unknown", "--k", "2"]).code, 2);
    assert_eq!(run(&["overhead", "--family", "this-work", "--k", "2", "--levels", "2"]).code, 2);

    let v = json_run(
        &["overhead", "--family", "this-work", "--k", "2", "--levels", "2", "--eps-in", "0.01", "--success-model"],
        0,
    );
    let levels = v["result"]["concatenation"]["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 2);
    assert!(close(levels[0]["eps_out"].as_f64().unwrap(), 9.0 * 1e-4, 1e-15));
    let r = run(&["overhead", "--family", "mek", "--eps-in", "0.01", "--levels", "1"]);
    assert_eq!(r.code, 2, "MEK has no stored map: {}", r.stdout);
    let v = json_run(&["overhead", "--family", "mek", "--eps-in", "0.01", "--coefficient", "35"], 0);
    assert!(close(v["result"]["concatenation"]["eps_out"].as_f64().unwrap(), 35e-4, 1e-15));
}

#[test]
fn triortho_check() {
    let d = manifest_path("tests/data/reference_d.txt");
    let v = json_run(&["triortho", "check", d.to_str().unwrap()], 0);
    assert_eq!(v["result"]["triorthogonal"], Value::Bool(true));
    assert_eq!(v["result"]["biorthogonal"], Value::Bool(true));
    let r = run(&["triortho", "check", d.to_str().unwrap()]);
    assert!(r.stdout.contains("triorthogonal: true"));

    let code = manifest_path("tests/data/code14.txt");
    let v = json_run(&["triortho", "check", code.to_str().unwrap()], 0);
    assert_eq!(v["result"]["code_params"], serde_json::json!({"n": 14, "k": 2, "distance_at_least_2": true}));
    assert_eq!(v["result"]["declared_split_consistent"], Value::Bool(true));
    assert_eq!(v["result"]["g0_max_span_weight"].as_u64(), Some(8));

    let bad = manifest_path("tests/data/not_biorthogonal.txt");
    let v = json_run(&["triortho", "check", bad.to_str().unwrap()], 1);
    assert_eq!(v["result"]["biorthogonal"], Value::Bool(false));
    assert_eq!(run(&["triortho", "check", "/nonexistent/matrix.txt"]).code, 2);
    assert_eq!(run(&["triortho", "check", d.to_str().unwrap(), "--format", "csv"]).code, 2);
}

#[test]
fn triortho_searches() {
    let v = json_run(&["triortho", "search", "--n", "8", "--m-max", "6"], 0);
    assert_eq!(v["result"]["result"]["status"], "NONE-FOUND");
    assert_eq!(v["result"]["m_range"], serde_json::json!([1, 6]));

    // a witness is expected once the distance requirement is dropped
    let v = json_run(&["triortho", "search", "--n", "3", "--m-max", "2", "--no-d2"], 0);
    assert_eq!(v["result"]["result"]["matrix"], serde_json::json!(["111"]));

    let v = json_run(&["triortho", "complete-14"], 0);
    assert_eq!(v["result"]["result"]["status"], "WITNESS");
    assert_eq!(
        v["result"]["details"]["witness_code_params"],
        serde_json::json!({"n": 14, "k": 2, "distance_at_least_2": true})
    );

    let v = json_run(&["triortho", "lemma-d", "--u-max", "5"], 0);
    assert_eq!(v["result"]["result"]["status"], "NONE-FOUND");
    assert_eq!(run(&["triortho", "search", "--n", "20"]).code, 2);
    assert_eq!(run(&["triortho", "lemma-d", "--u-max", "9"]).code, 2);
}

#[test]
fn results_are_deterministic() {
    let cases: [&[&str]; 3] = [
        &["simulate", "--n", "1", "--theta", "0.3", "--eps-theta", "0.1", "--mc-samples", "500", "--seed", "7"],
        &["triortho", "search", "--n", "7", "--m-max", "5"],
        &["verify-identities", "--n", "1", "--seed", "3"],
    ];
    for args in cases {
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--format", "json"]);
        let a = run_env(&full, &[("PARITYCHECK_THREADS", "1")]);
        let b = run_env(&full, &[("PARITYCHECK_THREADS", "4")]);
        let c = run(&full);
        let payload = |r: &Run| {
            let v: Value = serde_json::from_str(&r.stdout).unwrap();
            serde_json::to_string(&v["result"]).unwrap()
        };
        assert_eq!(payload(&a), payload(&b), "{args:?}");
        assert_eq!(payload(&a), payload(&c), "{args:?}");
    }
}

#[test]
fn bad_thread_setting_is_ignored() {
    let r = run_env(&["bounds", "--n", "1"], &[("PARITYCHECK_THREADS", "zero")]);
    assert_eq!(r.code, 0);
    assert!(r.stderr.contains("PARITYCHECK_THREADS"));
}

/// Structural comparison with a small tolerance on numbers.
fn approx_eq(a: &Value, b: &Value, path: &str) -> Result<(), String> {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            if (x - y).abs() <= 1e-12 + 1e-9 * y.abs() {
                Ok(())
            } else {
                Err(format!("{path}: {x} != {y}"))
            }
        }
        (Value::Array(xs), Value::Array(ys)) => {
            if xs.len() != ys.len() {
                return Err(format!("{path}: length {} != {}", xs.len(), ys.len()));
            }
            xs.iter().zip(ys).enumerate().try_for_each(|(i, (x, y))| approx_eq(x, y, &format!("{path}[{i}]")))
        }
        (Value::Object(xs), Value::Object(ys)) => {
            if xs.keys().ne(ys.keys()) {
                return Err(format!("{path}: keys differ"));
            }
            xs.iter().try_for_each(|(k, x)| approx_eq(x, &ys[k], &format!("{path}.{k}")))
        }
        _ if a == b => Ok(()),
        _ => Err(format!("{path}: {a} != {b}")),
    }
}

/// Pinned envelopes (minus wall time). Set `PARITYCHECK_UPDATE_GOLDEN=1` to
/// rewrite them after an intended change.
#[test]
fn golden_envelopes() {
    let d = manifest_path("tests/data/reference_d.txt");
    let d = d.to_str().unwrap();
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("simulate_n1_pi8", vec!["simulate", "--n", "1", "--theta", "pi/8"]),
        ("simulate_n2_single", vec!["simulate", "--n", "2", "--theta", "0.3", "--model", "single"]),
        ("bounds_n1", vec!["bounds", "--n", "1", "--eps-theta", "0.01", "--eta", "0.001"]),
        ("bounds_n2_pi8", vec!["bounds", "--n", "2", "--eps-pi8", "0.01"]),
        (
            "overhead_this_work",
            vec![
                "overhead",
                "--family",
                "this-work",
                "--k",
                "4",
                "--levels",
                "3",
                "--eps-in",
                "0.005",
                "--success-model",
            ],
        ),
        ("triortho_check_d", vec!["triortho", "check", d]),
        ("triortho_complete_14", vec!["triortho", "complete-14"]),
        ("triortho_lemma_d", vec!["triortho", "lemma-d", "--u-max", "7"]),
    ];
    let update = std::env::var("PARITYCHECK_UPDATE_GOLDEN").is_ok_and(|v| v == "1");
    for (name, args) in cases {
        let mut v = json_run(&args, 0);
        let obj = v.as_object_mut().unwrap();
        obj.remove("wall_time_ms");
        // file paths depend on the checkout location
        if let Some(p) = obj.get_mut("parameters").and_then(|p| p.get_mut("file")) {
            *p = Value::String("reference_d.txt".into());
        }
        let path = manifest_path(&format!("tests/golden/{name}.json"));
        if update {
            std::fs::write(&path, serde_json::to_string_pretty(&v).unwrap() + "\n").unwrap();
            continue;
        }
        let golden: Value = serde_json::from_str(
            &std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display())),
        )
        .unwrap();
        approx_eq(&v, &golden, name).unwrap();
    }
}
