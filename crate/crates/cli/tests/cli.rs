mod common;

use common::{args, run_cli, smoke_matrix, write_fixtures};
use ordlab::dist::ScoreVector;
use ordlab::maxent::{solve_maxent, LinearConstraint, DEFAULT_TOL};

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = run_cli(&args(&["bogus"]), &[]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.is_empty());
}

#[test]
fn unnormalized_distribution_exits_one() {
    let out = run_cli(&args(&["majo", "compare", "[0.5, 0.3]", "[0.5, 0.5]"]), &[]);
    assert_eq!(out.code, 1);
    assert!(out.stderr_text().contains("NotNormalized"), "{}", out.stderr_text());
}

#[test]
fn non_stochastic_chain_names_the_matrix() {
    let chain = r#"{"p0": [0.5, 0.5], "mats": [[[0.5, 0.5], [0.48, 0.5]]]}"#;
    let out = run_cli(&args(&["fluct", "jarzynski", chain]), &[]);
    assert_eq!(out.code, 1);
    let err = out.stderr_text();
    assert!(err.contains("ParseError") && err.contains("mats[0]"), "{err}");
}

#[test]
fn maxent_solve_matches_library() {
    let out = run_cli(&args(&["maxent", "solve", "--energy", "[1, -1, 0]", "--target", "1/4"]), &[]);
    assert_eq!(out.code, 0);
    let v = out.json();
    let c = LinearConstraint { energy: ScoreVector::new(vec![1.0, -1.0, 0.0]).unwrap(), target: 0.25 };
    let sol = solve_maxent(&c, DEFAULT_TOL).unwrap();
    // JSON number parsing may round the last bit
    let close = |a: f64, b: f64| (a - b).abs() <= 4.0 * f64::EPSILON;
    assert!(close(v["result"]["beta"].as_f64().unwrap(), sol.beta));
    let dist: Vec<f64> = v["result"]["dist"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(dist.iter().zip(sol.dist.probs()).all(|(a, b)| close(*a, *b)));
    assert_eq!(v["meta"]["seed"], 0);
}

#[test]
fn crooks_csv_has_headers() {
    let dir = tempfile::tempdir().unwrap();
    write_fixtures(dir.path());
    let chain = dir.path().join("crooks.json").display().to_string();
    let out = run_cli(&args(&["fluct", "crooks", "--exact", &chain, "--emit", "csv"]), &[]);
    assert_eq!(out.code, 0);
    let text = out.stdout_text();
    assert_eq!(text.lines().next(), Some("w,lhs,rhs,gap"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn rational_chain_reports_exact_value() {
    let dir = tempfile::tempdir().unwrap();
    write_fixtures(dir.path());
    let chain = dir.path().join("crooks.json").display().to_string();
    let v = run_cli(&args(&["fluct", "jarzynski", "--exact", &chain]), &[]).json();
    assert_eq!(v["result"]["rational_value"], "1");
    let float_chain = dir.path().join("crooks_f.json").display().to_string();
    let v = run_cli(&args(&["fluct", "jarzynski", "--exact", &float_chain]), &[]).json();
    assert!(v["result"].get("rational_value").is_none());
}

#[test]
fn grid_arguments_accept_negative_ranges() {
    let dir = tempfile::tempdir().unwrap();
    write_fixtures(dir.path());
    let samples = dir.path().join("samples.csv").display().to_string();
    let out = run_cli(&args(&["fluct", "kde", &samples, "--grid", "-0.5:0.5:0.25", "--emit", "csv"]), &[]);
    assert_eq!(out.code, 0, "{}", out.stderr_text());
    assert_eq!(out.stdout_text().lines().count(), 6);
}

#[test]
fn smoke_matrix_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write_fixtures(dir.path());
    let matrix = smoke_matrix(dir.path());
    let (ok, errors) = matrix.split_at(matrix.len() - 4);
    for a in ok {
        let out = run_cli(a, &[]);
        assert_eq!(out.code, 0, "{}: {}", a.join(" "), out.stderr_text());
        assert!(out.stderr.is_empty(), "{}", a.join(" "));
    }
    let codes: Vec<i32> = errors.iter().map(|a| run_cli(a, &[]).code).collect();
    assert_eq!(codes, vec![1, 1, 1, 2]);
    assert!(run_cli(&errors[2], &[]).stderr_text().contains("HypothesisViolated"));
}
