//! Fixture files and the smoke-test matrix of CLI invocations.

use std::path::Path;
use std::process::Command;

pub const BIN: &str = env!("CARGO_BIN_EXE_ordlab");

/// Exit code, stdout and stderr of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
}

// not every test binary uses every helper
#[allow(dead_code)]
impl Outcome {
    pub fn stdout_text(&self) -> String {
        String::from_utf8(self.stdout.clone()).expect("utf-8 stdout")
    }

    pub fn stderr_text(&self) -> String {
        String::from_utf8(self.stderr.clone()).expect("utf-8 stderr")
    }

    pub fn json(&self) -> serde_json::Value {
        serde_json::from_slice(&self.stdout).expect("JSON on stdout")
    }
}

pub fn run_cli(args: &[String], envs: &[(&str, &str)]) -> Outcome {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("ORDLAB_JOBS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Outcome { code: out.status.code().unwrap_or(-1), stdout: out.stdout, stderr: out.stderr }
}

pub fn args(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// Writes the input files used by [`smoke_matrix`].
pub fn write_fixtures(dir: &Path) {
    let files = [
        ("p.json", r#"["1/2", "1/4", "1/4"]"#),
        ("q.json", r#"["1/2", "1/2", "0"]"#),
        ("pf.json", "[0.5, 0.25, 0.25]"),
        ("qf.csv", "0.45,0.20,0.35\n"),
        ("d.json", r#"["1/2", "1/3", "1/6"]"#),
        ("bad_dist.json", "[0.5, 0.3]"),
        ("pairs.csv", "1/2,1/4,1/4\n1/2,1/2,0\n0.6,0.3,0.1\n0.4,0.4,0.2\n0.7,0.2,0.1\n1/3,1/3,1/3\n"),
        ("pairs2.csv", "0.9,0.1\n0.6,0.4\n0.5,0.5\n0.2,0.8\n"),
        ("v.json", r#"{"n": 3, "pairs": [[0, 2], [1, 2]], "labels": ["a", "b", "t"]}"#),
        (
            "crooks.json",
            r#"{"p0": ["1/2", "1/2"], "mats": [[["1/2", "1/2"], ["1/2", "1/2"]], [["2/3", "2/3"], ["1/3", "1/3"]]]}"#,
        ),
        (
            "crooks_f.json",
            r#"{"p0": [0.5, 0.5], "mats": [[[0.5, 0.5], [0.5, 0.5]], [[0.6666666666666666, 0.6666666666666666], [0.3333333333333333, 0.3333333333333333]]]}"#,
        ),
        (
            "two_state.json",
            r#"{"p0": [0.5, 0.5], "mats": [[[0.6666666666666666, 0.6666666666666666], [0.3333333333333333, 0.3333333333333333]]]}"#,
        ),
        ("bad_chain.json", r#"{"p0": [0.5, 0.5], "mats": [[[0.5, 0.5], [0.48, 0.5]]]}"#),
        ("samples.csv", "w\n0.1\n-0.2\n0.35\n0.05\n-0.1\n0.2\n0.0\n0.15\n"),
    ];
    for (name, text) in files {
        std::fs::write(dir.join(name), text).expect("fixture written");
    }
}

/// Invocations covering every subcommand, plus the usage and domain error
/// paths. Inputs are relative to `dir`.
pub fn smoke_matrix(dir: &Path) -> Vec<Vec<String>> {
    let f = |name: &str| dir.join(name).display().to_string();
    let mut m: Vec<Vec<String>> = Vec::new();
    let mut push = |list: &[&str]| m.push(args(list));
    let (p, q, pf, qf, d) = (f("p.json"), f("q.json"), f("pf.json"), f("qf.csv"), f("d.json"));
    let (pairs, pairs2, v) = (f("pairs.csv"), f("pairs2.csv"), f("v.json"));
    let (crooks, crooks_f, two_state) = (f("crooks.json"), f("crooks_f.json"), f("two_state.json"));
    let samples = f("samples.csv");

    push(&["majo", "compare", "--order", "u", &p, &q]);
    push(&["majo", "compare", "--order", "m", &pf, &qf, "--emit", "csv"]);
    push(&["majo", "compare", "--order", "d", "--d", &d, &p, &q]);
    push(&["majo", "path", &q, &p]);
    push(&["majo", "path", &pf, &q, "--emit", "csv"]);
    push(&["majo", "embed", "--d", &d, &p]);
    push(&["majo", "witness", "--d", &d, &p, &q]);
    push(&["majo", "second-laws", "--family", "top-sums", &pairs]);
    push(&["majo", "second-laws", "--family", "corrected", &pairs, "--emit", "csv"]);
    push(&["majo", "second-laws", "--family", "entropy", &pairs2]);

    push(&["poset", "show", &v]);
    push(&["poset", "dim", "--catalog", "standard:3"]);
    push(&["poset", "dim", "--catalog", "sign-modulus"]);
    push(&["poset", "dim", &v]);
    push(&["poset", "extend", "--catalog", "antichain:3", "--utility", "[3, 1, 2]", "--emit", "csv"]);
    push(&["poset", "check", "--catalog", "reciprocal"]);
    push(&["poset", "thermo", "--catalog", "chain:3"]);
    push(&["poset", "thermo", &v]);

    push(&["maxent", "solve", "--energy", "[1, -1, 0]", "--target", "1/4"]);
    push(&["maxent", "bounded", "--utility", "[1, 0, 0]", "--entropy-floor", "0.9"]);
    push(&["maxent", "bounded", "--utility", "[1, 0, 0]", "--utility-floor", "0.5"]);
    push(&["maxent", "maximal-segment", "--energy", "[1, -1, 0]", "--target", "1/4", "--check", &pf]);
    push(&["maxent", "maximal-segment", "--energy", "[1, -1, 0]", "--target", "1/4", "--grid", "31", "--emit", "csv"]);

    push(&["fluct", "jarzynski", "--exact", &crooks]);
    push(&["fluct", "jarzynski", "--mc", "--samples", "5000", &crooks_f, "--seed", "3"]);
    push(&["fluct", "crooks", "--exact", &crooks, "--emit", "csv"]);
    push(&["fluct", "crooks", "--mc", "--samples", "4000", "--band", "50", &crooks_f, "--seed", "11"]);
    push(&["fluct", "work", &two_state, "--direction", "forward"]);
    push(&["fluct", "work", &crooks_f, "--direction", "backward", "--emit", "csv"]);
    push(&["fluct", "simulate", "--samples", "20", "--seed", "5"]);
    push(&["fluct", "bootstrap", &samples, "--resamples", "500", "--beta", "0.5"]);
    push(&["fluct", "bootstrap", &samples, "--stat", "mean", "--seed", "9", "--emit", "csv"]);
    push(&["fluct", "calibrate", "--reps", "3", "--seed", "40"]);
    push(&["fluct", "kde", &samples, "--grid", "-0.5:0.5:0.25"]);

    push(&["domain", "bisect", "--poly", "[-2,0,1]", "--lo", "1", "--hi", "2", "--eps", "1/1024"]);
    push(&["domain", "bisect", "--poly", "[-2,0,1]", "--lo", "1", "--hi", "2", "--eps", "1/1048576", "--emit", "csv"]);
    push(&["domain", "pair", "1", "0"]);
    push(&["domain", "unpair", "2"]);
    push(&["domain", "scott", "--catalog", "v"]);
    push(&["domain", "interval", "0,1", "1/4,3/4"]);
    push(&["domain", "cantor", "01", "0(10)^ω"]);

    push(&["majo", "compare", &p, &f("bad_dist.json")]);
    push(&["fluct", "jarzynski", &f("bad_chain.json")]);
    push(&["fluct", "crooks", &two_state]);
    push(&["bogus"]);
    m
}
