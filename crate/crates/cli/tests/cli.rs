use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nonlocal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonlocal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = nonlocal(args);
    assert!(
        out.status.success(),
        "{args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn payload(args: &[&str]) -> Value {
    json(args)["payload"].clone()
}

fn f64_at(v: &Value, key: &str) -> f64 {
    v[key]
        .as_f64()
        .unwrap_or_else(|| panic!("{key} missing in {v}"))
}

fn exit_code(args: &[&str]) -> i32 {
    nonlocal(args).status.code().expect("exit code")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn value_examples() {
    let and = payload(&["value", "--fn", "and", "--prior", "uniform"]);
    assert_eq!(f64_at(&and, "classical_value"), 0.75);
    assert_eq!(f64_at(&and, "quantum_bound"), 0.75);
    assert_eq!(and["u"], "00");
    assert_eq!(and["delta"], false);

    let not = payload(&["value", "--fn", "not"]);
    assert_eq!(f64_at(&not, "classical_value"), 1.0);
    assert_eq!(not["u"], "1");
    assert_eq!(not["delta"], true);

    let xor = payload(&["value", "--fn", "tt:n=2:hex=6", "--prior", "uniform"]);
    assert_eq!(f64_at(&xor, "classical_value"), 1.0);
}

#[test]
fn value_envelope() {
    let out = json(&["value", "--fn", "and"]);
    assert_eq!(out["command"], "value");
    assert_eq!(out["input_digest"].as_str().unwrap().len(), 64);
    assert!(out["seed"].is_null());
    // equivalent spellings resolve to the same inputs
    let same = json(&[
        "value",
        "--fn",
        "tt:n=2:hex=8",
        "--prior",
        "[0.25,0.25,0.25,0.25]",
    ]);
    assert_eq!(out["input_digest"], same["input_digest"]);
}

#[test]
fn bruteforce_all_two_bit_functions() {
    for t in 0..16 {
        let spec = format!("tt:n=2:hex={t:x}");
        let p = payload(&["bruteforce", "--fn", &spec]);
        let brute = f64_at(&p, "brute_force_value");
        let closed = f64_at(&p, "closed_form_value");
        assert!((brute - closed).abs() <= 1e-9, "{spec}");
    }
    let and = payload(&["bruteforce", "--fn", "and"]);
    assert_eq!(f64_at(&and, "brute_force_value"), 0.75);
}

#[test]
fn bruteforce_guard_exits_3() {
    let out = nonlocal(&["bruteforce", "--fn", "const0:n=4"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains('3'));
}

#[test]
fn certificate_examples() {
    let dir = tempfile::tempdir().unwrap();
    let chsh = dir.path().join("chsh.csv");
    fs::write(&chsh, "0.25,0.25\n0.25,-0.25\n").unwrap();
    let p = payload(&["certificate", "--game", path_str(&chsh)]);
    assert_eq!(p["passes"], false);
    assert!((f64_at(&p, "norm_bound_value") - 0.853_553_390_6).abs() <= 1e-9);
    assert!(f64_at(&p, "seesaw_value") >= 0.853_553_390_6 - 1e-5);
    assert_eq!(f64_at(&p, "classical_value"), 0.75);

    let zero = dir.path().join("zero.csv");
    fs::write(&zero, "0,0\n0,0\n").unwrap();
    let p = payload(&["certificate", "--game", path_str(&zero)]);
    assert_eq!(p["passes"], true);
    assert_eq!(f64_at(&p, "norm_bound_bias"), 0.0);

    let nlc = payload(&["certificate", "--fn", "maj3", "--prior", "uniform"]);
    assert_eq!(nlc["passes"], true);
}

#[test]
fn certificate_errors() {
    let dir = tempfile::tempdir().unwrap();
    let ragged = dir.path().join("ragged.csv");
    fs::write(&ragged, "1,2\n3\n").unwrap();
    assert_eq!(exit_code(&["certificate", "--game", path_str(&ragged)]), 2);
    // overflowing entries defeat power iteration
    let huge = dir.path().join("huge.csv");
    fs::write(&huge, "1e308,1e308\n1e308,-1e308\n").unwrap();
    assert_eq!(exit_code(&["certificate", "--game", path_str(&huge)]), 4);
    assert_eq!(
        exit_code(&["certificate", "--game", "a.csv", "--fn", "and"]),
        2
    );
}

#[test]
fn bell_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    for (spec, k) in [("and", 2.0), ("xor", 4.0), ("not", 2.0)] {
        let out = dir.path().join(format!("{spec}.json"));
        let p = payload(&["bell", "--fn", spec, "--out", path_str(&out)]);
        assert_eq!(f64_at(&p, "K"), k, "{spec}");
        let file: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(f64_at(&file, "K"), k);
        let n = file["n"].as_u64().unwrap() as usize;
        assert_eq!(file["C"].as_array().unwrap().len(), 1 << n);
    }
}

#[test]
fn simulate_examples() {
    let p = payload(&[
        "boxes",
        "simulate",
        "--protocol",
        "pr-and",
        "--fn",
        "and",
        "--n",
        "100000",
        "--seed",
        "7",
    ]);
    assert_eq!(f64_at(&p, "estimate"), 1.0);
    assert_eq!(f64_at(&p, "exact"), 1.0);

    let p = payload(&[
        "boxes",
        "simulate",
        "--protocol",
        "noisy-pr-and:p=0.8535533906",
        "--fn",
        "and",
        "--n",
        "20000",
        "--seed",
        "3",
    ]);
    let (estimate, exact, se) = (
        f64_at(&p, "estimate"),
        f64_at(&p, "exact"),
        f64_at(&p, "std_error"),
    );
    assert!((exact - 0.75).abs() <= 1e-9);
    assert!((estimate - exact).abs() <= 5.0 * se);

    let p = payload(&[
        "boxes",
        "simulate",
        "--protocol",
        "perfect:maj3",
        "--fn",
        "maj3",
        "--n",
        "1000",
        "--seed",
        "1",
    ]);
    assert_eq!(f64_at(&p, "exact"), 1.0);
    assert_eq!(f64_at(&p, "estimate"), 1.0);
}

#[test]
fn simulate_requires_seed_and_valid_resource() {
    assert_eq!(
        exit_code(&[
            "boxes",
            "simulate",
            "--protocol",
            "pr-and",
            "--fn",
            "and",
            "--n",
            "10"
        ]),
        2
    );
    let bad = [
        "boxes",
        "simulate",
        "--protocol",
        "noisy-pr-and:q=1",
        "--fn",
        "and",
        "--n",
        "10",
        "--seed",
        "1",
    ];
    assert_eq!(exit_code(&bad), 2);
    let wide = [
        "boxes",
        "simulate",
        "--protocol",
        "pr-and",
        "--fn",
        "maj3",
        "--n",
        "10",
        "--seed",
        "1",
    ];
    assert_eq!(exit_code(&wide), 2);
}

#[test]
fn simulate_protocol_file() {
    let dir = tempfile::tempdir().unwrap();
    let b = nonlocal::boxes::noisy_pr_box(0.9).unwrap();
    let proto = nonlocal::boxes::and_protocol_from_two_boxes(&b, &b).unwrap();
    let path = dir.path().join("proto.json");
    fs::write(&path, proto.to_json()).unwrap();
    let p = payload(&[
        "boxes",
        "simulate",
        "--protocol",
        path_str(&path),
        "--fn",
        "and",
        "--n",
        "100",
        "--seed",
        "2",
    ]);
    assert!((f64_at(&p, "exact") - 0.82).abs() <= 1e-12);
}

#[test]
fn analyze_boxes() {
    let dir = tempfile::tempdir().unwrap();
    let pr = dir.path().join("pr.json");
    fs::write(&pr, nonlocal::boxes::pr_box().to_json()).unwrap();
    let p = payload(&["boxes", "analyze", "--box", path_str(&pr)]);
    assert_eq!(p["valid"], true);
    assert_eq!(p["nonsignalling"], true);
    assert_eq!(p["marginals_uniform"], true);
    assert_eq!(f64_at(&p, "chsh_success"), 1.0);

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"nx":1,"ny":1,"table":[[[[1.0,0.0],[0.0,0.0]],[[1.0,0.0],[0.0,0.0]]],[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,0.5]]]]}"#).unwrap();
    let p = payload(&["boxes", "analyze", "--box", path_str(&bad)]);
    assert_eq!(p["valid"], false);
    assert!(!p["reason"].as_str().unwrap().is_empty());

    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "not json").unwrap();
    assert_eq!(
        exit_code(&["boxes", "analyze", "--box", path_str(&garbage)]),
        2
    );
    assert_eq!(
        exit_code(&["boxes", "analyze", "--box", "/nonexistent/box.json"]),
        1
    );
}

#[test]
fn minimax_examples() {
    let and = payload(&["minimax", "--fn", "and"]);
    assert!((f64_at(&and, "worst_case_value") - 0.75).abs() <= 1e-9);
    assert!(f64_at(&and, "duality_gap") <= 1e-9);
    for p in and["worst_prior"].as_array().unwrap() {
        assert!((p.as_f64().unwrap() - 0.25).abs() <= 1e-9);
    }
    let total: f64 = and["optimal_mixture"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["weight"].as_f64().unwrap())
        .sum();
    assert!((total - 1.0).abs() <= 1e-9);

    let not = payload(&["minimax", "--fn", "not"]);
    assert!((f64_at(&not, "worst_case_value") - 1.0).abs() <= 1e-9);

    let maj = payload(&["minimax", "--fn", "maj3"]);
    assert!((f64_at(&maj, "worst_case_value") - f64_at(&maj, "prior_side_value")).abs() <= 1e-9);
}

#[test]
fn minimax_guard_exits_3() {
    assert_eq!(exit_code(&["minimax", "--fn", "const0:n=11"]), 3);
}

#[test]
fn multiparty_examples() {
    let p = payload(&["multiparty", "--fn", "and", "--m", "3"]);
    assert_eq!(f64_at(&p, "multiparty_value"), 0.75);

    for spec in ["and", "tt:n=2:hex=b", "tt:n=2:hex=e"] {
        let two = payload(&[
            "multiparty",
            "--fn",
            spec,
            "--prior",
            "[0.1,0.2,0.3,0.4]",
            "--m",
            "2",
        ]);
        let value = payload(&["value", "--fn", spec, "--prior", "[0.1,0.2,0.3,0.4]"]);
        // enumeration and the spectral closed form round differently
        assert!(
            (f64_at(&two, "multiparty_value") - f64_at(&value, "classical_value")).abs() <= 1e-12,
            "{spec}"
        );
        let four = payload(&[
            "multiparty",
            "--fn",
            spec,
            "--prior",
            "[0.1,0.2,0.3,0.4]",
            "--m",
            "4",
        ]);
        assert!(
            (f64_at(&four, "multiparty_value") - f64_at(&value, "classical_value")).abs() <= 1e-12
        );
    }
    assert_eq!(exit_code(&["multiparty", "--fn", "and", "--m", "9"]), 3);
}

#[test]
fn parse_errors_exit_2() {
    assert_eq!(exit_code(&["value", "--fn", "bogus"]), 2);
    assert_eq!(
        exit_code(&["value", "--fn", "and", "--prior", "[0.5,0.5]"]),
        2
    );
    assert_eq!(
        exit_code(&["value", "--fn", "and", "--prior", "[0.3,0.3,0.3,0.3]"]),
        2
    );
    assert_eq!(exit_code(&["value"]), 2);
    assert_eq!(exit_code(&["frobnicate"]), 2);
}

#[test]
fn renormalize_flag() {
    let spec = "[0.25,0.25,0.25,0.2500001]";
    assert_eq!(exit_code(&["value", "--fn", "and", "--prior", spec]), 2);
    let p = payload(&["value", "--fn", "and", "--prior", spec, "--renormalize"]);
    assert!((f64_at(&p, "classical_value") - 0.75).abs() <= 1e-6);
}

#[test]
fn output_is_deterministic() {
    let runs: &[&[&str]] = &[
        &[
            "boxes",
            "simulate",
            "--protocol",
            "noisy-pr-and:p=0.9",
            "--fn",
            "and",
            "--n",
            "5000",
            "--seed",
            "11",
        ],
        &["certificate", "--fn", "and", "--seed", "5"],
        &["minimax", "--fn", "maj3"],
        &[
            "value",
            "--fn",
            "maj3",
            "--prior",
            "[0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.3]",
        ],
    ];
    for args in runs {
        let a = nonlocal(args);
        let b = nonlocal(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let seeded = json(runs[0]);
    assert_eq!(seeded["seed"], 11);
    let other = json(&[
        "boxes",
        "simulate",
        "--protocol",
        "noisy-pr-and:p=0.9",
        "--fn",
        "and",
        "--n",
        "5000",
        "--seed",
        "12",
    ]);
    assert_eq!(seeded["input_digest"], other["input_digest"]);
    assert_ne!(
        seeded["payload"]["successes"],
        other["payload"]["successes"]
    );
}

#[test]
fn numbers_round_trip() {
    let out = nonlocal(&[
        "value",
        "--fn",
        "maj3",
        "--prior",
        "[0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.3]",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let x = f64_at(&v["payload"], "classical_value");
    let printed = x.to_string();
    assert_eq!(printed.parse::<f64>().unwrap(), x);
    assert!(!text.contains("NaN") && !text.contains("inf"));
}

#[test]
fn human_format_renders_payload() {
    let out = nonlocal(&["--format", "human", "value", "--fn", "and"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("value"));
    assert!(text.contains("classical_value: 0.75"));
    assert!(text.contains("u: 00"));
    let sim = nonlocal(&[
        "boxes",
        "simulate",
        "--protocol",
        "pr-and",
        "--fn",
        "and",
        "--n",
        "10",
        "--seed",
        "4",
        "--format",
        "human",
    ]);
    assert!(String::from_utf8(sim.stdout).unwrap().contains("seed: 4"));
}

#[test]
fn timing_goes_to_stderr() {
    let out = nonlocal(&["value", "--fn", "and"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("finished in"));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(!stdout.contains("finished in"));
}
