//! Round trips through every on-disk format, and cross-module consistency
//! of values computed from parsed inputs.

use std::fs;

use nonlocal::bitcore::{
    parse_function, parse_prior, parse_prior_with, BooleanFunction, PriorDistribution,
};
use nonlocal::boxes::{
    and_protocol_from_two_boxes, box_success_exact, noisy_pr_box, pr_box, protocol_success_exact,
    BoxProtocol, CorrelationBox,
};
use nonlocal::nlvalue::classical_optimum;
use nonlocal::xorgame::{bell_inequality, classical_bias, game_from_nlc, GameMatrix};
use nonlocal::Error;

#[test]
fn prior_from_json_and_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("prior.json");
    fs::write(&json, "[0.1, 0.2, 0.3, 0.4]").unwrap();
    let csv = dir.path().join("prior.csv");
    fs::write(&csv, "index,probability\n0,0.1\n1,0.2\n2,0.3\n3,0.4\n").unwrap();
    let from_json = parse_prior(json.to_str().unwrap(), 2).unwrap();
    let from_csv = parse_prior(csv.to_str().unwrap(), 2).unwrap();
    let inline = parse_prior("[0.1, 0.2, 0.3, 0.4]", 2).unwrap();
    assert_eq!(from_json, inline);
    assert_eq!(from_csv, inline);
}

#[test]
fn prior_renormalization_is_opt_in() {
    let spec = "[0.25, 0.25, 0.25, 0.2500001]";
    assert!(matches!(parse_prior(spec, 2), Err(Error::Parse(_))));
    let p = parse_prior_with(spec, 2, true).unwrap();
    assert!((p.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-15);
    assert!(parse_prior_with("[0.5, 0.5, 0.5, 0.5]", 2, true).is_err());
}

#[test]
fn missing_prior_file_is_io_error() {
    assert!(matches!(
        parse_prior("/nonexistent/prior.csv", 2),
        Err(Error::Io(_))
    ));
}

#[test]
fn function_string_round_trip() {
    for spec in [
        "and",
        "or",
        "xor",
        "not",
        "maj3",
        "const1",
        "const0:n=3",
        "tt:n=3:hex=e8",
    ] {
        let f = parse_function(spec).unwrap();
        assert_eq!(parse_function(&f.to_spec()).unwrap(), f, "{spec}");
    }
    assert_eq!(
        parse_function("tt:n=2:hex=6").unwrap(),
        BooleanFunction::xor()
    );
    assert_eq!(
        parse_function("tt:n=3:hex=e8").unwrap(),
        BooleanFunction::majority3()
    );
}

#[test]
fn game_csv_round_trip_preserves_values() {
    let f = BooleanFunction::majority3();
    let prior =
        PriorDistribution::renormalized(3, (1..=8).map(|v| v as f64 / 36.0).collect()).unwrap();
    let g = game_from_nlc(&f, &prior).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("game.csv");
    fs::write(&path, g.to_csv_string()).unwrap();
    let back = GameMatrix::from_csv_path(&path).unwrap();
    assert_eq!(back, g);
    let classical = classical_bias(&back).unwrap().value();
    let closed = classical_optimum(&f, &prior).unwrap().value;
    assert!((classical - closed).abs() <= 1e-12);
}

#[test]
fn malformed_game_csv() {
    assert!(matches!(
        GameMatrix::from_csv_str("1,2\n3\n"),
        Err(Error::Parse(_))
    ));
    assert!(matches!(
        GameMatrix::from_csv_str("1,x\n"),
        Err(Error::Parse(_))
    ));
}

#[test]
fn bell_json_round_trip() {
    let ineq = bell_inequality(
        &BooleanFunction::xor(),
        &PriorDistribution::uniform(2).unwrap(),
    )
    .unwrap();
    assert!((ineq.bound - 4.0).abs() <= 1e-12);
    let (n, c, k) =
        nonlocal::xorgame::BellInequality::coefficients_from_json(&ineq.to_json()).unwrap();
    assert_eq!(n, 2);
    assert_eq!(c, ineq.coefficients);
    assert_eq!(k, ineq.bound);
    let not = bell_inequality(
        &BooleanFunction::not(),
        &PriorDistribution::uniform(1).unwrap(),
    )
    .unwrap();
    assert!((not.bound - 2.0).abs() <= 1e-12);
}

#[test]
fn box_json_round_trip() {
    let b = noisy_pr_box(0.9).unwrap();
    let back = CorrelationBox::from_json(&b.to_json()).unwrap();
    assert_eq!(back, b);
    let zero = parse_function("tt:n=1:hex=0").unwrap();
    let s = box_success_exact(&pr_box(), &zero, &PriorDistribution::uniform(1).unwrap()).unwrap();
    // a ⊕ b = x·y agrees with the zero function on three of four input pairs
    assert!((s - 0.75).abs() <= 1e-12);
}

#[test]
fn invalid_box_json_is_rejected() {
    let bad = r#"{"nx":1,"ny":1,"table":[[[[0.5,0.5],[0.0,0.0]],[[0.5,0.5],[0.0,0.0]]],[[[0.5,0.0],[0.0,0.4]],[[0.5,0.5],[0.0,0.0]]]]}"#;
    assert!(CorrelationBox::from_json(bad).is_err());
    assert!(CorrelationBox::from_json("{").is_err());
}

#[test]
fn protocol_json_round_trip() {
    let b = noisy_pr_box(0.7).unwrap();
    let proto = and_protocol_from_two_boxes(&b, &b).unwrap();
    let back = BoxProtocol::from_json(&proto.to_json()).unwrap();
    assert_eq!(back, proto);
    let prior = PriorDistribution::uniform(2).unwrap();
    let s = protocol_success_exact(&back, &BooleanFunction::and(), &prior).unwrap();
    assert!((s - (0.49 + 0.09)).abs() <= 1e-12);
}
