use std::path::PathBuf;

use gwzw_cli::{decode_json, emit_json, parse_algebra, parse_expr, run_command};
use gwzw_core::form::{Atom, Field, FormExpr};
use gwzw_core::lie::check_jacobi;
use gwzw_core::lieform::{cov_d, LieForm};
use gwzw_core::scalar::{qr, Param, Scalar};
use gwzw_core::Error;
use proptest::prelude::*;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("gwzw").chain(args.iter().copied());
    let code = run_command(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gwzw-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn covariant_derivative_text_matches_library() {
    let alg = std::sync::Arc::new(gwzw_core::lie::build_poincare(1).unwrap());
    let omega = LieForm::spin_connection(&alg);
    let phi = LieForm::coset_scalar(&alg);
    let dphi = cov_d(&phi, &omega).unwrap();
    let parsed = parse_expr("d(phi[0]) + w[0,1]^phi[1] + w[0,2]^phi[2]", 1).unwrap();
    assert_eq!(dphi.p_component(0), parsed);
}

#[test]
fn out_of_range_index_is_rejected_with_position() {
    match parse_expr("e[3]", 1) {
        Err(Error::Parse { pos, .. }) => assert_eq!(pos, 2),
        other => panic!("{other:?}"),
    }
    assert!(parse_expr("e[3]", 2).is_ok());
}

#[test]
fn derive_gwzw_reports_boundary_term() {
    let (code, out, _) = run(&["derive", "gwzw", "--n", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("exact form: d(\\epsilon_{abc}R^{ab}\\phi^{c})"), "{out}");
    assert!(!out.contains("FAIL"));
}

#[test]
fn decomposition_route_alias() {
    let (a, out_a, _) = run(&["derive", "gwzw", "--n", "2", "--route", "eq44"]);
    let (b, out_b, _) = run(&["derive", "gwzw", "--n", "2", "--route", "decomposition"]);
    assert_eq!((a, b), (0, 0));
    assert_eq!(out_a, out_b);
}

#[test]
fn derive_cs_json_is_deterministic() {
    let first = run(&["--format", "json", "derive", "cs", "--n", "1"]);
    let second = run(&["--format", "json", "derive", "cs", "--n", "1"]);
    assert_eq!(first, second);
    let v: serde_json::Value = serde_json::from_str(&first.1).unwrap();
    assert_eq!(v["passed"], serde_json::Value::Bool(true));
}

#[test]
fn coset_poincare_shows_dressed_fields() {
    let (code, out, _) = run(&["derive", "coset", "--algebra", "poincare", "--order", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("W^01 = w[0,1]\n"), "{out}");
    assert!(out.contains("PASS V = e + D phi"));
    assert!(out.contains("PASS W = w"));
}

#[test]
fn coset_ads_matches_series() {
    let (code, out, _) = run(&["derive", "coset", "--algebra", "ads", "--order", "2"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("PASS closed-form series through m^4"), "{out}");
}

const POINCARE3: &str = "\
# Poincare algebra in three dimensions, eta = diag(-1, 1, 1)
[J[0,1], J[0,2]] = J[1,2]
[J[0,1], J[1,2]] = J[0,2]
[J[0,2], J[1,2]] = -J[0,1]
[J[0,1], P[0]] = P[1]
[J[0,1], P[1]] = P[0]
[J[0,2], P[0]] = P[2]
[J[0,2], P[2]] = P[0]
[J[1,2], P[1]] = -P[2]
[J[1,2], P[2]] = P[1]
";

#[test]
fn algebra_file_reproduces_builtin() {
    let user = parse_algebra(POINCARE3, "user", 1).unwrap();
    assert!(check_jacobi(&user).passed());
    let path = scratch("poincare3.alg", POINCARE3);
    let (code, out, err) = run(&["derive", "coset", "--algebra", path.to_str().unwrap(), "--order", "2"]);
    let (_, builtin, _) = run(&["derive", "coset", "--algebra", "poincare", "--order", "2"]);
    assert_eq!(code, 0, "{err}");
    let strip = |s: &str| s.lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&out), strip(&builtin));
}

#[test]
fn jacobi_violating_file_is_a_usage_error() {
    let path = scratch("broken.alg", "[P[0], P[1]] = P[0]\n[P[1], P[2]] = P[1]\n");
    let (code, _, err) = run(&["derive", "coset", "--algebra", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("error"), "{err}");
}

#[test]
fn eval_checks_identities_and_exit_codes() {
    let good = scratch("good.txt", "d(w[0,1]^e[2]) == d(w[0,1])^e[2] - w[0,1]^d(e[2])");
    let (code, out, _) = run(&["eval", "--expr", good.to_str().unwrap(), "--base-dim", "4"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("PASS"));
    let bad = scratch("bad.txt", "d(w[0,1]^e[2]) == d(w[0,1])^e[2] + w[0,1]^d(e[2])");
    let (code, out, _) = run(&["eval", "--expr", bad.to_str().unwrap(), "--base-dim", "4"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("FAIL") && out.contains("seed 1:"), "{out}");
    let junk = scratch("junk.txt", "w[0,1] +* e[0]");
    let (code, _, err) = run(&["eval", "--expr", junk.to_str().unwrap(), "--base-dim", "4"]);
    assert_eq!(code, 2);
    assert!(err.contains("position") || err.contains("at"), "{err}");
}

#[test]
fn eval_accepts_json_input() {
    let x = parse_expr("w[0,1]^e[2] + 1/2*t*phi[0]", 1).unwrap();
    let path = scratch("expr.json", &emit_json(&x));
    let (code, out, _) = run(&[
        "eval",
        "--expr",
        path.to_str().unwrap(),
        "--base-dim",
        "3",
        "--seed",
        "7",
    ]);
    let text = scratch("expr.txt", "w[0,1]^e[2] + 1/2*t*phi[0]");
    let (_, out_text, _) = run(&[
        "eval",
        "--expr",
        text.to_str().unwrap(),
        "--base-dim",
        "3",
        "--seed",
        "7",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, out_text);
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["derive", "gwzw", "--n", "0"]).0, 2);
    assert_eq!(run(&["verify", "all", "--n", "3"]).0, 2);
    assert_eq!(run(&["--k", "0", "derive", "cs", "--n", "1"]).0, 2);
    assert_eq!(run(&["derive", "coset", "--order", "99"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn normalisation_is_reported() {
    let (code, out, _) = run(&["--k", "3/2", "derive", "gwzw", "--n", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("action normalisation k = 3/2"), "{out}");
}

fn atom() -> impl Strategy<Value = Atom> {
    let field = prop_oneof![
        (0u8..5, 1u8..5).prop_map(|(a, k)| {
            let b = (a + k) % 5;
            (Field::Omega, vec![a.min(b), a.max(b)])
        }),
        (0u8..5).prop_map(|a| (Field::Vielbein, vec![a])),
        (0u8..5).prop_map(|a| (Field::Phi, vec![a])),
        (0u8..4, 0u8..5).prop_map(|(deg, a)| (Field::user("chi", deg), vec![a])),
        Just((Field::user("h", 2), vec![])),
    ];
    (field, any::<bool>()).prop_map(|((f, idx), d)| {
        let mut a = Atom::new(f, &idx);
        a.d = d;
        a
    })
}

fn coefficient() -> impl Strategy<Value = Scalar> {
    (-50i64..=50, 1i64..=30, 0u8..4, 0u8..3).prop_map(|(n, d, t, m)| {
        let mut c = Scalar::from(qr(n, d));
        for _ in 0..t {
            c = &c * &Scalar::param(Param::T);
        }
        for _ in 0..m {
            c = &c * &Scalar::param(Param::M2);
        }
        c
    })
}

fn expr() -> impl Strategy<Value = FormExpr> {
    prop::collection::vec((prop::collection::vec(atom(), 0..5), coefficient()), 0..8)
        .prop_map(|ws| ws.iter().map(|(a, c)| FormExpr::word(a, c.clone())).sum())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn json_round_trip(x in expr()) {
        let doc = emit_json(&x);
        prop_assert_eq!(decode_json(&doc).unwrap(), x.clone());
        prop_assert_eq!(emit_json(&x), doc);
    }

    #[test]
    fn text_round_trip_for_gauge_fields(x in expr()) {
        let plain: FormExpr = x
            .terms()
            .filter(|(m, _)| m.atoms().iter().all(|a| !matches!(a.field, Field::User { .. })))
            .map(|(m, c)| FormExpr::word(m.atoms(), c.clone()))
            .sum();
        prop_assert_eq!(parse_expr(&plain.to_string(), 2).unwrap(), plain);
    }
}
