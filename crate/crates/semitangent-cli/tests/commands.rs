use std::fs;
use std::process::Command;

use semitangent::em::StructureAlgebra;
use semitangent::semiring::Semiring;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("semitangent").chain(args.iter().copied());
    let code = semitangent_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn diff_prints_partials_by_variable() {
    let (code, out, _) = run(&["diff", "--semiring", "nat", "--vars", "x,y", "x^2*y"]);
    assert_eq!(code, 0);
    assert_eq!(out, "2*x*y (x) + x^2 (y)\n");
}

#[test]
fn negation_over_bool_is_a_usage_error() {
    let (code, _, err) = run(&["diff", "--semiring", "bool", "--vars", "x,y", "x - y"]);
    assert_eq!(code, 2);
    assert!(err.contains("negation unavailable in semiring bool"), "{err}");
}

#[test]
fn lambda_prints_value_and_tangent() {
    let (code, out, _) = run(&["lambda", "--vars", "x,y", "x^2 + x*y'", "x'*y'"]);
    assert_eq!(code, 0);
    assert_eq!(out, "(x^2, x*y)\n(0, 0)\n");
}

#[test]
fn tangent_pushes_forward() {
    let (code, out, _) = run(&[
        "tangent",
        "--vars",
        "x,y",
        "--point",
        "x=3,y=1",
        "--tangent",
        "x=1",
        "x^2*y",
        "x + y",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "x^2*y -> (9, 6)\nx + y -> (4, 1)\n");
    let (code, _, err) = run(&["tangent", "--vars", "x,y", "--point", "x=3", "x"]);
    assert_eq!(code, 2);
    assert!(err.contains("missing `y`"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["check", "--bogus"],
        vec!["diff"],
        vec!["diff", "--semiring", "reals", "x"],
        vec!["diff", "--vars", "x,x", "x"],
        vec!["check", "--suite", "no-such-law"],
        vec!["check", "--max-degree", "0"],
        vec!["weil", "--kind", "T3"],
        vec!["diff", "--vars", "x", "x + w"],
    ] {
        let (code, _, _) = run(&args);
        assert_eq!(code, 2, "{args:?}");
    }
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn weil_writes_an_algebra_file() {
    let dir = tempfile::tempdir().unwrap();
    let unit = dir.path().join("unit.alg.json");
    fs::write(&unit, StructureAlgebra::unit_algebra(Semiring::Nat).to_json()).unwrap();
    let target = dir.path().join("tsq.alg.json");
    let (code, _, _) = run(&[
        "weil",
        "--kind",
        "Tsq",
        "--input",
        unit.to_str().unwrap(),
        "--output",
        target.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let alg = StructureAlgebra::from_json(&fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(alg.rank(), 4);
    assert_eq!(alg.basis(), ["1", "eps1", "eps2", "eps1eps2"]);
    let zero = vec![alg.semiring().zero(); 4];
    assert_eq!(alg.mul(&alg.basis_vector(1), &alg.basis_vector(1)), zero);
    assert_eq!(alg.mul(&alg.basis_vector(2), &alg.basis_vector(2)), zero);
    assert_eq!(alg.mul(&alg.basis_vector(1), &alg.basis_vector(2)), alg.basis_vector(3));

    let (code, stdout, _) = run(&["weil", "--kind", "Tsq", "--semiring", "nat"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, fs::read_to_string(&target).unwrap());
}

#[test]
fn algebra_validation_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    fs::write(&good, StructureAlgebra::truncated(Semiring::Int, 3).to_json()).unwrap();
    let (code, out, _) = run(&["algebra-validate", "--input", good.to_str().unwrap()]);
    assert_eq!((code, out.as_str()), (0, "ok: rank 3 algebra over int\n"));

    // t·t = 1, but t is declared as the unit and t·t ≠ t
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"semiring": "nat", "basis": ["1", "t"], "unit": {"t": "1"}, "table": {"0,0": {"0": "1"}, "0,1": {"1": "1"}, "1,1": {"0": "1"}}}"#)
        .unwrap();
    assert_eq!(run(&["algebra-validate", "--input", bad.to_str().unwrap()]).0, 1);

    let garbled = dir.path().join("garbled.json");
    fs::write(&garbled, "{ not json").unwrap();
    assert_eq!(run(&["algebra-validate", "--input", garbled.to_str().unwrap()]).0, 3);
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["algebra-validate", "--input", missing.to_str().unwrap()]).0, 3);
    assert_eq!(run(&["weil", "--input", garbled.to_str().unwrap()]).0, 3);
}

#[test]
fn check_reports_are_reproducible() {
    let args = ["check", "--semiring", "mod:5", "--suite", "cd.*", "--seed", "7", "--format", "json"];
    let (code, first, _) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(run(&args).1, first);
    let reports: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(reports.as_array().unwrap().len(), 5);
    assert!(reports.as_array().unwrap().iter().all(|r| r["status"] == "pass"));
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_semitangent");
    let ok = Command::new(bin).args(["diff", "--vars", "x,y", "x^2*y"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "2*x*y (x) + x^2 (y)\n");
    let bad = Command::new(bin).args(["diff", "--semiring", "bool", "x - y"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
