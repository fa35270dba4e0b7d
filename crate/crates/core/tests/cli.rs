use std::path::Path;
use std::process::{Command, Output};

use symext::fixtures::QUTRIT_MARGINAL_FILE;
use symext::io::{save_state, Metadata};
use symext::linalg::{tensor_product, ComplexMatrix, DensityMatrix, SystemLayout};

fn symext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symext")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn without_timing(report: &str) -> String {
    report.lines().filter(|l| !l.starts_with("elapsed_ms:")).collect::<Vec<_>>().join("\n")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn product_state_is_four_extendible() {
    let dir = tempfile::tempdir().unwrap();
    let a = ComplexMatrix::from_real(2, 2, &[0.7, 0.2, 0.2, 0.3]).unwrap();
    let b = ComplexMatrix::from_real(2, 2, &[0.4, -0.1, -0.1, 0.6]).unwrap();
    let rho = DensityMatrix::new(tensor_product(&a, &b), SystemLayout::new(vec![2, 2]).unwrap()).unwrap();
    let input = dir.path().join("product.state");
    save_state(&rho, &input, Metadata::default()).unwrap();
    let cert = dir.path().join("ext.state");
    let out = symext(&["check-sym", "--k", "4", "--in", p(&input), "--cert", p(&cert)]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("status: FEASIBLE"));
    let v = symext(&["verify", "--k", "4", "--ext", p(&cert), "--marginal", p(&input), "--symmetric-only"]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
}

#[test]
fn gen_convert_verify_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let rho = dir.path().join("rho.state");
    let sigma = dir.path().join("sigma.state");
    let g = symext(&["gen", "--k", "4", "--dA", "3", "--seed", "11", "--profile", "exclude-bosonic", "--out", p(&rho)]);
    assert_eq!(g.status.code(), Some(0));
    let c = symext(&["convert", "--k", "4", "--in", p(&rho), "--out", p(&sigma)]);
    assert_eq!(c.status.code(), Some(0), "{}", stdout(&c));
    let v = symext(&["verify", "--k", "4", "--ext", p(&sigma), "--marginal", p(&rho)]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
    assert!(stdout(&v).contains("status: PASS"));
}

#[test]
fn convert_accepts_a_full_symmetric_extension() {
    let dir = tempfile::tempdir().unwrap();
    let rho = dir.path().join("rho.state");
    let ext = dir.path().join("ext.state");
    let sigma = dir.path().join("sigma.state");
    symext(&["gen", "--k", "3", "--dA", "2", "--seed", "5", "--out", p(&rho)]);
    let s = symext(&["check-sym", "--k", "3", "--in", p(&rho), "--cert", p(&ext)]);
    assert_eq!(s.status.code(), Some(0));
    let c = symext(&["convert", "--k", "3", "--in", p(&ext), "--out", p(&sigma)]);
    assert_eq!(c.status.code(), Some(0), "{}", stdout(&c));
    assert!(stdout(&c).contains("source: symmetric extension input"));
}

#[test]
fn qutrit_fixture_has_no_bosonic_two_copy_extension() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = dir.path().join("qutrit.state");
    let w = symext(&["fixture", "--out", p(&fixture)]);
    assert_eq!(w.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&fixture).unwrap(), QUTRIT_MARGINAL_FILE);
    let out = symext(&["check-bos2", "--dB", "3", "--in", p(&fixture)]);
    assert_eq!(out.status.code(), Some(2), "{}", stdout(&out));
    assert!(stdout(&out).contains("status: INFEASIBLE"));
}

#[test]
fn singlet_is_not_two_extendible_and_not_ppt_after_mixing() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("singlet.state");
    let rho = DensityMatrix::new(symext::fixtures::singlet().projector(), SystemLayout::new(vec![2, 2]).unwrap()).unwrap();
    save_state(&rho, &input, Metadata::default()).unwrap();
    assert_eq!(symext(&["check-sym", "--k", "2", "--in", p(&input)]).status.code(), Some(2));
    assert_eq!(symext(&["check-bos", "--k", "2", "--in", p(&input)]).status.code(), Some(2));
    let t = symext(&["tilde", "--k", "2", "--in", p(&input)]);
    assert_eq!(t.status.code(), Some(2));
    assert!(stdout(&t).contains("min_pt_eigenvalue: -1.250000000000e-1"));
}

#[test]
fn undecided_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("rho.state");
    let a = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
    let b = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
    let rho = DensityMatrix::new(tensor_product(&a, &b), SystemLayout::new(vec![2, 2]).unwrap()).unwrap();
    save_state(&rho, &input, Metadata::default()).unwrap();
    let out = symext(&["check-sym", "--k", "6", "--in", p(&input), "--max-iter", "1"]);
    assert_eq!(out.status.code(), Some(3), "{}", stdout(&out));
    assert!(stdout(&out).contains("status: UNDECIDED"));
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("rho.state");
    symext(&["gen", "--k", "5", "--dA", "2", "--seed", "9", "--out", p(&input)]);
    let runs: Vec<(String, Vec<u8>)> = (0..2)
        .map(|i| {
            let cert = dir.path().join(format!("cert{i}.state"));
            let o = symext(&["check-bos", "--k", "5", "--in", p(&input), "--seed", "4", "--cert", p(&cert)]);
            assert_eq!(o.status.code(), Some(0));
            (without_timing(&stdout(&o)).replace(&format!("cert{i}"), "cert"), std::fs::read(&cert).unwrap())
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn malformed_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.state");
    let text = &QUTRIT_MARGINAL_FILE[..QUTRIT_MARGINAL_FILE.len() / 2];
    std::fs::write(&input, text).unwrap();
    let out = symext(&["check-bos2", "--dB", "3", "--in", p(&input)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error at line"));
}
