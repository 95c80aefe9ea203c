// Copyright 2026 cpmod Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cpmod::numerics::{identity, max_abs_diff};
use cpmod::{fixtures, CMatrix, ModuleMap};
use cpmod_cli::problem::{from_matrix, to_matrix};
use cpmod_cli::{ProblemFile, Report};
use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn cpmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpmod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_report(args: &[&str]) -> (i32, Report) {
    let out = cpmod(args);
    let code = out.status.code().expect("exit code");
    let text = String::from_utf8(out.stdout).unwrap();
    let report: Report = serde_json::from_str(&text)
        .unwrap_or_else(|e| panic!("bad report ({e}); stderr: {}", String::from_utf8_lossy(&out.stderr)));
    (code, report)
}

fn matrix(report: &Report, name: &str) -> CMatrix {
    let m = report.find_matrix(name).unwrap_or_else(|| panic!("no matrix {name}"));
    to_matrix(&m.value, m.rows, m.cols, name).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_problem(dir: &TempDir, name: &str, maps: &[(&str, &ModuleMap)]) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, ProblemFile::from_maps(maps).to_json()).unwrap();
    path
}

#[test]
fn compare_first_example_gives_the_sign_flip() {
    let (code, r) = run_report(&["compare", s(&data("flip.json")), "Phi", "Psi"]);
    assert_eq!(code, 0);
    assert!(r.verdicts["equivalent"]);
    assert!(r.verdicts["Phi_nondegenerate"] && r.verdicts["Psi_nondegenerate"]);
    assert!(r.verdicts["quintuples_equivalent"]);
    let v = matrix(&r, "V");
    assert!(max_abs_diff(&v, &fixtures::flip_partial_isometry()) <= 1e-8);
}

#[test]
fn compare_second_example_gives_the_printed_matrix() {
    let (code, r) = run_report(&["compare", s(&data("degenerate.json")), "Phi", "Psi"]);
    assert_eq!(code, 0);
    assert!(r.verdicts["equivalent"]);
    assert!(!r.verdicts["Phi_nondegenerate"]);
    let v = matrix(&r, "V");
    assert!(max_abs_diff(&v, &fixtures::degenerate_partial_isometry()) <= 1e-8);
}

#[test]
fn derivative_of_a_map_by_itself_is_the_identity() {
    let (code, r) = run_report(&["rn", s(&data("flip.json")), "Phi", "Phi", "--verify"]);
    assert_eq!(code, 0);
    let (d1, d2) = (matrix(&r, "Delta1"), matrix(&r, "Delta2"));
    assert!(max_abs_diff(&d1, &identity(d1.nrows())) <= 1e-8);
    assert!(max_abs_diff(&d2, &identity(d2.nrows())) <= 1e-8);
    assert_eq!(r.values["scalar_value"].round(), 1.0);
    assert!(r.verification.as_ref().unwrap()["equivalence_to_compression"] <= 1e-8);
}

#[test]
fn purity_verdicts_set_the_exit_code() {
    let (code, r) = run_report(&["purity", s(&data("identity.json")), "Id"]);
    assert_eq!((code, r.dimensions["commutant"]), (0, 1));
    let (code, r) = run_report(&["purity", s(&data("doubled.json")), "Double"]);
    assert_eq!((code, r.dimensions["commutant"]), (1, 4));
}

#[test]
fn negative_verdicts_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let phi = fixtures::flip_phi::<f64>();
    let twice = phi.scaled(2.0);
    let path = write_problem(&dir, "scaled.json", &[("Phi", &phi), ("Twice", &twice)]);

    let (code, r) = run_report(&["compare", s(&path), "Phi", "Twice"]);
    assert_eq!(code, 1);
    assert!(!r.verdicts["equivalent"]);
    assert!(r.find_matrix("V").is_none());

    let (code, r) = run_report(&["dominates", s(&path), "Twice", "Phi"]);
    assert_eq!(code, 1);
    assert!(!r.verdicts["dominated"]);
    let (code, _) = run_report(&["dominates", s(&path), "Phi", "Twice", "--mode", "pointwise"]);
    assert_eq!(code, 0);
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let good = std::fs::read_to_string(data("flip.json")).unwrap();

    let cases = [
        (
            "unknown_field.json",
            good.replacen("\"H_dim\"", "\"extra\": 1,\n  \"H_dim\"", 1),
        ),
        ("bad_version.json", good.replacen("cpmod/1", "cpmod/9", 1)),
        ("missing_key.json", good.replacen("\"E_22\"", "\"E_23\"", 1)),
        ("truncated.json", good[..good.len() / 2].to_string()),
    ];
    for (name, text) in cases {
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        let out = cpmod(&["validate", s(&path), "Phi"]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(out.stdout.is_empty(), "{name}");
        assert!(!out.stderr.is_empty(), "{name}");
    }

    let out = cpmod(&["validate", s(&data("flip.json")), "Nope"]);
    assert_eq!(out.status.code(), Some(2));

    // not a module CP map: E_11 -> I, everything else 0
    let module = cpmod::HilbertModule::new(2, 2).unwrap();
    let mut images = vec![CMatrix::zeros(2, 2); 4];
    images[0] = identity(2);
    let bad = ModuleMap::new(module, 2, 2, images).unwrap();
    let path = write_problem(&dir, "bad.json", &[("Bad", &bad)]);
    let (code, r) = run_report(&["validate", s(&path), "Bad"]);
    assert_eq!(code, 1);
    assert!(!r.verdicts["valid"]);
    assert_eq!(cpmod(&["stinespring", s(&path), "Bad"]).status.code(), Some(2));

    // rn requires domination
    let phi = fixtures::flip_phi::<f64>();
    let path = write_problem(&dir, "pair.json", &[("Phi", &phi), ("Twice", &phi.scaled(2.0))]);
    assert_eq!(cpmod(&["rn", s(&path), "Twice", "Phi"]).status.code(), Some(2));
    assert_eq!(cpmod(&["compare", s(&path), "Phi"]).status.code(), Some(2));
}

#[test]
fn bundled_fixtures_match_the_library() {
    let flip = ProblemFile::load(&data("flip.json")).unwrap();
    let degenerate = ProblemFile::load(&data("degenerate.json")).unwrap();
    let pairs = [
        (flip.map("Phi").unwrap(), fixtures::flip_phi::<f64>()),
        (flip.map("Psi").unwrap(), fixtures::flip_psi()),
        (degenerate.map("Phi").unwrap(), fixtures::degenerate_phi()),
        (degenerate.map("Psi").unwrap(), fixtures::degenerate_psi()),
        (
            ProblemFile::load(&data("identity.json")).unwrap().map("Id").unwrap(),
            fixtures::identity_m2(),
        ),
        (
            ProblemFile::load(&data("doubled.json")).unwrap().map("Double").unwrap(),
            fixtures::block_doubled_m2(),
        ),
    ];
    for (loaded, expected) in pairs {
        assert_eq!((loaded.p(), loaded.q()), (expected.p(), expected.q()));
        for (a, b) in loaded.images().iter().zip(expected.images()) {
            assert_eq!(a, b);
        }
    }
    let r3 = flip.maps["Phi"]["E_11"][0][0][0];
    assert_eq!(r3.to_bits(), (3f64.sqrt() / 2.0).to_bits());
}

#[test]
fn problem_files_round_trip_bit_exactly() {
    let mut g = cpmod::oracle::rng(5);
    let module = cpmod::HilbertModule::new(2, 3).unwrap();
    let map: ModuleMap = cpmod::oracle::random_module_map(&mut g, module, 3, 4, 2).unwrap();
    let problem = ProblemFile::from_maps(&[("Random", &map)]);
    let back = ProblemFile::parse(&problem.to_json()).unwrap();
    assert_eq!(back, problem);
    let loaded = back.map("Random").unwrap();
    for (a, b) in loaded.images().iter().zip(map.images()) {
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!((x.re.to_bits(), x.im.to_bits()), (y.re.to_bits(), y.im.to_bits()));
        }
    }
    assert_eq!(from_matrix(&map.images()[0]), problem.maps["Random"]["E_11"]);
}

#[test]
fn reports_round_trip_and_are_deterministic() {
    let (flip, degenerate, doubled) = (data("flip.json"), data("degenerate.json"), data("doubled.json"));
    let args = [
        "dominates",
        s(&degenerate),
        "Psi",
        "Phi",
        "--mode",
        "pointwise",
        "--seed",
        "17",
        "--samples",
        "12",
        "--verify",
    ];
    let (first, second) = (cpmod(&args), cpmod(&args));
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);

    for cmd in [
        vec!["reconstruct", s(&degenerate), "Psi", "Phi", "--verify"],
        vec!["stinespring", s(&flip), "Phi"],
        vec!["commutant", s(&doubled), "Double"],
    ] {
        let out = cpmod(&cmd);
        assert_eq!(out.status.code(), Some(0), "{cmd:?}");
        let text = String::from_utf8(out.stdout.clone()).unwrap();
        let report: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(format!("{}\n", report.to_json()), text);
        assert_eq!(cpmod(&cmd).stdout, out.stdout);
    }
}

#[test]
fn compress_by_half_halves_the_map() {
    let (code, r) = run_report(&[
        "compress",
        s(&data("flip.json")),
        "Phi",
        "--element",
        s(&data("half_element.json")),
    ]);
    assert_eq!(code, 0);
    let phi = fixtures::flip_phi::<f64>();
    for (i, key) in ["E_11", "E_12", "E_21", "E_22"].iter().enumerate() {
        let image = matrix(&r, key);
        assert!(max_abs_diff(&image, &(&phi.images()[i] * cpmod::scalar::C::new(0.5, 0.0))) <= 1e-10);
    }
}

#[test]
fn tolerance_flag_scales_the_policy() {
    let (_, r) = run_report(&["validate", s(&data("flip.json")), "Phi", "--tol", "1e-6"]);
    assert_eq!(r.tolerance.eq_abs_tol, 1e-6);
    assert!((r.tolerance.rank_rel_tol - 1e-7).abs() < 1e-20);
    assert_eq!(
        cpmod(&["validate", s(&data("flip.json")), "Phi", "--tol", "-1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn commutant_of_the_doubled_map_is_four_dimensional() {
    let (code, r) = run_report(&["commutant", s(&data("doubled.json")), "Double"]);
    assert_eq!(code, 0);
    assert_eq!(r.dimensions["commutant"], 4);
    assert!(r.residuals["commutation"] <= 1e-10);
    assert!(r.find_matrix("T_4").is_some() && r.find_matrix("S_4").is_some());
}

#[test]
fn text_format_is_readable() {
    let out = cpmod(&["compare", s(&data("flip.json")), "Phi", "Psi", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("equivalent: true"));
    assert!(text.contains("[0.000000, 0.000000, -1.000000, 0.000000]"));
}
