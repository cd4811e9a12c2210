use std::path::{Path, PathBuf};
use std::process::Command;

use ainfty_cert::{tamper, ContractionCertificate};
use ainfty_coeff::Ring;
use ainfty_core::ainfty::{find_strict_units, AInfty, Functor, SplitUnitWitness, Table};
use ainfty_core::io::{functor_doc, structure_doc, to_json, witness_doc};
use ainfty_core::samples::{dual_numbers, endomorphism_dg, ground, non_associative, Complex};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ainfty"))
}

fn put(dir: &Path, name: &str, s: String) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, s).unwrap();
    p
}

/// Runs the binary with a report file; returns the exit code and the parsed report.
fn run(dir: &Path, args: &[&str]) -> (i32, Value) {
    let report = dir.join("report.json");
    let _ = std::fs::remove_file(&report);
    let out = bin().args(args).arg("--report").arg(&report).output().unwrap();
    let code = out.status.code().unwrap();
    let text = std::fs::read_to_string(&report).unwrap_or_else(|_| {
        panic!("no report; stdout {} stderr {}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    });
    (code, serde_json::from_str(&text).unwrap())
}

fn witness(a: &AInfty) -> SplitUnitWitness {
    SplitUnitWitness::canonical(&find_strict_units(a).unwrap().unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_passes_on_dual_numbers_and_names_the_failure_otherwise() {
    let dir = tempfile::tempdir().unwrap();
    let good = put(dir.path(), "d.json", to_json(&structure_doc(&dual_numbers(Ring::Q, 6).unwrap())));
    let (code, rep) = run(dir.path(), &["validate", s(&good), "--arity", "6"]);
    assert_eq!(code, 0);
    assert_eq!(rep["verdict"], "pass");
    assert_eq!(rep["command"], "validate");
    assert_eq!(rep["truncation"]["arity"], 6);
    assert_eq!(rep["inputs"][0]["sha256"].as_str().unwrap().len(), 64);

    let bad = put(dir.path(), "n.json", to_json(&structure_doc(&non_associative(Ring::Q, 4).unwrap())));
    let (code, rep) = run(dir.path(), &["validate", s(&bad), "--arity", "4"]);
    assert_eq!(code, 1);
    assert_eq!(rep["verdict"], "fail");
    assert_eq!(rep["code"], "NotAInfty");
    assert_eq!(rep["witnesses"]["literal"]["violation"]["arity"], 3);
    assert_eq!(rep["witnesses"]["checkers_agree"], true);
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let (code, rep) = run(dir.path(), &["validate", s(&missing), "--arity", "2"]);
    assert_eq!(code, 2);
    assert_eq!(rep["code"], "InputError");
    let junk = put(dir.path(), "junk.json", "{\"schema\": \"ainfty/1\"}".into());
    let (code, rep) = run(dir.path(), &["validate", s(&junk), "--arity", "2"]);
    assert_eq!(code, 2);
    assert_eq!(rep["code"], "SchemaError");
}

#[test]
fn eta_certificates_verify_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let d = put(dir.path(), "d.json", to_json(&structure_doc(&dual_numbers(Ring::Q, 6).unwrap())));
    let cert = dir.path().join("out").join("cert.json");
    let (code, rep) = run(dir.path(), &["eta", s(&d), "--max-len", "4", "--certify", s(&cert)]);
    assert_eq!(code, 0, "{rep}");
    assert_eq!(rep["artifacts"][0], s(&cert));
    let (code, rep) = run(dir.path(), &["verify", s(&cert)]);
    assert_eq!(code, 0);
    assert_eq!(rep["witnesses"]["certificate"]["small_rank"], 2);

    let c = ContractionCertificate::from_json(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let bad = put(dir.path(), "bad.json", tamper(&c).to_json());
    let (code, rep) = run(dir.path(), &["verify", s(&bad)]);
    assert_eq!(code, 1);
    assert_eq!(rep["code"], "CertificateRejected");
    assert!(rep["message"].as_str().unwrap().contains("id − i∘p = d∘h + h∘d"), "{}", rep["message"]);
    assert_eq!(rep["witnesses"]["violated_identity"], "id − i∘p = d∘h + h∘d");
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = put(dir.path(), "d.json", to_json(&structure_doc(&dual_numbers(Ring::Q, 6).unwrap())));
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timing");
        v
    };
    let (_, a) = run(dir.path(), &["bar", s(&d), "--max-len", "4", "--check-d2"]);
    let (_, b) = run(dir.path(), &["bar", s(&d), "--max-len", "4", "--check-d2"]);
    assert_eq!(strip(a), strip(b));
}

#[test]
fn quotient_over_the_integers_with_a_retraction() {
    let dir = tempfile::tempdir().unwrap();
    let a = dual_numbers(Ring::Z, 6).unwrap();
    let d = put(dir.path(), "d.json", to_json(&structure_doc(&a)));
    let p = put(dir.path(), "p.json", to_json(&witness_doc(&a, &witness(&a))));
    let (code, rep) = run(dir.path(), &["quotient", s(&d), "--retraction", s(&p), "--max-len", "3"]);
    assert_eq!(code, 0, "{rep}");
    assert_eq!(rep["witnesses"]["pieces"][0]["rank_identity"], true);
}

#[test]
fn strictify_emits_a_chain_that_the_checkers_accept() {
    let dir = tempfile::tempdir().unwrap();
    let k = ground(Ring::Q, 6).unwrap();
    let end = endomorphism_dg(Ring::Q, &Complex::contractible(), 6).unwrap();
    let f = Functor::new(k.clone(), end, vec![0], 5, Table::new()).unwrap();
    let fp = put(dir.path(), "f.json", to_json(&functor_doc(&f)));
    let wp = put(dir.path(), "w.json", to_json(&witness_doc(&k, &witness(&k))));
    let chain = dir.path().join("chain");
    let (code, rep) = run(
        dir.path(),
        &["strictify", "--functor", s(&fp), "--witness", s(&wp), "--arity", "4", "--emit-chain", s(&chain)],
    );
    assert_eq!(code, 0, "{rep}");
    assert_eq!(rep["witnesses"]["strictly_unital"], true);
    let (code, _) = run(dir.path(), &["functor-check", s(&chain.join("functor.json")), "--arity", "4"]);
    assert_eq!(code, 0);
    let leftovers: Vec<_> = std::fs::read_dir(&chain).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert!(leftovers.iter().all(|n| n.to_string_lossy().ends_with(".json")), "{leftovers:?}");

    let (code, rep) = run(dir.path(), &["strictify", "--functor", s(&fp), "--arity", "4"]);
    assert_eq!(code, 1);
    assert_eq!(rep["code"], "SplitUnitsRequired");
}

#[test]
fn contract_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let one = "1/1";
    let fc = format!(
        r#"{{"schema":"ainfty/1","degrees":[0,1,0,1],"levels":[1,1,2,2],
            "d":{{"ring":"Q","rows":4,"cols":4,"entries":[[1,2,"{one}"],[3,2,"{one}"]]}}}}"#
    );
    let h = format!(r#"{{"schema":"ainfty/1","homotopies":{{"2":{{"ring":"Q","rows":2,"cols":2,"entries":[[0,1,"{one}"]]}}}}}}"#);
    let fcp = put(dir.path(), "fc.json", fc);
    let hp = put(dir.path(), "h.json", h.clone());
    let cert = dir.path().join("c.json");
    let (code, rep) = run(dir.path(), &["contract", "--in", s(&fcp), "--gr-homotopies", s(&hp), "--emit", s(&cert)]);
    assert_eq!(code, 0, "{rep}");
    assert_eq!(run(dir.path(), &["verify", s(&cert)]).0, 0);

    let wrong = put(dir.path(), "h2.json", h.replace("[0,1,", "[1,0,"));
    let (code, rep) = run(dir.path(), &["contract", "--in", s(&fcp), "--gr-homotopies", s(&wrong)]);
    assert_eq!(code, 1);
    assert_eq!(rep["code"], "BadGrHomotopy");
}

#[test]
fn units_cohomology_tensor_and_compose() {
    let dir = tempfile::tempdir().unwrap();
    let end = endomorphism_dg(Ring::Q, &Complex::contractible(), 4).unwrap();
    let e = put(dir.path(), "e.json", to_json(&structure_doc(&end)));
    let w = dir.path().join("w.json");
    let (code, rep) = run(dir.path(), &["units", s(&e), "--emit-witness", s(&w)]);
    assert_eq!(code, 0, "{rep}");
    assert!(w.exists());
    let (code, rep) = run(dir.path(), &["cohomology", s(&e), "--window", "-1..1"]);
    assert_eq!(code, 0);
    assert_eq!(rep["witnesses"]["dims"]["A|A"], serde_json::json!({"-1": 0, "0": 0, "1": 0}));
    let d = put(dir.path(), "d.json", to_json(&structure_doc(&dual_numbers(Ring::Q, 4).unwrap())));
    let t = dir.path().join("t.json");
    assert_eq!(run(dir.path(), &["tensor", s(&d), s(&e), "--emit", s(&t)]).0, 0);
    assert_eq!(run(dir.path(), &["validate", s(&t), "--arity", "3"]).0, 0);

    let id = Functor::identity(end.clone());
    let idp = put(dir.path(), "id.json", to_json(&functor_doc(&id)));
    let out = dir.path().join("comp.json");
    let (code, rep) = run(dir.path(), &["compose", "--inner", s(&idp), "--outer", s(&idp), "--emit", s(&out)]);
    assert_eq!(code, 0, "{rep}");
    let back: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let orig: Value = serde_json::from_str(&to_json(&functor_doc(&id))).unwrap();
    assert_eq!(back["comps"], orig["comps"]);
}
