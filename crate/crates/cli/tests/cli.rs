use std::path::Path;
use std::process::{Command, Output};

use bcabe_cli::files::{ReportFile, StateFile};
use bcabe_core::states::build_family;
use bcabe_core::FamilyLabel;

fn bcabe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bcabe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn report(path: &Path) -> ReportFile {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn arg(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn state_file_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.json");
    let out = bcabe(&["state", "--size", "4", "--family", "rho+", "--out", arg(&path)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let file = StateFile::read(&path).unwrap();
    assert_eq!(file.qubits, 4);
    assert_eq!(file.data.len(), 256);
    let rho = file.to_density().unwrap();
    assert!((rho.trace() - 1.0).abs() < 1e-12);
    assert_eq!(rho.matrix(), build_family(4, FamilyLabel::RhoPlus).unwrap().matrix());
    assert!(file.to_pure().is_err());
}

#[test]
fn pure_state_files_round_trip() {
    let psi = bcabe_core::BellLabel::PsiMinus.state();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.json");
    StateFile::from_pure(&psi).write(&path).unwrap();
    assert_eq!(StateFile::read(&path).unwrap().to_pure().unwrap(), psi);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.json");
    assert_eq!(code(&bcabe(&["state", "--size", "3", "--out", arg(&path)])), 2);
    assert_eq!(
        code(&bcabe(&[
            "state",
            "--size",
            "4",
            "--family",
            "tau+",
            "--out",
            arg(&path)
        ])),
        2
    );
    assert_eq!(code(&bcabe(&["certify", "--size", "8", "--mode", "exact"])), 2);
    assert_eq!(code(&bcabe(&["frobnicate"])), 2);
    assert!(!path.exists());
}

#[test]
fn io_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("x.json");
    assert_eq!(code(&bcabe(&["state", "--size", "4", "--out", arg(&path)])), 3);
}

#[test]
fn verify_six_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.json");
    assert_eq!(code(&bcabe(&["verify", "--size", "6", "--out", arg(&path)])), 0);
    let r = report(&path);
    assert!(r.payload.passed);
    assert!(
        r.payload
            .checks
            .iter()
            .filter(|c| c.name.starts_with("recursion"))
            .count()
            == 8
    );
    assert!(!r.payload.checks.iter().any(|c| c.name == "smolin equivalence"));
}

#[test]
fn verify_four_includes_smolin_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.json");
    assert_eq!(code(&bcabe(&["verify", "--size", "4", "--out", arg(&path)])), 0);
    assert!(report(&path)
        .payload
        .checks
        .iter()
        .any(|c| c.name == "smolin equivalence" && c.passed));
}

#[test]
fn tampered_state_fails_verify() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.json");
    assert_eq!(
        code(&bcabe(&["verify", "--size", "4", "--tamper", "--out", arg(&path)])),
        1
    );
    let r = report(&path);
    assert!(!r.payload.passed);
    let failed: Vec<_> = r.payload.checks.iter().filter(|c| !c.passed).collect();
    assert!(failed.iter().any(|c| c.name.contains("recursion rho+")));
    assert!(failed.iter().all(|c| c.value >= c.threshold));
}

#[test]
fn cut_reports() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("rho.json"), dir.path().join("sigma.json"));
    assert_eq!(
        code(&bcabe(&["cuts", "--size", "4", "--family", "rho+", "--out", arg(&a)])),
        0
    );
    assert_eq!(
        code(&bcabe(&["cuts", "--size", "4", "--family", "sigma+", "--out", arg(&b)])),
        0
    );
    let classes = |p: &Path| -> Vec<String> {
        report(p).payload.results["cuts"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c["classification"].as_str().unwrap().to_string())
            .collect()
    };
    let rho = classes(&a);
    assert_eq!(rho.len(), 7);
    assert_eq!(rho.iter().filter(|c| *c == "NPT").count(), 4);
    assert_eq!(rho.iter().filter(|c| *c == "PPT").count(), 3);
    assert_eq!(classes(&b), rho);

    let six = dir.path().join("six.json");
    assert_eq!(code(&bcabe(&["cuts", "--size", "6", "--out", arg(&six)])), 0);
    let r = report(&six);
    assert_eq!(r.payload.results["cuts"].as_array().unwrap().len(), 31);
    // Only the 6 single-party and 15 two-party cuts are asserted.
    assert_eq!(r.payload.checks.len(), 21);
}

#[test]
fn certify_exact_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    assert_eq!(
        code(&bcabe(&[
            "certify",
            "--size",
            "4",
            "--family",
            "rho+",
            "--mode",
            "exact",
            "--out",
            arg(&a)
        ])),
        0
    );
    assert_eq!(
        code(&bcabe(&[
            "certify",
            "--size",
            "4",
            "--family",
            "rho+",
            "--mode",
            "exact",
            "--out",
            arg(&b)
        ])),
        0
    );
    let (ra, rb) = (report(&a), report(&b));
    let cert = &ra.payload.results["certificate"];
    assert_eq!(cert["lower_bound"].as_f64().unwrap().round(), 2.0);
    assert_eq!(cert["achieved"], 2.0);
    assert_eq!(cert["exact"], true);

    // Payloads differ only through the transcript path argument.
    let mut pb = rb.payload.clone();
    pb.results["protocol"]["transcript_path"] = ra.payload.results["protocol"]["transcript_path"].clone();
    assert_eq!(
        serde_json::to_string(&ra.payload).unwrap(),
        serde_json::to_string(&pb).unwrap()
    );

    let transcript = std::fs::read_to_string(dir.path().join("a.transcript.jsonl")).unwrap();
    let parsed = bcabe_core::ProtocolTranscript::from_jsonl(&transcript).unwrap();
    assert!(bcabe_core::locc::locc_audit(&parsed).passed());
    assert_eq!(parsed.digest(), cert["protocol_transcript_id"].as_str().unwrap());
}

#[test]
fn certify_eight_sampled() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let out = bcabe(&[
        "certify",
        "--size",
        "8",
        "--mode",
        "sampled",
        "--seed",
        "0",
        "--out",
        arg(&path),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&path);
    let cert = &r.payload.results["certificate"];
    assert_eq!(cert["achieved"], 4.0);
    assert!((cert["lower_bound"].as_f64().unwrap() - 4.0).abs() < 1e-9);
    let distance = r
        .payload
        .checks
        .iter()
        .find(|c| c.name == "prepared state distance")
        .unwrap();
    assert_eq!(distance.threshold, 0.05);
    assert!(distance.passed);
}
