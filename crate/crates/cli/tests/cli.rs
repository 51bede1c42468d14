use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use vdw::bounds::{CandidateWindow, ConditionReport, LogDecomposition, RootEnvelope};
use vdw::cnf::{self, Cnf};
use vdw::registry::{AuditReport, AuditRow};
use vdw::search::PartialResult;
use vdw::{search_exact, Budget, Coloring, PowerInterval, RadixExpansion, SearchOutcome, VdwCertificate};

fn vdw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vdw")).args(args).output().expect("binary runs")
}

fn vdw_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vdw"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = vdw(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    stdout(&out)
}

/// Runs in JSON mode and returns the payload after checking the envelope.
fn payload(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let text = ok(&full);
    assert_eq!(text.lines().count(), 1, "one JSON object per line");
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["command"], args[0]);
    v["payload"].clone()
}

#[test]
fn exit_codes() {
    assert_eq!(vdw(&["expand", "1132", "--base", "2"]).status.code(), Some(0));
    let domain = vdw(&["expand", "0", "--base", "2"]);
    assert_eq!(domain.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&domain.stderr).contains("error:"));
    assert_eq!(vdw(&["localize", "5", "--base", "1"]).status.code(), Some(1));
    assert_eq!(vdw(&["ap-bound", "--a", "1", "--d", "0", "--k", "3", "--r", "2"]).status.code(), Some(1));
    assert_eq!(vdw(&["bogus"]).status.code(), Some(2));
    assert_eq!(vdw(&["expand", "1132", "--base", "2", "--nope"]).status.code(), Some(2));
    assert_eq!(vdw(&["expand", "-5", "--base", "2"]).status.code(), Some(2));
    assert_eq!(vdw(&["verify", "--coloring", "111", "--r", "2", "--k", "3"]).status.code(), Some(1));
    assert_eq!(vdw(&["verify", "--coloring", "11221122", "--r", "2", "--k", "3"]).status.code(), Some(0));
}

#[test]
fn expand_shows_power_decomposition() {
    assert_eq!(
        ok(&["expand", "1132", "--base", "2"]),
        "1132 = 1*2^10 + 1*2^6 + 1*2^5 + 1*2^3 + 1*2^2 (base 2)\n"
    );
    let e: RadixExpansion = serde_json::from_value(payload(&["expand", "1132", "--base", "2"])).unwrap();
    assert_eq!(e, vdw::expand(1132u32, 2u32).unwrap());
}

#[test]
fn table_matches_golden() {
    let golden = include_str!("golden/table.txt");
    let first = ok(&["table"]);
    assert_eq!(first, golden);
    assert_eq!(ok(&["table"]), first);
}

#[test]
fn window_matches_golden() {
    let text = ok(&["window", "--base", "2", "--min", "11", "--max", "48"]);
    assert_eq!(text, include_str!("golden/window_2_11_48.txt"));
    assert_eq!(text.lines().filter(|l| l.starts_with("n=")).count(), 38);
    let w: CandidateWindow = serde_json::from_value(payload(&["window", "--base", "2", "--min", "11", "--max", "48"])).unwrap();
    assert_eq!(w.len(), 38);
    assert_eq!(w.global_upper.to_string(), "562949953421312");
}

#[test]
fn structured_payloads_round_trip() {
    let i: PowerInterval = serde_json::from_value(payload(&["localize", "76", "--base", "4"])).unwrap();
    assert_eq!((i.exponent(), i.lower().to_string(), i.upper().to_string()), (3, "64".into(), "256".into()));

    let d: LogDecomposition = serde_json::from_value(payload(&["decompose", "1132", "--base", "2"])).unwrap();
    assert_eq!(d.n, 10);

    let c: ConditionReport = serde_json::from_value(payload(&["condition", "1132", "--r", "2", "--k", "6"])).unwrap();
    assert!(c.all_hold());

    let env: RootEnvelope = serde_json::from_value(payload(&["roots", "1132", "--base", "2"])).unwrap();
    assert!(env.lower <= env.root && env.root < env.upper);

    let rows: Vec<AuditRow> = serde_json::from_value(payload(&["table"])).unwrap();
    assert_eq!(rows.len(), 9);

    let audit: AuditReport = serde_json::from_value(payload(&["audit"])).unwrap();
    assert_eq!(audit.mismatches.len(), 7);
    assert!(audit.all_conditions_hold());

    assert_eq!(payload(&["exp-floor", "3703", "--base", "7"])["n_min"], 4);
    assert_eq!(payload(&["exp-floor", "3703", "--base", "2"])["n_min"], 11);
    assert_eq!(payload(&["cross-bound", "--m", "2", "--k", "3", "--r", "2"])["n"], 3);
    assert_eq!(payload(&["delta", "27", "--base", "3"])["delta"], 3.0);
}

#[test]
fn text_outputs() {
    assert_eq!(ok(&["localize", "1132", "--base", "2"]), "1132 in [1024, 2048) = [2^10, 2^11)\n");
    assert_eq!(ok(&["delta", "1132", "--base", "2"]), "log_2 1132 = 10.144658\n");
    assert_eq!(ok(&["exp-floor", "3703", "--base", "2"]), "W > 3703 implies n >= 11 in base 2\n");
    let audit = ok(&["audit"]);
    assert!(audit.contains("mismatch W(3,3) delta: printed 3.00002 computed 3.00000"));
}

#[test]
fn search_writes_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&vdw_in(dir.path(), &["search", "--r", "2", "--k", "4"]));
    assert!(text.starts_with("W(2,4) = 35\n"), "{text}");
    let cert = VdwCertificate::parse(&fs::read_to_string(dir.path().join("w2_4.cert")).unwrap()).unwrap();
    assert_eq!(cert.w(), 35);

    let out = vdw_in(dir.path(), &["verify", "--cert", "w2_4.cert"]);
    assert_eq!(out.status.code(), Some(0));

    let p = payload(&["search", "--r", "2", "--k", "3", "--out", dir.path().join("x.cert").to_str().unwrap()]);
    assert_eq!(p["status"], "exact");
    let cert: VdwCertificate = serde_json::from_value(p["certificate"].clone()).unwrap();
    assert_eq!(cert.w(), 9);

    let p = payload(&["search", "--r", "3", "--k", "3", "--threads", "3", "--out", dir.path().join("y.cert").to_str().unwrap()]);
    assert_eq!(p["w"], 27);

    let p = payload(&["search", "--r", "2", "--k", "5", "--max-nodes", "50"]);
    assert_eq!(p["status"], "budget-exceeded");
    let partial: PartialResult = serde_json::from_value(p["partial"].clone()).unwrap();
    assert!(partial.lower_bound < 178);
}

#[test]
fn tampered_certificate_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cert");
    let good = vdw::certificate::bundled_for(2, 3).unwrap().render();
    fs::write(&path, good.replace("w 9", "w 10")).unwrap();
    assert_eq!(vdw(&["verify", "--cert", path.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn cnf_and_ingest_workflow() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();

    let dimacs = ok(&["cnf", "--r", "2", "--k", "3", "--n", "9"]);
    let parsed = Cnf::parse_dimacs(&dimacs).unwrap();
    assert_eq!(parsed, cnf::cnf_export(2, 3, 9).unwrap());
    ok(&["cnf", "--r", "2", "--k", "3", "--n", "8", "--out", &p("w8.cnf")]);
    assert_eq!(Cnf::parse_dimacs(&fs::read_to_string(p("w8.cnf")).unwrap()).unwrap(), cnf::cnf_export(2, 3, 8).unwrap());

    let SearchOutcome::Exact(cert) = search_exact(2, 3, Budget::unlimited()).unwrap() else {
        panic!()
    };
    let sat = format!("c toy-solver 1.0\n{}", cnf::render_model(cert.witness()));
    fs::write(p("sat.out"), &sat).unwrap();
    fs::write(p("unsat.out"), "c toy-solver 1.0\ns UNSATISFIABLE\n").unwrap();

    let text = ok(&["ingest", "--r", "2", "--k", "3", "--n", "8", "--output", &p("sat.out")]);
    assert!(text.starts_with("SATISFIABLE"));

    let text = ok(&[
        "ingest", "--r", "2", "--k", "3", "--n", "9", "--output", &p("unsat.out"), "--witness-output", &p("sat.out"), "--out",
        &p("w.cert"),
    ]);
    assert!(text.contains("W(2,3) = 9"), "{text}");
    let combined = VdwCertificate::parse(&fs::read_to_string(p("w.cert")).unwrap()).unwrap();
    assert_eq!(combined.w(), 9);
    assert_eq!(combined.exhaustion(), &vdw::Exhaustion::external("toy-solver 1.0"));

    // a model containing an AP is rejected
    let bad = Coloring::new(vec![1; 8], 2).unwrap();
    fs::write(p("bad.out"), cnf::render_model(&bad)).unwrap();
    let out = vdw(&["ingest", "--r", "2", "--k", "3", "--n", "8", "--output", &p("bad.out")]);
    assert_eq!(out.status.code(), Some(1));

    fs::write(p("junk.out"), "s MAYBE\n").unwrap();
    assert_eq!(vdw(&["ingest", "--r", "2", "--k", "3", "--n", "8", "--output", &p("junk.out")]).status.code(), Some(1));
}
