use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hopfdef"))
}

fn pkg(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("packages").join(format!("{name}.pkg"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn hopfdef")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not json ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn every_shipped_package_validates() {
    for entry in std::fs::read_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("packages")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "pkg") {
            let out = run(&["validate", path.to_str().unwrap()]);
            assert_eq!(code(&out), 0, "{}", path.display());
            assert_eq!(report(&out)["status"], "pass");
        }
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let p = pkg("group-flip-Z2");
    let p = p.to_str().unwrap();
    for args in [
        vec!["verify", p, "--cutoff", "3"],
        vec!["cohomology", p, "--n-max", "2"],
        vec!["rigidity", pkg("sign-action-null-algebra").to_str().unwrap(), "--trials", "3", "--seed", "11"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(code(&a), 0, "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn report_carries_the_package_hash() {
    let out = run(&["validate", pkg("trivial-action").to_str().unwrap()]);
    let r = report(&out);
    let hash = r["package"]["hash"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert!(hash.chars().all(|c| c.is_ascii_hexdigit()));
    assert_eq!(r["package"]["name"], "trivial-action");
    assert_eq!(r["tool"], "hopfdef");

    let other = report(&run(&["validate", pkg("dual-number-algebra").to_str().unwrap()]));
    assert_ne!(other["package"]["hash"], r["package"]["hash"]);
}

#[test]
fn export_round_trips_to_the_same_hash() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["export", "group-flip-Z2"]);
    assert_eq!(code(&out), 0);
    let p = write(&dir, "exported.pkg", std::str::from_utf8(&out.stdout).unwrap());
    let a = report(&run(&["validate", p.to_str().unwrap()]));
    let b = report(&run(&["validate", pkg("group-flip-Z2").to_str().unwrap()]));
    assert_eq!(a["package"]["hash"], b["package"]["hash"]);

    let list = run(&["export"]);
    assert_eq!(String::from_utf8(list.stdout).unwrap().lines().count(), 10);
    assert_eq!(code(&run(&["export", "no-such-entry"])), 1);
}

#[test]
fn corrupted_comultiplication_gives_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(pkg("group-flip-Z2")).unwrap();
    // Delta(g0) = g0 g0 + g0 g1 is not coassociative.
    let bad = text.replacen("h.comul = [\n  [1, 0],\n  [0, 0],", "h.comul = [\n  [1, 0],\n  [1, 0],", 1);
    assert_ne!(bad, text);
    let p = write(&dir, "bad.pkg", &bad);
    let out = run(&["validate", p.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let r = report(&out);
    assert_eq!(r["status"], "fail");
    let checks = r["result"]["checks"].as_array().unwrap();
    let coassoc = checks.iter().find(|c| c["axiom"] == "coassociativity").unwrap();
    assert_eq!(coassoc["passed"], false);
    assert!(!coassoc["witness"].is_null());

    // Commands that need a valid package refuse it with the same report.
    let out = run(&["verify", p.to_str().unwrap(), "--cutoff", "2"]);
    assert_eq!(code(&out), 2);
    assert_eq!(report(&out)["status"], "invalid-package");
}

#[test]
fn parse_errors_exit_one_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "empty.pkg", "");
    let out = run(&["validate", p.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("format"));

    let p = write(&dir, "bad-kind.pkg", "format = 1\nname = x\nkind = XY\n");
    let out = run(&["validate", p.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let out = run(&["validate", dir.path().join("missing.pkg").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn ceiling_refusal_exits_four() {
    let out = run(&["--ceiling", "5", "verify", pkg("group-flip-Z2").to_str().unwrap()]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("ceiling 5"));
}

#[test]
fn unsupported_view_is_a_usage_error() {
    let out = run(&["verify", pkg("trivial-action").to_str().unwrap(), "--kind", "CB"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn tricomplex_verify_compares_planes() {
    let out = run(&["verify", pkg("counit-action-sweedler").to_str().unwrap(), "--cutoff", "3"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    let planes = r["result"]["planes"].as_array().unwrap();
    assert_eq!(planes.len(), 2);
    assert!(planes.iter().all(|p| p["passed"] == true));
    assert_eq!(r["result"]["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn corner_and_full_agree_outside_degrees_one_and_two() {
    let out = run(&["cohomology", pkg("dual-number-algebra").to_str().unwrap(), "--n-max", "3"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    let rows = r["result"]["cohomology"].as_array().unwrap();
    let dim = |mode: &str, n: u64| {
        rows.iter().find(|x| x["mode"] == mode && x["degree"] == n).unwrap()["dim"].as_u64().unwrap()
    };
    assert_eq!(dim("Corner", 0), dim("Full", 0));
    assert_eq!(dim("Corner", 3), dim("Full", 3));
    for row in rows {
        assert_eq!(row["representatives"].as_array().unwrap().len() as u64, row["dim"].as_u64().unwrap());
    }
}

#[test]
fn deform_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let dn = pkg("dual-number-algebra");
    let dn = dn.to_str().unwrap();
    let inf = Path::new(env!("CARGO_MANIFEST_DIR")).join("packages/infinitesimals/dual-numbers-x2-t.inf");

    let out = run(&["deform", dn, "--infinitesimal", inf.to_str().unwrap(), "--max-order", "3"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["status"], "extended");
    assert_eq!(r["result"]["reached_order"], 3);
    assert!(r["result"]["trace"].as_array().unwrap().iter().all(|t| t["residual_is_cocycle"] == true));

    // pi(1, 1) = 1 alone fails the cocycle condition at (x, 1, 1).
    let p = write(&dir, "bad.inf", "pi = [[1, 0, 0, 0], [0, 0, 0, 0]]\n");
    let out = run(&["deform", dn, "--infinitesimal", p.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert_eq!(report(&out)["status"], "not-a-cocycle");

    let p = write(&dir, "foreign.inf", "rho = [[1]]\n");
    let out = run(&["deform", dn, "--infinitesimal", p.to_str().unwrap()]);
    assert_eq!(code(&out), 1);

    let out = run(&["deform", dn]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["status"], "extended");
}

#[test]
fn rigidity_statuses() {
    let out = run(&["rigidity", pkg("sign-action-null-algebra").to_str().unwrap(), "--trials", "4", "--max-order", "3"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["status"], "rigid");
    assert_eq!(r["result"]["h2_dim"], 0);
    assert!(r["result"]["samples"].as_array().unwrap().iter().all(|s| s["trivialized"] == true));

    let out = run(&["rigidity", pkg("dual-number-algebra").to_str().unwrap(), "--trials", "2", "--max-order", "2"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["status"], "h2-nonzero");
    assert!(!r["result"]["exhibited"].is_null());
}

#[test]
fn field_override_and_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("r.json");
    let out = run(&[
        "--field",
        "5",
        "--report-out",
        dest.to_str().unwrap(),
        "validate",
        pkg("group-flip-Z2").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&dest).unwrap()).unwrap();
    assert_eq!(r["package"]["field"], "F5");

    assert_eq!(code(&run(&["--field", "6", "validate", pkg("group-flip-Z2").to_str().unwrap()])), 1);
}
