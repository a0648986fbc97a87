use std::process::{Command, Output};

fn orbita(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbita"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn list_cases_names_every_case() {
    let o = orbita(&["list-cases"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for id in ["A1-sym4", "A3-adjoint-p2", "D4-so8-p2", "C4-lambda2-p2", "Sp4xSpN", "Sp6xSp6-diag", "B6-spin"] {
        assert!(text.contains(id), "{id} missing");
    }
}

#[test]
fn verify_sym4_q5() {
    let o = orbita(&["verify", "A1-sym4", "--q", "5"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("4 orbits"));
}

#[test]
fn verify_rejects_bad_fields() {
    assert!(!orbita(&["verify", "A1-sym4", "--q", "6"]).status.success());
    assert!(!orbita(&["verify", "A1-sym4", "--q", "3"]).status.success());
    assert!(!orbita(&["verify", "no-such-case", "--q", "5"]).status.success());
}

#[test]
fn json_report_schema() {
    let dir = std::env::temp_dir().join(format!("orbita-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sym4.json");
    let o = orbita(&["verify", "A1-sym4", "--q", "7", "--json", path.to_str().unwrap(), "--threads", "1"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["schema"], "orbita-report/1");
    assert_eq!(doc["case"], "A1-sym4");
    assert_eq!(doc["q"], 7);
    assert_eq!(doc["form_type"], "parabolic");
    assert_eq!(doc["total_singular"], 400);
    let orbits = doc["orbits"].as_array().unwrap();
    assert_eq!(orbits.len(), 6);
    for o in orbits {
        for key in ["size", "rep", "stab_order", "invariants"] {
            assert!(o.get(key).is_some(), "orbit lacks {key}");
        }
    }
    assert!(doc["elapsed_ms"].is_u64());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn budget_refusal_is_an_error() {
    let o = orbita(&["orbits", "Sp4xSp4", "--q", "3", "--budget", "1000"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn identities_command() {
    let o = orbita(&["identities", "--family", "F4", "--q-list", "2,3,4,5,7,8,9,11,13,16"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = orbita(&["identities", "--family", "PGL2", "--q-list", "5,7"]);
    assert!(o.status.success());
    assert!(!orbita(&["identities", "--family", "E8", "--q-list", "2"]).status.success());
}

#[test]
fn spinor_eval() {
    let o = orbita(&["spinor", "eval", "1+f1f2f3f4f5f6"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("Q_X:      1"), "{text}");
    assert!(!orbita(&["spinor", "eval", "e8"]).status.success());
}
