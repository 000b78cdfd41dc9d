use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "corpus", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simdiag"))
        .args(args)
        .env_remove("SIMDIAG_SEED")
        .env_remove("SIMDIAG_TOL_EIG")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn doc(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn classify(file: &str, property: &str) -> i32 {
    code(&run(&["classify", &corpus(file), &format!("--property={property}")]))
}

#[test]
fn corpus_verdict_exit_codes() {
    let cases = [
        ("twsdb_not_sd.json", "TWSD-B", 0),
        ("twsdb_not_sd.json", "SD", 1),
        ("twsdb_not_sd.txt", "TWSD-B", 0),
        ("not_twsd.json", "TWSD", 1),
        ("twsd_not_twsdb.json", "TWSD-B", 1),
        ("twsd_not_twsdb.json", "TWSD", 0),
        ("twsdb_no_psd_pencil.json", "TWSD-B", 0),
        ("triple_6_1.json", "SD", 1),
        ("triple_6_1.json", "TWSD-B", 1),
        ("triple_6_1.json", "DWSD", 1),
        ("triple_6_1.json", "TWSD", 0),
        ("triple_6_1.json", "D-SDO(9)", 0),
        ("general_3x3.json", "TWSD", 2),
    ];
    for (file, prop, want) in cases {
        assert_eq!(classify(file, prop), want, "{file} {prop}");
    }
}

#[test]
fn full_lattice_row() {
    let o = run(&["classify", &corpus("triple_6_1.json"), "--property=all"]);
    assert_eq!(code(&o), 0);
    let d = doc(&o);
    assert_eq!(d["schema"], 1);
    assert_eq!(d["reports"].as_array().unwrap().len(), 5);
    assert!(d["lattice_violations"].as_array().unwrap().is_empty());
    for r in d["reports"].as_array().unwrap() {
        assert!(!r["trace"]["rules"].as_array().unwrap().is_empty(), "{r}");
    }
}

#[test]
fn text_output() {
    let o = run(&["--text", "classify", &corpus("not_twsd.json"), "--property", "TWSD"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("TWSD: no"));
}

#[test]
fn asymmetric_input() {
    let o = run(&["classify", &corpus("asymmetric.json")]);
    assert_eq!(code(&o), 3);
    let d = doc(&o);
    assert_eq!(d["error"]["kind"], "parse");
    assert!(d["error"]["message"].as_str().unwrap().contains("(1, 0)"));
    let o = run(&["classify", &corpus("asymmetric.json"), "--symmetrize"]);
    assert!(code(&o) <= 2);
}

#[test]
fn usage_errors() {
    let o = run(&["--json", "--text", "classify", &corpus("not_twsd.json")]);
    assert_eq!(code(&o), 64);
    assert_eq!(doc(&o)["error"]["kind"], "usage");
    assert_eq!(code(&run(&["classify", &corpus("not_twsd.json"), "--property=XYZ"])), 64);
    assert_eq!(code(&run(&["--tol.nope=1", "classify", &corpus("not_twsd.json")])), 64);
    assert_eq!(code(&run(&["qcqp"])), 64);
}

#[test]
fn tolerance_precedence() {
    // A huge clustering radius merges the complex pair onto the real axis.
    let file = corpus("not_twsd.json");
    let base = ["classify", file.as_str(), "--property=TWSD-B"];
    let env = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_simdiag"))
            .args(base)
            .env("SIMDIAG_TOL_EIG", v)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run(&base)), 1);
    assert_eq!(code(&env("10")), 0);
    let flagged = Command::new(env!("CARGO_BIN_EXE_simdiag"))
        .arg("--tol.eig=1e-6")
        .args(base)
        .env("SIMDIAG_TOL_EIG", "10")
        .output()
        .unwrap();
    assert_eq!(code(&flagged), 1);
}

#[test]
fn sequence_table_decreases() {
    let o = run(&["sequence", &corpus("twsdb_not_sd.json"), "--k", "10,100"]);
    assert_eq!(code(&o), 0);
    let d = doc(&o);
    let t = d["table"].as_array().unwrap();
    assert_eq!(t.len(), 2);
    let off: Vec<f64> = t.iter().map(|r| r["offdiag"].as_f64().unwrap()).collect();
    assert!(off[1] < off[0]);
    assert_eq!(d["verification"]["monotone_decay"], true);
}

#[test]
fn qcqp_modes() {
    let o = run(&["qcqp", "--single", &corpus("qcqp_psd.json")]);
    assert_eq!(code(&o), 0);
    assert_eq!(doc(&o)["solution"]["value"].as_f64(), Some(0.0));
    let o = run(&["qcqp", "--single", &corpus("qcqp_indefinite.json")]);
    assert!((doc(&o)["solution"]["value"].as_f64().unwrap() + 1.0).abs() < 1e-9);
    let o = run(&["qcqp", "--relax", &corpus("qcqp_relax.json"), "--k", "1000"]);
    assert_eq!(code(&o), 0);
    let d = doc(&o);
    assert!(d["relative_dropped"].as_f64().unwrap() <= 1e-6);
    assert!(d["violation"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn dsdo_document_is_a_matrix_set() {
    let o = run(&["dsdo", &corpus("triple_6_1.json")]);
    assert_eq!(code(&o), 0);
    let d = doc(&o);
    assert!(d["residual"].as_f64().unwrap() <= 1e-10);
    let path = std::env::temp_dir().join(format!("simdiag-dsdo-{}.json", std::process::id()));
    std::fs::write(&path, &o.stdout).unwrap();
    let o = run(&["classify", path.to_str().unwrap(), "--property=SDO"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code(&o), 0, "the Dᵢ are diagonal");
}

#[test]
fn synth_round_trip() {
    let blocks = r#"[{"type":"finite","sign":-1,"size":2,"lambda":-1}]"#;
    let o = run(&["synth", "--blocks", blocks, "--cond", "2", "--whitespace"]);
    assert_eq!(code(&o), 0);
    let path = std::env::temp_dir().join(format!("simdiag-synth-{}.txt", std::process::id()));
    std::fs::write(&path, &o.stdout).unwrap();
    let c = run(&["classify", path.to_str().unwrap(), "--property=TWSD-B"]);
    let s = run(&["classify", path.to_str().unwrap(), "--property=SD"]);
    std::fs::remove_file(&path).ok();
    // A single real Jordan block of size 2: bounded weak diagonalization only.
    assert_eq!(code(&c), 0);
    assert_eq!(code(&s), 1);
}
