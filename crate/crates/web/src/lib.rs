//! Browser bindings: three operations on JSON text, returning JSON text.
//!
//! Every function also works natively, which is how the tests drive them.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use simdiag::classify::{check_twsd, check_twsdb_set, classify_all, lattice_violations};
use simdiag::io::{parse_matrix_set, FormatHint};
use simdiag::qcqp::{solve_single_constraint, SingleConstraintProblem};
use simdiag::sequences::verify_sequence;
use simdiag::{linalg, Config, SymMatrixSet};

fn load(text: &str, cfg: &Config) -> Result<SymMatrixSet, String> {
    parse_matrix_set(text, FormatHint::Detect, true, cfg).map_err(|e| e.to_string())
}

/// Finite reals as numbers, the rest as strings.
fn real(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(v.to_string())
    }
}

/// Verdicts of the five unparameterized properties, with rule tags.
#[wasm_bindgen]
pub fn classify_json(text: &str) -> Result<String, String> {
    let cfg = Config::default();
    let set = load(text, &cfg)?;
    let reports = classify_all(&set, &cfg);
    let rows: Vec<Value> = reports
        .iter()
        .map(|r| json!({"property": r.property, "verdict": r.verdict, "rules": r.trace.rules}))
        .collect();
    let out = json!({
        "dim": set.dim(),
        "count": set.len(),
        "reports": rows,
        "lattice_violations": lattice_violations(&set, &reports, &cfg),
    });
    Ok(out.to_string())
}

/// Off-diagonal and diagonal norms of `P_kᵀAᵢP_k` over `ks` (comma separated)
/// for the certified TWSD-B or TWSD sequence.
#[wasm_bindgen]
pub fn sequence_decay(text: &str, ks: &str) -> Result<String, String> {
    let cfg = Config::default();
    let set = load(text, &cfg)?;
    let mut grid: Vec<f64> = ks
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| format!("bad k value {s:?}")))
        .collect::<Result<_, _>>()?;
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    if grid.len() < 3 || grid[0] < 1.0 {
        return Err("give at least three k values, all ≥ 1".into());
    }
    let bounded = check_twsdb_set(&set, &cfg);
    let (report, property) = if bounded.sequence().is_some() {
        (bounded, "TWSD-B")
    } else {
        (check_twsd(&set, &cfg), "TWSD")
    };
    let Some(seq) = report.sequence() else {
        return Ok(json!({"property": property, "verdict": report.verdict, "rows": []}).to_string());
    };
    let v = verify_sequence(&set, seq, &grid).map_err(|e| e.to_string())?;
    let rows: Vec<Value> = (0..v.ks.len())
        .map(|i| json!({"k": v.ks[i], "offdiag": v.offdiag[i], "diag": v.diag[i], "det_drift": v.det_drift[i]}))
        .collect();
    Ok(json!({
        "property": property,
        "verdict": report.verdict,
        "recipe": seq.recipe_name(),
        "rows": rows,
        "slope": v.decay_slope,
        "monotone_decay": v.monotone_decay,
        "bounded_diag": v.bounded_diag,
    })
    .to_string())
}

/// `min xᵀBx` s.t. `xᵀAx ≤ b`, from `{"objective": B, "constraint": A, "rhs": b}`.
#[wasm_bindgen]
pub fn qcqp_single(text: &str) -> Result<String, String> {
    let cfg = Config::default();
    let raw: SingleConstraintProblem = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let p = SingleConstraintProblem::new(
        linalg::symmetrize(&raw.objective),
        linalg::symmetrize(&raw.constraint),
        raw.rhs,
        &cfg,
    )
    .map_err(|e| e.to_string())?;
    let s = solve_single_constraint(&p, &cfg).map_err(|e| e.to_string())?;
    Ok(json!({
        "status": s.status,
        "value": real(s.value),
        "point": s.point,
        "slater": s.diagnostics.slater,
        "structural": s.diagnostics.structural,
    })
    .to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_pair() {
        let out: Value = serde_json::from_str(
            &classify_json(r#"{"dim":2,"mats":[[[0,1],[1,0]],[[1,0],[0,0]]]}"#).unwrap(),
        )
        .unwrap();
        let tb = out["reports"].as_array().unwrap().iter().find(|r| r["property"] == "TWSD-B").unwrap();
        assert_eq!(tb["verdict"], "yes");
        assert!(classify_json("{").is_err());
    }

    #[test]
    fn decay_table() {
        let out: Value =
            serde_json::from_str(&sequence_decay("2 2\n0 1\n1 0\n1 0\n0 0\n", "10, 100, 1000").unwrap()).unwrap();
        let rows = out["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows[2]["offdiag"].as_f64().unwrap() < rows[0]["offdiag"].as_f64().unwrap());
        assert!(sequence_decay("2 1\n1 0\n0 1\n", "10").is_err());
    }

    #[test]
    fn single_constraint() {
        let out: Value = serde_json::from_str(
            &qcqp_single(r#"{"objective":[[1,0],[0,-1]],"constraint":[[1,0],[0,1]],"rhs":1}"#).unwrap(),
        )
        .unwrap();
        assert_eq!(out["status"], "attained");
        assert!((out["value"].as_f64().unwrap() + 1.0).abs() < 1e-9);
    }
}
