//! End-to-end acceptance battery. Prints one PASS/FAIL line per criterion.

use nalgebra::DVector;
use simdiag::classify::{
    check_sd, check_twsd, check_twsdb_set, check_dwsd, classify_all, lattice_violations,
};
use simdiag::dsdo::{dsdo_basis_construct, dsdo_construct};
use simdiag::generators::{self, rng};
use simdiag::jordan::real_jordan_form;
use simdiag::matcore::{e_mat, find_definite_pencil, DefiniteSearch, Eigenvalue};
use simdiag::qcqp::oracle::{brute_force_single, OracleBudget};
use simdiag::qcqp::{
    canonical_at, random_structured_problem, solve_lp, solve_single_constraint, LpInstance,
    LpOutcome, SingleConstraintProblem, SingleStatus,
};
use simdiag::sequences::{seq_nonsingular_pair, verify_sequence, DEFAULT_K_GRID};
use simdiag::{Config, Mat, SymMatrixSet, Verdict};

fn m(n: usize, v: &[f64]) -> Mat {
    Mat::from_row_slice(n, n, v)
}

fn d(v: &[f64]) -> Mat {
    Mat::from_diagonal(&DVector::from_column_slice(v))
}

fn set(v: Vec<Mat>) -> SymMatrixSet {
    SymMatrixSet::new(v).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(fails: Vec<String>, summary: String) -> Outcome {
    Outcome {
        pass: fails.is_empty(),
        detail: if fails.is_empty() {
            summary
        } else {
            format!("{summary}; {} failure(s), first: {}", fails.len(), fails[0])
        },
    }
}

fn example_corpus() -> Outcome {
    let c = Config::default();
    let mut fails = Vec::new();
    let mut expect = |name: &str, got: Verdict, want: Verdict| {
        if got != want {
            fails.push(format!("{name}: got {got:?}, want {want:?}"));
        }
    };
    let s = set(vec![e_mat(2), d(&[1., 0.])]);
    expect("E2/diag(1,0) TWSD-B", check_twsdb_set(&s, &c).verdict, Verdict::Yes);
    expect("E2/diag(1,0) SD", check_sd(&s, &c).verdict, Verdict::No);
    let s = set(vec![e_mat(2), d(&[1., -1.])]);
    expect("E2/diag(1,-1) TWSD", check_twsd(&s, &c).verdict, Verdict::No);
    let s = set(vec![m(3, &[1., 0., 0., 0., 0., 1., 0., 1., 0.]), d(&[1., 1., -1.])]);
    expect("3x3 pair TWSD-B", check_twsdb_set(&s, &c).verdict, Verdict::No);
    expect("3x3 pair TWSD", check_twsd(&s, &c).verdict, Verdict::Yes);
    let s = set(vec![m(3, &[-1., 0., 0., 0., 1., 1., 0., 1., -1.]), d(&[-1., 1., 0.])]);
    expect("no-definite pair TWSD-B", check_twsdb_set(&s, &c).verdict, Verdict::Yes);
    let definite_found = !matches!(find_definite_pencil(&s, &c), DefiniteSearch::NoneFound { .. });
    let s = set(vec![
        Mat::identity(3, 3),
        d(&[1., 1., -1.]),
        m(3, &[1., 0., 0., 0., 0., 1., 0., 1., 0.]),
    ]);
    expect("triple SD", check_sd(&s, &c).verdict, Verdict::No);
    expect("triple TWSD-B", check_twsdb_set(&s, &c).verdict, Verdict::No);
    expect("triple DWSD", check_dwsd(&s, &c).verdict, Verdict::No);
    expect("triple TWSD", check_twsd(&s, &c).verdict, Verdict::Yes);
    if definite_found {
        fails.push("no-definite pair: a semidefinite pencil was reported".into());
    }
    outcome(fails, "11 verdicts on 5 example sets".into())
}

fn witness_replication() -> Outcome {
    let mut fails = Vec::new();
    let b = d(&[1., 0.]);
    let mut worst = 0.0f64;
    for k in [10.0, 100.0, 1000.0] {
        let p = m(2, &[1. / k, 1. / (2. * k), -k, k / 2.]);
        let t = p.transpose() * e_mat(2) * &p;
        let e1 = (t - d(&[-2., 0.5])).abs().max();
        let tb = p.transpose() * &b * &p;
        let want = m(2, &[1. / (k * k), 1. / (2. * k * k), 1. / (2. * k * k), 1. / (4. * k * k)]);
        let e2 = (&tb - want).abs().max();
        worst = worst.max(e1).max(e2);
        if e1 > 1e-12 || e2 > 1e-12 || tb.norm() > 2.0 / (k * k) {
            fails.push(format!("k={k}: E-error {e1:e}, B-error {e2:e}, ‖B_k‖ {:e}", tb.norm()));
        }
    }
    outcome(fails, format!("max entry error {worst:e}"))
}

fn sequence_decay() -> Outcome {
    let c = Config::default();
    let mut r = rng(31);
    let mut fails = Vec::new();
    let (mut worst_slope, mut worst_drift, mut worst_ratio) = (f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for i in 0..50 {
        let (a, b) = generators::random_real_spectrum_pair(&mut r, 6, 2);
        let seq = match seq_nonsingular_pair(&a, &b, &c) {
            Ok(s) => s,
            Err(e) => {
                fails.push(format!("pair {i}: {e}"));
                continue;
            }
        };
        let v = verify_sequence(&set(vec![a, b]), &seq, &DEFAULT_K_GRID).unwrap();
        let drift = v.det_drift.iter().copied().fold(0.0, f64::max);
        let lo = v.diag.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.diag.iter().copied().fold(0.0, f64::max);
        let ratio = if hi == 0.0 { 1.0 } else { hi / lo };
        worst_drift = worst_drift.max(drift);
        worst_ratio = worst_ratio.max(ratio);
        // Already diagonal pairs have no off-diagonal mass to decay.
        if let Some(s) = v.decay_slope {
            worst_slope = worst_slope.max(s);
            if s > -0.9 {
                fails.push(format!("pair {i}: slope {s}"));
            }
        }
        if drift > 1e-8 || ratio > 2.0 {
            fails.push(format!("pair {i}: drift {drift:e}, diag ratio {ratio}"));
        }
    }
    outcome(
        fails,
        format!("worst slope {worst_slope:.3}, det drift {worst_drift:.1e}, diag ratio {worst_ratio:.3}"),
    )
}

fn key(size: usize, e: Eigenvalue) -> (usize, i64, i64) {
    match e {
        Eigenvalue::Real(l) => (size, (l * 2.0).round() as i64, 0),
        Eigenvalue::Complex { re, im } => (size, (re * 2.0).round() as i64, (im.abs() * 2.0).round() as i64),
    }
}

fn jordan_equivalence() -> Outcome {
    let c = Config::default();
    let mut r = rng(47);
    let mut fails = Vec::new();
    let mut worst = 0.0f64;
    for i in 0..200 {
        let (mat, truth) = generators::random_jordan_matrix(&mut r, 8);
        let f = match real_jordan_form(&mat, &c) {
            Ok(f) => f,
            Err(e) => {
                fails.push(format!("matrix {i}: {e}"));
                continue;
            }
        };
        let mut want: Vec<_> = truth.iter().map(|b| key(b.size, b.eigenvalue)).collect();
        let mut got: Vec<_> = f.blocks.iter().map(|b| key(b.size, b.eigenvalue)).collect();
        want.sort();
        got.sort();
        if want != got {
            fails.push(format!("matrix {i}: blocks {got:?}, want {want:?}"));
            continue;
        }
        for b in &f.blocks {
            let err = match b.eigenvalue {
                Eigenvalue::Real(l) => (l - (l * 2.0).round() / 2.0).abs(),
                Eigenvalue::Complex { re, im } => (re - (re * 2.0).round() / 2.0)
                    .abs()
                    .max((im - (im * 2.0).round() / 2.0).abs()),
            };
            worst = worst.max(err);
        }
    }
    if worst > 1e-6 {
        fails.push(format!("eigenvalue error {worst:e}"));
    }
    outcome(fails, format!("200 matrices, max eigenvalue error {worst:.1e}"))
}

fn lattice_consistency() -> Outcome {
    let c = Config::default();
    let mut r = rng(59);
    let mut fails = Vec::new();
    let mut counts = [0usize; 4];
    for i in 0..500 {
        let s = match i % 4 {
            0 => {
                let (a, b) = generators::random_lancaster_pair(&mut r, 5);
                set(vec![a, b])
            }
            1 => {
                use rand::Rng;
                let (mm, l) = (r.random_range(1..=4), r.random_range(2..=4));
                generators::random_sd_family(&mut r, mm, l, i % 8 == 1)
            }
            2 => {
                use rand::Rng;
                let (mm, l) = (r.random_range(2..=4), r.random_range(2..=3));
                generators::random_pd_pencil_set(&mut r, mm, l)
            }
            _ => {
                let (a, b) = generators::random_lancaster_pair(&mut r, 2);
                set(vec![a, b])
            }
        };
        counts[i % 4] += 1;
        let reports = classify_all(&s, &c);
        for v in lattice_violations(&s, &reports, &c) {
            fails.push(format!("set {i}: {v}"));
        }
    }
    outcome(
        fails,
        format!(
            "{} Lancaster pairs, {} SD families, {} definite-pencil sets, {} 2×2 pairs",
            counts[0], counts[1], counts[2], counts[3]
        ),
    )
}

fn dsdo_exactness() -> Outcome {
    let mut r = rng(61);
    let mut fails = Vec::new();
    let (mut worst_res, mut worst_orth) = (0.0f64, 0.0f64);
    for i in 0..200 {
        use rand::Rng;
        let (mm, l) = (r.random_range(1..=5), r.random_range(1..=4));
        let s = generators::random_symmetric_set(&mut r, mm, l);
        let scale: f64 = s.mats().iter().map(|a| a.norm_squared()).sum();
        let mut facts = vec![("stacked", dsdo_construct(&s))];
        if i % 4 == 0 {
            facts.push(("basis", dsdo_basis_construct(mm).and_then(|b| b.factorize(&s))));
        }
        for (name, f) in facts {
            match f {
                Ok(f) => {
                    let orth = (f.p.transpose() * &f.p - Mat::identity(mm, mm)).norm();
                    let rel = f.residual / scale.max(f64::MIN_POSITIVE);
                    worst_res = worst_res.max(rel);
                    worst_orth = worst_orth.max(orth);
                    let want_n = if name == "stacked" { l * mm } else { mm * mm * (mm + 1) / 2 };
                    if rel > 1e-18 || orth > 1e-12 || f.n() != want_n {
                        fails.push(format!("set {i} {name}: residual {rel:e}, orthonormality {orth:e}, n {}", f.n()));
                    }
                }
                Err(e) => fails.push(format!("set {i} {name}: {e}")),
            }
        }
    }
    outcome(fails, format!("relative residual {worst_res:.1e}, ‖PᵀP − I‖ {worst_orth:.1e}"))
}

fn qcqp_agreement() -> Outcome {
    let c = Config::default();
    let budget = OracleBudget::default();
    let mut fails = Vec::new();
    let (mut worst_v, mut worst_k) = (0.0f64, 0.0f64);
    let mut statuses = std::collections::BTreeMap::new();
    for i in 0..10u64 {
        let mm = 1 + (i as usize % 4);
        let p = random_structured_problem(mm, 100 + i);
        let s = solve_single_constraint(&p, &c).unwrap();
        *statuses.entry(format!("{:?}", s.status)).or_insert(0) += 1;
        let o = brute_force_single(&p, &budget, i).unwrap();
        match s.status {
            SingleStatus::UnboundedBelow => {
                if !o.suspected_unbounded {
                    fails.push(format!("instance {i}: solver unbounded, oracle {}", o.value));
                }
                continue;
            }
            SingleStatus::Infeasible => {
                if o.feasible_found {
                    fails.push(format!("instance {i}: solver infeasible, oracle {}", o.value));
                }
                continue;
            }
            _ => {}
        }
        let err = (s.value - o.value).abs();
        worst_v = worst_v.max(err);
        if err > 1e-3 || o.suspected_unbounded {
            fails.push(format!("instance {i}: solver {} oracle {}", s.value, o.value));
        }
        for k in [1.0, 10.0, 100.0] {
            let pk = canonical_at(&p, k, &c).unwrap();
            let ok = brute_force_single(&pk, &budget, i).unwrap();
            let e = (ok.value - o.value).abs();
            worst_k = worst_k.max(e);
            if e > 1e-4 {
                fails.push(format!("instance {i}, k={k}: {} vs {}", ok.value, o.value));
            }
        }
    }
    let fast = SingleConstraintProblem::new(d(&[-3., 1.]), d(&[1., 2.]), 0.0, &c).unwrap();
    let s = solve_single_constraint(&fast, &c).unwrap();
    if s.value != 0.0 {
        fails.push(format!("definite fast path returned {}", s.value));
    }
    outcome(fails, format!("solver/oracle gap {worst_v:.1e}, change-of-variables gap {worst_k:.1e}, statuses {statuses:?}"))
}

enum Want {
    Opt(f64, Vec<f64>),
    Unbounded,
    Infeasible,
}

fn lp_battery() -> Vec<(LpInstance, Want)> {
    use Want::*;
    let lp = LpInstance::new;
    let mut free2 = lp(vec![1.0, 1.0]).eq(vec![1.0, -1.0], 1.0).le(vec![-1.0, 0.0], 3.0);
    free2.nonneg = vec![false, false];
    let mut free1 = lp(vec![1.0]).le(vec![-1.0], 2.0);
    free1.nonneg = vec![false];
    vec![
        // max x + y, x + 2y ≤ 4, 3x + y ≤ 6: vertex (8/5, 6/5).
        (lp(vec![-1.0, -1.0]).le(vec![1.0, 2.0], 4.0).le(vec![3.0, 1.0], 6.0), Opt(-2.8, vec![1.6, 1.2])),
        (lp(vec![1.0, 1.0]).le(vec![-1.0, -1.0], -2.0), Opt(2.0, vec![])),
        (lp(vec![-1.0]), Unbounded),
        (lp(vec![1.0]).le(vec![1.0], -1.0), Infeasible),
        (lp(vec![2.0, 3.0]).eq(vec![1.0, 1.0], 5.0), Opt(10.0, vec![5.0, 0.0])),
        (lp(vec![-3.0, -2.0]).le(vec![1.0, 1.0], 4.0).le(vec![1.0, 3.0], 6.0).le(vec![1.0, 0.0], 3.0), Opt(-11.0, vec![3.0, 1.0])),
        (lp(vec![1.0, -1.0]).le(vec![-1.0, 1.0], 1.0), Opt(-1.0, vec![])),
        (lp(vec![0.0, 0.0]).le(vec![1.0, 1.0], 1.0), Opt(0.0, vec![])),
        (lp(vec![-1.0, 0.0]).le(vec![1.0, -1.0], 0.0), Unbounded),
        (lp(vec![1.0, 1.0]).eq(vec![1.0, 1.0], 1.0).eq(vec![1.0, 1.0], 2.0), Infeasible),
        (lp(vec![-1.0, -2.0, -3.0]).le(vec![1.0, 1.0, 1.0], 10.0).le(vec![0.0, 1.0, 2.0], 8.0), Opt(-18.0, vec![])),
        (lp(vec![1.0, 2.0]).le(vec![-1.0, -1.0], -3.0).le(vec![-1.0, 1.0], 1.0), Opt(3.0, vec![3.0, 0.0])),
        (free2, Opt(-7.0, vec![-3.0, -4.0])),
        (free1, Opt(-2.0, vec![-2.0])),
        (lp(vec![-1.0]).le(vec![2.0], 7.0), Opt(-3.5, vec![3.5])),
        (lp(vec![1.0, 1.0]).le(vec![1.0, 0.0], -1.0).le(vec![0.0, 1.0], 5.0), Infeasible),
        // Degenerate vertex: three constraints through (1, 1).
        (lp(vec![-1.0, -1.0]).le(vec![1.0, 0.0], 1.0).le(vec![0.0, 1.0], 1.0).le(vec![1.0, 1.0], 2.0), Opt(-2.0, vec![1.0, 1.0])),
        (lp(vec![-0.75, 150.0, -0.02, 6.0])
            .le(vec![0.25, -60.0, -0.04, 9.0], 0.0)
            .le(vec![0.5, -90.0, -0.02, 3.0], 0.0)
            .le(vec![0.0, 0.0, 1.0, 0.0], 1.0), Opt(-0.05, vec![0.04, 0.0, 1.0, 0.0])),
        (lp(vec![4.0, 1.0]).eq(vec![3.0, 1.0], 3.0).le(vec![-4.0, -3.0], -6.0).le(vec![1.0, 2.0], 4.0), Opt(3.4, vec![0.4, 1.8])),
        (lp(vec![1.0, 0.0, 0.0]).eq(vec![1.0, 1.0, 1.0], 1.0).eq(vec![0.0, 1.0, -1.0], 0.0), Opt(0.0, vec![0.0, 0.5, 0.5])),
    ]
}

fn lp_backend() -> Outcome {
    let mut fails = Vec::new();
    let battery = lp_battery();
    for (i, (lp, want)) in battery.iter().enumerate() {
        let got = solve_lp(lp);
        let ok = match (&got, want) {
            (LpOutcome::Optimal { value, point }, Want::Opt(v, x)) => {
                (value - v).abs() <= 1e-9
                    && (x.is_empty() || point.iter().zip(x).all(|(a, b)| (a - b).abs() <= 1e-9))
            }
            (LpOutcome::Unbounded, Want::Unbounded) | (LpOutcome::Infeasible, Want::Infeasible) => true,
            _ => false,
        };
        if !ok {
            fails.push(format!("LP {i}: {got:?}"));
        }
    }
    outcome(fails, format!("{} LPs", battery.len()))
}

#[test]
fn acceptance() {
    use std::io::Write;
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("example corpus verdicts", example_corpus),
        ("explicit witness replication", witness_replication),
        ("sequence decay law", sequence_decay),
        ("Jordan oracle equivalence", jordan_equivalence),
        ("lattice consistency", lattice_consistency),
        ("D-SDO exactness", dsdo_exactness),
        ("QCQP agreement", qcqp_agreement),
        ("LP backend", lp_backend),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        // Written past the harness capture so the lines show in every run.
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "{} criterion {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
