use nalgebra::DVector;
use proptest::prelude::*;
use rand::Rng;
use simdiag::matcore::{e_mat, jordan_real, r_mat};
use simdiag::qcqp::oracle::{brute_force_qcqp, brute_force_single, OracleBudget};
use simdiag::qcqp::{
    homogenize, random_structured_problem, solve_single_constraint, QcqpInstance, Quadratic,
    SingleStatus,
};
use simdiag::generators::rng;
use simdiag::{Config, Mat};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solver_matches_oracle(seed in any::<u64>(), m in 1usize..=3) {
        let cfg = Config::default();
        let p = random_structured_problem(m, seed);
        let s = solve_single_constraint(&p, &cfg).unwrap();
        let o = brute_force_single(&p, &OracleBudget::default(), seed).unwrap();
        match s.status {
            SingleStatus::UnboundedBelow => prop_assert!(o.suspected_unbounded, "{:?}", o),
            SingleStatus::Infeasible => prop_assert!(!o.feasible_found),
            _ => {
                prop_assert!((s.value - o.value).abs() <= 1e-3, "{} vs {:?}", s.value, o);
                if let Some(x) = &s.point {
                    prop_assert!(p.is_feasible(x, 1e-9));
                    prop_assert!((p.objective_at(x) - s.value).abs() <= 1e-8 * (1.0 + s.value.abs()));
                }
            }
        }
    }
}

#[test]
fn structural_verdicts_match_oracle() {
    let cfg = Config::default();
    let mut r = rng(13);
    let mut seen = 0;
    for i in 0..30 {
        // Pairs violating the block conditions: non-real spectra, 2-blocks
        // with a positive eigenvalue or a negative sign, 3-blocks.
        let (a, b) = match i % 4 {
            0 => (e_mat(2), Mat::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]))),
            1 => (e_mat(2), e_mat(2) * jordan_real(r.random_range(0.2..2.0), 2)),
            2 => (-e_mat(2), -e_mat(2) * jordan_real(-r.random_range(0.0..2.0), 2)),
            _ => (e_mat(3), e_mat(3) * jordan_real(-r.random_range(0.0..2.0), 3)),
        };
        let t = simdiag::generators::conditioned_transform(&mut r, a.nrows(), 2.0);
        let p = simdiag::qcqp::SingleConstraintProblem::new(
            t.transpose() * b * &t,
            t.transpose() * a * &t,
            r.random_range(0.5..2.0),
            &cfg,
        )
        .unwrap();
        let s = solve_single_constraint(&p, &cfg).unwrap();
        assert_eq!(s.status, SingleStatus::UnboundedBelow, "case {i}");
        assert!(s.diagnostics.structural);
        let o = brute_force_single(&p, &OracleBudget::default(), i).unwrap();
        assert!(o.suspected_unbounded, "case {i}: {o:?}");
        seen += 1;
    }
    assert_eq!(seen, 30);
}

#[test]
fn two_block_objective_decreases_in_k() {
    // yᵀR_kᵀ(E(2)J(λ,2))R_k y = 2λy₁y₂ + y₂²/k.
    let mut r = rng(17);
    let lambda = -0.7;
    let y_mat = e_mat(2) * jordan_real(lambda, 2);
    let mut count = 0;
    while count < 100 {
        let y = DVector::from_vec(vec![r.random_range(-3.0..3.0), r.random_range(-3.0..3.0)]);
        // Feasible for 2y₁y₂ ≤ 1.
        if 2.0 * y[0] * y[1] > 1.0 {
            continue;
        }
        count += 1;
        let mut prev = f64::INFINITY;
        for k in [1.0, 2.0, 10.0, 100.0, 1e4] {
            let rk = r_mat(2, k);
            let v = y.dot(&(rk.transpose() * &y_mat * &rk * &y));
            assert!(v <= prev + 1e-12, "k={k}");
            prev = v;
        }
    }
}

#[test]
fn homogenization_preserves_value() {
    // min x₁² − x₂² + 2x₁ s.t. x₁² + x₂² ≤ 1: on the circle the objective is
    // 2x₁² + 2x₁ − 1, minimized at x₁ = −½ with value −1.5.
    let q = QcqpInstance::new(
        Quadratic { a: Mat::from_diagonal(&DVector::from_vec(vec![1.0, -1.0])), lin: vec![1.0, 0.0], c: 0.0 },
        vec![Quadratic { a: Mat::identity(2, 2), lin: vec![0.0; 2], c: -1.0 }],
    )
    .unwrap();
    let budget = OracleBudget::default();
    let direct = brute_force_qcqp(&q, &budget, 1).unwrap();
    let lifted = brute_force_qcqp(&homogenize(&q), &budget, 2).unwrap();
    assert!((direct.value + 1.5).abs() <= 1e-4, "{direct:?}");
    assert!((lifted.value + 1.5).abs() <= 1e-3, "{lifted:?}");
    let x = lifted.point.unwrap();
    // The marker coordinate may come out as −1; (−x, −1) is the same point.
    assert!((x[2].abs() - 1.0).abs() <= 1e-4);
}

#[test]
fn twsd_triple_relaxation_drops_little() {
    use simdiag::classify::check_twsd;
    use simdiag::qcqp::lp_relaxation;
    use simdiag::SymMatrixSet;
    let cfg = Config::default();
    let mats = vec![
        Mat::identity(3, 3),
        Mat::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, -1.0])),
        Mat::from_row_slice(3, 3, &[1., 0., 0., 0., 0., 1., 0., 1., 0.]),
    ];
    let rep = check_twsd(&SymMatrixSet::new(mats.clone()).unwrap(), &cfg);
    assert!(rep.verdict.is_yes());
    let seq = rep.sequence().expect("block split certificate");
    let q = QcqpInstance::new(
        Quadratic::homogeneous(mats[0].clone()),
        mats[1..].iter().map(|a| Quadratic { a: a.clone(), lin: vec![0.0; 3], c: -1.0 }).collect(),
    )
    .unwrap();
    let r = lp_relaxation(&q, seq, 1e3).unwrap();
    let total: f64 = mats.iter().map(|a| a.norm()).sum();
    assert!(r.dropped_mass <= 1e-6 * total, "{}", r.dropped_mass);
}
