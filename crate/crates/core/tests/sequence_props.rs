use proptest::prelude::*;
use simdiag::canon::LancasterBlock;
use simdiag::generators::{conditioned_transform, random_real_spectrum_pair, rng};
use simdiag::matcore::{find_definite_pencil, DefiniteSearch};
use simdiag::sequences::{
    seq_nonsingular_pair, CongruenceSequence, seq_psd_pencil, seq_singular_pair, verify_sequence, DEFAULT_K_GRID,
};
use simdiag::{Config, Mat, SymMatrixSet};

fn det_constant(seq: &simdiag::sequences::CongruenceSequence) -> f64 {
    [1.0, 10.0, 100.0, 1000.0]
        .iter()
        .map(|&k| (seq.evaluate(k).unwrap().determinant() - seq.det_value).abs() / seq.det_value.abs())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nonsingular_pair_sequences(seed in any::<u64>()) {
        let cfg = Config::default();
        let (a, b) = random_real_spectrum_pair(&mut rng(seed), 6, 2);
        let seq = seq_nonsingular_pair(&a, &b, &cfg).unwrap();
        prop_assert!(det_constant(&seq) <= 1e-8);
        let v = verify_sequence(&SymMatrixSet::new(vec![a, b]).unwrap(), &seq, &DEFAULT_K_GRID).unwrap();
        prop_assert!(v.decay_slope.is_none_or(|s| s <= -0.9), "{:?}", v);
        prop_assert!(v.bounded_diag && v.monotone_decay, "{:?}", v);
        // offdiag(k) ≤ c/k with c fitted at the first grid point.
        let c = v.offdiag[0] * v.ks[0];
        for (k, o) in v.ks.iter().zip(&v.offdiag) {
            prop_assert!(*o <= 1.01 * c / k + 1e-9, "k={} {} > {}", k, o, c / k);
        }
    }

    #[test]
    fn singular_pair_sequences(size in 1usize..=2, lambda in -2i32..=2, sign in prop::bool::ANY, seed in any::<u64>()) {
        let blocks = [
            LancasterBlock::Finite { sign: if sign { 1 } else { -1 }, size, lambda: f64::from(lambda) },
            LancasterBlock::Singular { size: 1 },
        ];
        let m = size + 3;
        let q = conditioned_transform(&mut rng(seed), m, 2.0);
        let (x, y) = simdiag::canon::synthesize_lancaster_pair(&blocks, None).unwrap();
        // Pair with PᵀAP = X for P = q⁻¹.
        let qi = q.clone().try_inverse().unwrap();
        let (a, b) = (qi.transpose() * x * &qi, qi.transpose() * y * &qi);
        let seq = seq_singular_pair(&blocks, Some(&q)).unwrap();
        prop_assert!(det_constant(&seq) <= 1e-8);
        let v = verify_sequence(&SymMatrixSet::symmetrized(vec![a, b]).unwrap(), &seq, &DEFAULT_K_GRID).unwrap();
        prop_assert!(v.monotone_decay && v.det_constant, "{:?}", v);
    }
}

#[test]
fn bounded_diagonal_separates_witness_kinds() {
    // A pair with complex A⁻¹B spectrum: diag(k², 1/k, 1/k) only weakly
    // diagonalizes it, with a diagonal entry growing like k⁴.
    let a = Mat::from_row_slice(3, 3, &[1., 0., 0., 0., 0., 1., 0., 1., 0.]);
    let b = Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![1., 1., -1.]));
    let set = SymMatrixSet::new(vec![a, b]).unwrap();
    let id = Mat::identity(3, 3);
    let weak = CongruenceSequence::diagonal_power(id.clone(), vec![2.0, -1.0, -1.0], id).unwrap();
    let v = verify_sequence(&set, &weak, &DEFAULT_K_GRID).unwrap();
    assert!(v.monotone_decay && v.det_constant, "{v:?}");
    assert!(!v.bounded_diag, "{v:?}");

    // A semidefinite pencil on a pair that also has a bounded witness.
    let cfg = Config::default();
    let a = Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![1., 1., 0.]));
    let b = Mat::from_row_slice(3, 3, &[0., 1., 0., 1., 2., 1., 0., 1., -1.]);
    let set = SymMatrixSet::new(vec![a.clone(), b.clone()]).unwrap();
    let DefiniteSearch::Found(w) = find_definite_pencil(&set, &cfg) else {
        panic!("diag(1, 1, 0) is a semidefinite member");
    };
    let seq = seq_psd_pencil(&a, &b, &w).unwrap();
    let v = verify_sequence(&set, &seq, &DEFAULT_K_GRID).unwrap();
    assert!(v.all_pass(), "{v:?}");
}
