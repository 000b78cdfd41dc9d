use proptest::prelude::*;
use simdiag::canon::{synthesize_lancaster_pair, uhlig_canonical, LancasterBlock};
use simdiag::linalg::inertia;
use simdiag::matcore::Eigenvalue;
use simdiag::{Config, Mat};

fn block_strategy() -> impl Strategy<Value = LancasterBlock> {
    prop_oneof![
        (prop::bool::ANY, 1usize..=3, -3i32..=3).prop_map(|(s, size, l)| LancasterBlock::Finite {
            sign: if s { 1 } else { -1 },
            size,
            lambda: f64::from(l) * 0.5,
        }),
        (1usize..=2, -2i32..=2, 1i32..=2).prop_map(|(size, mu, nu)| LancasterBlock::ComplexPair {
            size,
            mu: f64::from(mu),
            nu: f64::from(nu),
        }),
    ]
}

fn scramble(m: usize) -> impl Strategy<Value = Mat> {
    prop::collection::vec(-0.5f64..0.5, m * m)
        .prop_map(move |v| Mat::identity(m, m) + Mat::from_vec(m, m, v) * 0.6)
}

type Key = (i8, usize, i64, i64);

fn key_of(sign: i8, size: usize, e: Eigenvalue) -> Key {
    let r = |x: f64| (x * 1e3).round() as i64;
    match e {
        Eigenvalue::Real(l) => (sign, size, r(l), 0),
        Eigenvalue::Complex { re, im } => (1, size, r(re), r(im.abs())),
    }
}

fn expected(blocks: &[LancasterBlock]) -> Vec<Key> {
    let mut v: Vec<Key> = blocks
        .iter()
        .map(|b| match *b {
            LancasterBlock::Finite { sign, size, lambda } => {
                key_of(sign, size, Eigenvalue::Real(lambda))
            }
            // The block pencil has eigenvalues μ ± iν.
            LancasterBlock::ComplexPair { size, mu, nu } => {
                key_of(1, 2 * size, Eigenvalue::Complex { re: mu, im: nu })
            }
            _ => unreachable!(),
        })
        .collect();
    v.sort();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recovers_block_multiset(
        (blocks, q) in prop::collection::vec(block_strategy(), 1..=3)
            .prop_filter("size ≤ 6", |b| b.iter().map(|x| x.dim()).sum::<usize>() <= 6)
            .prop_flat_map(|b| {
                let m = b.iter().map(|x| x.dim()).sum::<usize>();
                (Just(b), scramble(m))
            })
    ) {
        prop_assume!(q.determinant().abs() > 0.2);
        let (a, b) = synthesize_lancaster_pair(&blocks, Some(&q)).unwrap();
        let cfg = Config::default();
        match uhlig_canonical(&a, &b, &cfg) {
            Ok(u) => {
                let mut got: Vec<Key> = u.blocks.iter().map(|b| key_of(b.sign, b.size, b.eigenvalue)).collect();
                got.sort();
                prop_assert_eq!(got, expected(&blocks));
                prop_assert!(u.residual_a <= 1e-8 && u.residual_b <= 1e-8);
                prop_assert!(u.transform.determinant().abs() > 0.0);
                let p = &u.transform;
                let (pa, pn, _) = inertia(&(p.transpose() * &a * p), 1e-9);
                let (qa, qn, _) = inertia(&a, 1e-9);
                prop_assert_eq!((pa, pn), (qa, qn));
            }
            // Repeated defective eigenvalues may legitimately be judged
            // unreliable; anything else is a bug.
            Err(e) => prop_assert!(
                matches!(e, simdiag::Error::JordanUnreliable { .. } | simdiag::Error::CanonicalUnreliable(_)),
                "{e}"
            ),
        }
    }
}
