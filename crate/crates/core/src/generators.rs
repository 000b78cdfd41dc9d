//! Seeded random instances with known structure, for tests, the corpus and
//! the `synth` command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::canon::{synthesize_lancaster_pair, LancasterBlock};
use crate::jordan::JordanBlockSpec;
use crate::linalg::{self, Mat};
use crate::matcore::SymMatrixSet;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_mat(rng: &mut impl Rng, m: usize) -> Mat {
    Mat::from_fn(m, m, |_, _| StandardNormal.sample(rng))
}

/// A random orthogonal matrix (QR of a Gaussian matrix).
pub fn random_orthogonal(rng: &mut impl Rng, m: usize) -> Mat {
    let qr = gaussian_mat(rng, m).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = q;
    for j in 0..m {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `U·diag(s)·V` with singular values in `[1, cond]`.
pub fn conditioned_transform(rng: &mut impl Rng, m: usize, cond: f64) -> Mat {
    let u = random_orthogonal(rng, m);
    let v = random_orthogonal(rng, m);
    let s = Mat::from_diagonal(&nalgebra::DVector::from_fn(m, |i, _| {
        if m == 1 {
            1.0
        } else {
            1.0 + (cond - 1.0) * i as f64 / (m - 1) as f64
        }
    }));
    u * s * v
}

/// A matrix `T·J·T⁻¹` with known real Jordan data, dimension at most
/// `max_dim`. Eigenvalues are drawn from a grid with spacing ½ so that
/// distinct values stay separated; a value may carry several blocks.
pub fn random_jordan_matrix(rng: &mut impl Rng, max_dim: usize) -> (Mat, Vec<JordanBlockSpec>) {
    let target = rng.random_range(1..=max_dim);
    let mut blocks = Vec::new();
    let mut used = 0;
    let mut values: Vec<f64> = Vec::new();
    while used < target {
        let left = target - used;
        let reuse = !values.is_empty() && rng.random_bool(0.25);
        if left >= 2 && rng.random_bool(0.25) {
            let size = rng.random_range(1..=(left / 2).min(2));
            let re = f64::from(rng.random_range(-4i32..=4)) * 0.5;
            let im = f64::from(rng.random_range(1i32..=4)) * 0.5;
            blocks.push(JordanBlockSpec::complex(re, im, size));
            used += 2 * size;
            continue;
        }
        let l = if reuse {
            values[rng.random_range(0..values.len())]
        } else {
            f64::from(rng.random_range(-6i32..=6)) * 0.5
        };
        values.push(l);
        let size = rng.random_range(1..=left.min(3));
        blocks.push(JordanBlockSpec::real(l, size));
        used += size;
    }
    let j = linalg::block_diag(&blocks.iter().map(|b| b.matrix()).collect::<Vec<_>>());
    let t = conditioned_transform(rng, target, 4.0);
    let ti = t.clone().try_inverse().expect("conditioned transform is invertible");
    (t * j * ti, blocks)
}

/// A nonsingular pair `(A, B)` with `A⁻¹B` having only real eigenvalues:
/// Uhlig blocks `σE(m)`, `σE(m)J(λ, m)` with sizes up to `max_block`,
/// scrambled by a conditioned congruence.
pub fn random_real_spectrum_pair(rng: &mut impl Rng, max_dim: usize, max_block: usize) -> (Mat, Mat) {
    let target = rng.random_range(1..=max_dim);
    let mut blocks = Vec::new();
    let mut used = 0;
    while used < target {
        let size = rng.random_range(1..=(target - used).min(max_block));
        blocks.push(LancasterBlock::Finite {
            sign: if rng.random_bool(0.5) { 1 } else { -1 },
            size,
            lambda: f64::from(rng.random_range(-4i32..=4)) * 0.5,
        });
        used += size;
    }
    let q = conditioned_transform(rng, target, 3.0);
    synthesize_lancaster_pair(&blocks, Some(&q)).expect("valid finite blocks")
}

/// A random Lancaster-form pair of dimension at most `max_dim`, mixing all
/// five block types.
pub fn random_lancaster_pair(rng: &mut impl Rng, max_dim: usize) -> (Mat, Mat) {
    loop {
        let mut blocks = Vec::new();
        let mut used = 0;
        let mut zero = false;
        let target = rng.random_range(1..=max_dim);
        while used < target {
            let left = target - used;
            let b = match rng.random_range(0..5) {
                0 | 1 => LancasterBlock::Finite {
                    sign: if rng.random_bool(0.5) { 1 } else { -1 },
                    size: rng.random_range(1..=left.min(3)),
                    lambda: f64::from(rng.random_range(-4i32..=4)) * 0.5,
                },
                2 => LancasterBlock::Infinite {
                    sign: if rng.random_bool(0.5) { 1 } else { -1 },
                    size: rng.random_range(1..=left.min(2)),
                },
                3 if left >= 2 => LancasterBlock::ComplexPair {
                    size: 1,
                    mu: f64::from(rng.random_range(-2i32..=2)),
                    nu: f64::from(rng.random_range(1i32..=2)),
                },
                4 if left >= 3 && rng.random_bool(0.5) => LancasterBlock::Singular { size: 1 },
                _ if !zero => {
                    zero = true;
                    LancasterBlock::Zero { size: 1 }
                }
                _ => continue,
            };
            used += b.dim();
            blocks.push(b);
        }
        let q = conditioned_transform(rng, used, 3.0);
        if let Ok(p) = synthesize_lancaster_pair(&blocks, Some(&q)) {
            return p;
        }
    }
}

/// `L` matrices `QᵀDᵢQ` sharing the congruence `Q`; orthogonal `Q` gives a
/// commuting family.
pub fn random_sd_family(rng: &mut impl Rng, m: usize, l: usize, orthogonal: bool) -> SymMatrixSet {
    let q = if orthogonal {
        random_orthogonal(rng, m)
    } else {
        conditioned_transform(rng, m, 3.0)
    };
    let mats = (0..l)
        .map(|_| {
            let d = Mat::from_diagonal(&nalgebra::DVector::from_fn(m, |_, _| {
                f64::from(rng.random_range(-4i32..=4)) * 0.5
            }));
            linalg::symmetrize(&(q.transpose() * d * &q))
        })
        .collect();
    SymMatrixSet::new(mats).expect("symmetric by construction")
}

/// A set whose first member is positive definite, the rest random.
pub fn random_pd_pencil_set(rng: &mut impl Rng, m: usize, l: usize) -> SymMatrixSet {
    let g = gaussian_mat(rng, m);
    let mut mats = vec![linalg::symmetrize(&(g.transpose() * &g + Mat::identity(m, m)))];
    for _ in 1..l {
        let r = gaussian_mat(rng, m);
        mats.push(linalg::symmetrize(&(&r + r.transpose())));
    }
    SymMatrixSet::new(mats).expect("symmetric by construction")
}

/// A general symmetric set with Gaussian entries.
pub fn random_symmetric_set(rng: &mut impl Rng, m: usize, l: usize) -> SymMatrixSet {
    let mats = (0..l)
        .map(|_| {
            let r = gaussian_mat(rng, m);
            linalg::symmetrize(&(&r + r.transpose()))
        })
        .collect();
    SymMatrixSet::new(mats).expect("symmetric by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_and_conditioned() {
        let mut r = rng(3);
        let q = random_orthogonal(&mut r, 4);
        assert!((q.transpose() * &q - Mat::identity(4, 4)).norm() < 1e-12);
        let t = conditioned_transform(&mut r, 4, 4.0);
        let s = t.singular_values();
        assert!((s.max() / s.min() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn jordan_dimensions_add_up() {
        let mut r = rng(5);
        for _ in 0..20 {
            let (m, b) = random_jordan_matrix(&mut r, 8);
            assert_eq!(m.nrows(), b.iter().map(|x| x.dim()).sum::<usize>());
        }
    }
}
