//! Congruence canonical forms of symmetric pairs: the Uhlig form of a
//! nonsingular pair (computed), and the five-type block taxonomy of a general
//! pair (synthesized from descriptors only).

use nalgebra::{ComplexField, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::jordan::{self, Root, RootSpace};
use crate::linalg::{self, Complex64, Mat};
use crate::matcore::{
    e_mat, f_mat, find_nonsingular_pencil, h_mat, jordan_complex, jordan_real, Eigenvalue,
    PencilSearch, SymMatrixSet,
};

/// One block `σE(m)`, `σE(m)J(λ, m)` of the Uhlig form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UhligBlockSpec {
    /// `±1`; always `+1` for a complex pair.
    pub sign: i8,
    /// Matrix size of the block (twice the cell count for a complex pair).
    pub size: usize,
    pub eigenvalue: Eigenvalue,
}

impl UhligBlockSpec {
    /// `(σE(m), σE(m)J(λ, m))`.
    pub fn matrices(&self) -> (Mat, Mat) {
        let x = e_mat(self.size) * f64::from(self.sign);
        let j = match self.eigenvalue {
            Eigenvalue::Real(l) => jordan_real(l, self.size),
            Eigenvalue::Complex { re, im } => jordan_complex(re, im, self.size / 2),
        };
        let y = &x * j;
        (x, y)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UhligCanonicalPair {
    #[serde(with = "crate::io::rows")]
    pub transform: Mat,
    pub blocks: Vec<UhligBlockSpec>,
    /// `‖PᵀAP − X‖_F`, relative to `‖P‖²_F·max(‖A‖_F, ‖B‖_F)`.
    pub residual_a: f64,
    pub residual_b: f64,
}

impl UhligCanonicalPair {
    /// The block diagonal target pair `(X, Y)`.
    pub fn canonical_matrices(&self) -> (Mat, Mat) {
        let (xs, ys): (Vec<Mat>, Vec<Mat>) = self.blocks.iter().map(|b| b.matrices()).unzip();
        (linalg::block_diag(&xs), linalg::block_diag(&ys))
    }
}

/// Coefficients `q` of the polynomial `q(N)` that brings the pairing sequence
/// `gⱼ = [v, Nʲv]` of a length-`s` chain to `σ·e_{s−1}`.
fn hankel_coeffs<T: ComplexField<RealField = f64> + Copy>(g: &[T], sigma: T) -> Vec<T> {
    let s = g.len();
    let lead = g[s - 1];
    let mut q = vec![T::zero(); s];
    q[0] = sigma / lead;
    for t in 1..s {
        let mut acc = T::zero();
        for j in 0..t {
            acc += q[j] * g[j + s - 1 - t];
        }
        q[t] = -acc / lead;
    }
    q
}

/// Truncated power-series square root of `q` with `q₀ ≠ 0`.
fn series_sqrt<T: ComplexField<RealField = f64> + Copy>(q: &[T]) -> Vec<T> {
    let mut p = vec![T::zero(); q.len()];
    p[0] = q[0].sqrt();
    let two = T::from_real(2.0);
    for n in 1..q.len() {
        let mut acc = q[n];
        for j in 1..n {
            acc -= p[j] * p[n - j];
        }
        p[n] = acc / (two * p[0]);
    }
    p
}

struct NormalChain<T> {
    sign: i8,
    cols: Vec<DVector<T>>,
}

/// Rebuilds the chains of one root space so that their `A`-Gram matrices are
/// `σE(s)` and chains are mutually `A`-orthogonal.
fn normalize_root<T>(
    rs: &RootSpace<T>,
    a: &DMatrix<T>,
    imag: Option<T>,
    scale: f64,
    cfg: &Config,
) -> Result<Vec<NormalChain<T>>>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let n = &rs.shift;
    let nn = n.norm().max(f64::MIN_POSITIVE);
    let pair = |x: &DVector<T>, y: &DVector<T>| x.dot(&(a * y));
    let mut tops: Vec<(usize, DVector<T>)> = rs
        .sizes
        .iter()
        .copied()
        .zip(rs.tops.iter().cloned())
        .collect();
    let mut out = Vec::new();
    while !tops.is_empty() {
        let s = tops.iter().map(|t| t.0).max().unwrap_or(0);
        let group: Vec<usize> = (0..tops.len()).filter(|&i| tops[i].0 == s).collect();
        let lead = |v: &DVector<T>| {
            let w = jordan::chain_from(n, v, s);
            pair(&w[s - 1], &w[0])
        };
        let rel = |v: &DVector<T>, g: T| {
            g.modulus() / (scale * nn.powi(s as i32 - 1) * v.norm_squared().max(f64::MIN_POSITIVE))
        };
        // (score, index to drop, vector)
        let mut best: Option<(f64, usize, DVector<T>)> = None;
        let mut consider = |drop: usize, v: DVector<T>| {
            let r = rel(&v, lead(&v));
            if best.as_ref().is_none_or(|b| r > b.0) {
                best = Some((r, drop, v));
            }
        };
        for &i in &group {
            consider(i, tops[i].1.clone());
        }
        for (x, &i) in group.iter().enumerate() {
            for &j in &group[x + 1..] {
                consider(i, &tops[i].1 + &tops[j].1);
                consider(i, &tops[i].1 - &tops[j].1);
                if let Some(iu) = imag {
                    consider(i, &tops[i].1 + &tops[j].1 * iu);
                }
            }
        }
        let (score, drop, v) = best.expect("nonempty group");
        if score <= cfg.canon {
            return Err(Error::CanonicalUnreliable(format!(
                "no chain of size {s} pairs nondegenerately under A (relative pairing {score:e})"
            )));
        }
        tops.remove(drop);
        let w = jordan::chain_from(n, &v, s);
        let g: Vec<T> = (0..s).map(|j| pair(&v, &w[s - 1 - j])).collect();
        let sign: i8 = if imag.is_some() || g[s - 1].real() > 0.0 {
            1
        } else {
            -1
        };
        let q = hankel_coeffs(&g, T::from_real(f64::from(sign)));
        let p = series_sqrt(&q);
        let mut top = DVector::<T>::zeros(v.len());
        for (j, pj) in p.iter().enumerate() {
            top += &w[s - 1 - j] * *pj;
        }
        let cols = jordan::chain_from(n, &top, s);
        let c = DMatrix::from_columns(&cols);
        let gram = c.transpose() * a * &c;
        let lu = gram.lu();
        for (_, x) in tops.iter_mut() {
            let coef = lu
                .solve(&(c.transpose() * (a * &*x)))
                .ok_or_else(|| Error::CanonicalUnreliable("degenerate chain Gram matrix".into()))?;
            *x -= &c * coef;
        }
        out.push((s, NormalChain { sign, cols }));
    }
    out.sort_by(|x, y| y.0.cmp(&x.0).then(y.1.sign.cmp(&x.1.sign)));
    Ok(out.into_iter().map(|x| x.1).collect())
}

/// Uhlig canonical form of a pair with `A` nonsingular: `PᵀAP = Diag(σₛE(mₛ))`
/// and `PᵀBP = Diag(σₛE(mₛ)J(λₛ, mₛ))`, with `J` the real Jordan form of
/// `A⁻¹B`. Complex pairs are reported with positive imaginary part.
pub fn uhlig_canonical(a: &Mat, b: &Mat, cfg: &Config) -> Result<UhligCanonicalPair> {
    let set = SymMatrixSet::new(vec![a.clone(), b.clone()])?;
    let (a, b) = (set.get(0), set.get(1));
    let m = a.nrows();
    if linalg::rcond(a) <= cfg.det {
        return Err(Error::Singular("A in the Uhlig canonical form".into()));
    }
    let mm = a
        .clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Singular("A in the Uhlig canonical form".into()))?;
    // Validates the block structure before any normalization.
    jordan::real_jordan_form(&mm, cfg)?;
    let roots = jordan::root_spaces(&mm, cfg)?;
    let scale = a.norm();
    let ac = a.map(|x| Complex64::new(x, 0.0));
    let zeta = Complex64::new(1.0, -1.0);
    let mut blocks = Vec::new();
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for r in &roots {
        match r {
            Root::Real(rs) => {
                for ch in normalize_root(rs, a, None, scale, cfg)? {
                    blocks.push(UhligBlockSpec {
                        sign: ch.sign,
                        size: ch.cols.len(),
                        eigenvalue: Eigenvalue::Real(rs.lambda),
                    });
                    cols.extend(ch.cols);
                }
            }
            Root::Complex(rs) => {
                for ch in normalize_root(rs, &ac, Some(Complex64::new(0.0, 1.0)), scale, cfg)? {
                    blocks.push(UhligBlockSpec {
                        sign: 1,
                        size: 2 * ch.cols.len(),
                        eigenvalue: Eigenvalue::Complex {
                            re: rs.lambda.re,
                            im: rs.lambda.im,
                        },
                    });
                    // Gram of the chain is E(s); scaling by 1 − i turns the
                    // real and imaginary parts into a pair with Gram E(2s).
                    for w in ch.cols {
                        let w = w * zeta;
                        cols.push(w.map(|z| z.re));
                        cols.push(w.map(|z| -z.im));
                    }
                }
            }
        }
    }
    if cols.len() != m {
        return Err(Error::CanonicalUnreliable(format!(
            "chains span {} of {m} dimensions",
            cols.len()
        )));
    }
    let p = Mat::from_columns(&cols);
    let mut out = UhligCanonicalPair {
        transform: p,
        blocks,
        residual_a: 0.0,
        residual_b: 0.0,
    };
    let (x, y) = out.canonical_matrices();
    let p = &out.transform;
    let denom = p.norm_squared() * a.norm().max(b.norm());
    out.residual_a = (p.transpose() * a * p - x).norm() / denom;
    out.residual_b = (p.transpose() * b * p - y).norm() / denom;
    if out.residual_a.max(out.residual_b) > cfg.canon {
        return Err(Error::CanonicalUnreliable(format!(
            "canonical residuals {:e}, {:e}",
            out.residual_a, out.residual_b
        )));
    }
    Ok(out)
}

/// One block of the five-type canonical form of a general symmetric pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LancasterBlock {
    /// `σE(m)`, `σ(λE(m) + F(m))`.
    Finite { sign: i8, size: usize, lambda: f64 },
    /// `ηF(m)`, `ηE(m)`.
    Infinite { sign: i8, size: usize },
    /// `E(2m)`, `μE(2m) + νH(2m) + Diag(E(2m−2), 0₂)`.
    ComplexPair { size: usize, mu: f64, nu: f64 },
    /// Anti-diagonal `E(m)` corners of size `2m+1`, and `F(2m+1)`.
    Singular { size: usize },
    /// Zero block.
    Zero { size: usize },
}

impl LancasterBlock {
    pub fn type_index(&self) -> u8 {
        match self {
            LancasterBlock::Finite { .. } => 1,
            LancasterBlock::Infinite { .. } => 2,
            LancasterBlock::ComplexPair { .. } => 3,
            LancasterBlock::Singular { .. } => 4,
            LancasterBlock::Zero { .. } => 5,
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            LancasterBlock::Finite { size, .. }
            | LancasterBlock::Infinite { size, .. }
            | LancasterBlock::Zero { size } => size,
            LancasterBlock::ComplexPair { size, .. } => 2 * size,
            LancasterBlock::Singular { size } => 2 * size + 1,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Domain(format!("invalid block {self:?}: {msg}")));
        match *self {
            LancasterBlock::Finite { sign, size, lambda } => {
                if sign.abs() != 1 {
                    return bad("sign must be ±1");
                }
                if size == 0 || !lambda.is_finite() {
                    return bad("size must be ≥ 1 and λ finite");
                }
            }
            LancasterBlock::Infinite { sign, size } => {
                if sign.abs() != 1 || size == 0 {
                    return bad("sign must be ±1 and size ≥ 1");
                }
            }
            LancasterBlock::ComplexPair { size, mu, nu } => {
                if size == 0 || nu == 0.0 || !mu.is_finite() || !nu.is_finite() {
                    return bad("size must be ≥ 1 and ν finite and nonzero");
                }
            }
            LancasterBlock::Singular { size } | LancasterBlock::Zero { size } => {
                if size == 0 {
                    return bad("size must be ≥ 1");
                }
            }
        }
        Ok(())
    }

    /// The block pair `(X, Y)`.
    pub fn matrices(&self) -> (Mat, Mat) {
        match *self {
            LancasterBlock::Finite { sign, size, lambda } => {
                let s = f64::from(sign);
                (e_mat(size) * s, (e_mat(size) * lambda + f_mat(size)) * s)
            }
            LancasterBlock::Infinite { sign, size } => {
                let s = f64::from(sign);
                (f_mat(size) * s, e_mat(size) * s)
            }
            LancasterBlock::ComplexPair { size, mu, nu } => {
                let n = 2 * size;
                let mut y = e_mat(n) * mu + h_mat(n) * nu;
                if size > 1 {
                    let mut inner = y.view_mut((0, 0), (n - 2, n - 2));
                    inner += e_mat(n - 2);
                }
                (e_mat(n), y)
            }
            LancasterBlock::Singular { size } => {
                let n = 2 * size + 1;
                let mut x = Mat::zeros(n, n);
                x.view_mut((0, size + 1), (size, size))
                    .copy_from(&e_mat(size));
                x.view_mut((size + 1, 0), (size, size))
                    .copy_from(&e_mat(size));
                (x, f_mat(n))
            }
            LancasterBlock::Zero { size } => (Mat::zeros(size, size), Mat::zeros(size, size)),
        }
    }
}

/// Block diagonal pair built from descriptors, optionally scrambled to
/// `(QᵀXQ, QᵀYQ)`.
pub fn synthesize_lancaster_pair(
    blocks: &[LancasterBlock],
    scramble: Option<&Mat>,
) -> Result<(Mat, Mat)> {
    if blocks.is_empty() {
        return Err(Error::Domain("at least one block is needed".into()));
    }
    if blocks
        .iter()
        .filter(|b| matches!(b, LancasterBlock::Zero { .. }))
        .count()
        > 1
    {
        return Err(Error::Domain("at most one zero block is allowed".into()));
    }
    for b in blocks {
        b.validate()?;
    }
    let (xs, ys): (Vec<Mat>, Vec<Mat>) = blocks.iter().map(|b| b.matrices()).unzip();
    let (x, y) = (linalg::block_diag(&xs), linalg::block_diag(&ys));
    match scramble {
        None => Ok((x, y)),
        Some(q) => {
            if q.shape() != x.shape() {
                return Err(Error::Shape(format!(
                    "scramble is {}×{}, pair is {}×{}",
                    q.nrows(),
                    q.ncols(),
                    x.nrows(),
                    x.ncols()
                )));
            }
            let qt = q.transpose();
            Ok((
                linalg::symmetrize(&(&qt * x * q)),
                linalg::symmetrize(&(&qt * y * q)),
            ))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairRegularity {
    NonsingularPair,
    SingularPair,
}

/// Whether some member of the span of `{A, B}` is nonsingular.
pub fn pair_regularity(a: &Mat, b: &Mat, cfg: &Config) -> Result<PairRegularity> {
    let set = SymMatrixSet::with_tolerance(vec![a.clone(), b.clone()], cfg.sym)?;
    Ok(match find_nonsingular_pencil(&set, cfg) {
        PencilSearch::Found(_) => PairRegularity::NonsingularPair,
        PencilSearch::Singular { .. } => PairRegularity::SingularPair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: usize, v: &[f64]) -> Mat {
        Mat::from_row_slice(n, n, v)
    }

    #[test]
    fn already_canonical() {
        let cfg = Config::default();
        let u = uhlig_canonical(&e_mat(2), &m(2, &[0., 0.7, 0.7, 1.]), &cfg).unwrap();
        assert_eq!(u.blocks.len(), 1);
        assert_eq!(u.blocks[0].sign, 1);
        assert_eq!(u.blocks[0].size, 2);
        let u = uhlig_canonical(&Mat::identity(2, 2), &m(2, &[2., 0., 0., 3.]), &cfg).unwrap();
        assert_eq!(u.blocks.len(), 2);
        assert!(u.residual_a < 1e-12 && u.residual_b < 1e-12);
    }

    #[test]
    fn defective_zero_eigenvalue() {
        let cfg = Config::default();
        let b = m(2, &[1., 0., 0., 0.]);
        let u = uhlig_canonical(&e_mat(2), &b, &cfg).unwrap();
        assert_eq!(u.blocks.len(), 1);
        assert_eq!((u.blocks[0].sign, u.blocks[0].size), (1, 2));
        let p = &u.transform;
        assert!((p.transpose() * e_mat(2) * p - e_mat(2)).norm() < 1e-12);
        assert!((p.transpose() * &b * p - m(2, &[0., 0., 0., 1.])).norm() < 1e-12);
    }

    #[test]
    fn negative_sign_and_complex() {
        let cfg = Config::default();
        let u =
            uhlig_canonical(&m(2, &[-1., 0., 0., 1.]), &m(2, &[-2., 0., 0., 5.]), &cfg).unwrap();
        let signs: Vec<i8> = u.blocks.iter().map(|b| b.sign).collect();
        assert_eq!(signs, vec![-1, 1]);
        // A⁻¹B has eigenvalues ±i for A = E(2), B = diag(1, −1).
        let u = uhlig_canonical(&e_mat(2), &m(2, &[1., 0., 0., -1.]), &cfg).unwrap();
        assert_eq!(u.blocks.len(), 1);
        assert!(
            matches!(u.blocks[0].eigenvalue, Eigenvalue::Complex { im, .. } if (im - 1.0).abs() < 1e-9)
        );
        assert!(u.residual_a < 1e-10);
    }

    #[test]
    fn series_helpers() {
        let q = [4.0, 4.0, 1.0];
        assert_eq!(series_sqrt(&q), vec![2.0, 1.0, 0.0]);
        let g = [0.0, 2.0];
        assert_eq!(hankel_coeffs(&g, 1.0), vec![0.5, 0.0]);
    }

    #[test]
    fn synthesis_examples() {
        let (x, y) = synthesize_lancaster_pair(
            &[LancasterBlock::Finite {
                sign: 1,
                size: 2,
                lambda: 0.5,
            }],
            None,
        )
        .unwrap();
        assert_eq!(x, e_mat(2));
        assert_eq!(y, m(2, &[0., 0.5, 0.5, 1.]));
        let (x, y) = synthesize_lancaster_pair(&[LancasterBlock::Zero { size: 2 }], None).unwrap();
        assert_eq!(x, Mat::zeros(2, 2));
        assert_eq!(y, Mat::zeros(2, 2));
        let (x, y) =
            synthesize_lancaster_pair(&[LancasterBlock::Singular { size: 1 }], None).unwrap();
        assert_eq!(x, m(3, &[0., 0., 1., 0., 0., 0., 1., 0., 0.]));
        assert_eq!(y, f_mat(3));
        let (_, y) = synthesize_lancaster_pair(
            &[LancasterBlock::ComplexPair {
                size: 2,
                mu: 0.0,
                nu: 1.0,
            }],
            None,
        )
        .unwrap();
        assert_eq!(
            y,
            m(
                4,
                &[0., 1., 1., 0., 1., 0., 0., -1., 1., 0., 0., 0., 0., -1., 0., 0.]
            )
        );
        assert!(synthesize_lancaster_pair(
            &[LancasterBlock::ComplexPair {
                size: 1,
                mu: 0.0,
                nu: 0.0
            }],
            None
        )
        .is_err());
        assert!(synthesize_lancaster_pair(
            &[
                LancasterBlock::Zero { size: 1 },
                LancasterBlock::Zero { size: 1 }
            ],
            None
        )
        .is_err());
    }

    #[test]
    fn regularity() {
        let cfg = Config::default();
        assert_eq!(
            pair_regularity(&e_mat(2), &m(2, &[1., 0., 0., 0.]), &cfg).unwrap(),
            PairRegularity::NonsingularPair
        );
        assert_eq!(
            pair_regularity(&m(2, &[1., 0., 0., 0.]), &m(2, &[2., 0., 0., 0.]), &cfg).unwrap(),
            PairRegularity::SingularPair
        );
        let (x, y) = synthesize_lancaster_pair(
            &[
                LancasterBlock::Finite {
                    sign: 1,
                    size: 1,
                    lambda: 2.0,
                },
                LancasterBlock::Singular { size: 1 },
            ],
            None,
        )
        .unwrap();
        assert_eq!(
            pair_regularity(&x, &y, &cfg).unwrap(),
            PairRegularity::SingularPair
        );
    }
}
