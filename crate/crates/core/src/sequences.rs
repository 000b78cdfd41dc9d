//! Closed-form congruence sequences `k ↦ P_k` with constant determinant, and
//! a sampled verifier for off-diagonal decay and diagonal boundedness.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::canon::{uhlig_canonical, LancasterBlock};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::matcore::{g_mat, r_exponents, Eigenvalue, PencilWitness, SymMatrixSet};

/// Entries above this magnitude abort evaluation.
pub const OVERFLOW_GUARD: f64 = 1e150;

pub const DEFAULT_K_GRID: [f64; 4] = [10.0, 100.0, 1000.0, 10000.0];

/// One diagonal block of a block-scaling recipe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledBlock {
    pub size: usize,
    /// `R_k(size)·Q(size)` when set, identity otherwise.
    pub scaled: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Recipe {
    /// `P̃·Diag{R_k(mₛ)Qₛ or I}` with `QₛᵀE(mₛ)Qₛ = G(mₛ)`.
    NonsingularPair {
        #[serde(with = "crate::io::rows")]
        base: Mat,
        blocks: Vec<ScaledBlock>,
    },
    /// `P̄·Diag{1/k, …, 1/k, k^{m−1}}`; the last coordinate lies in the zero block.
    SingularCase1 {
        #[serde(with = "crate::io::rows")]
        base: Mat,
    },
    /// `P̄·Diag{I, R_k(2t+1)}·Diag{k^{−1/(2(m−1))}I, V_k}` with the size-`t`
    /// singular block in the trailing `2t+1` coordinates.
    SingularCase2 {
        #[serde(with = "crate::io::rows")]
        base: Mat,
        tail: usize,
    },
    /// `C̃_k·Q_k / det(C̃_k)^{1/m}` with `C̃_k = (C + I/k)^{−1/2}` and `Q_k`
    /// diagonalizing `C̃_k·X·C̃_k`.
    PsdPencil {
        #[serde(with = "crate::io::rows")]
        c: Mat,
        #[serde(with = "crate::io::rows")]
        other: Mat,
        alpha: f64,
        beta: f64,
    },
    /// `R_k(m)·Q`.
    EfBlock {
        #[serde(with = "crate::io::rows")]
        q: Mat,
        m: usize,
    },
    Constant {
        #[serde(with = "crate::io::rows")]
        p: Mat,
    },
    /// `L·diag(k^{eᵢ})·R` with `Σeᵢ = 0`.
    DiagonalPower {
        #[serde(with = "crate::io::rows")]
        left: Mat,
        exponents: Vec<f64>,
        #[serde(with = "crate::io::rows")]
        right: Mat,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CongruenceSequence {
    pub dim: usize,
    pub recipe: Recipe,
    pub det_value: f64,
    /// Limits of `P_kᵀAᵢP_k`, when the construction knows them.
    #[serde(with = "crate::io::rows_opt_vec")]
    pub limits: Option<Vec<Mat>>,
}

/// Orthogonal `Q ∈ SO_m` with `QᵀE(m)Q = G(m)`.
pub fn e_diagonalizer(m: usize) -> Mat {
    let h = 0.5f64.sqrt();
    let mut q = Mat::zeros(m, m);
    let mut c = 0;
    for i in 0..m / 2 {
        q[(i, c)] = h;
        q[(m - 1 - i, c)] = h;
        c += 1;
    }
    if m % 2 == 1 {
        q[(m / 2, c)] = 1.0;
        c += 1;
    }
    for i in 0..m / 2 {
        q[(i, c)] = h;
        q[(m - 1 - i, c)] = -h;
        c += 1;
    }
    linalg::make_special(&mut q);
    q
}

fn diag_pow(exps: &[f64], k: f64) -> Mat {
    Mat::from_diagonal(&DVector::from_iterator(
        exps.len(),
        exps.iter().map(|&e| k.powf(e)),
    ))
}

fn psd_transform(c: &Mat, other: &Mat, k: f64) -> Mat {
    let m = c.nrows();
    let (vals, vecs) = linalg::sym_eigen_sorted(c);
    let scale = vals.amax().max(f64::MIN_POSITIVE);
    let pd = vals.iter().all(|&l| l > 1e-12 * scale);
    let shifted: Vec<f64> = vals
        .iter()
        .map(|&l| if pd { l } else { l.max(0.0) + 1.0 / k })
        .collect();
    let d = DVector::from_iterator(m, shifted.iter().map(|l| 1.0 / l.sqrt()));
    let ct = &vecs * Mat::from_diagonal(&d) * vecs.transpose();
    let log_det: f64 = shifted.iter().map(|l| -0.5 * l.ln()).sum();
    let inner = &ct * other * &ct;
    let (_, mut q) = linalg::sym_eigen_sorted(&inner);
    linalg::fix_first_nonzero_positive(&mut q, 1e-12);
    linalg::make_special(&mut q);
    ct * q / (log_det / m as f64).exp()
}

impl CongruenceSequence {
    /// Closed-form `P_k` for `k ≥ 1`.
    pub fn evaluate(&self, k: f64) -> Result<Mat> {
        if !(k.is_finite() && k >= 1.0) {
            return Err(Error::Domain(format!(
                "sequences are evaluated at k ≥ 1, got {k}"
            )));
        }
        let p = match &self.recipe {
            Recipe::NonsingularPair { base, blocks } => {
                let parts: Vec<Mat> = blocks
                    .iter()
                    .map(|b| {
                        if b.scaled {
                            diag_pow(&r_exponents(b.size), k) * e_diagonalizer(b.size)
                        } else {
                            Mat::identity(b.size, b.size)
                        }
                    })
                    .collect();
                base * linalg::block_diag(&parts)
            }
            Recipe::SingularCase1 { base } => {
                let m = self.dim;
                let mut e = vec![-1.0; m];
                e[m - 1] = m as f64 - 1.0;
                base * diag_pow(&e, k)
            }
            Recipe::SingularCase2 { base, tail } => {
                base * diag_pow(&case2_exponents(self.dim, *tail), k)
            }
            Recipe::PsdPencil { c, other, .. } => psd_transform(c, other, k),
            Recipe::EfBlock { q, m } => diag_pow(&r_exponents(*m), k) * q,
            Recipe::Constant { p } => p.clone(),
            Recipe::DiagonalPower {
                left,
                exponents,
                right,
            } => left * diag_pow(exponents, k) * right,
        };
        if p.iter().any(|x| !x.is_finite() || x.abs() > OVERFLOW_GUARD) {
            return Err(Error::KTooLarge(k));
        }
        Ok(p)
    }

    pub fn recipe_name(&self) -> &'static str {
        match self.recipe {
            Recipe::NonsingularPair { .. } => "nonsingular_pair",
            Recipe::SingularCase1 { .. } => "singular_case1",
            Recipe::SingularCase2 { .. } => "singular_case2",
            Recipe::PsdPencil { .. } => "psd_pencil",
            Recipe::EfBlock { .. } => "ef_block",
            Recipe::Constant { .. } => "constant",
            Recipe::DiagonalPower { .. } => "diagonal_power",
        }
    }

    pub fn constant(p: Mat) -> Result<Self> {
        if !p.is_square() {
            return Err(Error::Shape(
                "constant sequence needs a square matrix".into(),
            ));
        }
        let det_value = p.determinant();
        if det_value == 0.0 {
            return Err(Error::Singular("constant sequence".into()));
        }
        Ok(CongruenceSequence {
            dim: p.nrows(),
            recipe: Recipe::Constant { p },
            det_value,
            limits: None,
        })
    }

    /// `L·diag(k^{eᵢ})·R`; the exponents must sum to zero.
    pub fn diagonal_power(left: Mat, exponents: Vec<f64>, right: Mat) -> Result<Self> {
        let m = exponents.len();
        if left.shape() != (m, m) || right.shape() != (m, m) {
            return Err(Error::Shape(
                "diagonal_power factors must be square of the exponent count".into(),
            ));
        }
        if exponents.iter().sum::<f64>().abs() > 1e-12 {
            return Err(Error::Domain(
                "exponents must sum to zero for a constant determinant".into(),
            ));
        }
        let det_value = left.determinant() * right.determinant();
        if det_value == 0.0 {
            return Err(Error::Singular("diagonal_power factors".into()));
        }
        Ok(CongruenceSequence {
            dim: m,
            recipe: Recipe::DiagonalPower {
                left,
                exponents,
                right,
            },
            det_value,
            limits: None,
        })
    }

    /// `P̄·Diag{1/k, …, 1/k, k^{m−1}}` for a base whose last column lies in
    /// the common kernel; every congruence tends to zero.
    pub fn singular_case1(base: Mat) -> Result<Self> {
        if !base.is_square() || base.nrows() < 2 {
            return Err(Error::Shape("case-1 base must be square with m ≥ 2".into()));
        }
        let det_value = base.determinant();
        if det_value == 0.0 {
            return Err(Error::Singular("case-1 base".into()));
        }
        let m = base.nrows();
        Ok(CongruenceSequence {
            dim: m,
            recipe: Recipe::SingularCase1 { base },
            det_value,
            limits: None,
        })
    }

    pub fn ef_block(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("block size must be ≥ 1".into()));
        }
        let q = e_diagonalizer(m);
        Ok(CongruenceSequence {
            dim: m,
            recipe: Recipe::EfBlock { q, m },
            det_value: 1.0,
            limits: None,
        })
    }
}

fn case2_exponents(m: usize, tail: usize) -> Vec<f64> {
    let lead = m - (2 * tail + 1);
    let outer = -1.0 / (2.0 * (m as f64 - 1.0));
    let mut e = vec![outer; lead];
    // R_k(2t+1) exponents t, t−1, …, −t, combined with V_k.
    for (s, r) in r_exponents(2 * tail + 1).into_iter().enumerate() {
        e.push(r + if s == tail { 0.5 } else { outer });
    }
    e
}

/// Sequence for a nonsingular pair whose pencil `A⁻¹B` has a real spectrum:
/// Uhlig form `P̃`, then `R_k(mₛ)Qₛ` on every block of size ≥ 2.
pub fn seq_nonsingular_pair(a: &Mat, b: &Mat, cfg: &Config) -> Result<CongruenceSequence> {
    let set = SymMatrixSet::with_tolerance(vec![a.clone(), b.clone()], cfg.sym)?;
    let (a, b) = (set.get(0), set.get(1));
    let m = a.nrows();
    if linalg::rcond(a) <= cfg.det {
        return Err(Error::Singular("A in seq_nonsingular_pair".into()));
    }
    let tol = cfg.diag * a.norm().max(b.norm());
    if linalg::offdiag_norm(a) <= tol && linalg::offdiag_norm(b) <= tol {
        let mut s = CongruenceSequence::constant(Mat::identity(m, m))?;
        s.limits = Some(vec![a.clone(), b.clone()]);
        return Ok(s);
    }
    let u = uhlig_canonical(a, b, cfg)?;
    let mut la = Vec::new();
    let mut lb = Vec::new();
    let mut blocks = Vec::new();
    for blk in &u.blocks {
        let lambda = match blk.eigenvalue {
            Eigenvalue::Real(l) => l,
            Eigenvalue::Complex { re, im } => {
                return Err(Error::Domain(format!(
                    "A⁻¹B has the non-real eigenvalue pair {re} ± {im}i"
                )))
            }
        };
        let g = g_mat(blk.size) * f64::from(blk.sign);
        lb.push(&g * lambda);
        la.push(g);
        blocks.push(ScaledBlock {
            size: blk.size,
            scaled: blk.size > 1,
        });
    }
    let det_value = u.transform.determinant();
    Ok(CongruenceSequence {
        dim: m,
        recipe: Recipe::NonsingularPair {
            base: u.transform,
            blocks,
        },
        det_value,
        limits: Some(vec![linalg::block_diag(&la), linalg::block_diag(&lb)]),
    })
}

/// Sequence for a pair given in five-type canonical form `P̄ᵀAP̄ = X`,
/// `P̄ᵀBP̄ = Y` (`pbar = None` means the identity).
pub fn seq_singular_pair(
    blocks: &[LancasterBlock],
    pbar: Option<&Mat>,
) -> Result<CongruenceSequence> {
    // Validates the descriptors.
    let m = crate::canon::synthesize_lancaster_pair(blocks, None)?
        .0
        .nrows();
    let pbar = match pbar {
        Some(p) if p.shape() != (m, m) => {
            return Err(Error::Shape(format!("P̄ must be {m}×{m}")));
        }
        Some(p) => p.clone(),
        None => Mat::identity(m, m),
    };
    // Coordinate offsets of each block.
    let mut offs = Vec::with_capacity(blocks.len());
    let mut o = 0;
    for b in blocks {
        offs.push(o);
        o += b.dim();
    }
    let move_last = |idx: usize| -> Mat {
        let (start, len) = (offs[idx], blocks[idx].dim());
        let order: Vec<usize> = (0..m)
            .filter(|&i| i < start || i >= start + len)
            .chain(start..start + len)
            .collect();
        Mat::from_fn(m, m, |r, c| if r == order[c] { 1.0 } else { 0.0 })
    };
    let zeros = vec![Mat::zeros(m, m), Mat::zeros(m, m)];
    if let Some(z) = blocks
        .iter()
        .position(|b| matches!(b, LancasterBlock::Zero { .. }))
    {
        let base = &pbar * move_last(z);
        let det_value = base.determinant();
        return Ok(CongruenceSequence {
            dim: m,
            recipe: Recipe::SingularCase1 { base },
            det_value,
            limits: Some(zeros),
        });
    }
    if let Some(s) = blocks
        .iter()
        .rposition(|b| matches!(b, LancasterBlock::Singular { .. }))
    {
        let LancasterBlock::Singular { size } = blocks[s] else {
            unreachable!()
        };
        let base = &pbar * move_last(s);
        let det_value = base.determinant();
        return Ok(CongruenceSequence {
            dim: m,
            recipe: Recipe::SingularCase2 { base, tail: size },
            det_value,
            limits: Some(zeros),
        });
    }
    if blocks
        .iter()
        .any(|b| matches!(b, LancasterBlock::ComplexPair { .. }))
    {
        return Err(Error::NotTwsdB(
            "regular pair with a non-real eigenvalue pair".into(),
        ));
    }
    let mut la = Vec::new();
    let mut lb = Vec::new();
    let mut sb = Vec::new();
    for b in blocks {
        match *b {
            LancasterBlock::Finite { sign, size, lambda } => {
                let g = g_mat(size) * f64::from(sign);
                lb.push(&g * lambda);
                la.push(g);
                sb.push(ScaledBlock {
                    size,
                    scaled: size > 1,
                });
            }
            LancasterBlock::Infinite { sign, size } => {
                let g = g_mat(size) * f64::from(sign);
                // X = ηF(m) vanishes in the limit except for m = 1, where F(1) = 0 too.
                la.push(Mat::zeros(size, size));
                lb.push(g);
                sb.push(ScaledBlock {
                    size,
                    scaled: size > 1,
                });
            }
            _ => unreachable!(),
        }
    }
    let det_value = pbar.determinant();
    Ok(CongruenceSequence {
        dim: m,
        recipe: Recipe::NonsingularPair {
            base: pbar,
            blocks: sb,
        },
        det_value,
        limits: Some(vec![linalg::block_diag(&la), linalg::block_diag(&lb)]),
    })
}

/// Sequence from a (semi)definite pencil `C = αA + βB ⪰ 0`: exactly diagonal
/// on the other matrix, off-diagonal decay on the first.
pub fn seq_psd_pencil(a: &Mat, b: &Mat, witness: &PencilWitness) -> Result<CongruenceSequence> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(Error::Shape(
            "seq_psd_pencil needs two equal square matrices".into(),
        ));
    }
    let (alpha, beta) = match witness.coeffs.as_slice() {
        [x, y] => (*x, *y),
        _ => return Err(Error::Shape("witness must have two coefficients".into())),
    };
    if alpha == 0.0 && beta == 0.0 {
        return Err(Error::Domain("pencil coefficients are both zero".into()));
    }
    let c = a * alpha + b * beta;
    let (vals, _) = linalg::sym_eigen_sorted(&c);
    let scale = c.norm();
    if scale == 0.0 || vals.iter().any(|&l| l < -1e-9 * scale) {
        return Err(Error::Domain("pencil is not positive semidefinite".into()));
    }
    let c = linalg::symmetrize(&c);
    let other = if alpha != 0.0 { b.clone() } else { a.clone() };
    Ok(CongruenceSequence {
        dim: a.nrows(),
        recipe: Recipe::PsdPencil {
            c,
            other: linalg::symmetrize(&other),
            alpha,
            beta,
        },
        det_value: 1.0,
        limits: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub ks: Vec<f64>,
    /// `Σᵢ‖offdiag(P_kᵀAᵢP_k)‖_F` per k.
    pub offdiag: Vec<f64>,
    /// `maxᵢ‖diag(P_kᵀAᵢP_k)‖` per k.
    pub diag: Vec<f64>,
    /// `|det(P_k) − det_value| / |det_value|` per k.
    pub det_drift: Vec<f64>,
    /// `m·ε·κ₂(P_k)` per k: the drift that rounding the entries of `P_k`
    /// alone can cause.
    pub det_floor: Vec<f64>,
    /// Least-squares slope of `log offdiag` against `log k` over the points
    /// above the rounding floor; `None` with fewer than two such points.
    pub decay_slope: Option<f64>,
    pub monotone_decay: bool,
    pub bounded_diag: bool,
    pub det_constant: bool,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.monotone_decay && self.bounded_diag && self.det_constant
    }
}

/// Samples the sequence on `k_grid` (ascending, at least three points).
pub fn verify_sequence(
    set: &SymMatrixSet,
    seq: &CongruenceSequence,
    k_grid: &[f64],
) -> Result<VerificationReport> {
    if k_grid.len() < 3 || k_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(
            "k_grid must be ascending with at least three points".into(),
        ));
    }
    if seq.dim != set.dim() {
        return Err(Error::Shape(format!(
            "sequence is {0}×{0}, set is {1}×{1}",
            seq.dim,
            set.dim()
        )));
    }
    let total: f64 = set.mats().iter().map(|a| a.norm()).sum();
    let mut offdiag = Vec::new();
    let mut diag = Vec::new();
    let mut drift = Vec::new();
    let mut floors = Vec::new();
    let mut det_floor = Vec::new();
    for &k in k_grid {
        let p = seq.evaluate(k)?;
        let mut off = 0.0;
        let mut dmax = 0.0f64;
        for a in set.mats() {
            let t = p.transpose() * a * &p;
            off += linalg::offdiag_norm(&t);
            dmax = dmax.max(linalg::diag_norm(&t));
        }
        offdiag.push(off);
        diag.push(dmax);
        drift.push((p.determinant() - seq.det_value).abs() / seq.det_value.abs());
        floors.push(1e-10 * total * p.norm_squared());
        let rc = linalg::rcond(&p);
        det_floor.push(seq.dim as f64 * f64::EPSILON / rc.max(f64::MIN_POSITIVE));
    }
    let above: Vec<(f64, f64)> = k_grid
        .iter()
        .zip(&offdiag)
        .zip(&floors)
        .filter(|((_, o), f)| **o > **f)
        .map(|((k, o), _)| (k.ln(), o.ln()))
        .collect();
    let decay_slope = (above.len() >= 2).then(|| {
        let n = above.len() as f64;
        let mx = above.iter().map(|p| p.0).sum::<f64>() / n;
        let my = above.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = above.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = above.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    let monotone_decay = (1..offdiag.len()).all(|i| {
        offdiag[i] < offdiag[i - 1] || (offdiag[i] <= floors[i] && offdiag[i - 1] <= floors[i - 1])
    });
    let lo = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = diag.iter().copied().fold(0.0, f64::max);
    let bounded_diag = hi <= 2.0 * lo || hi == 0.0;
    let det_constant = drift.iter().zip(&det_floor).all(|(&d, &f)| d <= f.max(1e-8));
    Ok(VerificationReport {
        ks: k_grid.to_vec(),
        offdiag,
        diag,
        det_drift: drift,
        det_floor,
        decay_slope,
        monotone_decay,
        bounded_diag,
        det_constant,
    })
}
