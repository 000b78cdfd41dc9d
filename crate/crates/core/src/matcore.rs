//! Symmetric matrix sets, the special matrices E, F, H, G, R_k and Jordan
//! blocks, residual functions, S-commutators and pencil searches.

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// An ordered, nonempty list of real symmetric matrices of a common size.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrixSet {
    dim: usize,
    mats: Vec<Mat>,
}

impl SymMatrixSet {
    /// Validates shapes and symmetry with the default tolerance.
    pub fn new(mats: Vec<Mat>) -> Result<Self> {
        Self::with_tolerance(mats, Config::default().sym)
    }

    /// Validates shapes and symmetry: `max|aᵢⱼ − aⱼᵢ| ≤ tol·‖A‖_F`.
    /// Accepted matrices are stored exactly symmetrized.
    pub fn with_tolerance(mats: Vec<Mat>, tol: f64) -> Result<Self> {
        let dim = Self::check_shapes(&mats)?;
        for (i, a) in mats.iter().enumerate() {
            let asym = linalg::asymmetry(a);
            if asym > tol * a.norm() {
                return Err(Error::Domain(format!(
                    "matrix {i} is not symmetric (max |a_ij - a_ji| = {asym:e})"
                )));
            }
        }
        Ok(SymMatrixSet {
            dim,
            mats: mats.iter().map(linalg::symmetrize).collect(),
        })
    }

    /// Replaces each matrix by `(A + Aᵀ)/2`.
    pub fn symmetrized(mats: Vec<Mat>) -> Result<Self> {
        let dim = Self::check_shapes(&mats)?;
        Ok(SymMatrixSet {
            dim,
            mats: mats.iter().map(linalg::symmetrize).collect(),
        })
    }

    fn check_shapes(mats: &[Mat]) -> Result<usize> {
        let first = mats
            .first()
            .ok_or_else(|| Error::Domain("a matrix set needs at least one matrix".into()))?;
        let m = first.nrows();
        if m == 0 {
            return Err(Error::Domain("matrices must be at least 1×1".into()));
        }
        for (i, a) in mats.iter().enumerate() {
            if a.nrows() != m || a.ncols() != m {
                return Err(Error::Shape(format!(
                    "matrix {i} is {}×{}, expected {m}×{m}",
                    a.nrows(),
                    a.ncols()
                )));
            }
            if a.iter().any(|x| !x.is_finite()) {
                return Err(Error::Domain(format!("matrix {i} has non-finite entries")));
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn mats(&self) -> &[Mat] {
        &self.mats
    }

    pub fn get(&self, i: usize) -> &Mat {
        &self.mats[i]
    }

    pub fn into_mats(self) -> Vec<Mat> {
        self.mats
    }

    /// `{PᵀAᵢP}` for a square `P`.
    pub fn congruence(&self, p: &Mat) -> SymMatrixSet {
        SymMatrixSet {
            dim: p.ncols(),
            mats: self
                .mats
                .iter()
                .map(|a| linalg::symmetrize(&(p.transpose() * a * p)))
                .collect(),
        }
    }

    /// Sub-set restricted to the given coordinates.
    pub fn principal(&self, idx: &[usize]) -> SymMatrixSet {
        SymMatrixSet {
            dim: idx.len(),
            mats: self
                .mats
                .iter()
                .map(|a| Mat::from_fn(idx.len(), idx.len(), |i, j| a[(idx[i], idx[j])]))
                .collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> SymMatrixSet {
        SymMatrixSet {
            dim: self.dim,
            mats: self.mats.iter().map(|a| a * c).collect(),
        }
    }

    /// Largest Frobenius norm among the members.
    pub fn max_norm(&self) -> f64 {
        self.mats.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Linear combination `Σ cᵢAᵢ`.
    pub fn combine(&self, coeffs: &[f64]) -> Mat {
        let mut s = Mat::zeros(self.dim, self.dim);
        for (c, a) in coeffs.iter().zip(&self.mats) {
            s += a * *c;
        }
        s
    }
}

/// Eigenvalue of a real Jordan block.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Eigenvalue {
    Real(f64),
    /// The pair `a ± bi`, stored with `b > 0`.
    Complex {
        re: f64,
        im: f64,
    },
}

impl Eigenvalue {
    pub fn is_real(&self) -> bool {
        matches!(self, Eigenvalue::Real(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpecialMatrixKind {
    /// Anti-identity.
    E(usize),
    /// Ones on the sub-antidiagonal `i + j = m + 2`.
    F(usize),
    /// Checkerboard `+1` on `i + j = m`, `−1` on `i + j = m + 2`.
    H(usize),
    /// Signature `Diag(I_⌈m/2⌉, −I_⌊m/2⌋)` of `E(m)`.
    G(usize),
    /// `diag(k^{(m+1)/2 − s})`.
    Rk { m: usize, k: f64 },
    /// Real Jordan block; for a complex pair `m` is the total (even) size.
    Jordan { m: usize, eigenvalue: Eigenvalue },
}

pub fn special_matrix(kind: &SpecialMatrixKind) -> Result<Mat> {
    use SpecialMatrixKind::*;
    let size = match kind {
        E(m) | F(m) | H(m) | G(m) => *m,
        Rk { m, .. } | Jordan { m, .. } => *m,
    };
    if size == 0 {
        return Err(Error::Domain("special matrices need size ≥ 1".into()));
    }
    Ok(match kind {
        E(m) => e_mat(*m),
        F(m) => f_mat(*m),
        H(m) => h_mat(*m),
        G(m) => g_mat(*m),
        Rk { m, k } => {
            if !(k.is_finite() && *k >= 1.0) {
                return Err(Error::Domain(format!("R_k needs k ≥ 1, got {k}")));
            }
            r_mat(*m, *k)
        }
        Jordan { m, eigenvalue } => match *eigenvalue {
            Eigenvalue::Real(l) => jordan_real(l, *m),
            Eigenvalue::Complex { re, im } => {
                if m % 2 != 0 {
                    return Err(Error::Domain("complex Jordan blocks have even size".into()));
                }
                if im == 0.0 {
                    return Err(Error::Domain("complex Jordan block needs b ≠ 0".into()));
                }
                jordan_complex(re, im, m / 2)
            }
        },
    })
}

pub fn e_mat(m: usize) -> Mat {
    Mat::from_fn(m, m, |i, j| if i + j + 1 == m { 1.0 } else { 0.0 })
}

pub fn f_mat(m: usize) -> Mat {
    // 1-indexed i + j = m + 2 is 0-indexed i + j = m.
    Mat::from_fn(m, m, |i, j| if i + j == m { 1.0 } else { 0.0 })
}

/// Checkerboard signed anti-diagonals: with 1-based indices, `+1` where
/// `i + j = m` and `min(i, j)` is odd, `−1` where `i + j = m + 2` and
/// `min(i, j)` is even.
pub fn h_mat(m: usize) -> Mat {
    // 0-based: min index even on i + j = m − 2, odd on i + j = m.
    Mat::from_fn(m, m, |i, j| {
        let lo = i.min(j);
        if i + j + 2 == m && lo % 2 == 0 {
            1.0
        } else if i + j == m && lo % 2 == 1 {
            -1.0
        } else {
            0.0
        }
    })
}

pub fn g_mat(m: usize) -> Mat {
    let pos = m.div_ceil(2);
    Mat::from_fn(m, m, |i, j| match (i == j, i < pos) {
        (true, true) => 1.0,
        (true, false) => -1.0,
        _ => 0.0,
    })
}

pub fn r_exponents(m: usize) -> Vec<f64> {
    (1..=m).map(|s| (m as f64 + 1.0) / 2.0 - s as f64).collect()
}

pub fn r_mat(m: usize, k: f64) -> Mat {
    let d: Vec<f64> = r_exponents(m).iter().map(|&e| k.powf(e)).collect();
    Mat::from_diagonal(&nalgebra::DVector::from_vec(d))
}

pub fn jordan_real(lambda: f64, m: usize) -> Mat {
    Mat::from_fn(m, m, |i, j| {
        if i == j {
            lambda
        } else if j == i + 1 {
            1.0
        } else {
            0.0
        }
    })
}

/// Real Jordan block for `a ± bi` with `cells` 2×2 cells.
pub fn jordan_complex(a: f64, b: f64, cells: usize) -> Mat {
    let n = 2 * cells;
    let mut j = Mat::zeros(n, n);
    for c in 0..cells {
        let o = 2 * c;
        j[(o, o)] = a;
        j[(o, o + 1)] = -b;
        j[(o + 1, o)] = b;
        j[(o + 1, o + 1)] = a;
        if c + 1 < cells {
            j[(o, o + 2)] = 1.0;
            j[(o + 1, o + 3)] = 1.0;
        }
    }
    j
}

/// `S⁻¹AS⁻¹B − S⁻¹BS⁻¹A`.
pub fn s_commutator(a: &Mat, b: &Mat, s: &Mat, cfg: &Config) -> Result<Mat> {
    if a.shape() != s.shape() || b.shape() != s.shape() || !s.is_square() {
        return Err(Error::Shape(
            "s_commutator needs equal square shapes".into(),
        ));
    }
    if linalg::rcond(s) <= cfg.det {
        return Err(Error::Singular("S in the S-commutator".into()));
    }
    let lu = s.clone().lu();
    let sa = lu.solve(a).ok_or_else(|| Error::Singular("S".into()))?;
    let sb = lu.solve(b).ok_or_else(|| Error::Singular("S".into()))?;
    Ok(&sa * &sb - &sb * &sa)
}

/// Which side the transform acts on in [`phi_t`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Congruence {
    /// `PᵀAP` with square `P`.
    #[default]
    Transposed,
    /// `PAPᵀ` with `P` of shape n×m.
    Projective,
}

/// `Σᵢ‖PAᵢPᵀ − Dᵢ‖²_F` (projective) or `Σᵢ‖PᵀAᵢP − Dᵢ‖²_F` (default).
pub fn phi_t(set: &SymMatrixSet, p: &Mat, d: &[Mat], conv: Congruence) -> Result<f64> {
    check_d(set, d)?;
    let m = set.dim();
    let mut total = 0.0;
    for (a, di) in set.mats().iter().zip(d) {
        let t = match conv {
            Congruence::Projective => {
                if p.ncols() != m || p.nrows() < m {
                    return Err(Error::Shape(format!("P must be n×{m} with n ≥ {m}")));
                }
                p * a * p.transpose()
            }
            Congruence::Transposed => {
                if p.shape() != (m, m) {
                    return Err(Error::Shape(format!("P must be {m}×{m}")));
                }
                p.transpose() * a * p
            }
        };
        if t.shape() != di.shape() {
            return Err(Error::Shape("D has the wrong size".into()));
        }
        total += (t - di).norm_squared();
    }
    Ok(total)
}

/// `Σᵢ‖Aᵢ − PᵀDᵢP‖²_F` for `P` of shape n×m.
pub fn phi_d(set: &SymMatrixSet, p: &Mat, d: &[Mat]) -> Result<f64> {
    check_d(set, d)?;
    let m = set.dim();
    if p.ncols() != m || p.nrows() < m {
        return Err(Error::Shape(format!("P must be n×{m} with n ≥ {m}")));
    }
    let mut total = 0.0;
    for (a, di) in set.mats().iter().zip(d) {
        if di.shape() != (p.nrows(), p.nrows()) {
            return Err(Error::Shape("D has the wrong size".into()));
        }
        total += (a - p.transpose() * di * p).norm_squared();
    }
    Ok(total)
}

fn check_d(set: &SymMatrixSet, d: &[Mat]) -> Result<()> {
    if d.len() != set.len() {
        return Err(Error::Shape(format!(
            "{} matrices but {} diagonals",
            set.len(),
            d.len()
        )));
    }
    if d.iter().any(|x| linalg::offdiag_norm(x) != 0.0) {
        return Err(Error::Domain("D matrices must be diagonal".into()));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PencilKind {
    Nonsingular,
    PositiveDefinite,
    PositiveSemidefinite,
}

/// A member `Σ αᵢAᵢ` of the span with a certified property.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PencilWitness {
    pub coeffs: Vec<f64>,
    #[serde(with = "crate::io::rows")]
    pub pencil: Mat,
    pub kind: PencilKind,
    /// `σ_min(S) / Σ|cᵢ|‖Aᵢ‖₂` for nonsingular witnesses, `λ_min / scale`
    /// for (semi)definite ones.
    pub measure: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PencilSearch {
    Found(PencilWitness),
    /// Every pencil looked at was singular. Exact for two matrices, sampled
    /// otherwise (`probabilistic = true`).
    Singular {
        probabilistic: bool,
    },
}

impl PencilSearch {
    pub fn witness(&self) -> Option<&PencilWitness> {
        match self {
            PencilSearch::Found(w) => Some(w),
            PencilSearch::Singular { .. } => None,
        }
    }
}

pub fn find_nonsingular_pencil(set: &SymMatrixSet, cfg: &Config) -> PencilSearch {
    let l = set.len();
    let m = set.dim();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let norms: Vec<f64> = set.mats().iter().map(linalg::spectral_norm).collect();
    // σ_min(S) against Σ|cᵢ|·‖Aᵢ‖₂ rather than ‖S‖₂: a combination that
    // cancels to rounding noise must not look well conditioned.
    let consider = |coeffs: Vec<f64>, best: &mut Option<(f64, Vec<f64>)>| {
        let s = set.combine(&coeffs);
        let scale: f64 = coeffs.iter().zip(&norms).map(|(c, n)| c.abs() * n).sum();
        let sv = linalg::singular_values_asc(&s);
        let r = if scale > 0.0 { sv[0] / scale } else { 0.0 };
        if best.as_ref().is_none_or(|(b, _)| r > *b) {
            *best = Some((r, coeffs));
        }
    };
    if l == 1 {
        consider(vec![1.0], &mut best);
    } else if l == 2 {
        // det(αA + (1−α)B) has degree ≤ m in α: m + 1 distinct nodes decide it.
        let mut nodes = vec![1.0, 0.0];
        let extra = m + 1;
        for j in 0..extra {
            let t = ((2 * j + 1) as f64 * std::f64::consts::PI / (2 * extra) as f64).cos();
            nodes.push(0.5 + 1.5 * t);
        }
        for a in nodes {
            consider(vec![a, 1.0 - a], &mut best);
        }
    } else {
        for i in 0..l {
            let mut c = vec![0.0; l];
            c[i] = 1.0;
            consider(c, &mut best);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..cfg.n_pencil {
            consider(unit_coeffs(&mut rng, l), &mut best);
        }
    }
    let (r, coeffs) = best.expect("at least one candidate");
    if r > cfg.det {
        PencilSearch::Found(PencilWitness {
            pencil: set.combine(&coeffs),
            coeffs,
            kind: PencilKind::Nonsingular,
            measure: r,
        })
    } else {
        PencilSearch::Singular {
            probabilistic: l > 2,
        }
    }
}

fn unit_coeffs(rng: &mut ChaCha8Rng, l: usize) -> Vec<f64> {
    let mut c: Vec<f64> = (0..l).map(|_| rng.sample(StandardNormal)).collect();
    let n = c
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);
    c.iter_mut().for_each(|x| *x /= n);
    c
}

fn lambda_min(a: &Mat) -> f64 {
    SymmetricEigen::new(a.clone()).eigenvalues.min()
}

#[derive(Clone, Debug, PartialEq)]
pub enum DefiniteSearch {
    Found(PencilWitness),
    /// The search failed; this is not a proof that no such pencil exists.
    NoneFound {
        best_lambda_min: f64,
    },
}

impl DefiniteSearch {
    pub fn witness(&self) -> Option<&PencilWitness> {
        match self {
            DefiniteSearch::Found(w) => Some(w),
            DefiniteSearch::NoneFound { .. } => None,
        }
    }

    pub fn positive_definite(&self) -> Option<&PencilWitness> {
        self.witness()
            .filter(|w| w.kind == PencilKind::PositiveDefinite)
    }
}

/// Searches for a positive definite, or failing that positive semidefinite,
/// nonzero member of the span with unit-norm coefficients.
pub fn find_definite_pencil(set: &SymMatrixSet, cfg: &Config) -> DefiniteSearch {
    let l = set.len();
    let scale = set
        .mats()
        .iter()
        .map(|a| a.norm_squared())
        .sum::<f64>()
        .sqrt();
    if scale == 0.0 {
        return DefiniteSearch::NoneFound {
            best_lambda_min: 0.0,
        };
    }
    let score = |c: &[f64]| lambda_min(&set.combine(c)) / scale;
    let (coeffs, val) = if l == 1 {
        let up = score(&[1.0]);
        let down = score(&[-1.0]);
        if up >= down {
            (vec![1.0], up)
        } else {
            (vec![-1.0], down)
        }
    } else if l == 2 {
        scan_pair(&score, cfg.n_theta.max(8))
    } else {
        search_many(set, &score, cfg)
    };
    let kind = if val > cfg.pd {
        PencilKind::PositiveDefinite
    } else if val >= -cfg.pd && set.combine(&coeffs).norm() > cfg.pd * scale {
        PencilKind::PositiveSemidefinite
    } else {
        return DefiniteSearch::NoneFound {
            best_lambda_min: val,
        };
    };
    DefiniteSearch::Found(PencilWitness {
        pencil: set.combine(&coeffs),
        coeffs,
        kind,
        measure: val,
    })
}

fn scan_pair(score: &dyn Fn(&[f64]) -> f64, n: usize) -> (Vec<f64>, f64) {
    use std::f64::consts::TAU;
    let f = |t: f64| score(&[t.cos(), t.sin()]);
    let h = TAU / n as f64;
    let vals: Vec<f64> = (0..n).map(|i| f(i as f64 * h)).collect();
    // Refine around every local maximum of the grid.
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 0..n {
        let prev = vals[(i + n - 1) % n];
        let next = vals[(i + 1) % n];
        if vals[i] >= prev && vals[i] >= next {
            let t0 = i as f64 * h;
            let (t, v) = golden_max(&f, t0 - h, t0 + h, 80);
            let (t, v) = if vals[i] > v { (t0, vals[i]) } else { (t, v) };
            if v > best.1 {
                best = (t, v);
            }
        }
    }
    (vec![best.0.cos(), best.0.sin()], best.1)
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

fn search_many(set: &SymMatrixSet, score: &dyn Fn(&[f64]) -> f64, cfg: &Config) -> (Vec<f64>, f64) {
    let l = set.len();
    let mut cands: Vec<Vec<f64>> = Vec::new();
    for i in 0..l {
        for s in [1.0, -1.0] {
            let mut c = vec![0.0; l];
            c[i] = s;
            cands.push(c);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xDEF1);
    for _ in 0..cfg.n_pencil {
        cands.push(unit_coeffs(&mut rng, l));
    }
    let mut best = cands
        .into_iter()
        .map(|c| {
            let v = score(&c);
            (c, v)
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("candidates");
    // Shrinking random-direction hill climb on the sphere.
    let mut step = 0.5;
    while step > 1e-10 {
        let mut improved = false;
        for _ in 0..4 * l {
            let dir = unit_coeffs(&mut rng, l);
            let mut c: Vec<f64> = best.0.iter().zip(&dir).map(|(x, d)| x + step * d).collect();
            let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            c.iter_mut().for_each(|x| *x /= n);
            let v = score(&c);
            if v > best.1 {
                best = (c, v);
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(r: usize, v: &[f64]) -> Mat {
        Mat::from_row_slice(r, r, v)
    }

    #[test]
    fn special_examples() {
        assert_eq!(
            special_matrix(&SpecialMatrixKind::E(3)).unwrap(),
            m(3, &[0., 0., 1., 0., 1., 0., 1., 0., 0.])
        );
        let r = special_matrix(&SpecialMatrixKind::Rk { m: 3, k: 10.0 }).unwrap();
        assert_eq!(r.diagonal().as_slice(), &[10.0, 1.0, 0.1]);
        assert_eq!(g_mat(3).diagonal().as_slice(), &[1.0, 1.0, -1.0]);
        assert_eq!(f_mat(3), m(3, &[0., 0., 0., 0., 0., 1., 0., 1., 0.]));
        assert_eq!(h_mat(2), m(2, &[1., 0., 0., -1.]));
        assert_eq!(
            h_mat(4),
            m(
                4,
                &[0., 0., 1., 0., 0., 0., 0., -1., 1., 0., 0., 0., 0., -1., 0., 0.]
            )
        );
        assert!(special_matrix(&SpecialMatrixKind::Rk { m: 2, k: 0.5 }).is_err());
        assert!(special_matrix(&SpecialMatrixKind::E(0)).is_err());
        assert!(special_matrix(&SpecialMatrixKind::Jordan {
            m: 3,
            eigenvalue: Eigenvalue::Complex { re: 0.0, im: 1.0 }
        })
        .is_err());
    }

    #[test]
    fn commutator_examples() {
        let cfg = Config::default();
        let i2 = Mat::identity(2, 2);
        let c = s_commutator(&e_mat(2), &m(2, &[1., 0., 0., -1.]), &i2, &cfg).unwrap();
        assert_eq!(c, m(2, &[0., -2., 2., 0.]));
        let z = s_commutator(
            &m(2, &[1., 0., 0., 2.]),
            &m(2, &[3., 0., 0., 4.]),
            &i2,
            &cfg,
        )
        .unwrap();
        assert_eq!(z.norm(), 0.0);
        assert!(s_commutator(&i2, &i2, &Mat::zeros(2, 2), &cfg).is_err());
    }

    #[test]
    fn phi_examples() {
        let set = SymMatrixSet::new(vec![e_mat(2)]).unwrap();
        let i2 = Mat::identity(2, 2);
        assert_eq!(
            phi_t(&set, &i2, &[Mat::zeros(2, 2)], Congruence::default()).unwrap(),
            2.0
        );
        let set = SymMatrixSet::new(vec![i2.clone()]).unwrap();
        assert_eq!(phi_d(&set, &i2, &[Mat::zeros(2, 2)]).unwrap(), 2.0);
        assert!(phi_d(&set, &i2, &[e_mat(2)]).is_err());
    }

    #[test]
    fn pencil_examples() {
        let cfg = Config::default();
        let d1 = m(2, &[1., 0., 0., 0.]);
        let d2 = m(2, &[0., 0., 0., 1.]);
        let set = SymMatrixSet::new(vec![d1.clone(), d2]).unwrap();
        assert!(matches!(
            find_nonsingular_pencil(&set, &cfg),
            PencilSearch::Found(_)
        ));
        let set = SymMatrixSet::new(vec![d1.clone(), d1 * 2.0]).unwrap();
        assert_eq!(
            find_nonsingular_pencil(&set, &cfg),
            PencilSearch::Singular {
                probabilistic: false
            }
        );
        let set =
            SymMatrixSet::new(vec![m(2, &[1., -1., -1., 0.]), m(2, &[1., 1., 1., 0.])]).unwrap();
        let w = find_definite_pencil(&set, &cfg);
        let w = w.witness().expect("psd witness");
        assert_eq!(w.kind, PencilKind::PositiveSemidefinite);
        let p = &w.pencil / w.pencil.norm();
        assert!((p - m(2, &[1., 0., 0., 0.])).norm() < 1e-6);
    }

    #[test]
    fn definite_none_found() {
        let cfg = Config::default();
        let a = m(3, &[-1., 0., 0., 0., 1., 1., 0., 1., -1.]);
        let b = m(3, &[-1., 0., 0., 0., 1., 0., 0., 0., 0.]);
        let set = SymMatrixSet::new(vec![a, b]).unwrap();
        assert!(matches!(
            find_definite_pencil(&set, &cfg),
            DefiniteSearch::NoneFound { .. }
        ));
        let set = SymMatrixSet::new(vec![Mat::identity(3, 3), e_mat(3), g_mat(3)]).unwrap();
        let w = find_definite_pencil(&set, &cfg);
        assert_eq!(
            w.positive_definite().unwrap().kind,
            PencilKind::PositiveDefinite
        );
    }
}
