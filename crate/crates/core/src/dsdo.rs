//! Projective factorizations `Aᵢ = PᵀDᵢP` with `P` of shape n×m and diagonal
//! n×n `Dᵢ`. The stacked-eigenbasis construction always works at `n = L·m`.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::classify::{check_sd, check_sdo, ClassificationReport, PropertyLabel, Rule};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::matcore::{phi_d, SymMatrixSet};
use crate::verdict::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorMode {
    /// `PᵀP = I_m`.
    Sdo,
    /// `det(PᵀP) = 1`.
    Sd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DsdoFactorization {
    #[serde(with = "crate::io::rows")]
    pub p: Mat,
    #[serde(with = "crate::io::rows_vec")]
    pub d: Vec<Mat>,
    pub mode: FactorMode,
    /// `Σᵢ‖Aᵢ − PᵀDᵢP‖²_F`.
    pub residual: f64,
}

impl DsdoFactorization {
    pub fn n(&self) -> usize {
        self.p.nrows()
    }

    /// Pads with zero rows of `P` and zero diagonal entries up to `n`.
    pub fn padded(&self, n: usize) -> Result<Self> {
        let (rows, m) = self.p.shape();
        if n < rows {
            return Err(Error::Domain(format!("cannot pad from {rows} down to {n}")));
        }
        let mut p = Mat::zeros(n, m);
        p.view_mut((0, 0), (rows, m)).copy_from(&self.p);
        let d = self
            .d
            .iter()
            .map(|x| {
                let mut o = Mat::zeros(n, n);
                o.view_mut((0, 0), (rows, rows)).copy_from(x);
                o
            })
            .collect();
        Ok(DsdoFactorization {
            p,
            d,
            ..self.clone()
        })
    }

    /// `‖PᵀP − I_m‖_F` in SDO mode, `|det(PᵀP) − 1|` in SD mode.
    pub fn feasibility(&self) -> f64 {
        let g = self.p.transpose() * &self.p;
        match self.mode {
            FactorMode::Sdo => (g.clone() - Mat::identity(g.nrows(), g.ncols())).norm(),
            FactorMode::Sd => (g.determinant() - 1.0).abs(),
        }
    }
}

/// Stacks the orthonormal eigenbases of every member: `P = [Q₁; …; Q_L]/√L`,
/// `Dᵢ` holding `L·Xᵢ` in slot i.
pub fn dsdo_construct(set: &SymMatrixSet) -> Result<DsdoFactorization> {
    let (m, l) = (set.dim(), set.len());
    let n = l * m;
    let root = (l as f64).sqrt();
    let mut p = Mat::zeros(n, m);
    let mut d = Vec::with_capacity(l);
    for (i, a) in set.mats().iter().enumerate() {
        let (vals, vecs) = linalg::sym_eigen_sorted(a);
        // A = V X Vᵀ, so Qᵢ = Vᵀ.
        p.view_mut((i * m, 0), (m, m))
            .copy_from(&(vecs.transpose() / root));
        let mut diag = DVector::zeros(n);
        for r in 0..m {
            diag[i * m + r] = l as f64 * vals[r];
        }
        d.push(Mat::from_diagonal(&diag));
    }
    let residual = phi_d(set, &p, &d)?;
    Ok(DsdoFactorization {
        p,
        d,
        mode: FactorMode::Sdo,
        residual,
    })
}

/// `T⁽ⁱⁱ⁾` first, then `T⁽ⁱʲ⁾ = eᵢeⱼᵀ + eⱼeᵢᵀ` for `i < j` in lexicographic order.
pub fn symmetric_basis(m: usize) -> Vec<Mat> {
    let mut out = Vec::with_capacity(m * (m + 1) / 2);
    for i in 0..m {
        let mut t = Mat::zeros(m, m);
        t[(i, i)] = 1.0;
        out.push(t);
    }
    for i in 0..m {
        for j in i + 1..m {
            let mut t = Mat::zeros(m, m);
            t[(i, j)] = 1.0;
            t[(j, i)] = 1.0;
            out.push(t);
        }
    }
    out
}

/// Coordinates of a symmetric matrix in [`symmetric_basis`].
pub fn basis_coefficients(a: &Mat) -> Vec<f64> {
    let m = a.nrows();
    let mut c: Vec<f64> = (0..m).map(|i| a[(i, i)]).collect();
    for i in 0..m {
        for j in i + 1..m {
            c.push(a[(i, j)]);
        }
    }
    c
}

/// One fixed `P` of size `m²(m+1)/2 × m` through which every symmetric m×m
/// matrix factorizes.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisFactorization {
    pub template: DsdoFactorization,
}

pub const MAX_BASIS_DIM: usize = 12;

pub fn dsdo_basis_construct(m: usize) -> Result<BasisFactorization> {
    if m == 0 || m > MAX_BASIS_DIM {
        return Err(Error::Domain(format!(
            "basis construction needs 1 ≤ m ≤ {MAX_BASIS_DIM}"
        )));
    }
    let set = SymMatrixSet::new(symmetric_basis(m))?;
    Ok(BasisFactorization {
        template: dsdo_construct(&set)?,
    })
}

impl BasisFactorization {
    pub fn dim(&self) -> usize {
        self.template.p.ncols()
    }

    /// `Dᵢ = Σ_b c_b(Aᵢ)·D_b` against the fixed template `P`.
    pub fn factorize(&self, set: &SymMatrixSet) -> Result<DsdoFactorization> {
        if set.dim() != self.dim() {
            return Err(Error::Shape(format!(
                "set is {0}×{0}, basis is {1}×{1}",
                set.dim(),
                self.dim()
            )));
        }
        let n = self.template.n();
        let d: Vec<Mat> = set
            .mats()
            .iter()
            .map(|a| {
                basis_coefficients(a)
                    .iter()
                    .zip(&self.template.d)
                    .fold(Mat::zeros(n, n), |acc, (c, db)| acc + db * *c)
            })
            .collect();
        let residual = phi_d(set, &self.template.p, &d)?;
        Ok(DsdoFactorization {
            p: self.template.p.clone(),
            d,
            mode: FactorMode::Sdo,
            residual,
        })
    }
}

/// The n×n set `Uᵀ Dᵢ U` with `U = [P | P⊥]` orthogonal, whose top-left m×m
/// corners are the original matrices. Needs an SDO-mode factorization.
pub fn embed_factorization(f: &DsdoFactorization) -> Result<SymMatrixSet> {
    if f.mode != FactorMode::Sdo {
        return Err(Error::Domain("embedding needs PᵀP = I".into()));
    }
    let u = linalg::complete_orthonormal(&f.p);
    SymMatrixSet::symmetrized(f.d.iter().map(|d| u.transpose() * d * &u).collect())
}

/// Whether the top-left m×m corners of `big` reproduce `set` and `big` is
/// SDO (or SD).
pub fn rho_projection_check(
    big: &SymMatrixSet,
    set: &SymMatrixSet,
    mode: FactorMode,
    cfg: &Config,
) -> Result<Verdict> {
    let (n, m) = (big.dim(), set.dim());
    if n < m || big.len() != set.len() {
        return Err(Error::Shape(format!(
            "need n ≥ m and equal counts, got {n}×{n}×{} against {m}×{m}×{}",
            big.len(),
            set.len()
        )));
    }
    let idx: Vec<usize> = (0..m).collect();
    let corners = big.principal(&idx);
    for (c, a) in corners.mats().iter().zip(set.mats()) {
        if (c - a).amax() > cfg.sym * a.norm().max(1.0) {
            return Ok(Verdict::No);
        }
    }
    let r = match mode {
        FactorMode::Sdo => check_sdo(big, cfg),
        FactorMode::Sd => check_sd(big, cfg),
    };
    Ok(r.verdict)
}

/// Factorization of tensor slices. `slices` must hold `m^{d−2}` matrices so
/// that `n = L·m` reaches `m^{d−1}`.
pub fn joint_slice_factorization(slices: &SymMatrixSet, order: u32) -> Result<DsdoFactorization> {
    let m = slices.dim();
    if order < 3 {
        return Err(Error::Domain("tensor order must be at least 3".into()));
    }
    let need = m
        .checked_pow(order - 1)
        .ok_or_else(|| Error::Domain("dimension overflow".into()))?;
    let n = slices.len() * m;
    if n < need {
        return Err(Error::Domain(format!(
            "n = L·m = {n} is below m^(d−1) = {need}"
        )));
    }
    dsdo_construct(slices)
}

/// Synthetic blind-source-separation slices `P₀ᵀDᵢP₀` with a random
/// orthogonal mixing `P₀` and `m^{d−2}` random diagonal `Dᵢ`.
pub fn bss_slices(m: usize, order: u32, seed: u64) -> Result<(SymMatrixSet, Mat)> {
    if m == 0 || order < 3 {
        return Err(Error::Domain("need m ≥ 1 and order ≥ 3".into()));
    }
    let l = m
        .checked_pow(order - 2)
        .ok_or_else(|| Error::Domain("dimension overflow".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Mat::from_fn(m, m, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut p0 = g.qr().q();
    linalg::make_special(&mut p0);
    let slices = (0..l)
        .map(|_| {
            let d = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
            p0.transpose() * Mat::from_diagonal(&d) * &p0
        })
        .collect();
    Ok((SymMatrixSet::symmetrized(slices)?, p0))
}

fn check_target(set: &SymMatrixSet, n: usize) -> Result<()> {
    if n < set.dim() {
        return Err(Error::Domain(format!(
            "target dimension {n} is below m = {}",
            set.dim()
        )));
    }
    Ok(())
}

/// Constructive factorization at dimension `n` when one is known.
pub fn factorization_at(set: &SymMatrixSet, n: usize) -> Result<Option<DsdoFactorization>> {
    check_target(set, n)?;
    let m = set.dim();
    if n >= set.len() * m {
        return dsdo_construct(set)?.padded(n).map(Some);
    }
    if n >= m * m * (m + 1) / 2 && m <= MAX_BASIS_DIM {
        return dsdo_basis_construct(m)?.factorize(set)?.padded(n).map(Some);
    }
    Ok(None)
}

pub fn check_d_sdo(set: &SymMatrixSet, n: usize, cfg: &Config) -> Result<ClassificationReport> {
    let label = PropertyLabel::DSdo(n);
    if let Some(f) = factorization_at(set, n)? {
        return Ok(ClassificationReport::projective(
            label,
            Verdict::Yes,
            Rule::ProjectiveEmbedding,
        )
        .with_note(format!(
            "stacked-eigenbasis factorization, residual {:e}",
            f.residual
        )));
    }
    let sdo = check_sdo(set, cfg);
    if n == set.dim() || sdo.verdict.is_yes() {
        return Ok(sdo.relabel(label, Rule::DimensionCollapse));
    }
    Ok(
        ClassificationReport::projective(label, Verdict::Unknown, Rule::NoRuleFired)
            .with_note("n is below both constructive bounds and the set is not SDO"),
    )
}

pub fn check_d_sd(set: &SymMatrixSet, n: usize, cfg: &Config) -> Result<ClassificationReport> {
    let label = PropertyLabel::DSd(n);
    let sdo = check_d_sdo(set, n, cfg)?;
    if sdo.verdict.is_yes() {
        return Ok(sdo
            .relabel(label, Rule::ProjectiveEmbedding)
            .with_note("PᵀP = I lies in SL_m"));
    }
    let sd = check_sd(set, cfg);
    if n == set.dim() || sd.verdict.is_yes() {
        return Ok(sd.relabel(label, Rule::DimensionCollapse));
    }
    Ok(
        ClassificationReport::projective(label, Verdict::Unknown, Rule::NoRuleFired)
            .with_note("n is below both constructive bounds and the set is not SD"),
    )
}
