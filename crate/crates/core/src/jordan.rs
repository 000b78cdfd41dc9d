//! Real Jordan normal form by eigenvalue clustering and kernel-staircase
//! (Weyr) analysis, plus the spectral predicates built on it.
//!
//! Eigenvalues of a defective block of size `a` split by roughly `ε^{1/a}`
//! under rounding, so clusters are formed by single linkage with a radius
//! that grows with the cluster size and are then accepted only if the
//! kernel sequence of `M − λI` at the cluster mean has total dimension equal
//! to the cluster size. Rejected clusters are split along the dendrogram.

use crate::linalg::Complex64;
use nalgebra::{ComplexField, DMatrix, DVector, Schur, SVD};
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::matcore::{jordan_complex, jordan_real, Eigenvalue};
use crate::verdict::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JordanBlockSpec {
    pub eigenvalue: Eigenvalue,
    /// Number of chain vectors; a complex block spans `2·size` dimensions.
    pub size: usize,
}

impl JordanBlockSpec {
    pub fn real(lambda: f64, size: usize) -> Self {
        JordanBlockSpec {
            eigenvalue: Eigenvalue::Real(lambda),
            size,
        }
    }

    pub fn complex(re: f64, im: f64, size: usize) -> Self {
        JordanBlockSpec {
            eigenvalue: Eigenvalue::Complex { re, im: im.abs() },
            size,
        }
    }

    pub fn dim(&self) -> usize {
        match self.eigenvalue {
            Eigenvalue::Real(_) => self.size,
            Eigenvalue::Complex { .. } => 2 * self.size,
        }
    }

    pub fn matrix(&self) -> Mat {
        match self.eigenvalue {
            Eigenvalue::Real(l) => jordan_real(l, self.size),
            Eigenvalue::Complex { re, im } => jordan_complex(re, im, self.size),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealJordanForm {
    pub blocks: Vec<JordanBlockSpec>,
    /// `T` with `T⁻¹MT = J`.
    #[serde(with = "crate::io::rows")]
    pub transform: Mat,
    pub residual: f64,
}

impl RealJordanForm {
    pub fn jordan_matrix(&self) -> Mat {
        linalg::block_diag(&self.blocks.iter().map(|b| b.matrix()).collect::<Vec<_>>())
    }

    /// All blocks real and of size one.
    pub fn is_real_diagonal(&self) -> bool {
        self.blocks
            .iter()
            .all(|b| b.eigenvalue.is_real() && b.size == 1)
    }

    /// No two blocks share both eigenvalue and size.
    pub fn has_distinct_blocks(&self, tol: f64) -> bool {
        for (i, a) in self.blocks.iter().enumerate() {
            for b in &self.blocks[..i] {
                if a.size == b.size && same_eigenvalue(&a.eigenvalue, &b.eigenvalue, tol) {
                    return false;
                }
            }
        }
        true
    }
}

fn same_eigenvalue(a: &Eigenvalue, b: &Eigenvalue, tol: f64) -> bool {
    match (a, b) {
        (Eigenvalue::Real(x), Eigenvalue::Real(y)) => (x - y).abs() <= tol,
        (Eigenvalue::Complex { re: a1, im: b1 }, Eigenvalue::Complex { re: a2, im: b2 }) => {
            (a1 - a2).abs() <= tol && (b1 - b2).abs() <= tol
        }
        _ => false,
    }
}

/// Generalized eigenvector chains of one eigenvalue, in the unnormalized
/// coordinates of `M`. Chain `c` is `[N^{s−1}v, …, Nv, v]` with `N = M − λI`.
#[derive(Clone, Debug)]
pub(crate) struct RootSpace<T: ComplexField<RealField = f64> + Copy> {
    pub lambda: T,
    pub sizes: Vec<usize>,
    pub tops: Vec<DVector<T>>,
    pub shift: DMatrix<T>,
}

impl<T: ComplexField<RealField = f64> + Copy> RootSpace<T> {
    pub fn chain(&self, c: usize) -> Vec<DVector<T>> {
        chain_from(&self.shift, &self.tops[c], self.sizes[c])
    }
}

pub(crate) fn chain_from<T: ComplexField<RealField = f64> + Copy>(
    n: &DMatrix<T>,
    top: &DVector<T>,
    s: usize,
) -> Vec<DVector<T>> {
    let mut out = vec![top.clone(); s];
    for i in (0..s.saturating_sub(1)).rev() {
        out[i] = n * &out[i + 1];
    }
    out
}

#[derive(Clone, Debug)]
pub(crate) enum Root {
    Real(RootSpace<f64>),
    Complex(RootSpace<Complex64>),
}

impl Root {
    fn specs(&self) -> Vec<JordanBlockSpec> {
        match self {
            Root::Real(r) => r
                .sizes
                .iter()
                .map(|&s| JordanBlockSpec::real(r.lambda, s))
                .collect(),
            Root::Complex(r) => r
                .sizes
                .iter()
                .map(|&s| JordanBlockSpec::complex(r.lambda.re, r.lambda.im, s))
                .collect(),
        }
    }

    fn sort_key(&self) -> (u8, f64, f64) {
        match self {
            Root::Real(r) => (0, r.lambda, 0.0),
            Root::Complex(r) => (1, r.lambda.re, r.lambda.im),
        }
    }
}

/// Radius within which `a` clustered eigenvalues of a unit-norm matrix are
/// treated as one, allowing for the `ε^{1/a}` splitting of a defective block.
fn cluster_radius(a: usize, cfg: &Config) -> f64 {
    if a <= 1 {
        cfg.eig
    } else {
        cfg.eig.max(10.0 * 1e-13f64.powf(1.0 / a as f64))
    }
}

/// The unshifted-deflation QR iteration occasionally stalls. A fixed
/// Householder similarity or a looser deflation threshold gets past it
/// without changing the spectrum.
fn schur_with_retries(m: &Mat) -> Option<Schur<f64, nalgebra::Dyn>> {
    if let Some(s) = Schur::try_new(m.clone(), f64::EPSILON, 10_000) {
        return Some(s);
    }
    let n = m.nrows();
    let v = DVector::from_fn(n, |i, _| (i + 1) as f64).normalize();
    let h = Mat::identity(n, n) - &v * v.transpose() * 2.0;
    let moved = &h * m * &h;
    Schur::try_new(moved.clone(), f64::EPSILON, 10_000)
        .or_else(|| Schur::try_new(moved, 64.0 * f64::EPSILON, 100_000))
}

pub(crate) fn eigenvalues(m: &Mat) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(vec![]);
    }
    let schur = schur_with_retries(m).ok_or_else(|| Error::JordanUnreliable {
        reason: "Schur iteration did not converge".into(),
        partial: vec![],
    })?;
    // Read the quasi-triangular factor directly: the library's own 2×2
    // formula can return NaN for a nearly zero discriminant.
    let (_, t) = schur.unpack();
    let n = t.nrows();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        let coupled = i + 1 < n
            && t[(i + 1, i)].abs() > f64::EPSILON * (t[(i, i)].abs() + t[(i + 1, i + 1)].abs());
        if !coupled {
            out.push(Complex64::new(t[(i, i)], 0.0));
            i += 1;
            continue;
        }
        let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
        let mid = 0.5 * (a + d);
        let half = 0.5 * (a - d);
        let disc = half * half + b * c;
        if disc >= 0.0 {
            let r = disc.sqrt();
            out.extend([Complex64::new(mid + r, 0.0), Complex64::new(mid - r, 0.0)]);
        } else {
            let r = (-disc).sqrt();
            out.extend([Complex64::new(mid, r), Complex64::new(mid, -r)]);
        }
        i += 2;
    }
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::JordanUnreliable {
            reason: "non-finite eigenvalue".into(),
            partial: vec![],
        });
    }
    Ok(out)
}

#[derive(Debug)]
struct Node {
    members: Vec<usize>,
    height: f64,
    children: Option<(usize, usize)>,
}

/// Single-linkage dendrogram over points of the complex plane. Returns the
/// nodes and the index of the root.
fn dendrogram(pts: &[Complex64]) -> (Vec<Node>, usize) {
    let n = pts.len();
    let mut nodes: Vec<Node> = (0..n)
        .map(|i| Node {
            members: vec![i],
            height: 0.0,
            children: None,
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..i {
            edges.push(((pts[i] - pts[j]).norm(), i, j));
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut owner: Vec<usize> = (0..n).collect();
    for (d, i, j) in edges {
        let (a, b) = (owner[i], owner[j]);
        if a == b {
            continue;
        }
        let mut members = nodes[a].members.clone();
        members.extend_from_slice(&nodes[b].members);
        let id = nodes.len();
        for &k in &members {
            owner[k] = id;
        }
        nodes.push(Node {
            members,
            height: d,
            children: Some((a, b)),
        });
    }
    let root = nodes.len() - 1;
    (nodes, root)
}

fn mean(pts: &[Complex64], idx: &[usize]) -> Complex64 {
    idx.iter().map(|&i| pts[i]).sum::<Complex64>() / idx.len() as f64
}

/// Clusters accepted by radius alone (no kernel verification): the
/// predicates use these.
fn radius_clusters(pts: &[Complex64], cfg: &Config) -> Vec<(Complex64, usize)> {
    if pts.is_empty() {
        return vec![];
    }
    let (nodes, root) = dendrogram(pts);
    let mut out = Vec::new();
    let mut stack = vec![root];
    while let Some(id) = stack.pop() {
        let nd = &nodes[id];
        match nd.children {
            Some((a, b)) if nd.height > cluster_radius(nd.members.len(), cfg) => {
                stack.push(a);
                stack.push(b);
            }
            _ => out.push((mean(pts, &nd.members), nd.members.len())),
        }
    }
    out
}

/// Orthonormal bases of `ker N, ker N², …` until the dimension stops
/// growing, computed as `ker N^j = ker((I − Π_{j−1})N)` so that only single
/// applications of `N` enter the rank decisions. `None` if the sequence is not
/// a valid Weyr sequence ending at dimension `a`.
fn kernel_staircase<T>(n: &DMatrix<T>, a: usize, tol: f64) -> Option<Vec<DMatrix<T>>>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let m = n.nrows();
    let mut ks: Vec<DMatrix<T>> = Vec::new();
    let mut prev_w = usize::MAX;
    loop {
        let prev_dim = ks.last().map_or(0, |k| k.ncols());
        let proj = match ks.last() {
            Some(k) => n - k * (k.adjoint() * n),
            None => n.clone(),
        };
        let k = linalg::null_space(&proj, tol);
        let w = k.ncols().saturating_sub(prev_dim);
        if w == 0 {
            break;
        }
        if k.ncols() > a || w > prev_w || k.ncols() > m {
            return None;
        }
        prev_w = w;
        let full = k.ncols() == a;
        ks.push(k);
        if full {
            break;
        }
    }
    (ks.last().map_or(0, |k| k.ncols()) == a).then_some(ks)
}

/// Block sizes, descending, from the kernel dimensions.
fn segre(ks: &[DMatrix<impl ComplexField>]) -> Vec<usize> {
    let dims: Vec<usize> = std::iter::once(0)
        .chain(ks.iter().map(|k| k.ncols()))
        .collect();
    let w: Vec<usize> = dims.windows(2).map(|p| p[1] - p[0]).collect();
    let mut sizes = Vec::new();
    for j in (0..w.len()).rev() {
        let next = w.get(j + 1).copied().unwrap_or(0);
        for _ in 0..(w[j] - next) {
            sizes.push(j + 1);
        }
    }
    sizes
}

fn orth_basis<T: ComplexField<RealField = f64> + Copy>(x: &DMatrix<T>) -> DMatrix<T> {
    if x.ncols() == 0 {
        return x.clone();
    }
    let svd = SVD::new(x.clone(), true, false);
    let u = svd.u.expect("u requested");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-10 * smax)
        .collect();
    DMatrix::from_columns(&keep.iter().map(|&i| u.column(i)).collect::<Vec<_>>())
}

/// Chain tops for the given kernel staircase, longest chains first.
fn chain_tops<T>(nhat: &DMatrix<T>, ks: &[DMatrix<T>], sizes: &[usize]) -> Option<Vec<DVector<T>>>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let m = nhat.nrows();
    let mut tops: Vec<(usize, DVector<T>)> = Vec::new();
    let p = ks.len();
    for j in (1..=p).rev() {
        let cj = sizes.iter().filter(|&&s| s == j).count();
        if cj == 0 {
            continue;
        }
        let mut cols: Vec<DVector<T>> = Vec::new();
        if j >= 2 {
            cols.extend(ks[j - 2].column_iter().map(|c| c.clone_owned()));
        }
        for (s, v) in &tops {
            let mut w = v.clone();
            for _ in 0..(s - j) {
                w = nhat * w;
            }
            cols.push(w);
        }
        let kj = &ks[j - 1];
        let z = if cols.is_empty() {
            kj.clone()
        } else {
            let x = DMatrix::from_columns(&cols);
            let q = orth_basis(&x);
            if q.ncols() != cols.len() {
                return None;
            }
            kj - &q * (q.adjoint() * kj)
        };
        let svd = SVD::new(z, false, true);
        let vt = svd.v_t.expect("v_t requested");
        if svd.singular_values.len() < cj || svd.singular_values[cj - 1] < 1e-6 {
            return None;
        }
        let v = vt.adjoint();
        for c in 0..cj {
            let y = v.column(c).clone_owned();
            let top = kj * y;
            let nrm = top.norm();
            tops.push((j, top.unscale(nrm)));
        }
        debug_assert_eq!(tops.last().map(|t| t.1.len()), Some(m));
    }
    Some(tops.into_iter().map(|(_, v)| v).collect())
}

fn analyze<T>(
    mhat: &DMatrix<T>,
    m: &DMatrix<T>,
    lambda_hat: T,
    scale: f64,
    a: usize,
    cfg: &Config,
) -> Option<RootSpace<T>>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let dim = mhat.nrows();
    let nhat = mhat - DMatrix::<T>::identity(dim, dim) * lambda_hat;
    let ks = kernel_staircase(&nhat, a, cfg.rank)?;
    let sizes = segre(&ks);
    let tops = chain_tops(&nhat, &ks, &sizes)?;
    let lambda = lambda_hat * T::from_real(scale);
    Some(RootSpace {
        lambda,
        sizes,
        tops,
        shift: m - DMatrix::<T>::identity(dim, dim) * lambda,
    })
}

fn to_complex(m: &Mat) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Root subspaces with their chains, sorted canonically. Complex pairs are
/// represented once, by the eigenvalue with positive imaginary part.
pub(crate) fn root_spaces(m: &Mat, cfg: &Config) -> Result<Vec<Root>> {
    let dim = m.nrows();
    let scale = m.norm();
    if scale == 0.0 {
        let tops = (0..dim).map(|i| DVector::from_fn(dim, |r, _| if r == i { 1.0 } else { 0.0 }));
        return Ok(if dim == 0 {
            vec![]
        } else {
            vec![Root::Real(RootSpace {
                lambda: 0.0,
                sizes: vec![1; dim],
                tops: tops.collect(),
                shift: Mat::zeros(dim, dim),
            })]
        });
    }
    let mhat = m / scale;
    let pts = eigenvalues(&mhat)?;
    let (nodes, root) = dendrogram(&pts);
    let mhat_c = to_complex(&mhat);
    let m_c = to_complex(m);
    let mut roots: Vec<Root> = Vec::new();
    let mut conj_needed: Vec<(Complex64, usize)> = Vec::new();
    let mut conj_seen: Vec<(Complex64, usize)> = Vec::new();
    let mut stack = vec![root];
    while let Some(id) = stack.pop() {
        let nd = &nodes[id];
        let a = nd.members.len();
        let c = mean(&pts, &nd.members);
        let within = nd.height <= cluster_radius(a, cfg);
        // Some(Some(root)) accepted, Some(None) accepted lower-half-plane
        // partner of a complex cluster, None rejected.
        let attempt: Option<Option<Root>> = if !within && nd.children.is_some() {
            None
        } else if c.im.abs() <= cfg.eig.max(nd.height) {
            analyze(&mhat, m, c.re, scale, a, cfg).map(|r| Some(Root::Real(r)))
        } else if c.im > 0.0 {
            analyze(&mhat_c, &m_c, c, scale, a, cfg).map(|r| {
                conj_needed.push((c, a));
                Some(Root::Complex(r))
            })
        } else {
            let nh = &mhat_c - DMatrix::<Complex64>::identity(dim, dim) * c;
            kernel_staircase(&nh, a, cfg.rank).map(|_| {
                conj_seen.push((c, a));
                None
            })
        };
        match (attempt, nd.children) {
            (Some(r), _) => roots.extend(r),
            (None, Some((x, y))) => {
                stack.push(x);
                stack.push(y);
            }
            (None, None) => {
                let partial = roots.iter().flat_map(|r| r.specs()).collect();
                return Err(Error::JordanUnreliable {
                    reason: format!("no kernel found at eigenvalue {c}"),
                    partial,
                });
            }
        }
    }
    let pair_ok = conj_needed.len() == conj_seen.len()
        && conj_needed.iter().all(|(c, a)| {
            conj_seen
                .iter()
                .any(|(d, b)| a == b && (c.conj() - d).norm() <= 2.0 * cluster_radius(*a, cfg))
        });
    if !pair_ok {
        return Err(Error::JordanUnreliable {
            reason: "complex eigenvalue clusters are not conjugate-paired".into(),
            partial: roots.iter().flat_map(|r| r.specs()).collect(),
        });
    }
    roots.sort_by(|a, b| {
        let (x, y) = (a.sort_key(), b.sort_key());
        x.0.cmp(&y.0)
            .then(x.1.total_cmp(&y.1))
            .then(x.2.total_cmp(&y.2))
    });
    Ok(roots)
}

/// Real Jordan normal form `T⁻¹MT = J`.
pub fn real_jordan_form(m: &Mat, cfg: &Config) -> Result<RealJordanForm> {
    if !m.is_square() {
        return Err(Error::Shape(
            "real_jordan_form needs a square matrix".into(),
        ));
    }
    let dim = m.nrows();
    let roots = root_spaces(m, cfg)?;
    let mut blocks = Vec::new();
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for r in &roots {
        match r {
            Root::Real(rs) => {
                for c in 0..rs.sizes.len() {
                    blocks.push(JordanBlockSpec::real(rs.lambda, rs.sizes[c]));
                    cols.extend(rs.chain(c));
                }
            }
            Root::Complex(rs) => {
                for c in 0..rs.sizes.len() {
                    blocks.push(JordanBlockSpec::complex(
                        rs.lambda.re,
                        rs.lambda.im,
                        rs.sizes[c],
                    ));
                    for w in rs.chain(c) {
                        cols.push(w.map(|z| z.re));
                        cols.push(w.map(|z| -z.im));
                    }
                }
            }
        }
    }
    let partial = blocks.clone();
    if cols.len() != dim {
        return Err(Error::JordanUnreliable {
            reason: format!("chains span {} of {dim} dimensions", cols.len()),
            partial,
        });
    }
    let t = if dim == 0 {
        Mat::zeros(0, 0)
    } else {
        Mat::from_columns(&cols)
    };
    let mut eq = t.clone();
    for mut c in eq.column_iter_mut() {
        let n = c.norm();
        if n > 0.0 {
            c /= n;
        }
    }
    if linalg::rcond(&eq) < cfg.rank {
        return Err(Error::JordanUnreliable {
            reason: "generalized eigenvector chains are nearly dependent".into(),
            partial,
        });
    }
    let form = RealJordanForm {
        blocks,
        transform: t,
        residual: 0.0,
    };
    let j = form.jordan_matrix();
    let tinv_mt = form
        .transform
        .clone()
        .lu()
        .solve(&(m * &form.transform))
        .ok_or_else(|| Error::JordanUnreliable {
            reason: "transform is singular".into(),
            partial: partial.clone(),
        })?;
    let residual = if m.norm() == 0.0 {
        0.0
    } else {
        (tinv_mt - j).norm() / m.norm()
    };
    if residual > cfg.jordan {
        return Err(Error::JordanUnreliable {
            reason: format!("reconstruction residual {residual:e}"),
            partial,
        });
    }
    Ok(RealJordanForm { residual, ..form })
}

/// Clustered eigenvalues (mean of each cluster) with multiplicities.
pub fn clustered_eigenvalues(m: &Mat, cfg: &Config) -> Result<Vec<(Complex64, usize)>> {
    let s = m.norm();
    if s == 0.0 {
        return Ok(if m.nrows() == 0 {
            vec![]
        } else {
            vec![(Complex64::new(0.0, 0.0), m.nrows())]
        });
    }
    let pts = eigenvalues(&(m / s))?;
    Ok(radius_clusters(&pts, cfg)
        .into_iter()
        .map(|(c, a)| (c * s, a))
        .collect())
}

/// Whether every eigenvalue is real, after clustering. Imaginary parts are
/// compared against `τ_eig·‖M‖_F`.
pub fn has_only_real_eigenvalues(m: &Mat, cfg: &Config) -> Verdict {
    let s = m.norm();
    if s == 0.0 {
        return Verdict::Yes;
    }
    let Ok(pts) = eigenvalues(&(m / s)) else {
        return Verdict::Unknown;
    };
    let worst = radius_clusters(&pts, cfg)
        .iter()
        .map(|(c, _)| c.im.abs())
        .fold(0.0, f64::max);
    if worst <= cfg.eig {
        Verdict::Yes
    } else if worst > 2.0 * cfg.eig {
        Verdict::No
    } else {
        Verdict::Unknown
    }
}

/// Nilpotency by two independent checks (clustered spectrum at zero, and a
/// vanishing `m`-th power); disagreement gives `Unknown`.
pub fn is_nilpotent(m: &Mat, cfg: &Config) -> Verdict {
    let s = m.norm();
    let dim = m.nrows();
    if s == 0.0 || dim == 0 {
        return Verdict::Yes;
    }
    let mhat = m / s;
    let Ok(pts) = eigenvalues(&mhat) else {
        return Verdict::Unknown;
    };
    let all: Vec<usize> = (0..dim).collect();
    let spread = pts.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let spectral = spread <= cluster_radius(dim, cfg) && mean(&pts, &all).norm() <= cfg.eig;
    let mut pow = mhat.clone();
    for _ in 1..dim {
        pow = &pow * &mhat;
    }
    let power = pow.norm() <= 1e-8;
    match (spectral, power) {
        (true, true) => Verdict::Yes,
        (false, false) => Verdict::No,
        _ => Verdict::Unknown,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(r: usize, v: &[f64]) -> Mat {
        Mat::from_row_slice(r, r, v)
    }

    #[test]
    fn identity_is_three_unit_blocks() {
        let f = real_jordan_form(&Mat::identity(3, 3), &Config::default()).unwrap();
        assert_eq!(f.blocks, vec![JordanBlockSpec::real(1.0, 1); 3]);
        assert!((f.transform.clone() - Mat::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn nilpotent_two_block() {
        let f = real_jordan_form(&m(2, &[0., 0., 1., 0.]), &Config::default()).unwrap();
        assert_eq!(f.blocks, vec![JordanBlockSpec::real(0.0, 2)]);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn rotation_is_one_complex_cell() {
        let f = real_jordan_form(&m(2, &[0., -1., 1., 0.]), &Config::default()).unwrap();
        assert_eq!(f.blocks.len(), 1);
        assert_eq!(f.blocks[0].size, 1);
        match f.blocks[0].eigenvalue {
            Eigenvalue::Complex { re, im } => {
                assert!(re.abs() < 1e-12 && (im - 1.0).abs() < 1e-12)
            }
            _ => panic!("expected complex"),
        }
    }

    #[test]
    fn predicates() {
        let cfg = Config::default();
        assert_eq!(
            has_only_real_eigenvalues(&m(2, &[0., 0., 1., 0.]), &cfg),
            Verdict::Yes
        );
        // A⁻¹B of the 3×3 pair with eigenvalues 1 and ±i.
        let a = m(3, &[1., 0., 0., 0., 0., 1., 0., 1., 0.]);
        let b = m(3, &[1., 0., 0., 0., 1., 0., 0., 0., -1.]);
        let aib = a.clone().lu().solve(&b).unwrap();
        assert_eq!(has_only_real_eigenvalues(&aib, &cfg), Verdict::No);
        assert_eq!(is_nilpotent(&m(2, &[0., 1., 0., 0.]), &cfg), Verdict::Yes);
        assert_eq!(is_nilpotent(&Mat::identity(2, 2), &cfg), Verdict::No);
    }
}
