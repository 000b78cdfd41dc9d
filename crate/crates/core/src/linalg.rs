//! Small dense helpers on top of nalgebra.

use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen, SVD};

pub type Mat = DMatrix<f64>;
pub type Complex64 = nalgebra::Complex<f64>;

pub fn fro(a: &Mat) -> f64 {
    a.norm()
}

pub fn offdiag(a: &Mat) -> Mat {
    let mut o = a.clone();
    for i in 0..a.nrows().min(a.ncols()) {
        o[(i, i)] = 0.0;
    }
    o
}

pub fn offdiag_norm(a: &Mat) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

pub fn diag_norm(a: &Mat) -> f64 {
    a.diagonal().norm()
}

pub fn max_abs(a: &Mat) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub fn asymmetry(a: &Mat) -> f64 {
    let mut w = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..i {
            w = w.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    w
}

/// `(A + Aᵀ)/2`, leaving equal mirror entries untouched so huge values do not overflow.
pub fn symmetrize(a: &Mat) -> Mat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| {
        let (x, y) = (a[(i, j)], a[(j, i)]);
        if x == y { x } else { x * 0.5 + y * 0.5 }
    })
}

pub fn block_diag(blocks: &[Mat]) -> Mat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = Mat::zeros(n, n);
    let mut o = 0;
    for b in blocks {
        out.view_mut((o, o), (b.nrows(), b.ncols())).copy_from(b);
        o += b.nrows();
    }
    out
}

pub fn spectral_norm(a: &Mat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    SVD::new(a.clone(), false, false).singular_values.max()
}

/// Reciprocal 2-norm condition number; 0 for a singular or empty matrix.
pub fn rcond(a: &Mat) -> f64 {
    if a.is_empty() {
        return 1.0;
    }
    let s = SVD::new(a.clone(), false, false).singular_values;
    let (hi, lo) = (s.max(), s.min());
    if hi == 0.0 {
        0.0
    } else {
        lo / hi
    }
}

/// Symmetric eigendecomposition with eigenvalues sorted descending and each
/// eigenvector's largest-magnitude entry made positive. Returns `(λ, V)` with
/// `A = V diag(λ) Vᵀ`.
pub fn sym_eigen_sorted(a: &Mat) -> (DVector<f64>, Mat) {
    let n = a.nrows();
    let eig = SymmetricEigen::new(symmetrize(a));
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let mut vals = DVector::zeros(n);
    let mut vecs = Mat::zeros(n, n);
    for (c, &i) in idx.iter().enumerate() {
        vals[c] = eig.eigenvalues[i];
        let mut v = eig.eigenvectors.column(i).clone_owned();
        let mut big = 0usize;
        for r in 0..n {
            if v[r].abs() > v[big].abs() + 1e-14 {
                big = r;
            }
        }
        if v[big] < 0.0 {
            v = -v;
        }
        vecs.set_column(c, &v);
    }
    (vals, vecs)
}

/// Sign-fixes columns so each column's first entry above `eps` is positive.
pub fn fix_first_nonzero_positive(v: &mut Mat, eps: f64) {
    for c in 0..v.ncols() {
        let first = v.column(c).iter().copied().find(|x| x.abs() > eps);
        if let Some(x) = first {
            if x < 0.0 {
                let neg = -v.column(c).clone_owned();
                v.set_column(c, &neg);
            }
        }
    }
}

/// Flips the last column if needed so that `det(Q) > 0`.
pub fn make_special(q: &mut Mat) {
    if q.ncols() > 0 && q.determinant() < 0.0 {
        let c = q.ncols() - 1;
        let neg = -q.column(c).clone_owned();
        q.set_column(c, &neg);
    }
}

/// Symmetric square root inverse `A^{-1/2}` of a positive definite matrix.
pub fn inv_sqrt_spd(a: &Mat) -> Option<Mat> {
    let (vals, vecs) = sym_eigen_sorted(a);
    if vals.iter().any(|&l| l <= 0.0) {
        return None;
    }
    let d = DMatrix::from_diagonal(&vals.map(|l| 1.0 / l.sqrt()));
    Some(&vecs * d * vecs.transpose())
}

/// Orthonormal basis of the null space of `a`, using singular values at or
/// below `tol` (absolute). Works for real and complex element types.
pub fn null_space<T>(a: &DMatrix<T>, tol: f64) -> DMatrix<T>
where
    T: ComplexField<RealField = f64>,
{
    let n = a.ncols();
    let padded;
    let src = if a.nrows() < n {
        let mut p = DMatrix::<T>::zeros(n, n);
        p.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        padded = p;
        &padded
    } else {
        a
    };
    let svd = SVD::new(src.clone(), false, true);
    let vt = svd.v_t.expect("v_t requested");
    let cols: Vec<usize> = (0..n).filter(|&i| svd.singular_values[i] <= tol).collect();
    let v = vt.adjoint();
    let mut out = DMatrix::<T>::zeros(n, cols.len());
    for (c, &i) in cols.iter().enumerate() {
        out.set_column(c, &v.column(i));
    }
    out
}

/// Singular values sorted ascending.
pub fn singular_values_asc<T>(a: &DMatrix<T>) -> Vec<f64>
where
    T: ComplexField<RealField = f64>,
{
    let mut s: Vec<f64> = SVD::new(a.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(f64::total_cmp);
    s
}

/// Extends the orthonormal columns of `p` (n×m) to an orthogonal n×n matrix
/// whose first m columns are `p`.
pub fn complete_orthonormal(p: &Mat) -> Mat {
    let (n, m) = p.shape();
    let proj = Mat::identity(n, n) - p * p.transpose();
    let (vals, vecs) = sym_eigen_sorted(&proj);
    let mut q = Mat::zeros(n, n);
    q.view_mut((0, 0), (n, m)).copy_from(p);
    for c in 0..(n - m) {
        debug_assert!(vals[c] > 0.5);
        q.set_column(m + c, &vecs.column(c));
    }
    q
}

/// Inertia (positive, negative, zero counts) of a symmetric matrix.
pub fn inertia(a: &Mat, tol: f64) -> (usize, usize, usize) {
    let eig = SymmetricEigen::new(symmetrize(a));
    let scale = eig.eigenvalues.amax().max(f64::MIN_POSITIVE);
    let mut out = (0, 0, 0);
    for &l in eig.eigenvalues.iter() {
        if l > tol * scale {
            out.0 += 1;
        } else if l < -tol * scale {
            out.1 += 1;
        } else {
            out.2 += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn completion_is_orthogonal() {
        let p = Mat::from_column_slice(3, 1, &[1.0, 1.0, 0.0]) / 2f64.sqrt();
        let q = complete_orthonormal(&p);
        assert!((q.transpose() * &q - Mat::identity(3, 3)).norm() < 1e-12);
        assert!((q.column(0) - p.column(0)).norm() < 1e-15);
    }

    #[test]
    fn null_space_of_rank_one() {
        let a = Mat::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let k = null_space(&a, 1e-12);
        assert_eq!(k.ncols(), 1);
        assert!((&a * &k).norm() < 1e-12);
    }

    #[test]
    fn sorted_eigen_reconstructs() {
        let a = Mat::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let (l, v) = sym_eigen_sorted(&a);
        assert!(l[0] >= l[1]);
        let r = &v * Mat::from_diagonal(&l) * v.transpose();
        assert!((r - a).norm() < 1e-12);
    }
}
