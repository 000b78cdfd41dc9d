//! Brute-force reference minimizers for small QCQPs. They share nothing
//! with the canonical-form solver and are meant for cross-checks only.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{QcqpInstance, SingleConstraintProblem};
use crate::error::{Error, Result};

/// Largest dimension accepted by the oracles.
pub const MAX_ORACLE_DIM: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleBudget {
    pub samples: usize,
    pub refine: usize,
    pub iterations: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            samples: 4000,
            refine: 8,
            iterations: 600,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Best value found within the larger radius cap.
    pub value: f64,
    pub point: Option<Vec<f64>>,
    /// Value at the smaller cap; divergence between the two flags
    /// unboundedness.
    pub value_small_cap: f64,
    pub suspected_unbounded: bool,
    pub feasible_found: bool,
}

pub const CAPS: [f64; 2] = [1e2, 1e4];

fn quad(m: &crate::Mat, x: &DVector<f64>) -> f64 {
    x.dot(&(m * x))
}

/// Nelder–Mead on `f` from `x0` with initial step `h`.
fn nelder_mead(f: &dyn Fn(&DVector<f64>) -> f64, x0: DVector<f64>, h: f64, iters: usize) -> (DVector<f64>, f64) {
    let n = x0.len();
    let mut pts: Vec<(DVector<f64>, f64)> = (0..=n)
        .map(|i| {
            let mut p = x0.clone();
            if i > 0 {
                p[i - 1] += h;
            }
            let v = f(&p);
            (p, v)
        })
        .collect();
    for _ in 0..iters {
        pts.sort_by(|a, b| a.1.total_cmp(&b.1));
        let c = pts[..n].iter().fold(DVector::zeros(n), |acc, p| acc + &p.0) / n as f64;
        let worst = pts[n].clone();
        let xr = &c + (&c - &worst.0);
        let fr = f(&xr);
        if fr < pts[0].1 {
            let xe = &c + (&xr - &c) * 2.0;
            let fe = f(&xe);
            pts[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < pts[n - 1].1 {
            pts[n] = (xr, fr);
        } else {
            let xc = &c + (&worst.0 - &c) * 0.5;
            let fc = f(&xc);
            if fc < worst.1 {
                pts[n] = (xc, fc);
            } else {
                let best = pts[0].0.clone();
                for p in pts.iter_mut().skip(1) {
                    p.0 = &best + (&p.0 - &best) * 0.5;
                    p.1 = f(&p.0);
                }
            }
        }
    }
    pts.into_iter().min_by(|a, b| a.1.total_cmp(&b.1)).expect("non-empty simplex")
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// Exact minimum of `t²·q_B` over `t ≥ 0` with `t²·q_A ≤ b` and `t ≤ R`
/// along the unit ray `d`. Returns the value and the optimal `t²`.
fn ray_min(qa: f64, qb: f64, b: f64, cap: f64) -> Option<(f64, f64)> {
    let r2 = cap * cap;
    let (lo, hi) = if b >= 0.0 {
        (0.0, if qa > 0.0 { (b / qa).min(r2) } else { r2 })
    } else if qa < 0.0 && b / qa <= r2 {
        (b / qa, r2)
    } else {
        return None;
    };
    let s = if qb >= 0.0 { lo } else { hi };
    Some((s * qb, s))
}

fn single_at_cap(p: &SingleConstraintProblem, cap: f64, budget: &OracleBudget, seed: u64) -> Option<(f64, Vec<f64>)> {
    let m = p.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ray = |d: &DVector<f64>| -> Option<(f64, f64)> {
        let n = d.norm();
        if n < 1e-12 {
            return None;
        }
        let u = d / n;
        ray_min(quad(&p.constraint, &u), quad(&p.objective, &u), p.rhs, cap)
    };
    let f = |d: &DVector<f64>| ray(d).map_or(f64::INFINITY, |v| v.0);
    // With b ≥ 0 every ray with q_B ≥ 0 has value 0. Adding q_B there keeps
    // the negative region unchanged and gives the search a slope toward it.
    let g = |d: &DVector<f64>| {
        let v = f(d);
        if v < 0.0 || !v.is_finite() || p.rhs < 0.0 {
            return v;
        }
        v + quad(&p.objective, &(d / d.norm())).max(0.0)
    };
    let mut cands: Vec<(f64, DVector<f64>)> = (0..budget.samples)
        .map(|_| {
            let d = gaussian(&mut rng, m);
            (g(&d), d)
        })
        .collect();
    cands.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best: Option<(f64, DVector<f64>)> = None;
    for (v, d) in cands.into_iter().take(budget.refine) {
        if !v.is_finite() {
            break;
        }
        let d = d.normalize();
        let (x, _) = nelder_mead(&g, d, 0.1, budget.iterations);
        let fx = f(&x);
        if best.as_ref().is_none_or(|b| fx < b.0) {
            best = Some((fx, x));
        }
    }
    let (v, d) = best?;
    let (_, s) = ray(&d)?;
    let x = d.normalize() * s.sqrt();
    Some((v, x.iter().copied().collect()))
}

fn diverged(small: f64, large: f64) -> bool {
    large < small - (1.0 + small.abs())
}

/// Ray-reduction oracle for `min xᵀBx` s.t. `xᵀAx ≤ b`: the radius is solved
/// exactly along each direction, and directions are sampled and polished.
pub fn brute_force_single(p: &SingleConstraintProblem, budget: &OracleBudget, seed: u64) -> Result<OracleResult> {
    if p.dim() > MAX_ORACLE_DIM {
        return Err(Error::Domain(format!("oracle is limited to dimension {MAX_ORACLE_DIM}")));
    }
    let small = single_at_cap(p, CAPS[0], budget, seed);
    let large = single_at_cap(p, CAPS[1], budget, seed.wrapping_add(1));
    Ok(match (small, large) {
        (_, None) => OracleResult {
            value: f64::INFINITY,
            point: None,
            value_small_cap: f64::INFINITY,
            suspected_unbounded: false,
            feasible_found: false,
        },
        (s, Some((v, x))) => {
            let vs = s.map_or(f64::INFINITY, |s| s.0);
            OracleResult {
                suspected_unbounded: vs.is_finite() && diverged(vs, v),
                value: v,
                point: Some(x),
                value_small_cap: vs,
                feasible_found: true,
            }
        }
    })
}

fn general_at_cap(q: &QcqpInstance, cap: f64, budget: &OracleBudget, seed: u64) -> Option<(f64, Vec<f64>)> {
    let m = q.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = std::iter::once(&q.objective)
        .chain(&q.constraints)
        .chain(&q.equalities)
        .map(|g| crate::linalg::fro(&g.a) + g.lin.iter().map(|x| x.abs()).sum::<f64>() + g.c.abs())
        .sum::<f64>();
    let rho = 1e3 * (1.0 + size) * (1.0 + cap);
    let clamp = |x: &DVector<f64>| -> DVector<f64> {
        let n = x.norm();
        if n > cap {
            x * (cap / n)
        } else {
            x.clone()
        }
    };
    let f = |x: &DVector<f64>| {
        let y = clamp(x);
        let s = y.as_slice();
        q.objective.eval(s) + rho * q.violation(s)
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in 0..budget.refine.max(1) * 4 {
        let radius = [1.0, 10.0, cap][start % 3];
        let g = gaussian(&mut rng, m);
        let x0 = g.normalize() * (radius * start as f64 / (budget.refine.max(1) * 4) as f64);
        let (x, _) = nelder_mead(&f, x0, 0.1 * radius, budget.iterations);
        let y = clamp(&x);
        if q.violation(y.as_slice()) > 1e-6 * (1.0 + size) {
            continue;
        }
        let v = q.objective.eval(y.as_slice());
        if best.as_ref().is_none_or(|b| v < b.0) {
            best = Some((v, y.iter().copied().collect()));
        }
    }
    best
}

/// Penalty multistart oracle for a general instance (reported objective
/// scale applied).
pub fn brute_force_qcqp(q: &QcqpInstance, budget: &OracleBudget, seed: u64) -> Result<OracleResult> {
    if q.dim() > MAX_ORACLE_DIM {
        return Err(Error::Domain(format!("oracle is limited to dimension {MAX_ORACLE_DIM}")));
    }
    let small = general_at_cap(q, CAPS[0], budget, seed);
    let large = general_at_cap(q, CAPS[1], budget, seed.wrapping_add(1));
    let vs = small.as_ref().map_or(f64::INFINITY, |s| s.0);
    let best = match (small, large) {
        (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
        (a, b) => a.or(b),
    };
    Ok(match best {
        None => OracleResult {
            value: f64::INFINITY,
            point: None,
            value_small_cap: vs,
            suspected_unbounded: false,
            feasible_found: false,
        },
        Some((v, x)) => OracleResult {
            suspected_unbounded: vs.is_finite() && diverged(vs, v),
            value: q.objective_scale * v,
            point: Some(x),
            value_small_cap: q.objective_scale * vs,
            feasible_found: true,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{e_mat, jordan_real};
    use crate::qcqp::Quadratic;
    use crate::{Config, Mat};

    #[test]
    fn ray_oracle_examples() {
        let c = Config::default();
        let b = OracleBudget::default();
        let p = SingleConstraintProblem::new(Mat::from_diagonal(&DVector::from_vec(vec![1., -1.])), Mat::identity(2, 2), 1.0, &c).unwrap();
        let r = brute_force_single(&p, &b, 1).unwrap();
        assert!((r.value + 1.0).abs() < 1e-8 && !r.suspected_unbounded, "{r:?}");

        let p = SingleConstraintProblem::new(e_mat(2) * jordan_real(-1.0, 2), e_mat(2), 1.0, &c).unwrap();
        let r = brute_force_single(&p, &b, 2).unwrap();
        assert!((r.value + 1.0).abs() < 1e-3 && !r.suspected_unbounded, "{r:?}");

        let p = SingleConstraintProblem::new(Mat::from_diagonal(&DVector::from_vec(vec![1., -1.])), e_mat(2), 1.0, &c).unwrap();
        let r = brute_force_single(&p, &b, 3).unwrap();
        assert!(r.suspected_unbounded, "{r:?}");
    }

    #[test]
    fn penalty_oracle_on_ball() {
        let q = QcqpInstance::new(
            Quadratic { a: Mat::from_diagonal(&DVector::from_vec(vec![1., -1.])), lin: vec![0.5, 0.0], c: 0.0 },
            vec![Quadratic { a: Mat::identity(2, 2), lin: vec![0.0; 2], c: -1.0 }],
        )
        .unwrap();
        let r = brute_force_qcqp(&q, &OracleBudget::default(), 4).unwrap();
        // x₂² = 1 − x₁², objective 2x₁² + x₁ − 1, minimized at x₁ = −¼.
        assert!((r.value + 1.125).abs() < 1e-4, "{r:?}");
    }
}
