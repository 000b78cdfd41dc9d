//! Quadratically constrained quadratic programs: homogenization, the
//! diagonal LP relaxation along a congruence sequence, and the exact
//! single-constraint solver through the limit problem.
//!
//! Internally a quadratic is `xᵀAx + 2aᵀx + c` with no ½ factors.
//! [`QcqpInstance::from_half_convention`] converts from the form
//! `½xᵀAx + aᵀx + c`, recording the objective factor ½ in
//! `objective_scale` so that reported values are in the caller's units.

pub mod oracle;
pub mod simplex;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::canon::{uhlig_canonical, UhligBlockSpec};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::matcore::{r_mat, Eigenvalue};
use crate::sequences::CongruenceSequence;

pub use simplex::{solve_lp, LpInstance, LpOutcome, LpRow, RowKind};

/// `xᵀAx + 2·linᵀx + c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quadratic {
    #[serde(with = "crate::io::rows")]
    pub a: Mat,
    pub lin: Vec<f64>,
    pub c: f64,
}

impl Quadratic {
    pub fn homogeneous(a: Mat) -> Self {
        let m = a.nrows();
        Quadratic {
            a,
            lin: vec![0.0; m],
            c: 0.0,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let v = DVector::from_column_slice(x);
        let l = DVector::from_column_slice(&self.lin);
        v.dot(&(&self.a * &v)) + 2.0 * l.dot(&v) + self.c
    }

    fn is_homogeneous(&self) -> bool {
        self.lin.iter().all(|&x| x == 0.0)
    }
}

/// `min f₀(x)` subject to `g_ℓ(x) ≤ 0` and `h_j(x) = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QcqpInstance {
    pub objective: Quadratic,
    pub constraints: Vec<Quadratic>,
    #[serde(default)]
    pub equalities: Vec<Quadratic>,
    /// Reported objective values are `objective_scale·f₀(x)`.
    #[serde(default = "one")]
    pub objective_scale: f64,
}

fn one() -> f64 {
    1.0
}

impl QcqpInstance {
    pub fn new(objective: Quadratic, constraints: Vec<Quadratic>) -> Result<Self> {
        let q = QcqpInstance {
            objective,
            constraints,
            equalities: Vec::new(),
            objective_scale: 1.0,
        };
        q.validate(Config::default().sym)?;
        Ok(q)
    }

    /// From `min ½xᵀA₀x + a₀ᵀx` s.t. `½xᵀA_ℓx + a_ℓᵀx + c_ℓ ≤ 0`. Each
    /// constraint is doubled; the objective keeps its data and is reported
    /// with factor ½.
    pub fn from_half_convention(a0: Mat, lin0: Vec<f64>, constraints: Vec<(Mat, Vec<f64>, f64)>) -> Result<Self> {
        let mut q = QcqpInstance::new(
            Quadratic { a: a0, lin: lin0, c: 0.0 },
            constraints
                .into_iter()
                .map(|(a, lin, c)| Quadratic { a, lin, c: 2.0 * c })
                .collect(),
        )?;
        q.objective_scale = 0.5;
        Ok(q)
    }

    pub fn dim(&self) -> usize {
        self.objective.a.nrows()
    }

    pub fn validate(&self, sym_tol: f64) -> Result<()> {
        let m = self.dim();
        for q in std::iter::once(&self.objective).chain(&self.constraints).chain(&self.equalities) {
            if q.a.shape() != (m, m) || q.lin.len() != m {
                return Err(Error::Shape(format!("every quadratic must be {m}-dimensional")));
            }
            if linalg::asymmetry(&q.a) > sym_tol * linalg::fro(&q.a) {
                return Err(Error::Domain("quadratic forms must be symmetric".into()));
            }
            if q.a.iter().chain(&q.lin).any(|x| !x.is_finite()) || !q.c.is_finite() {
                return Err(Error::Domain("non-finite data".into()));
            }
        }
        Ok(())
    }

    /// Reported objective at `x`.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective_scale * self.objective.eval(x)
    }

    /// Largest constraint violation at `x`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let ineq = self.constraints.iter().map(|g| g.eval(x).max(0.0));
        let eq = self.equalities.iter().map(|h| h.eval(x).abs());
        ineq.chain(eq).fold(0.0, f64::max)
    }

    fn all_homogeneous(&self) -> bool {
        std::iter::once(&self.objective)
            .chain(&self.constraints)
            .chain(&self.equalities)
            .all(Quadratic::is_homogeneous)
    }
}

fn bordered(q: &Quadratic) -> Mat {
    let m = q.a.nrows();
    let mut b = Mat::zeros(m + 1, m + 1);
    b.view_mut((0, 0), (m, m)).copy_from(&q.a);
    for i in 0..m {
        b[(i, m)] = q.lin[i];
        b[(m, i)] = q.lin[i];
    }
    b[(m, m)] = q.c;
    b
}

/// Lifts to dimension `m + 1` with `Āᵢ = [[Aᵢ, aᵢ], [aᵢᵀ, cᵢ]]` and the
/// marker equality `x_{m+1}² = 1`. Feasible `x` maps to `(x, 1)` with the
/// same objective.
pub fn homogenize(q: &QcqpInstance) -> QcqpInstance {
    let m = q.dim();
    let lift = |g: &Quadratic| Quadratic::homogeneous(bordered(g));
    let mut corner = Mat::zeros(m + 1, m + 1);
    corner[(m, m)] = 1.0;
    let mut equalities: Vec<Quadratic> = q.equalities.iter().map(lift).collect();
    equalities.push(Quadratic {
        a: corner,
        lin: vec![0.0; m + 1],
        c: -1.0,
    });
    QcqpInstance {
        objective: lift(&q.objective),
        constraints: q.constraints.iter().map(lift).collect(),
        equalities,
        objective_scale: q.objective_scale,
    }
}

/// The LP in `u = y²` obtained by dropping off-diagonal parts of
/// `W_ℓ = P_kᵀA_ℓP_k`. This is a heuristic: `dropped_mass` bounds what was
/// discarded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Relaxation {
    pub lp: LpInstance,
    #[serde(with = "crate::io::rows")]
    pub p_k: Mat,
    pub k: f64,
    /// `Σ_ℓ‖offdiag(W_ℓ)‖_F` over objective, constraints and equalities.
    pub dropped_mass: f64,
    /// `dropped_mass / Σ_ℓ‖A_ℓ‖_F`.
    pub relative_dropped: f64,
    pub objective_constant: f64,
    pub objective_scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelaxationSolution {
    pub outcome: LpOutcome,
    /// Reported LP value (objective scale applied).
    pub value: Option<f64>,
    /// `x = P_k·√u`.
    pub x: Option<Vec<f64>>,
    /// Reported objective of the original problem at `x`.
    pub original_value: Option<f64>,
    pub original_violation: Option<f64>,
}

pub fn lp_relaxation(q: &QcqpInstance, seq: &CongruenceSequence, k: f64) -> Result<Relaxation> {
    if !q.all_homogeneous() {
        return Err(Error::Domain("lp_relaxation needs zero linear terms; homogenize first".into()));
    }
    if seq.dim != q.dim() {
        return Err(Error::Shape(format!("sequence is {0}×{0}, problem is {1}-dimensional", seq.dim, q.dim())));
    }
    let p = seq.evaluate(k)?;
    let mut dropped = 0.0;
    let mut total = 0.0;
    let mut diag_of = |g: &Quadratic| -> Vec<f64> {
        let w = p.transpose() * &g.a * &p;
        dropped += linalg::offdiag_norm(&w);
        total += linalg::fro(&g.a);
        w.diagonal().iter().copied().collect()
    };
    let mut lp = LpInstance::new(diag_of(&q.objective));
    for g in &q.constraints {
        lp = lp.le(diag_of(g), -g.c);
    }
    for h in &q.equalities {
        lp = lp.eq(diag_of(h), -h.c);
    }
    Ok(Relaxation {
        lp,
        p_k: p,
        k,
        dropped_mass: dropped,
        relative_dropped: if total > 0.0 { dropped / total } else { 0.0 },
        objective_constant: q.objective.c,
        objective_scale: q.objective_scale,
    })
}

impl Relaxation {
    /// `x = P_k·y` with `yᵢ = √uᵢ` (signs are not determined by the LP).
    pub fn back_map(&self, u: &[f64]) -> Vec<f64> {
        let y = DVector::from_iterator(u.len(), u.iter().map(|x| x.max(0.0).sqrt()));
        (&self.p_k * y).iter().copied().collect()
    }

    pub fn solve(&self, original: &QcqpInstance) -> RelaxationSolution {
        let outcome = solve_lp(&self.lp);
        match &outcome {
            LpOutcome::Optimal { value, point } => {
                let x = self.back_map(point);
                RelaxationSolution {
                    value: Some(self.objective_scale * (value + self.objective_constant)),
                    original_value: Some(original.objective_value(&x)),
                    original_violation: Some(original.violation(&x)),
                    x: Some(x),
                    outcome,
                }
            }
            _ => RelaxationSolution {
                outcome,
                value: None,
                x: None,
                original_value: None,
                original_violation: None,
            },
        }
    }
}

/// `min xᵀBx` subject to `xᵀAx ≤ b` with `A` nonsingular.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleConstraintProblem {
    /// `B`.
    #[serde(with = "crate::io::rows")]
    pub objective: Mat,
    /// `A`.
    #[serde(with = "crate::io::rows")]
    pub constraint: Mat,
    pub rhs: f64,
}

impl SingleConstraintProblem {
    pub fn new(objective: Mat, constraint: Mat, rhs: f64, cfg: &Config) -> Result<Self> {
        if objective.shape() != constraint.shape() || !objective.is_square() {
            return Err(Error::Shape("A and B must be square of equal size".into()));
        }
        for m in [&objective, &constraint] {
            if linalg::asymmetry(m) > cfg.sym * linalg::fro(m) {
                return Err(Error::Domain("A and B must be symmetric".into()));
            }
        }
        if linalg::rcond(&constraint) <= cfg.det {
            return Err(Error::Singular("the constraint matrix A".into()));
        }
        if !rhs.is_finite() {
            return Err(Error::Domain("b must be finite".into()));
        }
        Ok(SingleConstraintProblem {
            objective: linalg::symmetrize(&objective),
            constraint: linalg::symmetrize(&constraint),
            rhs,
        })
    }

    pub fn dim(&self) -> usize {
        self.constraint.nrows()
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        let v = DVector::from_column_slice(x);
        v.dot(&(&self.constraint * &v)) <= self.rhs + tol * (1.0 + self.rhs.abs())
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        let v = DVector::from_column_slice(x);
        v.dot(&(&self.objective * &v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingleStatus {
    Attained,
    /// The limit problem's minimizers have no finite preimage; the value is
    /// an infimum of the original problem.
    InfimumOnly,
    UnboundedBelow,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleDiagnostics {
    pub slater: bool,
    /// The unbounded verdict came from the block-structure test rather than
    /// from the LP.
    pub structural: bool,
    pub violations: Vec<String>,
    pub blocks: Vec<UhligBlockSpec>,
    pub canonical_residual: f64,
    /// `x*ᵀAx* − b` and `x*ᵀBx* − value` at the returned point.
    pub point_residuals: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleSolution {
    pub status: SingleStatus,
    /// `±∞` for unbounded / infeasible problems.
    pub value: f64,
    pub point: Option<Vec<f64>>,
    pub diagnostics: SingleDiagnostics,
}

fn structural_violations(blocks: &[UhligBlockSpec], cfg: &Config) -> Vec<String> {
    let scale = blocks
        .iter()
        .map(|b| match b.eigenvalue {
            Eigenvalue::Real(l) => l.abs(),
            Eigenvalue::Complex { re, im } => re.hypot(im),
        })
        .fold(1.0, f64::max);
    let mut out = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        match b.eigenvalue {
            Eigenvalue::Complex { re, im } => out.push(format!("block {i}: non-real eigenvalue {re}±{im}i")),
            Eigenvalue::Real(l) => {
                if b.size > 2 {
                    out.push(format!("block {i}: size {} exceeds 2", b.size));
                } else if b.size == 2 && b.sign < 0 {
                    out.push(format!("block {i}: size-2 block with sign −1"));
                } else if b.size == 2 && l > cfg.eig * scale {
                    out.push(format!("block {i}: size-2 block with positive eigenvalue {l}"));
                }
            }
        }
    }
    out
}

/// `(α, β)` of the limit problem in the coordinates that diagonalize every
/// block: `yᵀAy = Σαᵢwᵢ²`, `yᵀB̂y = Σβᵢwᵢ²`.
fn limit_coefficients(blocks: &[UhligBlockSpec]) -> (Vec<f64>, Vec<f64>, Vec<usize>) {
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut pairs = Vec::new();
    for b in blocks {
        let l = match b.eigenvalue {
            Eigenvalue::Real(l) => l,
            Eigenvalue::Complex { .. } => unreachable!("screened before"),
        };
        let s = f64::from(b.sign);
        if b.size == 1 {
            alpha.push(s);
            beta.push(s * l);
        } else {
            pairs.push(alpha.len());
            alpha.extend([1.0, -1.0]);
            beta.extend([l, -l]);
        }
    }
    (alpha, beta, pairs)
}

/// Solves the single-constraint problem through its limit problem, whose
/// value coincides with the original one.
pub fn solve_single_constraint(p: &SingleConstraintProblem, cfg: &Config) -> Result<SingleSolution> {
    let m = p.dim();
    let definite = linalg::inertia(&p.constraint, cfg.pd).0 == m;
    let slater = !(definite && p.rhs <= 0.0);
    let mut diag = SingleDiagnostics {
        slater,
        structural: false,
        violations: Vec::new(),
        blocks: Vec::new(),
        canonical_residual: 0.0,
        point_residuals: None,
    };
    if !slater {
        let (status, value, point) = if p.rhs == 0.0 {
            (SingleStatus::Attained, 0.0, Some(vec![0.0; m]))
        } else {
            (SingleStatus::Infeasible, f64::INFINITY, None)
        };
        return Ok(SingleSolution {
            status,
            value,
            point,
            diagnostics: diag,
        });
    }
    let canon = uhlig_canonical(&p.constraint, &p.objective, cfg)?;
    diag.blocks = canon.blocks.clone();
    diag.canonical_residual = canon.residual_a.max(canon.residual_b);
    diag.violations = structural_violations(&canon.blocks, cfg);
    if !diag.violations.is_empty() {
        diag.structural = true;
        return Ok(SingleSolution {
            status: SingleStatus::UnboundedBelow,
            value: f64::NEG_INFINITY,
            point: None,
            diagnostics: diag,
        });
    }
    let (alpha, beta, pairs) = limit_coefficients(&canon.blocks);
    let lp = LpInstance::new(beta.clone()).le(alpha.clone(), p.rhs);
    let (value, u) = match solve_lp(&lp) {
        LpOutcome::Optimal { value, point } => (value, point),
        LpOutcome::Unbounded => {
            return Ok(SingleSolution {
                status: SingleStatus::UnboundedBelow,
                value: f64::NEG_INFINITY,
                point: None,
                diagnostics: diag,
            })
        }
        LpOutcome::Infeasible => {
            return Ok(SingleSolution {
                status: SingleStatus::Infeasible,
                value: f64::INFINITY,
                point: None,
                diagnostics: diag,
            })
        }
    };
    // A limit minimizer is attained by the original problem iff each
    // 2-block can have equal squared coordinates.
    let u = if pairs.iter().all(|&i| (u[i] - u[i + 1]).abs() <= 1e-12 * (1.0 + u[i].abs())) {
        Some(u)
    } else {
        let mut tied = lp.clone();
        for &i in &pairs {
            let mut row = vec![0.0; alpha.len()];
            row[i] = 1.0;
            row[i + 1] = -1.0;
            tied = tied.eq(row, 0.0);
        }
        match solve_lp(&tied) {
            LpOutcome::Optimal { value: v2, point } if v2 <= value + 1e-9 * (1.0 + value.abs()) => Some(point),
            _ => None,
        }
    };
    let Some(u) = u else {
        return Ok(SingleSolution {
            status: SingleStatus::InfimumOnly,
            value,
            point: None,
            diagnostics: diag,
        });
    };
    let mut z = DVector::from_iterator(u.len(), u.iter().map(|x| x.max(0.0).sqrt()));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for &i in &pairs {
        let (w1, w2) = (z[i], z[i + 1]);
        z[i] = h * (w1 + w2);
        z[i + 1] = h * (w1 - w2);
    }
    let x: Vec<f64> = (&canon.transform * z).iter().copied().collect();
    let xv = DVector::from_column_slice(&x);
    diag.point_residuals = Some((
        xv.dot(&(&p.constraint * &xv)) - p.rhs,
        p.objective_at(&x) - value,
    ));
    Ok(SingleSolution {
        status: SingleStatus::Attained,
        value,
        point: Some(x),
        diagnostics: diag,
    })
}

/// The canonical problem `(R_kᵀYR_k, X, b)` for real blocks; `k = ∞` is not
/// representable, see [`limit_problem`].
pub fn canonical_at(p: &SingleConstraintProblem, k: f64, cfg: &Config) -> Result<SingleConstraintProblem> {
    let canon = uhlig_canonical(&p.constraint, &p.objective, cfg)?;
    let (x, y) = canon.canonical_matrices();
    let r = linalg::block_diag(&canon.blocks.iter().map(|b| r_mat(b.size, k)).collect::<Vec<_>>());
    SingleConstraintProblem::new(r.transpose() * y * &r, x, p.rhs, cfg)
}

/// `(B̂, X, b)` with `B̂ = Diag{σᵢλᵢE(mᵢ)}` for real blocks.
pub fn limit_problem(p: &SingleConstraintProblem, cfg: &Config) -> Result<SingleConstraintProblem> {
    let canon = uhlig_canonical(&p.constraint, &p.objective, cfg)?;
    let (x, _) = canon.canonical_matrices();
    let mut parts = Vec::new();
    for b in &canon.blocks {
        let Eigenvalue::Real(l) = b.eigenvalue else {
            return Err(Error::Domain("limit problem needs real eigenvalues".into()));
        };
        parts.push(crate::matcore::e_mat(b.size) * (f64::from(b.sign) * l));
    }
    SingleConstraintProblem::new(linalg::block_diag(&parts), x, p.rhs, cfg)
}

/// A random instance meeting the block-structure necessary conditions:
/// 1-blocks of either sign, 2-blocks with sign +1 and `λ ≤ 0`, scrambled by
/// a well-conditioned congruence.
pub fn random_structured_problem(m: usize, seed: u64) -> SingleConstraintProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut left = m;
    while left > 0 {
        let two = left >= 2 && rng.random_bool(0.4);
        if two {
            let l = -rng.random_range(0.0..2.0);
            let e = crate::matcore::e_mat(2);
            ys.push(&e * crate::matcore::jordan_real(l, 2));
            xs.push(e);
            left -= 2;
        } else {
            let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let l: f64 = rng.random_range(-2.0..2.0);
            xs.push(Mat::from_element(1, 1, s));
            ys.push(Mat::from_element(1, 1, s * l));
            left -= 1;
        }
    }
    let (x, y) = (linalg::block_diag(&xs), linalg::block_diag(&ys));
    let t = loop {
        let t = Mat::identity(m, m) + Mat::from_fn(m, m, |_, _| rng.random_range(-0.4..0.4));
        if linalg::rcond(&t) > 0.2 {
            break t;
        }
    };
    // A = T⁻ᵀXT⁻¹, so x = Tz maps the canonical problem to this one.
    let ti = t.try_inverse().expect("well-conditioned");
    let b = if rng.random_bool(0.8) {
        rng.random_range(0.5..2.0)
    } else {
        -rng.random_range(0.5..2.0)
    };
    SingleConstraintProblem {
        objective: linalg::symmetrize(&(ti.transpose() * y * &ti)),
        constraint: linalg::symmetrize(&(ti.transpose() * x * &ti)),
        rhs: b,
    }
}
