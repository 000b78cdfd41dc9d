//! Decision procedures for each property of the hierarchy. Every procedure
//! returns a three-valued verdict, the rule that decided it and whatever
//! certificates were produced on the way.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::jordan::{
    clustered_eigenvalues, has_only_real_eigenvalues, is_nilpotent, real_jordan_form,
    RealJordanForm,
};
use crate::linalg::{self, Mat};
use crate::matcore::{
    find_definite_pencil, find_nonsingular_pencil, s_commutator, DefiniteSearch, PencilSearch,
    PencilWitness, SymMatrixSet,
};
use crate::sequences::{
    seq_nonsingular_pair, seq_psd_pencil, verify_sequence, CongruenceSequence, VerificationReport,
    DEFAULT_K_GRID,
};
use crate::verdict::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PropertyLabel {
    Sdo,
    Sd,
    Twsd,
    TwsdB,
    Dwsd,
    TSdo(usize),
    TSd(usize),
    DSdo(usize),
    DSd(usize),
}

impl PropertyLabel {
    /// The target dimension for the parameterized labels.
    pub fn target_dim(self) -> Option<usize> {
        match self {
            PropertyLabel::TSdo(n)
            | PropertyLabel::TSd(n)
            | PropertyLabel::DSdo(n)
            | PropertyLabel::DSd(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for PropertyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyLabel::Sdo => f.write_str("SDO"),
            PropertyLabel::Sd => f.write_str("SD"),
            PropertyLabel::Twsd => f.write_str("TWSD"),
            PropertyLabel::TwsdB => f.write_str("TWSD-B"),
            PropertyLabel::Dwsd => f.write_str("DWSD"),
            PropertyLabel::TSdo(n) => write!(f, "T-SDO({n})"),
            PropertyLabel::TSd(n) => write!(f, "T-SD({n})"),
            PropertyLabel::DSdo(n) => write!(f, "D-SDO({n})"),
            PropertyLabel::DSd(n) => write!(f, "D-SD({n})"),
        }
    }
}

impl FromStr for PropertyLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase().replace('_', "-");
        let simple = match t.as_str() {
            "SDO" => Some(PropertyLabel::Sdo),
            "SD" => Some(PropertyLabel::Sd),
            "TWSD" => Some(PropertyLabel::Twsd),
            "TWSD-B" | "TWSDB" => Some(PropertyLabel::TwsdB),
            "DWSD" => Some(PropertyLabel::Dwsd),
            _ => None,
        };
        if let Some(p) = simple {
            return Ok(p);
        }
        let bad = || Error::Parse(format!("unknown property {s:?}"));
        let (head, rest) = t.split_once('(').ok_or_else(bad)?;
        let n: usize = rest
            .strip_suffix(')')
            .ok_or_else(bad)?
            .trim()
            .parse()
            .map_err(|_| bad())?;
        match head {
            "T-SDO" => Ok(PropertyLabel::TSdo(n)),
            "T-SD" => Ok(PropertyLabel::TSd(n)),
            "D-SDO" => Ok(PropertyLabel::DSdo(n)),
            "D-SD" => Ok(PropertyLabel::DSd(n)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for PropertyLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PropertyLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// The result or criterion that justified a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// One matrix, or all matrices zero.
    Trivial,
    /// SDO iff all pairwise commutators vanish.
    CommutingFamily,
    /// SD iff every `S⁻¹Aᵢ` has a diagonal real Jordan form and all
    /// `S`-commutators vanish, for a nonsingular pencil `S`.
    PencilJordanDiagonal,
    /// With a positive definite pencil `S` and `PᵀSP = I`, SD iff the
    /// matrices `PᵀAᵢP` commute.
    DefinitePencilCommutators,
    /// A singular pencil whose members share no kernel vector is not SD.
    SingularPencilTrivialKernel,
    /// The common kernel was split off; the verdict is that of the rest.
    CommonKernelDeflation,
    /// Transposed sub-dimension properties coincide with SDO / SD.
    DimensionCollapse,
    /// Every singular pair has the property.
    SingularPair,
    /// A nonsingular pair has the property iff `S⁻¹B` has real spectrum.
    NonsingularPairSpectrum,
    /// A shared kernel vector lets every congruence tend to zero.
    CommonKernel,
    /// With a positive definite pencil the property is equivalent to SD.
    DefinitePencilCollapse,
    /// Necessary: every `S⁻¹Aᵢ` has real spectrum.
    RealSpectrumNecessary,
    /// Necessary: every `S`-commutator is nilpotent.
    NilpotentCommutatorNecessary,
    /// Sufficient: vanishing commutators, real spectra, and one `S⁻¹Aᵢ`
    /// whose Jordan blocks have pairwise distinct (eigenvalue, size).
    DistinctBlocksMember,
    /// Sufficient for three matrices with a nonsingular member `S`: real
    /// spectra and a vanishing commutator of the other two.
    CommutingTriple,
    /// SD implies the weaker property.
    ImpliedBySd,
    /// TWSD-B implies TWSD.
    ImpliedByTwsdB,
    /// For 2×2 pairs TWSD and TWSD-B coincide.
    TwoByTwoPair,
    /// A pair with a positive semidefinite pencil is TWSD.
    SemidefinitePencil,
    /// A nonsingular pair whose `S⁻¹B` has a real eigenvalue is TWSD.
    RealEigenvalueSplit,
    /// A common block split with one block TWSD-B gives TWSD.
    PermutationBlockSplit,
    /// For three matrices with a nonsingular member `S`: DWSD iff the other
    /// two `S⁻¹Aᵢ` commute and have real spectra.
    CommutingRealTriple,
    /// Necessary for DWSD: real spectra and vanishing commutators.
    DwsdNecessaryScreen,
    /// A TWSD sequence whose first congruence stays diagonal and bounded.
    BoundedPromotion,
    /// Projective sub-dimension properties hold for large enough `n`.
    ProjectiveEmbedding,
    /// No implemented criterion decides the question.
    NoRuleFired,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConditionTrace {
    /// Outermost rule first; later entries are the rules it delegated to.
    pub rules: Vec<Rule>,
    pub quantities: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl ConditionTrace {
    fn new(rule: Rule) -> Self {
        ConditionTrace {
            rules: vec![rule],
            ..Default::default()
        }
    }

    pub fn rule(&self) -> Rule {
        self.rules.first().copied().unwrap_or(Rule::NoRuleFired)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutatorNorm {
    pub i: usize,
    pub j: usize,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JordanEntry {
    /// Index of `Aᵢ` in the set.
    pub index: usize,
    pub form: RealJordanForm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Commutator {
        /// `None` for plain commutators.
        #[serde(with = "crate::io::rows_opt")]
        pencil: Option<Mat>,
        threshold: f64,
        norms: Vec<CommutatorNorm>,
    },
    Jordan {
        forms: Vec<JordanEntry>,
    },
    Sequence {
        sequence: CongruenceSequence,
        verification: Option<VerificationReport>,
    },
    Pencil {
        witness: PencilWitness,
    },
    Diagonalizer {
        #[serde(with = "crate::io::rows")]
        q: Mat,
        /// `Σ‖offdiag(QᵀAᵢQ)‖² / Σ‖Aᵢ‖²`.
        residual: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub property: PropertyLabel,
    pub verdict: Verdict,
    pub trace: ConditionTrace,
    pub certificates: Vec<Certificate>,
}

impl ClassificationReport {
    fn new(property: PropertyLabel, verdict: Verdict, trace: ConditionTrace) -> Self {
        ClassificationReport {
            property,
            verdict,
            trace,
            certificates: Vec::new(),
        }
    }

    /// Re-labels a delegated report and puts `rule` in front of its chain.
    fn wrap(mut self, property: PropertyLabel, rule: Rule) -> Self {
        self.property = property;
        self.trace.rules.insert(0, rule);
        self
    }

    fn note(mut self, n: impl Into<String>) -> Self {
        self.trace.notes.push(n.into());
        self
    }

    fn certify(mut self, c: Certificate) -> Self {
        self.certificates.push(c);
        self
    }

    fn quantity(mut self, name: &str, v: f64) -> Self {
        self.trace.quantities.insert(name.to_string(), v);
        self
    }

    pub fn sequence(&self) -> Option<&CongruenceSequence> {
        self.certificates.iter().find_map(|c| match c {
            Certificate::Sequence { sequence, .. } => Some(sequence),
            _ => None,
        })
    }

    pub fn diagonalizer(&self) -> Option<&Mat> {
        self.certificates.iter().find_map(|c| match c {
            Certificate::Diagonalizer { q, .. } => Some(q),
            _ => None,
        })
    }
}

struct Commutators {
    vanish: bool,
    worst_ratio: f64,
    mats: Vec<(usize, usize, Mat)>,
    cert: Certificate,
}

/// Pairwise commutators, plain (`s = None`) or `S`-commutators. The zero
/// threshold is `τ_comm·maxᵢ‖Aᵢ‖²·‖S⁻¹‖₂²`.
fn commutators(set: &SymMatrixSet, s: Option<&Mat>, cfg: &Config) -> Result<Commutators> {
    let mx = set.max_norm();
    let inv2 = match s {
        Some(s) => {
            let smin = linalg::singular_values_asc(s)[0];
            if smin == 0.0 {
                return Err(Error::Singular("pencil".into()));
            }
            1.0 / (smin * smin)
        }
        None => 1.0,
    };
    let threshold = cfg.comm * mx * mx * inv2;
    let mut norms = Vec::new();
    let mut mats = Vec::new();
    let mut worst = 0.0f64;
    for j in 0..set.len() {
        for i in 0..j {
            let (a, b) = (set.get(i), set.get(j));
            let c = match s {
                Some(s) => s_commutator(a, b, s, cfg)?,
                None => a * b - b * a,
            };
            let n = c.norm();
            worst = worst.max(if threshold > 0.0 { n / threshold } else { 0.0 });
            norms.push(CommutatorNorm { i, j, norm: n });
            mats.push((i, j, c));
        }
    }
    Ok(Commutators {
        vanish: norms.iter().all(|c| c.norm <= threshold),
        worst_ratio: worst,
        mats,
        cert: Certificate::Commutator {
            pencil: s.cloned(),
            threshold,
            norms,
        },
    })
}

/// Orthonormal basis of `∩ ker Aᵢ`.
pub fn common_kernel(set: &SymMatrixSet, cfg: &Config) -> Mat {
    let m = set.dim();
    let l = set.len();
    let mut stack = Mat::zeros(l * m, m);
    for (i, a) in set.mats().iter().enumerate() {
        stack.view_mut((i * m, 0), (m, m)).copy_from(a);
    }
    let scale = set.max_norm();
    if scale == 0.0 {
        return Mat::identity(m, m);
    }
    linalg::null_space(&stack, cfg.rank.max(1e-12) * scale * (m as f64).sqrt())
}

/// Orthogonal `P` whose trailing columns span the common kernel, and the
/// leading principal part of `PᵀAᵢP`.
pub fn deflate_common_kernel(
    set: &SymMatrixSet,
    cfg: &Config,
) -> (Mat, usize, Option<SymMatrixSet>) {
    let m = set.dim();
    let ker = common_kernel(set, cfg);
    let k = ker.ncols();
    if k == 0 {
        return (Mat::identity(m, m), 0, Some(set.clone()));
    }
    let full = linalg::complete_orthonormal(&ker);
    let mut p = Mat::zeros(m, m);
    p.view_mut((0, 0), (m, m - k))
        .copy_from(&full.columns(k, m - k));
    p.view_mut((0, m - k), (m, k)).copy_from(&ker);
    linalg::make_special(&mut p);
    if k == m {
        return (p, k, None);
    }
    let idx: Vec<usize> = (0..m - k).collect();
    (p.clone(), k, Some(set.congruence(&p).principal(&idx)))
}

/// Orthogonal `Q` with `det Q = 1` diagonalizing a commuting family, by
/// splitting joint eigenspaces of a random combination and then each member.
pub fn sdo_diagonalizer(set: &SymMatrixSet, cfg: &Config) -> Mat {
    let m = set.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let coeffs: Vec<f64> = (0..set.len()).map(|_| rng.random_range(0.5..1.5)).collect();
    let mut drivers = vec![set.combine(&coeffs)];
    drivers.extend(set.mats().iter().cloned());
    let mut groups = vec![Mat::identity(m, m)];
    for a in &drivers {
        let tol = 1e-8 * a.norm().max(f64::MIN_POSITIVE);
        let mut next = Vec::new();
        for v in groups {
            if v.ncols() == 1 {
                next.push(v);
                continue;
            }
            let (vals, w) = linalg::sym_eigen_sorted(&(v.transpose() * a * &v));
            let rot = &v * &w;
            let mut start = 0;
            for c in 1..=vals.len() {
                if c == vals.len() || vals[c - 1] - vals[c] > tol {
                    next.push(rot.columns(start, c - start).clone_owned());
                    start = c;
                }
            }
        }
        groups = next;
    }
    let mut q = Mat::zeros(m, m);
    let mut c = 0;
    for g in &groups {
        q.view_mut((0, c), (m, g.ncols())).copy_from(g);
        c += g.ncols();
    }
    // Columns ordered by the row of their largest entry, so diagonal input
    // gives the identity.
    let lead = |c: usize| q.column(c).iamax();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&c| lead(c));
    let mut q = Mat::from_fn(m, m, |r, c| q[(r, order[c])]);
    linalg::fix_first_nonzero_positive(&mut q, 1e-12);
    linalg::make_special(&mut q);
    q
}

fn diagonalizer_cert(set: &SymMatrixSet, q: Mat) -> Certificate {
    let total: f64 = set.mats().iter().map(|a| a.norm_squared()).sum();
    let off: f64 = set
        .mats()
        .iter()
        .map(|a| linalg::offdiag_norm(&(q.transpose() * a * &q)).powi(2))
        .sum();
    Certificate::Diagonalizer {
        q,
        residual: if total > 0.0 { off / total } else { 0.0 },
    }
}

pub fn check_sdo(set: &SymMatrixSet, cfg: &Config) -> ClassificationReport {
    let c = match commutators(set, None, cfg) {
        Ok(c) => c,
        Err(e) => {
            return ClassificationReport::new(
                PropertyLabel::Sdo,
                Verdict::Unknown,
                ConditionTrace::new(Rule::NoRuleFired),
            )
            .note(e.to_string())
        }
    };
    let mut r = ClassificationReport::new(
        PropertyLabel::Sdo,
        Verdict::from_bool(c.vanish),
        ConditionTrace::new(Rule::CommutingFamily),
    )
    .quantity("commutator_ratio", c.worst_ratio)
    .certify(c.cert);
    if c.vanish {
        let q = sdo_diagonalizer(set, cfg);
        r = r.certify(diagonalizer_cert(set, q));
    }
    r
}

fn sd_report(verdict: Verdict, rule: Rule) -> ClassificationReport {
    ClassificationReport::new(PropertyLabel::Sd, verdict, ConditionTrace::new(rule))
}

pub fn check_sd(set: &SymMatrixSet, cfg: &Config) -> ClassificationReport {
    if set.len() == 1 {
        let q = sdo_diagonalizer(set, cfg);
        return sd_report(Verdict::Yes, Rule::Trivial).certify(diagonalizer_cert(set, q));
    }
    let sdo = check_sdo(set, cfg);
    if sdo.verdict.is_yes() {
        return sdo
            .wrap(PropertyLabel::Sd, Rule::ImpliedBySd)
            .note("commuting family: SDO implies SD");
    }
    if let Some(w) = find_definite_pencil(set, cfg).positive_definite() {
        return sd_definite(set, w, cfg);
    }
    match find_nonsingular_pencil(set, cfg) {
        PencilSearch::Found(w) => sd_nonsingular(set, &w, cfg),
        PencilSearch::Singular { probabilistic } => {
            let (_, k, reduced) = deflate_common_kernel(set, cfg);
            match reduced {
                None => sd_report(Verdict::Yes, Rule::Trivial).note("every matrix is zero"),
                Some(red) if k > 0 => check_sd(&red, cfg)
                    .wrap(PropertyLabel::Sd, Rule::CommonKernelDeflation)
                    .quantity("kernel_dim", k as f64)
                    .note("certificates refer to the deflated coordinates"),
                Some(_) if !probabilistic => {
                    sd_report(Verdict::No, Rule::SingularPencilTrivialKernel)
                }
                Some(_) => sd_report(Verdict::Unknown, Rule::NoRuleFired)
                    .note("no nonsingular pencil found by sampling and no common kernel"),
            }
        }
    }
}

fn sd_definite(set: &SymMatrixSet, w: &PencilWitness, cfg: &Config) -> ClassificationReport {
    let Some(p) = linalg::inv_sqrt_spd(&w.pencil) else {
        return sd_report(Verdict::Unknown, Rule::NoRuleFired)
            .note("definite pencil lost definiteness");
    };
    let moved = set.congruence(&p);
    match commutators(&moved, None, cfg) {
        Ok(c) => {
            let mut r = sd_report(
                Verdict::from_bool(c.vanish),
                Rule::DefinitePencilCommutators,
            )
            .quantity("commutator_ratio", c.worst_ratio)
            .certify(Certificate::Pencil { witness: w.clone() })
            .certify(c.cert);
            if c.vanish {
                let q = &p * sdo_diagonalizer(&moved, cfg);
                r = r.certify(diagonalizer_cert(set, q));
            }
            r
        }
        Err(e) => sd_report(Verdict::Unknown, Rule::NoRuleFired).note(e.to_string()),
    }
}

fn solve(s: &Mat, a: &Mat) -> Option<Mat> {
    s.clone().lu().solve(a)
}

fn sd_nonsingular(set: &SymMatrixSet, w: &PencilWitness, cfg: &Config) -> ClassificationReport {
    let s = &w.pencil;
    let mut forms = Vec::new();
    let mut diagonal = true;
    for (i, a) in set.mats().iter().enumerate() {
        let Some(m) = solve(s, a) else {
            return sd_report(Verdict::Unknown, Rule::NoRuleFired).note("pencil solve failed");
        };
        match real_jordan_form(&m, cfg) {
            Ok(f) => {
                diagonal &= f.is_real_diagonal();
                forms.push(JordanEntry { index: i, form: f });
            }
            Err(e) => {
                return sd_report(Verdict::Unknown, Rule::NoRuleFired)
                    .certify(Certificate::Pencil { witness: w.clone() })
                    .note(format!("S⁻¹A{i}: {e}"))
            }
        }
    }
    let c = match commutators(set, Some(s), cfg) {
        Ok(c) => c,
        Err(e) => return sd_report(Verdict::Unknown, Rule::NoRuleFired).note(e.to_string()),
    };
    sd_report(
        Verdict::from_bool(diagonal && c.vanish),
        Rule::PencilJordanDiagonal,
    )
    .quantity("commutator_ratio", c.worst_ratio)
    .certify(Certificate::Pencil { witness: w.clone() })
    .certify(Certificate::Jordan { forms })
    .certify(c.cert)
}

fn check_dim(set: &SymMatrixSet, n: usize) -> Result<()> {
    if n < set.dim() {
        return Err(Error::Domain(format!(
            "target dimension {n} is below m = {}",
            set.dim()
        )));
    }
    Ok(())
}

pub fn check_t_sdo(set: &SymMatrixSet, n: usize, cfg: &Config) -> Result<ClassificationReport> {
    check_dim(set, n)?;
    Ok(check_sdo(set, cfg).wrap(PropertyLabel::TSdo(n), Rule::DimensionCollapse))
}

pub fn check_t_sd(set: &SymMatrixSet, n: usize, cfg: &Config) -> Result<ClassificationReport> {
    check_dim(set, n)?;
    Ok(check_sd(set, cfg).wrap(PropertyLabel::TSd(n), Rule::DimensionCollapse))
}

/// Case-1 sequence for a set with a common kernel, verified on the set.
fn kernel_sequence(set: &SymMatrixSet, cfg: &Config) -> Option<Certificate> {
    let (p, k, _) = deflate_common_kernel(set, cfg);
    if k == 0 || set.dim() < 2 {
        return None;
    }
    let seq = CongruenceSequence::singular_case1(p).ok()?;
    let verification = verify_sequence(set, &seq, &DEFAULT_K_GRID).ok();
    Some(Certificate::Sequence {
        sequence: seq,
        verification,
    })
}

fn sequence_cert(set: &SymMatrixSet, seq: CongruenceSequence) -> Certificate {
    let verification = verify_sequence(set, &seq, &DEFAULT_K_GRID).ok();
    Certificate::Sequence {
        sequence: seq,
        verification,
    }
}

/// `(S, B')` with `span{S, B'} = span{A, B}` for a nonsingular pencil `S`.
fn pencil_partner<'a>(w: &PencilWitness, a: &'a Mat, b: &'a Mat) -> &'a Mat {
    if w.coeffs[0].abs() >= w.coeffs[1].abs() {
        b
    } else {
        a
    }
}

fn max_imag(m: &Mat, cfg: &Config) -> Option<f64> {
    let s = m.norm().max(f64::MIN_POSITIVE);
    clustered_eigenvalues(m, cfg)
        .ok()
        .map(|ev| ev.iter().map(|(z, _)| z.im.abs()).fold(0.0, f64::max) / s)
}

pub fn check_twsdb_pair(a: &Mat, b: &Mat, cfg: &Config) -> Result<ClassificationReport> {
    let set = SymMatrixSet::with_tolerance(vec![a.clone(), b.clone()], cfg.sym)?;
    Ok(twsdb_pair(&set, PropertyLabel::TwsdB, cfg))
}

fn twsdb_pair(set: &SymMatrixSet, label: PropertyLabel, cfg: &Config) -> ClassificationReport {
    let (a, b) = (set.get(0), set.get(1));
    match find_nonsingular_pencil(set, cfg) {
        PencilSearch::Singular { .. } => {
            let mut r = ClassificationReport::new(
                label,
                Verdict::Yes,
                ConditionTrace::new(Rule::SingularPair),
            );
            if let Some(c) = kernel_sequence(set, cfg) {
                r = r.certify(c);
            } else {
                r = r.note("no common kernel vector: no explicit sequence attached");
            }
            r
        }
        PencilSearch::Found(w) => {
            let other = pencil_partner(&w, a, b);
            let Some(m) = solve(&w.pencil, other) else {
                return ClassificationReport::new(
                    label,
                    Verdict::Unknown,
                    ConditionTrace::new(Rule::NoRuleFired),
                );
            };
            let v = has_only_real_eigenvalues(&m, cfg);
            let mut r = ClassificationReport::new(
                label,
                v,
                ConditionTrace::new(Rule::NonsingularPairSpectrum),
            )
            .certify(Certificate::Pencil { witness: w.clone() });
            if let Some(x) = max_imag(&m, cfg) {
                r = r.quantity("max_relative_imag", x);
            }
            if v.is_yes() && label == PropertyLabel::TwsdB {
                match seq_nonsingular_pair(&w.pencil, other, cfg) {
                    Ok(seq) => r = r.certify(sequence_cert(set, seq)),
                    Err(e) => r = r.note(format!("sequence not constructed: {e}")),
                }
            }
            r
        }
    }
}

fn twsdb_report(verdict: Verdict, rule: Rule) -> ClassificationReport {
    ClassificationReport::new(PropertyLabel::TwsdB, verdict, ConditionTrace::new(rule))
}

pub fn check_twsdb_set(set: &SymMatrixSet, cfg: &Config) -> ClassificationReport {
    if set.len() == 1 {
        let q = sdo_diagonalizer(set, cfg);
        return twsdb_report(Verdict::Yes, Rule::Trivial).certify(diagonalizer_cert(set, q));
    }
    if set.len() == 2 {
        return twsdb_pair(set, PropertyLabel::TwsdB, cfg);
    }
    if let Some(c) = kernel_sequence(set, cfg) {
        return twsdb_report(Verdict::Yes, Rule::CommonKernel).certify(c);
    }
    let sd = check_sd(set, cfg);
    if sd.verdict.is_yes() {
        return sd.wrap(PropertyLabel::TwsdB, Rule::ImpliedBySd);
    }
    if sd.trace.rules.contains(&Rule::DefinitePencilCommutators) {
        return sd.wrap(PropertyLabel::TwsdB, Rule::DefinitePencilCollapse);
    }
    let PencilSearch::Found(w) = find_nonsingular_pencil(set, cfg) else {
        return twsdb_report(Verdict::Unknown, Rule::NoRuleFired)
            .note("no nonsingular pencil found and no common kernel");
    };
    let s = &w.pencil;
    let scan = match SpectralScan::run(set, s, cfg) {
        Ok(x) => x,
        Err(e) => return twsdb_report(Verdict::Unknown, Rule::NoRuleFired).note(e.to_string()),
    };
    let pencil = Certificate::Pencil { witness: w.clone() };
    if let Some(i) = scan.nonreal {
        return twsdb_report(Verdict::No, Rule::RealSpectrumNecessary)
            .certify(pencil)
            .note(format!("S⁻¹A{i} has a non-real eigenvalue"));
    }
    let mut nilpotent_unknown = false;
    for (i, j, c) in &scan.comm.mats {
        if c.norm() <= comm_threshold(&scan.comm) {
            continue;
        }
        match is_nilpotent(c, cfg) {
            Verdict::No => {
                return twsdb_report(Verdict::No, Rule::NilpotentCommutatorNecessary)
                    .certify(pencil)
                    .certify(scan.comm.cert)
                    .note(format!("[A{i}, A{j}]_S is not nilpotent"))
            }
            Verdict::Unknown => nilpotent_unknown = true,
            Verdict::Yes => {}
        }
    }
    if scan.comm.vanish && scan.all_real {
        for (i, a) in set.mats().iter().enumerate() {
            let Some(m) = solve(s, a) else { continue };
            let Ok(f) = real_jordan_form(&m, cfg) else {
                continue;
            };
            if f.has_distinct_blocks(cfg.eig * m.norm()) {
                let mut r = twsdb_report(Verdict::Yes, Rule::DistinctBlocksMember)
                    .quantity("member", i as f64)
                    .certify(pencil.clone())
                    .certify(Certificate::Jordan {
                        forms: vec![JordanEntry { index: i, form: f }],
                    });
                match seq_nonsingular_pair(s, a, cfg) {
                    Ok(seq) => r = r.certify(sequence_cert(set, seq)),
                    Err(e) => r = r.note(format!("sequence not constructed: {e}")),
                }
                return r;
            }
        }
    }
    if set.len() == 3 && scan.all_real {
        let (j, k) = triple_others(&w);
        if let Ok(c) = s_commutator(set.get(j), set.get(k), s, cfg) {
            if c.norm() <= comm_threshold(&scan.comm) {
                return twsdb_report(Verdict::Yes, Rule::CommutingTriple)
                    .certify(pencil)
                    .certify(scan.comm.cert)
                    .note(format!(
                        "pencil replaces A{}; [A{j}, A{k}]_S vanishes",
                        3 - j - k
                    ));
            }
        }
    }
    let mut r = twsdb_report(Verdict::Unknown, Rule::NoRuleFired)
        .certify(pencil)
        .certify(scan.comm.cert);
    if nilpotent_unknown {
        r = r.note("nilpotency of some S-commutator is numerically undecided");
    }
    if !scan.all_real {
        r = r.note("realness of some spectrum is numerically undecided");
    }
    r
}

fn comm_threshold(c: &Commutators) -> f64 {
    match &c.cert {
        Certificate::Commutator { threshold, .. } => *threshold,
        _ => 0.0,
    }
}

/// The two members kept when the pencil replaces the member with the
/// largest coefficient.
fn triple_others(w: &PencilWitness) -> (usize, usize) {
    let big = (0..3)
        .max_by(|&x, &y| w.coeffs[x].abs().total_cmp(&w.coeffs[y].abs()))
        .unwrap_or(0);
    let rest: Vec<usize> = (0..3).filter(|&x| x != big).collect();
    (rest[0], rest[1])
}

struct SpectralScan {
    /// First member with a non-real `S⁻¹Aᵢ` spectrum.
    nonreal: Option<usize>,
    all_real: bool,
    comm: Commutators,
}

impl SpectralScan {
    fn run(set: &SymMatrixSet, s: &Mat, cfg: &Config) -> Result<Self> {
        let mut nonreal = None;
        let mut all_real = true;
        for (i, a) in set.mats().iter().enumerate() {
            let m = solve(s, a).ok_or_else(|| Error::Singular("pencil".into()))?;
            match has_only_real_eigenvalues(&m, cfg) {
                Verdict::Yes => {}
                Verdict::No => {
                    nonreal.get_or_insert(i);
                    all_real = false;
                }
                Verdict::Unknown => all_real = false,
            }
        }
        Ok(SpectralScan {
            nonreal,
            all_real,
            comm: commutators(set, Some(s), cfg)?,
        })
    }
}

fn twsd_report(verdict: Verdict, rule: Rule) -> ClassificationReport {
    ClassificationReport::new(PropertyLabel::Twsd, verdict, ConditionTrace::new(rule))
}

pub fn check_twsd(set: &SymMatrixSet, cfg: &Config) -> ClassificationReport {
    if set.dim() == 2 && set.len() == 2 {
        return twsdb_pair(set, PropertyLabel::TwsdB, cfg)
            .wrap(PropertyLabel::Twsd, Rule::TwoByTwoPair);
    }
    let tb = check_twsdb_set(set, cfg);
    if tb.verdict.is_yes() {
        return tb.wrap(PropertyLabel::Twsd, Rule::ImpliedByTwsdB);
    }
    if set.len() == 2 {
        if let DefiniteSearch::Found(w) = find_definite_pencil(set, cfg) {
            let mut r = twsd_report(Verdict::Yes, Rule::SemidefinitePencil)
                .certify(Certificate::Pencil { witness: w.clone() });
            match seq_psd_pencil(set.get(0), set.get(1), &w) {
                Ok(seq) => r = r.certify(sequence_cert(set, seq)),
                Err(e) => r = r.note(format!("sequence not constructed: {e}")),
            }
            return r;
        }
        if let PencilSearch::Found(w) = find_nonsingular_pencil(set, cfg) {
            let other = pencil_partner(&w, set.get(0), set.get(1));
            if set.dim() % 2 == 1 {
                return twsd_report(Verdict::Yes, Rule::RealEigenvalueSplit)
                    .certify(Certificate::Pencil { witness: w })
                    .note("odd dimension: a real eigenvalue exists");
            }
            if let Some(m) = solve(&w.pencil, other) {
                if let Ok(ev) = clustered_eigenvalues(&m, cfg) {
                    let s = m.norm().max(f64::MIN_POSITIVE);
                    if let Some((z, _)) = ev.iter().find(|(z, _)| z.im.abs() <= cfg.eig * s) {
                        return twsd_report(Verdict::Yes, Rule::RealEigenvalueSplit)
                            .certify(Certificate::Pencil { witness: w.clone() })
                            .quantity("real_eigenvalue", z.re);
                    }
                }
            }
        }
    }
    let comps = block_components(set, cfg);
    if comps.len() > 1 {
        for comp in &comps {
            if comp.len() == 1 {
                let m = set.dim();
                let mut e = vec![-1.0; m];
                e[comp[0]] = (m - 1) as f64;
                let id = Mat::identity(m, m);
                let mut r = twsd_report(Verdict::Yes, Rule::PermutationBlockSplit)
                    .note(format!("1×1 block at index {}", comp[0]));
                if let Ok(seq) = CongruenceSequence::diagonal_power(id.clone(), e, id) {
                    r = r.certify(sequence_cert(set, seq));
                }
                return r;
            }
            let sub = check_twsdb_set(&set.principal(comp), cfg);
            if sub.verdict.is_yes() {
                return twsd_report(Verdict::Yes, Rule::PermutationBlockSplit)
                    .note(format!("block {comp:?} is TWSD-B by {:?}", sub.trace.rules))
                    .quantity("block_size", comp.len() as f64);
            }
        }
    }
    twsd_report(Verdict::Unknown, Rule::NoRuleFired).note("no sufficient condition applies")
}

/// Connected components of the union sparsity graph, entries at most
/// `τ_comm·maxᵢ‖Aᵢ‖` counting as zero.
pub fn block_components(set: &SymMatrixSet, cfg: &Config) -> Vec<Vec<usize>> {
    let m = set.dim();
    let thr = cfg.comm * set.max_norm();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for a in set.mats() {
        for i in 0..m {
            for j in 0..i {
                if a[(i, j)].abs() > thr {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..m {
        let r = find(&mut parent, i);
        comps.entry(r).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = comps.into_values().collect();
    out.sort();
    out
}

fn dwsd_report(verdict: Verdict, rule: Rule) -> ClassificationReport {
    ClassificationReport::new(PropertyLabel::Dwsd, verdict, ConditionTrace::new(rule))
}

pub fn check_dwsd(set: &SymMatrixSet, cfg: &Config) -> ClassificationReport {
    if set.len() == 1 {
        return dwsd_report(Verdict::Yes, Rule::Trivial);
    }
    if set.len() == 2 {
        return twsdb_pair(set, PropertyLabel::Dwsd, cfg);
    }
    let sd = check_sd(set, cfg);
    if sd.verdict.is_yes() {
        return sd.wrap(PropertyLabel::Dwsd, Rule::ImpliedBySd);
    }
    if sd.trace.rules.contains(&Rule::DefinitePencilCommutators) {
        return sd.wrap(PropertyLabel::Dwsd, Rule::DefinitePencilCollapse);
    }
    let PencilSearch::Found(w) = find_nonsingular_pencil(set, cfg) else {
        return dwsd_report(Verdict::Unknown, Rule::NoRuleFired)
            .note("no nonsingular pencil found");
    };
    let s = &w.pencil;
    let pencil = Certificate::Pencil { witness: w.clone() };
    if set.len() == 3 {
        let (j, k) = triple_others(&w);
        let real = [j, k].into_iter().map(|i| {
            solve(s, set.get(i)).map_or(Verdict::Unknown, |m| has_only_real_eigenvalues(&m, cfg))
        });
        let real = real.fold(Verdict::Yes, |acc, v| match (acc, v) {
            (Verdict::No, _) | (_, Verdict::No) => Verdict::No,
            (Verdict::Unknown, _) | (_, Verdict::Unknown) => Verdict::Unknown,
            _ => Verdict::Yes,
        });
        let pair = SymMatrixSet::with_tolerance(
            vec![set.get(j).clone(), set.get(k).clone()],
            f64::INFINITY,
        );
        let comm = pair.and_then(|p| commutators(&p, Some(s), cfg));
        let Ok(comm) = comm else {
            return dwsd_report(Verdict::Unknown, Rule::NoRuleFired).certify(pencil);
        };
        let verdict = match (real, comm.vanish) {
            (_, false) | (Verdict::No, _) => Verdict::No,
            (Verdict::Yes, true) => Verdict::Yes,
            _ => Verdict::Unknown,
        };
        return dwsd_report(verdict, Rule::CommutingRealTriple)
            .certify(pencil)
            .certify(comm.cert)
            .note(format!("pencil replaces A{}", 3 - j - k));
    }
    match SpectralScan::run(set, s, cfg) {
        Ok(scan) if scan.nonreal.is_some() || !scan.comm.vanish => {
            dwsd_report(Verdict::No, Rule::DwsdNecessaryScreen)
                .certify(pencil)
                .certify(scan.comm.cert)
        }
        Ok(scan) => dwsd_report(Verdict::Unknown, Rule::NoRuleFired)
            .certify(pencil)
            .certify(scan.comm.cert)
            .note("necessary conditions hold"),
        Err(e) => dwsd_report(Verdict::Unknown, Rule::NoRuleFired).note(e.to_string()),
    }
}

/// Samples `seq` at `k = 10, 10², 10³` and promotes it to a TWSD-B witness
/// when `P_kᵀA₁P_k` stays diagonal and bounded while every off-diagonal part
/// decays. The evidence is numerical.
pub fn check_twsd_bounded_promotion(
    set: &SymMatrixSet,
    seq: &CongruenceSequence,
    cfg: &Config,
) -> Result<ClassificationReport> {
    let a1 = set.get(0);
    if linalg::rcond(a1) <= cfg.det {
        return Err(Error::Singular(
            "the first matrix must be nonsingular".into(),
        ));
    }
    let grid = [10.0, 100.0, 1000.0];
    let mut worst_off = 0.0f64;
    let mut norms = Vec::new();
    for &k in &grid {
        let p = seq.evaluate(k)?;
        let t = p.transpose() * a1 * &p;
        let n = t.norm().max(f64::MIN_POSITIVE);
        worst_off = worst_off.max(linalg::offdiag_norm(&t) / n);
        norms.push(linalg::diag_norm(&t));
    }
    let lo = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = norms.iter().copied().fold(0.0, f64::max);
    let ver = verify_sequence(set, seq, &grid)?;
    let ok = worst_off <= cfg.diag && hi <= 2.0 * lo && ver.monotone_decay && ver.det_constant;
    let mut r = twsdb_report(
        if ok { Verdict::Yes } else { Verdict::Unknown },
        if ok {
            Rule::BoundedPromotion
        } else {
            Rule::NoRuleFired
        },
    )
    .quantity("first_offdiag_ratio", worst_off)
    .quantity(
        "first_diag_growth",
        if lo > 0.0 { hi / lo } else { f64::INFINITY },
    )
    .certify(Certificate::Sequence {
        sequence: seq.clone(),
        verification: Some(ver),
    });
    r = r.note(if ok {
        "numerical evidence on k = 10, 100, 1000"
    } else {
        "no promotion: first congruence not diagonal and bounded, or no decay"
    });
    Ok(r)
}

/// Runs the five unparameterized checks.
pub fn classify_all(set: &SymMatrixSet, cfg: &Config) -> Vec<ClassificationReport> {
    vec![
        check_sdo(set, cfg),
        check_sd(set, cfg),
        check_twsdb_set(set, cfg),
        check_twsd(set, cfg),
        check_dwsd(set, cfg),
    ]
}

/// Violated implications among reports of one set. Only proven inclusions
/// are checked.
pub fn lattice_violations(
    set: &SymMatrixSet,
    reports: &[ClassificationReport],
    cfg: &Config,
) -> Vec<String> {
    let get = |p: PropertyLabel| reports.iter().find(|r| r.property == p).map(|r| r.verdict);
    let mut out = Vec::new();
    let mut implies = |from: PropertyLabel, to: PropertyLabel| {
        if let (Some(a), Some(b)) = (get(from), get(to)) {
            if a.is_yes() && b.is_no() {
                out.push(format!("{from} is yes but {to} is no"));
            }
        }
    };
    use PropertyLabel::*;
    implies(Sdo, Sd);
    implies(Sd, TwsdB);
    implies(TwsdB, Twsd);
    implies(Sd, Dwsd);
    let pair_nonsingular =
        set.len() == 2 && matches!(find_nonsingular_pencil(set, cfg), PencilSearch::Found(_));
    let definite = find_definite_pencil(set, cfg).positive_definite().is_some();
    if pair_nonsingular || definite {
        implies(TwsdB, Dwsd);
        implies(Dwsd, TwsdB);
    }
    if definite {
        implies(TwsdB, Sd);
        implies(Dwsd, Sd);
    }
    if set.len() == 2 && set.dim() == 2 {
        implies(Twsd, TwsdB);
    }
    if set.len() == 2 && !pair_nonsingular {
        for p in [TwsdB, Dwsd] {
            if get(p).is_some_and(|v| !v.is_yes()) {
                out.push(format!("{p} must be yes for a singular pair"));
            }
        }
    }
    out
}

/// Checks one labelled property. Projective labels go through the
/// factorization module.
pub fn check(
    set: &SymMatrixSet,
    label: PropertyLabel,
    cfg: &Config,
) -> Result<ClassificationReport> {
    Ok(match label {
        PropertyLabel::Sdo => check_sdo(set, cfg),
        PropertyLabel::Sd => check_sd(set, cfg),
        PropertyLabel::Twsd => check_twsd(set, cfg),
        PropertyLabel::TwsdB => check_twsdb_set(set, cfg),
        PropertyLabel::Dwsd => check_dwsd(set, cfg),
        PropertyLabel::TSdo(n) => check_t_sdo(set, n, cfg)?,
        PropertyLabel::TSd(n) => check_t_sd(set, n, cfg)?,
        PropertyLabel::DSdo(n) => crate::dsdo::check_d_sdo(set, n, cfg)?,
        PropertyLabel::DSd(n) => crate::dsdo::check_d_sd(set, n, cfg)?,
    })
}

impl ClassificationReport {
    pub(crate) fn projective(property: PropertyLabel, verdict: Verdict, rule: Rule) -> Self {
        ClassificationReport::new(property, verdict, ConditionTrace::new(rule))
    }

    pub(crate) fn relabel(self, property: PropertyLabel, rule: Rule) -> Self {
        self.wrap(property, rule)
    }

    pub(crate) fn with_note(self, n: impl Into<String>) -> Self {
        self.note(n)
    }
}
