use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use simdiag::canon::{synthesize_lancaster_pair, LancasterBlock};
use simdiag::classify::{self, lattice_violations, ClassificationReport, PropertyLabel};
use simdiag::config::TOLERANCE_NAMES;
use simdiag::dsdo::{dsdo_construct, factorization_at};
use simdiag::io::{parse_matrix_set, to_rows, write_json, write_whitespace, FormatHint};
use simdiag::qcqp::{homogenize, lp_relaxation, solve_single_constraint, QcqpInstance, SingleConstraintProblem};
use simdiag::sequences::{verify_sequence, CongruenceSequence, DEFAULT_K_GRID};
use simdiag::{linalg, Config, Error, SymMatrixSet, Verdict};

const EXIT_ERROR: u8 = 3;
const EXIT_USAGE: u8 = 64;

/// Exact and weak simultaneous diagonalization of symmetric matrix sets.
///
/// Tolerances are overridden with `--tol.NAME=value` or the environment
/// variable `SIMDIAG_TOL_NAME`; the seed with `SIMDIAG_SEED`.
#[derive(Parser, Debug)]
#[command(name = "simdiag", version)]
struct Cli {
    #[command(flatten)]
    out: Output,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct Output {
    /// Emit a JSON report (the default).
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Emit a plain text report.
    #[arg(long, global = true)]
    text: bool,
}

#[derive(Args, Debug)]
struct Input {
    /// Matrix-set file (JSON or whitespace format); `-` reads stdin.
    path: String,
    /// Replace each matrix by (A + Aᵀ)/2 instead of rejecting asymmetry.
    #[arg(long)]
    symmetrize: bool,
    #[arg(long, value_enum, default_value = "detect")]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Format {
    Detect,
    Json,
    Whitespace,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide one property, or all five unparameterized ones.
    Classify {
        #[command(flatten)]
        input: Input,
        /// SDO, SD, TWSD, TWSD-B, DWSD, T-SDO(n), T-SD(n), D-SDO(n), D-SD(n) or all.
        #[arg(long, default_value = "all")]
        property: String,
    },
    /// Print P_k from a TWSD-B or TWSD certificate and its decay table.
    Sequence {
        #[command(flatten)]
        input: Input,
        /// Comma-separated k values.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_K_GRID)]
        k: Vec<f64>,
    },
    /// Solve a single-constraint problem or an LP relaxation.
    Qcqp {
        /// `{"objective": B, "constraint": A, "rhs": b}` for min xᵀBx s.t. xᵀAx ≤ b.
        #[arg(long, conflicts_with = "relax", required_unless_present = "relax")]
        single: Option<String>,
        /// A general instance `{"objective": {a, lin, c}, "constraints": [...]}`.
        #[arg(long)]
        relax: Option<String>,
        /// Sequence parameter for the relaxation.
        #[arg(long, default_value_t = 1e3, requires = "relax")]
        k: f64,
    },
    /// Factor the set as PᵀDᵢP with orthonormal columns of P.
    Dsdo {
        #[command(flatten)]
        input: Input,
        /// Target dimension; defaults to L·m.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Build a pair from canonical block descriptors.
    Synth {
        /// JSON list, e.g. `[{"type":"finite","sign":1,"size":2,"lambda":0.5}]`.
        #[arg(long)]
        blocks: String,
        /// Scramble with a random congruence of this condition number.
        #[arg(long)]
        cond: Option<f64>,
        /// Write the whitespace format instead of JSON.
        #[arg(long)]
        whitespace: bool,
    },
}

/// What a command produced: a JSON document, its text rendering, and the exit code.
struct Outcome {
    doc: Value,
    text: String,
    code: u8,
    /// Print `text` verbatim whatever the output mode.
    raw: bool,
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Yes => 0,
        Verdict::No => 1,
        Verdict::Unknown => 2,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "domain",
        Error::Shape(_) => "shape",
        Error::Singular(_) => "singular",
        Error::JordanUnreliable { .. } => "jordan-unreliable",
        Error::CanonicalUnreliable(_) => "canonical-unreliable",
        Error::NotTwsdB(_) => "not-twsd-b",
        Error::KTooLarge(_) => "k-too-large",
        Error::Parse(_) => "parse",
    }
}

struct Failure {
    kind: &'static str,
    message: String,
    code: u8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            kind: error_kind(&e),
            message: e.to_string(),
            code: EXIT_ERROR,
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        kind: "usage",
        message: message.into(),
        code: EXIT_USAGE,
    }
}

fn read_text(path: &str) -> Result<String, Failure> {
    let r = if path == "-" {
        std::io::read_to_string(std::io::stdin())
    } else {
        std::fs::read_to_string(path)
    };
    r.map_err(|e| Failure {
        kind: "io",
        message: format!("{path}: {e}"),
        code: EXIT_ERROR,
    })
}

fn load(input: &Input, cfg: &Config) -> Result<SymMatrixSet, Failure> {
    let hint = match input.format {
        Format::Detect => FormatHint::Detect,
        Format::Json => FormatHint::Json,
        Format::Whitespace => FormatHint::Whitespace,
    };
    Ok(parse_matrix_set(&read_text(&input.path)?, hint, input.symmetrize, cfg)?)
}

fn load_json<T: serde::de::DeserializeOwned>(path: &str) -> Result<T, Failure> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Failure {
        kind: "parse",
        message: format!("{path}: line {}: {e}", e.line()),
        code: EXIT_ERROR,
    })
}

/// JSON has no infinities; they are written as strings.
fn real(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        json!("nan")
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn report_line(r: &ClassificationReport) -> String {
    let rules: Vec<String> = r
        .trace
        .rules
        .iter()
        .map(|x| serde_json::to_value(x).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default())
        .collect();
    format!("{}: {} [{}]", r.property, r.verdict, rules.join(" > "))
}

fn cmd_classify(input: &Input, property: &str, cfg: &Config) -> Result<Outcome, Failure> {
    let set = load(input, cfg)?;
    if property.eq_ignore_ascii_case("all") {
        let reports = classify::classify_all(&set, cfg);
        let violations = lattice_violations(&set, &reports, cfg);
        let mut text: Vec<String> = reports.iter().map(report_line).collect();
        for v in &violations {
            text.push(format!("lattice violation: {v}"));
        }
        return Ok(Outcome {
            doc: json!({
                "command": "classify",
                "dim": set.dim(),
                "count": set.len(),
                "reports": reports,
                "lattice_violations": violations,
            }),
            text: text.join("\n"),
            code: if violations.is_empty() { 0 } else { EXIT_ERROR },
            raw: false,
        });
    }
    let label: PropertyLabel = property.parse().map_err(|e: Error| usage(e.to_string()))?;
    let report = classify::check(&set, label, cfg)?;
    Ok(Outcome {
        text: report_line(&report),
        code: verdict_code(report.verdict),
        raw: false,
        doc: json!({
            "command": "classify",
            "dim": set.dim(),
            "count": set.len(),
            "report": report,
        }),
    })
}

/// The first sequence certificate among the TWSD-B and TWSD reports.
fn certified_sequence(set: &SymMatrixSet, cfg: &Config) -> (Verdict, Option<CongruenceSequence>, &'static str) {
    let bounded = classify::check_twsdb_set(set, cfg);
    if let Some(s) = bounded.sequence() {
        return (bounded.verdict, Some(s.clone()), "TWSD-B");
    }
    let weak = classify::check_twsd(set, cfg);
    if let Some(s) = weak.sequence() {
        return (weak.verdict, Some(s.clone()), "TWSD");
    }
    (weak.verdict, None, "TWSD")
}

fn cmd_sequence(input: &Input, ks: &[f64], cfg: &Config) -> Result<Outcome, Failure> {
    let set = load(input, cfg)?;
    if ks.is_empty() || ks.iter().any(|&k| !(k >= 1.0 && k.is_finite())) {
        return Err(usage("--k needs finite values ≥ 1"));
    }
    let (verdict, seq, property) = certified_sequence(&set, cfg);
    let Some(seq) = seq else {
        let code = if verdict.is_no() { 1 } else { 2 };
        return Ok(Outcome {
            doc: json!({"command": "sequence", "property": property, "verdict": verdict, "sequence": null}),
            text: format!("{property}: {verdict}; no sequence certificate"),
            code,
            raw: false,
        });
    };
    let mut rows = Vec::new();
    let mut text = vec![format!(
        "{property}: {verdict} via {} (det {:e})",
        seq.recipe_name(),
        seq.det_value
    )];
    text.push(format!("{:>12} {:>14} {:>14} {:>14}", "k", "offdiag", "diag", "det"));
    for &k in ks {
        let p = seq.evaluate(k)?;
        let (mut off, mut diag) = (0.0, 0.0f64);
        for a in set.mats() {
            let c = p.transpose() * a * &p;
            off += linalg::offdiag_norm(&c);
            diag = diag.max(linalg::diag_norm(&c));
        }
        let det = p.determinant();
        text.push(format!("{k:>12e} {off:>14.6e} {diag:>14.6e} {det:>14.6e}"));
        rows.push(json!({"k": k, "p": to_rows(&p), "offdiag": off, "diag": diag, "det": det}));
    }
    // The decay law is judged on at least three points.
    let mut grid: Vec<f64> = ks.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    if grid.len() < 3 {
        grid = DEFAULT_K_GRID.to_vec();
    }
    let verification = verify_sequence(&set, &seq, &grid)?;
    text.push(format!(
        "monotone decay: {}, bounded diagonal: {}, constant det: {}",
        verification.monotone_decay, verification.bounded_diag, verification.det_constant
    ));
    Ok(Outcome {
        doc: json!({
            "command": "sequence",
            "property": property,
            "verdict": verdict,
            "recipe": seq.recipe_name(),
            "det_value": seq.det_value,
            "table": rows,
            "verification": verification,
        }),
        text: text.join("\n"),
        code: verdict_code(verdict),
        raw: false,
    })
}

fn cmd_qcqp_single(path: &str, cfg: &Config) -> Result<Outcome, Failure> {
    let raw: SingleConstraintProblem = load_json(path)?;
    let p = SingleConstraintProblem::new(raw.objective, raw.constraint, raw.rhs, cfg)?;
    let s = solve_single_constraint(&p, cfg)?;
    let status = serde_json::to_value(s.status).unwrap_or(Value::Null);
    let mut doc = json!({"command": "qcqp", "mode": "single", "solution": s});
    doc["solution"]["value"] = real(s.value);
    let mut text = format!("status: {}\nvalue: {}", status.as_str().unwrap_or("?"), s.value);
    if let Some(x) = &s.point {
        text.push_str(&format!("\npoint: {x:?}"));
    }
    Ok(Outcome { doc, text, code: 0, raw: false })
}

fn cmd_qcqp_relax(path: &str, k: f64, cfg: &Config) -> Result<Outcome, Failure> {
    let q: QcqpInstance = load_json(path)?;
    q.validate(cfg.sym)?;
    let lifted = homogenize(&q);
    let mats: Vec<_> = std::iter::once(&lifted.objective)
        .chain(&lifted.constraints)
        .chain(&lifted.equalities)
        .map(|f| f.a.clone())
        .collect();
    let set = SymMatrixSet::with_tolerance(mats, cfg.sym)?;
    let (verdict, seq, property) = certified_sequence(&set, cfg);
    let Some(seq) = seq else {
        return Err(Failure {
            kind: "no-sequence",
            message: format!("the data matrices have no sequence certificate ({property}: {verdict})"),
            code: EXIT_ERROR,
        });
    };
    let relax = lp_relaxation(&lifted, &seq, k)?;
    let sol = relax.solve(&lifted);
    // Drop the homogenizing coordinate and undo its sign.
    let x: Option<Vec<f64>> = sol.x.as_ref().map(|x| {
        let (last, head) = x.split_last().expect("lifted point is nonempty");
        let s = if *last < 0.0 { -1.0 } else { 1.0 };
        head.iter().map(|v| s * v).collect()
    });
    let (value, violation) = match &x {
        Some(x) => (q.objective_value(x), q.violation(x)),
        None => (f64::NAN, f64::NAN),
    };
    let text = format!(
        "relaxation value: {}\noriginal value: {value}\nviolation: {violation:e}\ndropped mass: {:e} (relative {:e})",
        sol.value.map_or("none".into(), |v| v.to_string()),
        relax.dropped_mass, relax.relative_dropped
    );
    let mut doc = json!({
        "command": "qcqp",
        "mode": "relax",
        "k": k,
        "sequence": {"property": property, "recipe": seq.recipe_name()},
        "dropped_mass": relax.dropped_mass,
        "relative_dropped": relax.relative_dropped,
        "lp": sol.outcome,
        "point": x,
    });
    doc["relaxation_value"] = sol.value.map_or(Value::Null, real);
    doc["value"] = real(value);
    doc["violation"] = real(violation);
    Ok(Outcome { doc, text, code: 0, raw: false })
}

fn cmd_dsdo(input: &Input, n: Option<usize>, cfg: &Config) -> Result<Outcome, Failure> {
    let set = load(input, cfg)?;
    let f = match n {
        None => dsdo_construct(&set)?,
        Some(n) => factorization_at(&set, n)?.ok_or_else(|| Failure {
            kind: "domain",
            message: format!("no constructive factorization at n = {n}"),
            code: EXIT_ERROR,
        })?,
    };
    let text = format!(
        "n = {}, residual {:e}, ‖PᵀP − I‖ = {:e}",
        f.n(),
        f.residual,
        f.feasibility()
    );
    // `dim` and `mats` make the document readable as a matrix-set file of the Dᵢ.
    Ok(Outcome {
        doc: json!({
            "command": "dsdo",
            "dim": f.n(),
            "mats": f.d.iter().map(to_rows).collect::<Vec<_>>(),
            "p": to_rows(&f.p),
            "mode": f.mode,
            "residual": f.residual,
            "feasibility": f.feasibility(),
        }),
        text,
        code: 0,
        raw: false,
    })
}

fn cmd_synth(blocks: &str, cond: Option<f64>, whitespace: bool, cfg: &Config) -> Result<Outcome, Failure> {
    let blocks: Vec<LancasterBlock> = serde_json::from_str(blocks).map_err(|e| usage(format!("--blocks: {e}")))?;
    let m: usize = blocks.iter().map(LancasterBlock::dim).sum();
    let scramble = cond.map(|c| {
        let mut r = simdiag::generators::rng(cfg.seed);
        simdiag::generators::conditioned_transform(&mut r, m, c)
    });
    let (a, b) = synthesize_lancaster_pair(&blocks, scramble.as_ref())?;
    let set = SymMatrixSet::symmetrized(vec![a, b])?;
    let text = if whitespace { write_whitespace(&set) } else { write_json(&set) };
    let doc = serde_json::from_str(&write_json(&set)).expect("writer emits valid JSON");
    Ok(Outcome { doc, text, code: 0, raw: whitespace })
}

type Overrides = Vec<(String, String)>;

/// Splits `--tol.NAME=value` (or `--tol.NAME value`) off the argument list.
fn take_tolerances(args: Vec<String>) -> Result<(Vec<String>, Overrides), Failure> {
    let mut rest = Vec::new();
    let mut tols = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let Some(spec) = a.strip_prefix("--tol.") else {
            rest.push(a);
            continue;
        };
        let (name, value) = match spec.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => {
                let v = it.next().ok_or_else(|| usage(format!("--tol.{spec} needs a value")))?;
                (spec.to_string(), v)
            }
        };
        tols.push((name, value));
    }
    Ok((rest, tols))
}

/// Defaults, then `SIMDIAG_TOL_*` / `SIMDIAG_SEED`, then flags.
fn build_config(flags: &[(String, String)]) -> Result<Config, Failure> {
    let mut cfg = Config::default();
    for name in TOLERANCE_NAMES {
        let var = format!("SIMDIAG_TOL_{}", name.to_ascii_uppercase());
        if let Ok(v) = std::env::var(&var) {
            cfg.set(name, &v).map_err(|e| usage(format!("{var}: {e}")))?;
        }
    }
    if let Ok(v) = std::env::var("SIMDIAG_SEED") {
        cfg.set("seed", &v).map_err(|e| usage(format!("SIMDIAG_SEED: {e}")))?;
    }
    for (name, value) in flags {
        cfg.set(name, value).map_err(|e| usage(e.to_string()))?;
    }
    Ok(cfg)
}

fn run(cli: &Cli, cfg: &Config) -> Result<Outcome, Failure> {
    match &cli.cmd {
        Command::Classify { input, property } => cmd_classify(input, property, cfg),
        Command::Sequence { input, k } => cmd_sequence(input, k, cfg),
        Command::Qcqp { single: Some(p), .. } => cmd_qcqp_single(p, cfg),
        Command::Qcqp { relax: Some(p), k, .. } => cmd_qcqp_relax(p, *k, cfg),
        Command::Qcqp { .. } => Err(usage("qcqp needs --single or --relax")),
        Command::Dsdo { input, n } => cmd_dsdo(input, *n, cfg),
        Command::Synth { blocks, cond, whitespace } => cmd_synth(blocks, *cond, *whitespace, cfg),
    }
}

fn emit_failure(f: &Failure, json: bool) -> ExitCode {
    if json {
        let doc = json!({"schema": 1, "error": {"kind": f.kind, "message": f.message}});
        println!("{}", serde_json::to_string_pretty(&doc).expect("plain data serializes"));
    }
    eprintln!("simdiag: {}", f.message);
    ExitCode::from(f.code)
}

fn main() -> ExitCode {
    let wants_json = |args: &[String]| !args.iter().any(|a| a == "--text");
    let (args, tols) = match take_tolerances(std::env::args().collect()) {
        Ok(x) => x,
        Err(f) => return emit_failure(&f, false),
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let json = args.iter().any(|a| a == "--json");
            if json {
                let doc = json!({"schema": 1, "error": {"kind": "usage", "message": e.render().to_string().lines().next().unwrap_or_default().trim_start_matches("error: ")}});
                println!("{}", serde_json::to_string_pretty(&doc).expect("plain data serializes"));
            }
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let json = wants_json(&args);
    let result = build_config(&tols).and_then(|cfg| run(&cli, &cfg));
    match result {
        Ok(out) => {
            if out.raw {
                print!("{}", out.text);
            } else if json {
                let mut doc = json!({"schema": 1});
                if let (Value::Object(d), Value::Object(body)) = (&mut doc, out.doc) {
                    d.extend(body);
                }
                println!("{}", serde_json::to_string_pretty(&doc).expect("plain data serializes"));
            } else {
                println!("{}", out.text.trim_end());
            }
            ExitCode::from(out.code)
        }
        Err(f) => emit_failure(&f, json),
    }
}
