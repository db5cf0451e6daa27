//! `dpc`: command-line front end for dirichlet-pc.
//!
//! Exit codes: 0 success, 1 runtime failure (I/O and the like), 2 invalid
//! input, 3 certification failure (an uncertified zero set or a failed check).

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use dirichlet_pc::arith::{euler_phi, gcd};
use dirichlet_pc::characters::{enumerate_characters, CharacterError, CharacterLabel, DirichletCharacter};
use dirichlet_pc::checks::{self, CheckError, CheckLine, Suite};
use dirichlet_pc::conjectures::{
    dyadic_profile, eh_sum, montgomery_table, weak_form_summary, weak_form_table, ConjectureError, MontgomeryRow,
    WeakRow, WeakSummary, DEFAULT_EPSILON,
};
use dirichlet_pc::explicit::{psi_progression_from_zeros, ExplicitError, ExplicitFormulaRun};
use dirichlet_pc::paircorr::{f_q, spacing_histogram, PairCorrError, PairCorrInput, Window, ZeroSets};
use dirichlet_pc::report::{
    dyadic_rows, eh_rows, histogram_rows, write_report, zero_rows, PsiRow, ReportConfig, ReportError, DYADIC_COLUMNS,
    EH_COLUMNS, HISTOGRAM_COLUMNS, ZERO_COLUMNS,
};
use dirichlet_pc::sieve::{LambdaTable, SieveError};
use dirichlet_pc::store::{
    cache_path, emit_table, library_for_modulus, load_for_reuse, write_table, write_zero_cache, Cell, StoreError,
    TableFormat, TableRow,
};
use dirichlet_pc::zeros::{default_mesh_step, scan_zeros_with_tolerance, ZeroError, ZeroLibrary, ZeroSet};

use config::{RunConfig, CACHE_ENV};

/// Invalid user input; exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct Invalid(pub String);

/// A check or certificate that did not hold; exit code 3.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct CertificationFailure(pub String);

#[derive(Parser, Debug)]
#[command(name = "dpc", version, about = "Dirichlet L-function zeros, pair correlation and primes in progressions")]
struct Cli {
    /// Print a machine-readable JSON summary on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Validate the inputs and stop before computing.
    #[arg(long, global = true)]
    dry_run: bool,
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Cache root (zero sets live under `<dir>/zeros`).
    #[arg(long, global = true, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Table format: csv or json.
    #[arg(long, global = true)]
    format: Option<TableFormat>,
    /// Write the table to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scan (or load from cache) the critical-line zeros of the characters mod q.
    Zeros(ZerosArgs),
    /// ψ(x), ψ(x; q, a) or ψ(x, χ) from the sieve.
    Psi(PsiArgs),
    /// The pair-correlation sum F_q(x, T).
    Paircorr(PairArgs),
    /// Truncated explicit formula for ψ(x; q, a).
    Explicit(ExplicitArgs),
    /// ψ(x; q, a) errors normalized by √(x/q) for q <= Q.
    Montgomery(MontgomeryArgs),
    /// Σ_{q <= Q} max_a |ψ(x; q, a) − x/φ(q)|.
    Eh(EhArgs),
    /// Errors normalized by √(x φ(q)^α / q) for q <= Q.
    Weak(WeakArgs),
    /// Dyadic block decomposition of ψ(x; q, a) − x/φ(q).
    Dyadic(DyadicArgs),
    /// Run an identity suite.
    Check(CheckArgs),
    /// Write the CSV report bundle.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct ZerosArgs {
    #[arg(long)]
    q: Option<u64>,
    #[arg(long = "T")]
    height: f64,
    /// Only this character (its primitive inducer is scanned).
    #[arg(long)]
    chi: Option<CharacterLabel>,
    #[arg(long)]
    mesh: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Allow replacing a certified cache file with an uncertified set.
    #[arg(long)]
    force: bool,
}

#[derive(Args, Debug)]
struct PsiArgs {
    #[arg(long)]
    x: f64,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    a: Option<u64>,
    #[arg(long, conflicts_with_all = ["q", "a"])]
    chi: Option<CharacterLabel>,
}

#[derive(Args, Debug)]
struct PairArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    a: u64,
    #[arg(long)]
    x: f64,
    #[arg(long = "T")]
    height: f64,
    /// integral or increment.
    #[arg(long)]
    check: Option<String>,
    /// Lower height U for the increment check.
    #[arg(long = "U")]
    lower: Option<f64>,
    /// Spacing histogram α:β:bins (q = 1 only).
    #[arg(long)]
    hist: Option<String>,
    /// symmetric (|γ| <= T) or positive (0 < γ <= T).
    #[arg(long, default_value = "symmetric")]
    window: String,
}

#[derive(Args, Debug)]
struct ExplicitArgs {
    #[arg(long)]
    x: f64,
    #[arg(long = "Z")]
    z: f64,
    #[arg(long, default_value_t = 1)]
    q: u64,
    #[arg(long)]
    a: Option<u64>,
}

#[derive(Args, Debug)]
struct MontgomeryArgs {
    /// One or more x values, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    x: Vec<f64>,
    #[arg(long = "Q")]
    big_q: u64,
    #[arg(long)]
    a: Option<u64>,
}

#[derive(Args, Debug)]
struct EhArgs {
    #[arg(long)]
    x: f64,
    #[arg(long = "Q")]
    big_q: u64,
}

#[derive(Args, Debug)]
struct WeakArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    x: f64,
    #[arg(long = "Q")]
    big_q: u64,
    /// One row per q (worst residue and RMS) instead of one per (q, a).
    #[arg(long)]
    summary: bool,
}

#[derive(Args, Debug)]
struct DyadicArgs {
    #[arg(long)]
    x: f64,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    a: u64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    eps: f64,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// orthogonality, integral, increment, realness, explicit, brun-titchmarsh or s-of-x.
    #[arg(long)]
    suite: Suite,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    a: Option<u64>,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long = "T")]
    height: Option<f64>,
    #[arg(long = "U")]
    lower: Option<f64>,
    #[arg(long = "Z")]
    z: Option<f64>,
    /// Interval length for brun-titchmarsh.
    #[arg(long)]
    y: Option<u64>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Output directory.
    #[arg(long, default_value = "report")]
    out: PathBuf,
}

type Table = (&'static [&'static str], Vec<Vec<Cell>>);

#[derive(Default)]
struct Outcome {
    summary: Map<String, Value>,
    table: Option<Table>,
    lines: Vec<String>,
    failure: Option<String>,
}

impl Outcome {
    fn with_table(columns: &'static [&'static str], rows: Vec<Vec<Cell>>) -> Self {
        Self {
            table: Some((columns, rows)),
            ..Default::default()
        }
    }
}

fn typed<R: TableRow>(rows: &[R]) -> Table {
    (R::columns(), rows.iter().map(TableRow::cells).collect())
}

struct Ctx {
    cfg: RunConfig,
    dry_run: bool,
}

impl Ctx {
    fn zero_sets(&self, q: u64, height: f64) -> anyhow::Result<ZeroSets> {
        let mut lib = ZeroLibrary::new(height);
        let (sets, _) = library_for_modulus(&self.cfg.cache_dir, &mut lib, q)?;
        Ok(sets)
    }
}

fn finite(name: &str, v: f64) -> Result<f64, Invalid> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Invalid(format!("--{name} must be finite, got {v}")))
    }
}

fn positive(name: &str, v: f64) -> Result<f64, Invalid> {
    if finite(name, v)? > 0.0 {
        Ok(v)
    } else {
        Err(Invalid(format!("--{name} must be positive, got {v}")))
    }
}

fn modulus(q: u64) -> Result<u64, Invalid> {
    if q == 0 {
        Err(Invalid("--q must be at least 1".into()))
    } else {
        Ok(q)
    }
}

fn unit(q: u64, a: u64) -> Result<(), Invalid> {
    modulus(q)?;
    if q > 1 && gcd(a % q, q) != 1 {
        return Err(Invalid(format!("a = {a} is not a unit mod {q}")));
    }
    Ok(())
}

fn sieve_bound(x: f64) -> Result<u64, Invalid> {
    positive("x", x)?;
    if x > dirichlet_pc::sieve::DESK_LIMIT as f64 {
        return Err(Invalid(format!("x = {x} exceeds the sieve limit {}", dirichlet_pc::sieve::DESK_LIMIT)));
    }
    Ok(x.floor().max(2.0) as u64)
}

fn dry() -> Outcome {
    let mut o = Outcome::default();
    o.summary.insert("dry_run".into(), Value::Bool(true));
    o.lines.push("dry run: inputs valid".into());
    o
}

fn run_zeros(args: &ZerosArgs, ctx: &Ctx) -> anyhow::Result<Outcome> {
    positive("T", args.height)?;
    let tol = args.tol.unwrap_or(ctx.cfg.tolerance);
    positive("tol", tol)?;
    let mesh = args.mesh.or(ctx.cfg.mesh);
    if let Some(m) = mesh {
        positive("mesh", m)?;
    }
    let inducers: Vec<DirichletCharacter> = match (args.chi, args.q) {
        (Some(label), q) => {
            if q.is_some_and(|q| q != label.modulus()) {
                return Err(Invalid(format!("--chi {label} is not a character mod {}", q.unwrap_or(0))).into());
            }
            vec![DirichletCharacter::from_label(label)?.conductor_and_inducer().1]
        }
        (None, Some(q)) => {
            let mut v: Vec<_> = enumerate_characters(modulus(q)?)?
                .iter()
                .map(|c| c.conductor_and_inducer().1)
                .collect();
            v.sort();
            v.dedup();
            v
        }
        (None, None) => return Err(Invalid("give --q or --chi".into()).into()),
    };
    if ctx.dry_run {
        return Ok(dry());
    }
    let custom = mesh.is_some() || tol != dirichlet_pc::zeros::DEFAULT_TOLERANCE;
    let mut rows = Vec::new();
    let mut sets_json = Vec::new();
    let mut uncertified = Vec::new();
    for chi in &inducers {
        let path = cache_path(&ctx.cfg.cache_dir, chi.label(), args.height);
        let cached = if custom { None } else { load_for_reuse(&path)?.filter(ZeroSet::is_certified) };
        let hit = cached.is_some();
        let set = match cached {
            Some(s) => s,
            None => {
                let step = mesh.unwrap_or_else(|| default_mesh_step(chi.modulus(), args.height));
                let s = scan_zeros_with_tolerance(chi, args.height, step, tol)?;
                write_zero_cache(&s, &path, args.force)?;
                s
            }
        };
        let c = set.completeness();
        if !c.certified {
            uncertified.push(set.character().to_string());
        }
        sets_json.push(json!({
            "character": set.character().to_string(),
            "found": c.found_count,
            "expected": c.expected_count,
            "stable": c.stable,
            "certified": c.certified,
            "cache": path.display().to_string(),
            "cache_hit": hit,
        }));
        rows.extend(zero_rows(&set));
    }
    let mut out = Outcome::with_table(ZERO_COLUMNS, rows);
    out.summary.insert("sets".into(), Value::Array(sets_json));
    if !uncertified.is_empty() {
        out.failure = Some(format!("uncertified zero sets: {}", uncertified.join(", ")));
    }
    Ok(out)
}

fn run_psi(args: &PsiArgs, ctx: &Ctx) -> anyhow::Result<Outcome> {
    let hi = sieve_bound(args.x)?;
    if let Some(label) = args.chi {
        let chi = DirichletCharacter::from_label(label)?;
        if ctx.dry_run {
            return Ok(dry());
        }
        let v = LambdaTable::up_to(hi)?.psi_character(args.x, &chi)?;
        static COLS: [&str; 4] = ["x", "chi", "re", "im"];
        return Ok(Outcome::with_table(
            &COLS,
            vec![vec![args.x.into(), label.to_string().into(), v.re.into(), v.im.into()]],
        ));
    }
    let q = modulus(args.q.unwrap_or(1))?;
    if let Some(a) = args.a {
        unit(q, a)?;
    }
    if ctx.dry_run {
        return Ok(dry());
    }
    let table = LambdaTable::up_to(hi)?;
    let values = match args.a {
        Some(a) => vec![(a, table.psi_progression(args.x, q, a)?)],
        None => table.psi_all_residues(args.x, q)?,
    };
    let main = args.x / euler_phi(q) as f64;
    let rows: Vec<PsiRow> = values
        .into_iter()
        .map(|(a, psi)| PsiRow {
            x: args.x,
            q,
            a,
            psi,
            error: psi - main,
        })
        .collect();
    Ok(Outcome::with_table(PsiRow::columns(), typed(&rows).1))
}

fn parse_hist(spec: &str) -> Result<(f64, f64, usize), Invalid> {
    let bad = || Invalid(format!("--hist expects alpha:beta:bins, got `{spec}`"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let alpha: f64 = parts[0].parse().map_err(|_| bad())?;
    let beta: f64 = parts[1].parse().map_err(|_| bad())?;
    let bins: usize = parts[2].parse().map_err(|_| bad())?;
    if !(alpha < beta) || bins == 0 {
        return Err(bad());
    }
    Ok((alpha, beta, bins))
}

fn check_outcome(lines: Vec<CheckLine>, mut out: Outcome) -> Outcome {
    let failed: Vec<String> = lines.iter().filter(|l| !l.passed).map(|l| l.to_string()).collect();
    out.summary.insert(
        "checks".into(),
        Value::Array(
            lines
                .iter()
                .map(|l| {
                    json!({
                        "suite": l.suite.name(),
                        "case": l.case,
                        "measured": l.measured,
                        "tolerance": l.tolerance,
                        "passed": l.passed,
                        "note": l.note,
                    })
                })
                .collect(),
        ),
    );
    out.lines.extend(lines.iter().map(|l| l.to_string()));
    if !failed.is_empty() {
        out.failure = Some(format!("{} check(s) failed", failed.len()));
    }
    out
}

fn run_paircorr(args: &PairArgs, ctx: &Ctx) -> anyhow::Result<Outcome> {
    unit(args.q, args.a)?;
    positive("x", args.x)?;
    positive("T", args.height)?;
    let window = match args.window.as_str() {
        "symmetric" => Window::Symmetric,
        "positive" => Window::Positive,
        other => return Err(Invalid(format!("--window must be symmetric or positive, got `{other}`")).into()),
    };
    let check = args.check.as_deref();
    match check {
        None | Some("integral") => {}
        Some("increment") => {
            let u = args.lower.ok_or_else(|| Invalid("--check increment needs --U".into()))?;
            if !(u >= 0.0 && u <= args.height) {
                return Err(Invalid(format!("--U must lie in [0, T], got {u}")).into());
            }
        }
        Some(other) => return Err(Invalid(format!("--check must be integral or increment, got `{other}`")).into()),
    }
    let hist = args.hist.as_deref().map(parse_hist).transpose()?;
    if hist.is_some() && args.q != 1 {
        return Err(Invalid("--hist is available for q = 1".into()).into());
    }
    if ctx.dry_run {
        return Ok(dry());
    }
    let sets = ctx.zero_sets(args.q, args.height)?;
    let input = PairCorrInput::new(args.q, args.a, args.x, args.height, sets.clone())?.with_window(window);
    let result = f_q(&input);
    let mut out = match hist {
        Some((alpha, beta, bins)) => {
            let zeta = &sets[&CharacterLabel::principal(1)?];
            let h = spacing_histogram(&zeta.ordinates_within(args.height), args.height, alpha, beta, bins)?;
            Outcome::with_table(HISTOGRAM_COLUMNS, histogram_rows(&h))
        }
        None => {
            let (c, r) = typed(std::slice::from_ref(&result));
            Outcome::with_table(c, r)
        }
    };
    out.summary.insert("re_f".into(), json!(result.value.re));
    out.summary.insert("im_f".into(), json!(result.value.im));
    out.summary.insert("regime".into(), json!(result.regime().to_string()));
    let lines = match check {
        Some("integral") => checks::integral(&sets, args.q, Some(args.a), args.x, args.height)?,
        Some("increment") => checks::increment(
            &sets,
            args.q,
            Some(args.a),
            args.x,
            args.lower.expect("validated"),
            args.height,
        )?,
        _ => return Ok(out),
    };
    Ok(check_outcome(lines, out))
}

fn run_explicit(args: &ExplicitArgs, ctx: &Ctx) -> anyhow::Result<Outcome> {
    let hi = sieve_bound(args.x)?;
    modulus(args.q)?;
    if let Some(a) = args.a {
        unit(args.q, a)?;
    }
    if !(args.z >= 2.0 && args.z <= args.x) {
        return Err(Invalid(format!("--Z must satisfy 2 <= Z <= x, got {}", args.z)).into());
    }
    if ctx.dry_run {
        return Ok(dry());
    }
    let sets = ctx.zero_sets(args.q, args.z)?;
    let table = LambdaTable::up_to(hi)?;
    let residues = args.a.map(|a| vec![a]).unwrap_or_else(|| checks::units(args.q));
    let mut runs: Vec<ExplicitFormulaRun> = Vec::new();
    let mut worst_path_gap: f64 = 0.0;
    for a in residues {
        let p = psi_progression_from_zeros(args.x, args.z, args.q, a, &sets, &table)?;
        worst_path_gap = worst_path_gap.max((p.run.reconstructed - p.via_characters).norm());
        runs.push(p.run);
    }
    let (c, r) = typed(&runs);
    let mut out = Outcome::with_table(c, r);
    out.summary.insert("character_path_gap".into(), json!(worst_path_gap));
    Ok(out)
}

fn qs_up_to(big_q: u64) -> Result<Vec<u64>, Invalid> {
    if big_q == 0 {
        return Err(Invalid("--Q must be at least 1".into()));
    }
    Ok((1..=big_q).collect())
}

fn run_montgomery(args: &MontgomeryArgs, ctx: &Ctx) -> anyhow::Result<Outcome> {
    let mut hi = 2;
    for &x in &args.x {
        hi = hi.max(sieve_bound(x)?);
    }
    let qs = qs_up_to(args.big_q)?;
    if let Some(a) = args.a {
        for &q in &qs {
            unit(q, a)?;
        }
    }
    if ctx.dry_run {
        return Ok(dry());
    }
    let rows = montgomery_table(&LambdaTable::up_to(hi)?, &args.x, &qs, args.a)?;
    let (c, r) = typed::<MontgomeryRow>(&rows);
    Ok(Outcome::with_table(c, r))
}

fn run_eh(args: &EhArgs, ctx: &Ctx) -> anyhow::Result<Outcome> {
    let hi = sieve_bound(args.x)?;
    qs_up_to(args.big_q)?;
    if args.big_q as f64 >= args.x {
        return Err(Invalid(format!("--Q must be below x = {}", args.x)).into());
    }
    if ctx.dry_run {
        return Ok(dry());
    }
    let eh = eh_sum(&LambdaTable::up_to(hi)?, args.x, args.big_q)?;
    let mut out = Outcome::with_table(EH_COLUMNS, eh_rows(&eh));
    out.summary.insert("value".into(), json!(eh.value));
    out.summary.insert("value_over_x".into(), json!(eh.ratio_to_x()));
    Ok(out)
}

fn run_weak(args: &WeakArgs, ctx: &Ctx) -> anyhow::Result<Outcome> {
    let hi = sieve_bound(args.x)?;
    let qs = qs_up_to(args.big_q)?;
    if !(0.0..=1.0).contains(&args.alpha) {
        return Err(Invalid(format!("--alpha must lie in [0, 1], got {}", args.alpha)).into());
    }
    if ctx.dry_run {
        return Ok(dry());
    }
    let rows = weak_form_table(&LambdaTable::up_to(hi)?, args.x, &qs, args.alpha)?;
    let (c, r) = if args.summary {
        typed::<WeakSummary>(&weak_form_summary(&rows))
    } else {
        typed::<WeakRow>(&rows)
    };
    Ok(Outcome::with_table(c, r))
}

fn run_dyadic(args: &DyadicArgs, ctx: &Ctx) -> anyhow::Result<Outcome> {
    let hi = sieve_bound(args.x)?;
    unit(args.q, args.a)?;
    if !(args.eps > 0.0 && args.eps < 1.0) {
        return Err(Invalid(format!("--eps must lie in (0, 1), got {}", args.eps)).into());
    }
    if args.q as f64 > args.x.powf(1.0 - args.eps) {
        return Err(Invalid(format!("q = {} exceeds x^(1-eps)", args.q)).into());
    }
    if ctx.dry_run {
        return Ok(dry());
    }
    let p = dyadic_profile(&LambdaTable::up_to(hi)?, args.x, args.q, args.a, args.eps)?;
    let tolerance = 1e-8 * args.x.sqrt();
    let mut out = Outcome::with_table(DYADIC_COLUMNS, dyadic_rows(&p));
    out.summary.insert("J".into(), json!(p.big_j));
    out.summary.insert("telescoping_residual".into(), json!(p.telescoping_residual));
    out.summary.insert("telescoping_tolerance".into(), json!(tolerance));
    if p.telescoping_residual > tolerance {
        out.failure = Some(format!("telescoping residual {:.3e} above {tolerance:.3e}", p.telescoping_residual));
    }
    Ok(out)
}

fn run_check(args: &CheckArgs, ctx: &Ctx) -> anyhow::Result<Outcome> {
    let s = args.suite;
    let q = modulus(args.q.unwrap_or(match s {
        Suite::Orthogonality => 0,
        Suite::Integral | Suite::Increment | Suite::Realness => 4,
        Suite::BrunTitchmarsh => 10,
        Suite::Explicit | Suite::SOfX => 1,
    }))
    .or_else(|e| if s == Suite::Orthogonality { Ok(0) } else { Err(e) })?;
    if let (Some(a), true) = (args.a, q > 0) {
        unit(q, a)?;
    }
    let x = args.x.unwrap_or(match s {
        Suite::Explicit => 1000.5,
        Suite::SOfX => 1e6,
        Suite::BrunTitchmarsh => 1000.0,
        _ => 3.0,
    });
    let height = positive("T", args.height.unwrap_or(15.0))?;
    let lower = args.lower.unwrap_or(5.0);
    let z = args.z.unwrap_or(30.0);
    match s {
        Suite::Increment if !(lower >= 0.0 && lower <= height) => {
            return Err(Invalid(format!("--U must lie in [0, T], got {lower}")).into())
        }
        Suite::Explicit if !(z >= 2.0 && z <= x) => {
            return Err(Invalid(format!("--Z must satisfy 2 <= Z <= x, got {z}")).into())
        }
        Suite::BrunTitchmarsh if args.y.is_some_and(|y| y <= q) => {
            return Err(Invalid("--y must exceed q".into()).into())
        }
        Suite::SOfX | Suite::Explicit => {
            sieve_bound(x)?;
        }
        _ => {
            positive("x", x)?;
        }
    }
    if ctx.dry_run {
        return Ok(dry());
    }
    let lines = match s {
        Suite::Orthogonality => {
            let qs: Vec<u64> = if q == 0 { (1..=50).collect() } else { vec![q] };
            let mut v = Vec::new();
            for q in qs {
                v.extend(checks::orthogonality(q)?);
            }
            v
        }
        Suite::Integral => checks::integral(&ctx.zero_sets(q, height)?, q, args.a, x, height)?,
        Suite::Increment => checks::increment(&ctx.zero_sets(q, height)?, q, args.a, x, lower, height)?,
        Suite::Realness => checks::realness(&ctx.zero_sets(q, height)?, q, args.a, x, height)?,
        Suite::Explicit => {
            let table = LambdaTable::up_to(x.floor() as u64)?;
            checks::explicit(&ctx.zero_sets(q, z)?, &table, q, args.a, x, z)?
        }
        Suite::BrunTitchmarsh => vec![checks::brun_titchmarsh(q, x as u64, args.y.unwrap_or(100 * q))?],
        Suite::SOfX => {
            let table = LambdaTable::up_to((16.0 * x).floor() as u64)?;
            let mut v = Vec::new();
            for a in args.a.map(|a| vec![a]).unwrap_or_else(|| vec![1]) {
                v.extend(checks::s_of_x(&table, x, q, a)?);
            }
            v
        }
    };
    Ok(check_outcome(lines, Outcome::default()))
}

fn run_report(args: &ReportArgs, ctx: &Ctx) -> anyhow::Result<Outcome> {
    if ctx.dry_run {
        return Ok(dry());
    }
    let config = ReportConfig::default();
    let cache = ctx.cfg.cache_dir.clone();
    let height = config.height;
    let mut library = ZeroLibrary::new(height);
    let summary = write_report(&config, &args.out, |q| {
        library_for_modulus(&cache, &mut library, q)
            .map(|(sets, _)| sets)
            .map_err(ReportError::from)
    })?;
    let mut out = Outcome::default();
    for f in &summary.files {
        out.lines.push(f.display().to_string());
    }
    out.summary.insert(
        "files".into(),
        json!(summary.files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>()),
    );
    out.summary.insert("telescoping_residual".into(), json!(summary.telescoping_residual));
    out.summary.insert("eh_monotone".into(), json!(summary.eh_monotone));
    if !summary.invariants_hold() {
        out.failure = Some("report invariants failed".into());
    }
    Ok(out)
}

fn zero_code(e: &ZeroError) -> u8 {
    match e {
        ZeroError::Uncertified { .. } => 3,
        ZeroError::NotPrimitive(_)
        | ZeroError::InvalidHeight(_)
        | ZeroError::MeshTooCoarse { .. }
        | ZeroError::InvalidTolerance(_)
        | ZeroError::Character(_) => 2,
        _ => 1,
    }
}

fn sieve_code(e: &SieveError) -> u8 {
    match e {
        SieveError::NotCovered { .. } => 1,
        _ => 2,
    }
}

fn pair_code(e: &PairCorrError) -> u8 {
    match e {
        PairCorrError::Uncertified(_) => 3,
        PairCorrError::Sieve(s) => sieve_code(s),
        PairCorrError::NonUnitResidue { .. }
        | PairCorrError::InvalidArgument(_)
        | PairCorrError::HeightTooLow { .. }
        | PairCorrError::Character(_) => 2,
        _ => 1,
    }
}

fn explicit_code(e: &ExplicitError) -> u8 {
    match e {
        ExplicitError::Uncertified(_) => 3,
        ExplicitError::Sieve(s) => sieve_code(s),
        ExplicitError::MissingZeroSet(_) => 1,
        _ => 2,
    }
}

fn store_code(e: &StoreError) -> u8 {
    match e {
        StoreError::Scan(z) => zero_code(z),
        StoreError::Character(_) => 2,
        _ => 1,
    }
}

/// Exit code for an error, from the first recognised cause.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Invalid>() || cause.is::<CharacterError>() || cause.is::<ConjectureError>() {
            return 2;
        }
        if cause.is::<CertificationFailure>() {
            return 3;
        }
        if let Some(e) = cause.downcast_ref::<ZeroError>() {
            return zero_code(e);
        }
        if let Some(e) = cause.downcast_ref::<SieveError>() {
            return sieve_code(e);
        }
        if let Some(e) = cause.downcast_ref::<PairCorrError>() {
            return pair_code(e);
        }
        if let Some(e) = cause.downcast_ref::<ExplicitError>() {
            return explicit_code(e);
        }
        if let Some(e) = cause.downcast_ref::<StoreError>() {
            return store_code(e);
        }
        if let Some(e) = cause.downcast_ref::<CheckError>() {
            return match e {
                CheckError::PairCorr(p) => pair_code(p),
                CheckError::Explicit(x) => explicit_code(x),
                CheckError::Sieve(s) => sieve_code(s),
                CheckError::Character(_) => 2,
            };
        }
        if let Some(e) = cause.downcast_ref::<ReportError>() {
            return match e {
                ReportError::Store(s) => store_code(s),
                ReportError::Zeros(z) => zero_code(z),
                ReportError::PairCorr(p) => pair_code(p),
                ReportError::Sieve(s) => sieve_code(s),
                ReportError::Conjecture(_) => 2,
            };
        }
    }
    1
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Zeros(_) => "zeros",
        Command::Psi(_) => "psi",
        Command::Paircorr(_) => "paircorr",
        Command::Explicit(_) => "explicit",
        Command::Montgomery(_) => "montgomery",
        Command::Eh(_) => "eh",
        Command::Weak(_) => "weak",
        Command::Dyadic(_) => "dyadic",
        Command::Check(_) => "check",
        Command::Report(_) => "report",
    }
}

fn build_config(cli: &Cli) -> Result<RunConfig, Invalid> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    if let Some(dir) = &cli.cache_dir {
        cfg.cache_dir = dir.clone();
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    Ok(cfg)
}

fn execute(cli: &Cli, ctx: &Ctx) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Zeros(a) => run_zeros(a, ctx),
        Command::Psi(a) => run_psi(a, ctx),
        Command::Paircorr(a) => run_paircorr(a, ctx),
        Command::Explicit(a) => run_explicit(a, ctx),
        Command::Montgomery(a) => run_montgomery(a, ctx),
        Command::Eh(a) => run_eh(a, ctx),
        Command::Weak(a) => run_weak(a, ctx),
        Command::Dyadic(a) => run_dyadic(a, ctx),
        Command::Check(a) => run_check(a, ctx),
        Command::Report(a) => run_report(a, ctx),
    }
}

fn emit(cli: &Cli, cfg: &RunConfig, outcome: Outcome) -> anyhow::Result<Option<String>> {
    let stdout = std::io::stdout();
    let mut summary = outcome.summary;
    summary.insert("command".into(), json!(command_name(&cli.command)));
    if let Some((columns, rows)) = outcome.table {
        if let Some(path) = &cli.output {
            emit_table(columns, rows, cfg.format, path)?;
            summary.insert("output".into(), json!(path.display().to_string()));
        } else if cli.json {
            let mut buf = Vec::new();
            write_table(columns, rows, TableFormat::Json, &mut buf)?;
            summary.insert("rows".into(), serde_json::from_slice(&buf).context("re-reading table")?);
        } else {
            write_table(columns, rows, cfg.format, stdout.lock())?;
        }
    }
    let mut lock = stdout.lock();
    if cli.json {
        summary.insert("lines".into(), json!(outcome.lines));
        summary.insert("status".into(), json!(if outcome.failure.is_some() { "failed" } else { "ok" }));
        serde_json::to_writer(&mut lock, &Value::Object(summary))?;
        writeln!(lock)?;
    } else {
        for l in &outcome.lines {
            writeln!(lock, "{l}")?;
        }
    }
    Ok(outcome.failure)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = (|| -> anyhow::Result<Option<String>> {
        let cfg = build_config(&cli)?;
        if cfg.threads > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.threads)
                .build_global()
                .context("configuring the worker pool")?;
        }
        let ctx = Ctx {
            cfg: cfg.clone(),
            dry_run: cli.dry_run,
        };
        let outcome = execute(&cli, &ctx)?;
        emit(&cli, &cfg, outcome)
    })();
    match result {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(failure)) => {
            let err = anyhow::Error::new(CertificationFailure(failure));
            eprintln!("dpc: {err}");
            ExitCode::from(exit_code(&err))
        }
        Err(err) => {
            eprintln!("dpc: {err:#}");
            let code = exit_code(&err);
            if cli.json {
                let v = json!({
                    "command": command_name(&cli.command),
                    "status": "error",
                    "error": format!("{err:#}"),
                    "exit_code": code,
                });
                let _ = writeln!(std::io::stdout(), "{v}");
            }
            ExitCode::from(code)
        }
    }
}
