//! Identity suites with pinned tolerances, one [`CheckLine`] per case.

use std::fmt;
use std::str::FromStr;

use crate::arith::{euler_phi, gcd};
use crate::characters::{enumerate_characters, orthogonality_matrix, CharacterError};
use crate::explicit::{psi_progression_from_zeros, ExplicitError};
use crate::paircorr::{f_q, f_q_via_integral, increment_identity_check, PairCorrError, PairCorrInput, QuadSpec, ZeroSets};
use crate::sieve::{brun_titchmarsh_check, LambdaTable, SieveError};

pub const INTEGRAL_REL_TOL: f64 = 1e-4;
pub const INCREMENT_REL_TOL: f64 = 1e-4;
/// |Im F_q| <= REALNESS_TOL·(1 + |Re F_q|).
pub const REALNESS_TOL: f64 = 1e-9;
pub const GAUSS_SUM_TOL: f64 = 1e-10;
pub const RECONSTRUCTION_ABS_TOL: f64 = 1e-8;
/// Accepted range of S(x)·φ(q)/log x.
pub const S_RATIO_RANGE: (f64, f64) = (0.8, 1.2);

#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error(transparent)]
    PairCorr(#[from] PairCorrError),
    #[error(transparent)]
    Explicit(#[from] ExplicitError),
    #[error(transparent)]
    Sieve(#[from] SieveError),
    #[error(transparent)]
    Character(#[from] CharacterError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Orthogonality,
    Integral,
    Increment,
    Realness,
    Explicit,
    BrunTitchmarsh,
    SOfX,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Orthogonality,
        Suite::Integral,
        Suite::Increment,
        Suite::Realness,
        Suite::Explicit,
        Suite::BrunTitchmarsh,
        Suite::SOfX,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Orthogonality => "orthogonality",
            Suite::Integral => "integral",
            Suite::Increment => "increment",
            Suite::Realness => "realness",
            Suite::Explicit => "explicit",
            Suite::BrunTitchmarsh => "brun-titchmarsh",
            Suite::SOfX => "s-of-x",
        }
    }

    /// Whether the suite reads zero sets.
    pub fn needs_zeros(self) -> bool {
        matches!(self, Suite::Integral | Suite::Increment | Suite::Realness | Suite::Explicit)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
                format!("unknown suite `{s}` (one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub suite: Suite,
    pub case: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub note: Option<String>,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {}: {:.3e} (tol {:.1e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.case,
            self.measured,
            self.tolerance
        )?;
        if let Some(n) = &self.note {
            write!(f, " [{n}]")?;
        }
        Ok(())
    }
}

fn line(suite: Suite, case: String, measured: f64, tolerance: f64, passed: bool) -> CheckLine {
    CheckLine {
        suite,
        case,
        measured,
        tolerance,
        passed,
        note: None,
    }
}

/// Units mod q in increasing order (just 1 for q = 1).
pub fn units(q: u64) -> Vec<u64> {
    if q == 1 {
        return vec![1];
    }
    (1..q).filter(|&a| gcd(a, q) == 1).collect()
}

fn residues(q: u64, a: Option<u64>) -> Vec<u64> {
    a.map(|a| vec![a]).unwrap_or_else(|| units(q))
}

/// Exact orthogonality table plus |τ(χ)| = √q for the primitive characters.
pub fn orthogonality(q: u64) -> Result<Vec<CheckLine>, CheckError> {
    let table = orthogonality_matrix(q)?;
    let phi = euler_phi(q) as i64;
    let mut mismatches = 0u64;
    for a in 0..q {
        for b in 0..q {
            let want = if a == b && gcd(a, q) == 1 { phi } else { 0 };
            if table.get(a, b).as_integer() != Some(want) {
                mismatches += 1;
            }
        }
    }
    let mut out = vec![line(
        Suite::Orthogonality,
        format!("q={q} table"),
        mismatches as f64,
        0.0,
        mismatches == 0,
    )];
    let worst = enumerate_characters(q)?
        .iter()
        .filter(|c| c.is_primitive())
        .map(|c| (c.gauss_sum().norm() - (q as f64).sqrt()).abs())
        .fold(0.0, f64::max);
    out.push(line(
        Suite::Orthogonality,
        format!("q={q} |gauss sum| - sqrt(q)"),
        worst,
        GAUSS_SUM_TOL,
        worst < GAUSS_SUM_TOL,
    ));
    Ok(out)
}

fn relative(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

/// |f_q_via_integral − f_q| / |f_q| per residue.
pub fn integral(sets: &ZeroSets, q: u64, a: Option<u64>, x: f64, height: f64) -> Result<Vec<CheckLine>, CheckError> {
    let spec = QuadSpec::default();
    residues(q, a)
        .into_iter()
        .map(|a| {
            let input = PairCorrInput::new(q, a, x, height, sets.clone())?;
            let direct = f_q(&input).value.re;
            let via = f_q_via_integral(&input, &spec)?.value;
            let r = relative(via, direct);
            Ok(line(
                Suite::Integral,
                format!("q={q} a={a} x={x} T={height}"),
                r,
                INTEGRAL_REL_TOL,
                r < INTEGRAL_REL_TOL,
            ))
        })
        .collect()
}

/// The increment identity between heights U < T, as stated (no cross term).
pub fn increment(sets: &ZeroSets, q: u64, a: Option<u64>, x: f64, lower: f64, height: f64) -> Result<Vec<CheckLine>, CheckError> {
    let spec = QuadSpec::default();
    residues(q, a)
        .into_iter()
        .map(|a| {
            let input = PairCorrInput::new(q, a, x, height, sets.clone())?;
            let c = increment_identity_check(&input, lower, &spec)?;
            let mut l = line(
                Suite::Increment,
                format!("q={q} a={a} x={x} U={lower} T={height}"),
                c.residual,
                INCREMENT_REL_TOL,
                c.residual < INCREMENT_REL_TOL,
            );
            l.note = Some(format!(
                "zeros below U: {}, with cross term: {:.3e}",
                c.inner_zero_count, c.corrected_residual
            ));
            Ok(l)
        })
        .collect()
}

pub fn realness(sets: &ZeroSets, q: u64, a: Option<u64>, x: f64, height: f64) -> Result<Vec<CheckLine>, CheckError> {
    residues(q, a)
        .into_iter()
        .map(|a| {
            let v = f_q(&PairCorrInput::new(q, a, x, height, sets.clone())?).value;
            let m = v.im.abs() / (1.0 + v.re.abs());
            Ok(line(
                Suite::Realness,
                format!("q={q} a={a} x={x} T={height}"),
                m,
                REALNESS_TOL,
                m <= REALNESS_TOL,
            ))
        })
        .collect()
}

/// Orthogonality reconstruction of ψ(x; q, a) from the per-character
/// reconstructions, plus the truncated explicit-formula error as a note.
pub fn explicit(
    sets: &ZeroSets,
    table: &LambdaTable,
    q: u64,
    a: Option<u64>,
    x: f64,
    z: f64,
) -> Result<Vec<CheckLine>, CheckError> {
    residues(q, a)
        .into_iter()
        .map(|a| {
            let p = psi_progression_from_zeros(x, z, q, a, sets, table)?;
            let d = (p.run.reconstructed - p.via_characters).norm();
            let mut l = line(
                Suite::Explicit,
                format!("q={q} a={a} x={x} Z={z}"),
                d,
                RECONSTRUCTION_ABS_TOL,
                d < RECONSTRUCTION_ABS_TOL,
            );
            l.note = Some(format!(
                "abs error {:.4e}, budget constant {:.3e}",
                p.run.abs_error, p.run.measured_constant
            ));
            Ok(l)
        })
        .collect()
}

/// Smallest Brun–Titchmarsh margin over the units mod q.
pub fn brun_titchmarsh(q: u64, x: u64, y: u64) -> Result<CheckLine, CheckError> {
    let mut worst = f64::INFINITY;
    for a in units(q) {
        worst = worst.min(brun_titchmarsh_check(x, y, q, a)?.margin);
    }
    Ok(line(
        Suite::BrunTitchmarsh,
        format!("q={q} x={x} y={y} min margin"),
        worst,
        0.0,
        worst > 0.0,
    ))
}

/// S(x)·φ(q)/log x within range, and cutoff doubling inside the remainder.
pub fn s_of_x(table: &LambdaTable, x: f64, q: u64, a: u64) -> Result<Vec<CheckLine>, CheckError> {
    let base = table.s_of_x(x, q, a, 8.0 * x)?;
    let doubled = table.s_of_x(x, q, a, 16.0 * x)?;
    let ratio = base.value * euler_phi(q) as f64 / x.ln();
    let shift = (doubled.value - base.value).abs();
    let case = format!("q={q} a={a} x={x}");
    Ok(vec![
        line(
            Suite::SOfX,
            format!("{case} S*phi/log x"),
            ratio,
            S_RATIO_RANGE.1,
            (S_RATIO_RANGE.0..=S_RATIO_RANGE.1).contains(&ratio),
        ),
        line(
            Suite::SOfX,
            format!("{case} cutoff doubling"),
            shift,
            base.remainder_bound,
            shift < base.remainder_bound,
        ),
    ])
}
