//! Measurement tables for the conjectured error terms of ψ(x; q, a).
//!
//! Nothing here asserts a conjecture; each table turns one into a measured
//! ratio or exponent at the given x.

use crate::arith::{euler_phi, gcd, CompensatedSum};
use crate::paircorr::Regime;
use crate::sieve::{LambdaTable, SieveError};

pub const DEFAULT_EPSILON: f64 = 0.1;

/// In range when q <= x^{1−ε} for the default ε.
pub fn modulus_regime(x: f64, q: u64) -> Regime {
    if q as f64 <= x.powf(1.0 - DEFAULT_EPSILON) {
        Regime::InRange
    } else {
        Regime::Extrapolated
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConjectureError {
    #[error("Q = {big_q} must be below x = {x}")]
    ModulusRange { big_q: u64, x: f64 },
    #[error("α = {0} outside [0, 1]")]
    AlphaRange(f64),
    #[error("q = {q} exceeds x^(1-ε) = {limit}")]
    DyadicRange { q: u64, limit: f64 },
    #[error("ε = {0} outside (0, 1)")]
    EpsilonRange(f64),
    #[error(transparent)]
    Sieve(#[from] SieveError),
}

/// ψ(x; q, a) against x/φ(q), normalized by √(x/q).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MontgomeryRow {
    pub x: f64,
    pub q: u64,
    pub a: u64,
    pub psi: f64,
    pub error: f64,
    /// √(x/q).
    pub normalizer: f64,
    pub normalized: f64,
    /// log|normalized| / log x when |normalized| > 1, else 0.
    pub implied_epsilon: f64,
    /// error / (√x log² x / φ(q)).
    pub grh_ratio: f64,
}

fn implied_epsilon(normalized: f64, x: f64) -> f64 {
    if normalized.abs() > 1.0 {
        normalized.abs().ln() / x.ln()
    } else {
        0.0
    }
}

/// Rows for every unit a mod q (or just `only_a`) and every x, q.
pub fn montgomery_table(
    table: &LambdaTable,
    xs: &[f64],
    qs: &[u64],
    only_a: Option<u64>,
) -> Result<Vec<MontgomeryRow>, ConjectureError> {
    let mut rows = Vec::new();
    for &x in xs {
        for &q in qs {
            let phi = euler_phi(q) as f64;
            let values = match only_a {
                Some(a) => vec![(a, table.psi_progression(x, q, a)?)],
                None => table.psi_all_residues(x, q)?,
            };
            for (a, psi) in values {
                let error = psi - x / phi;
                let normalizer = (x / q as f64).sqrt();
                let normalized = error / normalizer;
                rows.push(MontgomeryRow {
                    x,
                    q,
                    a,
                    psi,
                    error,
                    normalizer,
                    normalized,
                    implied_epsilon: implied_epsilon(normalized, x),
                    grh_ratio: error / (x.sqrt() * x.ln().powi(2) / phi),
                });
            }
        }
    }
    Ok(rows)
}

/// Σ_{q <= Q} max_a |ψ(x; q, a) − x/φ(q)| with the per-q maxima.
#[derive(Debug, Clone, PartialEq)]
pub struct EhSum {
    pub x: f64,
    pub big_q: u64,
    pub value: f64,
    /// (q, maximizing a, max error).
    pub maxima: Vec<(u64, u64, f64)>,
}

impl EhSum {
    pub fn ratio_to_x(&self) -> f64 {
        self.value / self.x
    }
}

pub fn eh_sum(table: &LambdaTable, x: f64, big_q: u64) -> Result<EhSum, ConjectureError> {
    if big_q as f64 >= x || big_q == 0 {
        return Err(ConjectureError::ModulusRange { big_q, x });
    }
    let mut maxima = Vec::with_capacity(big_q as usize);
    let mut total = CompensatedSum::new();
    for q in 1..=big_q {
        let main = x / euler_phi(q) as f64;
        let (a, err) = table
            .psi_all_residues(x, q)?
            .into_iter()
            .map(|(a, psi)| (a, (psi - main).abs()))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        total.add(err);
        maxima.push((q, a, err));
    }
    Ok(EhSum {
        x,
        big_q,
        value: total.value(),
        maxima,
    })
}

/// Error normalized by √(x g(q)/q) with g(q) = φ(q)^α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakRow {
    pub x: f64,
    pub q: u64,
    pub a: u64,
    pub alpha: f64,
    pub error: f64,
    pub g: f64,
    pub normalizer: f64,
    pub normalized: f64,
}

pub fn weak_form_table(table: &LambdaTable, x: f64, qs: &[u64], alpha: f64) -> Result<Vec<WeakRow>, ConjectureError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(ConjectureError::AlphaRange(alpha));
    }
    let mut rows = Vec::new();
    for &q in qs {
        let phi = euler_phi(q) as f64;
        let g = phi.powf(alpha);
        let normalizer = (x * g / q as f64).sqrt();
        for (a, psi) in table.psi_all_residues(x, q)? {
            let error = psi - x / phi;
            rows.push(WeakRow {
                x,
                q,
                a,
                alpha,
                error,
                g,
                normalizer,
                normalized: error / normalizer,
            });
        }
    }
    Ok(rows)
}

/// Per-q digest of weak-form rows: the worst residue and the RMS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakSummary {
    pub x: f64,
    pub q: u64,
    pub alpha: f64,
    pub normalizer: f64,
    pub worst_a: u64,
    pub max_abs_normalized: f64,
    pub rms_normalized: f64,
}

/// Groups rows by q (rows for one q must be contiguous, as produced by
/// [`weak_form_table`]).
pub fn weak_form_summary(rows: &[WeakRow]) -> Vec<WeakSummary> {
    rows.chunk_by(|a, b| a.q == b.q)
        .map(|group| {
            let worst = group
                .iter()
                .max_by(|a, b| a.normalized.abs().total_cmp(&b.normalized.abs()))
                .expect("chunks are nonempty");
            let ms = group.iter().map(|r| r.normalized * r.normalized).sum::<f64>() / group.len() as f64;
            WeakSummary {
                x: worst.x,
                q: worst.q,
                alpha: worst.alpha,
                normalizer: worst.normalizer,
                worst_a: worst.a,
                max_abs_normalized: worst.normalized.abs(),
                rms_normalized: ms.sqrt(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicBlock {
    pub j: u32,
    /// ψ(x/2^j) − ψ(x/2^{j+1}) − x/(2^{j+1}φ(q)).
    pub error: f64,
    /// error / √(x/(2^j q)).
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicProfile {
    pub x: f64,
    pub q: u64,
    pub a: u64,
    pub epsilon: f64,
    /// Largest J with (x/2^J)^{1−ε} >= q.
    pub big_j: u32,
    pub blocks: Vec<DyadicBlock>,
    /// ψ(x/2^{J+1}) − x/(2^{J+1}φ(q)).
    pub tail_error: f64,
    /// x/(2^{J+1}φ(q)).
    pub tail_main: f64,
    /// ψ(x; q, a) − x/φ(q).
    pub total_error: f64,
    /// |Σ blocks + tail − total|.
    pub telescoping_residual: f64,
}

/// Largest J with (x/2^J)^{1−ε} >= q.
pub fn dyadic_depth(x: f64, q: u64, epsilon: f64) -> Option<u32> {
    let fits = |j: u32| (x / 2f64.powi(j as i32)).powf(1.0 - epsilon) >= q as f64;
    if !fits(0) {
        return None;
    }
    let mut j = 0;
    while fits(j + 1) {
        j += 1;
    }
    Some(j)
}

pub fn dyadic_profile(table: &LambdaTable, x: f64, q: u64, a: u64, epsilon: f64) -> Result<DyadicProfile, ConjectureError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(ConjectureError::EpsilonRange(epsilon));
    }
    if q == 0 || (q > 1 && gcd(a % q, q) != 1) {
        return Err(SieveError::NonUnitResidue { q, a }.into());
    }
    let big_j = dyadic_depth(x, q, epsilon).ok_or(ConjectureError::DyadicRange {
        q,
        limit: x.powf(1.0 - epsilon),
    })?;
    let phi = euler_phi(q) as f64;
    let psi_at = |j: u32| table.psi_progression(x / 2f64.powi(j as i32), q, a);
    let mut blocks = Vec::with_capacity(big_j as usize + 1);
    let mut sum = CompensatedSum::new();
    let mut upper = psi_at(0)?;
    let total_error = upper - x / phi;
    for j in 0..=big_j {
        let lower = psi_at(j + 1)?;
        let error = upper - lower - x / (2f64.powi(j as i32 + 1) * phi);
        sum.add(error);
        blocks.push(DyadicBlock {
            j,
            error,
            normalized: error / (x / (2f64.powi(j as i32) * q as f64)).sqrt(),
        });
        upper = lower;
    }
    let tail_main = x / (2f64.powi(big_j as i32 + 1) * phi);
    let tail_error = upper - tail_main;
    sum.add(tail_error);
    Ok(DyadicProfile {
        x,
        q,
        a,
        epsilon,
        big_j,
        blocks,
        tail_error,
        tail_main,
        total_error,
        telescoping_residual: (sum.value() - total_error).abs(),
    })
}
