//! Segmented sieve for the von Mangoldt function and the prime sums built on it.
//!
//! Λ is kept as exact `(p, k)` tags; logarithms are only taken when a sum is
//! rendered, and every rendered sum goes through a compensated accumulator in
//! ascending order of n.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::arith::{euler_phi, gcd, CompensatedSum};
use crate::characters::DirichletCharacter;

/// Largest integer the sieve will handle.
pub const DESK_LIMIT: u64 = 1_000_000_000;

/// Default cap on the number of integers sieved into one table.
pub const DEFAULT_SPAN_BUDGET: u64 = 200_000_000;

/// Rosser–Schoenfeld: ψ(u) < 1.03883·u for all u > 0.
pub const PSI_UPPER_CONSTANT: f64 = 1.03883;

const SEGMENT: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SieveError {
    #[error("invalid range [{lo}, {hi}]")]
    InvalidRange { lo: u64, hi: u64 },
    #[error("range of {span} integers exceeds the memory budget of {budget}")]
    OverBudget { span: u64, budget: u64 },
    #[error("table [{lo}, {hi}] does not cover {needed}")]
    NotCovered { lo: u64, hi: u64, needed: u64 },
    #[error("modulus must be positive")]
    InvalidModulus,
    #[error("residue {a} is not a unit mod {q}")]
    NonUnitResidue { q: u64, a: u64 },
    #[error("tail cutoff {cutoff} is below 8x = {min}")]
    CutoffTooSmall { cutoff: f64, min: f64 },
    #[error("y = {y} must exceed q = {q}")]
    IntervalTooShort { y: u64, q: u64 },
}

/// n = p^k with Λ(n) = log p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LambdaEntry {
    pub n: u64,
    pub p: u64,
    pub k: u32,
}

impl LambdaEntry {
    pub fn log_p(&self) -> f64 {
        (self.p as f64).ln()
    }
}

/// Nonzero values of Λ on [lo, hi], ascending in n.
#[derive(Debug, Clone)]
pub struct LambdaTable {
    lo: u64,
    hi: u64,
    entries: Vec<LambdaEntry>,
}

/// Primes up to `n` by a plain sieve of Eratosthenes.
pub fn small_primes(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n as usize + 1];
    let mut out = Vec::new();
    for i in 2..=n as usize {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n as usize {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Primes in [start, end) using base primes up to √end.
fn sieve_segment(start: u64, end: u64, base: &[u64]) -> Vec<u64> {
    let len = (end - start) as usize;
    let mut composite = vec![false; len];
    for &p in base {
        if p * p >= end {
            break;
        }
        let first = (p * p).max(start.div_ceil(p) * p);
        let mut m = first;
        while m < end {
            composite[(m - start) as usize] = true;
            m += p;
        }
    }
    (0..len)
        .filter(|&i| !composite[i] && start + i as u64 >= 2)
        .map(|i| start + i as u64)
        .collect()
}

/// Λ table on [lo, hi].
pub fn lambda_table(lo: u64, hi: u64) -> Result<LambdaTable, SieveError> {
    LambdaTable::with_budget(lo, hi, DEFAULT_SPAN_BUDGET)
}

impl LambdaTable {
    pub fn new(lo: u64, hi: u64) -> Result<Self, SieveError> {
        lambda_table(lo, hi)
    }

    /// Table on [2, x].
    pub fn up_to(x: u64) -> Result<Self, SieveError> {
        lambda_table(2, x.max(2))
    }

    pub fn with_budget(lo: u64, hi: u64, budget: u64) -> Result<Self, SieveError> {
        if lo < 2 || lo > hi || hi > DESK_LIMIT {
            return Err(SieveError::InvalidRange { lo, hi });
        }
        let span = hi - lo + 1;
        if span > budget {
            return Err(SieveError::OverBudget { span, budget });
        }
        let base = small_primes(isqrt(hi));
        let starts: Vec<u64> = (lo..=hi).step_by(SEGMENT as usize).collect();
        let primes: Vec<u64> = starts
            .par_iter()
            .map(|&s| sieve_segment(s, (s + SEGMENT).min(hi + 1), &base))
            .collect::<Vec<_>>()
            .concat();
        let mut entries: Vec<LambdaEntry> = primes.into_iter().map(|p| LambdaEntry { n: p, p, k: 1 }).collect();
        for &p in &base {
            let mut n = p * p;
            let mut k = 2;
            while n <= hi {
                if n >= lo {
                    entries.push(LambdaEntry { n, p, k });
                }
                n = match n.checked_mul(p) {
                    Some(v) => v,
                    None => break,
                };
                k += 1;
            }
        }
        entries.sort_unstable_by_key(|e| e.n);
        Ok(Self { lo, hi, entries })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn entries(&self) -> &[LambdaEntry] {
        &self.entries
    }

    /// The `(p, k)` tag of n, if n is a prime power in range.
    pub fn tag(&self, n: u64) -> Option<(u64, u32)> {
        self.entries
            .binary_search_by_key(&n, |e| e.n)
            .ok()
            .map(|i| (self.entries[i].p, self.entries[i].k))
    }

    /// Λ(n) for n in range.
    pub fn lambda(&self, n: u64) -> f64 {
        self.tag(n).map_or(0.0, |(p, _)| (p as f64).ln())
    }

    /// Entries with n <= x, requiring the table to start at 2.
    fn prefix(&self, x: f64) -> Result<&[LambdaEntry], SieveError> {
        let needed = floor_arg(x);
        if self.lo != 2 || needed > self.hi {
            return Err(SieveError::NotCovered {
                lo: self.lo,
                hi: self.hi,
                needed,
            });
        }
        Ok(&self.entries[..self.entries.partition_point(|e| e.n <= needed)])
    }

    /// Entries with lo < n <= hi (real bounds), which must lie inside the table.
    fn slice_between(&self, lo: f64, hi: f64) -> Result<&[LambdaEntry], SieveError> {
        let needed = floor_arg(hi);
        if needed > self.hi || (floor_arg(lo) + 1 < self.lo && self.lo > 2) {
            return Err(SieveError::NotCovered {
                lo: self.lo,
                hi: self.hi,
                needed,
            });
        }
        let a = self.entries.partition_point(|e| (e.n as f64) <= lo);
        let b = self.entries.partition_point(|e| e.n <= needed);
        Ok(&self.entries[a..b.max(a)])
    }

    /// ψ(x) = Σ_{n <= x} Λ(n).
    pub fn psi(&self, x: f64) -> Result<f64, SieveError> {
        Ok(self.prefix(x)?.iter().map(|e| e.log_p()).collect::<CompensatedSum>().value())
    }

    /// ψ(x; q, a).
    pub fn psi_progression(&self, x: f64, q: u64, a: u64) -> Result<f64, SieveError> {
        check_unit(q, a)?;
        let a = a % q;
        Ok(self
            .prefix(x)?
            .iter()
            .filter(|e| e.n % q == a)
            .map(|e| e.log_p())
            .collect::<CompensatedSum>()
            .value())
    }

    /// π(x; q, a).
    pub fn pi_progression(&self, x: f64, q: u64, a: u64) -> Result<u64, SieveError> {
        check_unit(q, a)?;
        let a = a % q;
        Ok(self.prefix(x)?.iter().filter(|e| e.k == 1 && e.n % q == a).count() as u64)
    }

    /// ψ(x; q, a) for every unit a mod q in one pass, ascending in a.
    pub fn psi_all_residues(&self, x: f64, q: u64) -> Result<Vec<(u64, f64)>, SieveError> {
        if q == 0 {
            return Err(SieveError::InvalidModulus);
        }
        if q == 1 {
            return Ok(vec![(1, self.psi(x)?)]);
        }
        let mut sums = vec![CompensatedSum::new(); q as usize];
        for e in self.prefix(x)? {
            sums[(e.n % q) as usize].add(e.log_p());
        }
        Ok((1..q)
            .filter(|&a| gcd(a, q) == 1)
            .map(|a| (a, sums[a as usize].value()))
            .collect())
    }

    /// ψ(x, χ) = Σ_{n <= x} Λ(n) χ(n), summed per value class of χ.
    pub fn psi_character(&self, x: f64, chi: &DirichletCharacter) -> Result<Complex64, SieveError> {
        let order = chi.order();
        let mut classes = vec![CompensatedSum::new(); order as usize];
        for e in self.prefix(x)? {
            if let Some(v) = chi.eval(e.n as i64) {
                classes[v.numerator_over(order) as usize].add(e.log_p());
            }
        }
        Ok(render_classes(&classes, order))
    }

    /// S(x) for the progression a mod q, with the tail cut at `tail_cutoff`.
    pub fn s_of_x(&self, x: f64, q: u64, a: u64, tail_cutoff: f64) -> Result<SValue, SieveError> {
        check_unit(q, a)?;
        if !(tail_cutoff >= 8.0 * x) {
            return Err(SieveError::CutoffTooSmall {
                cutoff: tail_cutoff,
                min: 8.0 * x,
            });
        }
        let a = a % q;
        let mut head = CompensatedSum::new();
        for e in self.prefix(x)?.iter().filter(|e| e.n % q == a) {
            let l = e.log_p();
            head.add(e.n as f64 * l * l);
        }
        let mut tail = CompensatedSum::new();
        for e in self.slice_between(x, tail_cutoff)?.iter().filter(|e| e.n % q == a) {
            let l = e.log_p();
            let n = e.n as f64;
            tail.add(l * l / (n * n * n));
        }
        let head = head.value() / (x * x);
        let tail = x * x * tail.value();
        Ok(SValue {
            x,
            q,
            a,
            tail_cutoff,
            head,
            tail,
            value: head + tail,
            remainder_bound: s_tail_bound(x, tail_cutoff),
        })
    }
}

/// Rounds a real argument down to the last integer counted by n <= x.
fn floor_arg(x: f64) -> u64 {
    if x < 0.0 {
        0
    } else {
        x.floor() as u64
    }
}

fn check_unit(q: u64, a: u64) -> Result<(), SieveError> {
    if q == 0 {
        return Err(SieveError::InvalidModulus);
    }
    if gcd(a % q, q) != 1 && q != 1 {
        return Err(SieveError::NonUnitResidue { q, a });
    }
    Ok(())
}

/// Σ_k sums[k]·e^{2πik/order}.
pub fn render_classes(sums: &[CompensatedSum], order: u64) -> Complex64 {
    sums.iter()
        .enumerate()
        .map(|(k, s)| Complex64::from_polar(s.value(), 2.0 * PI * k as f64 / order as f64))
        .fold(Complex64::new(0.0, 0.0), |acc, v| acc + v)
}

/// Bound on x²·Σ_{n > C} Λ(n)²/n³.
///
/// Uses Λ(n)² <= Λ(n) log n, partial summation and ψ(u) < 1.03883u:
/// x²·1.03883·(1.5 log C + 0.25)/C².
pub fn s_tail_bound(x: f64, cutoff: f64) -> f64 {
    x * x * PSI_UPPER_CONSTANT * (1.5 * cutoff.ln() + 0.25) / (cutoff * cutoff)
}

/// S(x) with its parts and the truncation budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SValue {
    pub x: f64,
    pub q: u64,
    pub a: u64,
    pub tail_cutoff: f64,
    pub head: f64,
    pub tail: f64,
    pub value: f64,
    /// Bound on the discarded part of the tail beyond the cutoff.
    pub remainder_bound: f64,
}

/// Standalone S(x), sieving [2, tail_cutoff].
pub fn s_of_x(x: f64, q: u64, a: u64, tail_cutoff: f64) -> Result<SValue, SieveError> {
    if !(tail_cutoff >= 8.0 * x) {
        return Err(SieveError::CutoffTooSmall {
            cutoff: tail_cutoff,
            min: 8.0 * x,
        });
    }
    LambdaTable::up_to(tail_cutoff.floor() as u64)?.s_of_x(x, q, a, tail_cutoff)
}

/// Number of primes p ≡ a (mod q) with lo < p <= hi, by a windowed sieve.
pub fn primes_in_window(lo: u64, hi: u64, q: u64, a: u64) -> Result<u64, SieveError> {
    check_unit(q, a)?;
    if hi < 2 || hi <= lo {
        return Ok(0);
    }
    let start = (lo + 1).max(2);
    let table = LambdaTable::new(start, hi)?;
    let a = a % q;
    Ok(table.entries().iter().filter(|e| e.k == 1 && e.n % q == a).count() as u64)
}

/// Outcome of one Brun–Titchmarsh comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrunTitchmarsh {
    pub x: u64,
    pub y: u64,
    pub q: u64,
    pub a: u64,
    pub count: u64,
    pub bound: f64,
    pub margin: f64,
    pub holds: bool,
}

/// Compares π(x+y; q, a) − π(x; q, a) with 2y / (φ(q) log(y/q)).
pub fn brun_titchmarsh_check(x: u64, y: u64, q: u64, a: u64) -> Result<BrunTitchmarsh, SieveError> {
    check_unit(q, a)?;
    if y <= q {
        return Err(SieveError::IntervalTooShort { y, q });
    }
    let count = primes_in_window(x, x + y, q, a)?;
    let bound = 2.0 * y as f64 / (euler_phi(q) as f64 * (y as f64 / q as f64).ln());
    let margin = bound - count as f64;
    Ok(BrunTitchmarsh {
        x,
        y,
        q,
        a,
        count,
        bound,
        margin,
        holds: margin > 0.0,
    })
}
