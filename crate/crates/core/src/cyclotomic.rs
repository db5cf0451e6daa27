//! Exact sums of roots of unity, reduced in Z[x]/Φ_n(x).
//!
//! A sum Σ c_k ζ_n^k is stored as its coefficient vector reduced modulo the
//! n-th cyclotomic polynomial, which makes the representation canonical:
//! two sums are equal iff their reduced coefficients are equal.

use std::collections::HashMap;

use crate::arith::gcd;

/// Integer polynomial, coefficient `i` multiplies `x^i`.
type Poly = Vec<i64>;

fn trim(p: &mut Poly) {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
}

/// Exact division of `num` by the monic polynomial `den`.
fn div_exact(num: &Poly, den: &Poly) -> Poly {
    let mut rem = num.clone();
    let dd = den.len() - 1;
    if rem.len() <= dd {
        return vec![0];
    }
    let mut quot = vec![0i64; rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0), "inexact cyclotomic division");
    quot
}

/// Reduce `p` modulo the monic polynomial `m`.
fn reduce_mod(p: &mut Poly, m: &Poly) {
    let dm = m.len() - 1;
    while p.len() > dm {
        let c = p.pop().unwrap();
        if c != 0 {
            let shift = p.len() - dm;
            for (j, &d) in m[..dm].iter().enumerate() {
                p[shift + j] -= c * d;
            }
        }
    }
    if p.is_empty() {
        p.push(0);
    }
    trim(p);
}

/// Memoized cyclotomic polynomials.
#[derive(Debug, Default)]
pub struct CyclotomicTable {
    cache: HashMap<u64, Poly>,
}

impl CyclotomicTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Φ_n as an integer coefficient vector.
    pub fn polynomial(&mut self, n: u64) -> Poly {
        if let Some(p) = self.cache.get(&n) {
            return p.clone();
        }
        // x^n - 1 = prod_{d | n} Φ_d
        let mut num = vec![0i64; n as usize + 1];
        num[0] = -1;
        num[n as usize] = 1;
        for d in 1..n {
            if n % d == 0 {
                let phi_d = self.polynomial(d);
                num = div_exact(&num, &phi_d);
            }
        }
        trim(&mut num);
        self.cache.insert(n, num.clone());
        num
    }
}

/// An element of Z[ζ_n] in canonical reduced form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicInteger {
    order: u64,
    coeffs: Poly,
}

impl CyclotomicInteger {
    /// Builds Σ_k counts[k]·ζ_n^k where `counts.len() == n`.
    pub fn from_exponent_counts(counts: &[i64], table: &mut CyclotomicTable) -> Self {
        let order = counts.len().max(1) as u64;
        let mut coeffs: Poly = if counts.is_empty() { vec![0] } else { counts.to_vec() };
        let phi = table.polynomial(order);
        reduce_mod(&mut coeffs, &phi);
        Self { order, coeffs }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// The rational integer this element equals, when it lies in Z.
    pub fn as_integer(&self) -> Option<i64> {
        if self.coeffs[1..].iter().all(|&c| c == 0) {
            Some(self.coeffs[0])
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_integer() == Some(0)
    }
}

/// Convenience: reduce a multiset of angles `k/n` given as numerators mod `n`.
pub fn sum_of_roots(numerators: impl IntoIterator<Item = u64>, n: u64, table: &mut CyclotomicTable) -> CyclotomicInteger {
    let mut counts = vec![0i64; n as usize];
    for k in numerators {
        counts[(k % n) as usize] += 1;
    }
    CyclotomicInteger::from_exponent_counts(&counts, table)
}

/// Whether `k/n` is a primitive angle (gcd(k, n) = 1).
pub fn is_primitive_angle(k: u64, n: u64) -> bool {
    gcd(k, n) == 1
}
