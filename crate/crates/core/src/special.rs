//! Bernoulli numbers and the complex log-gamma function.

use num_complex::Complex64;
use std::f64::consts::PI;

/// (numerator, denominator) of B_2, B_4, ..., B_30.
const BERNOULLI_EVEN: [(f64, f64); 15] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
];

/// Largest k for which `bernoulli_even(k)` is tabulated.
pub const MAX_BERNOULLI_INDEX: usize = BERNOULLI_EVEN.len();

/// B_{2k} for 1 <= k <= 15.
pub fn bernoulli_even(k: usize) -> f64 {
    let (n, d) = BERNOULLI_EVEN[k - 1];
    n / d
}

/// B_{2k} / (2k)!.
pub fn bernoulli_over_factorial(k: usize) -> f64 {
    let fact: f64 = (1..=2 * k).map(|i| i as f64).product();
    bernoulli_even(k) / fact
}

/// Principal branch of log Γ(z) for Re z > 0, continuous in Im z.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    assert!(z.re > 0.0, "ln_gamma is only used in the right half-plane");
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < 12.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for k in 1..=10 {
        let kk = k as f64;
        series += pow * (bernoulli_even(k) / (2.0 * kk * (2.0 * kk - 1.0)));
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - shift
}
