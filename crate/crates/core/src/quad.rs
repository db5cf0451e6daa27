//! Quadrature rules: Gauss–Legendre panels and adaptive Gauss–Kronrod (7, 15).

use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("adaptive quadrature on [{a}, {b}] stopped at {panels} panels with error estimate {estimate:e} > {tolerance:e}")]
    NotConverged {
        a: f64,
        b: f64,
        panels: usize,
        estimate: f64,
        tolerance: f64,
    },
    #[error("invalid interval [{0}, {1}]")]
    InvalidInterval(f64, f64),
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
/// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// (Kronrod estimate, |Kronrod − Gauss|) on one panel.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

/// Adaptive G7K15 on [a, b] starting from `initial_panels` equal panels.
///
/// A panel is accepted when its Kronrod–Gauss gap is at most its share of
/// `abs_tol` (proportional to width); otherwise it is bisected. Panels are
/// processed left to right, so the summation order is deterministic.
pub fn adaptive_gk<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    initial_panels: usize,
    abs_tol: f64,
    max_panels: usize,
) -> Result<QuadResult, QuadError> {
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(QuadError::InvalidInterval(a, b));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            panels: 0,
        });
    }
    let n0 = initial_panels.max(1);
    let w0 = (b - a) / n0 as f64;
    let mut stack: Vec<(f64, f64)> = (0..n0)
        .rev()
        .map(|i| (a + i as f64 * w0, if i + 1 == n0 { b } else { a + (i + 1) as f64 * w0 }))
        .collect();
    let density = abs_tol / (b - a);
    let mut value = crate::arith::CompensatedSum::new();
    let mut err = 0.0;
    let mut panels = 0;
    while let Some((lo, hi)) = stack.pop() {
        let (v, e) = gk15(f, lo, hi);
        let width = hi - lo;
        if e <= density * width || width < (b - a) * 1e-12 {
            value.add(v);
            err += e;
            panels += 1;
            continue;
        }
        if panels + stack.len() + 2 > max_panels {
            return Err(QuadError::NotConverged {
                a,
                b,
                panels: panels + stack.len() + 1,
                estimate: err + e,
                tolerance: abs_tol,
            });
        }
        let mid = 0.5 * (lo + hi);
        stack.push((mid, hi));
        stack.push((lo, mid));
    }
    Ok(QuadResult {
        value: value.value(),
        error_estimate: err,
        panels,
    })
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre with `panels` equal panels of `order` nodes.
pub fn composite_gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut acc = crate::arith::CompensatedSum::new();
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        for (x, w) in nodes.iter().zip(&weights) {
            acc.add(w * f(c + 0.5 * h * x) * 0.5 * h);
        }
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_is_exact_on_polynomials() {
        let (v, _) = gk15(&|x: f64| x.powi(20) + 3.0 * x, -1.0, 1.0);
        assert!((v - 2.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_oscillatory() {
        // ∫_0^20 cos(40v) e^{-2v} dv = (2 - e^{-40}(2cos 800 - 40 sin 800)) / 1604
        let f = |v: f64| (40.0 * v).cos() * (-2.0 * v).exp();
        let exact = (2.0 - (-40f64).exp() * (2.0 * 800f64.cos() - 40.0 * 800f64.sin())) / 1604.0;
        let r = adaptive_gk(&f, 0.0, 20.0, 10, 1e-13, 100_000).unwrap();
        assert!((r.value - exact).abs() < 1e-12, "{} vs {exact}", r.value);
    }

    #[test]
    fn adaptive_reports_failure() {
        let f = |v: f64| (1e6 * v * v).sin();
        assert!(matches!(
            adaptive_gk(&f, 0.0, 10.0, 1, 1e-14, 8),
            Err(QuadError::NotConverged { .. })
        ));
    }

    #[test]
    fn legendre_rules() {
        for n in [1usize, 2, 5, 8, 13] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            let deg = 2 * n - 2;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((q - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n = {n}");
        }
        let v = composite_gauss_legendre(&|t: f64| t.sin(), 0.0, PI, 10, 6);
        assert!((v - 2.0).abs() < 1e-13);
    }
}
