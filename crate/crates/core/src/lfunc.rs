//! Dirichlet L-functions on and near the critical line.
//!
//! L(s, χ) is assembled from Hurwitz zeta values, each evaluated with
//! Euler–Maclaurin summation and an explicit remainder bound. For primitive
//! characters the critical-line values are rotated by the archimedean phase
//! and the square root of the root number, which gives a real function whose
//! sign changes are the zeros.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::arith::gcd;
use crate::characters::{CharacterLabel, DirichletCharacter};
use crate::special::{bernoulli_even, bernoulli_over_factorial, ln_gamma, MAX_BERNOULLI_INDEX};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LFuncError {
    #[error("pole at s = 1")]
    Pole,
    #[error("Hurwitz parameter {0} outside (0, 1]")]
    ParameterOutOfRange(f64),
    #[error("Euler-Maclaurin remainder bound {bound:e} exceeds target {target:e} (N = {terms}, M = {corrections})")]
    PrecisionUnreachable {
        bound: f64,
        target: f64,
        terms: usize,
        corrections: usize,
    },
    #[error("character {0} is not primitive")]
    NotPrimitive(CharacterLabel),
    #[error("rotated value at t = {t} has imaginary residual {residual:e} (|Z| = {modulus:e})")]
    RealnessViolation { t: f64, residual: f64, modulus: f64 },
}

/// Default Euler–Maclaurin correction depth.
pub const DEFAULT_CORRECTIONS: usize = 12;

/// Direct terms per unit of height; the rule is N >= c·(|t| + 10).
const TERMS_PER_HEIGHT: f64 = 1.0;

/// Euler–Maclaurin parameters for a given accuracy target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPrecision {
    target_abs_error: f64,
    direct_terms: usize,
    bernoulli_terms: usize,
}

impl EvalPrecision {
    pub fn new(target_abs_error: f64, direct_terms: usize, bernoulli_terms: usize) -> Self {
        assert!(target_abs_error > 0.0);
        assert!(direct_terms >= 1);
        assert!((1..=MAX_BERNOULLI_INDEX).contains(&bernoulli_terms));
        Self {
            target_abs_error,
            direct_terms,
            bernoulli_terms,
        }
    }

    /// Parameters valid for |Im s| <= `height` and Re s >= 1/2.
    pub fn for_height(height: f64, target_abs_error: f64) -> Self {
        let m = DEFAULT_CORRECTIONS;
        let mut n = (TERMS_PER_HEIGHT * (height.abs() + 10.0)).ceil() as usize;
        let worst = Complex64::new(0.5, height.abs());
        while remainder_bound(worst, 0.0, n, m) > target_abs_error {
            n = n + n / 4 + 1;
        }
        Self::new(target_abs_error, n, m)
    }

    pub fn target_abs_error(&self) -> f64 {
        self.target_abs_error
    }

    pub fn direct_terms(&self) -> usize {
        self.direct_terms
    }

    pub fn bernoulli_terms(&self) -> usize {
        self.bernoulli_terms
    }

    /// Same target with twice as many direct terms.
    pub fn doubled(&self) -> Self {
        Self {
            direct_terms: 2 * self.direct_terms,
            ..*self
        }
    }
}

/// Bound on the Euler–Maclaurin remainder after `m` corrections at `N + a`.
pub fn remainder_bound(s: Complex64, a: f64, n: usize, m: usize) -> f64 {
    let sigma_eff = s.re + 2.0 * m as f64 - 1.0;
    if sigma_eff <= 0.0 {
        return f64::INFINITY;
    }
    let w = n as f64 + a;
    let coeff = bernoulli_even(m).abs() / (1..=2 * m).map(|i| i as f64).product::<f64>();
    // evaluated in logs, |(s)_{2m}| overflows quickly at large heights
    let log_bound = coeff.ln() + pochhammer_abs_log(s, 2 * m) - (sigma_eff) * w.ln() - sigma_eff.ln();
    log_bound.exp()
}

/// log |(s)_n| = log |s (s+1) ... (s+n-1)|.
fn pochhammer_abs_log(s: Complex64, n: usize) -> f64 {
    (0..n).map(|j| (s + j as f64).norm().ln()).sum()
}

/// ζ(s, a) for 0 < a <= 1, s != 1.
pub fn hurwitz_zeta(s: Complex64, a: f64, prec: &EvalPrecision) -> Result<Complex64, LFuncError> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(LFuncError::Pole);
    }
    hurwitz_checked(s, a, prec)?;
    Ok(hurwitz_parts(s, a, prec.direct_terms, prec.bernoulli_terms))
}

fn hurwitz_checked(s: Complex64, a: f64, prec: &EvalPrecision) -> Result<(), LFuncError> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(LFuncError::ParameterOutOfRange(a));
    }
    let n = prec.direct_terms;
    let m = prec.bernoulli_terms;
    let bound = remainder_bound(s, a, n, m);
    log::trace!(target: "lfunc::budget", "hurwitz s={s} a={a} N={n} M={m} bound={bound:e}");
    if !(bound <= prec.target_abs_error) {
        return Err(LFuncError::PrecisionUnreachable {
            bound,
            target: prec.target_abs_error,
            terms: n,
            corrections: m,
        });
    }
    Ok(())
}

/// Direct sum plus tail; at s = 1 the divergent 1/(s-1) is dropped, which
/// cancels in any character sum with Σ χ(a) = 0.
fn hurwitz_parts(s: Complex64, a: f64, n: usize, m: usize) -> Complex64 {
    let mut direct = Complex64::new(0.0, 0.0);
    for k in (0..n).rev() {
        direct += (-s * (k as f64 + a).ln()).exp();
    }
    direct + euler_maclaurin_tail(s, n as f64 + a, m)
}

/// Integral, midpoint and Bernoulli corrections of Σ_{n >= 0} (w + n)^{-s}.
fn euler_maclaurin_tail(s: Complex64, w: f64, m: usize) -> Complex64 {
    let lw = w.ln();
    let w_pow = (-s * lw).exp();
    let integral = if s == Complex64::new(1.0, 0.0) {
        Complex64::new(-lw, 0.0)
    } else {
        w_pow * w / (s - 1.0)
    };
    let mut tail = integral + w_pow * 0.5;
    let mut poch = s;
    let mut term_pow = w_pow / w;
    let inv_w2 = 1.0 / (w * w);
    for k in 1..=m {
        tail += poch * term_pow * bernoulli_over_factorial(k);
        poch *= (s + (2 * k - 1) as f64) * (s + (2 * k) as f64);
        term_pow *= inv_w2;
    }
    tail
}

/// L(s, χ) = q^{-s} Σ_a χ(a) ζ(s, a/q) for any character.
pub fn l_value_hurwitz(chi: &DirichletCharacter, s: Complex64, prec: &EvalPrecision) -> Result<Complex64, LFuncError> {
    if chi.is_principal() && s == Complex64::new(1.0, 0.0) {
        return Err(LFuncError::Pole);
    }
    let q = chi.modulus();
    let qf = q as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 1..=q {
        if gcd(a, q) != 1 {
            continue;
        }
        let a_q = a as f64 / qf;
        let z = if s == Complex64::new(1.0, 0.0) {
            hurwitz_checked(s, a_q, prec)?;
            hurwitz_parts(s, a_q, prec.direct_terms, prec.bernoulli_terms)
        } else {
            hurwitz_zeta(s, a_q, prec)?
        };
        acc += chi.value(a as i64) * z;
    }
    Ok(acc * (-s * qf.ln()).exp())
}

/// L(s, χ); imprimitive characters go through their inducer times the
/// missing Euler factors Π_{p | q} (1 - χ*(p) p^{-s}).
pub fn l_value(chi: &DirichletCharacter, s: Complex64, prec: &EvalPrecision) -> Result<Complex64, LFuncError> {
    if chi.is_primitive() {
        return l_value_hurwitz(chi, s, prec);
    }
    if chi.is_principal() && s == Complex64::new(1.0, 0.0) {
        return Err(LFuncError::Pole);
    }
    let (_, star) = chi.conductor_and_inducer();
    let base = l_value_hurwitz(&star, s, prec)?;
    let factor = crate::arith::factorize(chi.modulus())
        .into_iter()
        .fold(Complex64::new(1.0, 0.0), |acc, (p, _)| {
            let pf = p as f64;
            acc * (1.0 - star.value(p as i64) * (-s * pf.ln()).exp())
        });
    Ok(base * factor)
}

/// ε(χ) = τ(χ) / (i^𝔞 √q) for primitive χ.
pub fn root_number(chi: &DirichletCharacter) -> Result<Complex64, LFuncError> {
    if !chi.is_primitive() {
        return Err(LFuncError::NotPrimitive(chi.label()));
    }
    let q = chi.modulus() as f64;
    let i_pow = if chi.parity() == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    };
    Ok(chi.gauss_sum() / (i_pow * q.sqrt()))
}

/// Rotation data for a primitive character.
#[derive(Debug, Clone)]
pub struct CompletedLParams {
    character: DirichletCharacter,
    root_number: Complex64,
    rotation_phase: f64,
}

/// Tag recorded with cached zeros: the rotation uses half of arg ε in (-π/2, π/2].
pub const ROTATION_BRANCH_PRINCIPAL_HALF_ANGLE: u32 = 1;

impl CompletedLParams {
    pub fn new(chi: &DirichletCharacter) -> Result<Self, LFuncError> {
        let eps = root_number(chi)?;
        Ok(Self {
            character: chi.clone(),
            root_number: eps,
            rotation_phase: eps.arg() / 2.0,
        })
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.character
    }

    pub fn parity(&self) -> u8 {
        self.character.parity()
    }

    pub fn root_number(&self) -> Complex64 {
        self.root_number
    }

    /// The chosen branch of arg √ε.
    pub fn rotation_phase(&self) -> f64 {
        self.rotation_phase
    }

    pub fn branch_tag(&self) -> u32 {
        ROTATION_BRANCH_PRINCIPAL_HALF_ANGLE
    }

    /// θ(t) such that e^{iθ(t)} L(1/2 + it, χ) is real.
    pub fn theta(&self, t: f64) -> f64 {
        let q = self.character.modulus() as f64;
        let a = self.parity() as f64;
        let g = ln_gamma(Complex64::new((0.5 + a) / 2.0, t / 2.0));
        g.im + 0.5 * t * (q / PI).ln() - self.rotation_phase
    }

    /// Λ(s, χ) = (q/π)^{(s+𝔞)/2} Γ((s+𝔞)/2) L(s, χ), for Re s > -𝔞.
    pub fn completed(&self, s: Complex64, prec: &EvalPrecision) -> Result<Complex64, LFuncError> {
        let q = self.character.modulus() as f64;
        let a = self.parity() as f64;
        let half = (s + a) / 2.0;
        let log_factor = half * (q / PI).ln() + ln_gamma(half);
        Ok(log_factor.exp() * l_value_hurwitz(&self.character, s, prec)?)
    }
}

/// Z_χ(t) = e^{iθ(t)} L(1/2 + it, χ); real for primitive χ.
pub fn hardy_z(params: &CompletedLParams, t: f64, prec: &EvalPrecision) -> Result<f64, LFuncError> {
    let mut p = *prec;
    let mut last = None;
    for _ in 0..3 {
        match rotated_value(params, t, &p) {
            Ok(v) => return Ok(v),
            Err(e @ (LFuncError::RealnessViolation { .. } | LFuncError::PrecisionUnreachable { .. })) => {
                log::debug!(target: "lfunc::budget", "escalating N={} at t={t}: {e}", p.direct_terms());
                last = Some(e);
                p = p.doubled();
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("loop ran"))
}

fn rotated_value(params: &CompletedLParams, t: f64, prec: &EvalPrecision) -> Result<f64, LFuncError> {
    let l = l_value_hurwitz(&params.character, Complex64::new(0.5, t), prec)?;
    let z = Complex64::from_polar(1.0, params.theta(t)) * l;
    check_realness(t, z)
}

fn check_realness(t: f64, z: Complex64) -> Result<f64, LFuncError> {
    if z.im.abs() >= 1e-8 * (1.0 + z.re.abs()) {
        return Err(LFuncError::RealnessViolation {
            t,
            residual: z.im.abs(),
            modulus: z.norm(),
        });
    }
    Ok(z.re)
}

/// τ = |t| + 2, the height parameter appearing in zero-density bounds.
pub fn tau(t: f64) -> f64 {
    t.abs() + 2.0
}

/// Fast repeated evaluation of Z_χ(t) on the critical line.
///
/// The Dirichlet-series head Σ_{m < qN} χ(m) m^{-s} is precomputed as
/// (weight, log m) pairs and the Euler–Maclaurin tails are taken per residue.
#[derive(Debug, Clone)]
pub struct CriticalLineEvaluator {
    params: CompletedLParams,
    prec: EvalPrecision,
    head: Vec<(Complex64, f64)>,
    tails: Vec<(Complex64, f64)>,
    log_q: f64,
}

impl CriticalLineEvaluator {
    /// Evaluator valid for |t| <= `height`.
    pub fn new(chi: &DirichletCharacter, height: f64, target_abs_error: f64) -> Result<Self, LFuncError> {
        let params = CompletedLParams::new(chi)?;
        let prec = EvalPrecision::for_height(height, target_abs_error);
        Ok(Self::with_precision(params, prec))
    }

    pub fn with_precision(params: CompletedLParams, prec: EvalPrecision) -> Self {
        let chi = params.character.clone();
        let q = chi.modulus();
        let n = prec.direct_terms() as u64;
        let mut head = Vec::new();
        for m in 1..=q * n {
            if let Some(v) = chi.eval(m as i64) {
                head.push((v.to_complex(), (m as f64).ln()));
            }
        }
        let tails = (1..=q)
            .filter(|&a| gcd(a, q) == 1)
            .map(|a| (chi.value(a as i64), n as f64 + a as f64 / q as f64))
            .collect();
        Self {
            params,
            prec,
            head,
            tails,
            log_q: (q as f64).ln(),
        }
    }

    pub fn params(&self) -> &CompletedLParams {
        &self.params
    }

    pub fn precision(&self) -> &EvalPrecision {
        &self.prec
    }

    /// L(1/2 + it, χ).
    pub fn l_value(&self, t: f64) -> Result<Complex64, LFuncError> {
        let s = Complex64::new(0.5, t);
        let bound = remainder_bound(s, 0.0, self.prec.direct_terms(), self.prec.bernoulli_terms());
        if !(bound <= self.prec.target_abs_error()) {
            return Err(LFuncError::PrecisionUnreachable {
                bound,
                target: self.prec.target_abs_error(),
                terms: self.prec.direct_terms(),
                corrections: self.prec.bernoulli_terms(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for &(w, l) in self.head.iter().rev() {
            let mag = (-0.5 * l).exp();
            let (sin, cos) = (-t * l).sin_cos();
            acc += w * Complex64::new(mag * cos, mag * sin);
        }
        let scale = (-s * self.log_q).exp();
        let mut tail = Complex64::new(0.0, 0.0);
        for &(w, wpos) in &self.tails {
            tail += w * euler_maclaurin_tail(s, wpos, self.prec.bernoulli_terms());
        }
        Ok(acc + tail * scale)
    }

    /// Z_χ(t), escalating to the generic path if the fast one fails its checks.
    pub fn hardy_z(&self, t: f64) -> Result<f64, LFuncError> {
        let fast = self
            .l_value(t)
            .and_then(|l| check_realness(t, Complex64::from_polar(1.0, self.params.theta(t)) * l));
        match fast {
            Ok(v) => Ok(v),
            Err(_) => hardy_z(&self.params, t, &self.prec.doubled()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::enumerate_characters;

    fn prec() -> EvalPrecision {
        EvalPrecision::for_height(100.0, 1e-13)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hurwitz_classical_values() {
        let p = prec();
        let z2 = hurwitz_zeta(c(2.0, 0.0), 1.0, &p).unwrap();
        assert!((z2 - c(PI * PI / 6.0, 0.0)).norm() < 1e-12);
        let apery = 1.202_056_903_159_594_3;
        assert!((hurwitz_zeta(c(3.0, 0.0), 1.0, &p).unwrap().re - apery).abs() < 1e-12);
        let half = hurwitz_zeta(c(2.0, 0.0), 0.5, &p).unwrap();
        assert!((half - c(PI * PI / 2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn hurwitz_matches_high_precision_oracle() {
        // reference values from an independent 30-digit evaluation
        let p = prec();
        let v = hurwitz_zeta(c(0.5, 20.0), 0.3, &p).unwrap();
        assert!((v - c(0.811_114_425_683_923_1, 0.360_416_854_575_937_05)).norm() < 1e-11);
        let v = hurwitz_zeta(c(0.5, 100.0), 1.0 / 7.0, &p).unwrap();
        assert!((v - c(4.599_704_055_626_406_6, -3.367_782_204_128_938_7)).norm() < 1e-11);
        let v = hurwitz_zeta(c(0.5, 100.0), 1.0, &p).unwrap();
        assert!((v - c(2.692_619_885_681_324, -0.020_386_029_602_598_16)).norm() < 1e-11);
    }

    #[test]
    fn hurwitz_errors() {
        let p = prec();
        assert_eq!(hurwitz_zeta(c(1.0, 0.0), 0.5, &p), Err(LFuncError::Pole));
        assert!(matches!(hurwitz_zeta(c(2.0, 0.0), 0.0, &p), Err(LFuncError::ParameterOutOfRange(_))));
        assert!(matches!(hurwitz_zeta(c(2.0, 0.0), 1.5, &p), Err(LFuncError::ParameterOutOfRange(_))));
        let weak = EvalPrecision::new(1e-14, 5, 2);
        assert!(matches!(
            hurwitz_zeta(c(0.5, 300.0), 0.5, &weak),
            Err(LFuncError::PrecisionUnreachable { .. })
        ));
    }

    #[test]
    fn hurwitz_stable_under_doubling() {
        let p = prec();
        for &(s, a) in &[(c(0.5, 14.0), 0.25), (c(0.5, 95.0), 0.9), (c(1.5, -40.0), 0.01), (c(0.5, 0.0), 1.0)] {
            let v1 = hurwitz_zeta(s, a, &p).unwrap();
            let v2 = hurwitz_zeta(s, a, &p.doubled()).unwrap();
            assert!((v1 - v2).norm() < p.target_abs_error(), "s = {s}, a = {a}");
        }
    }

    #[test]
    fn l_values_against_series_oracles() {
        let p = prec();
        let triv = DirichletCharacter::trivial();
        assert!((l_value(&triv, c(2.0, 0.0), &p).unwrap() - c(PI * PI / 6.0, 0.0)).norm() < 1e-12);

        let chi4 = enumerate_characters(4).unwrap().remove(1);
        assert!((l_value(&chi4, c(1.0, 0.0), &p).unwrap() - c(PI / 4.0, 0.0)).norm() < 1e-10);

        // Σ χ_3(n)/n² with an alternating-block tail below 1e-13
        let chi3 = enumerate_characters(3).unwrap().remove(1);
        let direct: f64 = (1..3_000_000i64).map(|n| chi3.value(n).re / (n as f64 * n as f64)).sum();
        let got = l_value(&chi3, c(2.0, 0.0), &p).unwrap();
        assert!((got.re - direct).abs() < 1e-12 && got.im.abs() < 1e-14);
        assert!((got.re - 0.781_302_412_896_486_3).abs() < 1e-12);
    }

    #[test]
    fn principal_pole() {
        let p = prec();
        let chi0 = enumerate_characters(6).unwrap().remove(0);
        assert_eq!(l_value(&chi0, c(1.0, 0.0), &p), Err(LFuncError::Pole));
        assert_eq!(l_value(&DirichletCharacter::trivial(), c(1.0, 0.0), &p), Err(LFuncError::Pole));
    }

    #[test]
    fn imprimitive_routes_agree() {
        let p = prec();
        for q in [6u64, 8, 9, 12, 15, 20] {
            for chi in enumerate_characters(q).unwrap() {
                for s in [c(0.5, 7.3), c(2.0, -3.0), c(0.5, 0.0)] {
                    let via_inducer = l_value(&chi, s, &p).unwrap();
                    let direct = l_value_hurwitz(&chi, s, &p).unwrap();
                    assert!((via_inducer - direct).norm() < 1e-10, "{} at {s}", chi.label());
                }
            }
        }
    }

    #[test]
    fn oracle_l_values() {
        let p = prec();
        let chi5 = enumerate_characters(5)
            .unwrap()
            .into_iter()
            .find(|ch| ch.value(2).im > 0.5)
            .unwrap();
        let v = l_value(&chi5, c(0.5, 10.0), &p).unwrap();
        assert!((v - c(2.124_996_823_450_796_3, 2.163_859_185_370_420_5)).norm() < 1e-11);

        let chi12 = enumerate_characters(12)
            .unwrap()
            .into_iter()
            .find(|ch| ch.is_primitive())
            .unwrap();
        let v = l_value(&chi12, c(0.5, 3.0), &p).unwrap();
        assert!((v - c(0.945_669_014_713_607_2, -0.851_068_183_395_819_2)).norm() < 1e-11);
    }

    #[test]
    fn root_numbers() {
        let eps = root_number(&DirichletCharacter::trivial()).unwrap();
        assert!((eps - c(1.0, 0.0)).norm() < 1e-15);
        let chi4 = enumerate_characters(4).unwrap().remove(1);
        assert!((root_number(&chi4).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        let chi3 = enumerate_characters(3).unwrap().remove(1);
        assert!((root_number(&chi3).unwrap().norm() - 1.0).abs() < 1e-12);
        let chi0 = enumerate_characters(4).unwrap().remove(0);
        assert!(matches!(root_number(&chi0), Err(LFuncError::NotPrimitive(_))));
    }

    #[test]
    fn hardy_z_values() {
        let p = prec();
        let zeta = CompletedLParams::new(&DirichletCharacter::trivial()).unwrap();
        assert!(hardy_z(&zeta, 14.134_725_141_734_7, &p).unwrap().abs() < 1e-6);
        let z0 = hardy_z(&zeta, 0.0, &p).unwrap();
        assert!((z0 + 1.460_354_508_809_586_8).abs() < 1e-10);

        let chi4 = CompletedLParams::new(&enumerate_characters(4).unwrap().remove(1)).unwrap();
        let l = l_value(chi4.character(), c(0.5, 10.0), &p).unwrap();
        let rotated = Complex64::from_polar(1.0, chi4.theta(10.0)) * l;
        assert!(rotated.im.abs() < 1e-8);
        assert!((hardy_z(&chi4, 10.0, &p).unwrap().abs() - l.norm()).abs() < 1e-12);
    }

    #[test]
    fn evaluator_matches_generic_path() {
        for q in [1u64, 3, 4, 5, 8, 11, 24] {
            for chi in enumerate_characters(q).unwrap().into_iter().filter(|c| c.is_primitive()) {
                let ev = CriticalLineEvaluator::new(&chi, 100.0, 1e-12).unwrap();
                for t in [-97.5, -12.25, 0.0, 3.3, 55.0, 99.9] {
                    let slow = l_value(&chi, c(0.5, t), ev.precision()).unwrap();
                    let fast = ev.l_value(t).unwrap();
                    assert!((slow - fast).norm() < 1e-10, "{} at {t}: {slow} vs {fast}", chi.label());
                    let z = ev.hardy_z(t).unwrap();
                    assert!((z.abs() - slow.norm()).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn functional_equation_residuals() {
        let p = EvalPrecision::for_height(70.0, 1e-14);
        for q in 1..=24u64 {
            for chi in enumerate_characters(q).unwrap().into_iter().filter(|c| c.is_primitive()) {
                let params = CompletedLParams::new(&chi).unwrap();
                let dual = CompletedLParams::new(&chi.conj()).unwrap();
                for &(sigma, t) in &[(0.5, 0.0), (0.5, 13.7), (0.7, -21.0), (0.5, 59.5), (0.8, 40.0)] {
                    let s = c(sigma, t);
                    let lhs = params.completed(s, &p).unwrap();
                    let rhs = params.root_number() * dual.completed(1.0 - s, &p).unwrap();
                    let rel = (lhs - rhs).norm() / lhs.norm().max(f64::MIN_POSITIVE);
                    assert!(rel < 1e-8, "{} at {s}: rel {rel:e}", chi.label());
                }
            }
        }
    }

    #[test]
    fn tau_helper() {
        assert_eq!(tau(-3.0), 5.0);
        assert_eq!(tau(0.0), 2.0);
    }
}
