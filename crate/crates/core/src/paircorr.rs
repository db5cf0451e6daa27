//! Pair-correlation statistics of zeros: W, G_{χ1,χ2}, F_q and its integral
//! form, the R₁ mean square, gap histograms and the mean-value lemma check.

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::arith::{euler_phi, gcd, CompensatedSum};
use crate::characters::{enumerate_characters, CharacterError, CharacterLabel, DirichletCharacter};
use crate::quad::{adaptive_gk, composite_gauss_legendre, QuadError};
use crate::sieve::{LambdaTable, SieveError, PSI_UPPER_CONSTANT};
use crate::zeros::ZeroSet;

/// Zero sets keyed by the character they serve (imprimitive labels may alias).
pub type ZeroSets = BTreeMap<CharacterLabel, Arc<ZeroSet>>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PairCorrError {
    #[error("residue {a} is not a unit mod {q}")]
    NonUnitResidue { q: u64, a: u64 },
    #[error("no zero set supplied for {0}")]
    MissingZeroSet(CharacterLabel),
    #[error("zero set for {0} is not certified")]
    Uncertified(CharacterLabel),
    #[error("zero set for {label} reaches height {height}, need {needed}")]
    HeightTooLow {
        label: CharacterLabel,
        height: f64,
        needed: f64,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("truncation at V = {v} leaves a tail bound {bound:e} above {target:e}")]
    TruncationBudget { v: f64, bound: f64, target: f64 },
    #[error("quadrature needs at least {needed} nodes, got {given}")]
    TooFewNodes { needed: usize, given: usize },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Sieve(#[from] SieveError),
    #[error(transparent)]
    Character(#[from] CharacterError),
}

/// Which ordinates count as "up to height T".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    /// |γ| <= T.
    #[default]
    Symmetric,
    /// 0 < γ <= T.
    Positive,
}

impl Window {
    pub fn select(&self, set: &ZeroSet, height: f64) -> Vec<f64> {
        let all = set.ordinates_within(height);
        match self {
            Window::Symmetric => all,
            Window::Positive => all.into_iter().filter(|&g| g > 0.0).collect(),
        }
    }

    fn contains(&self, gamma: f64, height: f64) -> bool {
        match self {
            Window::Symmetric => gamma.abs() <= height,
            Window::Positive => gamma > 0.0 && gamma <= height,
        }
    }
}

/// Whether a parameter choice lies in the range a result is proved for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    InRange,
    Extrapolated,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::InRange => "in-range",
            Regime::Extrapolated => "extrapolated",
        })
    }
}

/// W(u) = 4 / (4 + u²).
pub fn weight_w(u: f64) -> f64 {
    4.0 / (4.0 + u * u)
}

/// GUE pair density 1 − (sin πu / πu)².
pub fn gue_density(u: f64) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    let s = (PI * u).sin() / (PI * u);
    1.0 - s * s
}

#[derive(Debug, Clone, Copy, Default)]
struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Σ_{γ1 ∈ a, γ2 ∈ b} x^{i(γ1−γ2)} W(γ1 − γ2) for sorted ordinate lists.
///
/// Each row is walked outward from the diagonal so the pairs with W near 1
/// enter the accumulator first.
pub fn pair_sum(a: &[f64], b: &[f64], log_x: f64) -> Complex64 {
    let mut acc = ComplexSum::default();
    for &g1 in a {
        let mid = b.partition_point(|&g| g < g1);
        let (mut l, mut r) = (mid, mid);
        while l > 0 || r < b.len() {
            let take_right = match (l > 0, r < b.len()) {
                (true, true) => (b[r] - g1).abs() <= (g1 - b[l - 1]).abs(),
                (false, true) => true,
                _ => false,
            };
            let g2 = if take_right {
                r += 1;
                b[r - 1]
            } else {
                l -= 1;
                b[l]
            };
            let d = g1 - g2;
            acc.add(Complex64::from_polar(weight_w(d), log_x * d));
        }
    }
    acc.value()
}

/// Weighted pair sum Σ c_a c̄_b x^{i(γa−γb)} W(γa−γb) over two term lists.
fn weighted_pair_sum(a: &[(Complex64, f64)], b: &[(Complex64, f64)], log_x: f64) -> Complex64 {
    let mut acc = ComplexSum::default();
    for &(ca, ga) in a {
        for &(cb, gb) in b {
            let d = ga - gb;
            acc.add(ca * cb.conj() * Complex64::from_polar(weight_w(d), log_x * d));
        }
    }
    acc.value()
}

/// Everything F_q(x, T) depends on.
#[derive(Debug, Clone)]
pub struct PairCorrInput {
    pub q: u64,
    pub a: u64,
    pub x: f64,
    pub height: f64,
    pub window: Window,
    zero_sets: ZeroSets,
    characters: Vec<DirichletCharacter>,
}

impl PairCorrInput {
    pub fn new(q: u64, a: u64, x: f64, height: f64, zero_sets: ZeroSets) -> Result<Self, PairCorrError> {
        if q == 0 || (q > 1 && gcd(a % q, q) != 1) {
            return Err(PairCorrError::NonUnitResidue { q, a });
        }
        if !(x > 0.0 && x.is_finite()) {
            return Err(PairCorrError::InvalidArgument(format!("x = {x} must be positive")));
        }
        if !(height >= 0.0 && height.is_finite()) {
            return Err(PairCorrError::InvalidArgument(format!("T = {height} must be nonnegative")));
        }
        let characters = enumerate_characters(q)?;
        for chi in &characters {
            let label = chi.label();
            let set = zero_sets.get(&label).ok_or(PairCorrError::MissingZeroSet(label))?;
            check_set(label, set, height)?;
        }
        Ok(Self {
            q,
            a,
            x,
            height,
            window: Window::Symmetric,
            zero_sets,
            characters,
        })
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = window;
        self
    }

    /// Same sets at another x and height (height must stay covered).
    pub fn at(&self, x: f64, height: f64) -> Result<Self, PairCorrError> {
        Ok(Self::new(self.q, self.a, x, height, self.zero_sets.clone())?.with_window(self.window))
    }

    pub fn zero_sets(&self) -> &ZeroSets {
        &self.zero_sets
    }

    pub fn characters(&self) -> &[DirichletCharacter] {
        &self.characters
    }

    fn set_of(&self, chi: &DirichletCharacter) -> &Arc<ZeroSet> {
        &self.zero_sets[&chi.label()]
    }

    /// (Σ_{χ ↦ S} χ̄(a), ordinates of S) per distinct zero set, in label order.
    fn grouped(&self, height: f64) -> Vec<(Complex64, Vec<f64>)> {
        let mut groups: BTreeMap<CharacterLabel, (Complex64, Vec<f64>)> = BTreeMap::new();
        for chi in &self.characters {
            let set = self.set_of(chi);
            let weight = chi.value(self.a as i64).conj();
            groups
                .entry(set.character())
                .or_insert_with(|| (Complex64::new(0.0, 0.0), self.window.select(set, height)))
                .0 += weight;
        }
        groups.into_values().collect()
    }

    /// Flattened (coefficient, γ) terms of Σ(x, T, v) for the given height band.
    fn terms_in(&self, lower: Option<f64>, upper: f64) -> Vec<(Complex64, f64)> {
        self.grouped(upper)
            .into_iter()
            .flat_map(|(c, ords)| {
                ords.into_iter()
                    .filter(move |g| lower.map_or(true, |u| g.abs() > u))
                    .map(move |g| (c, g))
            })
            .filter(|(c, _)| c.norm() > 0.0)
            .collect()
    }

    /// Σ(x, T, v) = Σ_χ χ̄(a) Σ_{γ} x^{iγ} e^{ivγ}.
    pub fn sigma(&self, v: f64) -> Complex64 {
        let lx = self.x.ln() + v;
        let mut acc = ComplexSum::default();
        for (c, ords) in self.grouped(self.height) {
            let mut inner = ComplexSum::default();
            for g in ords {
                inner.add(Complex64::from_polar(1.0, g * lx));
            }
            acc.add(c * inner.value());
        }
        acc.value()
    }
}

fn check_set(label: CharacterLabel, set: &ZeroSet, height: f64) -> Result<(), PairCorrError> {
    if !set.is_certified() {
        return Err(PairCorrError::Uncertified(label));
    }
    if set.height() < height {
        return Err(PairCorrError::HeightTooLow {
            label,
            height: set.height(),
            needed: height,
        });
    }
    Ok(())
}

/// G_{χ1,χ2}(x, T) from the two characters' zero sets.
pub fn g_pair(
    chi1: &CharacterLabel,
    chi2: &CharacterLabel,
    x: f64,
    height: f64,
    zero_sets: &ZeroSets,
    window: Window,
) -> Result<Complex64, PairCorrError> {
    let s1 = zero_sets.get(chi1).ok_or(PairCorrError::MissingZeroSet(*chi1))?;
    let s2 = zero_sets.get(chi2).ok_or(PairCorrError::MissingZeroSet(*chi2))?;
    check_set(*chi1, s1, height)?;
    check_set(*chi2, s2, height)?;
    Ok(pair_sum(&window.select(s1, height), &window.select(s2, height), x.ln()))
}

/// F_q(x, T) with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCorrResult {
    pub q: u64,
    pub a: u64,
    pub x: f64,
    pub height: f64,
    pub window: Window,
    pub value: Complex64,
    /// Number of (χ1, χ2, γ1, γ2) terms represented.
    pub term_count: u64,
    /// |F_q| / (T (φ(q) log qT)²).
    pub trivial_bound_ratio: f64,
}

impl PairCorrResult {
    /// F_q / ((φ(q)/π) T log x), the quantity of the asymptotic theorem.
    pub fn theorem_ratio(&self) -> Option<f64> {
        let denom = euler_phi(self.q) as f64 / PI * self.height * self.x.ln();
        (denom != 0.0).then(|| self.value.re / denom)
    }

    /// The theorem is stated for x <= T (with q small against x).
    pub fn regime(&self) -> Regime {
        if self.x <= self.height && self.x >= 1.0 {
            Regime::InRange
        } else {
            Regime::Extrapolated
        }
    }
}

/// Σ_{χ1,χ2} χ̄1(a) χ2(a) G_{χ1,χ2}(x, T).
///
/// G is computed once per pair of distinct zero sets and reused by every
/// character pair that aliases it.
pub fn f_q(input: &PairCorrInput) -> PairCorrResult {
    let log_x = input.x.ln();
    let mut ordinates: BTreeMap<CharacterLabel, Vec<f64>> = BTreeMap::new();
    for chi in &input.characters {
        let set = input.set_of(chi);
        ordinates
            .entry(set.character())
            .or_insert_with(|| input.window.select(set, input.height));
    }
    let mut g_cache: BTreeMap<(CharacterLabel, CharacterLabel), Complex64> = BTreeMap::new();
    let mut acc = ComplexSum::default();
    let mut terms = 0u64;
    for chi1 in &input.characters {
        let k1 = input.set_of(chi1).character();
        let w1 = chi1.value(input.a as i64).conj();
        for chi2 in &input.characters {
            let k2 = input.set_of(chi2).character();
            let g = *g_cache
                .entry((k1, k2))
                .or_insert_with(|| pair_sum(&ordinates[&k1], &ordinates[&k2], log_x));
            acc.add(w1 * chi2.value(input.a as i64) * g);
            terms += (ordinates[&k1].len() * ordinates[&k2].len()) as u64;
        }
    }
    let value = acc.value();
    let phi = euler_phi(input.q) as f64;
    let scale = input.height * (phi * (input.q as f64 * input.height).ln()).powi(2);
    PairCorrResult {
        q: input.q,
        a: input.a,
        x: input.x,
        height: input.height,
        window: input.window,
        value,
        term_count: terms,
        trivial_bound_ratio: if scale > 0.0 { value.norm() / scale } else { f64::INFINITY },
    }
}

/// Σ(x, T, v; q, a).
pub fn sigma_sum(x: f64, height: f64, v: f64, q: u64, a: u64, zero_sets: &ZeroSets) -> Result<Complex64, PairCorrError> {
    Ok(PairCorrInput::new(q, a, x, height, zero_sets.clone())?.sigma(v))
}

/// F(x, T)·2π / (T log x) over ζ zeros with |γ| <= T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaRatio {
    pub x: f64,
    pub height: f64,
    pub f_value: f64,
    /// Undefined at x = 1.
    pub ratio: Option<f64>,
    pub regime: Regime,
}

pub fn f_zeta_ratio(x: f64, height: f64, zeta_zeros: &Arc<ZeroSet>) -> Result<ZetaRatio, PairCorrError> {
    let mut sets = ZeroSets::new();
    sets.insert(CharacterLabel::principal(1)?, zeta_zeros.clone());
    let f = f_q(&PairCorrInput::new(1, 1, x, height, sets)?).value.re;
    let lx = x.ln();
    Ok(ZetaRatio {
        x,
        height,
        f_value: f,
        ratio: (lx != 0.0).then(|| f * 2.0 * PI / (height * lx)),
        regime: if (1.0..=height).contains(&x) {
            Regime::InRange
        } else {
            Regime::Extrapolated
        },
    })
}

/// Truncation and accuracy for the v-integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    /// Integrate over [−V, V]; chosen from the tail budget when `None`.
    pub truncation: Option<f64>,
    /// Target error relative to the integral.
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            truncation: None,
            rel_tol: 1e-10,
            max_panels: 1 << 20,
        }
    }
}

/// Relative size of the discarded tail allowed in the v-integral.
const TAIL_BUDGET: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralValue {
    pub value: f64,
    pub truncation: f64,
    /// (Σ|c|)²·e^{−2V}, a bound on the part of the integral beyond ±V.
    pub tail_bound: f64,
    pub quadrature_error: f64,
    pub panels: usize,
}

/// ∫ |Σ_j c_j e^{iγ_j(log x + v)}|² e^{−2|v|} dv over the real line.
fn integrate_terms(terms: &[(Complex64, f64)], log_x: f64, spec: &QuadSpec) -> Result<IntegralValue, PairCorrError> {
    if terms.is_empty() {
        return Ok(IntegralValue {
            value: 0.0,
            truncation: spec.truncation.unwrap_or(0.0),
            tail_bound: 0.0,
            quadrature_error: 0.0,
            panels: 0,
        });
    }
    let mass: f64 = terms.iter().map(|(c, _)| c.norm()).sum();
    let gmax = terms.iter().map(|(_, g)| g.abs()).fold(0.0, f64::max).max(1.0);
    let integrand = |v: f64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(c, g) in terms {
            acc += c * Complex64::from_polar(1.0, g * (log_x + v));
        }
        acc.norm_sqr() * (-2.0 * v.abs()).exp()
    };
    let panel = (PI / gmax).min(0.25);
    let run = |v_max: f64, tol: f64| -> Result<(f64, f64, usize), PairCorrError> {
        let n = (v_max / panel).ceil() as usize;
        let left = adaptive_gk(&integrand, -v_max, 0.0, n, 0.5 * tol, spec.max_panels)?;
        let right = adaptive_gk(&integrand, 0.0, v_max, n, 0.5 * tol, spec.max_panels)?;
        Ok((
            left.value + right.value,
            left.error_estimate + right.error_estimate,
            left.panels + right.panels,
        ))
    };
    // rough size first, then the truncation that meets the tail budget
    let (rough, _, _) = run(4.0, 1e-6 * mass * mass)?;
    let scale = rough.abs().max(f64::MIN_POSITIVE);
    let v_max = match spec.truncation {
        Some(v) => v,
        None => (0.5 * (mass * mass / (TAIL_BUDGET * scale)).ln()).max(4.0),
    };
    let (value, err, panels) = run(v_max, spec.rel_tol * scale)?;
    let tail_bound = mass * mass * (-2.0 * v_max).exp();
    if tail_bound > TAIL_BUDGET * value.abs().max(scale) {
        return Err(PairCorrError::TruncationBudget {
            v: v_max,
            bound: tail_bound,
            target: TAIL_BUDGET * value.abs(),
        });
    }
    Ok(IntegralValue {
        value,
        truncation: v_max,
        tail_bound,
        quadrature_error: err,
        panels,
    })
}

/// F_q(x, T) as ∫ |Σ(x, T, v)|² e^{−2|v|} dv.
pub fn f_q_via_integral(input: &PairCorrInput, spec: &QuadSpec) -> Result<IntegralValue, PairCorrError> {
    integrate_terms(&input.terms_in(None, input.height), input.x.ln(), spec)
}

/// Both sides of the increment identity, plus the cross-term diagnostics.
///
/// `lhs` integrates |Σ(x,T,v) − Σ(x,U,v)|² e^{−2|v|}; `rhs` is F_q(x,T) −
/// F_q(x,U). The two differ by 2·Re C, where C pairs zeros in U < |γ| <= T
/// with zeros in |γ| <= U; `corrected_residual` compares `lhs` with
/// `rhs − 2 Re C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncrementCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub cross_term: Complex64,
    pub corrected_residual: f64,
    pub inner_zero_count: usize,
}

fn relative(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d == 0.0 {
        0.0
    } else {
        d / b.abs().max(a.abs()).max(f64::MIN_POSITIVE)
    }
}

pub fn increment_identity_check(input: &PairCorrInput, lower: f64, spec: &QuadSpec) -> Result<IncrementCheck, PairCorrError> {
    if !(lower >= 0.0 && lower <= input.height) {
        return Err(PairCorrError::InvalidArgument(format!(
            "need 0 <= U <= T, got U = {lower}, T = {}",
            input.height
        )));
    }
    let log_x = input.x.ln();
    let ring = input.terms_in(Some(lower), input.height);
    let inner: Vec<(Complex64, f64)> = input
        .terms_in(None, lower)
        .into_iter()
        .filter(|(_, g)| input.window.contains(*g, lower))
        .collect();
    let lhs = integrate_terms(&ring, log_x, spec)?.value;
    let rhs = f_q(input).value.re - f_q(&input.at(input.x, lower)?).value.re;
    let cross = weighted_pair_sum(&ring, &inner, log_x);
    Ok(IncrementCheck {
        lhs,
        rhs,
        residual: relative(lhs, rhs),
        cross_term: cross,
        corrected_residual: relative(lhs, rhs - 2.0 * cross.re),
        inner_zero_count: inner.len(),
    })
}

/// R₁(x, t) for one progression, with its coefficients precomputed.
#[derive(Debug, Clone)]
pub struct R1Sum {
    pub x: f64,
    pub q: u64,
    pub a: u64,
    pub cutoff: f64,
    phi: f64,
    /// (Λ(n)(x/n)^{−1/2} or Λ(n)(x/n)^{3/2}, log(x/n)).
    terms: Vec<(f64, f64)>,
    /// Bound on |contribution of n > cutoff|, uniform in t.
    pub tail_bound: f64,
}

impl R1Sum {
    pub fn new(table: &LambdaTable, x: f64, q: u64, a: u64, cutoff: f64) -> Result<Self, PairCorrError> {
        if q == 0 || (q > 1 && gcd(a % q, q) != 1) {
            return Err(PairCorrError::NonUnitResidue { q, a });
        }
        if !(cutoff >= 8.0 * x) {
            return Err(SieveError::CutoffTooSmall {
                cutoff,
                min: 8.0 * x,
            }
            .into());
        }
        if table.lo() != 2 || (table.hi() as f64) < cutoff.floor() {
            return Err(SieveError::NotCovered {
                lo: table.lo(),
                hi: table.hi(),
                needed: cutoff.floor() as u64,
            }
            .into());
        }
        let residue = a % q;
        let terms = table
            .entries()
            .iter()
            .filter(|e| (e.n as f64) <= cutoff && e.n % q == residue)
            .map(|e| {
                let ratio = x / e.n as f64;
                let power = if e.n as f64 <= x { -0.5 } else { 1.5 };
                (e.log_p() * ratio.powf(power), ratio.ln())
            })
            .collect();
        let phi = euler_phi(q) as f64;
        Ok(Self {
            x,
            q,
            a,
            cutoff,
            phi,
            terms,
            tail_bound: 3.0 * PSI_UPPER_CONSTANT * phi * x / cutoff.sqrt(),
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// R₁(x, t).
    pub fn value(&self, t: f64) -> Complex64 {
        let mut acc = ComplexSum::default();
        for &(c, f) in &self.terms {
            acc.add(Complex64::from_polar(c, t * f));
        }
        acc.value() * (-self.phi / self.x.sqrt())
    }

    /// Fewest quadrature nodes on [−T, T] keeping the spacing <= 0.25/log x.
    pub fn min_nodes(&self, height: f64) -> usize {
        (2.0 * height * self.x.ln() / 0.25).ceil() as usize
    }
}

/// R₁(x, t) assembled from a Λ table.
pub fn r1(x: f64, t: f64, q: u64, a: u64, table: &LambdaTable, cutoff: f64) -> Result<(Complex64, f64), PairCorrError> {
    let sum = R1Sum::new(table, x, q, a, cutoff)?;
    Ok((sum.value(t), sum.tail_bound))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct R1MeanSquare {
    pub integral: f64,
    /// 2T·S(x)·φ(q)².
    pub main_term: f64,
    pub ratio: f64,
    pub nodes: usize,
    /// T >= x/φ(q).
    pub regime: Regime,
}

const R1_ORDER: usize = 8;

/// ∫_{−T}^{T} |R₁(x, t)|² dt with at least `nodes` Gauss–Legendre nodes.
pub fn r1_mean_square(sum: &R1Sum, table: &LambdaTable, height: f64, nodes: usize) -> Result<R1MeanSquare, PairCorrError> {
    let needed = sum.min_nodes(height);
    if nodes < needed {
        return Err(PairCorrError::TooFewNodes { needed, given: nodes });
    }
    // |R₁|² is even in t since the coefficients are real
    let panels = nodes.div_ceil(2 * R1_ORDER).max(1);
    let half = composite_gauss_legendre(&|t: f64| sum.value(t).norm_sqr(), 0.0, height, panels, R1_ORDER);
    let integral = 2.0 * half;
    let s = table.s_of_x(sum.x, sum.q, sum.a, sum.cutoff)?;
    let main = 2.0 * height * s.value * sum.phi * sum.phi;
    Ok(R1MeanSquare {
        integral,
        main_term: main,
        ratio: integral / main,
        nodes: panels * 2 * R1_ORDER,
        regime: if height >= sum.x / sum.phi {
            Regime::InRange
        } else {
            Regime::Extrapolated
        },
    })
}

/// Ordered-pair gap counts against the GUE prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacingHistogram {
    pub alpha: f64,
    pub beta: f64,
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// (T/2π) log T.
    pub normalization: f64,
    pub includes_diagonal: bool,
    /// Pairs (γ, γ) counted in the bin holding u = 0.
    pub diagonal_count: u64,
    /// normalization·∫_bin (1 − sinc²), without any diagonal term.
    pub expected: Vec<f64>,
    /// normalization·δ(α, β), added once for the whole window.
    pub expected_diagonal: f64,
}

impl SpacingHistogram {
    pub fn total_pairs(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// (bin centre, count / expected) rows.
    pub fn overlay(&self) -> Vec<(f64, f64)> {
        (0..self.counts.len())
            .map(|i| {
                let c = 0.5 * (self.edges[i] + self.edges[i + 1]);
                let e = self.expected[i];
                (c, if e > 0.0 { self.counts[i] as f64 / e } else { f64::NAN })
            })
            .collect()
    }
}

/// Histogram of u = (γ − γ′) log T / 2π over ordered pairs from `ordinates`.
pub fn spacing_histogram(ordinates: &[f64], height: f64, alpha: f64, beta: f64, bins: usize) -> Result<SpacingHistogram, PairCorrError> {
    if !(alpha < beta) || bins == 0 || !(height > 1.0) {
        return Err(PairCorrError::InvalidArgument(format!(
            "need α < β, bins > 0 and T > 1 (got {alpha}, {beta}, {bins}, {height})"
        )));
    }
    let scale = height.ln() / (2.0 * PI);
    let width = (beta - alpha) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| alpha + i as f64 * width).collect();
    let mut counts = vec![0u64; bins];
    let includes_diagonal = alpha <= 0.0 && 0.0 <= beta;
    let mut diagonal = 0;
    for (i, &g1) in ordinates.iter().enumerate() {
        for (j, &g2) in ordinates.iter().enumerate() {
            if i == j && !includes_diagonal {
                continue;
            }
            let u = (g1 - g2) * scale;
            if u < alpha || u > beta {
                continue;
            }
            let bin = (((u - alpha) / width).floor() as usize).min(bins - 1);
            counts[bin] += 1;
            if i == j {
                diagonal += 1;
            }
        }
    }
    let normalization = height / (2.0 * PI) * height.ln();
    let expected = edges
        .windows(2)
        .map(|e| normalization * composite_gauss_legendre(&gue_density, e[0], e[1], 4, 8))
        .collect();
    Ok(SpacingHistogram {
        alpha,
        beta,
        edges,
        counts,
        normalization,
        includes_diagonal,
        diagonal_count: diagonal,
        expected,
        expected_diagonal: if includes_diagonal { normalization } else { 0.0 },
    })
}

/// Exact ∫_{−T}^{T} |Σ c(μ) e(μt)|² dt against the mean-value lemma's shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanValueCheck {
    pub exact_integral: f64,
    /// 2T·Σ c².
    pub main_term: f64,
    /// T·Σ_{0 < |μ−ν| < δ} |c(μ)c(ν)| over ordered pairs.
    pub off_diagonal_bound: f64,
    /// δ⁻¹·Σ c² + off_diagonal_bound.
    pub envelope: f64,
    /// |exact − main| / envelope.
    pub implied_constant: f64,
}

fn sinc(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        z.sin() / z
    }
}

pub fn mean_value_check(frequencies: &[(f64, f64)], height: f64, delta: f64) -> Result<MeanValueCheck, PairCorrError> {
    if !(height > 0.0) || !(delta >= 1.0 / (2.0 * height) && delta <= 0.5) {
        return Err(PairCorrError::InvalidArgument(format!(
            "δ = {delta} outside [1/(2T), 1/2] for T = {height}"
        )));
    }
    let mut exact = CompensatedSum::new();
    let mut off = CompensatedSum::new();
    for &(mu, cm) in frequencies {
        for &(nu, cn) in frequencies {
            let d = mu - nu;
            exact.add(cm * cn * 2.0 * height * sinc(2.0 * PI * d * height));
            if d != 0.0 && d.abs() < delta {
                off.add((cm * cn).abs());
            }
        }
    }
    let energy: f64 = frequencies.iter().map(|(_, c)| c * c).sum();
    let main = 2.0 * height * energy;
    let off_diagonal_bound = height * off.value();
    let envelope = energy / delta + off_diagonal_bound;
    let exact = exact.value();
    Ok(MeanValueCheck {
        exact_integral: exact,
        main_term: main,
        off_diagonal_bound,
        envelope,
        implied_constant: if envelope > 0.0 { (exact - main).abs() / envelope } else { 0.0 },
    })
}
