//! Critical-line zeros: mesh scan of the rotated function, refinement of each
//! sign change, and a completeness certificate from the counting formula.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::characters::{enumerate_characters, CharacterError, CharacterLabel, DirichletCharacter};
use crate::lfunc::{CompletedLParams, CriticalLineEvaluator, LFuncError};

/// Default refinement tolerance on ordinates.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Absolute accuracy requested from L-function evaluations during scanning.
const EVAL_TARGET: f64 = 1e-12;

/// Allowed gap between found and rounded expected counts.
pub const CERTIFICATION_SLACK: i64 = 2;

/// Mesh points evaluated per parallel task.
const WINDOW_POINTS: usize = 256;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ZeroError {
    #[error("character {0} is not primitive; scan its inducer instead")]
    NotPrimitive(CharacterLabel),
    #[error("height must be positive and finite, got {0}")]
    InvalidHeight(f64),
    #[error("mesh step {mesh} exceeds the mean-gap limit {limit}")]
    MeshTooCoarse { mesh: f64, limit: f64 },
    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),
    #[error("bracket ({lo}, {hi}) is degenerate")]
    DegenerateBracket { lo: f64, hi: f64 },
    #[error("no sign change on ({lo}, {hi})")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("evaluation failed for {label}: {source}")]
    Evaluation { label: CharacterLabel, source: LFuncError },
    #[error("zero set for {label} is not certified (found {found}, expected {expected:.3}, stable {stable})")]
    Uncertified {
        label: CharacterLabel,
        found: usize,
        expected: f64,
        stable: bool,
    },
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error("invalid zero set: {0}")]
    Invalid(String),
}

/// One refined ordinate γ with 1/2 + iγ a zero of L(s, χ).
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroRecord {
    pub ordinate: f64,
    pub character: CharacterLabel,
    pub bracket: (f64, f64),
    pub tolerance: f64,
    /// |Z(γ)| at the returned ordinate; not available for records loaded from a cache.
    pub refined_residual: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Completeness {
    pub expected_count: f64,
    pub found_count: usize,
    /// No new sign changes appeared at half the mesh step.
    pub stable: bool,
    pub certified: bool,
}

impl Completeness {
    pub fn evaluate(expected_count: f64, found_count: usize, stable: bool) -> Self {
        let gap = (found_count as i64 - expected_count.round() as i64).abs();
        Self {
            expected_count,
            found_count,
            stable,
            certified: stable && gap <= CERTIFICATION_SLACK,
        }
    }
}

/// Ordered zeros of one primitive character with |γ| <= height.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    character: CharacterLabel,
    conductor: u64,
    parity: u8,
    height: f64,
    mesh_step: f64,
    tolerance: f64,
    branch_tag: u32,
    records: Vec<ZeroRecord>,
    completeness: Completeness,
}

/// Scan metadata carried alongside the ordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanParams {
    pub height: f64,
    pub mesh_step: f64,
    pub tolerance: f64,
    pub branch_tag: u32,
}

impl ZeroSet {
    /// Assembles a set from stored parts, re-checking its invariants.
    pub fn from_parts(
        character: CharacterLabel,
        conductor: u64,
        parity: u8,
        params: ScanParams,
        records: Vec<ZeroRecord>,
        completeness: Completeness,
    ) -> Result<Self, ZeroError> {
        let set = Self {
            character,
            conductor,
            parity,
            height: params.height,
            mesh_step: params.mesh_step,
            tolerance: params.tolerance,
            branch_tag: params.branch_tag,
            records,
            completeness,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<(), ZeroError> {
        if !(self.height > 0.0 && self.height.is_finite()) {
            return Err(ZeroError::InvalidHeight(self.height));
        }
        if self.completeness.found_count != self.records.len() {
            return Err(ZeroError::Invalid(format!(
                "found count {} but {} records",
                self.completeness.found_count,
                self.records.len()
            )));
        }
        let expect = Completeness::evaluate(
            self.completeness.expected_count,
            self.completeness.found_count,
            self.completeness.stable,
        );
        if self.completeness.certified && !expect.certified {
            return Err(ZeroError::Invalid("certified flag contradicts the counts".into()));
        }
        for w in self.records.windows(2) {
            if !(w[0].ordinate < w[1].ordinate) {
                return Err(ZeroError::Invalid(format!(
                    "ordinates not strictly increasing at {}",
                    w[1].ordinate
                )));
            }
        }
        for r in &self.records {
            if r.ordinate.abs() > self.height || !r.ordinate.is_finite() {
                return Err(ZeroError::Invalid(format!("ordinate {} outside height", r.ordinate)));
            }
            if !(r.bracket.0 <= r.ordinate && r.ordinate <= r.bracket.1) {
                return Err(ZeroError::Invalid(format!("bracket misses ordinate {}", r.ordinate)));
            }
        }
        Ok(())
    }

    pub fn character(&self) -> CharacterLabel {
        self.character
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn parity(&self) -> u8 {
        self.parity
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn mesh_step(&self) -> f64 {
        self.mesh_step
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn branch_tag(&self) -> u32 {
        self.branch_tag
    }

    pub fn scan_params(&self) -> ScanParams {
        ScanParams {
            height: self.height,
            mesh_step: self.mesh_step,
            tolerance: self.tolerance,
            branch_tag: self.branch_tag,
        }
    }

    pub fn records(&self) -> &[ZeroRecord] {
        &self.records
    }

    pub fn completeness(&self) -> Completeness {
        self.completeness
    }

    pub fn is_certified(&self) -> bool {
        self.completeness.certified
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn ordinates(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.ordinate).collect()
    }

    /// Records with |γ| <= t, still in increasing order.
    pub fn window(&self, t: f64) -> &[ZeroRecord] {
        let lo = self.records.partition_point(|r| r.ordinate < -t);
        let hi = self.records.partition_point(|r| r.ordinate <= t);
        &self.records[lo..hi.max(lo)]
    }

    /// Ordinates with |γ| <= t.
    pub fn ordinates_within(&self, t: f64) -> Vec<f64> {
        self.window(t).iter().map(|r| r.ordinate).collect()
    }
}

/// Default mesh: min(0.05, 0.5·π / log(q(T + 3))).
pub fn default_mesh_step(q: u64, height: f64) -> f64 {
    (0.5 * mesh_limit(q, height)).min(0.05)
}

/// Largest admissible mesh, π / log(q(T + 3)).
pub fn mesh_limit(q: u64, height: f64) -> f64 {
    PI / (q as f64 * (height + 3.0)).ln()
}

/// Main term for the number of zeros with |γ| <= T, clamped at zero.
pub fn count_expected(chi: &DirichletCharacter, height: f64) -> f64 {
    let t = height;
    let two_pi_e = 2.0 * PI * std::f64::consts::E;
    let q = chi.conductor();
    let main = if q == 1 {
        2.0 * (t / (2.0 * PI)) * (t / two_pi_e).ln() + 1.75
    } else {
        (t / PI) * (q as f64 * t / two_pi_e).ln()
    };
    main.max(0.0)
}

fn sign(v: f64) -> bool {
    v >= 0.0
}

fn eval_err(label: CharacterLabel) -> impl Fn(LFuncError) -> ZeroError {
    move |source| ZeroError::Evaluation { label, source }
}

/// Narrows a sign-change bracket of Z_χ to width <= `tol` (Illinois steps,
/// with bisection whenever the secant point stalls near an end).
pub fn refine_bracket(ev: &CriticalLineEvaluator, lo: f64, hi: f64, tol: f64) -> Result<ZeroRecord, ZeroError> {
    let label = ev.params().character().label();
    if !(tol > 0.0) {
        return Err(ZeroError::InvalidTolerance(tol));
    }
    if !(lo < hi) {
        return Err(ZeroError::DegenerateBracket { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    let mut fa = ev.hardy_z(a).map_err(eval_err(label))?;
    let mut fb = ev.hardy_z(b).map_err(eval_err(label))?;
    if sign(fa) == sign(fb) {
        return Err(ZeroError::NoSignChange { lo, hi });
    }
    let mut side = 0i8;
    while b - a > tol {
        let width = b - a;
        let mut c = b - fb * (b - a) / (fb - fa);
        if !(c > a + 0.01 * width && c < b - 0.01 * width) {
            c = 0.5 * (a + b);
        }
        let fc = ev.hardy_z(c).map_err(eval_err(label))?;
        if sign(fc) == sign(fa) {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        if b - a > 0.5 * width && side != 0 {
            // slow secant progress; force a bisection next round
            let m = 0.5 * (a + b);
            let fm = ev.hardy_z(m).map_err(eval_err(label))?;
            if sign(fm) == sign(fa) {
                a = m;
                fa = fm;
            } else {
                b = m;
                fb = fm;
            }
            side = 0;
        }
    }
    let gamma = 0.5 * (a + b);
    let residual = ev.hardy_z(gamma).map_err(eval_err(label))?.abs();
    Ok(ZeroRecord {
        ordinate: gamma,
        character: label,
        bracket: (a, b),
        tolerance: tol,
        refined_residual: Some(residual),
    })
}

/// Refines a bracket for a primitive character and returns the ordinate.
pub fn refine_zero(chi: &DirichletCharacter, bracket: (f64, f64), tol: f64) -> Result<f64, ZeroError> {
    let (lo, hi) = bracket;
    if !(lo < hi) {
        return Err(ZeroError::DegenerateBracket { lo, hi });
    }
    let ev = CriticalLineEvaluator::new(chi, lo.abs().max(hi.abs()) + 1.0, EVAL_TARGET).map_err(eval_err(chi.label()))?;
    Ok(refine_bracket(&ev, lo, hi, tol)?.ordinate)
}

/// All zeros of L(s, χ) on the critical line with |γ| <= T.
///
/// Z_χ is sampled at half the requested mesh; sign changes at the requested
/// mesh and at the finer one are compared, and any disagreement leaves the
/// set uncertified. Records are refined from the finer brackets.
pub fn scan_zeros(chi: &DirichletCharacter, height: f64, mesh_step: f64) -> Result<ZeroSet, ZeroError> {
    scan_zeros_with_tolerance(chi, height, mesh_step, DEFAULT_TOLERANCE)
}

pub fn scan_zeros_with_tolerance(
    chi: &DirichletCharacter,
    height: f64,
    mesh_step: f64,
    tol: f64,
) -> Result<ZeroSet, ZeroError> {
    let label = chi.label();
    if !chi.is_primitive() {
        return Err(ZeroError::NotPrimitive(label));
    }
    if !(height > 0.0 && height.is_finite()) {
        return Err(ZeroError::InvalidHeight(height));
    }
    let limit = mesh_limit(chi.modulus(), height);
    if !(mesh_step > 0.0 && mesh_step <= limit) {
        return Err(ZeroError::MeshTooCoarse { mesh: mesh_step, limit });
    }
    if !(tol > 0.0) {
        return Err(ZeroError::InvalidTolerance(tol));
    }
    let params = CompletedLParams::new(chi).map_err(eval_err(label))?;
    let branch_tag = params.branch_tag();
    let ev = CriticalLineEvaluator::new(chi, height + 1.0, EVAL_TARGET).map_err(eval_err(label))?;

    // fine grid with an even number of intervals so coarse points are the even ones
    let mut intervals = (2.0 * height / (0.5 * mesh_step)).ceil() as usize;
    intervals += intervals % 2;
    let h = 2.0 * height / intervals as f64;
    let grid: Vec<f64> = (0..=intervals).map(|i| -height + i as f64 * h).collect();
    let values: Vec<f64> = grid
        .par_chunks(WINDOW_POINTS)
        .map(|chunk| chunk.iter().map(|&t| ev.hardy_z(t)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(eval_err(label))?
        .concat();

    let fine: Vec<usize> = (0..intervals).filter(|&i| sign(values[i]) != sign(values[i + 1])).collect();
    let coarse = (0..intervals / 2)
        .filter(|&j| sign(values[2 * j]) != sign(values[2 * j + 2]))
        .count();
    let stable = coarse == fine.len();
    if !stable {
        log::warn!(target: "zeros", "{label}: {} sign changes at the fine mesh, {coarse} at the coarse one", fine.len());
    }

    let records = fine
        .par_iter()
        .map(|&i| refine_bracket(&ev, grid[i], grid[i + 1], tol))
        .collect::<Result<Vec<_>, _>>()?;
    let residual_ok = records
        .iter()
        .all(|r| r.refined_residual.map_or(true, |res| res < 1e-6));
    let completeness = Completeness::evaluate(count_expected(chi, height), records.len(), stable && residual_ok);
    log::info!(
        target: "zeros",
        "{label}: T={height} found={} expected={:.3} certified={}",
        records.len(),
        completeness.expected_count,
        completeness.certified
    );
    ZeroSet::from_parts(
        label,
        chi.conductor(),
        chi.parity(),
        ScanParams {
            height,
            mesh_step,
            tolerance: tol,
            branch_tag,
        },
        records,
        completeness,
    )
}

/// Zero sets for every character mod q, keyed by label.
///
/// Each primitive set is scanned once; imprimitive characters point at their
/// inducer's set and principal characters at the ζ set.
pub fn zeros_for_modulus(q: u64, height: f64) -> Result<BTreeMap<CharacterLabel, Arc<ZeroSet>>, ZeroError> {
    let mut library = ZeroLibrary::new(height);
    library.for_modulus(q)
}

/// Memo of certified primitive zero sets at one height.
#[derive(Debug, Clone)]
pub struct ZeroLibrary {
    height: f64,
    sets: BTreeMap<CharacterLabel, Arc<ZeroSet>>,
}

impl ZeroLibrary {
    pub fn new(height: f64) -> Self {
        Self {
            height,
            sets: BTreeMap::new(),
        }
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    /// Adds an already computed (e.g. cached) primitive set.
    pub fn insert(&mut self, set: ZeroSet) -> Result<(), ZeroError> {
        if set.height() < self.height {
            return Err(ZeroError::Invalid(format!(
                "set for {} only reaches height {}",
                set.character(),
                set.height()
            )));
        }
        self.sets.insert(set.character(), Arc::new(set));
        Ok(())
    }

    pub fn contains(&self, label: &CharacterLabel) -> bool {
        self.sets.contains_key(label)
    }

    /// The certified set of the primitive character inducing `chi`.
    pub fn for_character(&mut self, chi: &DirichletCharacter) -> Result<Arc<ZeroSet>, ZeroError> {
        let (_, star) = chi.conductor_and_inducer();
        let key = star.label();
        if let Some(set) = self.sets.get(&key) {
            return Ok(set.clone());
        }
        let set = scan_zeros(&star, self.height, default_mesh_step(star.modulus(), self.height))?;
        self.accept(set)
    }

    fn accept(&mut self, set: ZeroSet) -> Result<Arc<ZeroSet>, ZeroError> {
        if !set.is_certified() {
            let c = set.completeness();
            return Err(ZeroError::Uncertified {
                label: set.character(),
                found: c.found_count,
                expected: c.expected_count,
                stable: c.stable,
            });
        }
        let set = Arc::new(set);
        self.sets.insert(set.character(), set.clone());
        Ok(set)
    }

    /// Sets for every character mod q; missing inducers are scanned in parallel.
    pub fn for_modulus(&mut self, q: u64) -> Result<BTreeMap<CharacterLabel, Arc<ZeroSet>>, ZeroError> {
        let chars = enumerate_characters(q)?;
        let mut missing: Vec<DirichletCharacter> = chars
            .iter()
            .map(|c| c.conductor_and_inducer().1)
            .filter(|s| !self.sets.contains_key(&s.label()))
            .collect();
        missing.sort();
        missing.dedup();
        let height = self.height;
        let scanned = missing
            .par_iter()
            .map(|s| scan_zeros(s, height, default_mesh_step(s.modulus(), height)))
            .collect::<Result<Vec<_>, _>>()?;
        for set in scanned {
            self.accept(set)?;
        }
        let mut out = BTreeMap::new();
        for chi in &chars {
            out.insert(chi.label(), self.for_character(chi)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nonprincipal(q: u64) -> DirichletCharacter {
        enumerate_characters(q).unwrap().remove(1)
    }

    #[test]
    fn zeta_zeros_to_30() {
        let z = DirichletCharacter::trivial();
        let set = scan_zeros(&z, 30.0, default_mesh_step(1, 30.0)).unwrap();
        let pos: Vec<f64> = set.ordinates().into_iter().filter(|&g| g > 0.0).collect();
        let oracle = [14.134_725_141_734_7, 21.022_039_638_771_6, 25.010_857_580_145_7];
        assert_eq!(pos.len(), 3);
        for (g, o) in pos.iter().zip(oracle) {
            assert!((g - o).abs() < 1e-8, "{g} vs {o}");
        }
        assert_eq!(set.len(), 6);
        assert!(set.is_certified());
        for r in set.records() {
            assert!(r.bracket.1 - r.bracket.0 <= r.tolerance);
            assert!(r.refined_residual.unwrap() < 1e-6);
        }
    }

    #[test]
    fn mod4_and_mod3() {
        let set = scan_zeros(&nonprincipal(4), 15.0, default_mesh_step(4, 15.0)).unwrap();
        let oracle = [6.020_948_904_697_6, 10.243_770_304_166_6, 12.988_098_012_312_4];
        let ords = set.ordinates();
        assert_eq!(ords.len(), 6);
        for (i, o) in oracle.iter().enumerate() {
            assert!((ords[3 + i] - o).abs() < 1e-8);
            assert!((ords[2 - i] + o).abs() < 1e-8);
        }
        let small = scan_zeros(&nonprincipal(3), 0.5, default_mesh_step(3, 0.5)).unwrap();
        assert!(small.is_empty() && small.is_certified());
    }

    #[test]
    fn complex_character_is_not_mirrored() {
        let chi = enumerate_characters(5)
            .unwrap()
            .into_iter()
            .find(|c| c.value(2).im > 0.5)
            .unwrap();
        let set = scan_zeros(&chi, 12.0, default_mesh_step(5, 12.0)).unwrap();
        let expected = [
            -11.282_896_441_581_6,
            -9.442_931_128_728_51,
            -4.132_903_705_212_85,
            6.183_578_195_450_85,
            8.457_229_174_423_23,
        ];
        let ords = set.ordinates();
        assert_eq!(ords.len(), expected.len());
        for (g, o) in ords.iter().zip(expected) {
            assert!((g - o).abs() < 1e-8);
        }
        let conj = scan_zeros(&chi.conj(), 12.0, default_mesh_step(5, 12.0)).unwrap();
        for (a, b) in conj.ordinates().iter().zip(ords.iter().rev()) {
            assert!((a + b).abs() < 1e-9);
        }
    }

    #[test]
    fn refine_examples() {
        let z = DirichletCharacter::trivial();
        assert!((refine_zero(&z, (14.0, 14.2), 1e-9).unwrap() - 14.134_725).abs() < 1e-6);
        assert!((refine_zero(&nonprincipal(4), (6.0, 6.1), 1e-9).unwrap() - 6.0209).abs() < 1e-4);
        assert!(matches!(refine_zero(&z, (5.0, 5.0), 1e-9), Err(ZeroError::DegenerateBracket { .. })));
        assert!(matches!(refine_zero(&z, (1.0, 2.0), 1e-9), Err(ZeroError::NoSignChange { .. })));
    }

    #[test]
    fn counting_formula() {
        let z = DirichletCharacter::trivial();
        // the +7/4 constant puts the q = 1 main term at 7.13 for 6 zeros
        assert!((count_expected(&z, 30.0) - 7.13).abs() < 0.01);
        assert_eq!(count_expected(&z, 2.0).round(), 0.0);
        assert_eq!(count_expected(&nonprincipal(3), 0.5), 0.0);
        let c = count_expected(&nonprincipal(4), 15.0);
        assert!((c - 6.1).abs() < 0.2, "{c}");
    }

    #[test]
    fn scan_rejections() {
        let chi0 = enumerate_characters(4).unwrap().remove(0);
        assert!(matches!(scan_zeros(&chi0, 10.0, 0.05), Err(ZeroError::NotPrimitive(_))));
        let z = DirichletCharacter::trivial();
        assert!(matches!(scan_zeros(&z, 10.0, 5.0), Err(ZeroError::MeshTooCoarse { .. })));
        assert!(matches!(scan_zeros(&z, -1.0, 0.05), Err(ZeroError::InvalidHeight(_))));
    }

    #[test]
    fn modulus_maps_share_inducer_sets() {
        let m = zeros_for_modulus(4, 15.0).unwrap();
        assert_eq!(m.len(), 2);
        let principal = &m[&CharacterLabel::new(4, 1).unwrap()];
        assert_eq!(principal.character(), CharacterLabel::new(1, 1).unwrap());
        assert_eq!(principal.len(), 2);
        let m12 = zeros_for_modulus(12, 15.0).unwrap();
        assert_eq!(m12.len(), 4);
        let shared = m12
            .values()
            .filter(|s| s.character() == CharacterLabel::new(4, 3).unwrap())
            .count();
        assert_eq!(shared, 1);
        assert!(zeros_for_modulus(1, 10.0).unwrap().values().all(|s| s.is_empty()));
    }

    #[test]
    fn window_selection() {
        let set = scan_zeros(&nonprincipal(4), 15.0, default_mesh_step(4, 15.0)).unwrap();
        assert_eq!(set.window(11.0).len(), 4);
        assert_eq!(set.window(1.0).len(), 0);
        assert_eq!(set.window(15.0).len(), 6);
    }
}
