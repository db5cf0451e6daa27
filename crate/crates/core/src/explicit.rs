//! Truncated explicit formulae: ψ-type sums rebuilt from zeros with |γ| <= Z
//! and compared with the sieve.

use num_complex::Complex64;
use std::sync::Arc;

use crate::arith::{euler_phi, gcd, CompensatedSum};
use crate::characters::{enumerate_characters, CharacterError, CharacterLabel, DirichletCharacter};
use crate::paircorr::ZeroSets;
use crate::sieve::{LambdaTable, SieveError};
use crate::zeros::ZeroSet;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExplicitError {
    #[error("truncation Z = {z} must satisfy 2 <= Z <= x = {x}")]
    InvalidTruncation { z: f64, x: f64 },
    #[error("character {0} is principal; the formula needs a nonprincipal character")]
    Principal(CharacterLabel),
    #[error("zero set for {0} is not certified")]
    Uncertified(CharacterLabel),
    #[error("zero set for {label} reaches {height}, need {needed}")]
    HeightTooLow {
        label: CharacterLabel,
        height: f64,
        needed: f64,
    },
    #[error("no zero set supplied for {0}")]
    MissingZeroSet(CharacterLabel),
    #[error("zero set for {set} does not belong to {chi}")]
    WrongZeroSet { chi: CharacterLabel, set: CharacterLabel },
    #[error("residue {a} is not a unit mod {q}")]
    NonUnitResidue { q: u64, a: u64 },
    #[error(transparent)]
    Sieve(#[from] SieveError),
    #[error(transparent)]
    Character(#[from] CharacterError),
}

/// One truncated reconstruction against the exact value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplicitFormulaRun {
    pub x: f64,
    pub z: f64,
    pub q: u64,
    pub a: u64,
    pub reconstructed: Complex64,
    pub exact: Complex64,
    pub abs_error: f64,
    /// x·log²(qx)/Z.
    pub budget: f64,
    /// abs_error / budget.
    pub measured_constant: f64,
    pub zero_count: usize,
}

impl ExplicitFormulaRun {
    fn new(x: f64, z: f64, q: u64, a: u64, reconstructed: Complex64, exact: Complex64, zero_count: usize) -> Self {
        let abs_error = (reconstructed - exact).norm();
        let budget = x * (q as f64 * x).ln().powi(2) / z;
        Self {
            x,
            z,
            q,
            a,
            reconstructed,
            exact,
            abs_error,
            budget,
            measured_constant: abs_error / budget,
            zero_count,
        }
    }
}

fn check_truncation(x: f64, z: f64) -> Result<(), ExplicitError> {
    if !(z >= 2.0 && z <= x) {
        return Err(ExplicitError::InvalidTruncation { z, x });
    }
    Ok(())
}

fn check_set(label: CharacterLabel, set: &ZeroSet, z: f64) -> Result<(), ExplicitError> {
    if !set.is_certified() {
        return Err(ExplicitError::Uncertified(label));
    }
    if set.height() < z {
        return Err(ExplicitError::HeightTooLow {
            label,
            height: set.height(),
            needed: z,
        });
    }
    Ok(())
}

/// Σ_{|γ| <= Z} x^{1/2+iγ} / (1/2 + iγ), added in conjugate-symmetric order
/// (outermost ordinates first from both ends).
pub fn zero_sum(x: f64, z: f64, set: &ZeroSet) -> (Complex64, usize) {
    let ords = set.ordinates_within(z);
    let lx = x.ln();
    let sx = x.sqrt();
    let term = |g: f64| Complex64::from_polar(sx, g * lx) / Complex64::new(0.5, g);
    let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
    let (mut i, mut j) = (0usize, ords.len());
    while i < j {
        let take_low = ords[i].abs() >= ords[j - 1].abs();
        let g = if take_low {
            i += 1;
            ords[i - 1]
        } else {
            j -= 1;
            ords[j]
        };
        let t = term(g);
        re.add(t.re);
        im.add(t.im);
    }
    (Complex64::new(re.value(), im.value()), ords.len())
}

/// ψ(x) ≈ x − Σ_{|γ| <= Z} x^ρ/ρ over ζ zeros.
pub fn psi_from_zeros(x: f64, z: f64, zeta: &ZeroSet, table: &LambdaTable) -> Result<ExplicitFormulaRun, ExplicitError> {
    check_truncation(x, z)?;
    let label = CharacterLabel::principal(1)?;
    if zeta.character() != label {
        return Err(ExplicitError::WrongZeroSet {
            chi: label,
            set: zeta.character(),
        });
    }
    check_set(label, zeta, z)?;
    let (s, n) = zero_sum(x, z, zeta);
    let exact = table.psi(x)?;
    Ok(ExplicitFormulaRun::new(x, z, 1, 1, x - s, Complex64::new(exact, 0.0), n))
}

/// ψ(x, χ) ≈ −Σ_{|γ| <= Z} x^ρ/ρ for nonprincipal χ.
pub fn psi_chi_from_zeros(
    x: f64,
    z: f64,
    chi: &DirichletCharacter,
    zeros: &ZeroSet,
    table: &LambdaTable,
) -> Result<ExplicitFormulaRun, ExplicitError> {
    check_truncation(x, z)?;
    if chi.is_principal() {
        return Err(ExplicitError::Principal(chi.label()));
    }
    let inducer = chi.conductor_and_inducer().1.label();
    if zeros.character() != inducer {
        return Err(ExplicitError::WrongZeroSet {
            chi: chi.label(),
            set: zeros.character(),
        });
    }
    check_set(chi.label(), zeros, z)?;
    let (s, n) = zero_sum(x, z, zeros);
    let exact = table.psi_character(x, chi)?;
    Ok(ExplicitFormulaRun::new(x, z, chi.modulus(), 1, -s, exact, n))
}

/// The two equivalent reconstructions of ψ(x; q, a).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProgressionRun {
    pub run: ExplicitFormulaRun,
    /// (1/φ(q)) Σ_χ χ̄(a)·(per-character reconstruction, main term on χ₀).
    pub via_characters: Complex64,
}

/// ψ(x; q, a) ≈ (1/φ(q))(x − Σ_χ χ̄(a) Σ_{|γ| <= Z} x^ρ/ρ).
pub fn psi_progression_from_zeros(
    x: f64,
    z: f64,
    q: u64,
    a: u64,
    zero_sets: &ZeroSets,
    table: &LambdaTable,
) -> Result<ProgressionRun, ExplicitError> {
    check_truncation(x, z)?;
    if q == 0 || (q > 1 && gcd(a % q, q) != 1) {
        return Err(ExplicitError::NonUnitResidue { q, a });
    }
    let phi = euler_phi(q) as f64;
    let chars = enumerate_characters(q)?;
    let mut sums: Vec<(DirichletCharacter, Complex64, usize)> = Vec::with_capacity(chars.len());
    let mut cache: std::collections::BTreeMap<CharacterLabel, (Complex64, usize)> = Default::default();
    for chi in chars {
        let set: &Arc<ZeroSet> = zero_sets
            .get(&chi.label())
            .ok_or(ExplicitError::MissingZeroSet(chi.label()))?;
        check_set(chi.label(), set, z)?;
        let (s, n) = *cache.entry(set.character()).or_insert_with(|| zero_sum(x, z, set));
        sums.push((chi, s, n));
    }
    let mut direct = Complex64::new(0.0, 0.0);
    let mut via = Complex64::new(0.0, 0.0);
    let mut zero_count = 0;
    for (chi, s, n) in &sums {
        let w = chi.value(a as i64).conj();
        direct += w * s;
        let per_char = if chi.is_principal() { x - s } else { -s };
        via += w * per_char;
        zero_count += n;
    }
    let reconstructed = (Complex64::new(x, 0.0) - direct) / phi;
    let exact = table.psi_progression(x, q, a)?;
    Ok(ProgressionRun {
        run: ExplicitFormulaRun::new(x, z, q, a, reconstructed, Complex64::new(exact, 0.0), zero_count),
        via_characters: via / phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeros::ZeroLibrary;

    #[test]
    fn empty_window_is_main_term() {
        let mut lib = ZeroLibrary::new(20.0);
        let sets = lib.for_modulus(4).unwrap();
        let table = LambdaTable::up_to(1000).unwrap();
        let zeta = &sets[&CharacterLabel::new(4, 1).unwrap()];
        let run = psi_from_zeros(1000.5, 14.0, zeta, &table).unwrap();
        assert_eq!(run.reconstructed, Complex64::new(1000.5, 0.0));
        assert_eq!(run.zero_count, 0);
        assert!((run.abs_error - (1000.5 - table.psi(1000.5).unwrap()).abs()).abs() < 1e-9);

        let chi = enumerate_characters(4).unwrap().remove(1);
        let r = psi_chi_from_zeros(500.5, 5.0, &chi, &sets[&chi.label()], &table).unwrap();
        assert_eq!(r.reconstructed, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn conjugate_pairing_and_paths() {
        let mut lib = ZeroLibrary::new(60.0);
        let sets = lib.for_modulus(4).unwrap();
        let table = LambdaTable::up_to(2000).unwrap();
        let zeta = &sets[&CharacterLabel::new(4, 1).unwrap()];
        let run = psi_from_zeros(1000.5, 60.0, zeta, &table).unwrap();
        assert!(run.reconstructed.im.abs() < 1e-10 * 1000.5);
        let p = psi_progression_from_zeros(1000.5, 60.0, 4, 1, &sets, &table).unwrap();
        assert!((p.run.reconstructed - p.via_characters).norm() < 1e-10);
        let ones = psi_progression_from_zeros(1000.5, 60.0, 1, 1, &lib.for_modulus(1).unwrap(), &table).unwrap();
        assert!((ones.run.reconstructed - run.reconstructed).norm() < 1e-10);
    }

    #[test]
    fn rejections() {
        let mut lib = ZeroLibrary::new(20.0);
        let sets = lib.for_modulus(4).unwrap();
        let table = LambdaTable::up_to(100).unwrap();
        let chi0 = enumerate_characters(4).unwrap().remove(0);
        assert!(matches!(
            psi_chi_from_zeros(50.5, 10.0, &chi0, &sets[&chi0.label()], &table),
            Err(ExplicitError::Principal(_))
        ));
        let zeta = &sets[&chi0.label()];
        assert!(matches!(
            psi_from_zeros(10.5, 12.0, zeta, &table),
            Err(ExplicitError::InvalidTruncation { .. })
        ));
        assert!(matches!(
            psi_from_zeros(50.5, 30.0, zeta, &table),
            Err(ExplicitError::HeightTooLow { .. })
        ));
    }
}
