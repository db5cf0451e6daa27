use std::sync::Arc;

use dirichlet_pc::characters::{enumerate_characters, CharacterLabel, DirichletCharacter};
use dirichlet_pc::lfunc::CriticalLineEvaluator;
use dirichlet_pc::zeros::{count_expected, default_mesh_step, scan_zeros, ZeroLibrary};

fn chi(q: u64, i: u64) -> DirichletCharacter {
    DirichletCharacter::from_label(CharacterLabel::new(q, i).unwrap()).unwrap()
}

/// Published ordinates of the first ζ zeros.
const ZETA_ZEROS: [f64; 6] = [
    14.134725141734693,
    21.022039638771555,
    25.010857580145688,
    30.424876125859513,
    32.935061587739189,
    37.586178158825671,
];

#[test]
fn zeta_zeros_to_forty() {
    let set = scan_zeros(&DirichletCharacter::trivial(), 40.0, default_mesh_step(1, 40.0)).unwrap();
    assert!(set.is_certified());
    let positive: Vec<f64> = set.ordinates().into_iter().filter(|&g| g > 0.0).collect();
    assert_eq!(positive.len(), ZETA_ZEROS.len());
    for (g, want) in positive.iter().zip(ZETA_ZEROS) {
        assert!((g - want).abs() < 1e-8, "{g} vs {want}");
    }
    assert_eq!(set.len(), 2 * ZETA_ZEROS.len());
}

#[test]
fn brackets_straddle_sign_changes() {
    let c = chi(5, 2);
    let set = scan_zeros(&c, 30.0, default_mesh_step(5, 30.0)).unwrap();
    let ev = CriticalLineEvaluator::new(&c, 30.0, 1e-12).unwrap();
    for r in set.records() {
        let (lo, hi) = r.bracket;
        assert!(lo <= r.ordinate && r.ordinate <= hi && hi - lo <= r.tolerance);
        // Z is at rounding level inside the final bracket, so test a slightly wider one
        assert!(ev.hardy_z(lo - 1e-6).unwrap() * ev.hardy_z(hi + 1e-6).unwrap() < 0.0);
        assert!(r.refined_residual.unwrap() < 1e-8);
    }
}

#[test]
fn halving_the_mesh_changes_nothing() {
    for (q, i) in [(1, 1), (4, 3), (7, 3), (8, 3)] {
        let c = chi(q, i);
        let step = default_mesh_step(q, 50.0);
        let a = scan_zeros(&c, 50.0, step).unwrap();
        let b = scan_zeros(&c, 50.0, step / 2.0).unwrap();
        assert_eq!(a.len(), b.len(), "{q}:{i}");
        for (x, y) in a.ordinates().iter().zip(b.ordinates()) {
            assert!((x - y).abs() < 1e-8);
        }
        let gap = (a.len() as f64 - count_expected(&c, 50.0)).abs();
        assert!(gap <= 2.5, "{q}:{i}: {gap}");
    }
}

#[test]
fn conjugate_sets_mirror() {
    let mut lib = ZeroLibrary::new(40.0);
    for q in [5u64, 7, 13] {
        for c in enumerate_characters(q).unwrap().iter().filter(|c| c.is_primitive() && !c.is_real()) {
            let a = lib.for_character(c).unwrap().ordinates();
            let b = lib.for_character(&c.conj()).unwrap().ordinates();
            assert_eq!(a.len(), b.len());
            for (g, h) in a.iter().zip(b.iter().rev()) {
                assert!((g + h).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn imprimitive_characters_alias_their_inducer() {
    let mut lib = ZeroLibrary::new(20.0);
    let sets = lib.for_modulus(12).unwrap();
    assert_eq!(sets.len(), 4);
    for c in enumerate_characters(12).unwrap() {
        let set = &sets[&c.label()];
        let star = c.conductor_and_inducer().1;
        assert_eq!(set.character(), star.label());
        assert!(Arc::ptr_eq(set, &lib.for_character(&star).unwrap()));
    }
    let principal = &sets[&CharacterLabel::principal(12).unwrap()];
    assert_eq!(principal.character(), CharacterLabel::principal(1).unwrap());
}
