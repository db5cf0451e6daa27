use std::sync::OnceLock;

use dirichlet_pc::arith::euler_phi;
use dirichlet_pc::characters::enumerate_characters;
use dirichlet_pc::checks::units;
use dirichlet_pc::paircorr::{
    f_q, g_pair, mean_value_check, sigma_sum, spacing_histogram, PairCorrInput, Window, ZeroSets,
};
use dirichlet_pc::quad::{adaptive_gk, gk15};
use dirichlet_pc::zeros::ZeroLibrary;
use num_complex::Complex64;
use proptest::prelude::*;

const HEIGHT: f64 = 30.0;

fn sets(q: u64) -> ZeroSets {
    static LIB: OnceLock<std::sync::Mutex<ZeroLibrary>> = OnceLock::new();
    let lib = LIB.get_or_init(|| std::sync::Mutex::new(ZeroLibrary::new(HEIGHT)));
    lib.lock().unwrap().for_modulus(q).unwrap()
}

#[test]
fn swapping_characters_conjugates_g() {
    let s = sets(5);
    let chars = enumerate_characters(5).unwrap();
    for c1 in &chars {
        for c2 in &chars {
            for window in [Window::Symmetric, Window::Positive] {
                let g12 = g_pair(&c1.label(), &c2.label(), 3.0, HEIGHT, &s, window).unwrap();
                let g21 = g_pair(&c2.label(), &c1.label(), 3.0, HEIGHT, &s, window).unwrap();
                assert!((g12 - g21.conj()).norm() < 1e-12 * g12.norm().max(1.0));
            }
        }
    }
}

#[test]
fn residues_sum_to_diagonal() {
    // Σ_a χ̄1(a)χ2(a) = φ(q)[χ1 = χ2], so Σ_a F_q(a) = φ(q) Σ_χ G_{χ,χ}
    for q in [3u64, 4, 5, 8] {
        let s = sets(q);
        let x = 5.0;
        let total: Complex64 = units(q)
            .into_iter()
            .map(|a| f_q(&PairCorrInput::new(q, a, x, HEIGHT, s.clone()).unwrap()).value)
            .sum();
        let diagonal: Complex64 = enumerate_characters(q)
            .unwrap()
            .iter()
            .map(|c| g_pair(&c.label(), &c.label(), x, HEIGHT, &s, Window::Symmetric).unwrap())
            .sum::<Complex64>()
            * euler_phi(q) as f64;
        assert!((total - diagonal).norm() < 1e-10 * diagonal.norm(), "q = {q}");
    }
}

#[test]
fn rejects_bad_inputs() {
    assert!(PairCorrInput::new(4, 2, 3.0, HEIGHT, sets(4)).is_err());
    assert!(PairCorrInput::new(4, 1, 3.0, 2.0 * HEIGHT, sets(4)).is_err());
    assert!(PairCorrInput::new(5, 1, 3.0, HEIGHT, sets(4)).is_err());
    assert!(spacing_histogram(&[1.0, 2.0], 30.0, 1.0, 0.5, 10).is_err());
    assert!(mean_value_check(&[(0.0, 1.0)], 10.0, 0.01).is_err());
}

#[test]
fn histogram_counts_every_pair_in_window() {
    let zeta: Vec<f64> = sets(1).values().next().unwrap().ordinates_within(HEIGHT);
    let h = spacing_histogram(&zeta, HEIGHT, -1.0, 1.0, 8).unwrap();
    let scale = HEIGHT.ln() / (2.0 * std::f64::consts::PI);
    let naive = zeta
        .iter()
        .flat_map(|a| zeta.iter().map(move |b| (a - b) * scale))
        .filter(|u| (-1.0..=1.0).contains(u))
        .count() as u64;
    assert_eq!(h.total_pairs(), naive);
    assert_eq!(h.diagonal_count, zeta.len() as u64);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn sigma_shift_is_a_change_of_x(x in 1.1f64..50.0, v in -3.0f64..3.0, k in 0usize..4) {
        let q = [1u64, 3, 4, 5][k];
        let s = sets(q);
        for a in units(q) {
            let shifted = sigma_sum(x, HEIGHT, v, q, a, &s).unwrap();
            let moved = sigma_sum(x * v.exp(), HEIGHT, 0.0, q, a, &s).unwrap();
            prop_assert!((shifted - moved).norm() < 1e-9 * (1.0 + shifted.norm()));
        }
    }

    #[test]
    fn f_q_is_real_and_nonnegative(x in 1.1f64..100.0, t in 5.0f64..HEIGHT, k in 0usize..4) {
        let q = [1u64, 3, 4, 5][k];
        for a in units(q) {
            let v = f_q(&PairCorrInput::new(q, a, x, t, sets(q)).unwrap()).value;
            prop_assert!(v.im.abs() <= 1e-9 * (1.0 + v.re.abs()));
            prop_assert!(v.re >= -1e-9);
        }
    }

    #[test]
    fn single_frequency_mean_value_is_exact(mu in -50.0f64..50.0, c in -10.0f64..10.0, t in 1.0f64..100.0) {
        let m = mean_value_check(&[(mu, c)], t, 0.5).unwrap();
        prop_assert!((m.exact_integral - m.main_term).abs() <= 1e-12 * m.main_term.max(1e-300));
        prop_assert_eq!(m.off_diagonal_bound, 0.0);
    }

    #[test]
    fn kronrod_rule_integrates_low_degree_exactly(k in 0i32..=20, a in -2.0f64..0.0, b in 0.0f64..2.0) {
        let f = |x: f64| x.powi(k);
        let exact = (b.powi(k + 1) - a.powi(k + 1)) / (k + 1) as f64;
        let (v, _) = gk15(&f, a, b);
        prop_assert!((v - exact).abs() < 1e-12 * (1.0 + exact.abs()));
        let r = adaptive_gk(&|x: f64| (7.0 * x).cos(), a, b, 3, 1e-12, 1 << 12).unwrap();
        prop_assert!((r.value - ((7.0 * b).sin() - (7.0 * a).sin()) / 7.0).abs() < 1e-11);
    }
}
