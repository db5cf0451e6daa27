//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --release --test acceptance`. The process exits
//! nonzero when a criterion fails that is not in `KNOWN_FAILURES`.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dirichlet_pc::arith::{euler_phi, gcd};
use dirichlet_pc::characters::{enumerate_characters, CharacterLabel, DirichletCharacter};
use dirichlet_pc::checks::{self, units, GAUSS_SUM_TOL, INCREMENT_REL_TOL, INTEGRAL_REL_TOL, REALNESS_TOL};
use dirichlet_pc::conjectures::eh_sum;
use dirichlet_pc::explicit::psi_progression_from_zeros;
use dirichlet_pc::paircorr::{
    f_q, f_q_via_integral, g_pair, increment_identity_check, mean_value_check, sigma_sum, weight_w, PairCorrInput,
    QuadSpec, Window, ZeroSets,
};
use dirichlet_pc::report::{library_source, write_report, ReportConfig};
use dirichlet_pc::sieve::{brun_titchmarsh_check, LambdaTable};
use dirichlet_pc::zeros::ZeroLibrary;

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;

/// Criteria whose failure is analysed and expected (see README).
const KNOWN_FAILURES: &[u32] = &[4];

const HEIGHT: f64 = 100.0;
const BRUTE_REL_TOL: f64 = 1e-10;
const RECONSTRUCTION_TOL: f64 = 1e-8;
const MEAN_VALUE_MAX_C: f64 = 4.0;

const GRID_QS: [u64; 6] = [1, 3, 4, 5, 8, 12];
const GRID_XS: [f64; 4] = [2.0, 3.0, 5.0, 10.0];
const GRID_TS: [f64; 3] = [15.0, 30.0, 60.0];
const INCREMENT_PAIRS: [(f64, f64); 3] = [(5.0, 15.0), (15.0, 30.0), (30.0, 60.0)];

fn rel(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d == 0.0 {
        0.0
    } else {
        d / a.abs().max(b.abs())
    }
}

fn crel(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    if d == 0.0 {
        0.0
    } else {
        d / a.norm().max(b.norm())
    }
}

fn within(limit: Duration, start: Instant) -> (bool, String) {
    let e = start.elapsed();
    (e < limit, format!("{:.1}s < {}s", e.as_secs_f64(), limit.as_secs()))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut failed = 0;
    let mut lines = 0;
    for q in 1..=50 {
        for l in checks::orthogonality(q)? {
            lines += 1;
            failed += usize::from(!l.passed);
        }
    }
    let (fast, t) = within(Duration::from_secs(10), start);
    Ok((
        failed == 0 && fast,
        format!("{lines} checks over q <= 50, {failed} failed, gauss tol {GAUSS_SUM_TOL:.0e}, {t}"),
    ))
}

fn first_positive(lib: &mut ZeroLibrary, q: u64, index: u64) -> Result<f64, Box<dyn std::error::Error>> {
    let chi = DirichletCharacter::from_label(CharacterLabel::new(q, index)?)?;
    let set = lib.for_character(&chi)?;
    Ok(set.ordinates().into_iter().find(|&g| g > 0.0).unwrap_or(f64::NAN))
}

fn criterion_2(lib: &mut ZeroLibrary) -> Outcome {
    let start = Instant::now();
    let (mut count, mut worst_gap, mut worst_sym, mut uncertified) = (0, 0i64, 0.0f64, 0);
    for q in 1..=24 {
        for chi in enumerate_characters(q)?.into_iter().filter(|c| c.is_primitive()) {
            let set = lib.for_character(&chi)?;
            let c = set.completeness();
            worst_gap = worst_gap.max((c.found_count as i64 - c.expected_count.round() as i64).abs());
            uncertified += usize::from(!set.is_certified());
            let mirror = lib.for_character(&chi.conj())?;
            let (a, b) = (set.ordinates(), mirror.ordinates());
            if a.len() != b.len() {
                worst_sym = f64::INFINITY;
            } else {
                for (g, h) in a.iter().zip(b.iter().rev()) {
                    worst_sym = worst_sym.max((g + h).abs());
                }
            }
            count += 1;
        }
    }
    let firsts = [
        (1, 1, 14.134725),
        (4, 3, 6.020949),
        (3, 2, 8.039737),
    ];
    let mut worst_first = 0.0f64;
    for (q, i, want) in firsts {
        worst_first = worst_first.max((first_positive(lib, q, i)? - want).abs());
    }
    let (fast, t) = within(Duration::from_secs(300), start);
    let ok = worst_gap <= 2 && uncertified == 0 && worst_sym < 1e-9 && worst_first < 1e-4 && fast;
    Ok((
        ok,
        format!(
            "{count} primitive characters, max count gap {worst_gap} (<= 2), uncertified {uncertified}, \
             symmetry {worst_sym:.1e} (< 1e-9), first ordinates {worst_first:.1e} (< 1e-4), {t}"
        ),
    ))
}

fn grid_sets(lib: &mut ZeroLibrary) -> Result<BTreeMap<u64, ZeroSets>, Box<dyn std::error::Error>> {
    let mut out = BTreeMap::new();
    for q in GRID_QS {
        out.insert(q, lib.for_modulus(q)?);
    }
    Ok(out)
}

fn criterion_3(sets: &BTreeMap<u64, ZeroSets>) -> Outcome {
    let start = Instant::now();
    let spec = QuadSpec::default();
    let (mut worst, mut n) = (0.0f64, 0);
    for (&q, s) in sets {
        for a in units(q) {
            for t in GRID_TS {
                for x in GRID_XS {
                    let input = PairCorrInput::new(q, a, x, t, s.clone())?;
                    let direct = f_q(&input).value.re;
                    worst = worst.max(rel(f_q_via_integral(&input, &spec)?.value, direct));
                    n += 1;
                }
            }
        }
    }
    let (fast, t) = within(Duration::from_secs(600), start);
    Ok((
        worst < INTEGRAL_REL_TOL && fast,
        format!("{n} cases, worst relative residual {worst:.2e} (< {INTEGRAL_REL_TOL:.0e}), {t}"),
    ))
}

fn criterion_4(sets: &BTreeMap<u64, ZeroSets>) -> Outcome {
    let spec = QuadSpec::default();
    let (mut worst, mut worst_corrected, mut failing, mut n) = (0.0f64, 0.0f64, 0, 0);
    let mut worst_case = String::new();
    for (&q, s) in sets {
        for a in units(q) {
            for (u, t) in INCREMENT_PAIRS {
                for x in GRID_XS {
                    let input = PairCorrInput::new(q, a, x, t, s.clone())?;
                    let c = increment_identity_check(&input, u, &spec)?;
                    if c.residual > worst {
                        worst = c.residual;
                        worst_case = format!("q={q} a={a} x={x} U={u} T={t}");
                    }
                    worst_corrected = worst_corrected.max(c.corrected_residual);
                    failing += usize::from(c.residual >= INCREMENT_REL_TOL);
                    n += 1;
                }
            }
        }
    }
    Ok((
        worst < INCREMENT_REL_TOL,
        format!(
            "{failing}/{n} cases over tolerance, worst residual {worst:.3e} at {worst_case} (< {INCREMENT_REL_TOL:.0e}); \
             with the cross term restored: {worst_corrected:.2e}"
        ),
    ))
}

fn criterion_5(sets: &BTreeMap<u64, ZeroSets>) -> Outcome {
    let mut worst = 0.0f64;
    let mut n = 0;
    for (&q, s) in sets {
        for a in units(q) {
            for t in GRID_TS {
                for x in GRID_XS {
                    let v = f_q(&PairCorrInput::new(q, a, x, t, s.clone())?).value;
                    worst = worst.max(v.im.abs() / (1.0 + v.re.abs()));
                    n += 1;
                }
            }
        }
    }
    Ok((
        worst <= REALNESS_TOL,
        format!("{n} cases, worst |Im|/(1+|Re|) {worst:.2e} (<= {REALNESS_TOL:.0e})"),
    ))
}

mod naive {
    use super::*;

    /// Λ(n) by trial division.
    pub fn lambda(n: u64) -> f64 {
        if n < 2 {
            return 0.0;
        }
        let mut p = 2;
        while p * p <= n && n % p != 0 {
            p += 1;
        }
        if n % p != 0 {
            return (n as f64).ln();
        }
        let mut m = n;
        while m % p == 0 {
            m /= p;
        }
        if m == 1 {
            (p as f64).ln()
        } else {
            0.0
        }
    }

    pub fn lambdas(x: f64) -> Vec<(u64, f64)> {
        (2..=x.floor() as u64)
            .map(|n| (n, lambda(n)))
            .filter(|&(_, l)| l > 0.0)
            .collect()
    }

    pub fn psi_progression(ls: &[(u64, f64)], x: f64, q: u64, a: u64) -> f64 {
        ls.iter().filter(|&&(n, _)| n as f64 <= x && n % q == a % q).map(|&(_, l)| l).sum()
    }

    pub fn psi_character(ls: &[(u64, f64)], x: f64, chi: &DirichletCharacter) -> Complex64 {
        ls.iter()
            .filter(|&&(n, _)| n as f64 <= x)
            .map(|&(n, l)| chi.value(n as i64) * l)
            .sum()
    }

    fn term(g1: f64, g2: f64, lx: f64) -> Complex64 {
        Complex64::from_polar(weight_w(g1 - g2), lx * (g1 - g2))
    }

    pub fn g(a: &[f64], b: &[f64], x: f64) -> Complex64 {
        let lx = x.ln();
        let mut s = Complex64::new(0.0, 0.0);
        for &g1 in a {
            for &g2 in b {
                s += term(g1, g2, lx);
            }
        }
        s
    }

    fn ordinates(sets: &ZeroSets, chi: &DirichletCharacter, t: f64) -> Vec<f64> {
        sets[&chi.label()].ordinates().into_iter().filter(|g| g.abs() <= t).collect()
    }

    /// Σ_{χ1,χ2} χ̄1(a)χ2(a) Σ_{γ1,γ2} x^{i(γ1−γ2)}W(γ1−γ2), one term at a time.
    pub fn f_q(sets: &ZeroSets, q: u64, a: u64, x: f64, t: f64) -> Complex64 {
        let chars = enumerate_characters(q).unwrap();
        let lx = x.ln();
        let mut s = Complex64::new(0.0, 0.0);
        for c1 in &chars {
            for c2 in &chars {
                let w = c1.value(a as i64).conj() * c2.value(a as i64);
                for g1 in ordinates(sets, c1, t) {
                    for g2 in ordinates(sets, c2, t) {
                        s += w * term(g1, g2, lx);
                    }
                }
            }
        }
        s
    }

    pub fn sigma(sets: &ZeroSets, q: u64, a: u64, x: f64, t: f64, v: f64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for chi in enumerate_characters(q).unwrap() {
            for g in ordinates(sets, &chi, t) {
                s += chi.value(a as i64).conj() * Complex64::from_polar(1.0, g * (x.ln() + v));
            }
        }
        s
    }

    /// Σ_{q <= Q} max_a |ψ(x; q, a) − x/φ(q)|.
    pub fn eh(ls: &[(u64, f64)], x: f64, big_q: u64) -> f64 {
        (1..=big_q)
            .map(|q| {
                (0..q)
                    .filter(|&a| gcd(a, q) == 1)
                    .map(|a| (psi_progression(ls, x, q, a) - x / euler_phi(q) as f64).abs())
                    .fold(0.0, f64::max)
            })
            .sum()
    }
}

fn criterion_6(lib: &mut ZeroLibrary) -> Outcome {
    let mut worst: BTreeMap<&str, f64> = BTreeMap::new();
    let mut bump = |k: &'static str, v: f64| {
        let e = worst.entry(k).or_insert(0.0);
        *e = e.max(v);
    };
    let mut max_zeros = 0;
    for q in [1u64, 3, 4, 5] {
        let sets = lib.for_modulus(q)?;
        let chars = enumerate_characters(q)?;
        for t in [15.0, 30.0] {
            let zeros: usize = chars.iter().map(|c| sets[&c.label()].ordinates_within(t).len()).sum();
            max_zeros = max_zeros.max(zeros);
            for x in [2.0, 10.0] {
                for a in units(q) {
                    let fast = f_q(&PairCorrInput::new(q, a, x, t, sets.clone())?).value;
                    bump("f_q", crel(fast, naive::f_q(&sets, q, a, x, t)));
                    for v in [-1.0, 0.0, 0.7] {
                        bump("sigma_sum", crel(sigma_sum(x, t, v, q, a, &sets)?, naive::sigma(&sets, q, a, x, t, v)));
                    }
                }
                for c1 in &chars {
                    for c2 in &chars {
                        let (l1, l2) = (c1.label(), c2.label());
                        let fast = g_pair(&l1, &l2, x, t, &sets, Window::Symmetric)?;
                        let a = sets[&l1].ordinates_within(t);
                        let b = sets[&l2].ordinates_within(t);
                        bump("g_pair", crel(fast, naive::g(&a, &b, x)));
                    }
                }
            }
        }
    }
    let x_max = 10_000.0;
    let ls = naive::lambdas(x_max);
    let table = LambdaTable::up_to(x_max as u64)?;
    for x in [10.5, 100.0, 997.0, 5000.5, x_max] {
        for q in [1u64, 3, 4, 7, 12] {
            for a in units(q) {
                bump("psi", rel(table.psi_progression(x, q, a)?, naive::psi_progression(&ls, x, q, a)));
            }
            for chi in enumerate_characters(q)? {
                bump("psi", crel(table.psi_character(x, &chi)?, naive::psi_character(&ls, x, &chi)));
            }
        }
    }
    let eh = eh_sum(&table, x_max, 21)?;
    bump("eh_sum", rel(eh.value, naive::eh(&ls, x_max, 21)));
    let all = worst.values().fold(0.0f64, |m, &v| m.max(v));
    let parts: Vec<String> = worst.iter().map(|(k, v)| format!("{k} {v:.1e}")).collect();
    Ok((
        all < BRUTE_REL_TOL && max_zeros <= 200,
        format!(
            "{} (relative, < {BRUTE_REL_TOL:.0e}); largest instance {max_zeros} zeros",
            parts.join(", ")
        ),
    ))
}

fn criterion_7(lib: &mut ZeroLibrary) -> Outcome {
    let start = Instant::now();
    let x = 1000.5;
    let table = LambdaTable::up_to(1001)?;
    let mut trend_ok = true;
    let mut trend = Vec::new();
    for q in [1u64, 4] {
        let sets = lib.for_modulus(q)?;
        for a in units(q) {
            let e30 = psi_progression_from_zeros(x, 30.0, q, a, &sets, &table)?.run.abs_error;
            let e100 = psi_progression_from_zeros(x, 100.0, q, a, &sets, &table)?.run.abs_error;
            trend_ok &= e100 < e30;
            trend.push(format!("q={q} a={a} {e30:.3}->{e100:.3}"));
        }
    }
    let mut worst_rec = 0.0f64;
    for q in [1u64, 3, 4, 5, 8, 12] {
        let chars = enumerate_characters(q)?;
        let psis: Vec<Complex64> = chars.iter().map(|c| table.psi_character(x, c)).collect::<Result<_, _>>()?;
        for a in units(q) {
            let rebuilt: Complex64 = chars
                .iter()
                .zip(&psis)
                .map(|(c, p)| c.value(a as i64).conj() * p)
                .sum::<Complex64>()
                / euler_phi(q) as f64;
            worst_rec = worst_rec.max((rebuilt - table.psi_progression(x, q, a)?).norm());
            let run = psi_progression_from_zeros(x, 100.0, q, a, &lib.for_modulus(q)?, &table)?;
            worst_rec = worst_rec.max((run.run.reconstructed - run.via_characters).norm());
        }
    }
    let (fast, t) = within(Duration::from_secs(120), start);
    Ok((
        trend_ok && worst_rec < RECONSTRUCTION_TOL && fast,
        format!(
            "abs error Z=30->100 at x={x}: {}; reconstruction gap {worst_rec:.1e} (< {RECONSTRUCTION_TOL:.0e}), {t}",
            trend.join(", ")
        ),
    ))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let (mut worst, mut n) = (f64::INFINITY, 0);
    for q in 1..=50u64 {
        for ratio in [2u64, 10, 100] {
            for x in [0u64, 1_000, 1_000_000] {
                for a in units(q) {
                    worst = worst.min(brun_titchmarsh_check(x, ratio * q, q, a)?.margin);
                    n += 1;
                }
            }
        }
    }
    let (fast, t) = within(Duration::from_secs(60), start);
    Ok((worst > 0.0 && fast, format!("{n} windows, smallest margin {worst:.3} (> 0), {t}")))
}

fn criterion_9() -> Outcome {
    let x = 1e6;
    let table = LambdaTable::up_to((16.0 * x) as u64)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for q in [1u64, 3, 4, 5] {
        for l in checks::s_of_x(&table, x, q, 1)? {
            ok &= l.passed;
        }
        let s = table.s_of_x(x, q, 1, 8.0 * x)?;
        let d = table.s_of_x(x, q, 1, 16.0 * x)?;
        parts.push(format!(
            "q={q} ratio {:.4} shift {:.1e} (< {:.1e})",
            s.value * euler_phi(q) as f64 / x.ln(),
            (d.value - s.value).abs(),
            s.remainder_bound
        ));
    }
    Ok((ok, format!("{} (ratio in [0.8, 1.2])", parts.join(", "))))
}

fn criterion_10() -> Outcome {
    let single = mean_value_check(&[(3.7, 1.3)], 10.0, 0.25)?;
    let exact = rel(single.exact_integral, single.main_term) < 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(20_241_019);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let freqs: Vec<(f64, f64)> = (0..50)
            .map(|_| (rng.gen_range(0.0..25.0), rng.gen_range(-1.0..1.0)))
            .collect();
        worst = worst.max(mean_value_check(&freqs, 20.0, 0.1)?.implied_constant);
    }
    Ok((
        exact && worst <= MEAN_VALUE_MAX_C,
        format!(
            "single frequency exact: {exact}; 20 random 50-frequency instances (T=20, delta=0.1), max C {worst:.3} (<= {MEAN_VALUE_MAX_C})"
        ),
    ))
}

fn read_all(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, std::io::Error> {
    let mut out = BTreeMap::new();
    for e in std::fs::read_dir(dir)? {
        let e = e?;
        out.insert(e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path())?);
    }
    Ok(out)
}

fn criterion_11() -> Outcome {
    let config = ReportConfig::default();
    let (a, b) = (tempfile::tempdir()?, tempfile::tempdir()?);
    let s1 = write_report(&config, a.path(), library_source(&mut ZeroLibrary::new(config.height)))?;
    let s2 = write_report(&config, b.path(), library_source(&mut ZeroLibrary::new(config.height)))?;
    let (fa, fb) = (read_all(a.path())?, read_all(b.path())?);
    let identical = fa == fb;
    let unlabelled: Vec<&str> = fa
        .iter()
        .filter(|(_, bytes)| {
            let header = bytes.split(|&c| c == b'\n').next().unwrap_or_default();
            !String::from_utf8_lossy(header).split(',').any(|c| c == "regime")
        })
        .map(|(k, _)| k.as_str())
        .collect();
    Ok((
        identical && unlabelled.is_empty() && s1.invariants_hold() && s2.invariants_hold(),
        format!(
            "{} files, byte-identical across runs: {identical}, without regime column: {:?}, \
             telescoping residual {:.1e} (<= {:.1e}), EH cumulative monotone: {}",
            fa.len(),
            unlabelled,
            s1.telescoping_residual,
            s1.telescoping_tolerance,
            s1.eh_monotone
        ),
    ))
}

fn report(n: u32, name: &str, outcome: Outcome, start: Instant) -> bool {
    let secs = start.elapsed().as_secs_f64();
    let (passed, detail) = match outcome {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    let known = !passed && KNOWN_FAILURES.contains(&n);
    println!(
        "{} criterion {n:>2} {name}: {detail} [{secs:.1}s]{}",
        if passed { "PASS" } else { "FAIL" },
        if known { " (known failure)" } else { "" }
    );
    passed || known
}

fn main() {
    let mut lib = ZeroLibrary::new(HEIGHT);
    let mut ok = true;
    let mut step = |n: u32, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        ok &= report(n, name, outcome, start);
    };
    step(1, "character exactness", &mut criterion_1);
    step(2, "zero certification", &mut || criterion_2(&mut lib));
    let sets = grid_sets(&mut lib).expect("grid zero sets");
    step(3, "integral representation", &mut || criterion_3(&sets));
    step(4, "increment identity", &mut || criterion_4(&sets));
    step(5, "F_q realness", &mut || criterion_5(&sets));
    step(6, "brute-force equivalence", &mut || criterion_6(&mut lib));
    step(7, "explicit formula", &mut || criterion_7(&mut lib));
    step(8, "brun-titchmarsh", &mut criterion_8);
    step(9, "S(x) consistency", &mut criterion_9);
    step(10, "mean-value checker", &mut criterion_10);
    step(11, "trend reports", &mut criterion_11);
    if !ok {
        std::process::exit(1);
    }
}
