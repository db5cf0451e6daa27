//! Dirichlet characters modulo q.
//!
//! The unit group (Z/qZ)* is decomposed over the prime powers dividing q.
//! Each odd prime power p^k is cyclic and generated by its smallest primitive
//! root; 4 is generated by -1; and 2^k (k >= 3) by the pair {-1, 5}. A
//! character is an exponent vector over these generators, and its values are
//! exact rational angles.
//!
//! The label of a character is the unit whose discrete-log vector equals the
//! character's exponent vector, so the principal character has index 1.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::arith::{self, gcd, lcm};
use crate::cyclotomic::{CyclotomicInteger, CyclotomicTable};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CharacterError {
    #[error("modulus must be a positive integer")]
    InvalidModulus,
    #[error("index {index} is not a unit modulo {modulus}")]
    NonUnitIndex { modulus: u64, index: u64 },
    #[error("cannot parse character label {0:?}; expected q:index")]
    BadLabel(String),
    #[error("character {0} is not primitive")]
    NotPrimitive(CharacterLabel),
}

/// `(q, index)` pair identifying a character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharacterLabel {
    modulus: u64,
    index: u64,
}

impl CharacterLabel {
    pub fn new(modulus: u64, index: u64) -> Result<Self, CharacterError> {
        if modulus == 0 {
            return Err(CharacterError::InvalidModulus);
        }
        let index = if modulus == 1 { 1 } else { index };
        if index == 0 || index > modulus || gcd(index, modulus) != 1 {
            return Err(CharacterError::NonUnitIndex { modulus, index });
        }
        Ok(Self { modulus, index })
    }

    pub fn principal(modulus: u64) -> Result<Self, CharacterError> {
        Self::new(modulus, 1)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn index(&self) -> u64 {
        self.index
    }
}

impl fmt::Display for CharacterLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.modulus, self.index)
    }
}

impl FromStr for CharacterLabel {
    type Err = CharacterError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CharacterError::BadLabel(s.to_string());
        let (q, idx) = s.split_once(':').ok_or_else(bad)?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        let idx: u64 = idx.trim().parse().map_err(|_| bad())?;
        Self::new(q, idx)
    }
}

/// exp(2πi·num/den), kept as a reduced fraction with `0 <= num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UnitRoot {
    num: u64,
    den: u64,
}

impl UnitRoot {
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "root of unity needs a positive denominator");
        let num = arith::rem_euclid(num, den);
        let g = gcd(num, den);
        // gcd(0, den) = den, which reduces 0/den to 0/1
        Self { num: num / g, den: den / g }
    }

    pub fn one() -> Self {
        Self { num: 0, den: 1 }
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    /// Multiplicative order of the root.
    pub fn order(&self) -> u64 {
        self.den
    }

    pub fn is_one(&self) -> bool {
        self.num == 0
    }

    pub fn mul(self, other: Self) -> Self {
        let den = lcm(self.den, other.den);
        let num = self.num * (den / self.den) + other.num * (den / other.den);
        Self::new((num % den) as i64, den)
    }

    pub fn conj(self) -> Self {
        Self::new(-(self.num as i64), self.den)
    }

    pub fn pow(self, e: u64) -> Self {
        let num = ((self.num as u128 * e as u128) % self.den as u128) as i64;
        Self::new(num, self.den)
    }

    /// Numerator of the same angle over the denominator `den` (which must be a multiple).
    pub fn numerator_over(&self, den: u64) -> u64 {
        debug_assert_eq!(den % self.den, 0);
        self.num * (den / self.den)
    }

    pub fn to_complex(self) -> Complex64 {
        match (self.num, self.den) {
            (0, _) => Complex64::new(1.0, 0.0),
            (1, 2) => Complex64::new(-1.0, 0.0),
            (1, 4) => Complex64::new(0.0, 1.0),
            (3, 4) => Complex64::new(0.0, -1.0),
            _ => {
                let theta = std::f64::consts::TAU * self.num as f64 / self.den as f64;
                Complex64::new(theta.cos(), theta.sin())
            }
        }
    }
}

#[derive(Debug)]
struct Component {
    prime: u64,
    modulus: u64,
    /// discrete logs (up to two slots) of every residue mod `modulus`
    dlog: Vec<[u32; 2]>,
}

#[derive(Debug)]
struct Generator {
    /// unit mod q: the component generator lifted by CRT, 1 on other components
    unit: u64,
    order: u64,
    component: usize,
    slot: usize,
}

/// Structure of (Z/qZ)* with discrete-log tables.
#[derive(Debug)]
pub struct UnitGroup {
    modulus: u64,
    phi: u64,
    exponent: u64,
    components: Vec<Component>,
    generators: Vec<Generator>,
}

impl UnitGroup {
    pub fn new(modulus: u64) -> Result<Self, CharacterError> {
        if modulus == 0 {
            return Err(CharacterError::InvalidModulus);
        }
        let mut components = Vec::new();
        let mut generators = Vec::new();
        for (p, k) in arith::factorize(modulus) {
            let m = p.pow(k);
            let mut dlog = vec![[u32::MAX; 2]; m as usize];
            let mut local: Vec<(u64, u64)> = Vec::new();
            if p == 2 {
                match k {
                    1 => dlog[1] = [0, 0],
                    2 => {
                        dlog[1] = [0, 0];
                        dlog[3] = [1, 0];
                        local.push((3, 2));
                    }
                    _ => {
                        let half = m / 4;
                        let mut five_pow = 1u64;
                        for b in 0..half {
                            dlog[five_pow as usize] = [0, b as u32];
                            dlog[(m - five_pow) as usize] = [1, b as u32];
                            five_pow = five_pow * 5 % m;
                        }
                        local.push((m - 1, 2));
                        local.push((5, half));
                    }
                }
            } else {
                let g = arith::smallest_primitive_root(p, k);
                let phi = m / p * (p - 1);
                let mut x = 1u64;
                for j in 0..phi {
                    dlog[x as usize] = [j as u32, 0];
                    x = arith::mul_mod(x, g, m);
                }
                local.push((g, phi));
            }
            let ci = components.len();
            let other = modulus / m;
            for (slot, &(g, order)) in local.iter().enumerate() {
                let unit = crt_lift(g, m, other);
                generators.push(Generator { unit, order, component: ci, slot });
            }
            components.push(Component { prime: p, modulus: m, dlog });
        }
        let exponent = generators.iter().fold(1, |acc, g| lcm(acc, g.order));
        Ok(Self {
            modulus,
            phi: arith::euler_phi(modulus),
            exponent,
            components,
            generators,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        self.phi
    }

    /// Least common multiple of the generator orders.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn generator_orders(&self) -> Vec<u64> {
        self.generators.iter().map(|g| g.order).collect()
    }

    pub fn generator_units(&self) -> Vec<u64> {
        self.generators.iter().map(|g| g.unit).collect()
    }

    /// Discrete-log vector of `n` over the generators, or `None` for non-units.
    pub fn dlog(&self, n: i64) -> Option<Vec<u64>> {
        let r = arith::rem_euclid(n, self.modulus);
        if gcd(r, self.modulus) != 1 {
            return None;
        }
        Some(
            self.generators
                .iter()
                .map(|g| {
                    let c = &self.components[g.component];
                    c.dlog[(r % c.modulus) as usize][g.slot] as u64
                })
                .collect(),
        )
    }

    /// The unit with the given discrete-log vector.
    pub fn unit_from_exponents(&self, exps: &[u64]) -> u64 {
        if self.modulus == 1 {
            return 1;
        }
        exps.iter().zip(&self.generators).fold(1, |acc, (&e, g)| {
            arith::mul_mod(acc, arith::pow_mod(g.unit, e, self.modulus), self.modulus)
        })
    }
}

fn crt_lift(g: u64, m: u64, other: u64) -> u64 {
    // u ≡ g (mod m), u ≡ 1 (mod other)
    if other == 1 {
        return g % m;
    }
    let inv = arith::mod_inverse(other % m, m).expect("coprime prime-power components");
    let t = arith::mul_mod((g + m - 1) % m, inv, m);
    1 + other * t
}

/// A Dirichlet character, immutable after construction.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    label: CharacterLabel,
    group: Arc<UnitGroup>,
    exponents: Vec<u64>,
    order: u64,
    parity: u8,
    conductor: u64,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label
    }
}

impl Eq for DirichletCharacter {}

impl PartialOrd for DirichletCharacter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DirichletCharacter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.label.cmp(&other.label)
    }
}

impl DirichletCharacter {
    fn from_exponents(group: Arc<UnitGroup>, exponents: Vec<u64>) -> Self {
        let index = group.unit_from_exponents(&exponents);
        let label = CharacterLabel { modulus: group.modulus, index };
        let order = exponents
            .iter()
            .zip(&group.generators)
            .fold(1, |acc, (&e, g)| lcm(acc, g.order / gcd(e, g.order)));
        let conductor = conductor_of(&group, &exponents);
        let mut chi = Self {
            label,
            group,
            exponents,
            order,
            parity: 0,
            conductor,
        };
        let minus_one = chi.eval(-1).expect("-1 is a unit");
        chi.parity = if minus_one.is_one() { 0 } else { 1 };
        chi
    }

    /// Look up a character by its label.
    pub fn from_label(label: CharacterLabel) -> Result<Self, CharacterError> {
        let group = Arc::new(UnitGroup::new(label.modulus)?);
        Self::in_group(group, label.index)
    }

    fn in_group(group: Arc<UnitGroup>, index: u64) -> Result<Self, CharacterError> {
        let exps = group.dlog(index as i64).ok_or(CharacterError::NonUnitIndex {
            modulus: group.modulus,
            index,
        })?;
        Ok(Self::from_exponents(group, exps))
    }

    /// The trivial character modulo 1.
    pub fn trivial() -> Self {
        Self::from_label(CharacterLabel { modulus: 1, index: 1 }).expect("q = 1 is valid")
    }

    pub fn label(&self) -> CharacterLabel {
        self.label
    }

    pub fn modulus(&self) -> u64 {
        self.label.modulus
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn group(&self) -> &UnitGroup {
        &self.group
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// 0 for even characters, 1 for odd ones.
    pub fn parity(&self) -> u8 {
        self.parity
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus()
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    /// χ(n) as an exact root of unity, `None` when gcd(n, q) > 1.
    pub fn eval(&self, n: i64) -> Option<UnitRoot> {
        let logs = self.group.dlog(n)?;
        let big = self.group.exponent as u128;
        let num = logs
            .iter()
            .zip(&self.exponents)
            .zip(&self.group.generators)
            .fold(0u128, |acc, ((&l, &e), g)| {
                (acc + (l as u128 * e as u128 % g.order as u128) * (big / g.order as u128)) % big
            });
        Some(UnitRoot::new(num as i64, self.group.exponent))
    }

    /// χ(n) as a complex number (zero off the units).
    pub fn value(&self, n: i64) -> Complex64 {
        self.eval(n).map_or(Complex64::new(0.0, 0.0), UnitRoot::to_complex)
    }

    /// χ(1), ..., χ(q) as complex numbers, index 0 holding χ(q) = χ(0).
    pub fn value_table(&self) -> Vec<Complex64> {
        (0..self.modulus() as i64).map(|n| self.value(n)).collect()
    }

    /// The complex conjugate character.
    pub fn conj(&self) -> Self {
        let exps = self
            .exponents
            .iter()
            .zip(&self.group.generators)
            .map(|(&e, g)| (g.order - e) % g.order)
            .collect();
        Self::from_exponents(self.group.clone(), exps)
    }

    /// The primitive character inducing this one, with its modulus.
    pub fn conductor_and_inducer(&self) -> (u64, DirichletCharacter) {
        if self.is_primitive() {
            return (self.conductor, self.clone());
        }
        let qstar = self.conductor;
        let group = Arc::new(UnitGroup::new(qstar).expect("conductor is positive"));
        let q = self.modulus();
        let exps = group
            .generators
            .iter()
            .map(|g| {
                let mut u = g.unit;
                while gcd(u, q) != 1 {
                    u += qstar;
                }
                let v = self.eval(u as i64).expect("lifted unit");
                let scaled = v.numerator() as u128 * g.order as u128;
                debug_assert_eq!(scaled % v.denominator() as u128, 0);
                (scaled / v.denominator() as u128) as u64
            })
            .collect();
        let inducer = Self::from_exponents(group, exps);
        debug_assert!(inducer.is_primitive());
        (qstar, inducer)
    }

    /// τ(χ) = Σ_{a=1}^{q} χ(a) e^{2πia/q}.
    pub fn gauss_sum(&self) -> Complex64 {
        let q = self.modulus();
        let mut re = arith::CompensatedSum::new();
        let mut im = arith::CompensatedSum::new();
        for a in 1..=q {
            if let Some(v) = self.eval(a as i64) {
                let w = v.mul(UnitRoot::new(a as i64, q)).to_complex();
                re.add(w.re);
                im.add(w.im);
            }
        }
        Complex64::new(re.value(), im.value())
    }
}

fn conductor_of(group: &UnitGroup, exps: &[u64]) -> u64 {
    let mut cond = 1u64;
    for (ci, comp) in group.components.iter().enumerate() {
        let gens: Vec<(&Generator, u64)> = group
            .generators
            .iter()
            .zip(exps)
            .filter(|(g, _)| g.component == ci)
            .map(|(g, &e)| (g, e))
            .collect();
        let p = comp.prime;
        let part = if p == 2 {
            match gens.as_slice() {
                [] => 1,
                [(_, e)] => {
                    if *e == 0 {
                        1
                    } else {
                        4
                    }
                }
                [(_, e_minus), (g5, e5)] => {
                    let m = g5.order / gcd(*e5, g5.order);
                    if m > 1 {
                        1u64 << (arith::valuation(m, 2) + 2)
                    } else if *e_minus != 0 {
                        4
                    } else {
                        1
                    }
                }
                _ => unreachable!("2-part has at most two generators"),
            }
        } else {
            let (g, e) = gens[0];
            let m = g.order / gcd(e, g.order);
            if m == 1 {
                1
            } else {
                p.pow(1 + arith::valuation(m, p))
            }
        };
        cond *= part;
    }
    cond
}

/// All φ(q) characters mod q, ordered by index (principal first).
pub fn enumerate_characters(q: u64) -> Result<Vec<DirichletCharacter>, CharacterError> {
    let group = Arc::new(UnitGroup::new(q)?);
    let mut out: Vec<DirichletCharacter> = (1..=q)
        .filter(|&n| gcd(n, q) == 1)
        .map(|n| DirichletCharacter::in_group(group.clone(), n).expect("unit index"))
        .collect();
    out.sort();
    Ok(out)
}

/// Σ_χ χ̄(a)χ(b) for every pair of residues, in exact arithmetic.
#[derive(Debug, Clone)]
pub struct OrthogonalityTable {
    modulus: u64,
    entries: Vec<CyclotomicInteger>,
}

impl OrthogonalityTable {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn get(&self, a: u64, b: u64) -> &CyclotomicInteger {
        let q = self.modulus;
        &self.entries[((a % q) * q + (b % q)) as usize]
    }
}

pub fn orthogonality_matrix(q: u64) -> Result<OrthogonalityTable, CharacterError> {
    let chars = enumerate_characters(q)?;
    let group = chars[0].group.clone();
    let n = group.exponent;
    let mut table = CyclotomicTable::new();
    let mut entries = Vec::with_capacity((q * q) as usize);
    for a in 0..q {
        for b in 0..q {
            let mut counts = vec![0i64; n as usize];
            for chi in &chars {
                if let (Some(va), Some(vb)) = (chi.eval(a as i64), chi.eval(b as i64)) {
                    counts[va.conj().mul(vb).numerator_over(n) as usize] += 1;
                }
            }
            entries.push(CyclotomicInteger::from_exponent_counts(&counts, &mut table));
        }
    }
    Ok(OrthogonalityTable { modulus: q, entries })
}
