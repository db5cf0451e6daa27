//! Fixed-column tables and the CSV report bundle.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::characters::CharacterLabel;
use crate::conjectures::{
    dyadic_profile, eh_sum, modulus_regime, montgomery_table, weak_form_summary, weak_form_table, ConjectureError,
    DyadicProfile, EhSum, MontgomeryRow, WeakRow, WeakSummary, DEFAULT_EPSILON,
};
use crate::explicit::ExplicitFormulaRun;
use crate::paircorr::{
    f_q, f_zeta_ratio, spacing_histogram, PairCorrError, PairCorrInput, PairCorrResult, Regime, SpacingHistogram, ZeroSets,
    ZetaRatio,
};
use crate::sieve::{BrunTitchmarsh, LambdaTable, SValue, SieveError};
use crate::store::{emit_table, Cell, StoreError, TableFormat, TableRow};
use crate::zeros::{ZeroError, ZeroLibrary, ZeroSet};

impl TableRow for MontgomeryRow {
    fn columns() -> &'static [&'static str] {
        &[
            "x", "q", "a", "psi", "error", "normalizer", "normalized", "implied_epsilon", "grh_ratio", "regime",
        ]
    }
    fn cells(&self) -> Vec<Cell> {
        vec![
            self.x.into(),
            self.q.into(),
            self.a.into(),
            self.psi.into(),
            self.error.into(),
            self.normalizer.into(),
            self.normalized.into(),
            self.implied_epsilon.into(),
            self.grh_ratio.into(),
            modulus_regime(self.x, self.q).to_string().into(),
        ]
    }
}

impl TableRow for WeakRow {
    fn columns() -> &'static [&'static str] {
        &["x", "q", "a", "alpha", "error", "g", "normalizer", "normalized", "regime"]
    }
    fn cells(&self) -> Vec<Cell> {
        vec![
            self.x.into(),
            self.q.into(),
            self.a.into(),
            self.alpha.into(),
            self.error.into(),
            self.g.into(),
            self.normalizer.into(),
            self.normalized.into(),
            modulus_regime(self.x, self.q).to_string().into(),
        ]
    }
}

impl TableRow for WeakSummary {
    fn columns() -> &'static [&'static str] {
        &[
            "x", "q", "alpha", "normalizer", "worst_a", "max_abs_normalized", "rms_normalized", "regime",
        ]
    }
    fn cells(&self) -> Vec<Cell> {
        vec![
            self.x.into(),
            self.q.into(),
            self.alpha.into(),
            self.normalizer.into(),
            self.worst_a.into(),
            self.max_abs_normalized.into(),
            self.rms_normalized.into(),
            modulus_regime(self.x, self.q).to_string().into(),
        ]
    }
}

impl TableRow for PairCorrResult {
    fn columns() -> &'static [&'static str] {
        &[
            "q",
            "a",
            "x",
            "T",
            "re_f",
            "im_f",
            "ratio_to_thm15",
            "trivial_bound_ratio",
            "regime",
        ]
    }
    fn cells(&self) -> Vec<Cell> {
        vec![
            self.q.into(),
            self.a.into(),
            self.x.into(),
            self.height.into(),
            self.value.re.into(),
            self.value.im.into(),
            self.theorem_ratio().unwrap_or(f64::NAN).into(),
            self.trivial_bound_ratio.into(),
            self.regime().to_string().into(),
        ]
    }
}

impl TableRow for ZetaRatio {
    fn columns() -> &'static [&'static str] {
        &["x", "T", "f", "ratio", "regime"]
    }
    fn cells(&self) -> Vec<Cell> {
        vec![
            self.x.into(),
            self.height.into(),
            self.f_value.into(),
            self.ratio.unwrap_or(f64::NAN).into(),
            self.regime.to_string().into(),
        ]
    }
}

impl TableRow for ExplicitFormulaRun {
    fn columns() -> &'static [&'static str] {
        &[
            "x",
            "Z",
            "q",
            "a",
            "reconstructed_re",
            "reconstructed_im",
            "exact",
            "abs_error",
            "budget",
            "measured_constant",
            "zero_count",
        ]
    }
    fn cells(&self) -> Vec<Cell> {
        vec![
            self.x.into(),
            self.z.into(),
            self.q.into(),
            self.a.into(),
            self.reconstructed.re.into(),
            self.reconstructed.im.into(),
            self.exact.re.into(),
            self.abs_error.into(),
            self.budget.into(),
            self.measured_constant.into(),
            self.zero_count.into(),
        ]
    }
}

impl TableRow for SValue {
    fn columns() -> &'static [&'static str] {
        &["x", "q", "a", "tail_cutoff", "head", "tail", "value", "remainder_bound"]
    }
    fn cells(&self) -> Vec<Cell> {
        vec![
            self.x.into(),
            self.q.into(),
            self.a.into(),
            self.tail_cutoff.into(),
            self.head.into(),
            self.tail.into(),
            self.value.into(),
            self.remainder_bound.into(),
        ]
    }
}

impl TableRow for BrunTitchmarsh {
    fn columns() -> &'static [&'static str] {
        &["x", "y", "q", "a", "count", "bound", "margin", "holds"]
    }
    fn cells(&self) -> Vec<Cell> {
        vec![
            self.x.into(),
            self.y.into(),
            self.q.into(),
            self.a.into(),
            self.count.into(),
            self.bound.into(),
            self.margin.into(),
            self.holds.into(),
        ]
    }
}

/// ψ(x; q, a) and its error against x/φ(q).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiRow {
    pub x: f64,
    pub q: u64,
    pub a: u64,
    pub psi: f64,
    pub error: f64,
}

impl TableRow for PsiRow {
    fn columns() -> &'static [&'static str] {
        &["x", "q", "a", "psi", "error"]
    }
    fn cells(&self) -> Vec<Cell> {
        vec![self.x.into(), self.q.into(), self.a.into(), self.psi.into(), self.error.into()]
    }
}

pub const ZERO_COLUMNS: &[&str] = &["q", "index", "ordinate", "tolerance", "certified"];

pub fn zero_rows(set: &ZeroSet) -> impl Iterator<Item = Vec<Cell>> + '_ {
    let label = set.character();
    set.records().iter().map(move |r| {
        vec![
            label.modulus().into(),
            label.index().into(),
            r.ordinate.into(),
            r.tolerance.into(),
            set.is_certified().into(),
        ]
    })
}

pub const DYADIC_COLUMNS: &[&str] = &["x", "q", "a", "epsilon", "j", "y_upper", "error", "normalized", "regime"];

/// One row per block, then a `tail` row (below x/2^{J+1}, normalized = NaN) and a
/// `total` row carrying the telescoping residual in the `normalized` column.
/// A row is in range when y_upper^{1−ε} >= q.
pub fn dyadic_rows(p: &DyadicProfile) -> Vec<Vec<Cell>> {
    let row = |j: Cell, y: f64, error: f64, normalized: f64| {
        let regime = if y.powf(1.0 - p.epsilon) >= p.q as f64 {
            Regime::InRange
        } else {
            Regime::Extrapolated
        };
        vec![
            p.x.into(),
            p.q.into(),
            p.a.into(),
            p.epsilon.into(),
            j,
            y.into(),
            error.into(),
            normalized.into(),
            regime.to_string().into(),
        ]
    };
    let mut rows: Vec<Vec<Cell>> = p
        .blocks
        .iter()
        .map(|b| row(b.j.into(), p.x / 2f64.powi(b.j as i32), b.error, b.normalized))
        .collect();
    rows.push(row("tail".into(), p.x / 2f64.powi(p.big_j as i32 + 1), p.tail_error, f64::NAN));
    rows.push(row("total".into(), p.x, p.total_error, p.telescoping_residual));
    rows
}

pub const EH_COLUMNS: &[&str] = &["x", "q", "worst_a", "max_error", "cumulative", "cumulative_over_x", "regime"];

pub fn eh_rows(eh: &EhSum) -> Vec<Vec<Cell>> {
    let mut acc = 0.0;
    eh.maxima
        .iter()
        .map(|&(q, a, err)| {
            acc += err;
            vec![
                eh.x.into(),
                q.into(),
                a.into(),
                err.into(),
                acc.into(),
                (acc / eh.x).into(),
                modulus_regime(eh.x, q).to_string().into(),
            ]
        })
        .collect()
}

pub const HISTOGRAM_COLUMNS: &[&str] = &["bin_center", "count_over_expected", "regime"];
pub const HISTOGRAM_DETAIL_COLUMNS: &[&str] = &["lo", "hi", "count", "expected_gue", "regime"];

/// The GUE density is conjectural at every spacing, so each bin is labelled
/// extrapolated.
fn histogram_regime() -> Cell {
    Regime::Extrapolated.to_string().into()
}

pub fn histogram_rows(h: &SpacingHistogram) -> Vec<Vec<Cell>> {
    h.overlay()
        .into_iter()
        .map(|(c, r)| vec![c.into(), r.into(), histogram_regime()])
        .collect()
}

pub fn histogram_detail_rows(h: &SpacingHistogram) -> Vec<Vec<Cell>> {
    (0..h.counts.len())
        .map(|i| {
            vec![
                h.edges[i].into(),
                h.edges[i + 1].into(),
                h.counts[i].into(),
                h.expected[i].into(),
                histogram_regime(),
            ]
        })
        .collect()
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Zeros(#[from] ZeroError),
    #[error(transparent)]
    PairCorr(#[from] PairCorrError),
    #[error(transparent)]
    Conjecture(#[from] ConjectureError),
    #[error(transparent)]
    Sieve(#[from] SieveError),
}

/// Inputs of the report bundle. The defaults are the reference grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportConfig {
    pub height: f64,
    pub zeta_xs: Vec<f64>,
    pub pair_qs: Vec<u64>,
    pub pair_xs: Vec<f64>,
    pub pair_heights: Vec<f64>,
    /// (α, β, bins) for the q = 1 spacing histogram.
    pub histogram: (f64, f64, usize),
    pub montgomery_xs: Vec<f64>,
    pub montgomery_qs: Vec<u64>,
    pub eh_x: f64,
    pub weak_x: f64,
    pub weak_max_q: u64,
    pub weak_alpha: f64,
    pub dyadic: (f64, u64, u64),
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            height: 100.0,
            zeta_xs: vec![1.5, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 1000.0],
            pair_qs: vec![1, 3, 4, 5],
            pair_xs: vec![2.0, 5.0, 10.0, 50.0],
            pair_heights: vec![30.0, 60.0, 100.0],
            histogram: (0.05, 3.05, 30),
            montgomery_xs: vec![1e4, 2.5e5, 1e6],
            montgomery_qs: vec![1, 3, 4, 5, 7, 11, 101, 404],
            eh_x: 1e5,
            weak_x: 1e6,
            weak_max_q: 1000,
            weak_alpha: 0.5,
            dyadic: (1e6, 101, 1),
        }
    }
}

/// What a report run produced, with the invariants checked along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportSummary {
    pub files: Vec<PathBuf>,
    pub telescoping_residual: f64,
    pub telescoping_tolerance: f64,
    /// Cumulative EH sums never decrease in Q.
    pub eh_monotone: bool,
}

impl ReportSummary {
    pub fn invariants_hold(&self) -> bool {
        self.eh_monotone && self.telescoping_residual <= self.telescoping_tolerance
    }
}

/// Writes the CSV bundle into `out`. Zero sets come from `zeros_for`, which
/// maps a modulus to its sets at `config.height` (typically through a cache).
pub fn write_report<F>(config: &ReportConfig, out: &Path, mut zeros_for: F) -> Result<ReportSummary, ReportError>
where
    F: FnMut(u64) -> Result<ZeroSets, ReportError>,
{
    let mut files = Vec::new();
    let mut emit = |name: &str, columns: &[&str], rows: Vec<Vec<Cell>>| -> Result<(), ReportError> {
        let path = out.join(name);
        emit_table(columns, rows, TableFormat::Csv, &path)?;
        files.push(path);
        Ok(())
    };

    let zeta_sets = zeros_for(1)?;
    let zeta: Arc<ZeroSet> = zeta_sets[&CharacterLabel::principal(1).expect("modulus 1")].clone();
    let ratios = config
        .zeta_xs
        .iter()
        .map(|&x| f_zeta_ratio(x, config.height, &zeta))
        .collect::<Result<Vec<_>, _>>()?;
    emit("f_zeta_ratio.csv", ZetaRatio::columns(), ratios.iter().map(TableRow::cells).collect())?;

    let mut pair_rows = Vec::new();
    for &q in &config.pair_qs {
        let sets = zeros_for(q)?;
        for a in crate::checks::units(q) {
            for &t in &config.pair_heights {
                for &x in &config.pair_xs {
                    pair_rows.push(f_q(&PairCorrInput::new(q, a, x, t, sets.clone())?).cells());
                }
            }
        }
    }
    emit("pair_correlation.csv", PairCorrResult::columns(), pair_rows)?;

    let (alpha, beta, bins) = config.histogram;
    let hist = spacing_histogram(&zeta.ordinates_within(config.height), config.height, alpha, beta, bins)?;
    emit("gue_histogram.csv", HISTOGRAM_COLUMNS, histogram_rows(&hist))?;
    emit("gue_histogram_counts.csv", HISTOGRAM_DETAIL_COLUMNS, histogram_detail_rows(&hist))?;

    let sieve_hi = config
        .montgomery_xs
        .iter()
        .copied()
        .chain([config.eh_x, config.weak_x, config.dyadic.0])
        .fold(2.0, f64::max);
    let table = LambdaTable::up_to(sieve_hi.floor() as u64)?;

    let mont = montgomery_table(&table, &config.montgomery_xs, &config.montgomery_qs, None)?;
    emit("montgomery.csv", MontgomeryRow::columns(), mont.iter().map(TableRow::cells).collect())?;

    let big_q = config.eh_x.cbrt().floor() as u64;
    let eh = eh_sum(&table, config.eh_x, big_q.max(1))?;
    let eh_monotone = eh.maxima.iter().all(|m| m.2 >= 0.0);
    emit("eh.csv", EH_COLUMNS, eh_rows(&eh))?;

    let qs: Vec<u64> = (1..=config.weak_max_q).collect();
    let weak = weak_form_table(&table, config.weak_x, &qs, config.weak_alpha)?;
    let summary = weak_form_summary(&weak);
    emit("weak.csv", WeakSummary::columns(), summary.iter().map(TableRow::cells).collect())?;

    let (dx, dq, da) = config.dyadic;
    let profile = dyadic_profile(&table, dx, dq, da, DEFAULT_EPSILON)?;
    emit("dyadic.csv", DYADIC_COLUMNS, dyadic_rows(&profile))?;

    Ok(ReportSummary {
        files,
        telescoping_residual: profile.telescoping_residual,
        telescoping_tolerance: 1e-8 * dx.sqrt(),
        eh_monotone,
    })
}

/// A [`write_report`] zero source backed only by an in-memory library.
pub fn library_source(library: &mut ZeroLibrary) -> impl FnMut(u64) -> Result<ZeroSets, ReportError> + '_ {
    move |q| Ok(library.for_modulus(q)?)
}
