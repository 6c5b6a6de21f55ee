//! Census of set systems and value-comparison experiments.

use std::fmt;

use rayon::prelude::*;

use crate::error::{GameError, Result};
use crate::games::{random_game_with, IncompleteGame};
use crate::rng;
use crate::setsys::{self, Coalition, SamplingMode, SetSystem};
use crate::values::{self, ValueKind};

/// Number of set systems over `n` players containing `∅` and `N`.
pub fn systems_with_grand(n: usize) -> u128 {
    1u128 << ((1u32 << n) - 2)
}

/// One row of the census table.
#[derive(Clone, Debug, PartialEq)]
pub struct CensusRow {
    pub n: usize,
    /// Number of systems containing `∅` and `N`.
    pub total: u128,
    /// Systems inspected: `total` when exhaustive, the sample size otherwise.
    pub examined: u64,
    pub ic_count: u64,
    pub unique_nonic_count: u64,
    /// `None` for exhaustive rows.
    pub samples: Option<u64>,
    pub seed: Option<u64>,
}

impl CensusRow {
    pub fn ic_prop(&self) -> f64 {
        self.ic_count as f64 / self.examined as f64
    }

    pub fn unique_nonic_prop(&self) -> f64 {
        self.unique_nonic_count as f64 / self.examined as f64
    }

    /// Binomial standard errors of the two proportions (zero when exhaustive).
    pub fn standard_errors(&self) -> (f64, f64) {
        if self.samples.is_none() {
            return (0.0, 0.0);
        }
        let m = self.examined as f64;
        let se = |p: f64| (p * (1.0 - p) / m).sqrt();
        (se(self.ic_prop()), se(self.unique_nonic_prop()))
    }

    pub fn is_exhaustive(&self) -> bool {
        self.samples.is_none()
    }
}

/// A census row plus the non-intersection-closed systems with a unique
/// UD-value that were encountered, in ascending mask order.
#[derive(Clone, Debug, PartialEq)]
pub struct Census {
    pub row: CensusRow,
    pub unique_nonic: Vec<SetSystem>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Verdict {
    IntersectionClosed,
    UniqueNonIc,
    NotUnique,
}

fn classify_system(system: &SetSystem) -> Verdict {
    if system.is_intersection_closed() {
        Verdict::IntersectionClosed
    } else if values::is_ud_unique(system) {
        Verdict::UniqueNonIc
    } else {
        Verdict::NotUnique
    }
}

fn tally(n: usize, verdicts: Vec<(SetSystem, Verdict)>, samples: Option<u64>, seed: Option<u64>) -> Census {
    let ic_count = verdicts
        .iter()
        .filter(|(_, v)| *v == Verdict::IntersectionClosed)
        .count() as u64;
    let mut unique_nonic: Vec<SetSystem> = verdicts
        .iter()
        .filter(|(_, v)| *v == Verdict::UniqueNonIc)
        .map(|(s, _)| *s)
        .collect();
    let unique_nonic_count = unique_nonic.len() as u64;
    unique_nonic.sort();
    unique_nonic.dedup();
    Census {
        row: CensusRow {
            n,
            total: systems_with_grand(n),
            examined: verdicts.len() as u64,
            ic_count,
            unique_nonic_count,
            samples,
            seed,
        },
        unique_nonic,
    }
}

/// Classifies every system containing `∅` and `N`; `n <= 4`.
pub fn census_exhaustive(n: usize) -> Result<Census> {
    let systems: Vec<SetSystem> = setsys::enumerate_systems(n, true)?.collect();
    let verdicts = systems
        .into_par_iter()
        .map(|s| (s, classify_system(&s)))
        .collect();
    Ok(tally(n, verdicts, None, None))
}

/// Classifies `samples` uniform draws of systems containing `∅` and `N`.
/// Draw `k` uses a generator derived from `(seed, k)`.
pub fn census_sampled(n: usize, samples: u64, seed: u64) -> Result<Census> {
    if samples == 0 {
        return Err(GameError::input("at least one sample is required"));
    }
    let verdicts = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng::derived(seed, &[k]);
            let s = setsys::sample_system_with(n, SamplingMode::Uniform, &mut rng)?;
            Ok((s, classify_system(&s)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(tally(n, verdicts, Some(samples), Some(seed)))
}

/// `{S : |S| = 2} ∪ {∅, N} ∪ Σ` for every family `Σ` of singletons, in
/// ascending mask order. The first entry has `Σ = ∅`, the last has every
/// singleton and is intersection-closed.
pub fn symmetric_pair_family(n: usize) -> Result<Vec<SetSystem>> {
    let grand = Coalition::grand(n);
    let base = SetSystem::from_coalitions(
        n,
        setsys::all_coalitions(n).filter(|c| c.len() == 2 || *c == grand),
    )?;
    let mut out: Vec<SetSystem> = (0u32..1 << n)
        .map(|chosen| {
            Coalition::from_mask(chosen)
                .indices()
                .fold(base, |acc, i| acc.with(Coalition::singleton(i)))
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Sample-size formulas.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum SampleSizeFormula {
    /// `Z² p (1 - p) / E²` for a proportion `p`.
    Yamane,
    /// `(Z s / E)²` for a standard deviation `s`.
    Cochran,
}

/// Ceiling of the chosen formula.
pub fn sample_size(formula: SampleSizeFormula, z: f64, p_or_s: f64, margin: f64) -> Result<u64> {
    if !(margin > 0.0) {
        return Err(GameError::input("margin of error must be positive"));
    }
    let raw = match formula {
        SampleSizeFormula::Yamane => {
            if !(0.0..=1.0).contains(&p_or_s) {
                return Err(GameError::input("proportion must lie in [0, 1]"));
            }
            z * z * p_or_s * (1.0 - p_or_s) / (margin * margin)
        }
        SampleSizeFormula::Cochran => {
            if p_or_s < 0.0 {
                return Err(GameError::input("standard deviation must be nonnegative"));
            }
            (z * p_or_s / margin).powi(2)
        }
    };
    // Absorb representation error so that exact integers are not bumped up.
    let nearest = raw.round();
    let size = if (raw - nearest).abs() <= 1e-9 * raw.max(1.0) {
        nearest
    } else {
        raw.ceil()
    };
    Ok(size as u64)
}

/// What each experiment series measures.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Reference {
    /// `‖R − IC‖₁`, `‖R − UD‖₁`, `‖UD − IC‖₁`.
    Pairwise,
    /// `‖X − ED‖₁` for X in R, IC, UD.
    EqualDivision,
}

impl Reference {
    pub fn labels(self) -> &'static [&'static str] {
        match self {
            Reference::Pairwise => &["R_IC", "R_UD", "UD_IC"],
            Reference::EqualDivision => &["R_ED", "IC_ED", "UD_ED"],
        }
    }
}

/// Policy for systems outside the values' domain.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum OnUnsupported {
    Skip,
    Fail,
}

/// Mean and population standard deviation of one series on one system.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SeriesStats {
    pub mean: f64,
    pub sd: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemStats {
    pub system: SetSystem,
    pub games: usize,
    /// One entry per label of the report's reference.
    pub series: Vec<SeriesStats>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceReport {
    pub reference: Reference,
    pub rows: Vec<SystemStats>,
    pub skipped: Vec<(SetSystem, GameError)>,
}

impl DifferenceReport {
    pub fn labels(&self) -> &'static [&'static str] {
        self.reference.labels()
    }
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn distances(game: &IncompleteGame<f64>, reference: Reference) -> Result<Vec<f64>> {
    let r = values::value(game, ValueKind::R)?.to_f64();
    let ic = values::value(game, ValueKind::Ic)?.to_f64();
    let ud = values::value(game, ValueKind::Ud)?.to_f64();
    Ok(match reference {
        Reference::Pairwise => vec![l1(&r, &ic), l1(&r, &ud), l1(&ud, &ic)],
        Reference::EqualDivision => {
            let ed = values::equal_division(game)?.to_f64();
            vec![l1(&r, &ed), l1(&ic, &ed), l1(&ud, &ed)]
        }
    })
}

fn stats(samples: &[f64]) -> SeriesStats {
    let m = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / m;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m;
    SeriesStats {
        mean,
        sd: var.sqrt(),
    }
}

fn system_seed_parts(system: &SetSystem) -> [u64; 3] {
    let mask = system.mask();
    [system.players() as u64, mask as u64, (mask >> 64) as u64]
}

fn run_system(system: &SetSystem, games: usize, seed: u64, reference: Reference) -> Result<SystemStats> {
    if !system.has_grand_coalition() {
        return Err(GameError::GrandCoalitionMissing);
    }
    if !system.is_intersection_closed() {
        return Err(GameError::NotIntersectionClosed);
    }
    let mut rng = rng::derived(seed, &system_seed_parts(system));
    let mut per_series = vec![Vec::with_capacity(games); reference.labels().len()];
    for _ in 0..games {
        let game = random_game_with::<f64>(system, &mut rng, 0.0, 1.0)?;
        for (acc, d) in per_series.iter_mut().zip(distances(&game, reference)?) {
            acc.push(d);
        }
    }
    Ok(SystemStats {
        system: *system,
        games,
        series: per_series.iter().map(|s| stats(s)).collect(),
    })
}

/// Draws `games_per_system` games with `U[0, 1]` worths on every system and
/// records mean and standard deviation of each distance series.
pub fn difference_experiment(
    systems: &[SetSystem],
    games_per_system: usize,
    seed: u64,
    reference: Reference,
    on_unsupported: OnUnsupported,
) -> Result<DifferenceReport> {
    if games_per_system == 0 {
        return Err(GameError::input("at least one game per system is required"));
    }
    let outcomes: Vec<(SetSystem, Result<SystemStats>)> = systems
        .par_iter()
        .map(|s| (*s, run_system(s, games_per_system, seed, reference)))
        .collect();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (system, outcome) in outcomes {
        match outcome {
            Ok(row) => rows.push(row),
            Err(e) if on_unsupported == OnUnsupported::Skip => skipped.push((system, e)),
            Err(e) => return Err(e),
        }
    }
    Ok(DifferenceReport {
        reference,
        rows,
        skipped,
    })
}

/// All intersection-closed systems with `N`, ascending mask order; `n <= 4`.
pub fn intersection_closed_systems(n: usize) -> Result<Vec<SetSystem>> {
    Ok(setsys::enumerate_systems(n, true)?
        .filter(SetSystem::is_intersection_closed)
        .collect())
}

/// `count` intersection-closed systems drawn with [`SamplingMode::IcBiased`].
pub fn sample_ic_systems(n: usize, count: usize, seed: u64) -> Result<Vec<SetSystem>> {
    (0..count as u64)
        .map(|k| setsys::sample_system_with(n, SamplingMode::IcBiased, &mut rng::derived(seed, &[k])))
        .collect()
}

/// Pilot-then-Cochran sizing: runs a 30-system pilot and returns
/// `cochran(z, s, margin)`, where `s` is the largest standard deviation of
/// per-system mean distances across the series.
pub fn pilot_sample_size(
    n: usize,
    games_per_system: usize,
    seed: u64,
    reference: Reference,
    z: f64,
    margin: f64,
) -> Result<u64> {
    let pilot_systems = sample_ic_systems(n, 30, rng::derive_seed(seed, &[0x9170]))?;
    let pilot = difference_experiment(&pilot_systems, games_per_system, seed, reference, OnUnsupported::Fail)?;
    let spread = (0..reference.labels().len())
        .map(|k| {
            let means: Vec<f64> = pilot.rows.iter().map(|r| r.series[k].mean).collect();
            let m = means.len() as f64;
            let mean = means.iter().sum::<f64>() / m;
            (means.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt()
        })
        .fold(0.0, f64::max);
    sample_size(SampleSizeFormula::Cochran, z, spread, margin)
}

/// Relative tolerance under which two series means count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Per series: how many systems rank it smallest, second, largest.
#[derive(Clone, Debug, PartialEq)]
pub struct RankFrequency {
    pub labels: Vec<&'static str>,
    /// `counts[series][position]`.
    pub counts: Vec<[usize; 3]>,
    /// Systems on which at least two means tied.
    pub tied_systems: usize,
    pub systems: usize,
}

impl RankFrequency {
    pub fn count(&self, label: &str, position: usize) -> usize {
        let k = self
            .labels
            .iter()
            .position(|l| *l == label)
            .unwrap_or_else(|| panic!("unknown series {label}"));
        self.counts[k][position]
    }
}

/// Competition ranks (ties share the lower rank) of `means`.
fn shared_ranks(means: &[f64]) -> (Vec<usize>, bool) {
    let tied = |a: f64, b: f64| (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs()).max(1.0);
    let mut any_tie = false;
    let ranks = means
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            means
                .iter()
                .enumerate()
                .filter(|&(j, &y)| {
                    if j != i && tied(x, y) {
                        any_tie = true;
                    }
                    j != i && !tied(x, y) && y < x
                })
                .count()
        })
        .collect();
    (ranks, any_tie)
}

pub fn rank_frequency(report: &DifferenceReport) -> Result<RankFrequency> {
    if report.rows.is_empty() {
        return Err(GameError::input("empty report"));
    }
    let labels = report.labels().to_vec();
    let mut counts = vec![[0usize; 3]; labels.len()];
    let mut tied_systems = 0;
    for row in &report.rows {
        let means: Vec<f64> = row.series.iter().map(|s| s.mean).collect();
        let (ranks, tie) = shared_ranks(&means);
        tied_systems += usize::from(tie);
        for (k, r) in ranks.into_iter().enumerate() {
            counts[k][r] += 1;
        }
    }
    Ok(RankFrequency {
        labels,
        counts,
        tied_systems,
        systems: report.rows.len(),
    })
}

/// Bin counts of per-system means.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub labels: Vec<&'static str>,
    pub low: f64,
    pub width: f64,
    /// `counts[series][bin]`.
    pub counts: Vec<Vec<usize>>,
    /// Values that fell outside `[low, high)` and were clipped to an edge bin.
    pub clipped: usize,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.first().map_or(0, Vec::len)
    }

    pub fn bin_start(&self, bin: usize) -> f64 {
        self.low + self.width * bin as f64
    }
}

/// Histogram range of the pairwise experiment.
pub const PAIRWISE_RANGE: (f64, f64) = (0.0, 1.2);
/// Histogram range of the equal-division experiment.
pub const ED_RANGE: (f64, f64) = (0.5, 1.7);

pub fn histogram(report: &DifferenceReport, width: f64, low: f64, high: f64) -> Result<Histogram> {
    if report.rows.is_empty() {
        return Err(GameError::input("empty report"));
    }
    if !(width > 0.0) || !(high > low) {
        return Err(GameError::input("histogram needs width > 0 and high > low"));
    }
    let bins = ((high - low) / width).round() as usize;
    let labels = report.labels().to_vec();
    let mut counts = vec![vec![0usize; bins]; labels.len()];
    let mut clipped = 0;
    for row in &report.rows {
        for (k, s) in row.series.iter().enumerate() {
            let pos = ((s.mean - low) / width).floor();
            let bin = if pos < 0.0 {
                clipped += 1;
                0
            } else if pos >= bins as f64 {
                clipped += 1;
                bins - 1
            } else {
                pos as usize
            };
            counts[k][bin] += 1;
        }
    }
    Ok(Histogram {
        labels,
        low,
        width,
        counts,
        clipped,
    })
}

impl fmt::Display for CensusRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} total={} examined={} ic={} unique_nonic={}",
            self.n, self.total, self.examined, self.ic_count, self.unique_nonic_count
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn census_small() {
        let c = census_exhaustive(2).unwrap();
        assert_eq!((c.row.examined, c.row.ic_count, c.row.unique_nonic_count), (4, 4, 0));
        let c = census_exhaustive(3).unwrap();
        assert_eq!((c.row.examined, c.row.ic_count, c.row.unique_nonic_count), (64, 45, 0));
        assert!((c.row.ic_prop() - 0.703125).abs() < 1e-12);
        assert!(census_exhaustive(5).is_err());
    }

    #[test]
    fn totals() {
        assert_eq!(systems_with_grand(3), 64);
        assert_eq!(systems_with_grand(5), 1_073_741_824);
        assert_eq!(systems_with_grand(7), 1u128 << 126);
    }

    #[test]
    fn sample_sizes() {
        assert_eq!(sample_size(SampleSizeFormula::Yamane, 2.576, 0.5, 0.001).unwrap(), 1_658_944);
        assert_eq!(sample_size(SampleSizeFormula::Cochran, 1.96, 0.3, 0.01).unwrap(), 3_458);
        assert_eq!(sample_size(SampleSizeFormula::Yamane, 2.576, 0.0, 0.01).unwrap(), 0);
        assert!(sample_size(SampleSizeFormula::Yamane, 2.576, 0.5, 0.0).is_err());
        assert!(sample_size(SampleSizeFormula::Yamane, 2.576, 1.5, 0.1).is_err());
    }

    #[test]
    fn four_player_witnesses_are_the_non_closed_symmetric_systems() {
        let fam = symmetric_pair_family(4).unwrap();
        assert_eq!(fam.len(), 16);
        assert!(fam.last().unwrap().is_intersection_closed());
        let expected: Vec<SetSystem> = fam.into_iter().filter(|s| !s.is_intersection_closed()).collect();
        assert_eq!(census_exhaustive(4).unwrap().unique_nonic, expected);
    }

    #[test]
    fn power_set_differences_vanish() {
        let report = difference_experiment(
            &[SetSystem::power_set(3).unwrap()],
            20,
            1,
            Reference::Pairwise,
            OnUnsupported::Fail,
        )
        .unwrap();
        assert!(report.rows[0].series.iter().all(|s| s.mean < 1e-12 && s.sd < 1e-12));
        let ranks = rank_frequency(&report).unwrap();
        assert_eq!(ranks.tied_systems, 1);
        assert!(ranks.counts.iter().all(|c| c[0] == 1));
    }

    #[test]
    fn unsupported_systems_skip_or_fail() {
        let pairs = SetSystem::from_player_lists(3, &[&[1, 2], &[1, 3], &[2, 3], &[1, 2, 3]]).unwrap();
        let full = SetSystem::power_set(3).unwrap();
        let report = difference_experiment(&[pairs, full], 5, 0, Reference::Pairwise, OnUnsupported::Skip).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.skipped, vec![(pairs, GameError::NotIntersectionClosed)]);
        assert!(difference_experiment(&[pairs], 5, 0, Reference::Pairwise, OnUnsupported::Fail).is_err());
    }

    #[test]
    fn shared_ranks_flag_ties() {
        assert_eq!(shared_ranks(&[0.3, 0.1, 0.2]), (vec![2, 0, 1], false));
        assert_eq!(shared_ranks(&[0.1, 0.1, 0.2]), (vec![0, 0, 2], true));
    }

    #[test]
    fn summaries_partition_systems() {
        let systems = intersection_closed_systems(3).unwrap();
        let report = difference_experiment(&systems, 10, 3, Reference::EqualDivision, OnUnsupported::Fail).unwrap();
        let ranks = rank_frequency(&report).unwrap();
        for c in &ranks.counts {
            assert_eq!(c.iter().sum::<usize>(), systems.len());
        }
        let (lo, hi) = ED_RANGE;
        let h = histogram(&report, 0.1, lo, hi).unwrap();
        assert_eq!(h.bins(), 12);
        for c in &h.counts {
            assert_eq!(c.iter().sum::<usize>(), systems.len());
        }
        let empty = DifferenceReport {
            reference: Reference::Pairwise,
            rows: vec![],
            skipped: vec![],
        };
        assert!(rank_frequency(&empty).is_err());
        assert!(histogram(&empty, 0.1, 0.0, 1.2).is_err());
    }

    #[test]
    fn experiment_is_deterministic() {
        let systems = intersection_closed_systems(3).unwrap();
        let a = difference_experiment(&systems, 5, 9, Reference::Pairwise, OnUnsupported::Fail).unwrap();
        let b = difference_experiment(&systems, 5, 9, Reference::Pairwise, OnUnsupported::Fail).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pilot_sizing_runs() {
        let size = pilot_sample_size(5, 20, 1, Reference::Pairwise, 1.96, 0.01).unwrap();
        assert!(size > 0);
    }
}
