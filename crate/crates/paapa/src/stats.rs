//! Empirical measurement on grown graphs and comparison against theory:
//! histograms, assortativity, tail fits, distance metrics, goodness of fit,
//! growth regressions and peak detection.

use std::collections::BTreeMap;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::graph::{EdgeRecord, GraphState};
use crate::theory::TruncatedLaw;

/// Empirical degree counts from one or more grown graphs.
///
/// Merging across replicas is plain count addition, so it is associative and
/// commutative and the merged total is `replicas * t`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DegreeHistogram {
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl DegreeHistogram {
    pub fn from_state(state: &GraphState) -> Self {
        let mut counts = BTreeMap::new();
        for &d in state.degrees() {
            *counts.entry(d as u64).or_insert(0) += 1;
        }
        DegreeHistogram {
            counts,
            total: state.time(),
        }
    }

    pub fn from_counts(counts: BTreeMap<u64, u64>) -> Self {
        let total = counts.values().sum();
        DegreeHistogram { counts, total }
    }

    pub fn merge(&mut self, other: &DegreeHistogram) {
        for (&k, &n) in &other.counts {
            *self.counts.entry(k).or_insert(0) += n;
        }
        self.total += other.total;
    }

    pub fn total_vertices(&self) -> u64 {
        self.total
    }

    pub fn degree_sum(&self) -> u64 {
        self.counts.iter().map(|(&k, &n)| k * n).sum()
    }

    pub fn count(&self, k: u64) -> u64 {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    /// Empirical fraction of vertices with degree `k`.
    pub fn frac(&self, k: u64) -> f64 {
        self.count(k) as f64 / self.total as f64
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }
}

/// Exact degree counts of a single graph.
pub fn histogram(state: &GraphState) -> DegreeHistogram {
    DegreeHistogram::from_state(state)
}

/// Newman's degree assortativity over an edge stream.
///
/// `degrees` holds final degrees indexed by `vertex - 1`. Every multi-edge
/// copy counts once; self-loops (the initial ones on vertex 1 are the only
/// kind this model produces) are excluded because their endpoint-degree
/// semantics is ambiguous. Numerator and denominator are accumulated in
/// exact integer arithmetic; only the final ratio divides.
pub fn assortativity<I>(edges: I, degrees: &[u32]) -> Result<f64>
where
    I: IntoIterator<Item = EdgeRecord>,
{
    let mut sum_prod: i128 = 0;
    let mut sum_half2: i128 = 0; // 2 * sum of (j+k)/2
    let mut sum_sq2: i128 = 0; // 2 * sum of (j^2+k^2)/2
    let mut edge_count: i128 = 0;
    for edge in edges {
        if edge.source == edge.target {
            continue;
        }
        let j = degrees[(edge.source - 1) as usize] as i128;
        let k = degrees[(edge.target - 1) as usize] as i128;
        sum_prod += j * k;
        sum_half2 += j + k;
        sum_sq2 += j * j + k * k;
        edge_count += 1;
    }
    // r = [M sum(jk) - (sum (j+k)/2)^2] / [M sum(j^2+k^2)/2 - (sum (j+k)/2)^2],
    // everything multiplied by 4 to stay in integers.
    let num = 4 * edge_count * sum_prod - sum_half2 * sum_half2;
    let den = 2 * edge_count * sum_sq2 - sum_half2 * sum_half2;
    if den == 0 {
        return Err(Error::AssortativityUndefined);
    }
    Ok(num as f64 / den as f64)
}

/// [`assortativity`] of a grown graph against its own final degrees.
pub fn assortativity_of(state: &GraphState) -> Result<f64> {
    assortativity(state.edges(), state.degrees())
}

/// Ordinary least-squares fit report.
#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub slope: f64,
    pub intercept: f64,
    /// Range of the abscissa actually used (degrees for tail fits, times for
    /// growth regressions).
    pub k_range: (f64, f64),
    pub points_used: usize,
    pub residual_rms: f64,
}

impl FitReport {
    /// The pdf power-law exponent implied by a CCDF log-log fit.
    pub fn pdf_exponent(&self) -> f64 {
        self.slope - 1.0
    }
}

fn ols(points: &[(f64, f64)]) -> FitReport {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let rss: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    FitReport {
        slope,
        intercept,
        k_range: (lo, hi),
        points_used: points.len(),
        residual_rms: (rss / n).sqrt(),
    }
}

/// Log-log least squares on the empirical CCDF over degrees `k >= kmin`
/// whose count is at least `min_count`. The reported [`FitReport::slope`]
/// is the CCDF slope; the pdf exponent is `slope - 1`. CCDF fitting is used
/// instead of pdf fitting for its lower variance in thin tails.
pub fn tail_fit(hist: &DegreeHistogram, kmin: u64, min_count: u64) -> Result<FitReport> {
    if hist.is_empty() {
        return Err(Error::EmptyHistogram);
    }
    let total = hist.total_vertices() as f64;
    let mut points = Vec::new();
    let mut above = 0u64; // vertices with degree > k, filled from the top
    for (&k, &n) in hist.counts().iter().rev() {
        let ccdf = (above + n) as f64 / total;
        if k >= kmin && n >= min_count {
            points.push(((k as f64).ln(), ccdf.ln()));
        }
        above += n;
    }
    if points.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: points.len(),
        });
    }
    points.reverse();
    let mut report = ols(&points);
    report.k_range = (report.k_range.0.exp(), report.k_range.1.exp());
    Ok(report)
}

/// Total-variation distance between an empirical histogram and a truncated
/// reference law. The reference's truncated mass is added in full, making
/// this an upper bound on the exact distance that is tight whenever the
/// empirical mass beyond the truncation point is negligible.
pub fn tv_distance(hist: &DegreeHistogram, reference: &TruncatedLaw) -> Result<f64> {
    if hist.is_empty() {
        return Err(Error::EmptyHistogram);
    }
    let mut acc = 0.0;
    for (&k, &prob) in &reference.probs {
        acc += (hist.frac(k) - prob).abs();
    }
    for (&k, _) in hist.counts() {
        if !reference.probs.contains_key(&k) {
            acc += hist.frac(k);
        }
    }
    Ok(0.5 * (acc + reference.truncated_mass))
}

/// Plain total variation between two finite probability tables.
pub fn tv_between(a: &BTreeMap<u64, f64>, b: &BTreeMap<u64, f64>) -> f64 {
    let mut acc = 0.0;
    for (&k, &pa) in a {
        acc += (pa - b.get(&k).copied().unwrap_or(0.0)).abs();
    }
    for (&k, &pb) in b {
        if !a.contains_key(&k) {
            acc += pb;
        }
    }
    0.5 * acc
}

/// Which divergence law a mean-degree trajectory is regressed against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthMode {
    /// Regress on `sqrt(t)` (preferential regime).
    Sqrt,
    /// Regress on `ln t` (anti-preferential regime).
    Log,
}

/// OLS of mean degree against `sqrt(t)` or `ln t` over at least 10
/// checkpoints `(t, mean degree)`.
pub fn growth_regression(trajectory: &[(f64, f64)], mode: GrowthMode) -> Result<FitReport> {
    if trajectory.len() < 10 {
        return Err(Error::InsufficientData {
            needed: 10,
            got: trajectory.len(),
        });
    }
    let points: Vec<(f64, f64)> = trajectory
        .iter()
        .map(|&(t, y)| {
            let x = match mode {
                GrowthMode::Sqrt => t.sqrt(),
                GrowthMode::Log => t.ln(),
            };
            (x, y)
        })
        .collect();
    Ok(ols(&points))
}

/// A detected interior mode of the degree distribution.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Peak {
    pub degree: u64,
    /// Smoothed count at the peak.
    pub height: f64,
    /// Smoothed count gap between the peak/low-degree mode and the valley
    /// separating them.
    pub valley_depth: f64,
}

/// Looks for a high-degree mode separated from the low-degree mode.
///
/// The counts are smoothed with a centered moving average of odd width
/// `window`; the candidate is the highest interior local maximum at degree
/// `k > 2m`, and it only counts as a peak when the valley separating it from
/// the low-degree mode is deeper than three times the local Poisson noise
/// scale `sqrt(smoothed count)`. Absence is a valid result.
pub fn detect_peak(hist: &DegreeHistogram, m: u32, window: usize) -> Result<Option<Peak>> {
    if window < 3 || window % 2 == 0 {
        return Err(Error::invalid("window", "must be odd and >= 3"));
    }
    if hist.is_empty() {
        return Err(Error::EmptyHistogram);
    }
    let (&k_lo, _) = hist.counts().first_key_value().expect("nonempty");
    let (&k_hi, _) = hist.counts().last_key_value().expect("nonempty");
    let len = (k_hi - k_lo + 1) as usize;
    let mut dense = vec![0.0f64; len];
    for (&k, &n) in hist.counts() {
        dense[(k - k_lo) as usize] = n as f64;
    }
    // Truncated-window moving average: edges average over what is in range.
    let half = window / 2;
    let smoothed: Vec<f64> = (0..len)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(len - 1);
            dense[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect();

    let threshold = 2 * m as u64;
    let mut peak_idx: Option<usize> = None;
    for i in 1..len.saturating_sub(1) {
        let k = k_lo + i as u64;
        if k <= threshold {
            continue;
        }
        if smoothed[i] >= smoothed[i - 1]
            && smoothed[i] >= smoothed[i + 1]
            && (smoothed[i] > smoothed[i - 1] || smoothed[i] > smoothed[i + 1])
            && peak_idx.is_none_or(|best| smoothed[i] > smoothed[best])
        {
            peak_idx = Some(i);
        }
    }
    let Some(peak_idx) = peak_idx else {
        return Ok(None);
    };

    // Low-degree mode: the highest smoothed point at or below 2m.
    let low_limit = threshold.saturating_sub(k_lo).min(len as u64 - 1) as usize;
    let Some(low_idx) = (0..=low_limit.min(peak_idx.saturating_sub(1)))
        .filter(|&i| k_lo + i as u64 <= threshold)
        .max_by(|&a, &b| smoothed[a].total_cmp(&smoothed[b]))
    else {
        return Ok(None);
    };
    if peak_idx <= low_idx + 1 {
        return Ok(None);
    }
    let valley = smoothed[low_idx + 1..peak_idx]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let depth = smoothed[peak_idx].min(smoothed[low_idx]) - valley;
    let noise = valley.max(1.0).sqrt();
    if depth > 3.0 * noise {
        Ok(Some(Peak {
            degree: k_lo + peak_idx as u64,
            height: smoothed[peak_idx],
            valley_depth: depth,
        }))
    } else {
        Ok(None)
    }
}

/// Chi-square goodness-of-fit report.
#[derive(Debug, Clone, Serialize)]
pub struct GofReport {
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
}

/// Pearson chi-square test of observed counts against cell probabilities.
///
/// Cells with expected count below `min_expected` are pooled into a single
/// cell before computing the statistic. Requires the probabilities to sum
/// to one (within 1e-6) and at least two effective cells.
pub fn chi_square_gof(observed: &[u64], probs: &[f64], min_expected: f64) -> Result<GofReport> {
    if observed.len() != probs.len() {
        return Err(Error::invalid("probs", "length mismatch with observed"));
    }
    let total_prob: f64 = probs.iter().sum();
    if (total_prob - 1.0).abs() > 1e-6 {
        return Err(Error::invalid("probs", format!("must sum to 1, got {total_prob}")));
    }
    let n: u64 = observed.iter().sum();
    if n == 0 {
        return Err(Error::EmptyHistogram);
    }
    let nf = n as f64;
    let mut statistic = 0.0;
    let mut cells = 0u64;
    let mut pooled_obs = 0u64;
    let mut pooled_exp = 0.0;
    for (&obs, &p) in observed.iter().zip(probs.iter()) {
        let expected = nf * p;
        if expected < min_expected {
            pooled_obs += obs;
            pooled_exp += expected;
        } else {
            let diff = obs as f64 - expected;
            statistic += diff * diff / expected;
            cells += 1;
        }
    }
    if pooled_exp > 0.0 {
        let diff = pooled_obs as f64 - pooled_exp;
        statistic += diff * diff / pooled_exp;
        cells += 1;
    }
    if cells < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: cells as usize,
        });
    }
    let dof = cells - 1;
    let chi = ChiSquared::new(dof as f64).expect("dof >= 1");
    Ok(GofReport {
        statistic,
        dof,
        p_value: 1.0 - chi.cdf(statistic),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{grow, GraphState};
    use crate::params::{ModelParams, Variant};
    use crate::seed::replica_rng;
    use crate::theory::limit_law_table;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn histogram_trivial_cases() {
        let state = GraphState::init(&ModelParams::new(2, 0.0, Variant::PaApa, 1, 0)).unwrap();
        let hist = histogram(&state);
        assert_eq!(hist.count(4), 1);
        assert_eq!(hist.total_vertices(), 1);

        let mut state = GraphState::init(&ModelParams::new(1, 0.0, Variant::PaApa, 2, 0)).unwrap();
        state.step(0.0, Variant::PaApa, &mut replica_rng(0, 0));
        let hist = histogram(&state);
        assert_eq!(hist.count(3), 1);
        assert_eq!(hist.count(1), 1);
    }

    #[test]
    fn histogram_identities_and_merge() {
        let params = ModelParams::new(2, 0.5, Variant::PaApa, 200, 3);
        let mut merged = DegreeHistogram::default();
        for replica in 0..4u64 {
            let state = grow(&params, &mut replica_rng(params.seed, replica)).unwrap();
            let hist = histogram(&state);
            assert_eq!(hist.total_vertices(), 200);
            assert_eq!(hist.degree_sum(), 2 * 2 * 200);
            merged.merge(&hist);
        }
        assert_eq!(merged.total_vertices(), 4 * 200);
        assert_eq!(merged.degree_sum(), 4 * 2 * 2 * 200);
    }

    #[test]
    fn star_multigraph_is_perfectly_disassortative() {
        // Hub = vertex 1 with n leaves; classical r = -1.
        let n = 12u32;
        let edges: Vec<EdgeRecord> = (2..=n + 1)
            .map(|leaf| EdgeRecord {
                step: leaf as u64,
                source: leaf,
                target: 1,
            })
            .collect();
        let mut degrees = vec![1u32; n as usize + 1];
        degrees[0] = n;
        assert_relative_eq!(assortativity(edges, &degrees).unwrap(), -1.0);
    }

    #[test]
    fn assortativity_skips_self_loops_and_detects_degenerate_input() {
        // Self-loops contribute nothing; an all-loop stream is degenerate.
        let loops: Vec<EdgeRecord> =
            (0..3).map(|_| EdgeRecord { step: 1, source: 1, target: 1 }).collect();
        let degrees = vec![6u32];
        assert!(matches!(assortativity(loops, &degrees), Err(Error::AssortativityUndefined)));

        // Equal endpoint degrees everywhere: denominator zero.
        let edges = vec![
            EdgeRecord { step: 2, source: 2, target: 1 },
            EdgeRecord { step: 3, source: 3, target: 1 },
        ];
        let degrees = vec![2u32, 2, 2];
        assert!(matches!(assortativity(edges, &degrees), Err(Error::AssortativityUndefined)));
    }

    #[test]
    fn assortativity_is_bounded_when_defined() {
        for seed in 0..5u64 {
            let params = ModelParams::new(3, 0.6, Variant::PaApa2, 300, seed);
            let state = grow(&params, &mut replica_rng(seed, 0)).unwrap();
            let r = assortativity_of(&state).unwrap();
            assert!((-1.0..=1.0).contains(&r), "r = {r}");
        }
    }

    #[test]
    fn tail_fit_recovers_exact_power_law() {
        // Counts built by differencing an exact CCDF ~ k^-2 (with a closing
        // cell holding the leftover mass so the telescoping stays exact), so
        // the pdf exponent is exactly -3.
        let scale = 1e12;
        let mut counts = BTreeMap::new();
        for k in 10u64..=300 {
            let c = scale * ((k as f64).powi(-2) - ((k + 1) as f64).powi(-2));
            counts.insert(k, c.round() as u64);
        }
        counts.insert(301, (scale * 301f64.powi(-2)).round() as u64);
        let hist = DegreeHistogram::from_counts(counts);
        let report = tail_fit(&hist, 10, 100).unwrap();
        assert!(
            (report.pdf_exponent() + 3.0).abs() <= 0.05,
            "exponent {}",
            report.pdf_exponent()
        );
        assert!(report.residual_rms < 0.05);
    }

    #[test]
    fn tail_fit_flags_geometric_input() {
        // Sampled-free geometric counts: ln CCDF is linear in k, not ln k,
        // so the log-log fit shows strong curvature.
        let mut counts = BTreeMap::new();
        for k in 2u64..=120 {
            counts.insert(k, (1e12 * 0.5f64.powi(k as i32)) as u64);
        }
        let hist = DegreeHistogram::from_counts(counts);
        let report = tail_fit(&hist, 2, 10).unwrap();
        assert!(report.residual_rms > 0.5, "rms {}", report.residual_rms);
    }

    #[test]
    fn tail_fit_needs_three_points() {
        let mut counts = BTreeMap::new();
        counts.insert(5u64, 100u64);
        counts.insert(6, 50);
        let hist = DegreeHistogram::from_counts(counts);
        assert!(matches!(
            tail_fit(&hist, 1, 1),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn tv_distance_extremes() {
        let mut counts = BTreeMap::new();
        counts.insert(2u64, 50u64);
        counts.insert(3, 50);
        let hist = DegreeHistogram::from_counts(counts);

        let identical = TruncatedLaw {
            probs: BTreeMap::from([(2u64, 0.5), (3, 0.5)]),
            truncated_mass: 0.0,
        };
        assert_relative_eq!(tv_distance(&hist, &identical).unwrap(), 0.0);

        let disjoint = TruncatedLaw {
            probs: BTreeMap::from([(10u64, 1.0)]),
            truncated_mass: 0.0,
        };
        assert_relative_eq!(tv_distance(&hist, &disjoint).unwrap(), 1.0);
        assert!(tv_distance(&DegreeHistogram::default(), &identical).is_err());
    }

    #[test]
    fn growth_regression_constant_trajectory_has_zero_slope() {
        let points: Vec<(f64, f64)> = (1..=20).map(|t| (t as f64 * 100.0, 7.5)).collect();
        let report = growth_regression(&points, GrowthMode::Sqrt).unwrap();
        assert_relative_eq!(report.slope, 0.0);
        assert_relative_eq!(report.residual_rms, 0.0);
        assert!(growth_regression(&points[..5], GrowthMode::Log).is_err());
    }

    #[test]
    fn detect_peak_rejects_monotone_and_finds_separated_mode() {
        // Geometric-like: monotone decreasing, no peak.
        let mut counts = BTreeMap::new();
        for k in 2u64..=60 {
            counts.insert(k, (1e6 * 0.8f64.powi(k as i32)) as u64);
        }
        let hist = DegreeHistogram::from_counts(counts);
        assert!(detect_peak(&hist, 1, 5).unwrap().is_none());

        // Bimodal: low mode at k=3, deep valley, high mode at k=30 > 2m.
        let mut counts = BTreeMap::new();
        for k in 2u64..=50 {
            let low = 4000.0 * (-((k as f64 - 3.0) / 2.0).powi(2)).exp();
            let high = 2500.0 * (-((k as f64 - 30.0) / 4.0).powi(2)).exp();
            counts.insert(k, (low + high) as u64);
        }
        let hist = DegreeHistogram::from_counts(counts);
        let peak = detect_peak(&hist, 1, 5).unwrap().expect("peak");
        assert!((28..=32).contains(&peak.degree), "degree {}", peak.degree);
        assert!(peak.valley_depth > 0.0);
        assert!(detect_peak(&hist, 1, 4).is_err());
        assert!(detect_peak(&hist, 1, 1).is_err());
    }

    #[test]
    fn chi_square_on_exact_multinomial_data() {
        // Observed counts exactly at expectation: statistic 0, p-value 1.
        let probs = [0.25, 0.25, 0.5];
        let observed = [250u64, 250, 500];
        let report = chi_square_gof(&observed, &probs, 5.0).unwrap();
        assert_relative_eq!(report.statistic, 0.0);
        assert_eq!(report.dof, 2);
        assert!(report.p_value > 0.999);
        // Wildly wrong reference: decisive rejection.
        let report = chi_square_gof(&observed, &[0.8, 0.1, 0.1], 5.0).unwrap();
        assert!(report.p_value < 1e-12);
    }

    #[test]
    fn simulated_tv_against_geometric_limit_is_small() {
        let m = 2u32;
        let params = ModelParams::new(m, 1.0, Variant::PaApa, 100_000, 31);
        let state = grow(&params, &mut replica_rng(params.seed, 0)).unwrap();
        let hist = histogram(&state);
        let law = limit_law_table(m, 1.0, 400).unwrap();
        let tv = tv_distance(&hist, &law).unwrap();
        assert!(tv < 0.01, "tv = {tv}");
    }

    proptest! {
        #[test]
        fn tv_is_symmetric_and_triangular(raw in proptest::collection::vec(0u32..100, 3 * 4)) {
            // Build three distributions on the fixed support 0..=3.
            let mut dists = Vec::new();
            for chunk in raw.chunks(4) {
                let total: u32 = chunk.iter().sum::<u32>() + 1;
                let map: BTreeMap<u64, f64> = chunk
                    .iter()
                    .enumerate()
                    .map(|(k, &w)| (k as u64, w as f64 / total as f64))
                    .chain(std::iter::once((4u64, 1.0 / total as f64)))
                    .collect();
                dists.push(map);
            }
            let (a, b, c) = (&dists[0], &dists[1], &dists[2]);
            prop_assert!((tv_between(a, b) - tv_between(b, a)).abs() < 1e-12);
            prop_assert!(tv_between(a, c) <= tv_between(a, b) + tv_between(b, c) + 1e-12);
            prop_assert!(tv_between(a, b) >= 0.0);
        }

        #[test]
        fn histogram_identities_hold_for_random_runs(seed in 0u64..50, m in 1u32..4, p in 0.0f64..=1.0) {
            let params = ModelParams::new(m, p, Variant::PaApa, 50, seed);
            let state = grow(&params, &mut replica_rng(seed, 0)).unwrap();
            let hist = histogram(&state);
            prop_assert_eq!(hist.total_vertices(), 50);
            prop_assert_eq!(hist.degree_sum(), 2 * m as u64 * 50);
        }
    }
}
