//! Goodness-of-fit tests used by the verification suites.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Default significance level.
pub const ALPHA: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    /// Number of cells after merging.
    pub cells: usize,
    /// Fewer than two cells survived merging; no evidence either way.
    pub inconclusive: bool,
}

impl ChiSquareResult {
    pub fn pass(&self, alpha: f64) -> bool {
        self.inconclusive || self.p_value > alpha
    }

    fn inconclusive(cells: usize) -> Self {
        Self {
            statistic: 0.0,
            df: 0,
            p_value: 1.0,
            cells,
            inconclusive: true,
        }
    }
}

fn chi2_sf(statistic: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    let d = ChiSquared::new(df as f64).expect("positive df");
    d.sf(statistic).clamp(0.0, 1.0)
}

/// Groups cells in order of decreasing expected probability (ties by key) until each
/// group's expected count is at least `min_cell`; a short tail is folded into the last group.
fn merge_cells<K: Ord + Clone>(expected: &BTreeMap<K, f64>, total: f64, min_cell: f64) -> Vec<Vec<K>> {
    let mut keys: Vec<(&K, f64)> = expected.iter().map(|(k, &p)| (k, p)).collect();
    keys.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let mut groups: Vec<Vec<K>> = Vec::new();
    let mut current: Vec<K> = Vec::new();
    let mut acc = 0.0;
    for (k, p) in keys {
        current.push(k.clone());
        acc += p * total;
        if acc >= min_cell {
            groups.push(std::mem::take(&mut current));
            acc = 0.0;
        }
    }
    if !current.is_empty() {
        match groups.last_mut() {
            Some(last) => last.extend(current),
            None => groups.push(current),
        }
    }
    groups
}

/// Pearson goodness of fit of observed counts against a probability law. Observed keys
/// missing from `expected` are lumped with the smallest group; any such observation
/// with zero expected mass forces `p = 0`.
pub fn chi_square<K: Ord + Clone>(
    observed: &BTreeMap<K, u64>,
    expected: &BTreeMap<K, f64>,
    min_cell: f64,
) -> ChiSquareResult {
    let total: u64 = observed.values().sum();
    let n = total as f64;
    let stray = observed
        .iter()
        .any(|(k, &c)| c > 0 && expected.get(k).copied().unwrap_or(0.0) <= 0.0);
    if stray {
        return ChiSquareResult {
            statistic: f64::INFINITY,
            df: expected.len().saturating_sub(1),
            p_value: 0.0,
            cells: expected.len(),
            inconclusive: false,
        };
    }
    let positive: BTreeMap<K, f64> = expected
        .iter()
        .filter(|(_, &p)| p > 0.0)
        .map(|(k, &p)| (k.clone(), p))
        .collect();
    let groups = merge_cells(&positive, n, min_cell);
    if groups.len() < 2 {
        return ChiSquareResult::inconclusive(groups.len());
    }
    let mut stat = 0.0;
    for g in &groups {
        let e: f64 = g.iter().map(|k| positive[k]).sum::<f64>() * n;
        let o: u64 = g.iter().map(|k| observed.get(k).copied().unwrap_or(0)).sum();
        let d = o as f64 - e;
        stat += d * d / e;
    }
    let df = groups.len() - 1;
    ChiSquareResult {
        statistic: stat,
        df,
        p_value: chi2_sf(stat, df),
        cells: groups.len(),
        inconclusive: false,
    }
}

/// Two-sample chi-square homogeneity test. Cells are merged by pooled frequency.
pub fn chi_square_two_sample<K: Ord + Clone>(
    a: &BTreeMap<K, u64>,
    b: &BTreeMap<K, u64>,
    min_cell: f64,
) -> ChiSquareResult {
    let na: u64 = a.values().sum();
    let nb: u64 = b.values().sum();
    if na == 0 || nb == 0 {
        return ChiSquareResult::inconclusive(0);
    }
    let mut pooled: BTreeMap<K, f64> = BTreeMap::new();
    for (k, &c) in a.iter().chain(b.iter()) {
        *pooled.entry(k.clone()).or_default() += c as f64;
    }
    let total = (na + nb) as f64;
    for v in pooled.values_mut() {
        *v /= total;
    }
    // the smaller sample governs the expected cell counts
    let groups = merge_cells(&pooled, na.min(nb) as f64, min_cell);
    if groups.len() < 2 {
        return ChiSquareResult::inconclusive(groups.len());
    }
    let mut stat = 0.0;
    for g in &groups {
        let p: f64 = g.iter().map(|k| pooled[k]).sum();
        for (sample, n) in [(a, na), (b, nb)] {
            let o: u64 = g.iter().map(|k| sample.get(k).copied().unwrap_or(0)).sum();
            let e = p * n as f64;
            stat += (o as f64 - e).powi(2) / e;
        }
    }
    let df = groups.len() - 1;
    ChiSquareResult {
        statistic: stat,
        df,
        p_value: chi2_sf(stat, df),
        cells: groups.len(),
        inconclusive: false,
    }
}

pub fn counts<K: Ord, I: IntoIterator<Item = K>>(items: I) -> BTreeMap<K, u64> {
    let mut m = BTreeMap::new();
    for k in items {
        *m.entry(k).or_insert(0) += 1;
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

impl KsResult {
    pub fn pass(&self, alpha: f64) -> bool {
        self.p_value > alpha
    }
}

/// Asymptotic Kolmogorov tail `P(K > x)`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
pub fn ks_test<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> KsResult {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / nf - f).max(f - i as f64 / nf);
    }
    let en = nf.sqrt();
    KsResult {
        statistic: d,
        p_value: kolmogorov_sf((en + 0.12 + 0.11 / en) * d),
        n,
    }
}

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len(), xb.len());
    if na == 0 || nb == 0 {
        return KsResult {
            statistic: 0.0,
            p_value: 1.0,
            n: na.min(nb),
        };
    }
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = if xa[i] <= xb[j] { xa[i] } else { xb[j] };
        while i < na && xa[i] <= x {
            i += 1;
        }
        while j < nb && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let ne = (na * nb) as f64 / (na + nb) as f64;
    let en = ne.sqrt();
    KsResult {
        statistic: d,
        p_value: kolmogorov_sf((en + 0.12 + 0.11 / en) * d),
        n: na.min(nb),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonCheck {
    pub mean: f64,
    pub var: f64,
    pub target: f64,
    pub reps: usize,
    pub mean_tol: f64,
    pub var_tol: f64,
    pub pass: bool,
    /// `(mean - target) / sqrt(target / reps)`, or 0 when the target is 0.
    pub z: f64,
}

/// Sample mean within 3 standard errors of `target` and sample variance within 5 of them.
pub fn poisson_mean_test(counts: &[u64], target: f64) -> PoissonCheck {
    let reps = counts.len();
    let r = reps as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / r;
    let var = if reps > 1 {
        counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (r - 1.0)
    } else {
        0.0
    };
    let mean_tol = 3.0 * (target / r).sqrt();
    let var_tol = 5.0 * (2.0 * target * target / r + target / r).sqrt();
    let pass = (mean - target).abs() <= mean_tol && (var - target).abs() <= var_tol;
    let z = if target > 0.0 {
        (mean - target) / (target / r).sqrt()
    } else {
        0.0
    };
    PoissonCheck {
        mean,
        var,
        target,
        reps,
        mean_tol,
        var_tol,
        pass,
        z,
    }
}

/// Upper tail of a chi-square distribution with `df` degrees of freedom.
pub fn chi_square_sf(statistic: f64, df: usize) -> f64 {
    chi2_sf(statistic, df)
}

/// Smallest `k` with `P(Binomial(n, p) <= k) >= level`.
pub fn binomial_quantile(n: u64, p: f64, level: f64) -> u64 {
    use statrs::distribution::{Binomial, DiscreteCDF};
    let b = Binomial::new(p, n).expect("valid binomial");
    (0..=n).find(|&k| b.cdf(k) >= level).unwrap_or(n)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    use crate::config::RngStream;

    #[test]
    fn kolmogorov_tail_values() {
        assert!((kolmogorov_sf(1.3581) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_sf(1.9495) - 0.001).abs() < 1e-4);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
    }

    #[test]
    fn chi_square_fair_die() {
        let mut rng = RngStream::new(3, 0).rng();
        let obs = counts((0..60_000).map(|_| rng.random_range(0..6u8)));
        let exp: BTreeMap<u8, f64> = (0..6).map(|k| (k, 1.0 / 6.0)).collect();
        let r = chi_square(&obs, &exp, 5.0);
        assert_eq!(r.df, 5);
        assert!(r.pass(ALPHA), "{r:?}");
        let biased: BTreeMap<u8, f64> = (0..6).map(|k| (k, if k == 0 { 0.2 } else { 0.16 })).collect();
        assert!(!chi_square(&obs, &biased, 5.0).pass(ALPHA));
    }

    #[test]
    fn chi_square_stray_observation_fails() {
        let obs = counts([0u8, 1, 2]);
        let exp: BTreeMap<u8, f64> = [(0, 0.5), (1, 0.5)].into_iter().collect();
        assert_eq!(chi_square(&obs, &exp, 1.0).p_value, 0.0);
    }

    #[test]
    fn chi_square_merges_small_cells() {
        let exp: BTreeMap<u8, f64> = [(0, 0.97), (1, 0.01), (2, 0.01), (3, 0.01)].into_iter().collect();
        let obs = counts(std::iter::repeat_n(0u8, 100));
        let r = chi_square(&obs, &exp, 5.0);
        assert!(r.inconclusive);
    }

    #[test]
    fn two_sample_chi_square() {
        let mut rng = RngStream::new(5, 0).rng();
        let a = counts((0..20_000).map(|_| rng.random_range(0..4u8)));
        let b = counts((0..20_000).map(|_| rng.random_range(0..4u8)));
        assert!(chi_square_two_sample(&a, &b, 5.0).pass(ALPHA));
        let c = counts((0..20_000).map(|_| rng.random_range(0..4u8).min(2)));
        assert!(!chi_square_two_sample(&a, &c, 5.0).pass(ALPHA));
    }

    #[test]
    fn ks_uniform() {
        let mut rng = RngStream::new(6, 0).rng();
        let xs: Vec<f64> = (0..5000).map(|_| rng.random::<f64>()).collect();
        assert!(ks_test(&xs, |x| x.clamp(0.0, 1.0)).pass(ALPHA));
        assert!(!ks_test(&xs, |x| x.clamp(0.0, 1.0).powi(2)).pass(ALPHA));
        let ys: Vec<f64> = (0..5000).map(|_| rng.random::<f64>()).collect();
        assert!(ks_two_sample(&xs, &ys).pass(ALPHA));
        let zs: Vec<f64> = ys.iter().map(|y| y * y).collect();
        assert!(!ks_two_sample(&xs, &zs).pass(ALPHA));
    }

    #[test]
    fn poisson_check() {
        use rand_distr::{Distribution, Poisson};
        let mut rng = RngStream::new(7, 0).rng();
        let d = Poisson::new(2.5).unwrap();
        let c: Vec<u64> = (0..20_000).map(|_| d.sample(&mut rng) as u64).collect();
        assert!(poisson_mean_test(&c, 2.5).pass);
        assert!(!poisson_mean_test(&c, 2.8).pass);
    }

    #[test]
    fn binomial_quantile_small() {
        assert_eq!(binomial_quantile(10, 0.0, 0.999), 0);
        assert!(binomial_quantile(300, 0.0027, 0.999) >= 3);
    }
}
