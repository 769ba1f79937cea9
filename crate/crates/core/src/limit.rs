//! Limit objects of the near-critical regime: the jump process `V^c`, the drifted Brownian
//! path `W^{kappa, t - tau, c}` and its reflection, excursion lengths with Poisson marks,
//! and convergence experiments from finite configurations.

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{neumaier_sum, sample_clocks, RankedConfig, RngStream, StreamPurpose, WeightedConfig};
use crate::error::{Error, Result};
use crate::stats::{ks_two_sample, KsResult};
use crate::walk::{decompose, excursion_area, WalkPath};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitParams {
    pub kappa: f64,
    pub tau: f64,
    pub t: f64,
    /// Truncation of a nonincreasing nonnegative sequence.
    #[serde(default)]
    pub c: Vec<f64>,
}

impl LimitParams {
    pub fn standard(t: f64) -> Self {
        Self {
            kappa: 1.0,
            tau: 0.0,
            t,
            c: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(Error::InvalidLimitParams(format!("kappa = {}", self.kappa)));
        }
        if !self.tau.is_finite() || !self.t.is_finite() {
            return Err(Error::InvalidLimitParams("tau and t must be finite".into()));
        }
        if self.c.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::InvalidLimitParams("c entries must be finite and nonnegative".into()));
        }
        if self.c.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidLimitParams("c must be nonincreasing".into()));
        }
        if self.kappa == 0.0 && self.c.is_empty() {
            return Err(Error::InvalidLimitParams("kappa = 0 needs a nonempty c".into()));
        }
        Ok(())
    }

    /// With `kappa = 0` the parameter space requires `c` outside `l^2`, which no finite
    /// truncation is; such runs are approximations.
    pub fn is_approximation(&self) -> bool {
        self.kappa == 0.0
    }

    /// `sum c_j^3`, the cubic mass of the truncation.
    pub fn cubic_mass(&self) -> f64 {
        neumaier_sum(self.c.iter().map(|c| c * c * c))
    }

    /// Default horizon `4 (|t| + |tau| + 1) / kappa`; `None` when `kappa = 0`.
    pub fn default_horizon(&self) -> Option<f64> {
        (self.kappa > 0.0).then(|| 4.0 * (self.t.abs() + self.tau.abs() + 1.0) / self.kappa)
    }
}

/// `V^c(s) = sum_j (c_j 1{xi'_j <= s} - c_j^2 s)` with `xi'_j ~ Exp(c_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VcPath {
    pub c: Vec<f64>,
    /// `xi'_j`, infinite when `c_j = 0`.
    pub jump_times: Vec<f64>,
}

impl VcPath {
    pub fn drift(&self) -> f64 {
        neumaier_sum(self.c.iter().map(|c| c * c))
    }

    pub fn eval(&self, s: f64) -> f64 {
        let jumps = neumaier_sum(
            self.c
                .iter()
                .zip(&self.jump_times)
                .filter(|(_, &u)| u <= s)
                .map(|(&c, _)| c),
        );
        jumps - self.drift() * s
    }

    /// `E V^c(s) = sum_j c_j (1 - e^{-c_j s}) - c_j^2 s`.
    pub fn mean(c: &[f64], s: f64) -> f64 {
        neumaier_sum(c.iter().map(|&c| -c * (-c * s).exp_m1() - c * c * s))
    }

    /// Jumps inside `[0, horizon]`, sorted by time: `(time, size)`.
    pub fn jumps_before(&self, horizon: f64) -> Vec<(f64, f64)> {
        let mut j: Vec<(f64, f64)> = self
            .jump_times
            .iter()
            .zip(&self.c)
            .filter(|(&u, _)| u <= horizon)
            .map(|(&u, &c)| (u, c))
            .collect();
        j.sort_by(|a, b| a.0.total_cmp(&b.0));
        j
    }
}

pub fn sample_vc<R: Rng + ?Sized>(c: &[f64], rng: &mut R) -> VcPath {
    let jump_times = c
        .iter()
        .map(|&cj| {
            if cj > 0.0 {
                Exp::new(cj).expect("positive rate").sample(rng)
            } else {
                f64::INFINITY
            }
        })
        .collect();
    VcPath {
        c: c.to_vec(),
        jump_times,
    }
}

/// Values of `W` and `B` at the grid points `0, h, 2h, ...` up to the horizon, with every
/// jump of `V^c` inserted as two points at the same time (left value first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPath {
    pub h: f64,
    pub horizon: f64,
    pub kappa: f64,
    pub s: Vec<f64>,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl GridPath {
    /// Reflect given `W` values; `s` must be nondecreasing with `s[0] = 0`.
    pub fn from_w(h: f64, kappa: f64, s: Vec<f64>, w: Vec<f64>) -> Self {
        let mut b = Vec::with_capacity(w.len());
        let mut min = 0.0f64;
        for &v in &w {
            min = min.min(v);
            b.push(v - min);
        }
        let horizon = s.last().copied().unwrap_or(0.0);
        Self {
            h,
            horizon,
            kappa,
            s,
            w,
            b,
        }
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Closing tolerance `10 sqrt(kappa h)`.
    pub fn epsilon(&self) -> f64 {
        10.0 * (self.kappa * self.h).sqrt()
    }
}

fn grid_times(h: f64, horizon: f64) -> Vec<f64> {
    let steps = (horizon / h).ceil() as usize;
    (0..=steps).map(|i| (i as f64 * h).min(horizon)).collect()
}

fn check_grid(h: f64, horizon: f64) -> Result<()> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidLimitParams(format!("h = {h}")));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::InvalidLimitParams(format!("horizon = {horizon}")));
    }
    Ok(())
}

/// Build `W` on the merged time points from Brownian values at those points.
fn assemble(params: &LimitParams, vc: &VcPath, h: f64, horizon: f64, times: &[f64], bm: &[f64]) -> GridPath {
    let jumps = vc.jumps_before(horizon);
    let drift = vc.drift();
    let lin = params.t - params.tau;
    let mut s = Vec::with_capacity(times.len() + 2 * jumps.len());
    let mut w = Vec::with_capacity(s.capacity());
    let mut jumped = 0.0;
    let mut next = 0;
    let base = |u: f64, bmv: f64| params.kappa.sqrt() * bmv + lin * u - 0.5 * params.kappa * u * u - drift * u;
    for (&u, &bmv) in times.iter().zip(bm) {
        while next < jumps.len() && jumps[next].0 <= u {
            let (ju, c) = jumps[next];
            if ju == u {
                s.push(u);
                w.push(base(u, bmv) + jumped);
            }
            jumped += c;
            next += 1;
        }
        s.push(u);
        w.push(base(u, bmv) + jumped);
    }
    GridPath::from_w(h, params.kappa, s, w)
}

/// Time points: the grid merged with the jump times of `V^c` before the horizon.
fn merged_times(vc: &VcPath, h: f64, horizon: f64) -> Vec<f64> {
    let mut times = grid_times(h, horizon);
    times.extend(vc.jumps_before(horizon).iter().map(|j| j.0));
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
}

fn brownian_at<R: Rng + ?Sized>(times: &[f64], rng: &mut R) -> Vec<f64> {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut out = Vec::with_capacity(times.len());
    let mut prev = 0.0;
    let mut v = 0.0;
    for &u in times {
        let dt = u - prev;
        if dt > 0.0 {
            v += dt.sqrt() * normal.sample(rng);
        }
        out.push(v);
        prev = u;
    }
    out
}

/// Sample `W^{kappa, t - tau, c}` on a grid of step `h` up to `horizon`, and reflect it.
pub fn sample_limit_path<R: Rng + ?Sized>(params: &LimitParams, rng: &mut R, h: f64, horizon: f64) -> Result<GridPath> {
    params.validate()?;
    check_grid(h, horizon)?;
    let vc = sample_vc(&params.c, rng);
    let times = merged_times(&vc, h, horizon);
    let bm = brownian_at(&times, rng);
    Ok(assemble(params, &vc, h, horizon, &times, &bm))
}

/// The same Brownian driver and jumps observed on grids of step `h` and `h / 2`.
pub fn sample_limit_pair<R: Rng + ?Sized>(
    params: &LimitParams,
    rng: &mut R,
    h: f64,
    horizon: f64,
) -> Result<(GridPath, GridPath)> {
    params.validate()?;
    check_grid(h, horizon)?;
    let vc = sample_vc(&params.c, rng);
    let fine_times = merged_times(&vc, h / 2.0, horizon);
    let fine_bm = brownian_at(&fine_times, rng);
    let coarse_times = merged_times(&vc, h, horizon);
    let coarse_bm: Vec<f64> = coarse_times
        .iter()
        .map(|u| {
            let i = fine_times.partition_point(|v| v < u);
            fine_bm[i]
        })
        .collect();
    Ok((
        assemble(params, &vc, h, horizon, &coarse_times, &coarse_bm),
        assemble(params, &vc, h / 2.0, horizon, &fine_times, &fine_bm),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitExcursion {
    pub start: f64,
    pub end: f64,
    pub area: f64,
}

impl LimitExcursion {
    pub fn length(&self) -> f64 {
        self.end - self.start
    }
}

/// Excursions of `B` away from 0. An excursion opens at the last zero before `B` turns
/// positive and closes at a later zero only if `B` stays at most `eps` over the next step.
/// An excursion still open at the horizon is dropped; the second value counts those.
pub fn excursions_with_eps(path: &GridPath, eps: f64) -> (Vec<LimitExcursion>, usize) {
    let b = &path.b;
    let s = &path.s;
    let mut out = Vec::new();
    let mut last_zero = 0usize;
    let mut open: Option<usize> = None;
    for i in 0..b.len() {
        if b[i] > 0.0 {
            if open.is_none() {
                open = Some(last_zero);
            }
            continue;
        }
        if let Some(st) = open {
            if i + 1 >= b.len() || b[i + 1] <= eps {
                let area = neumaier_sum((st..i).map(|k| 0.5 * (b[k] + b[k + 1]) * (s[k + 1] - s[k])));
                out.push(LimitExcursion {
                    start: s[st],
                    end: s[i],
                    area,
                });
                open = None;
            }
        }
        last_zero = i;
    }
    (out, usize::from(open.is_some()))
}

pub fn excursions(path: &GridPath) -> Vec<LimitExcursion> {
    excursions_with_eps(path, path.epsilon()).0
}

/// Ordered excursion lengths and aligned mark counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcursionMarks {
    /// Nonincreasing.
    pub lengths: Vec<f64>,
    pub marks: Vec<u64>,
    pub areas: Vec<f64>,
}

/// Marks of an excursion are `Poisson(area)`, i.e. the points of a unit-rate planar Poisson
/// process under it. Results are sorted by length, marks carried along.
pub fn marks_for<R: Rng + ?Sized>(excs: &[LimitExcursion], rng: &mut R) -> ExcursionMarks {
    let mut rows: Vec<(f64, u64, f64)> = excs
        .iter()
        .map(|e| {
            let m = if e.area > 0.0 {
                Poisson::new(e.area).expect("positive area").sample(rng) as u64
            } else {
                0
            };
            (e.length(), m, e.area)
        })
        .collect();
    rows.sort_by(|a, b| b.0.total_cmp(&a.0));
    ExcursionMarks {
        lengths: rows.iter().map(|r| r.0).collect(),
        marks: rows.iter().map(|r| r.1).collect(),
        areas: rows.iter().map(|r| r.2).collect(),
    }
}

pub fn excursions_and_marks<R: Rng + ?Sized>(path: &GridPath, rng: &mut R) -> ExcursionMarks {
    marks_for(&excursions(path), rng)
}

/// `sigma_2`, `sigma_3 / sigma_2^3`, `x_j / sigma_2` against their limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub sigma2: f64,
    pub sigma3_ratio: f64,
    pub sigma3_target: f64,
    /// `x_j / sigma_2` for `j <= max(len(c), 1)`, masses sorted decreasingly.
    pub leading_ratios: Vec<f64>,
    pub warnings: Vec<String>,
}

pub fn check_hypotheses(config: &WeightedConfig, params: &LimitParams, tol: f64) -> Result<HypothesisCheck> {
    let s2 = config.sigma(2)?;
    let s3 = config.sigma(3)?;
    let ratio = s3 / (s2 * s2 * s2);
    let target = params.kappa + params.cubic_mass();
    let mut xs = config.masses().to_vec();
    xs.sort_by(|a, b| b.total_cmp(a));
    let k = params.c.len().max(1);
    let leading: Vec<f64> = xs.iter().take(k).map(|x| x / s2).collect();
    let mut warnings = Vec::new();
    if (ratio - target).abs() > tol * target.max(1.0) {
        warnings.push(format!("sigma3/sigma2^3 = {ratio} vs {target}"));
    }
    for (j, r) in leading.iter().enumerate() {
        let cj = params.c.get(j).copied().unwrap_or(0.0);
        if (r - cj).abs() > tol.max(s2.cbrt()) {
            warnings.push(format!("x_{}/sigma2 = {r} vs c = {cj}", j + 1));
        }
    }
    if s2 > tol {
        warnings.push(format!("sigma2 = {s2} not small"));
    }
    Ok(HypothesisCheck {
        sigma2: s2,
        sigma3_ratio: ratio,
        sigma3_target: target,
        leading_ratios: leading,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub n_values: Vec<usize>,
    pub t: f64,
    pub reps: usize,
    pub seed: u64,
    pub h: f64,
    /// Defaults to the limit's default horizon.
    pub horizon: Option<f64>,
}

impl ScalingConfig {
    pub fn standard(n_values: Vec<usize>, t: f64, reps: usize, seed: u64) -> Self {
        Self {
            n_values,
            t,
            reps,
            seed,
            h: 1e-3,
            horizon: None,
        }
    }
}

/// One replicate of the largest two components and the surplus of the largest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopComponents {
    pub largest: f64,
    pub second: f64,
    pub surplus: u64,
    pub second_surplus: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub q: f64,
    pub hypotheses: HypothesisCheck,
    pub mean_largest: f64,
    pub mean_second: f64,
    pub mean_surplus: f64,
    pub ks_largest: KsResult,
    pub ks_second: KsResult,
    pub ks_surplus: KsResult,
    pub samples: Vec<TopComponents>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub config: ScalingConfig,
    pub params: LimitParams,
    pub horizon: f64,
    pub limit_mean_largest: f64,
    pub limit_truncated: usize,
    /// Mean largest excursion length with the closing tolerance scaled by 0.5, 1 and 2.
    pub epsilon_sensitivity: Vec<(f64, f64)>,
    pub limit_samples: Vec<TopComponents>,
    pub rows: Vec<ScalingRow>,
    pub warnings: Vec<String>,
}

impl ScalingReport {
    /// Whether the largest-component KS distance strictly decreases along `n_values`.
    pub fn ks_decreasing(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].ks_largest.statistic < w[0].ks_largest.statistic)
    }
}

/// Indices of the largest and second-largest entries; ties go to the earlier index.
fn top_two(values: &[f64]) -> (Option<usize>, Option<usize>) {
    let mut a: Option<usize> = None;
    let mut b: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if a.is_none_or(|k| v > values[k]) {
            b = a;
            a = Some(i);
        } else if b.is_none_or(|k| v > values[k]) {
            b = Some(i);
        }
    }
    (a, b)
}

/// Largest two component masses at `q` and a multigraph surplus count for the largest.
/// Given the walk, the surplus count of a component is Poisson with mean `q` times the
/// area under its excursion.
pub fn finite_top_components<R: Rng + ?Sized>(
    config: &WeightedConfig,
    q: f64,
    clock_stream: RngStream,
    marks: &mut R,
) -> Result<TopComponents> {
    let clocks = sample_clocks(config, clock_stream);
    let rc = RankedConfig::new(config, &clocks);
    let path = WalkPath::new(&rc, q)?;
    let dec = decompose(&path);
    let masses: Vec<f64> = dec.excursions.iter().map(|e| rc.block_mass(e.first, e.last)).collect();
    let (first, second) = top_two(&masses);
    let mut count = |i: Option<usize>| match i {
        Some(i) => {
            let mean = q * excursion_area(&path, &dec.excursions[i]);
            if mean > 0.0 {
                Poisson::new(mean).expect("positive mean").sample(marks) as u64
            } else {
                0
            }
        }
        None => 0,
    };
    let surplus = count(first);
    let second_surplus = count(second);
    Ok(TopComponents {
        largest: first.map_or(0.0, |i| masses[i]),
        second: second.map_or(0.0, |i| masses[i]),
        surplus,
        second_surplus,
    })
}

/// Limit counterpart of [`finite_top_components`] from one reflected path.
pub fn limit_top_components<R: Rng + ?Sized>(path: &GridPath, marks: &mut R) -> (TopComponents, usize) {
    let (excs, truncated) = excursions_with_eps(path, path.epsilon());
    let m = marks_for(&excs, marks);
    (
        TopComponents {
            largest: m.lengths.first().copied().unwrap_or(0.0),
            second: m.lengths.get(1).copied().unwrap_or(0.0),
            surplus: m.marks.first().copied().unwrap_or(0),
            second_surplus: m.marks.get(1).copied().unwrap_or(0),
        },
        truncated,
    )
}

fn batch_stream(seed: u64, purpose: StreamPurpose, batch: u64, rep: usize) -> RngStream {
    RngStream::for_purpose(seed, purpose, (batch << 32) | rep as u64)
}

/// Compare the largest components of the standard sequence `x_i = n^{-2/3}` at
/// `q_n = t + n^{1/3}` with the excursions of the standard limit path.
pub fn scaling_experiment(cfg: &ScalingConfig) -> Result<ScalingReport> {
    let params = LimitParams::standard(cfg.t);
    let horizon = cfg.horizon.or(params.default_horizon()).expect("kappa = 1");
    let limit: Vec<(TopComponents, usize, [f64; 3])> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| {
            let mut driver = batch_stream(cfg.seed, StreamPurpose::LimitDriver, 0, rep).rng();
            let mut marks = batch_stream(cfg.seed, StreamPurpose::LimitMarks, 0, rep).rng();
            let path = sample_limit_path(&params, &mut driver, cfg.h, horizon).expect("valid params");
            let (top, truncated) = limit_top_components(&path, &mut marks);
            let eps = path.epsilon();
            let sens = [0.5, 1.0, 2.0].map(|f| {
                let (e, _) = excursions_with_eps(&path, f * eps);
                e.iter().map(LimitExcursion::length).fold(0.0, f64::max)
            });
            (top, truncated, sens)
        })
        .collect();
    let limit_samples: Vec<TopComponents> = limit.iter().map(|l| l.0).collect();
    let limit_truncated = limit.iter().map(|l| l.1).sum();
    let epsilon_sensitivity = [0.5, 1.0, 2.0]
        .iter()
        .enumerate()
        .map(|(k, &f)| (f, crate::stats::mean(&limit.iter().map(|l| l.2[k]).collect::<Vec<_>>())))
        .collect();
    let lim_largest: Vec<f64> = limit_samples.iter().map(|s| s.largest).collect();
    let lim_second: Vec<f64> = limit_samples.iter().map(|s| s.second).collect();
    let lim_surplus: Vec<f64> = limit_samples.iter().map(|s| s.surplus as f64).collect();

    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for (ni, &n) in cfg.n_values.iter().enumerate() {
        let config = WeightedConfig::critical_uniform(n)?;
        let q = cfg.t + 1.0 / config.sigma(2)?;
        if q <= 0.0 {
            return Err(Error::InvalidTime(q));
        }
        let hypotheses = check_hypotheses(&config, &params, 0.5)?;
        warnings.extend(hypotheses.warnings.iter().map(|w| format!("n = {n}: {w}")));
        let batch = ni as u64 + 1;
        let samples: Vec<TopComponents> = (0..cfg.reps)
            .into_par_iter()
            .map(|rep| {
                let mut marks = batch_stream(cfg.seed, StreamPurpose::StaticSurplus, batch, rep).rng();
                finite_top_components(&config, q, batch_stream(cfg.seed, StreamPurpose::Clocks, batch, rep), &mut marks)
                    .expect("valid q")
            })
            .collect();
        let largest: Vec<f64> = samples.iter().map(|s| s.largest).collect();
        let second: Vec<f64> = samples.iter().map(|s| s.second).collect();
        let surplus: Vec<f64> = samples.iter().map(|s| s.surplus as f64).collect();
        rows.push(ScalingRow {
            n,
            q,
            hypotheses,
            mean_largest: crate::stats::mean(&largest),
            mean_second: crate::stats::mean(&second),
            mean_surplus: crate::stats::mean(&surplus),
            ks_largest: ks_two_sample(&largest, &lim_largest),
            ks_second: ks_two_sample(&second, &lim_second),
            ks_surplus: ks_two_sample(&surplus, &lim_surplus),
            samples,
        });
    }
    Ok(ScalingReport {
        config: cfg.clone(),
        horizon,
        limit_mean_largest: crate::stats::mean(&lim_largest),
        limit_truncated,
        epsilon_sensitivity,
        limit_samples,
        rows,
        warnings,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{chi_square, counts, ALPHA};
    use std::collections::BTreeMap;

    #[test]
    fn empty_c_is_zero() {
        let mut rng = RngStream::new(0, 0).rng();
        let v = sample_vc(&[], &mut rng);
        assert_eq!(v.eval(3.0), 0.0);
    }

    #[test]
    fn conditioned_jump() {
        let v = VcPath {
            c: vec![1.0],
            jump_times: vec![0.5],
        };
        assert_eq!(v.eval(1.0), 0.0);
        assert_eq!(v.eval(0.4), -0.4);
    }

    #[test]
    fn vc_mean_matches_closed_form() {
        let c = [1.0, 0.6, 0.3];
        let s = 0.8;
        let mut rng = RngStream::new(1, 0).rng();
        let reps = 100_000;
        let vals: Vec<f64> = (0..reps).map(|_| sample_vc(&c, &mut rng).eval(s)).collect();
        let m = crate::stats::mean(&vals);
        let var = vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let target = VcPath::mean(&c, s);
        assert!((m - target).abs() <= 3.0 * (var / reps as f64).sqrt(), "{m} vs {target}");
    }

    #[test]
    fn deterministic_line() {
        let p = LimitParams {
            kappa: 0.0,
            tau: 0.0,
            t: -1.0,
            c: vec![0.0],
        };
        let mut rng = RngStream::new(2, 0).rng();
        let g = sample_limit_path(&p, &mut rng, 0.01, 2.0).unwrap();
        assert!(g.b.iter().all(|&b| b == 0.0));
        assert!((g.w[100] + 1.0).abs() < 1e-12);
        assert!(excursions_and_marks(&g, &mut rng).lengths.is_empty());
    }

    #[test]
    fn parabolic_mean() {
        let p = LimitParams::standard(0.0);
        let mut rng = RngStream::new(3, 0).rng();
        let reps = 20_000;
        let vals: Vec<f64> = (0..reps)
            .map(|_| sample_limit_path(&p, &mut rng, 0.05, 1.5).unwrap().w[20])
            .collect();
        let m = crate::stats::mean(&vals);
        // s = 1: mean -1/2, variance 1
        assert!((m + 0.5).abs() <= 3.0 / (reps as f64).sqrt(), "{m}");
    }

    #[test]
    fn reflection_is_nonnegative() {
        let p = LimitParams {
            kappa: 1.0,
            tau: 0.5,
            t: 1.0,
            c: vec![1.0, 0.5],
        };
        let mut rng = RngStream::new(4, 0).rng();
        for _ in 0..50 {
            let g = sample_limit_path(&p, &mut rng, 0.01, 6.0).unwrap();
            assert_eq!(g.b[0], 0.0);
            assert!(g.b.iter().all(|&b| b >= 0.0));
            assert!(g.s.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    fn triangle(area: f64) -> GridPath {
        // rise then fall with slope 1 on a fine grid: height a, area a^2
        let a = area.sqrt();
        let h = 1e-3;
        let s: Vec<f64> = (0..=(2.0 * a / h).round() as usize + 10).map(|i| i as f64 * h).collect();
        let w: Vec<f64> = s.iter().map(|&u| if u <= a { u } else { 2.0 * a - u }).collect();
        GridPath::from_w(h, 1.0, s, w)
    }

    #[test]
    fn marks_on_fixed_triangle() {
        let g = triangle(2.0);
        let ex = excursions(&g);
        assert_eq!(ex.len(), 1);
        assert!((ex[0].area - 2.0).abs() < 1e-3);
        let mut rng = RngStream::new(5, 0).rng();
        let obs = counts((0..50_000).map(|_| excursions_and_marks(&g, &mut rng).marks[0]));
        let lambda = ex[0].area;
        let mut expected = BTreeMap::new();
        let mut p = (-lambda).exp();
        for k in 0..40u64 {
            expected.insert(k, p);
            p *= lambda / (k + 1) as f64;
        }
        assert!(chi_square(&obs, &expected, 5.0).pass(ALPHA));
    }

    #[test]
    fn sorting_keeps_alignment() {
        let excs = vec![
            LimitExcursion { start: 0.0, end: 1.0, area: 0.0 },
            LimitExcursion { start: 1.0, end: 4.0, area: 5.0 },
            LimitExcursion { start: 4.0, end: 6.0, area: 1e-300 },
        ];
        let mut rng = RngStream::new(6, 0).rng();
        let m = marks_for(&excs, &mut rng);
        assert_eq!(m.lengths, vec![3.0, 2.0, 1.0]);
        assert_eq!(m.areas, vec![5.0, 1e-300, 0.0]);
        assert_eq!(m.marks[2], 0);
        let mut rev = excs.clone();
        rev.reverse();
        let m2 = marks_for(&rev, &mut RngStream::new(6, 0).rng());
        assert_eq!(m2.lengths, m.lengths);
        assert_eq!(m2.areas, m.areas);
    }

    #[test]
    fn halving_step_is_stable() {
        let p = LimitParams::standard(0.0);
        let h = 1e-3;
        let mut ok = 0;
        let total = 40;
        for rep in 0..total {
            let mut rng = RngStream::new(7, rep).rng();
            let (coarse, fine) = sample_limit_pair(&p, &mut rng, h, 4.0).unwrap();
            let a = marks_for(&excursions(&coarse), &mut rng).lengths;
            let b = marks_for(&excursions(&fine), &mut rng).lengths;
            if (a[0] - b[0]).abs() < 5.0 * h {
                ok += 1;
            }
        }
        assert!(ok >= total * 9 / 10, "{ok}/{total}");
    }

    #[test]
    fn standard_sequence_hypotheses() {
        let c = WeightedConfig::critical_uniform(1000).unwrap();
        let h = check_hypotheses(&c, &LimitParams::standard(0.0), 0.5).unwrap();
        assert!((h.sigma2 - 0.1).abs() < 1e-12);
        assert!((h.sigma3_ratio - 1.0).abs() < 1e-9);
        assert!(h.warnings.is_empty(), "{:?}", h.warnings);
        let bad = WeightedConfig::new(vec![1.0, 0.1, 0.1]).unwrap();
        assert!(!check_hypotheses(&bad, &LimitParams::standard(0.0), 0.5).unwrap().warnings.is_empty());
    }

    #[test]
    fn small_experiment_runs() {
        let cfg = ScalingConfig {
            n_values: vec![100, 300],
            t: 0.0,
            reps: 50,
            seed: 1,
            h: 0.01,
            horizon: None,
        };
        let r = scaling_experiment(&cfg).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert_eq!(r.horizon, 4.0);
        assert!(r.rows.iter().all(|row| row.samples.len() == 50));
        assert!(r.rows[0].samples.iter().all(|s| s.largest >= s.second));
        assert_eq!(r, scaling_experiment(&cfg).unwrap());
    }
}
