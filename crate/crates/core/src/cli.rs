//! Command-line front end: `simulate`, `forest`, `surplus`, `mosaic`, `verify`, `limit`
//! and `bench`. Exit codes: 0 success, 1 failed verification, 2 usage or input error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::alloc_stats;
use crate::config::{sample_clocks, RankedConfig, RngStream, StreamPurpose, WeightedConfig};
use crate::dynamics::{run_trajectory, Trajectory};
use crate::error::{Error, Result};
use crate::graph::Edge;
use crate::limit::{
    excursions_and_marks, sample_limit_path, scaling_experiment, LimitParams, ScalingConfig,
};
use crate::mosaic::{build_mosaic, orders, render_svg, slice_decomposition};
use crate::oracle::gillespie_trajectory;
use crate::stats::{chi_square_two_sample, counts, ALPHA};
use crate::surplus::{dynamic_surplus, static_graph, SurplusVariant};
use crate::verify::{run_all, run_suite, VerifyOptions};
use crate::walk::sweep;

pub const THREADS_ENV: &str = "MC_MOSAIC_THREADS";

/// Largest `n` the pairwise-clock engine is timed at.
pub const BENCH_GILLESPIE_MAX_N: usize = 10_000;

#[derive(Debug, Parser)]
#[command(name = "mc-mosaic", version, about = "Breadth-first walk simulation of the multiplicative coalescent")]
pub struct Cli {
    /// JSON config: {masses, seed, q | q_max, variant, reps, threads, limit: {kappa, tau, t, c, h, horizon}}
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; falls back to MC_MOSAIC_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct MassArgs {
    /// Comma-separated masses, overriding the config.
    #[arg(long, value_delimiter = ',')]
    pub masses: Option<Vec<f64>>,
    /// Use `n` masses equal to n^{-2/3}.
    #[arg(long, conflicts_with = "masses")]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SurplusMode {
    Static,
    Dynamic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Simple,
    Multigraph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    BfwEvent,
    Gillespie,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Merger events up to q_max as CSV.
    Simulate {
        #[command(flatten)]
        masses: MassArgs,
        #[arg(long)]
        q_max: Option<f64>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The breadth-first forest at q as CSV.
    Forest {
        #[command(flatten)]
        masses: MassArgs,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spanning and surplus edges as CSV.
    Surplus {
        #[command(flatten)]
        masses: MassArgs,
        /// Time for the static construction.
        #[arg(long)]
        q: Option<f64>,
        /// Horizon for the dynamic construction.
        #[arg(long)]
        q_max: Option<f64>,
        #[arg(long, value_enum, default_value = "dynamic")]
        mode: SurplusMode,
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ornamented excursions at q as JSON, optionally an SVG picture.
    Mosaic {
        #[command(flatten)]
        masses: MassArgs,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Shade the jump triangles in the SVG.
        #[arg(long)]
        slices: bool,
    },
    /// Run verification suites and print JSON verdicts.
    Verify {
        /// Suite name or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Limit-path excursions, or a convergence experiment when --n-values is given.
    Limit {
        #[arg(long, value_delimiter = ',')]
        n_values: Option<Vec<usize>>,
        #[arg(long, allow_negative_numbers = true)]
        t: Option<f64>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        horizon: Option<f64>,
        /// Excursions kept per limit path.
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Time the event engine and the pairwise-clock engine.
    Bench {
        #[arg(long, value_enum, default_value = "both")]
        engine: Engine,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitSection {
    pub kappa: Option<f64>,
    pub tau: Option<f64>,
    pub t: Option<f64>,
    pub c: Option<Vec<f64>>,
    pub h: Option<f64>,
    pub horizon: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub masses: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub q: Option<f64>,
    pub q_max: Option<f64>,
    pub variant: Option<SurplusVariant>,
    pub reps: Option<usize>,
    pub threads: Option<usize>,
    pub limit: Option<LimitSection>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

struct Ctx {
    file: FileConfig,
    seed: u64,
}

impl Ctx {
    fn config(&self, m: &MassArgs) -> Result<WeightedConfig> {
        if let Some(n) = m.n {
            return WeightedConfig::critical_uniform(n);
        }
        match m.masses.clone().or_else(|| self.file.masses.clone()) {
            Some(x) => WeightedConfig::new(x),
            None => Err(Error::Usage("no masses: pass --masses, --n or a config with `masses`".into())),
        }
    }

    fn time(&self, flag: Option<f64>, file: Option<f64>, name: &str) -> Result<f64> {
        flag.or(file)
            .ok_or_else(|| Error::Usage(format!("missing --{name} (or `{}` in the config)", name.replace('-', "_"))))
    }

    fn reps(&self, flag: Option<usize>) -> usize {
        flag.or(self.file.reps).unwrap_or(1)
    }

    fn stream(&self, purpose: StreamPurpose, rep: usize) -> RngStream {
        RngStream::for_purpose(self.seed, purpose, rep as u64)
    }

    fn trajectory(&self, config: &WeightedConfig, rep: usize, q_max: f64) -> Result<Trajectory> {
        let clocks = sample_clocks(config, self.stream(StreamPurpose::Clocks, rep));
        let mut rng = self.stream(StreamPurpose::MergeEdges, rep).rng();
        run_trajectory(config, &clocks, &mut rng, q_max)
    }
}

/// Parse `argv` (including the program name) and run; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn threads(flag: Option<usize>, file: Option<usize>) -> Result<Option<usize>> {
    if let Some(t) = flag.or(file) {
        return Ok(Some(t));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

pub fn execute(cli: Cli) -> Result<i32> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    if let Some(t) = threads(cli.threads, file.threads)? {
        if t == 0 {
            return Err(Error::Usage("--threads must be positive".into()));
        }
        // a pool may already exist when called repeatedly in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let seed = cli.seed.or(file.seed).unwrap_or(0);
    let ctx = Ctx { file, seed };
    match cli.command {
        Command::Simulate { masses, q_max, reps, out } => {
            let config = ctx.config(&masses)?;
            let q_max = ctx.time(q_max, ctx.file.q_max, "q-max")?;
            let reps = ctx.reps(reps);
            let runs = (0..reps)
                .into_par_iter()
                .map(|rep| ctx.trajectory(&config, rep, q_max))
                .collect::<Result<Vec<_>>>()?;
            let mut csv = String::from(
                "rep,event,time,left_first,left_last,right_first,right_last,left_mass,right_mass,edge_source,edge_target\n",
            );
            for (rep, t) in runs.iter().enumerate() {
                for (i, e) in t.events.iter().enumerate() {
                    let _ = writeln!(
                        csv,
                        "{rep},{i},{},{},{},{},{},{},{},{},{}",
                        e.time,
                        e.left.first,
                        e.left.last,
                        e.right.first,
                        e.right.last,
                        e.left.mass,
                        e.right.mass,
                        e.edge.0,
                        e.edge.1
                    );
                }
            }
            emit(out.as_deref(), &csv)?;
            Ok(0)
        }
        Command::Forest { masses, q, reps, out } => {
            let config = ctx.config(&masses)?;
            let q = ctx.time(q, ctx.file.q, "q")?;
            let reps = ctx.reps(reps);
            let rows = (0..reps)
                .into_par_iter()
                .map(|rep| {
                    let clocks = sample_clocks(&config, ctx.stream(StreamPurpose::Clocks, rep));
                    let rc = RankedConfig::new(&config, &clocks);
                    let sw = sweep(&rc, q)?;
                    let mut s = String::new();
                    for r in 0..rc.len() {
                        let exc = sw.decomposition.excursion_of(r);
                        let parent = sw.parent[r].map(|p| rc.vertex[p].to_string()).unwrap_or_default();
                        let _ = writeln!(
                            s,
                            "{rep},{},{r},{parent},{},{}",
                            rc.vertex[r], sw.depth[r], rc.vertex[exc.first]
                        );
                    }
                    Ok(s)
                })
                .collect::<Result<Vec<_>>>()?;
            emit(out.as_deref(), &format!("rep,vertex,rank,parent,depth,component\n{}", rows.concat()))?;
            Ok(0)
        }
        Command::Surplus {
            masses,
            q,
            q_max,
            mode,
            variant,
            reps,
            out,
        } => {
            let config = ctx.config(&masses)?;
            let reps = ctx.reps(reps);
            let variant = match variant {
                Some(VariantArg::Simple) => SurplusVariant::Simple,
                Some(VariantArg::Multigraph) => SurplusVariant::Multigraph,
                None => ctx.file.variant.unwrap_or(SurplusVariant::Simple),
            };
            let rows = (0..reps)
                .into_par_iter()
                .map(|rep| -> Result<String> {
                    let edges: Vec<Edge> = match mode {
                        SurplusMode::Static => {
                            let q = ctx.time(q, ctx.file.q, "q")?;
                            let clocks = sample_clocks(&config, ctx.stream(StreamPurpose::Clocks, rep));
                            let mut rng = ctx.stream(StreamPurpose::StaticSurplus, rep).rng();
                            static_graph(&config, &clocks, q, &mut rng)?.edges().copied().collect()
                        }
                        SurplusMode::Dynamic => {
                            let q_max = ctx.time(q_max, ctx.file.q_max, "q-max")?;
                            let t = ctx.trajectory(&config, rep, q_max)?;
                            let mut rng = ctx.stream(StreamPurpose::DynamicSurplus, rep).rng();
                            dynamic_surplus(&t, &mut rng, q_max, variant)?.graph.edges().copied().collect()
                        }
                    };
                    let mut s = String::new();
                    for e in edges {
                        let _ = writeln!(s, "{rep},{},{},{},{}", e.source, e.target, e.q, e.kind.as_str());
                    }
                    Ok(s)
                })
                .collect::<Result<Vec<_>>>()?;
            emit(out.as_deref(), &format!("rep,source,target,q,kind\n{}", rows.concat()))?;
            Ok(0)
        }
        Command::Mosaic {
            masses,
            q,
            svg,
            json: json_out,
            slices,
        } => {
            let config = ctx.config(&masses)?;
            let q = ctx.time(q, ctx.file.q, "q")?;
            let t = ctx.trajectory(&config, 0, q)?;
            let mosaic = build_mosaic(&t, q)?;
            let ords = mosaic.iter().map(orders).collect::<Result<Vec<_>>>()?;
            let report = json!({
                "q": q,
                "seed": ctx.seed,
                "excursions": mosaic,
                "orders": ords,
                "slices": slice_decomposition(&t, q)?,
            });
            if let Some(p) = &svg {
                std::fs::write(p, render_svg(&t, q, slices)?)?;
            }
            if json_out.is_some() || svg.is_none() {
                emit(json_out.as_deref(), &pretty(&report)?)?;
            }
            Ok(0)
        }
        Command::Verify { suite, reps, out } => {
            let opts = VerifyOptions {
                seed: ctx.seed,
                reps: reps.or(ctx.file.reps),
            };
            let reports = if suite == "all" {
                run_all(&opts)?
            } else {
                vec![run_suite(&suite, &opts)?]
            };
            for r in &reports {
                eprintln!("{}: {} ({:.1}s)", r.suite, if r.pass { "pass" } else { "FAIL" }, r.seconds);
            }
            let pass = reports.iter().all(|r| r.pass);
            let text = pretty(&json!({ "pass": pass, "suites": reports }))?;
            emit(None, &text)?;
            if let Some(p) = out {
                std::fs::write(p, &text)?;
            }
            Ok(if pass { 0 } else { 1 })
        }
        Command::Limit {
            n_values,
            t,
            reps,
            h,
            horizon,
            top,
            csv,
            report,
        } => limit_command(&ctx, n_values, t, reps, h, horizon, top, csv, report),
        Command::Bench { engine, n, reps, out } => bench(&ctx, engine, n, reps, out),
    }
}

fn pretty<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn limit_command(
    ctx: &Ctx,
    n_values: Option<Vec<usize>>,
    t: Option<f64>,
    reps: Option<usize>,
    h: Option<f64>,
    horizon: Option<f64>,
    top: usize,
    csv: Option<PathBuf>,
    report: Option<PathBuf>,
) -> Result<i32> {
    let sec = ctx.file.limit.clone().unwrap_or_default();
    let t = t.or(sec.t).unwrap_or(0.0);
    let h = h.or(sec.h).unwrap_or(1e-3);
    let reps = ctx.reps(reps);
    let horizon = horizon.or(sec.horizon);
    let mut out = String::from("n,rep,rank,excursion_length,mark_count\n");
    let summary;
    if let Some(n_values) = n_values {
        let cfg = ScalingConfig {
            n_values,
            t,
            reps,
            seed: ctx.seed,
            h,
            horizon,
        };
        let r = scaling_experiment(&cfg)?;
        let mut write_rows = |label: &str, samples: &[crate::limit::TopComponents]| {
            for (rep, s) in samples.iter().enumerate() {
                let _ = writeln!(out, "{label},{rep},1,{},{}", s.largest, s.surplus);
                let _ = writeln!(out, "{label},{rep},2,{},{}", s.second, s.second_surplus);
            }
        };
        for row in &r.rows {
            write_rows(&row.n.to_string(), &row.samples);
        }
        write_rows("limit", &r.limit_samples);
        summary = json!({
            "params": r.params,
            "horizon": r.horizon,
            "h": h,
            "reps": reps,
            "limit_mean_largest": r.limit_mean_largest,
            "limit_truncated": r.limit_truncated,
            "epsilon_sensitivity": r.epsilon_sensitivity,
            "ks_decreasing": r.ks_decreasing(),
            "rows": r.rows.iter().map(|row| json!({
                "n": row.n,
                "q": row.q,
                "hypotheses": row.hypotheses,
                "mean_largest": row.mean_largest,
                "mean_second": row.mean_second,
                "mean_surplus": row.mean_surplus,
                "ks_largest": row.ks_largest,
                "ks_second": row.ks_second,
                "ks_surplus": row.ks_surplus,
            })).collect::<Vec<_>>(),
            "warnings": r.warnings,
        });
    } else {
        let params = LimitParams {
            kappa: sec.kappa.unwrap_or(1.0),
            tau: sec.tau.unwrap_or(0.0),
            t,
            c: sec.c.clone().unwrap_or_default(),
        };
        params.validate()?;
        let horizon = horizon
            .or(params.default_horizon())
            .ok_or_else(|| Error::Usage("kappa = 0 needs an explicit horizon".into()))?;
        let rows = (0..reps)
            .into_par_iter()
            .map(|rep| -> Result<String> {
                let mut driver = ctx.stream(StreamPurpose::LimitDriver, rep).rng();
                let mut marks = ctx.stream(StreamPurpose::LimitMarks, rep).rng();
                let path = sample_limit_path(&params, &mut driver, h, horizon)?;
                let m = excursions_and_marks(&path, &mut marks);
                let mut s = String::new();
                for (i, (l, k)) in m.lengths.iter().zip(&m.marks).take(top).enumerate() {
                    let _ = writeln!(s, "limit,{rep},{},{l},{k}", i + 1);
                }
                Ok(s)
            })
            .collect::<Result<Vec<_>>>()?;
        out.push_str(&rows.concat());
        summary = json!({
            "params": params,
            "approximation": params.is_approximation(),
            "truncated_cubic_mass": params.cubic_mass(),
            "horizon": horizon,
            "h": h,
            "reps": reps,
        });
    }
    emit(csv.as_deref(), &out)?;
    if let Some(p) = report {
        std::fs::write(p, pretty(&summary)?)?;
    }
    Ok(0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineTiming {
    pub engine: String,
    pub n: usize,
    pub reps: usize,
    pub skipped: bool,
    pub wall_seconds: f64,
    pub seconds_per_rep: f64,
    pub peak_bytes: usize,
    pub events: usize,
}

/// Shape laws of both engines on a small shared case.
fn cross_check(seed: u64) -> Result<(bool, serde_json::Value)> {
    let config = WeightedConfig::critical_uniform(6)?;
    let q = 1.0 / config.sigma(2)?;
    let reps = 20_000;
    let bfw: Vec<Vec<usize>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let clocks = sample_clocks(&config, RngStream::for_purpose(seed, StreamPurpose::Clocks, rep));
            let mut rng = RngStream::for_purpose(seed, StreamPurpose::MergeEdges, rep).rng();
            let t = run_trajectory(&config, &clocks, &mut rng, q).expect("q > 0");
            t.partition_at(q).shape()
        })
        .collect();
    let gil: Vec<Vec<usize>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = RngStream::for_purpose(seed, StreamPurpose::Oracle, rep).rng();
            gillespie_trajectory(&config, &mut rng, q).expect("q > 0").partition_at(q).shape()
        })
        .collect();
    let r = chi_square_two_sample(&counts(bfw), &counts(gil), 5.0);
    Ok((
        r.pass(ALPHA),
        json!({ "n": 6, "q": q, "reps": reps, "statistic": r.statistic, "df": r.df, "p_value": r.p_value }),
    ))
}

fn bench(ctx: &Ctx, engine: Engine, n: usize, reps: usize, out: Option<PathBuf>) -> Result<i32> {
    if n < 2 {
        return Err(Error::Usage("--n must be at least 2".into()));
    }
    let (ok, check) = cross_check(ctx.seed)?;
    let config = WeightedConfig::critical_uniform(n)?;
    let q = 1.0 + 1.0 / config.sigma(2)?;
    let mut timings = Vec::new();
    if matches!(engine, Engine::BfwEvent | Engine::Both) {
        alloc_stats::reset_peak();
        let base = alloc_stats::current();
        let start = Instant::now();
        let mut events = 0;
        for rep in 0..reps {
            events += ctx.trajectory(&config, rep, q)?.events.len();
        }
        let wall = start.elapsed().as_secs_f64();
        timings.push(EngineTiming {
            engine: "bfw-event".into(),
            n,
            reps,
            skipped: false,
            wall_seconds: wall,
            seconds_per_rep: wall / reps.max(1) as f64,
            peak_bytes: alloc_stats::peak().saturating_sub(base),
            events,
        });
    }
    if matches!(engine, Engine::Gillespie | Engine::Both) {
        if n > BENCH_GILLESPIE_MAX_N {
            timings.push(EngineTiming {
                engine: "gillespie".into(),
                n,
                reps,
                skipped: true,
                wall_seconds: 0.0,
                seconds_per_rep: 0.0,
                peak_bytes: 0,
                events: 0,
            });
        } else {
            alloc_stats::reset_peak();
            let base = alloc_stats::current();
            let start = Instant::now();
            let mut events = 0;
            for rep in 0..reps {
                let mut rng = ctx.stream(StreamPurpose::Oracle, rep).rng();
                events += gillespie_trajectory(&config, &mut rng, q)?.mergers.len();
            }
            let wall = start.elapsed().as_secs_f64();
            timings.push(EngineTiming {
                engine: "gillespie".into(),
                n,
                reps,
                skipped: false,
                wall_seconds: wall,
                seconds_per_rep: wall / reps.max(1) as f64,
                peak_bytes: alloc_stats::peak().saturating_sub(base),
                events,
            });
        }
    }
    let text = pretty(&json!({
        "seed": ctx.seed,
        "q": q,
        "cross_check": { "pass": ok, "detail": check },
        "timings": timings,
    }))?;
    emit(out.as_deref(), &text)?;
    Ok(if ok { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["mc-mosaic", "--bogus"]), 2);
        assert_eq!(run(["mc-mosaic", "simulate", "--q-max", "1"]), 2);
        assert_eq!(run(["mc-mosaic", "verify", "--suite", "nope"]), 2);
        assert_eq!(run(["mc-mosaic", "--help"]), 0);
    }

    #[test]
    fn config_schema() {
        let c: FileConfig = serde_json::from_str(
            r#"{"masses":[1,2],"seed":7,"q_max":2.0,"variant":"multigraph","reps":3,"threads":2,
                "limit":{"kappa":1,"tau":0,"t":-1,"c":[0.5],"h":0.001,"horizon":8}}"#,
        )
        .unwrap();
        assert_eq!(c.variant, Some(SurplusVariant::Multigraph));
        assert_eq!(c.limit.unwrap().c, Some(vec![0.5]));
        assert!(serde_json::from_str::<FileConfig>(r#"{"mass":[1]}"#).is_err());
    }

    #[test]
    fn simulate_writes_csv() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("e.csv");
        let code = run([
            "mc-mosaic",
            "simulate",
            "--masses",
            "1,2,0.5",
            "--q-max",
            "3",
            "--reps",
            "2",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let text = std::fs::read_to_string(out).unwrap();
        assert!(text.starts_with("rep,event,time"));
    }
}
