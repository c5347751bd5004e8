//! `comwb`: reproducible experiment harness. Every subcommand derives one
//! RNG substream per trial from (`--seed`, trial index), merges results by
//! trial index, and writes CSV data plus a JSON summary (and optionally a
//! self-contained SVG histogram), so outputs are byte-identical for a fixed
//! configuration regardless of `--threads`.

mod histogram;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use comwb_core::exclusion::{fluctuation_experiment, Observable};
use comwb_core::foursquare::{asymptotic_rate, QuadrantCounts};
use comwb_core::ginibre::densities::{
    constraint_check, o1_density, o1_moment_integral, r1_density, r1_normalization, Method,
};
use comwb_core::ginibre::moments::{
    limit_moment_matchings, mixed_moment_samples, MomentSignature,
};
use comwb_core::kacwalk::ThermoParams;
use comwb_core::lis::{patience_sort, Mode};
use comwb_core::mallows::{inversions, sample_mallows_fy, sample_uniform_fy};
use comwb_core::qcomb::{q_stirling_remainder, stirling_coefficients};
use comwb_core::spectra::{
    kac_compression_experiment, thermostat_compression_experiment, CompressionSummary,
    HermitianMatrix,
};
use comwb_core::stream::derive_stream;
use histogram::Histogram;
use num_complex::Complex64;
use output::{fmt, RunContext};
use rayon::prelude::*;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "comwb", version, about = "Stochastic-simulation and exact-computation workbench")]
struct Cli {
    /// Master seed; trial i uses the substream derived from (seed, i).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of independent trials.
    #[arg(long, global = true, default_value_t = 100)]
    trials: usize,
    /// Worker threads (0 = one per core). Results do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output directory for CSV/JSON/SVG artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObservableArg {
    Midpoint,
    WalkLis,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample Mallows(q) permutations; records inversions and LIS per trial.
    MallowsSample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: f64,
        /// Also write an SVG histogram of the LIS lengths.
        #[arg(long)]
        svg: bool,
        #[arg(long, default_value_t = 30)]
        bins: usize,
    },
    /// LIS length distribution under the uniform (q = 1) or Mallows law.
    LisHist {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long)]
        svg: bool,
        #[arg(long, default_value_t = 30)]
        bins: usize,
    },
    /// ASEP fluctuation experiment at q = 1 − c/n^alpha.
    AsepRun {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, value_enum, default_value_t = ObservableArg::WalkLis)]
        observable: ObservableArg,
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
    },
    /// Rotation-compression of a seeded GOE matrix via the Kac walk.
    KacCompress {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Kac steps per rotation; 0 uses an exact Haar sample.
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
    },
    /// Gaussian-projection compression of a seeded GOE matrix.
    ThermoCompress {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
    /// Monte Carlo mixed moments of the complex Ginibre ensemble.
    GinibreMoments {
        #[arg(long)]
        n: usize,
        /// Comma-separated powers of A, e.g. "2,2".
        #[arg(long, default_value = "2,2")]
        p: String,
        /// Comma-separated powers of A*, e.g. "2,2".
        #[arg(long, default_value = "2,2")]
        q: String,
    },
    /// Exact one-point eigenvalue and overlap densities on a radial grid.
    GinibreDensity {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1.5)]
        r_max: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
    /// Moment-constraint decomposition for p = 0..=p_max.
    GinibreConstraint {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 2)]
        p_max: u32,
    },
    /// q-Stirling remainders R_n(beta) over a list of n values.
    Qstirling {
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Comma-separated n values.
        #[arg(long, default_value = "100,1000,10000")]
        n_list: String,
    },
    /// Quadrant counts of Mallows-permutation lattice points under a 2x2 split.
    Foursquare {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        s: f64,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
    },
}

enum CliError {
    Usage(String),
    Failure(String),
}

impl From<comwb_core::Error> for CliError {
    fn from(e: comwb_core::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("io error: {e}"))
    }
}

fn parse_u32_list(s: &str, flag: &str) -> Result<Vec<u32>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| CliError::Usage(format!("--{flag}: '{t}' is not a nonnegative integer")))
        })
        .collect()
}

fn parse_u64_list(s: &str, flag: &str) -> Result<Vec<u64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| CliError::Usage(format!("--{flag}: '{t}' is not a nonnegative integer")))
        })
        .collect()
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}

fn compression_outputs(
    ctx: &RunContext,
    summary: &CompressionSummary,
) -> Result<(), CliError> {
    let rows: Vec<Vec<String>> = summary
        .distances
        .iter()
        .enumerate()
        .map(|(t, d)| vec![t.to_string(), fmt(*d)])
        .collect();
    ctx.write_csv("", &["trial", "distance"], &rows)?;
    let exc: Vec<Vec<String>> = summary
        .exceedance
        .iter()
        .map(|r| vec![fmt(r.r), fmt(r.empirical), fmt(r.envelope)])
        .collect();
    ctx.write_csv("-exceedance", &["r", "empirical", "envelope"], &exc)?;
    ctx.write_json(&serde_json::json!({
        "k": summary.k,
        "trials": summary.trials,
        "mean_distance": summary.mean_distance,
        "max_distance": summary.max_distance,
    }))?;
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let (seed, trials) = (cli.seed, cli.trials);
    match &cli.cmd {
        Cmd::MallowsSample { n, q, svg, bins } => {
            let config = serde_json::json!({
                "subcommand": "mallows-sample", "n": n, "q": q,
                "seed": seed, "trials": trials, "bins": bins,
            });
            let ctx = RunContext::new("mallows-sample", &cli.out, config)?;
            let stats: Result<Vec<(u64, usize)>, comwb_core::Error> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = derive_stream(seed, t as u64);
                    let p = sample_mallows_fy(*n, *q, &mut rng)?;
                    let seq: Vec<f64> = p.as_slice().iter().map(|&v| v as f64).collect();
                    let (l, _) = patience_sort(&seq, Mode::Strict)?;
                    Ok((inversions(&p), l))
                })
                .collect();
            let stats = stats?;
            let rows: Vec<Vec<String>> = stats
                .iter()
                .enumerate()
                .map(|(t, (inv, l))| vec![t.to_string(), inv.to_string(), l.to_string()])
                .collect();
            ctx.write_csv("", &["trial", "inversions", "lis"], &rows)?;
            let lis: Vec<f64> = stats.iter().map(|&(_, l)| l as f64).collect();
            let inv: Vec<f64> = stats.iter().map(|&(i, _)| i as f64).collect();
            let (lm, ls) = mean_sd(&lis);
            let (im, is) = mean_sd(&inv);
            let hist = Histogram::from_values(&lis, *bins);
            ctx.write_json(&serde_json::json!({
                "lis_mean": lm, "lis_sd": ls,
                "inversions_mean": im, "inversions_sd": is,
                "histogram": hist,
            }))?;
            if *svg {
                if let Some(h) = &hist {
                    ctx.write_svg(&h.to_svg(&format!("LIS, Mallows n={n} q={q}")))?;
                }
            }
        }
        Cmd::LisHist { n, q, svg, bins } => {
            let config = serde_json::json!({
                "subcommand": "lis-hist", "n": n, "q": q,
                "seed": seed, "trials": trials, "bins": bins,
            });
            let ctx = RunContext::new("lis-hist", &cli.out, config)?;
            let lengths: Result<Vec<usize>, comwb_core::Error> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = derive_stream(seed, t as u64);
                    let p = if *q == 1.0 {
                        sample_uniform_fy(*n, &mut rng)
                    } else {
                        sample_mallows_fy(*n, *q, &mut rng)?
                    };
                    let seq: Vec<f64> = p.as_slice().iter().map(|&v| v as f64).collect();
                    Ok(patience_sort(&seq, Mode::Strict)?.0)
                })
                .collect();
            let lengths = lengths?;
            let rows: Vec<Vec<String>> = lengths
                .iter()
                .enumerate()
                .map(|(t, l)| vec![t.to_string(), l.to_string()])
                .collect();
            ctx.write_csv("", &["trial", "lis"], &rows)?;
            let vals: Vec<f64> = lengths.iter().map(|&l| l as f64).collect();
            let (mean, sd) = mean_sd(&vals);
            let hist = Histogram::from_values(&vals, *bins);
            ctx.write_json(&serde_json::json!({
                "mean": mean, "sd": sd, "scale_2_sqrt_n": 2.0 * (*n as f64).sqrt(),
                "histogram": hist,
            }))?;
            if *svg {
                if let Some(h) = &hist {
                    ctx.write_svg(&h.to_svg(&format!("LIS, n={n} q={q}")))?;
                }
            }
        }
        Cmd::AsepRun {
            n,
            alpha,
            c,
            observable,
            burn_in,
        } => {
            let obs_name = match observable {
                ObservableArg::Midpoint => "midpoint",
                ObservableArg::WalkLis => "walk-lis",
            };
            let config = serde_json::json!({
                "subcommand": "asep-run", "n": n, "alpha": alpha, "c": c,
                "observable": obs_name, "burn_in": burn_in,
                "seed": seed, "trials": trials,
            });
            let ctx = RunContext::new("asep-run", &cli.out, config)?;
            let obs = match observable {
                ObservableArg::Midpoint => Observable::Midpoint,
                ObservableArg::WalkLis => Observable::WalkLis,
            };
            let summary = fluctuation_experiment(*n, *alpha, *c, obs, *burn_in, trials, seed)?;
            let rows: Vec<Vec<String>> = summary
                .values
                .iter()
                .enumerate()
                .map(|(t, v)| vec![t.to_string(), fmt(*v)])
                .collect();
            ctx.write_csv("", &["trial", "value"], &rows)?;
            let exc: Vec<Vec<String>> = summary
                .exceedance
                .iter()
                .map(|r| vec![fmt(r.r), fmt(r.empirical), fmt(r.envelope)])
                .collect();
            ctx.write_csv("-exceedance", &["r", "empirical", "envelope"], &exc)?;
            ctx.write_json(&serde_json::json!({
                "q": summary.q, "mean": summary.mean, "sd": summary.sd,
            }))?;
        }
        Cmd::KacCompress { n, k, burn_in } => {
            let config = serde_json::json!({
                "subcommand": "kac-compress", "n": n, "k": k, "burn_in": burn_in,
                "seed": seed, "trials": trials,
            });
            let ctx = RunContext::new("kac-compress", &cli.out, config)?;
            // The base matrix comes from a reserved substream so trial
            // streams 0..trials never overlap it.
            let mut rng = derive_stream(seed, u64::MAX);
            let g = HermitianMatrix::goe(*n, &mut rng);
            let summary = kac_compression_experiment(&g, *k, *burn_in, trials, seed)?;
            compression_outputs(&ctx, &summary)?;
        }
        Cmd::ThermoCompress {
            n,
            k,
            beta,
            mu,
            lambda,
        } => {
            let config = serde_json::json!({
                "subcommand": "thermo-compress", "n": n, "k": k,
                "beta": beta, "mu": mu, "lambda": lambda,
                "seed": seed, "trials": trials,
            });
            let ctx = RunContext::new("thermo-compress", &cli.out, config)?;
            let mut rng = derive_stream(seed, u64::MAX);
            let g = HermitianMatrix::goe(*n, &mut rng);
            let params = ThermoParams::new(*beta, *mu, *lambda)?;
            let summary = thermostat_compression_experiment(&g, *k, &params, trials, seed)?;
            compression_outputs(&ctx, &summary)?;
        }
        Cmd::GinibreMoments { n, p, q } => {
            let pv = parse_u32_list(p, "p")?;
            let qv = parse_u32_list(q, "q")?;
            let config = serde_json::json!({
                "subcommand": "ginibre-moments", "n": n, "p": pv, "q": qv,
                "seed": seed, "trials": trials,
            });
            let ctx = RunContext::new("ginibre-moments", &cli.out, config)?;
            let sig = MomentSignature::new(pv, qv)?;
            if trials < 2 {
                return Err(CliError::Usage("--trials must be >= 2".into()));
            }
            let samples: Vec<Complex64> = mixed_moment_samples(*n, &sig, trials, seed);
            let rows: Vec<Vec<String>> = samples
                .iter()
                .enumerate()
                .map(|(t, v)| vec![t.to_string(), fmt(v.re), fmt(v.im)])
                .collect();
            ctx.write_csv("", &["trial", "re", "im"], &rows)?;
            let re: Vec<f64> = samples.iter().map(|v| v.re).collect();
            let im: Vec<f64> = samples.iter().map(|v| v.im).collect();
            let (mr, sr) = mean_sd(&re);
            let (mi, si) = mean_sd(&im);
            let tf = trials as f64;
            let limit = limit_moment_matchings(&sig).ok();
            ctx.write_json(&serde_json::json!({
                "mean_re": mr, "stderr_re": sr / tf.sqrt(),
                "mean_im": mi, "stderr_im": si / tf.sqrt(),
                "limit_matchings": limit,
            }))?;
        }
        Cmd::GinibreDensity { n, r_max, points } => {
            if *points < 2 {
                return Err(CliError::Usage("--points must be >= 2".into()));
            }
            let config = serde_json::json!({
                "subcommand": "ginibre-density", "n": n, "r_max": r_max, "points": points,
                "seed": seed, "trials": trials,
            });
            let ctx = RunContext::new("ginibre-density", &cli.out, config)?;
            let mut rows = Vec::with_capacity(*points);
            for i in 0..*points {
                let r = r_max * i as f64 / (*points as f64 - 1.0);
                let z = Complex64::new(r, 0.0);
                let r1 = r1_density(*n, z, Method::ClosedForm)?;
                let o1 = o1_density(*n, z, Method::ClosedForm)?;
                rows.push(vec![fmt(r), fmt(r1), fmt(o1)]);
            }
            ctx.write_csv("", &["r", "r1", "o1"], &rows)?;
            ctx.write_json(&serde_json::json!({
                "r1_integral": r1_normalization(*n)?,
                "o1_mass": o1_moment_integral(*n, 0)?,
                "o1_mass_exact": (*n as f64 + 1.0) / 2.0,
            }))?;
        }
        Cmd::GinibreConstraint { n, p_max } => {
            let config = serde_json::json!({
                "subcommand": "ginibre-constraint", "n": n, "p_max": p_max,
                "seed": seed, "trials": trials,
            });
            let ctx = RunContext::new("ginibre-constraint", &cli.out, config)?;
            let mut rows = Vec::new();
            let mut reports = Vec::new();
            for p in 0..=*p_max {
                let rep = constraint_check(*n, p)?;
                rows.push(vec![
                    p.to_string(),
                    fmt(rep.o1_integral),
                    fmt(rep.leading_term),
                    fmt(rep.constant),
                    fmt(rep.o2_log_coefficient),
                ]);
                reports.push(rep);
            }
            ctx.write_csv(
                "",
                &["p", "o1_integral", "leading_term", "constant", "o2_log_coefficient"],
                &rows,
            )?;
            ctx.write_json(&serde_json::json!({ "reports": reports }))?;
        }
        Cmd::Qstirling { beta, n_list } => {
            let ns = parse_u64_list(n_list, "n-list")?;
            let config = serde_json::json!({
                "subcommand": "qstirling", "beta": beta, "n_list": ns,
                "seed": seed, "trials": trials,
            });
            let ctx = RunContext::new("qstirling", &cli.out, config)?;
            let mut rows = Vec::new();
            for &n in &ns {
                rows.push(vec![n.to_string(), fmt(q_stirling_remainder(n, *beta)?)]);
            }
            ctx.write_csv("", &["n", "remainder"], &rows)?;
            let (a, b) = stirling_coefficients(*beta);
            ctx.write_json(&serde_json::json!({ "a_beta": a, "b_beta": b }))?;
        }
        Cmd::Foursquare { n, s, t, beta } => {
            if *n == 0 {
                return Err(CliError::Usage("--n must be positive".into()));
            }
            if !(*s > 0.0 && *s < 1.0 && *t > 0.0 && *t < 1.0) {
                return Err(CliError::Usage("--s and --t must lie in (0, 1)".into()));
            }
            let config = serde_json::json!({
                "subcommand": "foursquare", "n": n, "s": s, "t": t, "beta": beta,
                "seed": seed, "trials": trials,
            });
            let ctx = RunContext::new("foursquare", &cli.out, config)?;
            let q = (-beta / *n as f64).exp();
            let counts: Result<Vec<[u64; 4]>, comwb_core::Error> = (0..trials)
                .into_par_iter()
                .map(|tr| {
                    let mut rng = derive_stream(seed, tr as u64);
                    let p = sample_mallows_fy(*n, q, &mut rng)?;
                    let mut c = [0u64; 4];
                    for (i, &pi) in p.as_slice().iter().enumerate() {
                        let y = (i as f64 + 0.5) / *n as f64;
                        let x = (pi as f64 - 0.5) / *n as f64;
                        let idx = match (y < *t, x < *s) {
                            (true, true) => 0,
                            (true, false) => 1,
                            (false, true) => 2,
                            (false, false) => 3,
                        };
                        c[idx] += 1;
                    }
                    Ok(c)
                })
                .collect();
            let counts = counts?;
            let rows: Vec<Vec<String>> = counts
                .iter()
                .enumerate()
                .map(|(tr, c)| {
                    vec![
                        tr.to_string(),
                        c[0].to_string(),
                        c[1].to_string(),
                        c[2].to_string(),
                        c[3].to_string(),
                    ]
                })
                .collect();
            ctx.write_csv("", &["trial", "n11", "n12", "n21", "n22"], &rows)?;
            let mean: Vec<f64> = (0..4)
                .map(|j| {
                    counts.iter().map(|c| c[j] as f64).sum::<f64>()
                        / (trials as f64 * *n as f64)
                })
                .collect();
            let areas = QuadrantCounts::from_split([1, 1, 1, 1], *s, *t)?.areas();
            let rate = asymptotic_rate(areas, *beta)?;
            ctx.write_json(&serde_json::json!({
                "q": q,
                "mean_fractions": mean,
                "split_areas": areas,
                "asymptotic_rate_at_areas": rate,
            }))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Ignore the error if a pool already exists (e.g. repeated init in tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
