//! Monte-Carlo experiments: estimator bias/variance/MSE across sample sizes
//! and the single-outlier sensitivity sweep.
//!
//! Every replication `r` draws from its own ChaCha stream `(seed, r)`, so the
//! results do not depend on how replications are scheduled over threads. The
//! largest sample of a replication is drawn once and smaller sizes use its
//! prefixes.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::copula::{fit_beta_copula, pseudo_observations, seeded_rng, GumbelParam, GumbelSampler};
use crate::fmt::{sig, sig_opt};
use crate::margins::{LossSample, StudentT};
use crate::measures::{delta_measures, solve_omega, CoRiskEstimates, RiskLevels};
use crate::{Error, Result};

pub const DEFAULT_SIZES: [usize; 6] = [500, 1000, 2000, 5000, 10000, 20000];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Desk,
    Full,
}

impl Profile {
    pub fn replications(self) -> usize {
        match self {
            Profile::Desk => 500,
            Profile::Full => 10_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BiasExperimentConfig {
    pub replications: usize,
    pub sizes: Vec<usize>,
    pub theta: GumbelParam,
    pub margin: StudentT,
    pub levels: RiskLevels,
    pub seed: u64,
    /// Worker threads; 0 means all available cores.
    pub jobs: usize,
}

impl BiasExperimentConfig {
    /// Gumbel with Kendall τ = 0.55, t(3) margins, α = β = 0.95.
    pub fn new(profile: Profile, seed: u64) -> Self {
        Self {
            replications: profile.replications(),
            sizes: DEFAULT_SIZES.to_vec(),
            theta: GumbelParam::from_kendall_tau(0.55).expect("valid tau"),
            margin: StudentT::standard(3.0).expect("valid nu"),
            levels: RiskLevels::default(),
            seed,
            jobs: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.sizes.is_empty() || self.sizes.iter().any(|&n| n < 2) {
            return Err(Error::Config(
                "sample sizes must be nonempty and >= 2".into(),
            ));
        }
        Ok(())
    }
}

/// Analytic values of the estimands for a Gumbel copula with t margins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Truths {
    pub omega: f64,
    pub dcov: f64,
    pub dcoes: f64,
    pub xi: f64,
}

impl Truths {
    pub fn analytic(theta: GumbelParam, margin: &StudentT, levels: RiskLevels) -> Result<Self> {
        let sol = solve_omega(levels, &theta)?;
        let e = CoRiskEstimates::at_omega(sol.omega, levels, margin)?;
        Ok(Self {
            omega: e.omega,
            dcov: e.dcov,
            dcoes: e.dcoes,
            xi: e
                .xi_hat
                .ok_or(Error::Undefined("tail index of the true model"))?,
        })
    }

    pub fn get(&self, estimand: Estimand) -> f64 {
        match estimand {
            Estimand::Dcov => self.dcov,
            Estimand::Dcoes => self.dcoes,
            Estimand::Omega => self.omega,
            Estimand::Xi => self.xi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimand {
    Dcov,
    Dcoes,
    Omega,
    Xi,
}

impl Estimand {
    pub const ALL: [Estimand; 4] = [
        Estimand::Dcov,
        Estimand::Dcoes,
        Estimand::Omega,
        Estimand::Xi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Estimand::Dcov => "dcov",
            Estimand::Dcoes => "dcoes",
            Estimand::Omega => "omega",
            Estimand::Xi => "xi",
        }
    }
}

/// Estimates from one dataset of one replication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RawResult {
    pub replication: usize,
    pub n: usize,
    pub omega: f64,
    pub dcov: f64,
    pub dcoes: f64,
    pub xi: Option<f64>,
}

impl RawResult {
    pub fn get(&self, estimand: Estimand) -> Option<f64> {
        match estimand {
            Estimand::Dcov => Some(self.dcov),
            Estimand::Dcoes => Some(self.dcoes),
            Estimand::Omega => Some(self.omega),
            Estimand::Xi => self.xi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub replication: usize,
    pub n: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryStats {
    pub count: usize,
    pub mean: f64,
    pub bias: f64,
    /// Sample variance with denominator `count − 1` (0 for one value).
    pub variance: f64,
    /// Mean squared deviation from the truth.
    pub mse: f64,
}

/// Bias, variance and MSE of `values` against `truth`.
pub fn summarize(values: &[f64], truth: f64) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(Error::InsufficientData(
            "no replications to summarize".into(),
        ));
    }
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let variance = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0)
    } else {
        0.0
    };
    let mse = values.iter().map(|v| (v - truth).powi(2)).sum::<f64>() / m;
    Ok(SummaryStats {
        count: values.len(),
        mean,
        bias: mean - truth,
        variance,
        mse,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub estimand: Estimand,
    pub n: usize,
    pub truth: f64,
    #[serde(flatten)]
    pub stats: SummaryStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub truths: Truths,
    pub rows: Vec<SummaryRow>,
}

impl ExperimentSummary {
    pub fn get(&self, estimand: Estimand, n: usize) -> Option<&SummaryStats> {
        self.rows
            .iter()
            .find(|r| r.estimand == estimand && r.n == n)
            .map(|r| &r.stats)
    }

    /// Columns `estimand,n,truth,count,mean,bias,variance,mse`.
    pub fn write_csv<W: Write>(&self, out: W, digits: usize) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "estimand", "n", "truth", "count", "mean", "bias", "variance", "mse",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.estimand.name().to_string(),
                r.n.to_string(),
                sig(r.truth, digits),
                r.stats.count.to_string(),
                sig(r.stats.mean, digits),
                sig(r.stats.bias, digits),
                sig(r.stats.variance, digits),
                sig(r.stats.mse, digits),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasExperimentOutput {
    pub raw: Vec<RawResult>,
    pub failures: Vec<Failure>,
    pub summary: ExperimentSummary,
}

pub fn run_bias_experiment(cfg: &BiasExperimentConfig) -> Result<BiasExperimentOutput> {
    cfg.validate()?;
    let truths = Truths::analytic(cfg.theta, &cfg.margin, cfg.levels)?;
    let per_rep: Vec<Vec<std::result::Result<RawResult, Failure>>> = with_pool(cfg.jobs, || {
        (0..cfg.replications)
            .into_par_iter()
            .map(|r| replicate(cfg, r))
            .collect()
    })?;

    let mut raw = Vec::new();
    let mut failures = Vec::new();
    for item in per_rep.into_iter().flatten() {
        match item {
            Ok(r) => raw.push(r),
            Err(f) => failures.push(f),
        }
    }
    for f in &failures {
        log::warn!(
            "replication {} (n = {}) failed: {}",
            f.replication,
            f.n,
            f.message
        );
    }

    let mut rows = Vec::new();
    for &n in &cfg.sizes {
        for est in Estimand::ALL {
            let values: Vec<f64> = raw
                .iter()
                .filter(|r| r.n == n)
                .filter_map(|r| r.get(est))
                .collect();
            if values.is_empty() {
                continue;
            }
            let truth = truths.get(est);
            rows.push(SummaryRow {
                estimand: est,
                n,
                truth,
                stats: summarize(&values, truth)?,
            });
        }
    }
    Ok(BiasExperimentOutput {
        raw,
        failures,
        summary: ExperimentSummary { truths, rows },
    })
}

/// `n` Gumbel pairs mapped to the loss scale of `margin`, from stream
/// `(seed, stream)`.
pub fn draw_losses(
    n: usize,
    theta: GumbelParam,
    margin: &StudentT,
    seed: u64,
    stream: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rng = seeded_rng(seed, stream);
    let sampler = GumbelSampler::new(theta);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let (u, v) = sampler.draw(&mut rng);
        xs.push(margin.quantile(u)?);
        ys.push(margin.quantile(v)?);
    }
    Ok((xs, ys))
}

fn replicate(
    cfg: &BiasExperimentConfig,
    rep: usize,
) -> Vec<std::result::Result<RawResult, Failure>> {
    let n_max = cfg.sizes.iter().copied().max().unwrap_or(0);
    let mut rng = seeded_rng(cfg.seed, rep as u64);
    let sampler = GumbelSampler::new(cfg.theta);
    // X enters only through its ranks, so it stays on the uniform scale
    let mut us = Vec::with_capacity(n_max);
    let mut vs = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        let (u, v) = sampler.draw(&mut rng);
        us.push(u);
        vs.push(v);
    }
    let ys: Result<Vec<f64>> = vs.iter().map(|&v| cfg.margin.quantile(v)).collect();
    cfg.sizes
        .iter()
        .map(|&n| {
            let fail = |e: &Error| Failure {
                replication: rep,
                n,
                message: e.to_string(),
            };
            let ys = ys.as_ref().map_err(fail)?;
            estimate_dataset(&us[..n], &ys[..n], cfg.levels)
                .map(|e| RawResult {
                    replication: rep,
                    n,
                    omega: e.omega,
                    dcov: e.dcov,
                    dcoes: e.dcoes,
                    xi: e.xi_hat,
                })
                .map_err(|e| fail(&e))
        })
        .collect()
}

/// Historical estimates on one dataset, without MES.
fn estimate_dataset(xs: &[f64], ys: &[f64], levels: RiskLevels) -> Result<CoRiskEstimates> {
    let pobs = pseudo_observations(xs, ys)?;
    let copula = fit_beta_copula(&pobs);
    let sol = solve_omega(levels, &copula)?;
    let sample = LossSample::new(ys.to_vec())?;
    CoRiskEstimates::at_omega(sol.omega, levels, &sample)
}

/// Runs `f` on a pool with `jobs` threads (0 = rayon's default).
pub fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

// ---------------------------------------------------------------------------
// Outlier sweep
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct OutlierSweepConfig {
    pub base_n: usize,
    pub q_lo: f64,
    pub q_hi: f64,
    pub step: f64,
    pub theta: GumbelParam,
    pub margin: StudentT,
    pub levels: RiskLevels,
    pub seed: u64,
    pub jobs: usize,
}

impl OutlierSweepConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            base_n: 5000,
            q_lo: 0.94,
            q_hi: 0.999999,
            step: 1e-3,
            theta: GumbelParam::from_kendall_tau(0.55).expect("valid tau"),
            margin: StudentT::standard(3.0).expect("valid nu"),
            levels: RiskLevels::default(),
            seed,
            jobs: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q_lo > 0.5 && self.q_lo <= self.q_hi && self.q_hi < 1.0) {
            return Err(Error::Config(format!(
                "quantile grid [{}, {}] must lie inside (0.5, 1)",
                self.q_lo, self.q_hi
            )));
        }
        if !(self.step > 0.0) {
            return Err(Error::Config("grid step must be positive".into()));
        }
        if self.base_n < 2 {
            return Err(Error::Config("base sample needs at least 2 pairs".into()));
        }
        Ok(())
    }

    /// `q_lo, q_lo + step, …` below `q_hi`, then `q_hi`.
    pub fn grid(&self) -> Vec<f64> {
        let count = ((self.q_hi - self.q_lo) / self.step + 1e-9).floor() as usize;
        let mut grid: Vec<f64> = (0..=count)
            .map(|k| self.q_lo + k as f64 * self.step)
            .filter(|q| *q < self.q_hi - 1e-12)
            .collect();
        grid.push(self.q_hi);
        grid
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub q: f64,
    pub l: f64,
    /// Estimated ΔCoVaR minus its true value.
    pub ddcov: f64,
    /// Estimated ΔCoES minus its true value.
    pub ddcoes: f64,
    pub omega: f64,
    pub xi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutput {
    pub truths: Truths,
    /// Estimates on the base sample without the outlier.
    pub base: CoRiskEstimates,
    /// Historical `VaR_β` and `VaR_ω̂` of the base sample's `Y`.
    pub var_beta: f64,
    pub var_omega: f64,
    pub rows: Vec<SweepRow>,
}

impl SweepOutput {
    /// Columns `l,ddcov,ddcoes,omega,xi`.
    pub fn write_csv<W: Write>(&self, out: W, digits: usize) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["l", "ddcov", "ddcoes", "omega", "xi"])?;
        for r in &self.rows {
            w.write_record([
                sig(r.l, digits),
                sig(r.ddcov, digits),
                sig(r.ddcoes, digits),
                sig(r.omega, digits),
                sig_opt(r.xi, digits),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Adds a single point `(l, l)` in loss space to a fixed base sample for
/// every `l = F⁻¹(q)` on the grid and re-estimates.
pub fn run_outlier_sweep(cfg: &OutlierSweepConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let truths = Truths::analytic(cfg.theta, &cfg.margin, cfg.levels)?;
    let (xs, ys) = draw_losses(cfg.base_n, cfg.theta, &cfg.margin, cfg.seed, 0)?;
    let base = estimate_dataset(&xs, &ys, cfg.levels)?;
    let sample = LossSample::new(ys.clone())?;
    let var_beta = sample.hist_var(cfg.levels.beta())?;
    let var_omega = sample.hist_var(base.omega)?;

    let grid = cfg.grid();
    let rows: Vec<Result<SweepRow>> = with_pool(cfg.jobs, || {
        grid.par_iter()
            .map(|&q| {
                let l = cfg.margin.quantile(q)?;
                let mut x = xs.clone();
                let mut y = ys.clone();
                x.push(l);
                y.push(l);
                let e = estimate_dataset(&x, &y, cfg.levels)?;
                Ok(SweepRow {
                    q,
                    l,
                    ddcov: e.dcov - truths.dcov,
                    ddcoes: e.dcoes - truths.dcoes,
                    omega: e.omega,
                    xi: e.xi_hat,
                })
            })
            .collect()
    })?;
    Ok(SweepOutput {
        truths,
        base,
        var_beta,
        var_omega,
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}

/// Model-based estimates on one simulated dataset, used by examples and tests
/// that want the full bundle including MES.
pub fn simulate_estimates(
    n: usize,
    theta: GumbelParam,
    margin: &StudentT,
    levels: RiskLevels,
    seed: u64,
) -> Result<CoRiskEstimates> {
    let (xs, ys) = draw_losses(n, theta, margin, seed, 0)?;
    let pobs = pseudo_observations(&xs, &ys)?;
    let copula = fit_beta_copula(&pobs);
    delta_measures(levels, &copula, &LossSample::new(ys)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn summary_of_trivial_inputs() {
        let s = summarize(&[2.0], 2.0).unwrap();
        assert_eq!((s.bias, s.variance, s.mse), (0.0, 0.0, 0.0));
        let s = summarize(&[1.5, 2.5], 2.0).unwrap();
        assert_eq!(s.bias, 0.0);
        assert_abs_diff_eq!(s.mse, 0.25, epsilon = 1e-15);
        assert!(summarize(&[], 0.0).is_err());
    }

    #[test]
    fn truths_match_reference() {
        let cfg = BiasExperimentConfig::new(Profile::Desk, 1);
        let t = Truths::analytic(cfg.theta, &cfg.margin, cfg.levels).unwrap();
        assert_abs_diff_eq!(t.omega, 0.9974727, epsilon = 1e-6);
        assert_abs_diff_eq!(t.dcov, 5.071827, epsilon = 1e-3);
        assert_abs_diff_eq!(t.dcoes, 7.383257, epsilon = 1e-3);
        assert_abs_diff_eq!(t.xi, 0.3130637, epsilon = 1e-4);
    }

    #[test]
    fn sweep_grid_endpoints() {
        let cfg = OutlierSweepConfig::new(1);
        let g = cfg.grid();
        assert_eq!(g[0], 0.94);
        assert_eq!(*g.last().unwrap(), 0.999999);
        assert_eq!(g.len(), 61);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn small_experiment_is_thread_independent() {
        let mut cfg = BiasExperimentConfig::new(Profile::Desk, 9);
        cfg.replications = 6;
        cfg.sizes = vec![200, 400];
        cfg.jobs = 1;
        let a = run_bias_experiment(&cfg).unwrap();
        cfg.jobs = 3;
        let b = run_bias_experiment(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.failures.is_empty());
        assert_eq!(a.raw.len(), 12);
    }
}
