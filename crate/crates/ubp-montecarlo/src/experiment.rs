use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;
use ubp_engine::{percolation_budget, CompiledFamily, Lattice, Stepper};
use ubp_geometry::UpdateFamily;

use crate::sample::sample_initial;
use crate::stats::{wilson, Z95};

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    /// Name written into the CSV `family` column.
    pub label: String,
    pub family: UpdateFamily,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    /// Overrides the default step budget (`2n²` for percolation, `n/4` for τ).
    pub max_steps: Option<u64>,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("workers must be at least 1")]
    NoWorkers,
    #[error("n = {n} is below 4 times the family range ({min})")]
    LatticeTooSmall { n: usize, min: usize },
    #[error("p = {0} lies outside [0, 1]")]
    BadProbability(f64),
    #[error("bounds must satisfy 0 < lo < hi ≤ 1, got ({lo}, {hi})")]
    BadBounds { lo: f64, hi: f64 },
    #[error("τ budget {budget} breaks the wrap guard n ≥ 4·budget at n = {n}")]
    WrapGuard { n: usize, budget: u64 },
    #[error("could not build worker pool: {0}")]
    Pool(String),
}

impl ExperimentConfig {
    pub fn new(label: impl Into<String>, family: UpdateFamily, n: usize, trials: u64, seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            label: label.into(),
            family,
            n,
            trials,
            seed,
            max_steps: None,
            workers: 1,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials == 0 {
            return Err(ConfigError::NoTrials);
        }
        if self.workers == 0 {
            return Err(ConfigError::NoWorkers);
        }
        let min = 4 * self.family.range() as usize;
        if self.n < min.max(1) {
            return Err(ConfigError::LatticeTooSmall { n: self.n, min });
        }
        Ok(())
    }

    fn pool(&self) -> Result<rayon::ThreadPool, ConfigError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| ConfigError::Pool(e.to_string()))
    }

    /// Runs `f` over trial indices `range`, results in index order.
    fn run_trials<T: Send>(
        &self,
        pool: &rayon::ThreadPool,
        range: std::ops::Range<u64>,
        f: impl Fn(u64) -> T + Sync + Send,
    ) -> Vec<T> {
        pool.install(|| range.into_par_iter().map(f).collect())
    }
}

fn check_p(p: f64) -> Result<(), ConfigError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(ConfigError::BadProbability(p))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateRow {
    pub family: String,
    pub n: usize,
    pub p: f64,
    pub trials: u64,
    pub successes: u64,
    pub phat: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub tau_median: Option<f64>,
    pub tau_mean: Option<f64>,
}

pub const CSV_HEADER: &str = "family,n,p,trials,successes,phat,wilson_lo,wilson_hi,tau_median,tau_mean";

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl EstimateRow {
    /// At p ∈ {0, 1} the outcome is deterministic and the interval collapses to the estimate.
    pub fn new(family: &str, n: usize, p: f64, trials: u64, successes: u64) -> EstimateRow {
        let phat = successes as f64 / trials as f64;
        let (wilson_lo, wilson_hi) = if p == 0.0 || p == 1.0 {
            (phat, phat)
        } else {
            wilson(successes, trials, Z95)
        };
        EstimateRow {
            family: family.to_string(),
            n,
            p,
            trials,
            successes,
            phat,
            wilson_lo,
            wilson_hi,
            tau_median: None,
            tau_mean: None,
        }
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.family,
            self.n,
            self.p,
            self.trials,
            self.successes,
            self.phat,
            self.wilson_lo,
            self.wilson_hi,
            opt(self.tau_median),
            opt(self.tau_mean)
        )
    }
}

pub fn to_csv(rows: &[EstimateRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv_line());
        s.push('\n');
    }
    s
}

fn torus_percolates(lat: &Lattice, family: &CompiledFamily, budget: u64) -> bool {
    let mut cur = lat.clone();
    let mut stepper = Stepper::new(family);
    let mut steps = 0;
    while !cur.is_full() && steps < budget {
        if !stepper.step(&mut cur) {
            break;
        }
        steps += 1;
    }
    cur.is_full()
}

struct Sampler<'a> {
    cfg: &'a ExperimentConfig,
    compiled: CompiledFamily,
    pool: rayon::ThreadPool,
    budget: u64,
}

impl<'a> Sampler<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Sampler<'a>, ConfigError> {
        cfg.validate()?;
        Ok(Sampler {
            cfg,
            compiled: CompiledFamily::new(&cfg.family),
            pool: cfg.pool()?,
            budget: cfg.max_steps.unwrap_or_else(|| percolation_budget(cfg.n)),
        })
    }

    /// Percolating trials among indices `range` at `p`.
    fn successes(&self, p: f64, range: std::ops::Range<u64>) -> u64 {
        let cfg = self.cfg;
        let hits = cfg.run_trials(&self.pool, range, |t| {
            torus_percolates(&sample_initial(cfg.n, p, cfg.seed, t), &self.compiled, self.budget)
        });
        hits.into_iter().filter(|&b| b).count() as u64
    }

    fn row(&self, p: f64, trials: u64, successes: u64) -> EstimateRow {
        EstimateRow::new(&self.cfg.label, self.cfg.n, p, trials, successes)
    }
}

/// One row per grid point. Trial `t` reuses the same uniform draws at every `p`.
pub fn percolation_probability(cfg: &ExperimentConfig, grid: &[f64]) -> Result<Vec<EstimateRow>, ConfigError> {
    grid.iter().try_for_each(|&p| check_p(p))?;
    let s = Sampler::new(cfg)?;
    Ok(grid
        .iter()
        .map(|&p| s.row(p, cfg.trials, s.successes(p, 0..cfg.trials)))
        .collect())
}

/// Trials are spent in batches of this size until the interval excludes 1/2.
pub const PC_BATCH: u64 = 50;
/// Normal quantile for early stopping (two-sided 99.9%).
pub const PC_INTERIM_Z: f64 = 3.290_526_731_491_926;
/// Bisection stops once `hi - lo < PC_RELATIVE_WIDTH · hi`; an absolute width would exceed p_c itself for small thresholds.
pub const PC_RELATIVE_WIDTH: f64 = 1.0 / 1024.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PcEstimate {
    /// Geometric centre of `interval`.
    pub p_hat: f64,
    /// Largest evaluated p confidently below 1/2 and smallest confidently above.
    pub interval: (f64, f64),
    pub evaluations: Vec<EstimateRow>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PcError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("bounds do not bracket 1/2: P({lo}) ≈ {p_lo}, P({hi}) ≈ {p_hi}")]
    NotBracketing { lo: f64, hi: f64, p_lo: f64, p_hi: f64 },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Below,
    Above,
    Undecided,
}

fn side(row: &EstimateRow) -> Side {
    side_at(row.wilson_lo, row.wilson_hi)
}

fn side_at(lo: f64, hi: f64) -> Side {
    if hi < 0.5 {
        Side::Below
    } else if lo > 0.5 {
        Side::Above
    } else {
        Side::Undecided
    }
}

/// Sequential batches at `p` until the interval excludes 1/2 or `cfg.trials` are spent.
/// Interim looks use the stricter `PC_INTERIM_Z` so that repeated looks do not
/// inflate the error rate of the final 95% verdict.
fn sequential_row(s: &Sampler, p: f64) -> EstimateRow {
    let mut done = 0;
    let mut succ = 0;
    loop {
        let next = (done + PC_BATCH).min(s.cfg.trials);
        succ += s.successes(p, done..next);
        done = next;
        let row = s.row(p, done, succ);
        if done == s.cfg.trials {
            return row;
        }
        let (lo, hi) = wilson(succ, done, PC_INTERIM_Z);
        if side_at(lo, hi) != Side::Undecided {
            return row;
        }
    }
}

fn narrow(b: f64, a: f64) -> bool {
    b - a >= PC_RELATIVE_WIDTH * b
}

/// Geometric bisection for the least p with `P_p(percolates) ≥ 1/2`.
///
/// Only confident verdicts move the bracket ends, so both ends of the returned
/// interval carry a Wilson interval that excludes 1/2. Once a midpoint is
/// undecided after all trials, the two ends are refined separately toward it.
pub fn estimate_pc(cfg: &ExperimentConfig, lo: f64, hi: f64) -> Result<PcEstimate, PcError> {
    if !(lo > 0.0 && lo < hi && hi <= 1.0) {
        return Err(ConfigError::BadBounds { lo, hi }.into());
    }
    let s = Sampler::new(cfg)?;
    let at_lo = sequential_row(&s, lo);
    let at_hi = sequential_row(&s, hi);
    if side(&at_lo) != Side::Below || side(&at_hi) != Side::Above {
        return Err(PcError::NotBracketing {
            lo,
            hi,
            p_lo: at_lo.phat,
            p_hi: at_hi.phat,
        });
    }
    let mut evaluations = vec![at_lo, at_hi];
    let mut eval = |p: f64| {
        let row = sequential_row(&s, p);
        let v = side(&row);
        evaluations.push(row);
        v
    };
    let (mut a, mut b) = (lo, hi);
    let mut undecided = None;
    while narrow(b, a) {
        let mid = (a * b).sqrt();
        match eval(mid) {
            Side::Below => a = mid,
            Side::Above => b = mid,
            Side::Undecided => {
                undecided = Some(mid);
                break;
            }
        }
    }
    if let Some(m) = undecided {
        // Lower end: confident points raise `a`; anything else lowers the probe ceiling.
        let mut ceil = m;
        while narrow(ceil, a) {
            let mid = (a * ceil).sqrt();
            if eval(mid) == Side::Below {
                a = mid;
            } else {
                ceil = mid;
            }
        }
        let mut floor = m;
        while narrow(b, floor) {
            let mid = (floor * b).sqrt();
            if eval(mid) == Side::Above {
                b = mid;
            } else {
                floor = mid;
            }
        }
    }
    Ok(PcEstimate {
        p_hat: (a * b).sqrt(),
        interval: (a, b),
        evaluations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TauOutcome {
    Infected(u64),
    /// The dynamics stopped without reaching the origin.
    Stuck,
    /// The budget ran out first.
    Exhausted,
}

/// Origin infection time on the torus.
pub fn tau_outcome(lat: &Lattice, family: &CompiledFamily, budget: u64) -> TauOutcome {
    let (c, r) = lat.cell_of((0, 0)).expect("the origin lies on every torus");
    if lat.get_cell(c, r) {
        return TauOutcome::Infected(0);
    }
    let mut cur = lat.clone();
    let mut stepper = Stepper::new(family);
    for t in 1..=budget {
        let changed = stepper.step(&mut cur);
        if cur.get_cell(c, r) {
            return TauOutcome::Infected(t);
        }
        if !changed {
            return TauOutcome::Stuck;
        }
    }
    TauOutcome::Exhausted
}

/// Samples at one p. `row.successes` counts trials whose τ was measured; the rest are discarded.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TauRow {
    pub row: EstimateRow,
    pub samples: Vec<u64>,
    pub exhausted: u64,
    pub stuck: u64,
    /// More than `TAU_ABORT_RATE` of the trials were discarded.
    pub aborted: bool,
}

pub const TAU_ABORT_RATE: f64 = 0.2;

/// τ budget: `max_steps` if given, otherwise `n/4`. Either way `n ≥ 4·budget`.
pub fn tau_budget(cfg: &ExperimentConfig) -> Result<u64, ConfigError> {
    let budget = cfg.max_steps.unwrap_or(cfg.n as u64 / 4);
    if 4 * budget > cfg.n as u64 {
        return Err(ConfigError::WrapGuard { n: cfg.n, budget });
    }
    Ok(budget)
}

pub fn tau_row(cfg: &ExperimentConfig, p: f64) -> Result<TauRow, ConfigError> {
    check_p(p)?;
    cfg.validate()?;
    let budget = tau_budget(cfg)?;
    let compiled = CompiledFamily::new(&cfg.family);
    let pool = cfg.pool()?;
    let outcomes = cfg.run_trials(&pool, 0..cfg.trials, |t| {
        tau_outcome(&sample_initial(cfg.n, p, cfg.seed, t), &compiled, budget)
    });
    let mut samples = Vec::new();
    let (mut exhausted, mut stuck) = (0, 0);
    for o in outcomes {
        match o {
            TauOutcome::Infected(t) => samples.push(t),
            TauOutcome::Exhausted => exhausted += 1,
            TauOutcome::Stuck => stuck += 1,
        }
    }
    let mut row = EstimateRow::new(&cfg.label, cfg.n, p, cfg.trials, samples.len() as u64);
    let xs: Vec<f64> = samples.iter().map(|&t| t as f64).collect();
    row.tau_median = crate::stats::median(&xs);
    row.tau_mean = crate::stats::mean(&xs);
    let aborted = (exhausted + stuck) as f64 > TAU_ABORT_RATE * cfg.trials as f64;
    Ok(TauRow {
        row,
        samples,
        exhausted,
        stuck,
        aborted,
    })
}
