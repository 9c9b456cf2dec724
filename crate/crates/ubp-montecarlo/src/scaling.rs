use serde::Serialize;

use crate::experiment::{tau_row, ConfigError, ExperimentConfig, TauRow};
use crate::sample::draw_index;
use crate::stats::{linear_fit, median, std_dev, LinearFit};

pub const BOOTSTRAP_ROUNDS: u64 = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FitKind {
    /// log τ̃ against log(1/p); flat-ish slope for power-law growth.
    LogLog,
    /// log log τ̃ against log(1/p); the slope estimates the exponent in τ = exp(p^{-a}).
    LogLogLog,
    /// log τ̃ against 1/p; linear when τ = exp(Θ(1/p)).
    LogInverse,
}

impl FitKind {
    pub const ALL: [FitKind; 3] = [FitKind::LogLog, FitKind::LogLogLog, FitKind::LogInverse];

    /// `None` when the point is outside the transform's domain.
    fn point(self, p: f64, tau: f64) -> Option<(f64, f64)> {
        let y = match self {
            FitKind::LogLog | FitKind::LogInverse if tau > 0.0 => tau.ln(),
            FitKind::LogLogLog if tau > 1.0 => tau.ln().ln(),
            _ => return None,
        };
        let x = if self == FitKind::LogInverse {
            1.0 / p
        } else {
            (1.0 / p).ln()
        };
        Some((x, y))
    }
}

/// Fit of the per-p medians; rows that aborted are left out.
pub fn fit_medians(rows: &[(f64, f64)], kind: FitKind) -> Option<LinearFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows.iter().filter_map(|&(p, t)| kind.point(p, t)).unzip();
    linear_fit(&xs, &ys)
}

/// Median fit plus the bootstrap standard error of its slope, resampling trials within each p.
pub fn fit_with_bootstrap(rows: &[TauRow], kind: FitKind, seed: u64) -> Option<LinearFit> {
    let kept: Vec<&TauRow> = rows.iter().filter(|r| !r.aborted && !r.samples.is_empty()).collect();
    let medians: Vec<(f64, f64)> = kept
        .iter()
        .map(|r| (r.row.p, r.row.tau_median.unwrap_or(0.0)))
        .collect();
    let mut fit = fit_medians(&medians, kind)?;
    let mut slopes = Vec::new();
    for round in 0..BOOTSTRAP_ROUNDS {
        let resampled: Vec<(f64, f64)> = kept
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let n = r.samples.len();
                let stream = round * kept.len() as u64 + i as u64;
                let xs: Vec<f64> = (0..n as u64)
                    .map(|j| r.samples[draw_index(seed, stream, j, n)] as f64)
                    .collect();
                (r.row.p, median(&xs).unwrap_or(0.0))
            })
            .collect();
        if let Some(f) = fit_medians(&resampled, kind) {
            slopes.push(f.slope);
        }
    }
    fit.slope_stderr = std_dev(&slopes);
    Some(fit)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TauFits {
    pub log_log: Option<LinearFit>,
    pub log_log_log: Option<LinearFit>,
    pub log_inverse: Option<LinearFit>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TauScaling {
    pub rows: Vec<TauRow>,
    pub fits: TauFits,
    /// Grid points dropped for too many discarded trials.
    pub aborted: Vec<f64>,
}

pub fn summarize(rows: Vec<TauRow>, seed: u64) -> TauScaling {
    let fits = TauFits {
        log_log: fit_with_bootstrap(&rows, FitKind::LogLog, seed),
        log_log_log: fit_with_bootstrap(&rows, FitKind::LogLogLog, seed),
        log_inverse: fit_with_bootstrap(&rows, FitKind::LogInverse, seed),
    };
    let aborted = rows.iter().filter(|r| r.aborted).map(|r| r.row.p).collect();
    TauScaling { rows, fits, aborted }
}

pub fn tau_scaling(cfg: &ExperimentConfig, grid: &[f64]) -> Result<TauScaling, ConfigError> {
    let rows = grid.iter().map(|&p| tau_row(cfg, p)).collect::<Result<Vec<_>, _>>()?;
    Ok(summarize(rows, cfg.seed))
}

/// `steps` evenly spaced points from `lo` to `hi` inclusive, rounded to 12
/// decimals so that decimal grids print as typed.
pub fn linear_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![lo],
        _ => (0..steps)
            .map(|i| {
                let x = (lo * (steps - 1 - i) as f64 + hi * i as f64) / (steps - 1) as f64;
                (x * 1e12).round() / 1e12
            })
            .collect(),
    }
}
