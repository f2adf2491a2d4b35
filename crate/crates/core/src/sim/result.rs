use std::fmt::Write as _;

use super::empirical::{ccdf_sorted, quantile_sorted};
use super::SystemConfig;

/// Collects per-job observations while a simulation runs.
pub(crate) struct Recorder {
    warmup: usize,
    seen: usize,
    responses: Vec<f64>,
    trace: Option<Vec<f64>>,
    service_sum: f64,
    service_sq: f64,
    pub busy: Vec<f64>,
    pub horizon: f64,
}

impl Recorder {
    pub fn new(cfg: &SystemConfig, servers: usize) -> Self {
        let warmup = cfg.warmup_jobs();
        Self {
            warmup,
            seen: 0,
            responses: Vec::with_capacity(cfg.n_jobs - warmup.min(cfg.n_jobs)),
            trace: cfg.record_trace.then(|| Vec::with_capacity(cfg.n_jobs)),
            service_sum: 0.0,
            service_sq: 0.0,
            busy: vec![0.0; servers],
            horizon: 0.0,
        }
    }

    /// Records one job in arrival order.
    pub fn job(&mut self, response: f64, service: f64) {
        if let Some(t) = self.trace.as_mut() {
            t.push(response);
        }
        if self.seen >= self.warmup {
            self.responses.push(response);
            self.service_sum += service;
            self.service_sq += service * service;
        }
        self.seen += 1;
    }

    pub fn finish(self, cfg: &SystemConfig) -> SimResult {
        let mut samples = self.responses;
        samples.sort_unstable_by(f64::total_cmp);
        let n = samples.len();
        let (mean, variance) = mean_var(&samples);
        let service_mean = if n > 0 { self.service_sum / n as f64 } else { f64::NAN };
        let service_variance =
            if n > 1 { (self.service_sq - n as f64 * service_mean * service_mean) / (n - 1) as f64 } else { 0.0 };
        let utilizations = self.busy.iter().map(|b| if self.horizon > 0.0 { b / self.horizon } else { 0.0 }).collect();
        SimResult {
            samples,
            trace: self.trace,
            mean,
            variance,
            service_mean,
            service_variance,
            utilizations,
            seed: cfg.seed,
            config: cfg.to_string(),
        }
    }
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = if n > 1 { xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
    (mean, var)
}

/// Outcome of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    /// Post-warm-up response times, ascending.
    pub samples: Vec<f64>,
    /// All response times in arrival order, when requested.
    pub trace: Option<Vec<f64>>,
    pub mean: f64,
    pub variance: f64,
    /// Moments of the time each job spends in service.
    pub service_mean: f64,
    pub service_variance: f64,
    /// Busy fraction of every server over the run.
    pub utilizations: Vec<f64>,
    pub seed: u64,
    pub config: String,
}

/// Headline statistics, in the order of [`Summary::CSV_HEADER`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub q50: f64,
    pub q90: f64,
    pub q95: f64,
    pub q99: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub u: f64,
    pub seed: u64,
}

impl Summary {
    pub const CSV_HEADER: &'static str = "count,mean,var,q50,q90,q95,q99,rho1,rho2,u,seed";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.count,
            self.mean,
            self.variance,
            self.q50,
            self.q90,
            self.q95,
            self.q99,
            self.rho1,
            self.rho2,
            self.u,
            self.seed
        )
    }
}

impl SimResult {
    pub const GRID_POINTS: usize = 64;

    pub fn count(&self) -> usize {
        self.samples.len()
    }

    /// Order-statistic quantile, see [`empirical_quantile`](super::empirical_quantile).
    pub fn quantile(&self, p: f64) -> f64 {
        quantile_sorted(&self.samples, p)
    }

    /// Fraction of samples `≥ sigma`.
    pub fn ccdf(&self, sigma: f64) -> f64 {
        ccdf_sorted(&self.samples, sigma)
    }

    /// Geometric σ-grid between the 10th and the 99.99th percentile.
    pub fn sigma_grid(&self) -> Vec<f64> {
        if self.samples.is_empty() {
            return Vec::new();
        }
        let hi = self.quantile(0.9999);
        let mut lo = self.quantile(0.10);
        if lo <= 0.0 {
            lo = self.samples.iter().copied().find(|&x| x > 0.0).unwrap_or(0.0);
        }
        if !(hi > lo && lo > 0.0) {
            return vec![hi];
        }
        let n = Self::GRID_POINTS;
        let ratio = (hi / lo).ln() / (n - 1) as f64;
        (0..n).map(|i| lo * (ratio * i as f64).exp()).collect()
    }

    /// `(σ, P̂(r ≥ σ))` on [`sigma_grid`](Self::sigma_grid).
    pub fn ccdf_points(&self) -> Vec<(f64, f64)> {
        self.sigma_grid().into_iter().map(|s| (s, self.ccdf(s))).collect()
    }

    /// `(p, quantile)` for a fixed set of probabilities.
    pub fn quantile_grid(&self) -> Vec<(f64, f64)> {
        [0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99, 0.999, 0.9999].into_iter().map(|p| (p, self.quantile(p))).collect()
    }

    pub fn summary(&self) -> Summary {
        let rho = |i: usize| self.utilizations.get(i).copied().unwrap_or(f64::NAN);
        Summary {
            count: self.count(),
            mean: self.mean,
            variance: self.variance,
            q50: self.quantile(0.5),
            q90: self.quantile(0.9),
            q95: self.quantile(0.95),
            q99: self.quantile(0.99),
            rho1: rho(0),
            rho2: rho(1),
            u: self.utilizations.iter().sum(),
            seed: self.seed,
        }
    }

    pub fn ccdf_csv(&self) -> String {
        let mut out = String::from("sigma,ccdf\n");
        for (s, c) in self.ccdf_points() {
            let _ = writeln!(out, "{s},{c}");
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        format!("{}\n{}\n", Summary::CSV_HEADER, self.summary().csv_row())
    }

    /// Mean of the first and last tenth of the trace.
    pub fn trace_decile_means(&self) -> Option<(f64, f64)> {
        let t = self.trace.as_ref()?;
        let d = t.len() / 10;
        if d == 0 {
            return None;
        }
        let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
        Some((mean(&t[..d]), mean(&t[t.len() - d..])))
    }
}
