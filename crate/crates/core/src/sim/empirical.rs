use crate::error::{Error, Result};

pub(crate) fn ccdf_sorted(sorted: &[f64], sigma: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let below = sorted.partition_point(|&x| x < sigma);
    (sorted.len() - below) as f64 / sorted.len() as f64
}

/// The `⌈p·n⌉`-th smallest sample (1-based), the first one for `p = 0`.
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let n = sorted.len();
    let rank = (p.clamp(0.0, 1.0) * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

fn sorted_copy(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut v = samples.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    Ok(v)
}

/// Fraction of `samples` at or above each σ.
pub fn empirical_ccdf(samples: &[f64], sigmas: &[f64]) -> Result<Vec<f64>> {
    let v = sorted_copy(samples)?;
    Ok(sigmas.iter().map(|&s| ccdf_sorted(&v, s)).collect())
}

pub fn empirical_quantile(samples: &[f64], p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::DomainError(format!("probability must lie in [0, 1], got {p}")));
    }
    Ok(quantile_sorted(&sorted_copy(samples)?, p))
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    let (a, b) = (sorted_copy(a)?, sorted_copy(b)?);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}
