use crate::error::{Error, Result};

/// Outcome of the decay-rate search on `ln Φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Search {
    /// Largest bisection point with `Φ < 1`.
    Root(f64),
    /// `Φ < 1` up to the edge of the admissible interval.
    BelowOneToCap(f64),
}

const MAX_BISECTIONS: usize = 200;

/// Locates the positive root of `ln Φ` on `(0, theta_max)`.
///
/// Assumes `Φ(0) = 1` with negative initial slope and `ln Φ` convex, so
/// the feasible set `{Φ ≤ 1}` is an interval `[0, θ*]`. Evaluation
/// failures with [`Error::MgfDiverges`] count as lying above the root.
pub(crate) fn search<F>(log_phi: F, theta_max: f64) -> Result<Search>
where
    F: Fn(f64) -> Result<f64>,
{
    let above = |theta: f64| -> Result<bool> {
        match log_phi(theta) {
            Ok(v) => Ok(!(v < 0.0)),
            Err(Error::MgfDiverges { .. }) => Ok(true),
            Err(e) => Err(e),
        }
    };

    let mut lo = if theta_max.is_finite() { (theta_max / 1024.0).min(1e-3) } else { 1e-3 };
    let mut shrink = 0;
    while above(lo)? {
        lo *= 0.5;
        shrink += 1;
        if shrink > 1000 || lo == 0.0 {
            return Err(Error::UnstableBound);
        }
    }

    let mut hi = None;
    loop {
        let next = 2.0 * lo;
        if next >= theta_max || !next.is_finite() {
            break;
        }
        if above(next)? {
            hi = Some(next);
            break;
        }
        lo = next;
    }
    if hi.is_none() {
        if !theta_max.is_finite() {
            return Ok(Search::BelowOneToCap(lo));
        }
        // creep toward the domain edge: θ_max·(1 − 2^{-j})
        for j in 1..=60 {
            let probe = theta_max * (1.0 - 0.5f64.powi(j));
            if probe <= lo || probe >= theta_max {
                continue;
            }
            if above(probe)? {
                hi = Some(probe);
                break;
            }
            lo = probe;
        }
    }
    let Some(mut hi) = hi else {
        return Ok(Search::BelowOneToCap(lo));
    };

    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= 1e-15 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Search::Root(lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mm1_root() {
        // ln(1/(1-θ)) + ln(0.5/(0.5+θ)) has its root at 0.5
        let f = |t: f64| {
            if t >= 1.0 {
                Err(Error::MgfDiverges { theta: t, abscissa: 1.0 })
            } else {
                Ok(-(1.0 - t).ln() + (0.5 / (0.5 + t)).ln())
            }
        };
        let Search::Root(t) = search(f, 1.0).unwrap() else { panic!() };
        assert!((t - 0.5).abs() < 1e-12);
    }

    #[test]
    fn root_right_below_pole() {
        // Φ(θ) = (1/(1-θ))·e^{-θ·L}; the root sits at θ ≈ 0.993
        let l: f64 = 5.0;
        let f = |t: f64| Ok(-(1.0 - t).ln() - l * t);
        let Search::Root(t) = search(f, 1.0).unwrap() else { panic!() };
        assert!((-(1.0 - t).ln() - l * t).abs() < 1e-10);
        assert!(t > 0.9);
    }

    #[test]
    fn unbounded_domain_without_root() {
        let f = |t: f64| Ok(-t);
        assert!(matches!(search(f, 0.3).unwrap(), Search::BelowOneToCap(c) if c < 0.3 && c > 0.29));
    }
}
