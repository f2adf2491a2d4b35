use crate::dist::Mmpp;
use crate::error::{Error, Result};

/// The exponentially transformed transition matrix `T_θ` of the
/// modulating chain, with states ordered (inactive, active):
///
/// ```text
/// T_θ = | 0   a |     a = λ_act/(λ_act+θ)
///       | b   c |     b = p·λ_iact/(λ_iact+θ),  c = (1−p)·λ_act/(λ_act+θ)
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovTransform {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Spectral radius ξ(θ).
    pub xi: f64,
    pub h_act: f64,
    pub h_iact: f64,
}

impl MarkovTransform {
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[0.0, self.a], [self.b, self.c]]
    }

    /// `‖T_θ h − ξ h‖_∞` with `h` ordered like the matrix.
    pub fn eigen_residual(&self) -> f64 {
        let h = [self.h_iact, self.h_act];
        let m = self.matrix();
        (0..2).map(|i| (m[i][0] * h[0] + m[i][1] * h[1] - self.xi * h[i]).abs()).fold(0.0, f64::max)
    }
}

pub fn markov_transform(chain: &Mmpp, theta: f64) -> Result<MarkovTransform> {
    let (la, li, p) = (chain.rate_active(), chain.rate_inactive(), chain.p());
    if !(theta >= 0.0 && theta < li) {
        return Err(Error::DomainError(format!("transform needs 0 <= theta < {li} (inactive rate), got {theta}")));
    }
    let a = la / (la + theta);
    let b = p * li / (li + theta);
    let c = (1.0 - p) * la / (la + theta);
    let xi = 0.5 * (c + (c * c + 4.0 * a * b).sqrt());
    Ok(MarkovTransform { a, b, c, xi, h_act: 1.0, h_iact: a / xi })
}
