//! Adaptive Gauss–Kronrod quadrature on finite intervals and on `[0, ∞)`.
//!
//! Integrands on the half line are supplied in log form (`ln g(x)`), which
//! keeps products like `e^{θx}·S(x)^k` finite far into the tail where the
//! factors would individually overflow or underflow.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss 7-point weights, attached to XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

const MAX_PANELS: usize = 4000;

/// Relative tolerance used by the distribution transforms.
pub const DEFAULT_REL_TOL: f64 = 1e-12;

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (i, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive G7K15 on `[a, b]`. Stops once the summed error
/// estimate is below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let (value, error) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut panels = 1;
    while total_err > abs_tol.max(rel_tol * total.abs()) && panels < MAX_PANELS {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let (lv, le) = gk15(&f, worst.a, mid);
        let (rv, re) = gk15(&f, mid, worst.b);
        total += lv + rv - worst.value;
        total_err += le + re - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: lv, error: le });
        heap.push(Panel { a: mid, b: worst.b, value: rv, error: re });
        panels += 1;
    }
    // re-sum to shed accumulated cancellation from the running updates
    heap.iter().map(|p| p.value).sum()
}

/// `∫₀^∞ exp(log_g(x)) dx`.
///
/// `[0, 1]` is integrated directly; `[1, ∞)` through `x = e^s`, over
/// doubling panels in `s`, so both polynomial and exponential tails
/// converge. `breaks` lists points where the integrand has a kink or jump.
pub fn integrate_half_line<F: Fn(f64) -> f64>(log_g: F, breaks: &[f64], rel_tol: f64) -> f64 {
    let g = |x: f64| {
        let l = log_g(x);
        if l == f64::NEG_INFINITY || l.is_nan() {
            0.0
        } else {
            l.exp()
        }
    };

    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|b| b.is_finite() && *b > 0.0).collect();
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut total = 0.0;
    let mut lo = 0.0;
    for &c in cuts.iter().filter(|&&c| c <= 1.0) {
        total += integrate(g, lo, c, rel_tol, 0.0);
        lo = c;
    }

    // tail in s = ln x
    let tail = |s: f64| {
        let x = s.exp();
        let l = log_g(x);
        if l == f64::NEG_INFINITY || l.is_nan() {
            0.0
        } else {
            (l + s).exp()
        }
    };
    let mut s_cuts: Vec<f64> = cuts.iter().filter(|&&c| c > 1.0).map(|c| c.ln()).collect();
    let mut edge = 1.0;
    while edge < 709.0 {
        s_cuts.push(edge);
        edge *= 2.0;
    }
    s_cuts.push(709.0);
    s_cuts.sort_by(f64::total_cmp);
    s_cuts.dedup();

    let mut s_lo = 0.0;
    let mut quiet = 0;
    for &s_hi in &s_cuts {
        let piece = integrate(tail, s_lo, s_hi, rel_tol, 1e-18 * total.abs());
        total += piece;
        s_lo = s_hi;
        if piece.abs() <= 1e-17 * total.abs() && tail(s_hi) <= 1e-17 * total.abs() {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    total
}
