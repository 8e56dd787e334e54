//! `F(X) = ∫₀^X J₁(t)² dt`, the primitive needed to average the squared Airy
//! pattern of a disc over a uniform diameter law.
//!
//! Below `ASYMPTOTIC_START` the primitive is tabulated at spacing `STEP` together
//! with `F' = J₁²` and `F'' = 2J₁J₁'`, and read by quintic Hermite interpolation;
//! beyond, the Hankel expansion of `J₁²` is integrated term by term.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::numerics::bessel::{j0, j1};
use crate::numerics::quadrature::gauss_kronrod21;

const STEP: f64 = 0.025;
const ASYMPTOTIC_START: f64 = 400.0;

/// `(F, F', F'')` at each node.
fn table() -> &'static [[f64; 3]] {
    static TABLE: OnceLock<Vec<[f64; 3]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = (ASYMPTOTIC_START / STEP).round() as usize;
        let f = |t: f64| j1(t).powi(2);
        let derivatives = |x: f64| {
            let b1 = j1(x);
            let db1 = if x == 0.0 { 0.5 } else { j0(x) - b1 / x };
            (b1 * b1, 2.0 * b1 * db1)
        };
        let mut out = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        for i in 0..=n {
            let a = i as f64 * STEP;
            if i > 0 {
                acc += gauss_kronrod21(&f, a - STEP, a).0;
            }
            let (d1, d2) = derivatives(a);
            out.push([acc, d1, d2]);
        }
        out
    })
}

fn hermite(lo: &[f64; 3], hi: &[f64; 3], t: f64) -> f64 {
    let (t2, t3) = (t * t, t * t * t);
    let (t4, t5) = (t3 * t, t3 * t2);
    let h = STEP;
    lo[0] * (1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5)
        + h * lo[1] * (t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5)
        + h * h * lo[2] * 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5)
        + h * h * hi[2] * 0.5 * (t3 - 2.0 * t4 + t5)
        + h * hi[1] * (-4.0 * t3 + 7.0 * t4 - 3.0 * t5)
        + hi[0] * (10.0 * t3 - 15.0 * t4 + 6.0 * t5)
}

/// `∫₀^x J₁(t)² dt` for `x ≥ 0`.
pub fn j1_squared_integral(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < 0.02 {
        let x2 = x * x;
        return x * x2 * (1.0 / 12.0 - x2 / 80.0 + x2 * x2 * (5.0 / 5376.0 - 7.0 * x2 / 165888.0));
    }
    if x <= ASYMPTOTIC_START {
        let table = table();
        let i = ((x / STEP) as usize).min(table.len() - 2);
        let t = x / STEP - i as f64;
        return hermite(&table[i], &table[i + 1], t);
    }
    let base = table()[table().len() - 1][0];
    let x0 = ASYMPTOTIC_START;
    base + (x / x0).ln() / PI + smooth(x) - smooth(x0) + oscillating(x) - oscillating(x0)
}

fn smooth(x: f64) -> f64 {
    let t2 = 1.0 / (x * x);
    t2 * (-3.0 / 16.0 + t2 * (45.0 / 512.0 + t2 * (-525.0 / 2048.0))) / PI
}

fn oscillating(x: f64) -> f64 {
    let t = 1.0 / x;
    let t2 = t * t;
    let (s, c) = (2.0 * x).sin_cos();
    let sin_coef = t2 * (-1.0 / 8.0 + t2 * (81.0 / 256.0 + t2 * (-33435.0 / 16384.0)));
    let cos_coef = t * (0.5 + t2 * (11.0 / 64.0 + t2 * (-2997.0 / 4096.0 + t2 * (874575.0 / 131072.0))));
    (s * sin_coef + c * cos_coef) / PI
}
