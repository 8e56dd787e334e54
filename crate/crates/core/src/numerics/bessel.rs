//! Bessel functions of the first kind, orders 0 and 1.
//!
//! Three regimes keep the absolute error near machine precision:
//! the ascending series for `|x| < 8`, Miller's backward recurrence
//! normalized by `J₀ + 2ΣJ₂ₖ = 1` for `8 ≤ |x| < 25`, and the Hankel
//! asymptotic expansion beyond.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 8.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;

/// Bessel function J₀.
pub fn j0(x: f64) -> f64 {
    let x = x.abs();
    if x < SERIES_LIMIT {
        series(0, x)
    } else if x < ASYMPTOTIC_LIMIT {
        miller(x).0
    } else {
        asymptotic(0, x)
    }
}

/// Bessel function J₁.
pub fn j1(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    sign * if x < SERIES_LIMIT {
        series(1, x)
    } else if x < ASYMPTOTIC_LIMIT {
        miller(x).1
    } else {
        asymptotic(1, x)
    }
}

/// `J_order(x)` for `order ∈ {0, 1}` and `x ≥ 0`.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::invalid("x", format!("must be finite and non-negative, got {x}")));
    }
    match order {
        0 => Ok(j0(x)),
        1 => Ok(j1(x)),
        _ => Err(Error::invalid("order", format!("only 0 and 1 are supported, got {order}"))),
    }
}

/// `2 J₁(x) / x`, the Airy amplitude of a uniformly illuminated disc; equals 1 at `x = 0`.
pub fn jinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let y = x * x;
        1.0 - y / 8.0 + y * y / 192.0
    } else {
        2.0 * j1(x) / x
    }
}

/// The `m`-th positive zero of J₀ (`m ≥ 1`), McMahon estimate refined by Newton steps.
pub fn j0_zero(m: usize) -> f64 {
    let beta = (m as f64 - 0.25) * PI;
    let b2 = beta * beta;
    let mut z = beta + 1.0 / (8.0 * beta) - 31.0 / (384.0 * beta * b2) + 3779.0 / (15360.0 * beta * b2 * b2);
    for _ in 0..3 {
        let d = j1(z);
        if d == 0.0 {
            break;
        }
        z += j0(z) / d;
    }
    z
}

fn series(order: u32, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let (mut term, scale) = if order == 0 { (1.0, 1.0) } else { (1.0, 0.5 * x) };
    let mut sum = term;
    let mut k = 0.0_f64;
    loop {
        k += 1.0;
        let denom = if order == 0 { k * k } else { k * (k + 1.0) };
        term *= -q / denom;
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > x {
            break;
        }
        if k > 200.0 {
            break;
        }
    }
    scale * sum
}

/// Miller's backward recurrence; returns `(J₀(x), J₁(x))`.
fn miller(x: f64) -> (f64, f64) {
    let mut n = (x.ceil() as usize + 40) & !1;
    if n < 2 {
        n = 2;
    }
    let two_over_x = 2.0 / x;
    let mut above = 0.0_f64;
    let mut current = 1e-30_f64;
    let mut norm = 0.0_f64;
    let mut j1 = 0.0;
    // current holds J_n, above holds J_{n+1}
    while n > 0 {
        let below = n as f64 * two_over_x * current - above;
        above = current;
        current = below;
        n -= 1;
        if n % 2 == 0 && n > 0 {
            norm += 2.0 * current;
        }
        if n == 1 {
            j1 = current;
        }
        if current.abs() > 1e250 {
            current *= 1e-250;
            above *= 1e-250;
            norm *= 1e-250;
            j1 *= 1e-250;
        }
    }
    norm += current;
    (current / norm, j1 / norm)
}

fn asymptotic(order: u32, x: f64) -> f64 {
    let mu = 4.0 * (order * order) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0_f64;
    let mut previous = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        let size = a.abs();
        if size > previous || size < 1e-18 {
            break;
        }
        previous = size;
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
    }
    let (s, c) = x.sin_cos();
    let (cos_chi, sin_chi) = if order == 0 {
        ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2)
    } else {
        ((s - c) * FRAC_1_SQRT_2, (-s - c) * FRAC_1_SQRT_2)
    };
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Trapezoid rule on the periodic Bessel integral `(1/π)∫₀^π cos(nθ − x sin θ) dθ`,
    /// exact to rounding once the node count exceeds `x` comfortably.
    fn integral_representation(order: u32, x: f64) -> f64 {
        let m = 4 * (x as usize) + 200;
        let h = PI / m as f64;
        let f = |t: f64| (order as f64 * t - x * t.sin()).cos();
        let mut sum = 0.5 * (f(0.0) + f(PI));
        for i in 1..m {
            sum += f(i as f64 * h);
        }
        sum * h / PI
    }

    #[test]
    fn values_at_origin() {
        assert_eq!(j0(0.0), 1.0);
        assert_eq!(j1(0.0), 0.0);
    }

    #[test]
    fn first_zero_of_j0() {
        assert!(j0(2.404825557695773).abs() < 1e-10);
        assert!((j0_zero(1) - 2.404825557695773).abs() < 1e-12);
        assert!((j0_zero(2) - 5.520078110286311).abs() < 1e-12);
        assert!(j0(j0_zero(40)).abs() < 1e-14);
    }

    #[test]
    fn matches_integral_representation_across_regimes() {
        let mut x = 0.0;
        while x < 400.0 {
            for order in 0..2 {
                let got = bessel_j(order, x).unwrap();
                let want = integral_representation(order, x);
                assert!((got - want).abs() < 1e-13, "J{order}({x}): {got} vs {want}");
            }
            x += 0.37;
        }
    }

    #[test]
    fn regimes_join_continuously() {
        for &edge in &[SERIES_LIMIT, ASYMPTOTIC_LIMIT] {
            for order in 0..2 {
                let h = 1e-9;
                let below = bessel_j(order, edge - h).unwrap();
                let above = bessel_j(order, edge + h).unwrap();
                let slope = (bessel_j(order, edge + 0.01).unwrap()
                    - bessel_j(order, edge - 0.01).unwrap())
                    / 0.02;
                assert!((above - below - 2.0 * h * slope).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn large_argument_against_wronskian() {
        // J₁(x)Y₀(x) − J₀(x)Y₁(x) = 2/(πx) is not available without Y, so use the
        // modulus bound J₀² + J₁² ≈ 2/(πx) to 1/x² accuracy instead.
        for &x in &[1e3, 5e3, 1e4] {
            let m = j0(x).powi(2) + j1(x).powi(2);
            assert!((m * PI * x / 2.0 - 1.0).abs() < 1.0 / x);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(bessel_j(2, 1.0).is_err());
        assert!(bessel_j(0, -1.0).is_err());
        assert!(bessel_j(0, f64::NAN).is_err());
    }

    #[test]
    fn jinc_small_argument() {
        assert_eq!(jinc(0.0), 1.0);
        assert!((jinc(1e-5) - 2.0 * j1(1e-5) / 1e-5).abs() < 1e-15);
        assert!((jinc(3.0) - 2.0 * j1(3.0) / 3.0).abs() < 1e-16);
    }
}
