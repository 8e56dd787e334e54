//! Globally adaptive 21-point Gauss–Kronrod quadrature on finite intervals,
//! and doubling-chunk integration over `[0, ∞)`.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_365_315,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Result of a quadrature with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// One Gauss–Kronrod 21-point panel on `[a, b]`; returns `(integral, error)`.
pub fn gauss_kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let (value, error, _) = kronrod_panel(f, a, b);
    (value, error)
}

fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut abs_sum = kronrod.abs();
    let mut values = [0.0; 21];
    values[20] = fc;
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        values[2 * j] = f1;
        values[2 * j + 1] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((values[2 * j] - mean).abs() + (values[2 * j + 1] - mean).abs());
    }
    let result = kronrod * half;
    let asc = asc * half.abs();
    let abs_sum = abs_sum * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs_sum);
    }
    (result, err, abs_sum)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    magnitude: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive integrator: bisects the panel with the largest error until
/// the summed error meets `max(abs_tol, rel_tol·|I|, magnitude_tol·∫|f|)`.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub magnitude_tol: f64,
    pub max_panels: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            magnitude_tol: 0.0,
            max_panels: 4000,
        }
    }
}

impl Quadrature {
    pub fn new(rel_tol: f64) -> Self {
        Quadrature {
            rel_tol,
            ..Default::default()
        }
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    /// Also accept an error below `tol` times the integral of `|f|`; useful when
    /// the signed result cancels far below the integrand's scale.
    pub fn with_magnitude_tol(mut self, tol: f64) -> Self {
        self.magnitude_tol = tol;
        self
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Estimate> {
        self.integrate_with_breaks(f, &[a, b])
    }

    /// Integrates over `[points[0], points[last]]`, starting from one panel per
    /// consecutive pair of (sorted) break points.
    pub fn integrate_with_breaks<F: Fn(f64) -> f64>(&self, f: F, points: &[f64]) -> Result<Estimate> {
        let mut heap = BinaryHeap::new();
        let mut total = 0.0;
        let mut total_err = 0.0;
        let mut magnitude = 0.0;
        let mut evaluations = 0;
        for w in points.windows(2) {
            let (a, b) = (w[0], w[1]);
            if !(b > a) {
                continue;
            }
            let (value, error, mag) = kronrod_panel(&f, a, b);
            evaluations += 21;
            total += value;
            total_err += error;
            magnitude += mag;
            heap.push(Panel { a, b, value, error, magnitude: mag });
        }
        if !total.is_finite() {
            return Err(Error::Quadrature {
                context: "non-finite integrand".into(),
                previous: total,
                last: total,
                error: total_err,
            });
        }
        let mut previous = total;
        loop {
            let target = self
                .abs_tol
                .max(self.rel_tol * total.abs())
                .max(self.magnitude_tol * magnitude);
            if total_err <= target {
                break;
            }
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.a + worst.b);
            if heap.len() + 2 > self.max_panels || !(mid > worst.a && mid < worst.b) {
                heap.push(worst);
                // Accept when the residual error is pure rounding noise.
                if total_err <= 1e3 * f64::EPSILON * heap.iter().map(|p| p.value.abs()).sum::<f64>() {
                    break;
                }
                return Err(Error::Quadrature {
                    context: format!(
                        "adaptive subdivision exhausted on [{:e}, {:e}] with {} panels",
                        points[0],
                        points[points.len() - 1],
                        heap.len()
                    ),
                    previous,
                    last: total,
                    error: total_err,
                });
            }
            let (v1, e1, m1) = kronrod_panel(&f, worst.a, mid);
            let (v2, e2, m2) = kronrod_panel(&f, mid, worst.b);
            evaluations += 42;
            previous = total;
            total += v1 + v2 - worst.value;
            total_err += e1 + e2 - worst.error;
            magnitude += m1 + m2 - worst.magnitude;
            heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1, magnitude: m1 });
            heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2, magnitude: m2 });
            if heap.len() % 64 == 0 {
                // Re-sum to avoid drift from repeated incremental updates.
                total = heap.iter().map(|p| p.value).sum();
                total_err = heap.iter().map(|p| p.error).sum();
                magnitude = heap.iter().map(|p| p.magnitude).sum();
            }
        }
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        Ok(Estimate {
            value,
            error,
            evaluations,
        })
    }
}

/// `∫₀^∞ f(x) dx` for an integrand decaying beyond `scale`.
///
/// Integrates `[0, s]`, `[s, 2s]`, `[2s, 4s]`, … until two consecutive chunks
/// fall below `1e-10` of the running total. Relative error target `1e-8`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, scale: f64) -> Result<Estimate> {
    semi_infinite_from(f, 0.0, scale, 1e-10)
}

/// Same as [`integrate_semi_infinite`] but starting at `start` with chunk tolerance `chunk_tol`.
pub fn semi_infinite_from<F: Fn(f64) -> f64>(f: F, start: f64, scale: f64, chunk_tol: f64) -> Result<Estimate> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::invalid("scale", format!("must be positive, got {scale}")));
    }
    let quad = Quadrature::new(chunk_tol * 0.1);
    let mut total: f64 = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut previous = 0.0;
    let mut small_chunks = 0;
    let mut lo = start;
    let mut width = scale;
    for _ in 0..400 {
        let hi = lo + width;
        let chunk = quad.with_abs_tol(1e-3 * chunk_tol * total.abs()).integrate(&f, lo, hi)?;
        previous = total;
        total += chunk.value;
        error += chunk.error;
        evaluations += chunk.evaluations;
        if chunk.value.abs() <= chunk_tol * total.abs() || (chunk.value == 0.0 && total == 0.0) {
            small_chunks += 1;
            if small_chunks >= 2 {
                return Ok(Estimate {
                    value: total,
                    error: error + chunk.value.abs(),
                    evaluations,
                });
            }
        } else {
            small_chunks = 0;
        }
        lo = hi;
        width = hi - start;
        if !hi.is_finite() {
            break;
        }
    }
    Err(Error::Quadrature {
        context: "semi-infinite tail did not decay".into(),
        previous,
        last: total,
        error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::constants::ZETA3;

    #[test]
    fn exponential_tail() {
        let e = integrate_semi_infinite(|x: f64| (-x).exp(), 1.0).unwrap();
        assert!((e.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gaussian_moment() {
        let e = integrate_semi_infinite(|x: f64| x * (-x * x).exp(), 1.0).unwrap();
        assert!((e.value - 0.5).abs() < 1e-10);
    }

    #[test]
    fn cubic_over_sinh_squared() {
        let f = |x: f64| if x < 1e-8 { x } else { x.powi(3) / x.sinh().powi(2) };
        let e = integrate_semi_infinite(f, 1.0).unwrap();
        assert!((e.value - 1.5 * ZETA3).abs() < 1e-8 * 1.5 * ZETA3);
    }

    #[test]
    fn algebraic_tail() {
        let e = integrate_semi_infinite(|x: f64| 1.0 / (1.0 + x * x), 1.0).unwrap();
        assert!((e.value - std::f64::consts::FRAC_PI_2).abs() < 1e-8);
    }

    #[test]
    fn non_decaying_integrand_reports_partial_sums() {
        match integrate_semi_infinite(|_| 1.0, 1.0) {
            Err(Error::Quadrature { previous, last, .. }) => assert!(last > previous),
            other => panic!("expected quadrature error, got {other:?}"),
        }
    }

    #[test]
    fn polynomials_are_exact_on_one_panel() {
        let (v, _) = gauss_kronrod21(&|x: f64| x.powi(20), 0.0, 1.0);
        assert!((v - 1.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn square_root_endpoint() {
        let e = Quadrature::new(1e-12).integrate(|x: f64| x.sqrt(), 0.0, 1.0).unwrap();
        assert!((e.value - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn breakpoints_resolve_discontinuity() {
        let step = |x: f64| if x < 0.3 { 1.0 } else { 2.0 };
        let e = Quadrature::new(1e-13).integrate_with_breaks(step, &[0.0, 0.3, 1.0]).unwrap();
        assert!((e.value - 1.7).abs() < 1e-13);
    }
}
