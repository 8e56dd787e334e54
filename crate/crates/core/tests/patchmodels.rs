use std::sync::Arc;

use proptest::prelude::*;

use patchforce::numerics::{hankel_forward, hankel_inverse, RadialFunction};
use patchforce::patchmodels::{
    correlation_function, spectrum_function, PatchModel, QuasiLocalSpectrum, SharpCutoffSpectrum, SizeDistribution,
    Spectrum,
};

const NM: f64 = 1e-9;

fn grains() -> Arc<SharpCutoffSpectrum> {
    Arc::new(SharpCutoffSpectrum::new(20.9e6, 251e6, 0.0808).unwrap())
}

fn quasi(sizes: SizeDistribution, v: f64) -> Arc<QuasiLocalSpectrum> {
    Arc::new(QuasiLocalSpectrum::new(sizes, v).unwrap())
}

fn variance_from_spectrum(model: Arc<dyn PatchModel>) -> f64 {
    hankel_inverse(&spectrum_function(model), 0.0).unwrap()
}

#[test]
fn delta_law_forward_transform_matches_closed_form() {
    let l = 400.0 * NM;
    let model = quasi(SizeDistribution::delta(l).unwrap(), 0.01);
    let c = correlation_function(model.clone());
    for i in 0..10 {
        let k = 50.0 / l * i as f64 / 9.0;
        let want = model.density(k);
        let got = hankel_forward(&c, k).unwrap();
        let scale = model.density(0.0);
        assert!((got - want).abs() <= 1e-6 * want.abs().max(1e-6 * scale), "k={k:e}: {got:e} vs {want:e}");
    }
}

#[test]
fn uniform_law_forward_transform_matches_closed_form() {
    let model = quasi(SizeDistribution::uniform(25.0 * NM, 300.0 * NM).unwrap(), 0.02);
    let c = correlation_function(model.clone());
    let scale = model.density(0.0);
    for &k in &[0.0, 1e6, 5e6, 2e7, 6e7, 1.5e8] {
        let want = model.density(k);
        let got = hankel_forward(&c, k).unwrap();
        assert!((got - want).abs() <= 1e-6 * want.max(1e-4 * scale), "k={k:e}: {got:e} vs {want:e}");
    }
}

#[test]
fn zero_wavenumber_from_correlation_integral() {
    // Forward transform at k = 0 is (π/4)·mean_ℓ²·V² for a single size.
    let l = 1.0e-6;
    let v = 0.05;
    let model = quasi(SizeDistribution::delta(l).unwrap(), v);
    let got = hankel_forward(&correlation_function(model), 0.0).unwrap();
    let want = std::f64::consts::PI / 4.0 * l * l * v * v;
    assert!((got - want).abs() < 1e-9 * want);
}

#[test]
fn variance_recovery_quasi_local() {
    for sizes in [
        SizeDistribution::uniform(25.0 * NM, 2476.0 * NM).unwrap(),
        SizeDistribution::delta(80.0 * NM).unwrap(),
        SizeDistribution::log_normal(200.0 * NM, 0.4).unwrap(),
    ] {
        let model = quasi(sizes, 0.0092);
        let v2 = variance_from_spectrum(model);
        assert!((v2 / 0.0092f64.powi(2) - 1.0).abs() < 1e-6, "{v2:e}");
    }
}

#[test]
fn variance_recovery_sharp_cutoff() {
    let v2 = variance_from_spectrum(grains());
    assert!((v2 / 0.0808f64.powi(2) - 1.0).abs() < 1e-9);
}

#[test]
fn sharp_cutoff_closed_form_matches_inverse_transform() {
    let s = grains();
    let spec = spectrum_function(s.clone());
    for &r in &[1e-6, 37e-9, 250e-9] {
        let want = s.correlation(r);
        let got = hankel_inverse(&spec, r).unwrap();
        assert!((got - want).abs() < 1e-6 * want.abs(), "r={r:e}: {got:e} vs {want:e}");
    }
}

#[test]
fn sharp_cutoff_envelope_decays_as_three_halves() {
    let s = grains();
    let k_min = s.k_min();
    let v2 = 0.0808f64.powi(2);
    // Envelope 2V²·√(2/π)(k_max^{1/2}+k_min^{1/2}) / ((k_max²−k_min²) r^{3/2}).
    let bound = |r: f64| {
        2.0 * v2 * (2.0 / std::f64::consts::PI).sqrt() * (s.k_max().sqrt() + k_min.sqrt())
            / ((s.k_max().powi(2) - k_min.powi(2)) * r.powf(1.5))
    };
    for i in 0..200 {
        let r = 100.0 / k_min * (1.0 + i as f64 * 0.013);
        assert!(s.correlation(r).abs() <= 1.01 * bound(r), "r={r:e}");
    }
    let spec = spectrum_function(s.clone());
    let r = 100.0 / k_min;
    assert!(hankel_inverse(&spec, r).unwrap().abs() <= 1.01 * bound(r));
}

#[test]
fn only_sharp_cutoff_anticorrelates() {
    let s = grains();
    assert!((1..300).any(|i| s.correlation(i as f64 * NM) < 0.0));
    let q = quasi(SizeDistribution::uniform(25.0 * NM, 300.0 * NM).unwrap(), 0.0808);
    assert!((0..400).all(|i| q.correlation(i as f64 * NM) >= 0.0));
}

#[test]
fn gaussian_profile_round_trip() {
    let sigma = 3e-7;
    let c = RadialFunction::new(move |r| (-r * r / (2.0 * sigma * sigma)).exp(), 6.0 * sigma);
    let inner = c.clone();
    let forward = RadialFunction::new(move |k| hankel_forward(&inner, k).unwrap(), 6.0 / sigma);
    for i in 0..=10 {
        let r = 0.5 * sigma * i as f64;
        let want = c.eval(r);
        let got = hankel_inverse(&forward, r).unwrap();
        assert!((got - want).abs() <= 1e-6 * want.max(1e-6), "r={r:e}");
    }
}

fn uniform_model() -> impl Strategy<Value = Arc<QuasiLocalSpectrum>> {
    (1.0f64..500.0, 1.0f64..20.0, 1e-3f64..0.1)
        .prop_map(|(lo, ratio, v)| quasi(SizeDistribution::uniform(lo * NM, lo * ratio * NM).unwrap(), v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectra_are_nonnegative(model in uniform_model(), x in 0.0f64..200.0) {
        let (lo, _) = model.sizes().support();
        prop_assert!(model.density(x / lo) >= 0.0);
        let s = grains();
        prop_assert!(s.density(x * 1e7) >= 0.0);
    }

    #[test]
    fn quasi_local_correlation_monotone(model in uniform_model(), a in 0.0f64..1.2, b in 0.0f64..1.2) {
        let (_, hi) = model.sizes().support();
        let (r1, r2) = if a <= b { (a * hi, b * hi) } else { (b * hi, a * hi) };
        let c1 = model.correlation(r1);
        let c2 = model.correlation(r2);
        prop_assert!(c1 >= 0.0 && c2 >= 0.0);
        prop_assert!(c2 <= c1 + 1e-15 * model.v_rms().powi(2));
        if r2 >= hi {
            prop_assert_eq!(c2, 0.0);
        }
    }

    #[test]
    fn zero_wavenumber_is_second_moment(model in uniform_model()) {
        let m = model.sizes().moments();
        let want = std::f64::consts::PI / 4.0 * m.mean_square * model.v_rms().powi(2);
        prop_assert!((model.density(0.0) - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn spectrum_quadratic_in_voltage(model in uniform_model(), x in 0.0f64..50.0, f in 0.1f64..10.0) {
        let (lo, _) = model.sizes().support();
        let k = x / lo;
        let scaled = model.with_v_rms(model.v_rms() * f);
        let a = scaled.density(k);
        let b = f * f * model.density(k);
        prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300));
    }
}
