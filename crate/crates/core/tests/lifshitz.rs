use std::sync::Arc;

use proptest::prelude::*;

use patchforce::lifshitz::{
    epsilon_imaginary_axis, residual, Drude, DrudeExtrapolated, GeneralizedPlasma, LifshitzCalculator, LifshitzCurve,
    Observable, OpticalDataTable, OpticalRow, Oscillator, Permittivity, ResidualDataset, TabulatedRoughness,
};
use patchforce::numerics::constants::ideal_casimir_pressure;
use patchforce::numerics::Quadrature;
use patchforce::patchmodels::{QuasiLocalSpectrum, SizeDistribution};
use patchforce::pressure::{patch_pressure_pp, pfa_gradient, PlatePairSpectra, SpherePlaneGeometry};

const NM: f64 = 1e-9;
const UM: f64 = 1e-6;

fn pressure(m: &dyn Permittivity, d: f64, t: f64) -> f64 {
    LifshitzCalculator::new(t).unwrap().pressure(m, m, d).unwrap().value
}

#[test]
fn perfect_reflector_proxy_matches_ideal_limit() {
    let m = GeneralizedPlasma::plasma(1e4).unwrap();
    let r = LifshitzCalculator::new(1.0).unwrap().pressure(&m, &m, UM).unwrap();
    let ideal = ideal_casimir_pressure(UM);
    assert!((ideal - 1.3e-3).abs() < 0.01e-3);
    assert!(r.value < 0.0);
    assert!((-r.value / ideal - 1.0).abs() < 5e-3, "{} vs {ideal}", -r.value);
    assert!(-r.value < ideal);
    assert!(r.doubling_change < 1e-6);
}

#[test]
fn ideal_limit_approached_from_below() {
    let mut last = 0.0;
    for op in [10.0, 100.0, 1000.0] {
        let p = -pressure(&GeneralizedPlasma::plasma(op).unwrap(), UM, 1.0);
        assert!(p > last && p < ideal_casimir_pressure(UM));
        last = p;
    }
}

#[test]
fn drude_weaker_than_plasma_at_room_temperature() {
    let drude = Drude::new(8.9, 0.0357).unwrap();
    let plasma = GeneralizedPlasma::plasma(8.9).unwrap();
    let pd = -pressure(&drude, 3.0 * UM, 295.0);
    let pp = -pressure(&plasma, 3.0 * UM, 295.0);
    assert!(pd > 0.0 && pd < pp, "{pd:e} {pp:e}");
    // Roughly the missing half of the zero-frequency TE contribution at large d.
    assert!(pp / pd > 1.1);
}

#[test]
fn magnitude_decreases_with_distance() {
    let m = Drude::new(8.9, 0.0357).unwrap();
    let mut last = f64::INFINITY;
    for i in 0..=12 {
        let d = 100.0 * NM * 100f64.powf(i as f64 / 12.0);
        let p = -pressure(&m, d, 300.0);
        assert!(p > 0.0 && p < last, "d={d:e}");
        last = p;
    }
}

#[test]
fn energy_derivative_is_pressure() {
    let m = Drude::new(8.9, 0.0357).unwrap();
    let calc = LifshitzCalculator::new(300.0).unwrap();
    let d = 400.0 * NM;
    let h = 1e-3 * d;
    let e = |x: f64| calc.energy(&m, &m, x).unwrap().value;
    let de = (e(d - 2.0 * h) - 8.0 * e(d - h) + 8.0 * e(d + h) - e(d + 2.0 * h)) / (12.0 * h);
    let p = calc.pressure(&m, &m, d).unwrap().value;
    assert!((-de / p - 1.0).abs() < 1e-6, "{de:e} vs {p:e}");
}

#[test]
fn thermal_tail_grows_with_temperature() {
    let m = Drude::new(8.9, 0.0357).unwrap();
    let d = 5.0 * UM;
    assert!(-pressure(&m, d, 600.0) > -pressure(&m, d, 300.0));
}

#[test]
fn roughness_hook_scales_result() {
    let m = Drude::new(8.9, 0.0357).unwrap();
    let rough = Arc::new(TabulatedRoughness::new(vec![(100.0 * NM, 1.2), (1.0 * UM, 1.0)]).unwrap());
    let base = LifshitzCalculator::new(300.0).unwrap();
    let corrected = base.clone().with_roughness(rough);
    let d = 550.0 * NM;
    let a = base.pressure(&m, &m, d).unwrap().value;
    let b = corrected.pressure(&m, &m, d).unwrap().value;
    assert!((b / a - 1.1).abs() < 1e-12);
}

/// `(2/π)∫₀^∞ ω ε″(ω)/(ω²+ξ²) dω` for a Drude–Lorentz ε″, by direct quadrature.
fn kk_oracle(op: f64, g: f64, osc: &Oscillator, xi: f64) -> f64 {
    let eps2 = |w: f64| {
        let drude = op * op * g / (w * (w * w + g * g));
        let (w0, f, gj) = (osc.frequency, osc.strength, osc.damping);
        let lorentz = f * gj * w / ((w0 * w0 - w * w).powi(2) + (gj * w).powi(2));
        drude + lorentz
    };
    let integrand = |t: f64| {
        // ω = e^t
        let w = t.exp();
        w * w * eps2(w) / (w * w + xi * xi)
    };
    let q = Quadrature::new(1e-12).with_abs_tol(1e-14);
    let breaks: Vec<f64> = (-60..=30).map(|i| i as f64 * 0.5).collect();
    1.0 + 2.0 / std::f64::consts::PI * q.integrate_with_breaks(integrand, &breaks).unwrap().value
}

#[test]
fn kramers_kronig_matches_drude_lorentz_oracle() {
    let (op, g) = (8.9, 0.0357);
    let osc = Oscillator { strength: 40.0, frequency: 3.0, damping: 1.2 };
    let eps2 = |w: f64| {
        op * op * g / (w * (w * w + g * g))
            + osc.strength * osc.damping * w / ((osc.frequency.powi(2) - w * w).powi(2) + (osc.damping * w).powi(2))
    };
    // Table from 0.125 eV to 8000 eV, fine enough for linear interpolation.
    let rows: Vec<OpticalRow> = (0..6000)
        .map(|i| {
            let w = 0.125 * (1.0f64 + 0.00186).powi(i);
            OpticalRow { energy: w, eps_real: 0.0, eps_imag: eps2(w) }
        })
        .collect();
    let table = Arc::new(OpticalDataTable::new(rows, "drude-lorentz").unwrap());
    let m = DrudeExtrapolated::new(table, op, g).unwrap();
    for &xi in &[0.01, 0.1, 0.5, 2.0, 10.0, 50.0] {
        let oracle = kk_oracle(op, g, &osc, xi);
        let lorentz = osc.strength / (osc.frequency.powi(2) + xi * osc.damping + xi * xi);
        let analytic = 1.0 + op * op / (xi * (xi + g)) + lorentz;
        assert!((oracle / analytic - 1.0).abs() < 1e-8, "oracle xi={xi}");
        let got = epsilon_imaginary_axis(&m, xi).unwrap();
        assert!((got / oracle - 1.0).abs() < 1e-4, "xi={xi}: {got} vs {oracle}");
    }
}

#[test]
fn synthetic_patch_signal_recovered_from_residual() {
    let radius = 151.3 * UM;
    let drude: Arc<dyn Permittivity> = Arc::new(Drude::new(8.9, 0.0357).unwrap());
    let calc = LifshitzCalculator::new(295.0).unwrap();
    let curve = LifshitzCurve::new(drude.clone(), drude, calc, Observable::GradientSp, Some(radius)).unwrap();
    let patches = PlatePairSpectra::identical(Arc::new(
        QuasiLocalSpectrum::new(SizeDistribution::uniform(25.0 * NM, 2476.0 * NM).unwrap(), 9.2e-3).unwrap(),
    ));
    let distances: Vec<f64> = (0..8).map(|i| (160.0 + 80.0 * i as f64) * NM).collect();
    let mut csv = String::from("# observable: gradient_sp\n# radius_um: 151.3\n");
    let mut injected = Vec::new();
    for &d in &distances {
        let g = SpherePlaneGeometry::new(radius, d).unwrap();
        let patch = pfa_gradient(&g, patch_pressure_pp(&patches, d).unwrap());
        use patchforce::lifshitz::Curve;
        let value = curve.eval(d).unwrap() + patch;
        csv.push_str(&format!("{},{:e},{:e}\n", d / NM, value, 1e-3 * value));
        injected.push(patch);
    }
    let data = ResidualDataset::parse(&csv).unwrap();
    let r = residual(&data, &curve).unwrap();
    for (p, want) in r.points().iter().zip(&injected) {
        let scale = data.points().iter().map(|q| q.value.abs()).fold(0.0, f64::max);
        assert!((p.value - want).abs() < 1e-10 * scale.max(want.abs()), "{} vs {want}", p.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn epsilon_real_above_one_and_decreasing(op in 1.0f64..15.0, g in 0.0f64..0.2, a in 1e-3f64..100.0, f in 1.001f64..10.0) {
        let models: Vec<Box<dyn Permittivity>> = vec![
            Box::new(Drude::new(op, g).unwrap()),
            Box::new(GeneralizedPlasma::placeholder_gold(op).unwrap()),
        ];
        for m in &models {
            let e1 = epsilon_imaginary_axis(m.as_ref(), a).unwrap();
            let e2 = epsilon_imaginary_axis(m.as_ref(), a * f).unwrap();
            prop_assert!(e1 > 1.0 && e2 > 1.0 && e2 < e1);
        }
    }

    #[test]
    fn pressure_grows_with_plasma_frequency(op in 2.0f64..20.0, f in 1.05f64..3.0, d_nm in 100.0f64..3000.0) {
        let d = d_nm * NM;
        let a = -pressure(&Drude::new(op, 0.0357).unwrap(), d, 300.0);
        let b = -pressure(&Drude::new(op * f, 0.0357).unwrap(), d, 300.0);
        prop_assert!(b > a);
    }
}
