//! End-to-end acceptance checks, one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p patchforce-core --test acceptance`. Failures are
//! reported on their lines; set `PATCHFORCE_ACCEPTANCE_STRICT=1` to also make
//! the process exit non-zero, which stops a workspace test run at this target.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use patchforce::fitting::{build_cache, fit_with_cache, unit_observable, FitParameter, FitSpec, QuasiLocalUniform};
use patchforce::layoutsim::{
    empirical_correlations, empirical_spectrum, ensemble_pressure, lattice_shell, layout_generators, LayoutSimulator,
    VoltageLaw,
};
use patchforce::lifshitz::{
    evaluate_curve, residual, DataPoint, Drude, GeneralizedPlasma, LifshitzCalculator, LifshitzCurve, Observable,
    Permittivity, ResidualDataset, TabulatedCurve,
};
use patchforce::numerics::constants::{ideal_casimir_pressure, VACUUM_PERMITTIVITY, ZETA3};
use patchforce::numerics::{hankel_forward, hankel_inverse};
use patchforce::patchmodels::{
    correlation_function, spectrum_function, PatchModel, QuasiLocalSpectrum, SharpCutoffSpectrum, SizeDistribution,
    Spectrum,
};
use patchforce::pressure::{patch_pressure_pp, validity_ratio, PlatePairSpectra, SpherePlaneGeometry};
use patchforce::ParamMap;

const NM: f64 = 1e-9;
const UM: f64 = 1e-6;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    a / b - 1.0
}

fn round_sig4(x: f64) -> f64 {
    let scale = 10f64.powi(3 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}

fn quasi(sizes: SizeDistribution, v: f64) -> Arc<dyn PatchModel> {
    Arc::new(QuasiLocalSpectrum::new(sizes, v).unwrap())
}

fn moments() -> Outcome {
    let m = SizeDistribution::uniform(25.0 * NM, 2476.0 * NM).unwrap().moments();
    let (mean, rms) = (m.mean / NM, m.rms() / NM);
    let pass = round_sig4(mean) == 1251.0 && round_sig4(rms) == 1437.0;
    outcome(pass, format!("mean = {mean:.4} nm, rms = {rms:.4} nm (expected 1251, 1437 at 4 figures)"))
}

fn validity() -> Outcome {
    let g = SpherePlaneGeometry::new(151.3 * UM, 160.0 * NM).unwrap();
    let r = validity_ratio(&g, (1437.0 * NM).powi(2));
    let (area, patch) = (r.interaction_area * 1e12, r.patch_area * 1e12);
    let checks = [rel(area, 76.0), rel(patch, 1.6), rel(r.ratio, 48.0)];
    let pass = checks.iter().all(|c| c.abs() <= 0.02);
    outcome(
        pass,
        format!(
            "interaction area = {area:.3} um^2 ({:+.2}%), patch area = {patch:.4} um^2 ({:+.2}%), ratio = {:.3} ({:+.2}%); tolerance 2%",
            checks[0] * 100.0,
            checks[1] * 100.0,
            r.ratio,
            checks[2] * 100.0
        ),
    )
}

fn asymptotes() -> Outcome {
    let (l_min, l_max, v) = (25.0 * NM, 2476.0 * NM, 9.2e-3);
    let sizes = SizeDistribution::uniform(l_min, l_max).unwrap();
    let mean_square = sizes.moments().mean_square;
    let spectra = PlatePairSpectra::identical(quasi(sizes, v));
    let d_small = l_min / 1000.0;
    let d_large = 100.0 * l_max;
    let large = rel(patch_pressure_pp(&spectra, d_small).unwrap(), VACUUM_PERMITTIVITY * v * v / (d_small * d_small));
    let p_far = patch_pressure_pp(&spectra, d_large).unwrap();
    let printed = 3.0 * ZETA3 / 4.0 * VACUUM_PERMITTIVITY * v * v * mean_square / d_large.powi(4);
    let consistent = 3.0 * ZETA3 / 16.0 * VACUUM_PERMITTIVITY * v * v * mean_square / d_large.powi(4);
    let small = rel(p_far, printed);
    let pass = large.abs() <= 0.01 && small.abs() <= 0.01;
    outcome(
        pass,
        format!(
            "D = l_min/1000: {:+.4}% vs eps0 V^2/D^2; D = 100 l_max: P/[(3 zeta3/4) eps0 V^2 l2/D^4] = {:.4} ({:+.2}%), P/[(3 zeta3/16) ...] = {:.5}; tolerance 1%",
            large * 100.0,
            p_far / printed,
            small * 100.0,
            p_far / consistent
        ),
    )
}

fn suppression() -> Outcome {
    let (l_min, l_max, v) = (25.0 * NM, 2476.0 * NM, 9.2e-3);
    let sharp = SharpCutoffSpectrum::from_grain_sizes(l_min, l_max, v).unwrap();
    let d = 10.0 / sharp.k_min();
    let p_sharp = patch_pressure_pp(&PlatePairSpectra::identical(Arc::new(sharp)), d).unwrap();
    let p_quasi =
        patch_pressure_pp(&PlatePairSpectra::identical(quasi(SizeDistribution::uniform(l_min, l_max).unwrap(), v)), d)
            .unwrap();
    let ratio = p_quasi / p_sharp;
    outcome(
        ratio >= 1e3,
        format!("k_min D = 10 (D = {:.1} nm): quasi-local / sharp-cutoff = {ratio:.3e}; need >= 1e3", d / NM),
    )
}

fn transforms() -> Outcome {
    let v = 9.2e-3;
    let sizes = SizeDistribution::uniform(25.0 * NM, 2476.0 * NM).unwrap();
    let model = quasi(sizes.clone(), v);
    let c = correlation_function(model.clone());
    let mean = sizes.moments().mean;
    let worst_k = (0..10)
        .map(|i| {
            let k = 20.0 / mean * i as f64 / 9.0;
            rel(hankel_forward(&c, k).unwrap(), model.density(k)).abs()
        })
        .fold(0.0, f64::max);
    let var_quasi = rel(hankel_inverse(&spectrum_function(model), 0.0).unwrap(), v * v).abs();
    let sharp: Arc<dyn Spectrum> = Arc::new(SharpCutoffSpectrum::from_grain_sizes(25.0 * NM, 2476.0 * NM, v).unwrap());
    let var_sharp = rel(hankel_inverse(&spectrum_function(sharp), 0.0).unwrap(), v * v).abs();
    let pass = worst_k <= 1e-6 && var_quasi <= 1e-6 && var_sharp <= 1e-6;
    outcome(
        pass,
        format!(
            "forward transform worst rel. error over 10 k = {worst_k:.2e}; variance recovery quasi-local {var_quasi:.2e}, sharp-cutoff {var_sharp:.2e}; tolerance 1e-6"
        ),
    )
}

struct MonteCarlo {
    correlations: Vec<(f64, f64)>,
    c0_sigmas: f64,
    pressures: Vec<f64>,
}

fn monte_carlo(sizes: SizeDistribution, maps: usize, pitch_over_l_min: f64) -> MonteCarlo {
    let v = 0.01;
    let (l_min, l_max) = sizes.support();
    let mean = sizes.moments().mean;
    let model = quasi(sizes.clone(), v);
    let generator = layout_generators().build("packed_laguerre", &ParamMap::new()).unwrap();
    let sim = LayoutSimulator::new(sizes, v, 20.0 * l_max, l_min / pitch_over_l_min, VoltageLaw::Uniform, generator)
        .unwrap();
    let ensemble = sim.ensemble(20_000, maps).unwrap();
    let g = sim.grid;
    let rs = [0.0, 0.5 * mean, mean];
    let correlations = rs
        .iter()
        .zip(empirical_correlations(&ensemble, &rs).unwrap())
        .map(|(&r, e)| {
            let analytic = lattice_shell(g.n, g.pitch, r).average(|x| model.correlation(x));
            (r / mean, e.sigmas_from(analytic))
        })
        .collect();
    let dk = 2.0 * PI / g.extent();
    let c0 = empirical_spectrum(&ensemble, 0.0).unwrap();
    let c0_sigmas = c0.sigmas_from(lattice_shell(g.n, dk, 0.0).average(|q| model.density(q)));
    let ds = [0.3 * mean, mean, 3.0 * mean];
    let spectra = PlatePairSpectra::identical(model.clone());
    let pressures = ds
        .iter()
        .zip(ensemble_pressure(&ensemble, &ds).unwrap())
        .map(|(&d, e)| rel(e.value, patch_pressure_pp(&spectra, d).unwrap()))
        .collect();
    MonteCarlo { correlations, c0_sigmas, pressures }
}

fn describe_mc(mc: &MonteCarlo) -> String {
    let corr: Vec<String> = mc.correlations.iter().map(|(r, s)| format!("r = {r:.1} l_mean: {s:.2} sigma")).collect();
    let press: Vec<String> = mc.pressures.iter().map(|p| format!("{:+.2}%", p * 100.0)).collect();
    format!(
        "C(r) {}; C[0] {:.2} sigma; pressure at (0.3, 1, 3) l_mean {}",
        corr.join(", "),
        mc.c0_sigmas,
        press.join(", ")
    )
}

fn monte_carlo_oracle() -> Outcome {
    // 400 maps form 200 independent plate pairs.
    let l_max = 1.0 * UM;
    let mc = monte_carlo(SizeDistribution::uniform(0.5 * l_max, l_max).unwrap(), 400, 8.0);
    let pass = mc.correlations.iter().all(|c| c.1 <= 3.0) && mc.c0_sigmas <= 3.0 && mc.pressures.iter().all(|p| p.abs() <= 0.05);
    outcome(pass, format!("uniform(0.5, 1) um, 400 maps, extent 20 l_max: {}", describe_mc(&mc)))
}

fn lifshitz_sanity() -> Outcome {
    let m = GeneralizedPlasma::plasma(1e4).unwrap();
    let r = LifshitzCalculator::new(1.0).unwrap().pressure(&m, &m, UM).unwrap();
    let err = rel(-r.value, ideal_casimir_pressure(UM));
    let pass = err.abs() <= 5e-3 && r.doubling_change < 1e-6;
    outcome(
        pass,
        format!(
            "plasma(1e4 eV) at 1 um, 1 K: {:+.3}% vs pi^2 hbar c/240D^4 (tolerance 0.5%); doubling change {:.1e} over {} terms",
            err * 100.0,
            r.doubling_change,
            r.terms
        ),
    )
}

fn fit_recovery() -> Outcome {
    let (radius, l_min, l_max, v) = (151.3 * UM, 25.0 * NM, 2476.0 * NM, 9.2e-3);
    let ds: Vec<f64> = (0..100).map(|i| (160.0 + 590.0 * i as f64 / 99.0) * NM).collect();
    let drude: Arc<dyn Permittivity> = Arc::new(Drude::new(8.9, 0.0357).unwrap());
    let curve =
        LifshitzCurve::new(drude.clone(), drude, LifshitzCalculator::new(295.0).unwrap(), Observable::GradientSp, Some(radius))
            .unwrap();
    // The Casimir gradient at the sampled distances, reused for every trial.
    let casimir = evaluate_curve(&curve, &ds).unwrap();
    let casimir_curve = TabulatedCurve::new(ds.iter().copied().zip(casimir.iter().copied()).collect()).unwrap();
    let patch: Vec<f64> = ds
        .iter()
        .map(|&d| v * v * unit_observable(&QuasiLocalUniform, Observable::GradientSp, Some(radius), l_min, l_max, d).unwrap())
        .collect();
    let mut spec = FitSpec::new(Observable::GradientSp, l_min, (300.0 * NM, 20.0 * UM), (0.1e-3, 100e-3));
    spec.radius = Some(radius);
    let cache = build_cache(&spec, Some(radius), (ds[0], ds[99])).unwrap();
    let trials: Vec<(bool, f64, f64, f64)> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let points = ds
                .iter()
                .zip(casimir.iter().zip(&patch))
                .map(|(&d, (&c, &p))| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    DataPoint { distance: d, value: c + p + 0.05 * p * z, sigma: 0.05 * p }
                })
                .collect();
            let total = ResidualDataset::new(Observable::GradientSp, Some(radius), points).unwrap();
            let resid = residual(&total, &casimir_curve).unwrap();
            let r = fit_with_cache(&resid, &spec, Some(&cache)).unwrap();
            let (el, ev) = (rel(r.params.l_max, l_max), rel(r.params.v_rms, v));
            let ok = r.converged && el.abs() <= 0.15 && ev.abs() <= 0.05 && (0.7..=1.3).contains(&r.reduced_chi_squared);
            (ok, el, ev, r.reduced_chi_squared)
        })
        .collect();
    let passed = trials.iter().filter(|t| t.0).count();
    let worst_l = trials.iter().map(|t| t.1.abs()).fold(0.0, f64::max);
    let worst_v = trials.iter().map(|t| t.2.abs()).fold(0.0, f64::max);
    let (lo, hi) = trials.iter().fold((f64::INFINITY, 0.0f64), |(a, b), t| (a.min(t.3), b.max(t.3)));
    outcome(
        passed * 100 >= 95 * trials.len(),
        format!(
            "{passed}/50 trials within 15%/5% and reduced chi^2 in [0.7, 1.3] (need >= 95%); worst l_max {:.2}%, worst V_rms {:.2}%, reduced chi^2 range [{lo:.3}, {hi:.3}]",
            worst_l * 100.0,
            worst_v * 100.0
        ),
    )
}

fn large_patch_degeneracy() -> Outcome {
    let (radius, l_min, l_max, v) = (0.156, 566.0 * UM, 614.0 * UM, 3.9e-3);
    let ds: Vec<f64> = (0..100).map(|i| (0.7 + 6.3 * i as f64 / 99.0) * UM).collect();
    let clean: Vec<f64> = ds
        .iter()
        .map(|&d| v * v * unit_observable(&QuasiLocalUniform, Observable::ForceSp, Some(radius), l_min, l_max, d).unwrap())
        .collect();
    let spec = FitSpec { radius: Some(radius), ..FitSpec::new(Observable::ForceSp, l_min, (600.0 * UM, 6000.0 * UM), (0.1e-3, 100e-3)) };
    let cache = build_cache(&spec, Some(radius), (ds[0], ds[99])).unwrap();
    let runs: Vec<(bool, f64, bool)> = (0..5u64)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let points = ds
                .iter()
                .zip(&clean)
                .map(|(&d, &s)| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    DataPoint { distance: d, value: s * (1.0 + 0.05 * z), sigma: 0.05 * s }
                })
                .collect();
            let data = ResidualDataset::new(Observable::ForceSp, Some(radius), points).unwrap();
            let r = fit_with_cache(&data, &spec, Some(&cache)).unwrap();
            let report = r.report(&data, &spec).unwrap();
            let flagged = r.weakly_constrained.contains(&FitParameter::LMax)
                && report.lines().any(|l| l.starts_with("l_max") && l.contains("weakly constrained"));
            let ev = rel(r.params.v_rms, v);
            (ev.abs() <= 0.05 && flagged, ev, flagged)
        })
        .collect();
    let passed = runs.iter().filter(|r| r.0).count();
    let worst_v = runs.iter().map(|r| r.1.abs()).fold(0.0, f64::max);
    let flagged = runs.iter().filter(|r| r.2).count();
    outcome(
        passed == runs.len(),
        format!(
            "force data, R = 0.156 m, D = 0.7-7 um, l_mean = 590 um: V_rms worst error {:.2}% (tolerance 5%), l_max flagged weakly constrained in {flagged}/5 fits",
            worst_v * 100.0
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("moment reproduction", moments),
        ("validity ratio", validity),
        ("asymptotic laws", asymptotes),
        ("sharp-cutoff suppression", suppression),
        ("transform consistency", transforms),
        ("Monte Carlo oracle", monte_carlo_oracle),
        ("Lifshitz sanity", lifshitz_sanity),
        ("fit recovery", fit_recovery),
        ("large-patch degeneracy", large_patch_degeneracy),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        if !o.pass {
            failures += 1;
        }
        println!(
            "{} {}. {name}: {} [{:.1} s]",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if i == 5 {
            let mc = monte_carlo(SizeDistribution::delta(UM).unwrap(), 400, 16.0);
            println!("     diagnostic, delta(1 um), 400 maps: {}", describe_mc(&mc));
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    let strict = std::env::var("PATCHFORCE_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if failures == 0 || !strict {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
