use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use patchforce::layoutsim::{
    empirical_correlation, empirical_correlations, empirical_pressure, empirical_spectrum, ensemble_pressure,
    generate_layout, jackknife, lattice_shell, layout_generators, parseval_sum, window_scatter, Grid, LayoutSimulator,
    VoltageLaw, VoltageMap, MIN_REALIZATIONS,
};
use patchforce::patchmodels::{PatchModel, QuasiLocalSpectrum, SizeDistribution, Spectrum};
use patchforce::pressure::{patch_pressure_pp, PlatePairSpectra};
use patchforce::{Error, ParamMap};

const L: f64 = 1e-6;
const V: f64 = 0.01;
const MAPS: usize = 120;

fn simulator(v_rms: f64) -> LayoutSimulator {
    let generator = layout_generators().build("packed_laguerre", &ParamMap::default()).unwrap();
    LayoutSimulator::new(SizeDistribution::delta(L).unwrap(), v_rms, 20.0 * L, L / 8.0, VoltageLaw::Uniform, generator)
        .unwrap()
}

fn ensemble() -> &'static (LayoutSimulator, Vec<VoltageMap>) {
    static CELL: OnceLock<(LayoutSimulator, Vec<VoltageMap>)> = OnceLock::new();
    CELL.get_or_init(|| {
        let sim = simulator(V);
        let maps = sim.ensemble(1000, MAPS).unwrap();
        (sim, maps)
    })
}

fn model() -> Arc<QuasiLocalSpectrum> {
    Arc::new(QuasiLocalSpectrum::new(SizeDistribution::delta(L).unwrap(), V).unwrap())
}

#[test]
fn map_variance_is_v_rms_squared() {
    let (_, maps) = ensemble();
    let ms: Vec<f64> = maps.iter().map(|m| m.mean_square()).collect();
    let (mean, se) = jackknife(&ms, |x| x.iter().sum::<f64>() / x.len() as f64);
    assert!((mean - V * V).abs() < 3.0 * se, "{mean:e} ± {se:e}");
    let means: Vec<f64> = maps.iter().map(|m| m.sample_mean()).collect();
    let (mu, se) = jackknife(&means, |x| x.iter().sum::<f64>() / x.len() as f64);
    assert!(mu.abs() < 3.0 * se);
}

#[test]
fn disjoint_cells_are_uncorrelated() {
    let (sim, maps) = ensemble();
    let n = sim.grid.n;
    // Pixels 8 L apart on a diagonal never share a cell.
    let (a, b) = (0, 64 * n + 64);
    let prods: Vec<f64> = maps.iter().map(|m| m.values()[a] * m.values()[b]).collect();
    let (cov, se) = jackknife(&prods, |x| x.iter().sum::<f64>() / x.len() as f64);
    assert!(cov.abs() < 3.0 * se, "{cov:e} ± {se:e}");
}

#[test]
fn mean_cell_diameter_matches_target() {
    let (sim, _) = ensemble();
    let cal = sim.calibration();
    assert!(!cal.warning);
    assert!((cal.achieved_mean / L - 1.0).abs() < 0.05, "{cal}");
    let t = sim.tessellate(77).unwrap();
    let (mean, _) = t.diameter_moments(&sim.grid);
    assert!((mean / L - 1.0).abs() < 0.05, "{mean:e}");
}

#[test]
fn correlation_at_coincidence_and_beyond_support() {
    let (_, maps) = ensemble();
    let est = empirical_correlations(maps, &[0.0, 1.5 * L]).unwrap();
    assert!(est[0].sigmas_from(V * V) < 3.0, "{:?}", est[0]);
    assert!(est[1].sigmas_from(0.0) < 3.0, "{:?}", est[1]);
}

#[test]
fn correlation_at_half_diameter_is_close_to_disc_overlap() {
    // Tessellation cells are not discs, so the circular-patch value is only
    // approached; see README for the measured gap.
    let (sim, maps) = ensemble();
    let m = model();
    let r = 0.5 * L;
    let e = empirical_correlation(maps, r).unwrap();
    let shell = lattice_shell(sim.grid.n, sim.grid.pitch, r);
    let want = shell.average(|x| m.correlation(x));
    assert!((m.correlation(r) / (V * V) - 0.3910).abs() < 5e-5);
    assert!((e.value / want - 1.0).abs() < 0.08, "{:e} vs {want:e}", e.value);
}

#[test]
fn zero_wavenumber_spectrum_and_parseval() {
    let (_, maps) = ensemble();
    let c0 = empirical_spectrum(maps, 0.0).unwrap();
    let want = std::f64::consts::PI / 4.0 * L * L * V * V;
    assert!((model().density(0.0) / want - 1.0).abs() < 1e-12);
    assert!(c0.sigmas_from(want) < 3.0, "{c0:?} vs {want:e}");
    for m in maps.iter().take(5) {
        assert!((parseval_sum(m) / m.mean_square() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn spectrum_shape_tracks_closed_form() {
    let (sim, maps) = ensemble();
    let m = model();
    let dk = 2.0 * std::f64::consts::PI / sim.grid.extent();
    for i in [3usize, 6, 10] {
        let k = i as f64 * dk;
        let e = empirical_spectrum(maps, k).unwrap();
        let shell = lattice_shell(sim.grid.n, dk, k);
        let want = shell.average(|q| m.density(q));
        assert!((e.value / want - 1.0).abs() < 0.15, "k={k:e}: {e:?} vs {want:e}");
    }
}

#[test]
fn ensemble_pressure_matches_mode_integral() {
    let (_, maps) = ensemble();
    let spectra = PlatePairSpectra::identical(model());
    let ds = [0.5 * L, L];
    let est = ensemble_pressure(maps, &ds).unwrap();
    for (d, e) in ds.iter().zip(&est) {
        let want = patch_pressure_pp(&spectra, *d).unwrap();
        assert!((e.value / want - 1.0).abs() < 0.05, "d={d:e}: {e:?} vs {want:e}");
    }
}

#[test]
fn identical_maps_match_correlated_plate_pressure() {
    let (_, maps) = ensemble();
    let d = 0.5 * L;
    let m = model();
    let correlated = PlatePairSpectra::identical(m.clone()).with_cross(m.clone()).unwrap();
    let want = patch_pressure_pp(&correlated, d).unwrap();
    let got: Vec<f64> = maps.iter().take(60).map(|map| empirical_pressure(map, map, d).unwrap()).collect();
    let (mean, se) = jackknife(&got, |x| x.iter().sum::<f64>() / x.len() as f64);
    assert!(mean < 0.0 && want < 0.0);
    assert!((mean - want).abs() < 3.0 * se + 0.05 * want.abs(), "{mean:e} ± {se:e} vs {want:e}");
}

#[test]
fn doubling_voltage_quadruples_pressure() {
    let a = simulator(V);
    let b = simulator(2.0 * V);
    let (p, q) = (a.generate(5).unwrap(), a.generate(6).unwrap());
    let (p2, q2) = (b.generate(5).unwrap(), b.generate(6).unwrap());
    let base = empirical_pressure(&p, &q, L).unwrap();
    let doubled = empirical_pressure(&p2, &q2, L).unwrap();
    assert!((doubled / base - 4.0).abs() < 1e-10);
}

#[test]
fn window_scatter_shrinks_with_window() {
    let (sim, maps) = ensemble();
    let ms = L * L;
    let small = window_scatter(&maps[..40], L, 20, ms).unwrap();
    let large = window_scatter(&maps[..40], L, 80, ms).unwrap();
    assert!(large.relative_scatter() < small.relative_scatter());
    assert!((small.patch_areas - (2.5 * L).powi(2) / (std::f64::consts::PI / 4.0 * ms)).abs() < 1e-9);
    let whole = window_scatter(&maps[..2], L, sim.grid.n, ms).unwrap();
    let direct = empirical_pressure(&maps[0], &maps[1], L).unwrap();
    assert!((whole.mean / direct - 1.0).abs() < 1e-9);
}

#[test]
fn preconditions_are_reported() {
    let (sim, maps) = ensemble();
    assert!(matches!(
        empirical_correlation(&maps[..10], 0.0),
        Err(Error::Realizations { have: 10, need: MIN_REALIZATIONS })
    ));
    assert!(empirical_correlation(maps, 5.0 * L).is_err());
    let err = empirical_pressure(&maps[0], &maps[1], sim.grid.pitch).unwrap_err();
    assert!(err.to_string().contains("2·pitch"));
    let other = VoltageMap::from_values(Grid { n: 64, pitch: 1e-8 }, 0, V, vec![0.0; 64 * 64]).unwrap();
    assert!(empirical_pressure(&maps[0], &other, L).is_err());
}

#[test]
fn map_text_export_round_trips() {
    let sizes = SizeDistribution::uniform(0.5 * L, L).unwrap();
    let map = generate_layout(sizes.clone(), V, 20.0 * L, L / 8.0, 9).unwrap();
    let back = VoltageMap::from_text(&map.to_text()).unwrap();
    assert_eq!(back.grid, map.grid);
    assert_eq!(back.seed, 9);
    assert_eq!(back.values(), map.values());
}

fn uniform_simulator() -> &'static LayoutSimulator {
    static CELL: OnceLock<LayoutSimulator> = OnceLock::new();
    CELL.get_or_init(|| {
        let generator = layout_generators().build("packed_laguerre", &ParamMap::default()).unwrap();
        let sizes = SizeDistribution::uniform(0.5 * L, L).unwrap();
        LayoutSimulator::new(sizes, V, 20.0 * L, L / 8.0, VoltageLaw::Gaussian, generator).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn seeds_reproduce_maps_bit_for_bit(seed in any::<u64>()) {
        let sim = uniform_simulator();
        let a = sim.generate(seed).unwrap();
        let b = sim.generate(seed).unwrap();
        prop_assert_eq!(a.values(), b.values());
        prop_assert!((parseval_sum(&a) / a.mean_square() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pressure_is_quadratic_in_voltage(seed in any::<u64>(), f in 0.1f64..10.0) {
        let sim = uniform_simulator();
        let a = sim.generate(seed).unwrap();
        let b = sim.generate(seed ^ 1).unwrap();
        let p = empirical_pressure(&a, &b, L).unwrap();
        let q = empirical_pressure(&a.scaled(f), &b.scaled(f), L).unwrap();
        prop_assert!((q / (p * f * f) - 1.0).abs() < 1e-10);
    }
}
