use std::f64::consts::PI;
use std::sync::Arc;

use bogs::evolution::{run, EquationSpec, Sign, SolverConfig, Trajectory};
use bogs::gauge::*;
use bogs::profiles::{random_band, scale_separated, Profile};
use bogs::spectral::*;
use bogs::Error;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mbo_run(grid: &Arc<Grid>, eq: EquationSpec, dt: f64, t_end: f64) -> Trajectory {
    let u0 = Profile::Gaussian { a: 0.5, sigma: 0.5, x0: 0.0 }.sample(grid).unwrap();
    let cfg = SolverConfig { dt, t_end, ..Default::default() };
    run(&Field::Real(u0), &eq, &cfg).unwrap()
}

fn halving_ratio(eq: EquationSpec, n: u64, mode: ResidualMode) -> f64 {
    let grid = Grid::new(256, 32.0 * PI).unwrap();
    let cfg = GaugeConfig::default();
    let a = gauge_residual(&mbo_run(&grid, eq, 2e-3, 0.5), n, &cfg, mode).unwrap();
    let b = gauge_residual(&mbo_run(&grid, eq, 1e-3, 0.5), n, &cfg, mode).unwrap();
    a.rms() / b.rms()
}

#[test]
fn residual_is_second_order_for_both_signs() {
    for sign in [Sign::Plus, Sign::Minus] {
        for n in [1, 2, 4] {
            let r = halving_ratio(EquationSpec::new(bogs::evolution::EquationKind::Mbo, sign), n, ResidualMode::Full);
            assert!((r - 4.0).abs() < 0.1, "sign {sign:?} N={n}: ratio {r}");
        }
    }
}

#[test]
fn residual_is_second_order_on_free_flow() {
    for mode in [ResidualMode::Full, ResidualMode::Free] {
        let r = halving_ratio(EquationSpec::mbo().linear(), 2, mode);
        assert!((r - 4.0).abs() < 0.1, "{mode:?}: ratio {r}");
    }
}

#[test]
fn forcing_dominates_residual() {
    let grid = Grid::new(256, 32.0 * PI).unwrap();
    let traj = mbo_run(&grid, EquationSpec::mbo(), 1e-3, 0.2);
    let u = traj.real_snapshots().unwrap()[100].clone();
    let b = gauge_rhs_terms(&u, 2, &GaugeConfig::default()).unwrap();
    let terms = b.rhs_terms.unwrap();
    let full = gauge_residual(&traj, 2, &GaugeConfig::default(), ResidualMode::Full).unwrap();
    let largest = terms.iter().map(|t| t.norm_l2()).fold(0.0, f64::max);
    assert!(largest > 100.0 * full.rms(), "{largest} vs {}", full.rms());
}

#[test]
fn unimodularity_and_support() {
    let grid = Grid::new(512, 16.0 * PI).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u = random_band(&grid, 0.4, 0.0, 12.0, &mut rng).unwrap();
    for n in ladder(&grid) {
        let b = gauge_transform(&u, n, &GaugeConfig::default()).unwrap();
        for (v, w) in b.v.samples().iter().zip(b.projected.samples()) {
            assert!((v.norm() - w.norm()).abs() < 1e-12);
        }
        let spec = b.projected.spectrum();
        let total: f64 = spec.iter().map(|c| c.norm_sqr()).sum();
        let outside: f64 = spec
            .iter()
            .zip(grid.fft_wavenumbers())
            .filter(|(_, &xi)| !(xi >= n as f64 / 2.0 && xi <= 2.0 * n as f64))
            .map(|(c, _)| c.norm_sqr())
            .sum();
        assert!(outside <= 1e-24 * total.max(1.0), "N={n}: {outside}");
    }
}

#[test]
fn complex_variant_keeps_modulus() {
    let grid = Grid::new(256, 16.0 * PI).unwrap();
    let u = ComplexField::from_fn(grid.clone(), |x| Complex64::new(0.0, 2.0 * x).exp() * (-x * x / 4.0).exp());
    let b = gauge_field(&Field::Complex(u), 2, &GaugeConfig::default()).unwrap();
    for (v, w) in b.v.samples().iter().zip(b.projected.samples()) {
        assert!((v.norm() - w.norm()).abs() < 1e-12);
    }
    assert!(b.projected.norm_l2() > 0.1);
}

#[test]
fn decomposition_exact_on_scale_separated_fields() {
    let grid = Grid::new(2048, 16.0 * PI).unwrap();
    let cutoff = DyadicCutoff::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [4u64, 8, 16] {
        let u = scale_separated(&grid, 0.3, n, cutoff.shift_k(), &mut rng).unwrap();
        let ux = u.apply(&Multiplier::derivative(1)).unwrap();
        let scale = u.max_abs().powi(2) * ux.norm_l2();
        let r = decomposition_check(&u, n, &cutoff).unwrap();
        assert!(r < 1e-10 * scale, "N={n}: {r:e} (scale {scale:e})");
    }
}

#[test]
fn decomposition_defect_on_generic_fields_is_small_but_present() {
    let grid = Grid::new(2048, 16.0 * PI).unwrap();
    let cutoff = DyadicCutoff::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u = random_band(&grid, 0.5, 0.0, 16.0, &mut rng).unwrap();
    let ux = u.apply(&Multiplier::derivative(1)).unwrap();
    let rel = decomposition_check(&u, 8, &cutoff).unwrap() / (u.max_abs().powi(2) * ux.norm_l2());
    assert!(rel > 1e-10 && rel < 1e-3, "{rel:e}");
}

#[test]
fn a3_primitive_is_low_frequency() {
    let grid = Grid::new(1024, 16.0 * PI).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let u = random_band(&grid, 0.5, 0.0, 30.0, &mut rng).unwrap();
    for n in [4u64, 8, 16, 32] {
        let f = a3_localization(&u, n, &DyadicCutoff::default()).unwrap();
        assert!(f < 1e-8, "N={n}: {f:e}");
    }
}

#[test]
fn error_paths() {
    let grid = Grid::new(64, 2.0 * PI).unwrap();
    let u = RealField::from_fn(grid.clone(), |x| x.cos());
    assert!(matches!(
        gauge_transform(&u, 64, &GaugeConfig::default()),
        Err(Error::Scale { .. })
    ));

    let short = Trajectory::from_snapshots(EquationSpec::mbo(), vec![0.0, 0.1], vec![Field::Real(u.clone()); 2]).unwrap();
    assert!(matches!(
        gauge_residual(&short, 2, &GaugeConfig::default(), ResidualMode::Full),
        Err(Error::InsufficientData(_))
    ));

    let bo = Trajectory::from_snapshots(EquationSpec::bo(), vec![0.0, 0.1, 0.2], vec![Field::Real(u); 3]).unwrap();
    assert!(matches!(
        gauge_residual(&bo, 2, &GaugeConfig::default(), ResidualMode::Full),
        Err(Error::Parameter(_))
    ));
}

#[test]
fn coarse_spacing_is_flagged() {
    let grid = Grid::new(256, 32.0 * PI).unwrap();
    let traj = mbo_run(&grid, EquationSpec::mbo(), 2e-2, 0.2);
    let r = gauge_residual(&traj, 8, &GaugeConfig::default(), ResidualMode::Full).unwrap();
    assert!(r.warnings.iter().any(|w| w.contains("under-resolves")));
    assert!(r.boundary_mismatch > 0.0);
}
