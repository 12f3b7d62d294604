use std::f64::consts::PI;
use std::sync::Arc;

use bogs::evolution::{
    dealias_mask, duhamel, linear_propagate, nonlinear_rhs, run, step, EquationKind, EquationSpec, Sign,
    SolverConfig, State, Trajectory,
};
use bogs::profiles::{random_band, Profile};
use bogs::spectral::{ComplexField, Field, Grid, RealField};
use bogs::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn gaussian(grid: &Arc<Grid>, a: f64, sigma: f64) -> RealField {
    Profile::Gaussian { a, sigma, x0: 0.0 }.sample(grid).unwrap()
}

fn cfg(dt: f64, t_end: f64) -> SolverConfig {
    SolverConfig { dt, t_end, ..SolverConfig::default() }
}

fn diff(a: &Field, b: &Field) -> f64 {
    a.to_complex().zip_with(&b.to_complex(), |x, y| x - y).unwrap().max_abs()
}

fn random_real(grid: &Arc<Grid>, seed: u64) -> RealField {
    random_band(grid, 1.0, 0.0, grid.max_wavenumber() * 0.9, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

#[test]
fn propagator_plane_wave_and_identity() {
    let g = Grid::new(128, 4.0 * PI).unwrap();
    for k in [0.5, 2.0, 7.5] {
        let t = 0.9;
        let f: Field = ComplexField::from_fn(g.clone(), |x| (I * k * x).exp()).into();
        let exact: Field = ComplexField::from_fn(g.clone(), |x| (I * (k * x - k * k * t)).exp()).into();
        assert!(diff(&linear_propagate(&f, t, EquationKind::Mbo).unwrap(), &exact) < 1e-12);
        // the Schrodinger group has the same phase on positive frequencies
        assert!(diff(&linear_propagate(&f, t, EquationKind::Dnls).unwrap(), &exact) < 1e-12);
    }
    let u: Field = random_real(&g, 4).into();
    for kind in [EquationKind::Bo, EquationKind::Mbo, EquationKind::Dnls] {
        let out = linear_propagate(&u, 0.0, kind).unwrap();
        assert!(diff(&out, &u) < 1e-14);
    }
}

#[test]
fn bo_propagator_preserves_realness() {
    let g = Grid::new(64, 10.0).unwrap();
    let u: Field = random_real(&g, 9).into();
    let out = linear_propagate(&u, 1.3, EquationKind::Mbo).unwrap();
    assert!(out.is_real());
}

#[test]
fn rhs_of_constant_is_zero() {
    let g = Grid::new(64, 2.0 * PI).unwrap();
    let c: Field = RealField::from_fn(g, |_| 1.7).into();
    for eq in [EquationSpec::mbo(), EquationSpec::bo()] {
        assert!(nonlinear_rhs(&c, &eq, 2.0 / 3.0).unwrap().max_abs() < 1e-13);
    }
}

#[test]
fn rhs_of_sine_matches_product_expansion() {
    let g = Grid::new(64, 2.0 * PI).unwrap();
    let u: Field = RealField::from_fn(g.clone(), f64::sin).into();
    for sign in [Sign::Plus, Sign::Minus] {
        let s = sign.value();
        let eq = EquationSpec::new(EquationKind::Mbo, sign);
        let out = nonlinear_rhs(&u, &eq, 2.0 / 3.0).unwrap();
        let exact: Field = RealField::from_fn(g.clone(), |x| -s * (x.cos() - (3.0 * x).cos()) / 4.0).into();
        assert!(diff(&out, &exact) < 1e-13);
        // BO: -(sin^2)_x = -sin 2x
        let eq = EquationSpec::new(EquationKind::Bo, sign);
        let out = nonlinear_rhs(&u, &eq, 2.0 / 3.0).unwrap();
        let exact: Field = RealField::from_fn(g.clone(), |x| -s * (2.0 * x).sin()).into();
        assert!(diff(&out, &exact) < 1e-13);
    }
}

#[test]
fn dealiasing_removes_high_modes() {
    let n = 96;
    let g = Grid::new(n, 2.0 * PI).unwrap();
    let k = (n / 2) as f64 * 2.0 / 3.0;
    let u: Field = RealField::from_fn(g.clone(), |x| (k * x).cos()).into();
    let out = nonlinear_rhs(&u, &EquationSpec::mbo(), 2.0 / 3.0).unwrap();
    let mask = dealias_mask(&g, 2.0 / 3.0);
    for (c, keep) in out.spectrum().iter().zip(mask) {
        if !keep {
            assert!(c.norm() < 1e-15);
        }
    }
    // cos^2 sin = (sin + sin 3.)/4: the fundamental survives
    assert!(out.max_abs() > 0.1);
}

#[test]
fn step_zero_field_and_linear_step() {
    let g = Grid::new(128, 16.0 * PI).unwrap();
    let c = cfg(0.01, 0.01);
    let zero = State { t: 0.0, field: RealField::zeros(g.clone()).into() };
    let next = step(&zero, &EquationSpec::mbo(), &c).unwrap();
    assert_eq!(next.field.max_abs(), 0.0);
    assert!((next.t - 0.01).abs() < 1e-15);

    let u: Field = gaussian(&g, 0.8, 1.0).into();
    for eq in [EquationSpec::mbo().linear(), EquationSpec::bo().linear(), EquationSpec::dnls().linear()] {
        let start: Field = if eq.kind.is_real() { u.clone() } else { u.to_complex().into() };
        let next = step(&State { t: 0.0, field: start.clone() }, &eq, &c).unwrap();
        let exact = linear_propagate(&start, 0.01, eq.kind).unwrap();
        assert!(diff(&next.field, &exact) < 1e-12);
    }
}

#[test]
fn fourth_order_in_time() {
    let g = Grid::new(256, 32.0 * PI).unwrap();
    let u0: Field = gaussian(&g, 0.5, 1.0).into();
    let t = 1.0;
    let final_at = |dt: f64| run(&u0, &EquationSpec::mbo(), &cfg(dt, t)).unwrap().final_field().clone();
    let dt = 0.05;
    let reference = final_at(dt / 8.0);
    let e1 = diff(&final_at(dt), &reference);
    let e2 = diff(&final_at(dt / 2.0), &reference);
    let order = (e1 / e2).log2();
    assert!((order - 4.0).abs() <= 0.3, "observed order {order} ({e1:e}, {e2:e})");
}

#[test]
fn zero_length_run_is_the_initial_datum() {
    let g = Grid::new(64, 20.0).unwrap();
    let u0: Field = gaussian(&g, 0.3, 2.0).into();
    let traj = run(&u0, &EquationSpec::mbo(), &cfg(0.01, 0.0)).unwrap();
    assert_eq!(traj.len(), 1);
    assert_eq!(traj.times, vec![0.0]);
    assert_eq!(diff(traj.final_field(), &u0), 0.0);
}

#[test]
fn small_data_stays_close_to_free_flow() {
    let g = Grid::new(512, 32.0 * PI).unwrap();
    let u0: Field = gaussian(&g, 0.05, 1.0).into();
    let traj = run(&u0, &EquationSpec::mbo(), &cfg(1e-2, 1.0)).unwrap();
    let free = linear_propagate(&u0, 1.0, EquationKind::Mbo).unwrap();
    let rel = diff(traj.final_field(), &free) / free.max_abs();
    assert!(rel < 0.01, "relative deviation {rel}");
    assert!(traj.max_imag_residue < 1e-10);
}

#[test]
fn grid_refinement_converges() {
    let l = 32.0 * PI;
    let coarse = Grid::new(512, l).unwrap();
    let fine = Grid::new(1024, l).unwrap();
    let c = cfg(1e-2, 1.0);
    let a = run(&gaussian(&coarse, 0.5, 1.0).into(), &EquationSpec::mbo(), &c).unwrap();
    let b = run(&gaussian(&fine, 0.5, 1.0).into(), &EquationSpec::mbo(), &c).unwrap();
    let ua = a.final_field().as_real().unwrap().samples();
    let ub = b.final_field().as_real().unwrap().samples();
    let err = ua.iter().enumerate().map(|(j, v)| (v - ub[2 * j]).abs()).fold(0.0, f64::max);
    assert!(err < 1e-6, "grid refinement difference {err}");
}

#[test]
fn blow_up_is_reported() {
    let g = Grid::new(128, 8.0 * PI).unwrap();
    let u0: Field = gaussian(&g, 200.0, 0.5).into();
    let c = SolverConfig { blowup_factor: 10.0, ..cfg(0.05, 5.0) };
    match run(&u0, &EquationSpec::mbo(), &c) {
        Err(Error::BlowUp { time, last_valid_time, .. }) => assert!(last_valid_time < time),
        other => panic!("expected a blow-up error, got {other:?}"),
    }
}

#[test]
fn snapshot_stride_controls_spacing() {
    let g = Grid::new(64, 20.0).unwrap();
    let u0: Field = gaussian(&g, 0.3, 2.0).into();
    let c = SolverConfig { snapshot_stride: 5, ..cfg(0.01, 0.5) };
    let traj = run(&u0, &EquationSpec::mbo(), &c).unwrap();
    assert_eq!(traj.len(), 11);
    assert!((traj.spacing() - 0.05).abs() < 1e-15);
    for w in traj.times.windows(2) {
        assert!((w[1] - w[0] - 0.05).abs() < 1e-12);
    }
}

fn constant_forcing(g: &ComplexField, h: f64, steps: usize) -> Trajectory {
    let times = (0..=steps).map(|j| j as f64 * h).collect();
    let snaps = vec![Field::Complex(g.clone()); steps + 1];
    Trajectory::from_snapshots(EquationSpec::dnls(), times, snaps).unwrap()
}

#[test]
fn duhamel_zero_and_range() {
    let g = Grid::new(32, 2.0 * PI).unwrap();
    let f = constant_forcing(&ComplexField::zeros(g.clone()), 0.1, 10);
    assert_eq!(duhamel(&f, 0.7).unwrap().max_abs(), 0.0);
    assert!(matches!(duhamel(&f, 1.5), Err(Error::Range { .. })));
    assert!(matches!(duhamel(&f, -0.1), Err(Error::Range { .. })));
}

#[test]
fn duhamel_single_mode_closed_form() {
    let g = Grid::new(32, 2.0 * PI).unwrap();
    let k = 3.0;
    let mode = ComplexField::from_fn(g.clone(), |x| (I * k * x).exp());
    let t = 1.0;
    // int_0^t exp(-i (t - s) k^2) ds = (1 - exp(-i k^2 t)) / (i k^2)
    let factor = (1.0 - (-I * k * k * t).exp()) / (I * k * k);
    let err_at = |h: f64| {
        let f = constant_forcing(&mode, h, (t / h).round() as usize);
        let out = duhamel(&f, t).unwrap();
        out.zip_with(&mode, |a, b| a - factor * b).unwrap().max_abs()
    };
    let (e1, e2) = (err_at(0.01), err_at(0.005));
    assert!(e1 < 1e-3, "{e1}");
    let order = (e1 / e2).log2();
    assert!((order - 2.0).abs() < 0.1, "observed order {order}");
}

#[test]
fn duhamel_is_linear() {
    let g = Grid::new(64, 10.0).unwrap();
    let h = 0.05;
    let times: Vec<f64> = (0..=20).map(|j| j as f64 * h).collect();
    let build = |seed: u64| {
        let snaps = times
            .iter()
            .enumerate()
            .map(|(j, _)| Field::Complex(random_real(&g, seed + j as u64).to_complex().scale(I)))
            .collect();
        Trajectory::from_snapshots(EquationSpec::dnls(), times.clone(), snaps).unwrap()
    };
    let (f, q) = (build(1), build(100));
    let sum = Trajectory::from_snapshots(
        EquationSpec::dnls(),
        times.clone(),
        f.snapshots
            .iter()
            .zip(&q.snapshots)
            .map(|(a, b)| Field::Complex(a.to_complex().zip_with(&b.to_complex(), |x, y| x + y).unwrap()))
            .collect(),
    )
    .unwrap();
    for t in [0.0, 0.33, 1.0] {
        let lhs = duhamel(&sum, t).unwrap();
        let rhs = duhamel(&f, t).unwrap().zip_with(&duhamel(&q, t).unwrap(), |a, b| a + b).unwrap();
        assert!(lhs.zip_with(&rhs, |a, b| a - b).unwrap().max_abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn propagators_are_unitary_groups(seed in any::<u64>(), t1 in -3.0f64..3.0, t2 in -3.0f64..3.0,
                                       kind in prop::sample::select(vec![EquationKind::Mbo, EquationKind::Dnls])) {
        let g = Grid::new(128, 12.0).unwrap();
        let u: Field = if kind.is_real() {
            random_real(&g, seed).into()
        } else {
            random_real(&g, seed).to_complex().zip_with(&random_real(&g, seed ^ 7).to_complex(), |a, b| a + I * b).unwrap().into()
        };
        let n0 = u.norm_l2();
        let a = linear_propagate(&u, t1, kind).unwrap();
        prop_assert!((a.norm_l2() - n0).abs() < 1e-12 * n0);
        let ab = linear_propagate(&a, t2, kind).unwrap();
        let direct = linear_propagate(&u, t1 + t2, kind).unwrap();
        prop_assert!(diff(&ab, &direct) < 1e-12 * u.max_abs().max(1.0));
        let back = linear_propagate(&a, -t1, kind).unwrap();
        prop_assert!(diff(&back, &u) < 1e-12 * u.max_abs().max(1.0));
    }

    #[test]
    fn free_runs_match_exact_propagation(seed in any::<u64>(), steps in 1usize..20) {
        let g = Grid::new(64, 8.0 * PI).unwrap();
        let u: Field = random_real(&g, seed).into();
        let dt = 0.02;
        let traj = run(&u, &EquationSpec::mbo().linear(), &cfg(dt, dt * steps as f64)).unwrap();
        let exact = linear_propagate(&u, dt * steps as f64, EquationKind::Mbo).unwrap();
        prop_assert!(diff(traj.final_field(), &exact) < 1e-12);
        let n0 = u.norm_l2();
        for s in &traj.snapshots {
            prop_assert!((s.norm_l2() - n0).abs() < 1e-12 * n0);
        }
    }

    #[test]
    fn solver_output_stays_real(seed in any::<u64>(), a in 0.1f64..1.0) {
        let g = Grid::new(128, 16.0 * PI).unwrap();
        let u0 = random_band(&g, a, 0.0, 3.0, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let traj = run(&u0.into(), &EquationSpec::mbo(), &cfg(0.01, 0.2)).unwrap();
        prop_assert!(traj.max_imag_residue < 1e-10);
        prop_assert!(traj.snapshots.iter().all(Field::is_real));
    }
}
