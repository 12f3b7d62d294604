use std::f64::consts::PI;
use std::sync::Arc;

use bogs::analysis::*;
use bogs::evolution::{EquationSpec, SolverConfig, Trajectory};
use bogs::profiles::{random_band, Profile};
use bogs::spectral::*;
use bogs::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn static_traj(u: RealField, t_end: f64, m: usize) -> Trajectory {
    let times: Vec<f64> = (0..m).map(|k| t_end * k as f64 / (m - 1) as f64).collect();
    Trajectory::from_snapshots(EquationSpec::mbo(), times, vec![Field::Real(u); m]).unwrap()
}

fn separable(grid: &Arc<Grid>, f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64, t_end: f64, m: usize) -> Trajectory {
    let times: Vec<f64> = (0..m).map(|k| t_end * k as f64 / (m - 1) as f64).collect();
    let snaps = times
        .iter()
        .map(|&t| Field::Real(RealField::from_fn(grid.clone(), |x| f(x) * g(t))))
        .collect();
    Trajectory::from_snapshots(EquationSpec::mbo(), times, snaps).unwrap()
}

/// Direct quadrature: periodic sum in x, composite trapezoid in t.
fn oracle_lp_x(grid: &Grid, f: &dyn Fn(f64) -> f64, p: f64) -> f64 {
    let dx = grid.dx();
    let hits: Vec<f64> = (0..grid.n_points()).map(|j| f(grid.x(j)).abs()).collect();
    if p.is_infinite() {
        hits.into_iter().fold(0.0, f64::max)
    } else {
        (dx * hits.iter().map(|v| v.powf(p)).sum::<f64>()).powf(1.0 / p)
    }
}

fn oracle_lq_t(g: &dyn Fn(f64) -> f64, t_end: f64, m: usize, q: f64) -> f64 {
    let h = t_end / (m - 1) as f64;
    let v: Vec<f64> = (0..m).map(|k| g(k as f64 * h).abs()).collect();
    if q.is_infinite() {
        return v.into_iter().fold(0.0, f64::max);
    }
    let inner: f64 = v[1..m - 1].iter().map(|x| x.powf(q)).sum();
    (h * (inner + 0.5 * (v[0].powf(q) + v[m - 1].powf(q)))).powf(1.0 / q)
}

#[test]
fn constant_field_sup_in_time() {
    let grid = Grid::new(64, 3.0).unwrap();
    let c = -1.7;
    let traj = static_traj(RealField::from_fn(grid, move |_| c), 0.4, 9);
    let v = mixed_norm(&traj, MixedNormSpec::space_time(2.0, f64::INFINITY)).unwrap();
    assert!((v - c.abs() * 3.0f64.sqrt()).abs() < 1e-13);
}

#[test]
fn separable_mixed_norms_factor() {
    let grid = Grid::new(128, 2.0 * PI).unwrap();
    let f = |x: f64| (x.sin() + 0.3).powi(2) - 0.2;
    let g = |t: f64| (3.0 * t).cos() + 0.1 * t;
    let (t_end, m) = (0.9, 37);
    let traj = separable(&grid, f, g, t_end, m);
    for (p, q) in [(2.0, 2.0), (1.0, 3.0), (4.0, f64::INFINITY), (f64::INFINITY, 2.0), (6.0, 1.5)] {
        let expected = oracle_lp_x(&grid, &f, p) * oracle_lq_t(&g, t_end, m, q);
        for spec in [MixedNormSpec::space_time(p, q), MixedNormSpec::time_space(q, p)] {
            let v = mixed_norm(&traj, spec).unwrap();
            assert!((v - expected).abs() < 1e-12 * expected, "{spec:?}: {v} vs {expected}");
        }
    }
}

#[test]
fn l2_mixed_equals_flat() {
    let grid = Grid::new(64, 5.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let snaps: Vec<Field> = (0..7).map(|_| Field::Real(random_band(&grid, 1.0, 0.0, 6.0, &mut rng).unwrap())).collect();
    let times = (0..7).map(|k| 0.1 * k as f64).collect();
    let traj = Trajectory::from_snapshots(EquationSpec::mbo(), times, snaps).unwrap();
    let flat = spacetime_l2(&traj).unwrap();
    for spec in [MixedNormSpec::space_time(2.0, 2.0), MixedNormSpec::time_space(2.0, 2.0)] {
        assert!((mixed_norm(&traj, spec).unwrap() - flat).abs() < 1e-12 * flat);
    }
}

#[test]
fn streaming_matches_tabulated() {
    let grid = Grid::new(32, 2.0).unwrap();
    let traj = separable(&grid, |x| x.cos() + 2.0, |t| 1.0 + t * t, 1.0, 11);
    let st = SpaceTime::from_trajectory(&traj).unwrap();
    for spec in [MixedNormSpec::space_time(3.0, f64::INFINITY), MixedNormSpec::time_space(4.0, 2.0)] {
        let mut acc = MixedAccumulator::new(spec, &st.times, 32, grid.dx()).unwrap();
        for v in &st.values {
            acc.push(v);
        }
        assert!((acc.finish().unwrap() - mixed_norm_values(&st, spec).unwrap()).abs() < 1e-13);
    }
    let acc = MixedAccumulator::new(MixedNormSpec::space_time(2.0, 2.0), &st.times, 32, grid.dx()).unwrap();
    assert!(matches!(acc.finish(), Err(Error::InsufficientData(_))));
}

#[test]
fn bad_exponent_is_rejected() {
    let grid = Grid::new(16, 1.0).unwrap();
    let traj = static_traj(RealField::zeros(grid), 1.0, 3);
    assert!(matches!(
        mixed_norm(&traj, MixedNormSpec::space_time(0.5, 2.0)),
        Err(Error::Parameter(_))
    ));
}

#[test]
fn x_norm_of_static_cosine() {
    let (a, k, n, l) = (0.7, 4.0, 256, 2.0 * PI);
    let grid = Grid::new(n, l).unwrap();
    let t_end = 0.5;
    let traj = static_traj(RealField::from_fn(grid.clone(), move |x| a * (k * x).cos()), t_end, 11);
    let cutoff = DyadicCutoff::default();
    let x = x_norm(&traj, 0.5, &cutoff).unwrap();
    assert!((x.energy - a * (1.0 + k * k).powf(0.25) * (l / 2.0).sqrt()).abs() < 1e-12);

    // each block of cos(kx) is phi(k/N) cos(kx); the grid hits the peaks of
    // cos and sin at this k
    let bands = norm_bands(&grid);
    let w: Vec<f64> = bands.iter().map(|&b| cutoff.symbol(b, k)).collect();
    let sum_w2: f64 = w.iter().map(|v| v * v).sum();
    let smoothing = (a * k * t_end.sqrt()) * sum_w2.sqrt();
    let bracket = |s: f64| (1.0 + k * k).powf(0.5 * s);
    let maximal_l2 = a * (l / 2.0).sqrt() * sum_w2.sqrt();
    let maximal_l4 = a * bracket(0.25) * (3.0 * l / 8.0).powf(0.25) * sum_w2.sqrt();
    assert!((x.smoothing - smoothing).abs() < 1e-12 * smoothing, "{} vs {smoothing}", x.smoothing);
    assert!((x.maximal_l2 - maximal_l2).abs() < 1e-12 * maximal_l2);
    assert!((x.maximal_l4 - maximal_l4).abs() < 1e-12 * maximal_l4);

    let y = y_norm(&traj).unwrap();
    assert!((y.energy - x.energy).abs() < 1e-14);
    assert!((y.smoothing - a * k * t_end.sqrt()).abs() < 1e-12);
    assert!((y.maximal_l2 - a * (l / 2.0).sqrt()).abs() < 1e-12);
    assert!((y.maximal_l4 - a * bracket(0.25) * (3.0 * l / 8.0).powf(0.25)).abs() < 1e-12);
}

#[test]
fn x_norm_edge_cases() {
    let grid = Grid::new(64, 2.0 * PI).unwrap();
    let cutoff = DyadicCutoff::default();
    let zero = static_traj(RealField::zeros(grid.clone()), 1.0, 5);
    assert_eq!(x_norm(&zero, 0.5, &cutoff).unwrap().total(), 0.0);
    assert_eq!(y_norm(&zero).unwrap().total(), 0.0);
    assert!(matches!(x_norm(&zero, 0.4, &cutoff), Err(Error::Parameter(_))));
}

#[test]
fn x_norm_monotone_under_projection() {
    let grid = Grid::new(128, 4.0 * PI).unwrap();
    let cutoff = DyadicCutoff::default();
    let traj = bogs::evolution::run(
        &Field::Real(Profile::Gaussian { a: 0.4, sigma: 0.8, x0: 0.0 }.sample(&grid).unwrap()),
        &EquationSpec::mbo(),
        &SolverConfig { dt: 1e-2, t_end: 0.2, ..Default::default() },
    )
    .unwrap();
    for s in [0.5, 1.0, 1.7] {
        let full = x_norm(&traj, s, &cutoff).unwrap().total();
        for n in ladder(&grid) {
            let proj = traj
                .map(|f| Ok(Field::Real(cutoff.project_real(f.as_real().unwrap(), Band::Block(n))?)))
                .unwrap();
            let part = x_norm(&proj, s, &cutoff).unwrap().total();
            assert!(part <= full + 1e-12, "s={s} N={n}: {part} > {full}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn norms_are_homogeneous(c in -3.0f64..3.0, seed in 0u64..1000, s in 0.5f64..2.0) {
        let grid = Grid::new(32, 2.0 * PI).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_band(&grid, 1.0, 0.0, 8.0, &mut rng).unwrap();
        let a = static_traj(u.clone(), 0.3, 4);
        let b = static_traj(u.scale(c), 0.3, 4);
        let cutoff = DyadicCutoff::default();
        let (xa, xb) = (x_norm(&a, s, &cutoff).unwrap(), x_norm(&b, s, &cutoff).unwrap());
        for (p, q) in [(xa.energy, xb.energy), (xa.smoothing, xb.smoothing), (xa.maximal_l2, xb.maximal_l2), (xa.maximal_l4, xb.maximal_l4)] {
            prop_assert!((q - c.abs() * p).abs() <= 1e-12 * p.max(1e-300) * c.abs().max(1.0));
        }
        let (ya, yb) = (y_norm(&a).unwrap().total(), y_norm(&b).unwrap().total());
        prop_assert!((yb - c.abs() * ya).abs() <= 1e-12 * ya * c.abs().max(1.0));
        let spec = MixedNormSpec::space_time(3.0, 1.5);
        let (ma, mb) = (mixed_norm(&a, spec).unwrap(), mixed_norm(&b, spec).unwrap());
        prop_assert!((mb - c.abs() * ma).abs() <= 1e-12 * ma * c.abs().max(1.0));
    }
}

#[test]
fn spacetime_l2_zero_data() {
    let grid = Grid::new(64, 8.0 * PI).unwrap();
    let cfg = SolverConfig { dt: 1e-2, t_end: 0.1, ..Default::default() };
    let r = spacetime_l2_check(&RealField::zeros(grid), &EquationSpec::mbo(), &cfg, &DyadicCutoff::default()).unwrap();
    assert_eq!((r.lhs, r.rhs, r.ratio), (0.0, 0.0, 0.0));
}

#[test]
fn spacetime_l2_low_frequency_data() {
    // spectrum inside the plateau of P_0, so P_{>=1} u_0 = 0
    let grid = Grid::new(128, 32.0 * PI).unwrap();
    let u0 = RealField::from_fn(grid.clone(), |x| 0.3 * (x / 16.0).cos() + 0.1 * (x / 8.0).sin());
    let high = DyadicCutoff::default().project_real(&u0, Band::AboveOne).unwrap();
    assert!(high.max_abs() < 1e-15);
    let cfg = SolverConfig { dt: 1e-2, t_end: 0.5, ..Default::default() };
    let r = spacetime_l2_check(&u0, &EquationSpec::mbo(), &cfg, &DyadicCutoff::default()).unwrap();
    assert!(r.data_term < 1e-28);
    assert!(r.lhs > 0.0 && r.rhs > 0.0 && r.ratio.is_finite());
}

#[test]
fn ensemble_prefix_is_stable() {
    let grid = Grid::new(64, 16.0 * PI).unwrap();
    let cfg = SolverConfig { dt: 1e-2, t_end: 0.2, ..Default::default() };
    let spec = EnsembleSpec { count: 3, base_seed: 5, ..Default::default() };
    let small = spacetime_l2_ensemble(&grid, &EquationSpec::mbo(), &cfg, &DyadicCutoff::default(), &spec).unwrap();
    let big = spacetime_l2_ensemble(
        &grid,
        &EquationSpec::mbo(),
        &cfg,
        &DyadicCutoff::default(),
        &EnsembleSpec { count: 5, ..spec },
    )
    .unwrap();
    assert_eq!(&big[..3], &small[..]);
    assert_eq!(big.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![5, 6, 7, 8, 9]);
}

#[test]
fn strichartz_theta_zero_is_unitarity() {
    let cfg = ProbeConfig { n_points: 512, length: 16.0 * PI, time_samples: 17, thetas: vec![0.0, 1.0], ..Default::default() };
    let reps = strichartz_probe_suite(&cfg).unwrap();
    for r in reps.iter().filter(|r| r.estimate == Estimate::Strichartz { theta: 0.0 }) {
        for v in &r.ratios {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }
    for r in &reps {
        assert_eq!(r.samples, 32);
        assert!(r.ratios.iter().all(|v| v.is_finite() && *v > 0.0));
    }
}

#[test]
fn probe_config_is_validated() {
    let bad_t = ProbeConfig { t_end: 1.0, ..Default::default() };
    assert!(matches!(strichartz_probe_suite(&bad_t), Err(Error::Parameter(_))));
    let few = ProbeConfig { samples: 8, ..Default::default() };
    assert!(matches!(strichartz_probe_suite(&few), Err(Error::Parameter(_))));
    let theta = ProbeConfig { thetas: vec![1.5], ..Default::default() };
    assert!(matches!(strichartz_probe_suite(&theta), Err(Error::Parameter(_))));
}

#[test]
fn packets_leaving_the_domain_are_refused() {
    let cfg = SlopeConfig { n_points: 2048, length: 16.0 * PI, scales: vec![4, 64], ..Default::default() };
    assert!(matches!(smoothing_slope(&cfg, 0.0, &DyadicCutoff::default()), Err(Error::Parameter(_))));
}

#[test]
fn square_function_parseval_when_renormalized() {
    let grid = Grid::new(512, 16.0 * PI).unwrap();
    let cutoff = DyadicCutoff::default();
    for rep in square_function_probe(&grid, &[2.0], 32, 4, &cutoff, true).unwrap() {
        assert!(rep.ratios.iter().all(|r| (r - 1.0).abs() < 1e-10));
    }
    // raw symbols square-sum to at most 1
    for rep in square_function_probe(&grid, &[2.0], 32, 4, &cutoff, false).unwrap() {
        assert!(rep.max_ratio <= 1.0 + 1e-12 && rep.min_ratio > 0.5);
    }
    let z = RealField::zeros(grid);
    assert_eq!(square_function_ratio(&z, 4.0, &cutoff, true).unwrap(), 0.0);
    assert!(square_function_ratio(&z, 1.0, &cutoff, true).is_err());
}

#[test]
fn scaling_static_cosine() {
    let grid = Grid::new(64, 2.0 * PI).unwrap();
    let u = RealField::from_fn(grid, |x| x.cos());
    let r = scaling_check(&u, 2.0, &EquationSpec::mbo(), None, DEFAULT_MAX_POINTS).unwrap();
    assert!(r.l2_error < 1e-12);
    assert!((r.h_half_ratio - 0.5f64.sqrt()).abs() < 1e-12);
    let d = dilate(&u, 2.0, DEFAULT_MAX_POINTS).unwrap();
    for j in 0..d.grid().n_points() {
        let x = d.grid().x(j);
        assert!((d.samples()[j] - (x / 2.0).cos() / 2.0f64.sqrt()).abs() < 1e-13);
    }
}

#[test]
fn scaling_identity_and_guards() {
    let grid = Grid::new(128, 16.0 * PI).unwrap();
    let u = Profile::Gaussian { a: 0.3, sigma: 1.0, x0: 0.0 }.sample(&grid).unwrap();
    let cfg = SolverConfig { dt: 1e-2, t_end: 0.2, ..Default::default() };
    let r = scaling_check(&u, 1.0, &EquationSpec::mbo(), Some(&cfg), DEFAULT_MAX_POINTS).unwrap();
    assert_eq!(r.dynamic_mismatch, Some(0.0));
    assert!(matches!(scaling_check(&u, 4.0, &EquationSpec::mbo(), None, 256), Err(Error::Parameter(_))));
    assert!(matches!(scaling_check(&u, 1.01, &EquationSpec::mbo(), None, DEFAULT_MAX_POINTS), Err(Error::Parameter(_))));
    assert!(matches!(scaling_check(&u, 0.5, &EquationSpec::mbo(), None, DEFAULT_MAX_POINTS), Err(Error::Parameter(_))));
}

#[test]
fn bo_scaling_uses_its_own_exponent() {
    let grid = Grid::new(256, 32.0 * PI).unwrap();
    let u = Profile::Gaussian { a: 0.2, sigma: 2.0, x0: 0.0 }.sample(&grid).unwrap();
    let cfg = SolverConfig { dt: 2e-3, t_end: 0.2, ..Default::default() };
    let r = scaling_check(&u, 2.0, &EquationSpec::bo(), Some(&cfg), DEFAULT_MAX_POINTS).unwrap();
    assert!(r.dynamic_mismatch.unwrap() < 1e-6, "{:?}", r);
}

#[test]
fn free_packet_is_normalizable() {
    let grid = Grid::new(256, 16.0 * PI).unwrap();
    let p = free_packet(&grid, 2.0, 1.0, 0.0);
    // int |g|^2 = sigma sqrt(pi)
    assert!((p.norm_l2().powi(2) - PI.sqrt()).abs() < 1e-12);
    assert!((p.samples()[128] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
}
