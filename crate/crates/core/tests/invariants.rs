use piezodyn::prelude::*;
use proptest::prelude::*;

fn rod() -> (MaterialProperties, Geometry, DerivedConstants) {
    let mat = MaterialProperties::PZT5A;
    let geo = Geometry::with_diameter(0.01, 0.01).unwrap();
    let d = derive_constants(&mat, &geo).unwrap();
    (mat, geo, d)
}

/// Rectangular pulse lasting `steps` grid steps.
fn run_steps(alpha: f64, k: f64, p_a: f64, steps: usize, n: usize, transits: f64) -> SimulationResult {
    let (mat, geo, d) = rod();
    let damper = derive_damper(k, alpha, &d, &geo).unwrap();
    let grid = make_grid(d.transit, n, transits * d.transit).unwrap();
    let load = LoadSignal::rectangular(p_a, steps as f64 * grid.dt).unwrap();
    run_recursive(&mat, &geo, &damper, &load, &grid).unwrap()
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_forms_match_recursion(
        alpha in 0.05f64..=2.0,
        k in 0.0f64..3000.0,
        n in prop::sample::select(vec![4usize, 8, 16]),
        frac in 0.01f64..0.99,
    ) {
        // Any pulse shorter than six transits.
        let steps = ((6 * n - 1) as f64 * frac).ceil() as usize;
        let r = run_steps(alpha, k, 3e8, steps, n, 14.0);
        let (v0, vh) = explicit_on_grid(&r).unwrap();
        let scale = sup(&r.history.vh).max(sup(&r.history.v0));
        prop_assert!(max_diff(&v0, &r.history.v0) <= 1e-12 * scale);
        prop_assert!(max_diff(&vh, &r.history.vh) <= 1e-12 * scale);
    }

    #[test]
    fn refinement_leaves_grid_values_unchanged(
        alpha in 0.1f64..=2.0,
        k in 10.0f64..2000.0,
        steps in 1usize..40,
    ) {
        let coarse = run_steps(alpha, k, 2e8, steps, 8, 10.0);
        let fine = run_steps(alpha, k, 2e8, 2 * steps, 16, 10.0);
        for i in 0..coarse.grid.len() {
            prop_assert_eq!(coarse.history.v0[i], fine.history.v0[2 * i]);
            prop_assert_eq!(coarse.history.vh[i], fine.history.vh[2 * i]);
        }
        let v = sup(&coarse.history.voltage);
        for i in 0..coarse.grid.len() {
            prop_assert!((coarse.history.voltage[i] - fine.history.voltage[2 * i]).abs() <= 1e-12 * v);
        }
    }

    #[test]
    fn damper_only_removes_energy(
        alpha in 0.1f64..=2.0,
        k in 0.0f64..2000.0,
        steps in 1usize..48,
    ) {
        let r = run_steps(alpha, k, 3e8, steps, 8, 12.0);
        let e = dissipated_energy(&r.history, &r.damper, &r.geometry, r.grid.dt);
        prop_assert!(e[0] >= 0.0);
        prop_assert!(e.windows(2).all(|w| w[1] >= w[0]));
        // Lower face at rest until the front arrives.
        prop_assert!(r.history.v0[..8].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn response_odd_in_load(
        alpha in 0.1f64..=2.0,
        k in 0.0f64..2000.0,
        steps in 1usize..48,
    ) {
        let (mat, geo, d) = rod();
        let damper = derive_damper(k, alpha, &d, &geo).unwrap();
        let grid = make_grid(d.transit, 8, 10.0 * d.transit).unwrap();
        let pulse: Vec<f64> = (0..steps).map(|i| -1e8 * (1.0 + (i % 3) as f64)).collect();
        let flipped: Vec<f64> = pulse.iter().map(|p| -p).collect();
        let a = run_recursive(&mat, &geo, &damper, &LoadSignal::sampled(grid.dt, pulse).unwrap(), &grid).unwrap();
        let b = run_recursive(&mat, &geo, &damper, &LoadSignal::sampled(grid.dt, flipped).unwrap(), &grid).unwrap();
        for (x, y) in a.history.voltage.iter().zip(&b.history.voltage) {
            prop_assert_eq!(*x, -*y);
        }
    }

    #[test]
    fn free_rod_echoes(steps in 1usize..60, n in 2usize..12) {
        // Without a damper every reflection is perfect:
        // vh(t) = [p(t) + 2 Σ_k p(t − 2kθ)] / z and v0(t) = 2 Σ_k p(t − (2k−1)θ) / z.
        let (mat, geo, d) = rod();
        let damper = derive_damper(0.0, 1.0, &d, &geo).unwrap();
        let grid = make_grid(d.transit, n, 9.0 * d.transit).unwrap();
        let values: Vec<f64> = (0..steps).map(|i| -1e7 * (1.0 + 0.1 * i as f64)).collect();
        let load = LoadSignal::sampled(grid.dt, values).unwrap();
        let r = run_recursive(&mat, &geo, &damper, &load, &grid).unwrap();
        let p = |i: isize| if i < 0 { 0.0 } else { r.load_samples[i as usize] };
        let z = d.impedance;
        let n = n as isize;
        for i in 0..grid.len() as isize {
            let back: f64 = (1..=i / (2 * n)).map(|k| p(i - 2 * k * n)).sum();
            let vh = (p(i) + 2.0 * back) / z;
            let v0: f64 = (1..).map(|k| i - (2 * k - 1) * n).take_while(|j| *j >= 0).map(p).sum::<f64>() * 2.0 / z;
            let scale = sup(&r.history.vh);
            prop_assert!((r.history.vh[i as usize] - vh).abs() <= 1e-12 * scale);
            prop_assert!((r.history.v0[i as usize] - v0).abs() <= 1e-12 * scale);
        }
    }
}

#[test]
fn explicit_continuous_time_agrees_between_grid_points() {
    let (mat, geo, d) = rod();
    let damper = derive_damper(1000.0, 0.5, &d, &geo).unwrap();
    let grid = make_grid(d.transit, 32, 14.0 * d.transit).unwrap();
    let load = LoadSignal::rectangular(3.6e8, 10e-6).unwrap().snapped_to(&grid);
    let r = run_recursive(&mat, &geo, &damper, &load, &grid).unwrap();
    let case = classify_case(load.duration(), d.transit);
    assert_eq!(case, DurationCase::Case2);
    for i in (0..grid.len() - 1).step_by(5) {
        // Midway between samples nothing jumps, so the grid value holds.
        let t = grid.time(i) + 0.5 * grid.dt;
        let vh = explicit_vh(case, t, &load, &damper, d.impedance, d.transit).unwrap();
        let v0 = explicit_v0(case, t, &load, &damper, d.impedance, d.transit).unwrap();
        assert!((vh - r.history.vh[i]).abs() <= 1e-12 * 30.0, "i={i}");
        assert!((v0 - r.history.v0[i]).abs() <= 1e-12 * 30.0, "i={i}");
    }
}

#[test]
fn misaligned_pulse_is_rejected_with_a_suggestion() {
    let (mat, geo, d) = rod();
    let damper = derive_damper(1000.0, 0.5, &d, &geo).unwrap();
    let grid = make_grid(d.transit, 64, 50e-6).unwrap();
    let load = LoadSignal::rectangular(3.6e8, 5e-6).unwrap();
    match run_recursive(&mat, &geo, &damper, &load, &grid) {
        Err(Error::Misaligned { suggested_n: Some(n), .. }) => assert!((1..=256).contains(&n)),
        other => panic!("expected misalignment, got {other:?}"),
    }
}
