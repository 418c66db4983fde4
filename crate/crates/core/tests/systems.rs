use basinlab::systems::{
    compute_basin, hh_energy, hh_initial_state, hh_potential, rk4_step, DuffingParams,
    HenonHeilesParams, IntegratorConfig, MagneticPendulumParams, NewtonParams, SystemError,
    SystemKind, SystemSpec,
};
use basinlab::{Region, UNRESOLVED};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn basin(spec: &SystemSpec, region: &Region) -> basinlab::BasinGrid {
    compute_basin(spec, region, &IntegratorConfig::for_system(spec.kind())).unwrap()
}

#[test]
fn rk4_is_fourth_order() {
    // x'' = -x from (1, 0); exact x(t) = cos t.
    let err = |dt: f64| {
        let steps = (2.0 / dt).round() as usize;
        let mut s = [1.0, 0.0];
        for k in 0..steps {
            s = rk4_step(&s, k as f64 * dt, dt, |_, s: &[f64; 2]| [s[1], -s[0]]).unwrap();
        }
        (s[0] - 2f64.cos()).abs()
    };
    let ratio = err(0.1) / err(0.05);
    assert!((ratio - 16.0).abs() < 1.0, "error ratio {ratio}");
}

#[test]
fn rk4_reports_blowup() {
    let r = rk4_step(&[1e300], 0.0, 1.0, |_, s: &[f64; 1]| [s[0] * 1e300]);
    assert!(matches!(r, Err(SystemError::NumericalBlowup { .. })));
}

#[test]
fn hh_shooting_and_energy_conservation() {
    let field = |_: f64, s: &[f64; 4]| {
        let [x, y, px, py] = *s;
        [px, py, -x - 2.0 * x * y, -y - x * x + y * y]
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let (x, y) = (rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3));
        let energy = rng.random_range(0.17..0.4);
        if hh_potential(x, y) >= energy {
            continue;
        }
        let mut s = hh_initial_state(x, y, energy).unwrap();
        assert!((hh_energy(&s) - energy).abs() < 1e-12);
        // momentum is perpendicular to the position vector
        assert!((s[0] * s[2] + s[1] * s[3]).abs() < 1e-12);
        let dt = 0.005;
        for k in 0..2000 {
            s = rk4_step(&s, k as f64 * dt, dt, field).unwrap();
            if s[0].hypot(s[1]) > 2.0 {
                break;
            }
        }
        assert!((hh_energy(&s) - energy).abs() < 1e-8, "drift {}", hh_energy(&s) - energy);
    }
}

#[test]
fn hh_rejects_forbidden_points() {
    assert!(hh_initial_state(0.9, 0.9, 0.2).is_err());
    assert!(hh_initial_state(0.0, 0.0, 0.2).is_err());
}

#[test]
fn rows_run_upward_in_y() {
    // z^2 + 1: the basins are the lower and upper half planes.
    let spec = SystemSpec::Newton(NewtonParams { coeffs: vec![1.0, 0.0, 1.0], b: [1.0, 0.0] });
    let grid = basin(&spec, &Region::centered(2.0, 40).unwrap());
    for row in 0..40 {
        for col in 0..40 {
            assert_eq!(grid.get(col, row), (row >= 20) as u8, "pixel ({col}, {row})");
        }
    }
    assert_eq!(grid.region(), Some(&Region::centered(2.0, 40).unwrap()));
}

#[test]
fn labels_are_compacted_in_first_occurrence_order() {
    let spec = SystemSpec::Newton(NewtonParams { coeffs: vec![-1.0, 0.0, 0.0, 1.0], b: [1.0, 0.0] });
    let grid = basin(&spec, &Region::centered(2.5, 60).unwrap());
    let mut seen = Vec::new();
    for &l in grid.labels() {
        if l != UNRESOLVED && !seen.contains(&l) {
            seen.push(l);
        }
    }
    assert_eq!(seen, vec![0, 1, 2]);
    assert_eq!(grid.num_labels(), 3);
}

#[test]
fn generation_is_thread_count_independent() {
    let specs = [
        (SystemSpec::Duffing(DuffingParams { gamma: 0.3, omega: 1.0 }), 20),
        (
            SystemSpec::MagneticPendulum(MagneticPendulumParams {
                damping: 0.2,
                magnet_radius: 1.0,
                n_magnets: 3,
            }),
            16,
        ),
        (SystemSpec::HenonHeiles(HenonHeilesParams { energy: 0.25 }), 24),
    ];
    for (spec, res) in specs {
        let region = spec.kind().default_region(res).unwrap();
        let one = in_pool(1, || basin(&spec, &region));
        let three = in_pool(3, || basin(&spec, &region));
        assert_eq!(one, three, "{spec:?}");
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    let region = Region::centered(1.0, 8).unwrap();
    let bad = [
        SystemSpec::Duffing(DuffingParams { gamma: 0.3, omega: 0.0 }),
        SystemSpec::Newton(NewtonParams { coeffs: vec![1.0], b: [1.0, 0.0] }),
        SystemSpec::Newton(NewtonParams { coeffs: vec![-1.0, 1.0], b: [0.0, 0.0] }),
        SystemSpec::MagneticPendulum(MagneticPendulumParams {
            damping: 0.1,
            magnet_radius: 1.0,
            n_magnets: 7,
        }),
    ];
    for spec in bad {
        let cfg = IntegratorConfig::for_system(spec.kind());
        assert!(compute_basin(&spec, &region, &cfg).is_err(), "{spec:?}");
    }
    let cfg = IntegratorConfig { dt: -1.0, ..IntegratorConfig::default() };
    let spec = SystemSpec::HenonHeiles(HenonHeilesParams { energy: 0.25 });
    assert!(compute_basin(&spec, &region, &cfg).is_err());
}

#[test]
fn system_json_uses_a_tag() {
    let spec: SystemSpec = serde_json::from_str(r#"{"system":"duffing","gamma":0.3,"omega":1.0}"#).unwrap();
    assert_eq!(spec, SystemSpec::Duffing(DuffingParams { gamma: 0.3, omega: 1.0 }));
    assert_eq!(spec.kind(), SystemKind::Duffing);
}
