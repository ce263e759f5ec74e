use super::*;
use crate::operators::eigen_residual;
use crate::physcore::{ComplexField, Grid2D};
use crate::wavefunctions::eval_nonfree_term;

fn natural() -> PhysicalParams {
    PhysicalParams::natural()
}

fn gaussian_input() -> CustomInput {
    CustomInput::new("gauss", |q, qb| Complex64::new((-0.5 * (q * q + qb * qb)).exp(), 0.0))
}

/// Closed form of the transform of `exp(-(Q^2 + Qbar^2)/2)` in natural
/// units, by completing squares in both Gaussian integrals.
fn gaussian_transform_exact(x: f64, y: f64) -> Complex64 {
    Complex64::from_polar(
        std::f64::consts::FRAC_1_SQRT_2 * (-(x * x + y * y) / 4.0).exp(),
        x * y / 2.0,
    )
}

#[test]
fn kernel_values() {
    let p = natural();
    let c = 1.0 / (2.0 * PI);
    assert!((mq_kernel(&p, 0.0, 0.0, 0.0, 0.0) - c).norm() < 1e-16);
    assert!((mq_kernel(&p, 1.0, 1.0, 1.0, 1.0) - c).norm() < 1e-16);
    let q = PhysicalParams::new(1.0, 1.0, 1.0, 1.0, 3.0).unwrap();
    for (a, b, x, y) in [(0.3, -2.0, 1.1, 4.0), (-7.0, 2.5, 0.0, -1.0)] {
        assert!((mq_kernel(&q, a, b, x, y).norm() - 3.0 / (2.0 * PI)).abs() < 1e-15);
        let phase = 3.0 * (a * b + x * y - x * a - y * b);
        let expected = Complex64::from_polar(3.0 / (2.0 * PI), phase);
        assert!((mq_kernel(&q, a, b, x, y) - expected).norm() < 1e-13);
    }
}

#[test]
fn planewave_branch_is_landau_state() {
    let p = natural();
    assert!((transform_planewave(&p, 0, 0.0, 0.0, 0.0).re - PI.powf(-0.25)).abs() < 1e-15);
    for (x, y) in [(0.3, -1.0), (2.0, 0.5)] {
        let a = transform_planewave(&p, 2, 0.7, x, y);
        let b = eval_landau(&p, GaugeChoice::LandauX, 2, 0.7, x, y);
        assert_eq!(a, b);
    }
}

#[test]
fn delta_constant_matches_quadrature() {
    for p in [natural(), PhysicalParams::new(0.5, 2.0, 1.0, 1.0, 3.0).unwrap()] {
        let l = p.mag_length();
        for n in 0..=4 {
            let mut ratios = Vec::new();
            for i in 0..9 {
                for j in 0..9 {
                    let x = (-2.0 + 0.5 * i as f64) * l;
                    let y = (-2.0 + 0.5 * j as f64) * l;
                    let reference = eval_nonfree_term(&p, GaugeChoice::LandauX, n, 0.3, x, y);
                    if reference.norm() < 1e-3 {
                        continue;
                    }
                    let quad = transform_delta_quadrature(&p, n, 0.3, x, y).unwrap();
                    ratios.push(quad / reference);
                }
            }
            let c = delta_constant(&p, n);
            for r in &ratios {
                assert!((r.norm() - c.norm()).abs() < 1e-9, "n={n}: {r} vs {c}");
                assert!((r - c).norm() < 1e-9, "n={n}: {r} vs {c}");
            }
        }
    }
}

#[test]
fn delta_branch_ratio_and_phase() {
    let p = natural();
    let c0 = delta_constant(&p, 0);
    assert!(c0.im == 0.0 && c0.re > 0.0);
    assert!((c0.re - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
    let (x, y) = (0.7, 0.4);
    let d = transform_delta(&p, 1, 0.0, x, y).arg() - eval_nonfree_term(&p, GaugeChoice::LandauX, 1, 0.0, x, y).arg();
    let wrapped = (d + PI).rem_euclid(2.0 * PI) - PI;
    assert!((wrapped + PI / 2.0).abs() < 1e-12, "{wrapped}");
}

#[test]
fn numeric_planewave_ground_state_at_origin() {
    let p = natural();
    let est = transform_numeric(&p, &TransformInput::PlaneWave { n: 0, k: 0.0 }, 0.0, 0.0, &RegulatorSchedule::default())
        .unwrap();
    let exact = PI.powf(-0.25);
    assert!(est.error <= 1e-3, "{est:?}");
    assert!((est.value - exact).norm() <= 1e-3, "{est:?}");
    assert_eq!(est.sequence.len(), 4);
}

#[test]
fn numeric_delta_ground_state_at_origin() {
    let p = natural();
    let est = transform_numeric(&p, &TransformInput::DeltaLine { n: 0, kprime: 0.0 }, 0.0, 0.0, &RegulatorSchedule::default())
        .unwrap();
    let exact = delta_constant(&p, 0) * PI.powf(-0.25);
    assert!(est.error <= 1e-3, "{est:?}");
    assert!((est.value - exact).norm() <= 1e-3, "{est:?}");
}

#[test]
fn numeric_branches_on_probe_points() {
    let p = PhysicalParams::new(1.0, 1.0, 1.0, 1.0, 2.0).unwrap();
    let schedule = RegulatorSchedule::default();
    let probes = probe_grid(&p);
    assert_eq!(probes.len(), 25);
    for &(x, y) in probes.iter().step_by(6) {
        for input in [
            TransformInput::PlaneWave { n: 1, k: 0.5 },
            TransformInput::DeltaLine { n: 2, kprime: -0.5 },
        ] {
            let est = transform_numeric(&p, &input, x, y, &schedule).unwrap();
            let exact = input.analytic(&p, x, y).unwrap();
            let diff = (est.value - exact).norm();
            assert!(diff <= 1e-3, "{input:?} at ({x}, {y}): {est:?} vs {exact}");
        }
    }
}

#[test]
fn custom_gaussian_matches_brute_force() {
    let p = natural();
    let f = gaussian_input();
    let input = TransformInput::Custom(f.clone());
    for (x, y) in [(0.0, 0.0), (1.0, -0.5), (-1.5, 2.0)] {
        let est = transform_numeric(&p, &input, x, y, &RegulatorSchedule::default()).unwrap();
        let brute = transform_direct(&p, &f, x, y, 9.0, 24).unwrap();
        let exact = gaussian_transform_exact(x, y);
        assert!((brute - exact).norm() < 1e-10, "{brute} vs {exact}");
        assert!((est.value - brute).norm() < 1e-6, "{est:?} vs {brute}");
    }
}

#[test]
fn custom_transform_is_linear() {
    let p = natural();
    let f = gaussian_input();
    let g = CustomInput::new("shifted", |q, qb| {
        Complex64::from_polar((-0.5 * ((q - 0.5) * (q - 0.5) + qb * qb / 1.5)).exp(), 0.3 * q)
    });
    let (a, b) = (Complex64::new(0.7, -1.2), Complex64::new(-0.4, 0.25));
    let h = f.combine(a, &g, b);
    let schedule = RegulatorSchedule::default();
    for (x, y) in [(0.2, 0.1), (-1.0, 1.3)] {
        let tf = transform_numeric(&p, &TransformInput::Custom(f.clone()), x, y, &schedule).unwrap();
        let tg = transform_numeric(&p, &TransformInput::Custom(g.clone()), x, y, &schedule).unwrap();
        let th = transform_numeric(&p, &TransformInput::Custom(h.clone()), x, y, &schedule).unwrap();
        assert!((th.value - (a * tf.value + b * tg.value)).norm() < 1e-10);
    }
}

/// `<T f, T g>` by trapezoid over a square `(x, y)` grid.
fn transformed_inner(p: &PhysicalParams, f: &CustomInput, g: &CustomInput, half: f64, h: f64) -> Complex64 {
    let grid = Grid2D::square_with_spacing(half, h).unwrap();
    let tf = ComplexField::from_fn(grid, |x, y| transform_direct(p, f, x, y, 8.0, 8).unwrap()).unwrap();
    let tg = ComplexField::from_fn(grid, |x, y| transform_direct(p, g, x, y, 8.0, 8).unwrap()).unwrap();
    tf.inner_interior(&tg, 0).unwrap()
}

fn plain_inner(f: &CustomInput, g: &CustomInput, l: f64) -> Complex64 {
    let n = 321;
    let half = 8.0 * l;
    let h = 2.0 * half / (n - 1) as f64;
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let (q, qb) = (-half + i as f64 * h, -half + j as f64 * h);
            s += f.eval(q, qb).conj() * g.eval(q, qb);
        }
    }
    s * h * h
}

#[test]
fn kernel_is_unitary_up_to_hbar() {
    let f = gaussian_input();
    let g = CustomInput::new("phase", |q, qb| {
        Complex64::from_polar((-0.5 * ((q - 0.4) * (q - 0.4) + (qb + 0.3) * (qb + 0.3))).exp(), 0.5 * qb)
    });
    let p = natural();
    let lhs = transformed_inner(&p, &f, &g, 7.0, 0.25);
    let rhs = plain_inner(&f, &g, 1.0);
    assert!((lhs - rhs).norm() < 1e-4, "{lhs} vs {rhs}");

    let q = PhysicalParams::new(2.0, 1.0, 1.0, 1.0, 2.0).unwrap();
    let lhs = transformed_inner(&q, &f, &f, 7.0, 0.25);
    let rhs = plain_inner(&f, &f, 1.0);
    assert!((lhs - rhs * 4.0).norm() < 1e-4, "{lhs} vs 4 * {rhs}");
}

#[test]
fn analytic_branches_preserve_energy() {
    let p = natural();
    let grid = Grid2D::square_with_spacing(10.0, 0.02).unwrap();
    for n in [0, 2] {
        let e = p.landau_level(n);
        let a = ComplexField::from_fn(grid, |x, y| transform_planewave(&p, n, 0.5, x, y)).unwrap();
        assert!(eigen_residual(&p, GaugeChoice::LandauX, &a, e).unwrap() < 1e-5);
        let b = ComplexField::from_fn(grid, |x, y| transform_delta(&p, n, 1.0, x, y)).unwrap();
        assert!(eigen_residual(&p, GaugeChoice::LandauX, &b, e).unwrap() < 1e-5);
    }
}

#[test]
fn schedule_validation() {
    let bad = |eps: Vec<f64>| RegulatorSchedule {
        epsilons: eps,
        ..RegulatorSchedule::default()
    };
    assert!(bad(vec![0.4, 0.2]).validate().is_err());
    assert!(bad(vec![0.4, 0.4, 0.1]).validate().is_err());
    assert!(bad(vec![0.4, -0.2, -0.3]).validate().is_err());
    assert!(bad(vec![0.4, 0.2, 0.1]).validate().is_ok());
    assert_eq!(RegulatorSchedule::default().reach(0), 8.0);
    assert!((RegulatorSchedule::default().reach(20) - (41f64.sqrt() + 6.0)).abs() < 1e-15);
}

#[test]
fn growing_increments_are_divergence() {
    let seq = vec![
        (0.4, Complex64::new(1.0, 0.0)),
        (0.2, Complex64::new(1.1, 0.0)),
        (0.1, Complex64::new(1.5, 0.0)),
    ];
    match check_monotone(&seq, 0.0) {
        Err(LandauError::Divergence { sequence }) => assert_eq!(sequence, seq),
        other => panic!("expected divergence, got {other:?}"),
    }
    let ok = vec![
        (0.4, Complex64::new(1.0, 0.0)),
        (0.2, Complex64::new(1.1, 0.0)),
        (0.1, Complex64::new(1.12, 0.0)),
    ];
    assert!(check_monotone(&ok, 0.0).is_ok());
    let noise = vec![
        (0.4, Complex64::new(1e-17, 0.0)),
        (0.2, Complex64::new(-2e-17, 0.0)),
        (0.1, Complex64::new(5e-16, 0.0)),
    ];
    assert!(check_monotone(&noise, 0.0).is_err());
    assert!(check_monotone(&noise, 1e-10).is_ok());
}

#[test]
fn node_of_the_output_is_not_divergence() {
    let p = PhysicalParams::new(1.0, 1.0, 1.0, 1.0, 2.0).unwrap();
    let input = TransformInput::DeltaLine { n: 1, kprime: 0.0 };
    let est = transform_numeric(&p, &input, 0.0, 0.0, &RegulatorSchedule::default()).unwrap();
    assert!(est.value.norm() < 1e-10, "{est:?}");
}

#[test]
fn neville_is_exact_on_polynomials_in_eps_squared() {
    let f = |e: f64| Complex64::new(2.0 + 3.0 * e * e - e.powi(4), 0.5 * e * e);
    let seq: Vec<_> = [0.4, 0.2, 0.1].iter().map(|&e| (e, f(e))).collect();
    assert!((extrapolate_to_zero(&seq) - Complex64::new(2.0, 0.0)).norm() < 1e-13);
}
