//! Acceptance gate: one test per criterion, each printing a pass line.
//! Criterion 13 (harness determinism through the command line) lives in the
//! cli crate's integration tests.

use nalgebra::DVector;
use rand::Rng;
use randsimplex::exact::{ball_simplex_moment, kappa, mean_volume_coeff};
use randsimplex::geometry::{
    ball_intrinsic_volume, gram_factor, projection_volume, simplex_volume, Ellipsoid,
    LinearSubspace,
};
use randsimplex::montecarlo::estimate_simplex_moment;
use randsimplex::sampling::{gaussian_matrix, RandomStream};
use randsimplex::stats::ks_two_sample;
use randsimplex::{Family, IdentityParams, VerifyPolicy};
use std::f64::consts::PI;

const WORKERS: usize = 4;

fn params(d: usize, k: usize, p: Option<f64>, axes: &[f64]) -> IdentityParams {
    IdentityParams {
        d,
        k,
        p,
        semi_axes: axes.to_vec(),
        rotation_seed: None,
        family: None,
    }
}

fn verify(label: &str, params: &IdentityParams, n: u64, seed: u64) -> randsimplex::IdentityReport {
    randsimplex::verify_identity(label, params, n, seed, WORKERS, &VerifyPolicy::default()).unwrap()
}

#[test]
fn criterion_01_ball_moment_oracle() {
    let cases = [
        (2usize, 128.0 / (45.0 * PI)),
        (3, 36.0 / 35.0),
    ];
    for (i, &(d, expect)) in cases.iter().enumerate() {
        let ball = Ellipsoid::unit_ball(d).unwrap();
        let stream = RandomStream::new(101 + i as u64);
        let r = estimate_simplex_moment(&stream, &ball, 1, 1.0, 1_000_000, WORKERS).unwrap();
        let z = (r.value - expect) / r.stderr;
        assert!(r.stderr < 1e-3, "d={d}: stderr {}", r.stderr);
        assert!(z.abs() <= 4.0, "d={d}: value {} vs {expect}, z={z:.2}", r.value);
    }
    println!("criterion 1 (ball moment oracle): PASS");
}

#[test]
fn criterion_02_projection_factor_deterministic() {
    let mut stream = RandomStream::new(202);
    let mut trials = 0;
    while trials < 200 {
        let d = stream.random_range(1..=6usize);
        let k = stream.random_range(1..=d);
        let a = loop {
            let a = gaussian_matrix(&mut stream, d, d);
            if a.determinant().abs() > 1e-6 {
                break a;
            }
        };
        let x = gaussian_matrix(&mut stream, d, k);
        let points: Vec<DVector<f64>> = std::iter::once(DVector::zeros(d))
            .chain((0..k).map(|j| x.column(j).into_owned()))
            .collect();
        let base = simplex_volume(&points).unwrap();
        if base < 1e-8 {
            continue;
        }
        let transformed: Vec<DVector<f64>> = std::iter::once(DVector::zeros(d))
            .chain((0..k).map(|j| &a * x.column(j)))
            .collect();
        let lhs = simplex_volume(&transformed).unwrap();

        let shape = (a.transpose() * &a).try_inverse().unwrap();
        let shape = (&shape + shape.transpose()) * 0.5;
        let e = Ellipsoid::from_shape(&shape).unwrap();
        let span = LinearSubspace::span(&x).unwrap();
        let rhs = projection_volume(&e, &span).unwrap() / kappa(k as f64).unwrap() * base;
        let rel = (lhs - rhs).abs() / lhs.abs().max(1e-300);
        assert!(rel <= 1e-9, "d={d} k={k}: rel={rel:.3e}");
        trials += 1;
    }
    println!("criterion 2 (transform identity deterministic): PASS");
}

const KS_GRID: [(usize, usize, &[f64]); 3] = [
    (3, 1, &[2.0, 1.0, 0.5]),
    (3, 2, &[2.0, 1.0, 0.5]),
    (4, 2, &[3.0, 2.0, 1.0, 0.5]),
];

#[test]
fn criterion_03_transform_law_distributional() {
    for (i, &(d, k, axes)) in KS_GRID.iter().enumerate() {
        for (j, family) in [Family::UniformBallIid, Family::GaussianIid].into_iter().enumerate() {
            let mut pr = params(d, k, None, axes);
            pr.family = Some(family);
            let r = verify("affine-transform-law", &pr, 100_000, 303 + 10 * i as u64 + j as u64);
            assert!(
                r.pass,
                "d={d} k={k} family={family:?}: KS p={:?}",
                r.ks_p_value
            );
        }
    }
    println!("criterion 3 (transform law distributional, 6 cases): PASS");
}

#[test]
fn criterion_04_gram_ratio_law() {
    // First equality: the per-draw projection factor on a Gaussian span is a
    // deterministic function of the span, matching the Gram-factor form.
    let mut stream = RandomStream::new(404);
    for &(d, k, axes) in &KS_GRID {
        let e = Ellipsoid::from_semi_axes(axes, None).unwrap();
        for _ in 0..200 {
            let g = gaussian_matrix(&mut stream, d, k);
            let lhs = gram_factor(e.sym_root(), &g).unwrap();
            if lhs == 0.0 {
                continue;
            }
            let span = LinearSubspace::span(&g).unwrap();
            let rhs = projection_volume(&e, &span).unwrap() / kappa(k as f64).unwrap();
            assert!((lhs - rhs).abs() / lhs <= 1e-10, "d={d} k={k}: {lhs} vs {rhs}");
        }
    }
    // Second equality: distributional match against the coupled
    // singular-value ratio.
    for (i, &(d, k, axes)) in KS_GRID.iter().enumerate() {
        let r = verify("gram-ratio-law", &params(d, k, None, axes), 100_000, 414 + i as u64);
        assert!(r.pass, "d={d} k={k}: KS p={:?}", r.ks_p_value);
    }
    println!("criterion 4 (gram ratio law): PASS");
}

#[test]
fn criterion_05_ellipsoid_moment_grid() {
    let grid: [(usize, usize, &[f64]); 4] = [
        (2, 1, &[2.0, 1.0]),
        (3, 1, &[2.0, 1.0, 0.5]),
        (3, 2, &[3.0, 2.0, 1.0]),
        (4, 2, &[3.0, 2.0, 1.0, 0.5]),
    ];
    for (i, &(d, k, axes)) in grid.iter().enumerate() {
        for (j, &p) in [0.5f64, 1.0, 2.0].iter().enumerate() {
            let r = verify(
                "ellipsoid-moment",
                &params(d, k, Some(p), axes),
                1_000_000,
                505 + 10 * i as u64 + j as u64,
            );
            assert!(r.pass, "d={d} k={k} p={p}: z={:?}", r.z_score);
        }
    }
    println!("criterion 5 (ellipsoid moment factorization, 12 checks): PASS");
}

#[test]
fn criterion_06_mean_volume_coefficient() {
    for (i, k) in (1..=3usize).enumerate() {
        let r = verify(
            "mean-volume-coeff",
            &params(3, k, None, &[3.0, 2.0, 1.0]),
            1_000_000,
            606 + i as u64,
        );
        assert!(r.pass, "k={k}: z={:?}", r.z_score);
    }
    // Ball special case holds exactly in the constant path: the coefficient
    // times the ball's intrinsic volume is the ball mean simplex volume.
    for d in 1..=6usize {
        for k in 1..=d {
            let lhs = mean_volume_coeff(d, k).unwrap() * ball_intrinsic_volume(d, k).unwrap();
            let rhs = ball_simplex_moment(d, k, 1.0).unwrap();
            assert!((lhs - rhs).abs() / rhs <= 1e-10, "d={d} k={k}: {lhs} vs {rhs}");
        }
    }
    println!("criterion 6 (mean volume coefficient): PASS");
}

#[test]
fn criterion_07_beta_factorization() {
    let cases: [(usize, usize, &[f64]); 6] = [
        (2, 1, &[2.0, 1.0]),
        (3, 1, &[2.0, 1.0, 0.5]),
        (3, 2, &[2.0, 1.0, 0.5]),
        (2, 1, &[1.0, 1.0]),
        (3, 1, &[1.0, 1.0, 1.0]),
        (3, 2, &[1.0, 1.0, 1.0]),
    ];
    for (i, &(d, k, axes)) in cases.iter().enumerate() {
        let r = verify("beta-factorization", &params(d, k, None, axes), 100_000, 707 + i as u64);
        assert!(r.pass, "d={d} k={k} axes={axes:?}: KS p={:?}", r.ks_p_value);
    }
    println!("criterion 7 (beta factorization, ellipsoid and ball): PASS");
}

#[test]
fn criterion_08_linear_section_power() {
    let r = verify("ft-linear", &params(2, 1, None, &[2.0, 1.0]), 1_000_000, 808);
    assert!(r.pass, "ellipse: z={:?}", r.z_score);
    assert!((r.rhs.value() - 8.0).abs() <= 1e-12);
    assert!((r.lhs.value() - 8.0).abs() <= 4.0 * r.lhs.stderr());

    let r = verify("ft-linear", &params(3, 2, None, &[3.0, 2.0, 1.0]), 1_000_000, 809);
    let vol = Ellipsoid::from_semi_axes(&[3.0, 2.0, 1.0], None).unwrap().volume();
    let expect = kappa(2.0).unwrap().powi(3) / kappa(3.0).unwrap().powi(2) * vol * vol;
    assert!(r.pass, "3-d: z={:?}", r.z_score);
    assert!((r.rhs.value() - expect).abs() / expect <= 1e-12);
    println!("criterion 8 (linear section power integral): PASS");
}

#[test]
fn criterion_09_affine_section_power() {
    let r = verify("ft-affine", &params(2, 1, None, &[1.0, 1.0]), 1_000_000, 909);
    assert!(r.pass, "disk: z={:?}", r.z_score);
    assert!((r.rhs.value() - 3.0 * PI).abs() <= 1e-12);
    assert!((r.lhs.value() - 3.0 * PI).abs() <= 4.0 * r.lhs.stderr());

    let r = verify("ft-affine", &params(2, 1, None, &[2.0, 1.0]), 1_000_000, 910);
    assert!(r.pass, "ellipse: z={:?}", r.z_score);
    assert!((r.rhs.value() - 12.0 * PI).abs() <= 1e-11);
    println!("criterion 9 (affine section power integral): PASS");
}

#[test]
fn criterion_10_affine_point_moment_closed_loop() {
    let expect = 128.0 * PI / 45.0;
    let r = verify("affine-point-moment", &params(2, 1, Some(1.0), &[1.0, 1.0]), 1_000_000, 1010);
    assert!(r.pass, "z={:?}", r.z_score);
    assert!((r.lhs.value() - expect).abs() <= 5.0 * r.lhs.stderr(), "lhs {}", r.lhs.value());
    assert!((r.rhs.value() - expect).abs() <= 5.0 * r.rhs.stderr(), "rhs {}", r.rhs.value());
    println!("criterion 10 (affine point moment closed loop): PASS");
}

#[test]
fn criterion_11_origin_moment_via_sections() {
    // Unit disk: both sides target 2pi/3.
    let expect = 2.0 * PI / 3.0;
    let r = verify("linear-origin-moment", &params(2, 1, Some(1.0), &[1.0, 1.0]), 1_000_000, 1111);
    assert!(r.pass, "disk: z={:?}", r.z_score);
    assert!((r.lhs.value() - expect).abs() <= 5.0 * r.lhs.stderr());
    assert!((r.rhs.value() - expect).abs() <= 5.0 * r.rhs.stderr());

    // Ellipse (2,1): quadrature oracle for the cubed central chord averaged
    // over directions, scaled by the exact constant.
    let r = verify("linear-origin-moment", &params(2, 1, Some(1.0), &[2.0, 1.0]), 1_000_000, 1112);
    assert!(r.pass, "ellipse: z={:?}", r.z_score);
    let chord_cubed = |theta: f64| {
        let q = (theta.cos() / 2.0).powi(2) + theta.sin().powi(2);
        (2.0 / q.sqrt()).powi(3)
    };
    let n = 20_000;
    let h = PI / n as f64;
    let mut integral = chord_cubed(0.0) + chord_cubed(PI);
    for i in 1..n {
        integral += if i % 2 == 1 { 4.0 } else { 2.0 } * chord_cubed(i as f64 * h);
    }
    let mean_chord_cubed = integral * h / 3.0 / PI;
    let constant = PI / 12.0;
    let oracle = constant * mean_chord_cubed;
    assert!(
        (r.rhs.value() - oracle).abs() <= 4.0 * r.rhs.stderr(),
        "rhs {} vs oracle {oracle}",
        r.rhs.value()
    );
    assert!((r.lhs.value() - oracle).abs() <= 4.0 * r.lhs.stderr());
    println!("criterion 11 (origin moment via sections): PASS");
}

#[test]
fn criterion_12_mu_normalization() {
    for (i, &(d, k)) in [(2usize, 1usize), (3, 1), (3, 2)].iter().enumerate() {
        let axes = vec![1.0; d];
        let r = verify("mu-normalization", &params(d, k, None, &axes), 1_000_000, 1212 + i as u64);
        assert!(r.pass, "d={d} k={k}: z={:?}", r.z_score);
        let expect = kappa((d - k) as f64).unwrap();
        assert!((r.lhs.value() - expect).abs() <= 4.0 * r.lhs.stderr());
    }
    println!("criterion 12 (plane measure normalization): PASS");
}

#[test]
fn criterion_14_ks_calibration() {
    let n = 10_000usize;
    let mut rejections = 0;
    for rep in 0..200u64 {
        let mut s = RandomStream::new(1400 + rep);
        let a: Vec<f64> = (0..n).map(|_| s.random::<f64>()).collect();
        let b: Vec<f64> = (0..n).map(|_| s.random::<f64>()).collect();
        if ks_two_sample(&a, &b).unwrap().p_value < 0.01 {
            rejections += 1;
        }
    }
    let rate = rejections as f64 / 200.0;
    assert!(rate <= 0.04, "false rejection rate {rate}");
    println!("criterion 14 (KS calibration): PASS");
}
