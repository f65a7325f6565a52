use num_complex::Complex64 as C64;
use proptest::prelude::*;
use thickspray::dispersion::*;
use thickspray::profiles::*;
use thickspray::quadrature::{Branch, QuadratureConfig};
use thickspray::roots::{continue_zero, RootOptions, SearchRegion};
use thickspray::Error;

fn maxwellian_params(kappa: f64) -> (SprayParams, VelocityProfile) {
    let p = VelocityProfile::standard_maxwellian();
    (SprayParams::new(1.0, 1.0, kappa, &p).unwrap(), p)
}

fn bump() -> VelocityProfile {
    make_bump_on_tail(&VelocityProfile::standard_maxwellian(), 0.05, 0.5, 5.0).unwrap()
}

#[test]
fn decoupled_roots_are_plus_minus_c0() {
    let q = QuadratureConfig::default();
    for c0 in [1.0, 2.5] {
        let p = VelocityProfile::standard_maxwellian();
        let sp = SprayParams::new(c0, 1.3, 0.0, &p).unwrap();
        let r = SearchRegion::new(-4.0 * c0, 4.0 * c0, -0.25, 0.25).unwrap();
        let roots = find_roots(&sp, &p, &r, 1e-12, &q).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0].sigma - C64::new(-c0, 0.0)).norm() <= 1e-10);
        assert!((roots[1].sigma - C64::new(c0, 0.0)).norm() <= 1e-10);
        assert_eq!(count_roots(&sp, &p, &r, &q).unwrap(), 2);
        let near = SearchRegion::new(0.5 * c0, 1.5 * c0, -0.1, 0.1).unwrap();
        assert_eq!(count_roots(&sp, &p, &near, &q).unwrap(), 1);
    }
}

#[test]
fn small_coupling_damps_both_acoustic_roots() {
    let q = QuadratureConfig::default();
    let (sp, p) = maxwellian_params(0.01);
    let r = SearchRegion::new(-3.0, 3.0, -0.25, 0.25).unwrap();
    let roots = find_roots(&sp, &p, &r, 1e-12, &q).unwrap();
    assert_eq!(roots.len(), 2);
    for (root, sign) in roots.iter().zip([-1.0, 1.0]) {
        assert!(root.sigma.im < 0.0);
        assert!((root.sigma.re - sign).abs() < 0.01);
        assert!(root.residual <= 1e-12);
        assert!(root.winding_evidence >= 1);
        assert_eq!(root.branch, Branch::Lower);
        assert!(root.is_decay_rate());
    }
    // reflection pair {sigma, -conj(sigma)}
    assert!((roots[0].sigma + roots[1].sigma.conj()).norm() < 1e-10);
}

#[test]
fn rayleigh_no_upper_roots_for_maxwellian() {
    let q = QuadratureConfig::default();
    for kappa in [0.01, 0.1, 0.5] {
        let (sp, p) = maxwellian_params(kappa);
        let d = p.strip_halfwidth();
        let r = SearchRegion::new(-5.0, 5.0, 1e-6, 0.4 * d).unwrap();
        assert_eq!(count_roots(&sp, &p, &r, &q).unwrap(), 0, "kappa {kappa}");
    }
}

#[test]
fn thin_spray_error_is_second_order() {
    let q = QuadratureConfig::default();
    let mut errs = Vec::new();
    for kappa in [4e-3, 2e-3, 1e-3] {
        let (sp, p) = maxwellian_params(kappa);
        let t = thin_spray_expansion(&sp, &p, &q).unwrap();
        let r = SearchRegion::new(0.5, 1.5, -0.2, 0.2).unwrap();
        let roots = find_roots(&sp, &p, &r, 1e-12, &q).unwrap();
        assert_eq!(roots.len(), 1);
        errs.push((roots[0].sigma - C64::new(t.c_star, t.gamma)).norm());
    }
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}, errors {errs:?}");
    }
}

#[test]
fn bump_on_tail_has_unstable_root() {
    let q = QuadratureConfig::default();
    let b = bump();
    let sp = SprayParams::new(5.0, 1.0, 3e-3, &b).unwrap();
    let r = SearchRegion::new(-15.0, 15.0, 5e-4, 0.25).unwrap();
    let roots = find_roots(&sp, &b, &r, 1e-12, &q).unwrap();
    assert_eq!(roots.len(), 1);
    let s = roots[0].sigma;
    assert!(s.im > 0.05 && (s.re - 5.0).abs() < 0.2, "{s}");
    assert_eq!(roots[0].branch, Branch::Upper);
}

#[test]
fn verdicts() {
    let q = QuadratureConfig::default();
    let (sp, p) = maxwellian_params(0.01);
    let region = default_verdict_region(&sp, &p);
    assert_eq!(region.re_max, 10.0);
    assert_eq!(region.im_max, 0.25);
    assert_eq!(spectral_verdict(&sp, &p, &region, &q).unwrap(), Verdict::Stable);

    let (sp0, _) = maxwellian_params(0.0);
    assert_eq!(spectral_verdict(&sp0, &p, &region, &q).unwrap(), Verdict::Neutral);

    let b = bump();
    let sp = SprayParams::new(5.0, 1.0, 1e-3, &b).unwrap();
    let region = default_verdict_region(&sp, &b);
    assert_eq!(spectral_verdict(&sp, &b, &region, &q).unwrap(), Verdict::Unstable);
}

#[test]
fn drift_shifts_roots_galilean() {
    let q = QuadratureConfig::default();
    let p = VelocityProfile::maxwellian(1.0, 0.7, 1.0).unwrap();
    let sp = SprayParams::new(1.0, 1.0, 0.01, &p).unwrap().with_u0(0.7);
    let r = SearchRegion::new(-2.5, 3.5, -0.2, 0.2).unwrap();
    let moved = find_roots(&sp, &p, &r, 1e-12, &q).unwrap();
    let (sp0, p0) = maxwellian_params(0.01);
    let r0 = SearchRegion::new(-3.0, 3.0, -0.2, 0.2).unwrap();
    let rest = find_roots(&sp0, &p0, &r0, 1e-12, &q).unwrap();
    assert_eq!(moved.len(), 2);
    for (a, b) in moved.iter().zip(&rest) {
        assert!((a.sigma - 0.7 - b.sigma).norm() < 1e-10);
    }
}

#[test]
fn large_sigma_remainder_is_sixth_order() {
    let q = QuadratureConfig::default();
    let (sp, p) = maxwellian_params(0.01);
    let err = |s: f64| {
        let (dr, _) = eval_d_parts(&sp, &p, s, &q).unwrap();
        (dr - eval_d_asymptotic(&sp, &p, C64::new(s, 0.0)).re).abs()
    };
    let ratio = err(10.0) / err(20.0);
    assert!((50.0..=80.0).contains(&ratio), "{ratio}");
}

#[test]
fn root_path_crossing_the_axis_is_continuous() {
    let q = QuadratureConfig::default();
    let b = bump();
    let c0 = 5.35;
    let kmax = 8e-3;
    let path: Vec<f64> = (1..=16).map(|i| kmax * i as f64 / 16.0).collect();
    let f = |kappa: f64, s: C64| eval_d(&SprayParams::new(c0, 1.0, kappa, &b)?, &b, s, &q);
    let z = continue_zero(&f, C64::new(c0, 0.0), &path, &RootOptions::default(), 0.05).unwrap();
    assert!(z.first().unwrap().z.im < 0.0);
    assert!(z.last().unwrap().z.im > 0.0);
    let mut prev = C64::new(c0, 0.0);
    for s in &z {
        assert!((s.z - prev).norm() < 0.1);
        prev = s.z;
    }
}

#[test]
fn landau_depends_on_k_not_only_phase_velocity() {
    let q = QuadratureConfig::default();
    let p = VelocityProfile::standard_maxwellian();
    let z = C64::new(1.5, 0.2);
    let a = eval_d_landau(&p, 1.0, z, &q).unwrap();
    let b = eval_d_landau(&p, 2.0, 2.0 * z, &q).unwrap();
    assert!((a - b).norm() > 1e-3);
    let (sp, _) = maxwellian_params(0.01);
    let da = eval_d(&sp, &p, z, &q).unwrap();
    let db = eval_d(&sp, &p, (2.0 * z) / 2.0, &q).unwrap();
    assert_eq!(da, db);

    // coupling term decays like 1/k^2
    let e100 = (eval_d_landau(&p, 100.0, 100.0 * z, &q).unwrap() - 1.0).norm();
    let e200 = (eval_d_landau(&p, 200.0, 200.0 * z, &q).unwrap() - 1.0).norm();
    assert!(e100 <= 1e-3);
    assert!((e100 / e200 - 4.0).abs() < 1e-10);

    // even profile, purely imaginary omega: real value
    let v = eval_d_landau(&p, 0.7, C64::new(0.0, 0.3), &q).unwrap();
    assert!(v.im.abs() < 1e-14);
    assert!(matches!(eval_d_landau(&p, 0.0, z, &q), Err(Error::ZeroSigma)));
}

#[test]
fn landau_negative_k_continues_from_laplace_side() {
    let q = QuadratureConfig::default();
    let p = VelocityProfile::standard_maxwellian();
    // for an even profile, D_L(-k, omega) = D_L(k, omega) by v -> -v
    for w in [C64::new(1.2, 0.1), C64::new(0.8, 0.0), C64::new(1.1, -0.1)] {
        let a = eval_d_landau(&p, 0.5, w, &q).unwrap();
        let b = eval_d_landau(&p, -0.5, w, &q).unwrap();
        assert!((a - b).norm() < 1e-12, "{w}: {a} {b}");
    }
}

#[test]
fn region_outside_strip_rejected() {
    let q = QuadratureConfig::default();
    let (sp, p) = maxwellian_params(0.01);
    let r = SearchRegion::new(-1.0, 1.0, -0.1, 0.9).unwrap();
    assert!(matches!(count_roots(&sp, &p, &r, &q), Err(Error::InvalidRegion(_))));
    assert!(SearchRegion::new(1.0, -1.0, 0.0, 0.1).is_err());
}

#[test]
fn invalid_params_rejected() {
    let p = VelocityProfile::standard_maxwellian();
    assert!(SprayParams::new(0.0, 1.0, 0.1, &p).is_err());
    assert!(SprayParams::new(1.0, -1.0, 0.1, &p).is_err());
    assert!(matches!(
        SprayParams::new(1.0, 1.0, 1.5, &p),
        Err(Error::VacuumViolation { .. })
    ));
    let mut sp = SprayParams::new(1.0, 1.0, 0.1, &p).unwrap();
    sp.alpha0 = 1.0;
    assert!(sp.validate(&p).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn reflection_symmetry(re in -3.0f64..3.0, im in 0.01f64..0.24, kappa in 0.0f64..0.2) {
        let q = QuadratureConfig::default();
        let (sp, p) = maxwellian_params(kappa);
        let s = C64::new(re, im);
        prop_assume!(s.norm() > 1e-2);
        let a = eval_d(&sp, &p, s, &q).unwrap();
        let b = eval_d(&sp, &p, -s.conj(), &q).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn rayleigh_for_monotone_profiles(kappa in 0.001f64..0.3, width in 0.5f64..2.0, c0 in 0.5f64..2.0) {
        let q = QuadratureConfig::default();
        let p = VelocityProfile::maxwellian(1.0, 0.0, width).unwrap();
        let sp = SprayParams::new(c0, 1.0, kappa, &p).unwrap();
        let d = p.strip_halfwidth();
        let r = SearchRegion::new(-5.0 * c0, 5.0 * c0, 1e-6, 0.4 * d).unwrap();
        prop_assert_eq!(count_roots(&sp, &p, &r, &q).unwrap(), 0);
    }

    #[test]
    fn scaling_k_and_omega_together_is_invisible(re in 0.2f64..2.0, im in 0.01f64..0.2, k in 0.1f64..5.0) {
        // D is a function of omega/|k| only
        let q = QuadratureConfig::default();
        let (sp, p) = maxwellian_params(0.05);
        let omega = C64::new(re, im) * k;
        let a = eval_d(&sp, &p, omega / k, &q).unwrap();
        let b = eval_d(&sp, &p, (2.0 * omega) / (2.0 * k), &q).unwrap();
        prop_assert!((a - b).norm() < 1e-13);
    }
}
