use thickspray::hyperbolic::SystemCoupling;
use thickspray::profiles::VelocityProfile;

/// Fixture systems for the consistency checks: two 2x2 and one 3x3.
pub fn fixtures(kappa: f64) -> Vec<SystemCoupling> {
    let p = VelocityProfile::standard_maxwellian;
    vec![
        SystemCoupling::from_row_major(
            &[1.0, 0.3, 0.3, 2.0],
            vec![1.0, 0.5],
            vec![vec![0.0, 1.0], vec![0.5]],
            kappa,
            p(),
        )
        .unwrap(),
        SystemCoupling::from_row_major(
            &[-1.0, 0.2, 0.0, 0.2, 0.5, 0.1, 0.0, 0.1, 1.5],
            vec![1.0, -1.0, 0.5],
            vec![vec![1.0], vec![0.0, 1.0], vec![0.2, 0.0, 0.3]],
            kappa,
            p(),
        )
        .unwrap(),
        SystemCoupling::from_row_major(
            &[-0.8, 0.4, 0.4, 1.2],
            vec![-1.0, 0.3],
            vec![vec![0.0, -1.0], vec![1.0]],
            kappa,
            p(),
        )
        .unwrap(),
    ]
}
