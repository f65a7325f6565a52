//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use thickspray::dispersion::*;
use thickspray::hyperbolic::*;
use thickspray::modesim::*;
use thickspray::profiles::{make_bump_on_tail, VelocityProfile};
use thickspray::quadrature::*;
use thickspray::roots::SearchRegion;

mod common;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn std_max() -> VelocityProfile {
    VelocityProfile::standard_maxwellian()
}

fn bump() -> VelocityProfile {
    make_bump_on_tail(&std_max(), 0.05, 0.5, 5.0).unwrap()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    format!("error: {e}")
}

fn decoupled_roots() -> Outcome {
    let q = QuadratureConfig::default();
    let p = std_max();
    let mut worst = 0.0f64;
    for c0 in [0.7, 1.0, 2.5] {
        let sp = SprayParams::new(c0, 1.0, 0.0, &p).map_err(err)?;
        let r = SearchRegion::new(-4.0 * c0, 4.0 * c0, -0.25, 0.25).map_err(err)?;
        let roots = find_roots(&sp, &p, &r, 1e-12, &q).map_err(err)?;
        if roots.len() != 2 {
            return Err(format!("c0={c0}: {} roots", roots.len()));
        }
        worst = worst
            .max((roots[0].sigma + c0).norm())
            .max((roots[1].sigma - c0).norm());
    }
    check(worst <= 1e-10, format!("max |sigma -+ c0| = {worst:.2e}"))
}

/// Least-squares slope of `log y` against `log x`.
fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

fn plemelj_limit() -> Outcome {
    let q = QuadratureConfig::default();
    let p = std_max();
    let sp = SprayParams::new(1.0, 1.0, 0.1, &p).map_err(err)?;
    let eps = [1e-2, 1e-3, 1e-4];
    let mut min_slope = f64::INFINITY;
    for i in 0..10 {
        let s = -2.7 + 0.6 * i as f64;
        let on = eval_d(&sp, &p, C64::new(s, 0.0), &q).map_err(err)?;
        let mut diffs = Vec::new();
        for e in eps {
            diffs.push((eval_d(&sp, &p, C64::new(s, e), &q).map_err(err)? - on).norm());
        }
        min_slope = min_slope.min(loglog_slope(&eps, &diffs));
    }
    check(min_slope >= 0.9, format!("min fitted order {min_slope:.3} over 10 points"))
}

fn rayleigh() -> Outcome {
    let q = QuadratureConfig::default();
    let p = std_max();
    let sp = SprayParams::new(1.0, 1.0, 0.01, &p).map_err(err)?;
    let d = p.strip_halfwidth();
    let r = SearchRegion::new(-5.0, 5.0, 1e-6, 0.4 * d).map_err(err)?;
    let n = count_roots(&sp, &p, &r, &q).map_err(err)?;
    let v = spectral_verdict(&sp, &p, &default_verdict_region(&sp, &p), &q).map_err(err)?;
    check(n == 0 && v == Verdict::Stable, format!("upper roots {n}, verdict {v:?}"))
}

fn thin_spray() -> Outcome {
    let q = QuadratureConfig::default();
    let p = std_max();
    let mut errs = Vec::new();
    for kappa in [4e-3, 2e-3, 1e-3] {
        let sp = SprayParams::new(1.0, 1.0, kappa, &p).map_err(err)?;
        let t = thin_spray_expansion(&sp, &p, &q).map_err(err)?;
        let r = SearchRegion::new(0.5, 1.5, -0.2, 0.2).map_err(err)?;
        let roots = find_roots(&sp, &p, &r, 1e-12, &q).map_err(err)?;
        if roots.len() != 1 {
            return Err(format!("kappa={kappa}: {} roots", roots.len()));
        }
        errs.push((roots[0].sigma - C64::new(t.c_star, t.gamma)).norm());
    }
    let ratios: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
    let ok = ratios.iter().all(|r| (3.5..=4.5).contains(r));
    check(ok, format!("error ratios {:.3} {:.3}", ratios[0], ratios[1]))
}

fn asymptotics() -> Outcome {
    let q = QuadratureConfig::default();
    let p = std_max();
    let sp = SprayParams::new(1.0, 1.0, 0.01, &p).map_err(err)?;
    let rem = |s: f64| -> Result<f64, String> {
        let (dr, _) = eval_d_parts(&sp, &p, s, &q).map_err(err)?;
        Ok((dr - eval_d_asymptotic(&sp, &p, C64::new(s, 0.0)).re).abs())
    };
    let ratio = rem(10.0)? / rem(20.0)?;
    check((50.0..=80.0).contains(&ratio), format!("remainder ratio {ratio:.2}"))
}

fn bump_params() -> Result<(SprayParams, VelocityProfile, C64), String> {
    let b = bump();
    let sp = SprayParams::new(5.0, 1.0, 3e-3, &b).map_err(err)?;
    let sigma = most_unstable_root(&sp, &b, &QuadratureConfig::default()).map_err(err)?;
    Ok((sp, b, sigma))
}

fn bump_growth() -> Outcome {
    let q = QuadratureConfig::default();
    let (sp, b, sigma) = bump_params()?;
    if sigma.im <= 0.0 {
        return Err(format!("root {sigma} not unstable"));
    }
    let k = 8.0;
    let cfg = SimConfig {
        t_final: 12.0 / (k * sigma.im),
        ..Default::default()
    };
    let grid = VelocityGrid::from_config(&b, &cfg);
    let st = init_eigenmode(&sp, &b, sigma, k, &grid, &q).map_err(err)?;
    let traj = integrate(&sp, &b, &st, &cfg).map_err(err)?;
    let fit = growth_rate(&traj, fit_window(&cfg)).map_err(err)?;
    let rel = (fit.rate / (k * sigma.im) - 1.0).abs();
    check(rel < 0.02, format!("sigma {sigma:.6}, fitted {:.6} vs {:.6} (rel {rel:.1e})", fit.rate, k * sigma.im))
}

fn illposedness() -> Outcome {
    let q = QuadratureConfig::default();
    let (sp, b, _) = bump_params()?;
    let r = sobolev_scaling_experiment(&sp, &b, 1.0, 2.0, &[8.0, 16.0, 32.0], &SimConfig::default(), &q).map_err(err)?;
    let ratios: Vec<f64> = r.rows.windows(2).map(|w| w[1].fitted_rate / w[0].fitted_rate).collect();
    let doubling = ratios.iter().all(|x| (x / 2.0 - 1.0).abs() < 0.05);
    let hs_down = r.rows.windows(2).all(|w| w[1].init_hs_norm < w[0].init_hs_norm);
    check(
        doubling && hs_down && r.theta0 > 0.0,
        format!("rate ratios {:.4} {:.4}, H^s decreasing {hs_down}, theta0 {:.3}", ratios[0], ratios[1], r.theta0),
    )
}

fn scalar_law() -> Outcome {
    let q = QuadratureConfig::default();
    let mut worst = 0.0f64;
    for kappa in [1e-3, -1e-3] {
        let c = ScalarCoupling {
            lambda0: 1.0,
            kappa,
            profile: std_max(),
        };
        let root = scalar_root(&c, 1e-12, &q).map_err(err)?;
        let lead = scalar_imag_leading(&c);
        if root.sigma.im.signum() != lead.signum() || lead.signum() != kappa.signum() {
            return Err(format!("kappa={kappa}: Im sigma {} vs predicted {lead}", root.sigma.im));
        }
        worst = worst.max(((root.sigma.im - lead) / lead).abs());
    }
    check(worst < 0.05, format!("max relative deviation {worst:.2e}"))
}

fn prop1() -> Outcome {
    let q = QuadratureConfig::default();
    let mut worst = 0.0f64;
    let mut modes = 0;
    for s in common::fixtures(1e-4) {
        let verdicts = prop1_check(&s).map_err(err)?;
        let tracked = track_all_secular_roots(&s, 4, &q).map_err(err)?;
        for (m, t) in verdicts.iter().zip(&tracked) {
            let predicted = s.kappa * m.imag_rate;
            let unstable = m.verdict == ModeClass::UnstableMode;
            if unstable != (t.z.im > 0.0) {
                return Err(format!("mode {} at {}: verdict {:?}, tracked {}", m.j, m.sigma_j, m.verdict, t.z));
            }
            worst = worst.max(((t.z.im - predicted) / predicted).abs());
            modes += 1;
        }
    }
    check(worst < 0.1, format!("{modes} modes, max relative deviation {worst:.2e}"))
}

fn dawson(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    while term.abs() > 1e-18 * sum.abs() {
        n += 1.0;
        term *= -2.0 * x * x / (2.0 * n + 1.0);
        sum += term;
    }
    sum
}

fn dawson_check() -> Outcome {
    let cfg = QuadratureConfig::default();
    let g = FnIntegrand::decaying(|v: C64| Ok((-v * v).exp() / PI.sqrt()), 6.0, 1.0);
    let mut worst = 0.0f64;
    for x in [0.5, 1.0, 2.0] {
        let pv = pv_integral(&g, x, &cfg).map_err(err)?;
        let exact = -2.0 * dawson(x);
        worst = worst.max(((pv.re - exact) / exact).abs());
    }
    check(worst < 1e-8, format!("max relative error {worst:.2e}"))
}

fn acoustic_conservation() -> Outcome {
    let p = std_max();
    let sp = SprayParams::new(1.3, 0.8, 0.0, &p).map_err(err)?;
    let k = 2.0;
    let cfg = SimConfig {
        nv: 512,
        t_final: 10.0 * 2.0 * PI / (k * sp.c0),
        ..Default::default()
    };
    let grid = VelocityGrid::from_config(&p, &cfg);
    let traj = integrate(&sp, &p, &acoustic_state(&sp, k, &grid), &cfg).map_err(err)?;
    let energy = |t: C64, u: C64| u.norm_sqr() + (sp.rho0 * sp.c0).powi(2) * t.norm_sqr();
    let e0 = energy(traj.tau[0], traj.u[0]);
    let drift = traj
        .tau
        .iter()
        .zip(&traj.u)
        .map(|(t, u)| (energy(*t, *u) / e0 - 1.0).abs())
        .fold(0.0, f64::max);
    check(drift < 1e-6, format!("max relative energy drift {drift:.2e} over 10 periods"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("decoupled roots at +-c0", decoupled_roots),
        ("Plemelj limit order", plemelj_limit),
        ("no upper roots for Maxwellian", rayleigh),
        ("thin-spray expansion is second order", thin_spray),
        ("large-sigma remainder", asymptotics),
        ("bump-on-tail growth rate", bump_growth),
        ("high-frequency ill-posedness", illposedness),
        ("scalar coupling rate", scalar_law),
        ("system stability criterion", prop1),
        ("principal value vs Dawson", dawson_check),
        ("acoustic energy conservation", acoustic_conservation),
    ];
    let results: Vec<Outcome> = criteria.par_iter().map(|(_, f)| f()).collect();
    let mut failed = 0;
    for (i, ((name, _), r)) in criteria.iter().zip(&results).enumerate() {
        match r {
            Ok(d) => println!("[{:>2}] PASS  {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("[{:>2}] FAIL  {name}: {d}", i + 1)
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
