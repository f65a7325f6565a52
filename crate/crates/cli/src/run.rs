use std::fs;
use std::path::Path;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thickspray::dispersion::*;
use thickspray::hyperbolic::{fails_necessary_condition, prop1_check, track_all_secular_roots, ModeVerdict};
use thickspray::modesim::*;
use thickspray::quadrature::classify_branch;
use thickspray::roots::{continue_zero, newton, RootOptions, SearchRegion};
use thickspray::Error;

use crate::config::{Command, InitialState, RunConfig};
use crate::error::CliError;
use crate::plotdata::{fmt_f64, write_columns, PlotKind};

/// Files written (relative to the output directory), a summary for the
/// manifest, and warnings raised along the way.
#[derive(Debug, Default)]
pub struct Outcome {
    pub outputs: Vec<String>,
    pub summary: Value,
    pub warnings: Vec<String>,
}

/// Thin-spray prediction for one branch, checked against the located root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThinSprayReport {
    pub sign: f64,
    pub c_star: f64,
    pub gamma: f64,
    pub root_check: Option<RootCheck>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootCheck {
    pub sigma: C64,
    pub residual: f64,
    /// `|sigma - (c_star + i gamma)|`.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeReport {
    #[serde(flatten)]
    pub mode: ModeVerdict,
    /// Root of the secular function continued from `sigma_j` to `kappa`.
    pub tracked_sigma: Option<C64>,
}

struct Sink<'a> {
    dir: &'a Path,
    outcome: Outcome,
}

impl Sink<'_> {
    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let text = serde_json::to_string_pretty(value).expect("result serializes");
        fs::write(&path, text + "\n").map_err(CliError::io(&path))?;
        self.outcome.outputs.push(name.into());
        Ok(())
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            source: e.into(),
        })?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush().map_err(CliError::io(&path))?;
        self.outcome.outputs.push(name.into());
        Ok(())
    }

    fn plot(&mut self, name: &str, kind: PlotKind, notes: &[String], cols: &[&str], rows: &[Vec<f64>], block: Option<usize>) -> Result<(), CliError> {
        let rel = format!("plot/{name}");
        write_columns(&self.dir.join(&rel), kind, notes, cols, rows, block)?;
        self.outcome.outputs.push(rel);
        Ok(())
    }

    fn warn(&mut self, w: impl Into<String>) {
        self.outcome.warnings.push(w.into());
    }
}

pub fn execute(cfg: &RunConfig, dir: &Path) -> Result<Outcome, CliError> {
    let plot = dir.join("plot");
    fs::create_dir_all(&plot).map_err(|_| CliError::Config(format!("output directory {} is not writable", dir.display())))?;
    let mut sink = Sink {
        dir,
        outcome: Outcome::default(),
    };
    if let Some(p) = &cfg.params {
        if cfg.command != Command::StabilityCheck {
            let alpha0 = p.resolve(&cfg.profile)?.alpha0;
            sink.warn(format!(
                "the continued branch of the dispersion function carries the same 1/alpha0 factor as the real-axis term (alpha0 = {})",
                fmt_f64(alpha0)
            ));
        }
    }
    let summary = match cfg.command {
        Command::DispersionScan => dispersion_scan(cfg, &mut sink)?,
        Command::Roots => roots(cfg, &mut sink)?,
        Command::ThinSpray => thin_spray(cfg, &mut sink)?,
        Command::LandauCompare => landau_compare(cfg, &mut sink)?,
        Command::Simulate => simulate(cfg, &mut sink)?,
        Command::IllposedDemo => illposed(cfg, &mut sink)?,
        Command::StabilityCheck => stability(cfg, &mut sink)?,
    };
    let mut out = sink.outcome;
    out.summary = summary;
    out.outputs.sort();
    Ok(out)
}

/// Configured region, or the verdict rectangle mirrored below the axis.
fn region_or_default(cfg: &RunConfig, params: &SprayParams) -> SearchRegion {
    cfg.region.unwrap_or_else(|| {
        let r = default_verdict_region(params, &cfg.profile);
        SearchRegion {
            im_min: -r.im_max,
            ..r
        }
    })
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Points where the function is undefined (the origin, a profile edge)
/// become NaN; other failures abort.
fn value_or_nan(r: thickspray::Result<C64>) -> Result<C64, CliError> {
    match r {
        Ok(v) => Ok(v),
        Err(Error::ZeroSigma | Error::BumpEdge { .. }) => Ok(C64::new(f64::NAN, f64::NAN)),
        Err(e) => Err(e.into()),
    }
}

fn dispersion_scan(cfg: &RunConfig, sink: &mut Sink) -> Result<Value, CliError> {
    let params = cfg.params()?;
    let region = region_or_default(cfg, &params);
    let re = linspace(region.re_min, region.re_max, cfg.scan.n_re);
    let im = linspace(region.im_min, region.im_max, cfg.scan.n_im);
    let q = &cfg.quadrature;
    let lines: Vec<Vec<(C64, C64)>> = re
        .par_iter()
        .map(|&x| {
            im.iter()
                .map(|&y| {
                    let s = C64::new(x, y);
                    Ok((s, value_or_nan(eval_d(&params, &cfg.profile, s, q))?))
                })
                .collect::<Result<Vec<_>, CliError>>()
        })
        .collect::<Result<_, _>>()?;
    let points: Vec<(C64, C64)> = lines.into_iter().flatten().collect();
    let undefined = points.iter().filter(|(_, d)| d.re.is_nan()).count();
    if undefined > 0 {
        sink.warn(format!("{undefined} scan points where the dispersion function is undefined are written as NaN"));
    }
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|(s, d)| {
            let b = classify_branch(*s, q).as_str().to_string();
            vec![fmt_f64(s.re), fmt_f64(s.im), fmt_f64(d.re), fmt_f64(d.im), b]
        })
        .collect();
    sink.csv("scan.csv", &["re_sigma", "im_sigma", "re_D", "im_D", "branch"], &rows)?;
    let heat: Vec<Vec<f64>> = points.iter().map(|(s, d)| vec![s.re, s.im, d.re, d.im, d.norm().log10()]).collect();
    sink.plot(
        "scan_heatmap.dat",
        PlotKind::ScanHeatmap,
        &[format!("{} x {} grid, one block per Re sigma", cfg.scan.n_re, cfg.scan.n_im)],
        &["re_sigma", "im_sigma", "re_D", "im_D", "log10_abs_D"],
        &heat,
        Some(cfg.scan.n_im),
    )?;
    Ok(json!({"points": points.len(), "undefined_points": undefined, "region": region}))
}

fn roots(cfg: &RunConfig, sink: &mut Sink) -> Result<Value, CliError> {
    let params = cfg.params()?;
    let region = region_or_default(cfg, &params);
    let found = find_roots(&params, &cfg.profile, &region, cfg.root_tol, &cfg.quadrature)?;
    sink.json("roots.json", &found)?;
    let decay = found.iter().filter(|r| r.is_decay_rate()).count();
    if decay > 0 {
        sink.warn(format!(
            "{decay} root(s) lie below the real axis; they are decay rates of the continued dispersion function, not eigenvalues"
        ));
    }
    let unstable = found.iter().filter(|r| r.sigma.im > 0.0).count();
    Ok(json!({"roots": found.len(), "unstable": unstable, "decay_rates": decay, "region": region}))
}

fn check_thin_spray(params: &SprayParams, cfg: &RunConfig, t: &ThinSpray) -> Result<Option<RootCheck>, CliError> {
    let h = 0.05 * params.c0;
    let cap = 0.45 * cfg.profile.strip_halfwidth();
    let box_ = SearchRegion::new(t.c_star - h, t.c_star + h, (t.gamma - h).max(-cap), (t.gamma + h).min(cap))?;
    let found = find_roots(params, &cfg.profile, &box_, cfg.root_tol, &cfg.quadrature)?;
    let guess = C64::new(t.c_star, t.gamma);
    Ok(found
        .iter()
        .min_by(|a, b| (a.sigma - guess).norm().total_cmp(&(b.sigma - guess).norm()))
        .map(|r| RootCheck {
            sigma: r.sigma,
            residual: r.residual,
            distance: (r.sigma - guess).norm(),
        }))
}

fn thin_spray(cfg: &RunConfig, sink: &mut Sink) -> Result<Value, CliError> {
    let params = cfg.params()?;
    let q = &cfg.quadrature;
    let reports = [-1.0, 1.0]
        .par_iter()
        .map(|&sign| {
            let t = thin_spray_branch(&params, &cfg.profile, sign, q)?;
            Ok(ThinSprayReport {
                sign,
                c_star: t.c_star,
                gamma: t.gamma,
                root_check: check_thin_spray(&params, cfg, &t)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    for r in &reports {
        if r.root_check.is_none() {
            sink.warn(format!("no root found near the thin-spray prediction on the {} branch", branch_name(r.sign)));
        }
    }
    sink.json("thin_spray.json", &reports)?;
    let mut summary = json!({"branches": reports.len()});
    if let Some(sweep) = &cfg.kappa_sweep {
        if cfg.params.and_then(|p| p.alpha0).is_some() {
            sink.warn("kappa_sweep recomputes alpha0 from the compatibility condition at every kappa");
        }
        let spec = cfg.params.expect("validated");
        let at = |kappa: f64| SprayParams::new(spec.c0, spec.rho0, kappa, &cfg.profile).map(|p| p.with_u0(spec.u0));
        for sign in [-1.0, 1.0] {
            let f = |kappa: f64, s: C64| eval_d(&at(kappa)?, &cfg.profile, s, q);
            let z0 = C64::new(spec.u0 + sign * spec.c0, 0.0);
            let path = continue_zero(&f, z0, sweep, &RootOptions::default(), 0.05 * spec.c0)?;
            let rows = sweep
                .par_iter()
                .zip(&path)
                .map(|(&kappa, z)| {
                    let t = thin_spray_branch(&at(kappa)?, &cfg.profile, sign, q)?;
                    Ok(vec![kappa, z.z.re, z.z.im, t.c_star, t.gamma])
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            sink.plot(
                &format!("root_locus_{}.dat", branch_name(sign)),
                PlotKind::RootLocus,
                &[format!("{} acoustic branch continued in kappa", branch_name(sign))],
                &["kappa", "re_sigma", "im_sigma", "thin_c_star", "thin_gamma"],
                &rows,
                None,
            )?;
        }
        summary["locus_points"] = json!(sweep.len());
    }
    Ok(summary)
}

fn branch_name(sign: f64) -> &'static str {
    if sign > 0.0 {
        "plus"
    } else {
        "minus"
    }
}

fn landau_compare(cfg: &RunConfig, sink: &mut Sink) -> Result<Value, CliError> {
    let params = cfg.params()?;
    let lc = &cfg.landau;
    let (a, b) = lc.re_range.unwrap_or((-3.0 * params.c0, 3.0 * params.c0));
    let sig: Vec<C64> = linspace(a, b, lc.n).into_iter().map(|x| C64::new(x, lc.im_sigma)).collect();
    let q = &cfg.quadrature;
    let spray = sig
        .par_iter()
        .map(|s| value_or_nan(eval_d(&params, &cfg.profile, *s, q)))
        .collect::<Result<Vec<_>, _>>()?;
    let blocks = lc
        .k_list
        .par_iter()
        .map(|&k| {
            sig.iter()
                .zip(&spray)
                .map(|(s, d)| {
                    let dl = value_or_nan(eval_d_landau(&cfg.profile, k, k * s, q))?;
                    Ok([k, s.re, s.im, d.re, d.im, dl.re, dl.im].map(fmt_f64).to_vec())
                })
                .collect::<Result<Vec<_>, CliError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<Vec<String>> = blocks.into_iter().flatten().collect();
    sink.csv(
        "landau_compare.csv",
        &["k", "re_sigma", "im_sigma", "re_D", "im_D", "re_D_landau", "im_D_landau"],
        &rows,
    )?;
    Ok(json!({"k_values": lc.k_list.len(), "points_per_k": lc.n}))
}

fn growth_rows(params: &SprayParams, traj: &Trajectory) -> Vec<Vec<f64>> {
    (0..traj.times.len())
        .map(|i| {
            let a = traj.tau[i].norm();
            vec![traj.times[i], a, a.ln(), fluid_amplitude(params, traj.tau[i], traj.u[i])]
        })
        .collect()
}

const GROWTH_COLUMNS: [&str; 4] = ["t", "abs_tau", "ln_abs_tau", "fluid_amplitude"];

fn simulate(cfg: &RunConfig, sink: &mut Sink) -> Result<Value, CliError> {
    let params = cfg.params()?;
    let (p, q, sim) = (&cfg.profile, &cfg.quadrature, &cfg.sim);
    let k = cfg.mode.k;
    let grid = VelocityGrid::from_config(p, sim);
    let sigma = match cfg.mode.initial {
        InitialState::Acoustic => None,
        InitialState::MostUnstable => Some(most_unstable_root(&params, p, q)?),
        InitialState::Root { re, im } => {
            let f = |s: C64| eval_d(&params, p, s, q);
            let opts = RootOptions {
                tol: cfg.root_tol,
                ..Default::default()
            };
            Some(newton(&f, C64::new(re, im), &opts, 0.05 * params.c0)?.z)
        }
    };
    let state = match sigma {
        None => acoustic_state(&params, k, &grid),
        Some(s) => {
            if s.im < 0.0 && params.kappa != 0.0 {
                sink.warn("below-axis root: seeded with the fluid part of the mode only, the kinetic part starts at zero");
            }
            init_eigenmode(&params, p, s, k, &grid, q)?
        }
    };
    let traj = integrate(&params, p, &state, sim)?;
    if traj.overflow {
        sink.warn("amplitude overflow: the series stops early");
    }
    let rows: Vec<Vec<String>> = (0..traj.times.len())
        .map(|i| {
            let (t, u) = (traj.tau[i], traj.u[i]);
            [traj.times[i], t.re, t.im, t.norm(), u.norm(), traj.kinetic_l2[i]].map(fmt_f64).to_vec()
        })
        .collect();
    sink.csv("simulate.csv", &["t", "re_tau", "im_tau", "abs_tau", "abs_u", "kinetic_l2"], &rows)?;
    sink.plot(
        &format!("growth_k{}.dat", fmt_f64(k)),
        PlotKind::GrowthCurves,
        &[format!("k = {}", fmt_f64(k))],
        &GROWTH_COLUMNS,
        &growth_rows(&params, &traj),
        None,
    )?;
    let fit = growth_rate(&traj, fit_window(sim))?;
    Ok(json!({
        "k": k,
        "sigma": sigma,
        "predicted_rate": sigma.map(|s| k * s.im),
        "fitted_rate": fit.rate,
        "fit_residual": fit.residual,
        "dt": traj.dt,
        "overflow": traj.overflow,
    }))
}

fn illposed(cfg: &RunConfig, sink: &mut Sink) -> Result<Value, CliError> {
    let params = cfg.params()?;
    let il = &cfg.illposed;
    let r = sobolev_scaling_experiment(&params, &cfg.profile, il.s, il.n_exponent, &il.k_list, &cfg.sim, &cfg.quadrature)?;
    let rows: Vec<Vec<String>> = r
        .rows
        .iter()
        .map(|w| [w.k, w.t_k, w.init_hs_norm, w.final_l2_norm, w.fitted_rate].map(fmt_f64).to_vec())
        .collect();
    sink.csv("illposed.csv", &["k", "t_k", "init_hs_norm", "final_l2_norm", "fitted_rate"], &rows)?;
    for (row, traj) in r.rows.iter().zip(&r.trajectories) {
        sink.plot(
            &format!("growth_k{}.dat", fmt_f64(row.k)),
            PlotKind::GrowthCurves,
            &[format!("k = {}, initial fluid amplitude k^-{}", fmt_f64(row.k), fmt_f64(il.n_exponent))],
            &GROWTH_COLUMNS,
            &growth_rows(&params, traj),
            None,
        )?;
    }
    if !r.final_norm_nondecreasing {
        sink.warn("final amplitudes are not non-decreasing in k");
    }
    let ratios: Vec<f64> = r.rows.windows(2).map(|w| w[1].fitted_rate / w[0].fitted_rate).collect();
    Ok(json!({
        "sigma": r.sigma,
        "theta0": r.theta0,
        "final_norm_nondecreasing": r.final_norm_nondecreasing,
        "rate_ratios": ratios,
    }))
}

fn stability(cfg: &RunConfig, sink: &mut Sink) -> Result<Value, CliError> {
    let system = cfg.system.as_ref().expect("validated").build(&cfg.profile)?;
    let modes = prop1_check(&system)?;
    let tracked = if system.kappa != 0.0 {
        track_all_secular_roots(&system, cfg.track_steps, &cfg.quadrature)?
            .into_iter()
            .map(|z| Some(z.z))
            .collect()
    } else {
        vec![None; modes.len()]
    };
    let fails = fails_necessary_condition(&modes);
    let reports: Vec<ModeReport> = modes
        .into_iter()
        .zip(tracked)
        .map(|(mode, tracked_sigma)| ModeReport { mode, tracked_sigma })
        .collect();
    sink.json("stability.json", &reports)?;
    if !fails {
        sink.warn("the criterion is necessary only: passing it does not establish stability");
    }
    Ok(json!({
        "modes": reports.len(),
        "necessary_condition": if fails { "fails" } else { "passes" },
    }))
}
