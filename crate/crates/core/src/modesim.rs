//! Single Fourier mode of the linearized thick spray, `e^{ikx}`, integrated
//! in time on a uniform velocity grid.
//!
//! ```text
//! d tau/dt = (ik/(alpha0 rho0)) (alpha0 u + kappa int f v dv)
//! d u/dt   = ik rho0 c0^2 tau
//! d f/dt   = -ikv f - ik c0^2 rho0^2 tau f0'(v)
//! ```
//!
//! A dispersion root `sigma` corresponds to the time dependence
//! `e^{-ik sigma t}`, so its amplitude grows at the rate `k Im sigma`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{default_verdict_region, eval_d, find_roots, SprayParams};
use crate::error::{Error, Result};
use crate::profiles::{ProfileKind, VelocityProfile};
use crate::quadrature::QuadratureConfig;
use crate::roots::SearchRegion;

/// Amplitude at which integration halts.
pub const OVERFLOW: f64 = 1e150;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeState {
    pub k: f64,
    pub tau_hat: C64,
    pub u_hat: C64,
    pub f_hat: Vec<C64>,
    pub time: f64,
}

impl ModeState {
    pub fn zeros(k: f64, n: usize) -> Self {
        ModeState {
            k,
            tau_hat: C64::new(0.0, 0.0),
            u_hat: C64::new(0.0, 0.0),
            f_hat: vec![C64::new(0.0, 0.0); n],
            time: 0.0,
        }
    }

    fn axpy(&self, a: f64, d: &ModeState) -> ModeState {
        ModeState {
            k: self.k,
            tau_hat: self.tau_hat + a * d.tau_hat,
            u_hat: self.u_hat + a * d.u_hat,
            f_hat: self.f_hat.iter().zip(&d.f_hat).map(|(x, y)| x + a * y).collect(),
            time: self.time,
        }
    }

    /// Componentwise sum; used to check linearity.
    pub fn add(&self, other: &ModeState) -> ModeState {
        self.axpy(1.0, other)
    }

    /// Scale every amplitude by `c`.
    pub fn scale(&self, c: C64) -> ModeState {
        ModeState {
            k: self.k,
            tau_hat: c * self.tau_hat,
            u_hat: c * self.u_hat,
            f_hat: self.f_hat.iter().map(|x| c * x).collect(),
            time: self.time,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Velocity intervals (even); the grid has `nv + 1` points.
    pub nv: usize,
    /// Grid bounds; `None` selects [`default_v_bounds`].
    pub v_bounds: Option<(f64, f64)>,
    /// Time step; `None` selects half the stability bound.
    pub dt: Option<f64>,
    pub t_final: f64,
    /// Absolute fit interval; `None` selects `[0.2, 0.8] t_final`.
    pub fit_window: Option<(f64, f64)>,
    /// Recorded samples of the amplitude series.
    pub samples: usize,
    /// Keep a full state at every sample.
    pub keep_states: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            nv: 2048,
            v_bounds: None,
            dt: None,
            t_final: 10.0,
            fit_window: None,
            samples: 400,
            keep_states: false,
        }
    }
}

/// `drift -+ 10 width`, widened to cover every bump `c* -+ 5 eta`.
pub fn default_v_bounds(profile: &VelocityProfile) -> (f64, f64) {
    fn visit(p: &VelocityProfile, lo: &mut f64, hi: &mut f64) {
        match p.kind() {
            ProfileKind::Maxwellian { drift, width, .. } => {
                *lo = lo.min(drift - 10.0 * width);
                *hi = hi.max(drift + 10.0 * width);
            }
            ProfileKind::BumpOnTail { base, eta, c_star, .. } => {
                visit(base, lo, hi);
                *lo = lo.min(c_star - 5.0 * eta);
                *hi = hi.max(c_star + 5.0 * eta);
            }
            ProfileKind::Sum(parts) => parts.iter().for_each(|c| visit(c, lo, hi)),
        }
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    visit(profile, &mut lo, &mut hi);
    (lo, hi)
}

impl SimConfig {
    pub fn bounds(&self, profile: &VelocityProfile) -> (f64, f64) {
        self.v_bounds.unwrap_or_else(|| default_v_bounds(profile))
    }

    pub fn validate(&self) -> Result<()> {
        if self.nv < 256 || self.nv % 2 != 0 {
            return Err(Error::InvalidSim(format!("nv must be even and >= 256, got {}", self.nv)));
        }
        if let Some((a, b)) = self.v_bounds {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::InvalidSim(format!("bad velocity bounds ({a}, {b})")));
            }
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::InvalidSim(format!("t_final must be > 0, got {}", self.t_final)));
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::InvalidSim(format!("dt must be > 0, got {dt}")));
            }
        }
        if self.samples < 2 {
            return Err(Error::InvalidSim("need at least 2 samples".into()));
        }
        Ok(())
    }

    /// Stability bound `0.1 / (|k| max|v| + |k| c0)` of the explicit scheme.
    pub fn dt_limit(&self, profile: &VelocityProfile, params: &SprayParams, k: f64) -> f64 {
        let (a, b) = self.bounds(profile);
        0.1 / (k.abs() * a.abs().max(b.abs()) + k.abs() * params.c0)
    }
}

/// Uniform velocity grid with composite Simpson weights.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGrid {
    pub v: Vec<f64>,
    pub dv: f64,
    pub weights: Vec<f64>,
    pub df0: Vec<f64>,
}

impl VelocityGrid {
    pub fn new(profile: &VelocityProfile, nv: usize, bounds: (f64, f64)) -> Self {
        let (a, b) = bounds;
        let dv = (b - a) / nv as f64;
        let v: Vec<f64> = (0..=nv).map(|i| a + i as f64 * dv).collect();
        let weights = (0..=nv)
            .map(|i| {
                let w = if i == 0 || i == nv {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                w * dv / 3.0
            })
            .collect();
        let df0 = v.iter().map(|&x| profile.eval_df_real(x)).collect();
        VelocityGrid { v, dv, weights, df0 }
    }

    pub fn from_config(profile: &VelocityProfile, config: &SimConfig) -> Self {
        Self::new(profile, config.nv, config.bounds(profile))
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(usize) -> C64) -> C64 {
        self.weights.iter().enumerate().map(|(i, w)| *w * f(i)).sum()
    }
}

/// Time derivative of the state.
pub fn rhs(params: &SprayParams, grid: &VelocityGrid, state: &ModeState) -> ModeState {
    let mut out = ModeState::zeros(state.k, state.f_hat.len());
    rhs_into(params, grid, state, &mut out);
    out.time = state.time;
    out
}

fn rhs_into(params: &SprayParams, grid: &VelocityGrid, state: &ModeState, out: &mut ModeState) {
    let ik = C64::new(0.0, state.k);
    let flux = grid.integrate(|j| state.f_hat[j] * grid.v[j]);
    out.tau_hat = ik / (params.alpha0 * params.rho0) * (params.alpha0 * state.u_hat + params.kappa * flux);
    out.u_hat = ik * params.rho0 * params.c0 * params.c0 * state.tau_hat;
    let forcing = ik * params.c0 * params.c0 * params.rho0 * params.rho0 * state.tau_hat;
    for (((o, f), v), d) in out.f_hat.iter_mut().zip(&state.f_hat).zip(&grid.v).zip(&grid.df0) {
        *o = -ik * v * f - forcing * d;
    }
}

/// `out = s + a d`, reusing the buffer of `out`.
fn axpy_into(s: &ModeState, a: f64, d: &ModeState, out: &mut ModeState) {
    out.k = s.k;
    out.tau_hat = s.tau_hat + a * d.tau_hat;
    out.u_hat = s.u_hat + a * d.u_hat;
    for ((o, x), y) in out.f_hat.iter_mut().zip(&s.f_hat).zip(&d.f_hat) {
        *o = x + a * y;
    }
}

/// Discrete eigenmode for a dispersion root:
/// `tau = 1`, `u = -rho0 c0^2/sigma`, `f = -rho0^2 c0^2 f0'(v)/(v - sigma)`.
///
/// Below the axis the root is a decay rate, not an eigenvalue: the kinetic
/// profile above is not the continued eigenfunction on the real line, and
/// seeding it produces a secular `t e^{k Im sigma t}` response. There the seed
/// keeps only the fluid part and leaves `f = 0`.
pub fn init_eigenmode(
    params: &SprayParams,
    profile: &VelocityProfile,
    sigma: C64,
    k: f64,
    grid: &VelocityGrid,
    quad: &QuadratureConfig,
) -> Result<ModeState> {
    let residual = eval_d(params, profile, sigma, quad)?.norm();
    if residual > 1e-8 {
        return Err(Error::NotARoot { residual });
    }
    // with kappa = 0 the kinetic part is passive and may stay unresolved
    if params.kappa != 0.0 && sigma.im.abs() < 3.0 * grid.dv {
        return Err(Error::RefineGrid {
            im_sigma: sigma.im.abs(),
            min: 3.0 * grid.dv,
        });
    }
    let a = params.rho0 * params.rho0 * params.c0 * params.c0;
    let f_hat = if sigma.im < 0.0 && params.kappa != 0.0 {
        vec![C64::new(0.0, 0.0); grid.len()]
    } else {
        grid.v.iter().zip(&grid.df0).map(|(v, d)| -a * d / (v - sigma)).collect()
    };
    Ok(ModeState {
        k,
        tau_hat: C64::new(1.0, 0.0),
        u_hat: -params.rho0 * params.c0 * params.c0 / sigma,
        f_hat,
        time: 0.0,
    })
}

/// Acoustic wave with no kinetic perturbation: `tau = 1`, `u = rho0 c0`.
pub fn acoustic_state(params: &SprayParams, k: f64, grid: &VelocityGrid) -> ModeState {
    ModeState {
        u_hat: C64::new(params.rho0 * params.c0, 0.0),
        tau_hat: C64::new(1.0, 0.0),
        ..ModeState::zeros(k, grid.len())
    }
}

/// Recorded integration output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub k: f64,
    pub dt: f64,
    pub times: Vec<f64>,
    pub tau: Vec<C64>,
    pub u: Vec<C64>,
    pub kinetic_l2: Vec<f64>,
    pub states: Vec<ModeState>,
    pub final_state: ModeState,
    /// Set when an amplitude passed [`OVERFLOW`]; the series stops there.
    pub overflow: bool,
}

/// `2 pi / (|k| dv)`: the free-streaming recurrence time of the grid.
pub fn recurrence_time(config: &SimConfig, profile: &VelocityProfile, k: f64) -> f64 {
    let (a, b) = config.bounds(profile);
    let dv = (b - a) / config.nv as f64;
    2.0 * std::f64::consts::PI / (k.abs() * dv)
}

/// Classical fourth-order Runge-Kutta with a fixed step.
pub fn integrate(
    params: &SprayParams,
    profile: &VelocityProfile,
    state0: &ModeState,
    config: &SimConfig,
) -> Result<Trajectory> {
    config.validate()?;
    let k = state0.k;
    if k == 0.0 || !k.is_finite() {
        return Err(Error::InvalidSim("k must be non-zero".into()));
    }
    let grid = VelocityGrid::from_config(profile, config);
    if state0.f_hat.len() != grid.len() {
        return Err(Error::InvalidSim(format!(
            "state has {} kinetic nodes, grid has {}",
            state0.f_hat.len(),
            grid.len()
        )));
    }
    let limit = config.dt_limit(profile, params, k);
    let dt_req = config.dt.unwrap_or(0.5 * limit);
    if dt_req > limit {
        return Err(Error::CflViolation { dt: dt_req, limit });
    }
    let t_rec = recurrence_time(config, profile, k);
    if config.t_final >= t_rec {
        return Err(Error::Recurrence {
            t_final: config.t_final,
            recurrence: t_rec,
        });
    }
    let steps = (config.t_final / dt_req).ceil().max(1.0) as usize;
    let dt = config.t_final / steps as f64;
    let every = steps.div_ceil(config.samples - 1).max(1);

    let mut traj = Trajectory {
        k,
        dt,
        times: Vec::new(),
        tau: Vec::new(),
        u: Vec::new(),
        kinetic_l2: Vec::new(),
        states: Vec::new(),
        final_state: state0.clone(),
        overflow: false,
    };
    let record = |traj: &mut Trajectory, s: &ModeState| {
        traj.times.push(s.time);
        traj.tau.push(s.tau_hat);
        traj.u.push(s.u_hat);
        let l2 = grid.integrate(|j| C64::new(s.f_hat[j].norm_sqr(), 0.0)).re.sqrt();
        traj.kinetic_l2.push(l2);
        if config.keep_states {
            traj.states.push(s.clone());
        }
    };
    let mut s = state0.clone();
    s.time = 0.0;
    record(&mut traj, &s);
    let m = s.f_hat.len();
    let [mut k1, mut k2, mut k3, mut k4, mut tmp] = std::array::from_fn(|_| ModeState::zeros(k, m));
    for n in 1..=steps {
        rhs_into(params, &grid, &s, &mut k1);
        axpy_into(&s, 0.5 * dt, &k1, &mut tmp);
        rhs_into(params, &grid, &tmp, &mut k2);
        axpy_into(&s, 0.5 * dt, &k2, &mut tmp);
        rhs_into(params, &grid, &tmp, &mut k3);
        axpy_into(&s, dt, &k3, &mut tmp);
        rhs_into(params, &grid, &tmp, &mut k4);
        s.tau_hat += dt / 6.0 * (k1.tau_hat + 2.0 * k2.tau_hat + 2.0 * k3.tau_hat + k4.tau_hat);
        s.u_hat += dt / 6.0 * (k1.u_hat + 2.0 * k2.u_hat + 2.0 * k3.u_hat + k4.u_hat);
        for (j, f) in s.f_hat.iter_mut().enumerate() {
            *f += dt / 6.0 * (k1.f_hat[j] + 2.0 * k2.f_hat[j] + 2.0 * k3.f_hat[j] + k4.f_hat[j]);
        }
        s.time = n as f64 * dt;
        let big = s.tau_hat.norm().max(s.u_hat.norm()).max(s.f_hat.iter().fold(0.0, |m, x| m.max(x.norm())));
        if !(big <= OVERFLOW) {
            traj.overflow = true;
            record(&mut traj, &s);
            break;
        }
        if n % every == 0 || n == steps {
            record(&mut traj, &s);
        }
    }
    traj.final_state = s;
    Ok(traj)
}

/// Least-squares slope of `ln|tau|` over a time window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub rate: f64,
    /// Root-mean-square deviation of `ln|tau|` from the line.
    pub residual: f64,
    pub samples: usize,
}

pub fn growth_rate(traj: &Trajectory, window: (f64, f64)) -> Result<GrowthFit> {
    let pts: Vec<(f64, f64)> = traj
        .times
        .iter()
        .zip(&traj.tau)
        .filter(|(t, _)| **t >= window.0 && **t <= window.1)
        .map(|(t, x)| (*t, x.norm()))
        .collect();
    if pts.len() < 50 {
        return Err(Error::InvalidSim(format!(
            "fit window [{}, {}] holds {} samples, need 50",
            window.0,
            window.1,
            pts.len()
        )));
    }
    if pts.iter().any(|(_, a)| !(*a > 1e-300)) {
        return Err(Error::InvalidSim("amplitude vanishes inside the fit window".into()));
    }
    let n = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 - tm).powi(2)).sum();
    let sty: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1.ln() - ym)).sum();
    let rate = sty / stt;
    let residual = (pts
        .iter()
        .map(|p| (p.1.ln() - ym - rate * (p.0 - tm)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let scale = (rate * (window.1 - window.0)).abs();
    if residual > 0.1 * scale + 1e-6 {
        return Err(Error::DegenerateFit { residual, scale });
    }
    Ok(GrowthFit {
        rate,
        residual,
        samples: pts.len(),
    })
}

/// Fit window of a run: the configured one or `[0.2, 0.8] t_final`.
pub fn fit_window(config: &SimConfig) -> (f64, f64) {
    config.fit_window.unwrap_or((0.2 * config.t_final, 0.8 * config.t_final))
}

/// One row of the ill-posedness table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub k: f64,
    pub t_k: f64,
    pub init_hs_norm: f64,
    pub final_l2_norm: f64,
    pub fitted_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub sigma: C64,
    pub s: f64,
    pub n_exponent: f64,
    pub rows: Vec<ScalingRow>,
    /// `min_k` of the final `L^2` proxy.
    pub theta0: f64,
    pub final_norm_nondecreasing: bool,
    pub trajectories: Vec<Trajectory>,
}

/// `sqrt(|rho|^2 + |u|^2)` with `rho = -rho0^2 tau`.
pub fn fluid_amplitude(params: &SprayParams, tau: C64, u: C64) -> f64 {
    (params.rho0.powi(4) * tau.norm_sqr() + u.norm_sqr()).sqrt()
}

/// Unstable root of largest imaginary part in the default verdict region.
pub fn most_unstable_root(params: &SprayParams, profile: &VelocityProfile, quad: &QuadratureConfig) -> Result<C64> {
    let full = default_verdict_region(params, profile);
    let region = SearchRegion {
        im_min: 1e-4 * params.c0,
        ..full
    };
    let roots = find_roots(params, profile, &region, 1e-12, quad)?;
    roots
        .into_iter()
        .map(|r| r.sigma)
        .filter(|s| s.im > 0.0)
        .max_by(|a, b| a.im.total_cmp(&b.im))
        .ok_or(Error::NoUnstableRoot)
}

/// Seed each `k` with the unstable eigenmode scaled to fluid amplitude
/// `k^-N`, run to `t_k = (N+1) ln k / (k Im sigma)`, and tabulate the
/// `H^s` proxy `(1+k^2)^{s/2} k^-N` against the final `L^2` proxy.
pub fn sobolev_scaling_experiment(
    params: &SprayParams,
    profile: &VelocityProfile,
    s: f64,
    n_exponent: f64,
    k_list: &[f64],
    base: &SimConfig,
    quad: &QuadratureConfig,
) -> Result<ScalingResult> {
    if !(s >= 0.0 && n_exponent > s) {
        return Err(Error::InvalidParams(format!("need 0 <= s < N, got s = {s}, N = {n_exponent}")));
    }
    if k_list.len() < 3 || k_list.windows(2).any(|w| w[1] <= w[0]) || k_list[0] <= 1.0 {
        return Err(Error::InvalidParams("k_list must be increasing, > 1, with at least 3 entries".into()));
    }
    let sigma = most_unstable_root(params, profile, quad)?;
    let runs: Vec<Result<(ScalingRow, Trajectory)>> = k_list
        .par_iter()
        .map(|&k| {
            let t_k = (n_exponent + 1.0) * k.ln() / (k * sigma.im);
            let cfg = SimConfig {
                t_final: t_k,
                fit_window: None,
                ..*base
            };
            let grid = VelocityGrid::from_config(profile, &cfg);
            let mode = init_eigenmode(params, profile, sigma, k, &grid, quad)?;
            let amp0 = fluid_amplitude(params, mode.tau_hat, mode.u_hat);
            let state = mode.scale(C64::new(k.powf(-n_exponent) / amp0, 0.0));
            let traj = integrate(params, profile, &state, &cfg)?;
            let fit = growth_rate(&traj, fit_window(&cfg))?;
            let fin = &traj.final_state;
            Ok((
                ScalingRow {
                    k,
                    t_k,
                    init_hs_norm: (1.0 + k * k).powf(0.5 * s) * k.powf(-n_exponent),
                    final_l2_norm: fluid_amplitude(params, fin.tau_hat, fin.u_hat),
                    fitted_rate: fit.rate,
                },
                traj,
            ))
        })
        .collect();
    let mut rows = Vec::new();
    let mut trajectories = Vec::new();
    for r in runs {
        let (row, traj) = r?;
        rows.push(row);
        trajectories.push(traj);
    }
    let theta0 = rows.iter().map(|r| r.final_l2_norm).fold(f64::INFINITY, f64::min);
    let final_norm_nondecreasing = rows.windows(2).all(|w| w[1].final_l2_norm >= w[0].final_l2_norm);
    Ok(ScalingResult {
        sigma,
        s,
        n_exponent,
        rows,
        theta0,
        final_norm_nondecreasing,
        trajectories,
    })
}
