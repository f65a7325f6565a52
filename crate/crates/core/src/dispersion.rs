//! Dispersion function of the linearized thick spray.
//!
//! With `K = kappa rho0 c0^2 / alpha0` and `w = sigma - u0`,
//!
//! ```text
//! D(sigma) = 1 - c0^2/w^2 - (K/w) C[v f0'(v + u0)](w)
//! ```
//!
//! where `C[g](w)` is the Cauchy integral `int g(v)/(v - w) dv` continued from
//! the upper half plane. The continuation term carries the same `1/alpha0` as
//! the integral, so `D` is analytic across the real axis.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{compatibility_alpha, VelocityProfile};
use crate::quadrature::{
    classify_branch, plain_integral, pv_integral, pv_integral_extended, singular_integral, Branch,
    Integrand, ProfileIntegrand, QuadratureConfig, Weight,
};
use crate::roots::{self, RootOptions, SearchRegion};

/// Background state of the linearization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SprayParams {
    pub c0: f64,
    pub rho0: f64,
    pub kappa: f64,
    pub alpha0: f64,
    #[serde(default)]
    pub u0: f64,
}

impl SprayParams {
    /// Parameters with `alpha0` from the compatibility condition.
    pub fn new(c0: f64, rho0: f64, kappa: f64, profile: &VelocityProfile) -> Result<Self> {
        let p = SprayParams {
            c0,
            rho0,
            kappa,
            alpha0: compatibility_alpha(profile, kappa)?,
            u0: 0.0,
        };
        p.validate(profile)?;
        Ok(p)
    }

    pub fn with_u0(mut self, u0: f64) -> Self {
        self.u0 = u0;
        self
    }

    pub fn validate(&self, profile: &VelocityProfile) -> Result<()> {
        if !(self.c0.is_finite() && self.c0 > 0.0) {
            return Err(Error::InvalidParams(format!("c0 must be > 0, got {}", self.c0)));
        }
        if !(self.rho0.is_finite() && self.rho0 > 0.0) {
            return Err(Error::InvalidParams(format!("rho0 must be > 0, got {}", self.rho0)));
        }
        if !self.u0.is_finite() {
            return Err(Error::InvalidParams("u0 must be finite".into()));
        }
        let alpha = compatibility_alpha(profile, self.kappa)?;
        if (self.alpha0 - alpha).abs() > 1e-10 {
            return Err(Error::InvalidParams(format!(
                "alpha0 = {} violates alpha0 = 1 - kappa m0 = {alpha}",
                self.alpha0
            )));
        }
        Ok(())
    }

    /// `K = kappa rho0 c0^2 / alpha0`.
    pub fn coupling(&self) -> f64 {
        self.kappa * self.rho0 * self.c0 * self.c0 / self.alpha0
    }
}

fn shifted<'a>(params: &SprayParams, profile: &'a VelocityProfile, weight: Weight<'a>) -> ProfileIntegrand<'a> {
    ProfileIntegrand::new(profile, weight).with_shift(params.u0)
}

fn relative(params: &SprayParams, sigma: C64) -> Result<C64> {
    let w = sigma - params.u0;
    if w.norm() < 1e-14 * params.c0 {
        return Err(Error::ZeroSigma);
    }
    Ok(w)
}

/// Branch-correct dispersion function.
pub fn eval_d(params: &SprayParams, profile: &VelocityProfile, sigma: C64, config: &QuadratureConfig) -> Result<C64> {
    let w = relative(params, sigma)?;
    let g = shifted(params, profile, Weight::Velocity);
    let c = singular_integral(&g, w, classify_branch(w, config), config)?;
    Ok(1.0 - params.c0 * params.c0 / (w * w) - params.coupling() * c / w)
}

/// Real and imaginary parts `(D_r, D_i)` on the real axis.
pub fn eval_d_parts(params: &SprayParams, profile: &VelocityProfile, sigma: f64, config: &QuadratureConfig) -> Result<(f64, f64)> {
    let w = relative(params, C64::new(sigma, 0.0))?.re;
    let g = shifted(params, profile, Weight::Velocity);
    let pv = pv_integral(&g, w, config)?.re;
    let k = params.coupling();
    let dr = 1.0 - params.c0 * params.c0 / (w * w) - k * pv / w;
    let di = -PI * k * profile.eval_df_real(sigma);
    Ok((dr, di))
}

/// Analytic extension of `D_r` off the real axis, for complex-step use.
fn eval_dr_extended(params: &SprayParams, profile: &VelocityProfile, sigma: C64, config: &QuadratureConfig) -> Result<C64> {
    let w = relative(params, sigma)?;
    let g = shifted(params, profile, Weight::Velocity);
    let pv = pv_integral_extended(&g, w, config)?;
    Ok(1.0 - params.c0 * params.c0 / (w * w) - params.coupling() * pv / w)
}

/// `dD_r/dsigma` on the real axis by complex step.
pub fn eval_dr_derivative(params: &SprayParams, profile: &VelocityProfile, sigma: f64, config: &QuadratureConfig) -> Result<f64> {
    let h = 1e-20 * sigma.abs().max(params.c0);
    Ok(eval_dr_extended(params, profile, C64::new(sigma, h), config)?.im / h)
}

/// Large-`sigma` form `1 - c0^2/w^2 - K (m0/w^2 + 3 m2/w^4)`.
pub fn eval_d_asymptotic(params: &SprayParams, profile: &VelocityProfile, sigma: C64) -> C64 {
    let w = sigma - params.u0;
    let w2 = w * w;
    let k = params.coupling();
    1.0 - params.c0 * params.c0 / w2 - k * (profile.moment(0) / w2 + 3.0 * profile.moment(2) / (w2 * w2))
}

/// Landau dispersion `1 - (1/k^2) C[f0'](omega/k)`, continued from the side
/// `Im omega > 0`, which is the lower half `omega/k`-plane when `k < 0`.
pub fn eval_d_landau(profile: &VelocityProfile, k: f64, omega: C64, config: &QuadratureConfig) -> Result<C64> {
    if k == 0.0 || !k.is_finite() {
        return Err(Error::ZeroSigma);
    }
    let g = ProfileIntegrand::new(profile, Weight::Unit);
    let z = omega / k;
    let c = if k > 0.0 {
        singular_integral(&g, z, classify_branch(z, config), config)?
    } else {
        // f0' is real on the axis, so the lower continuation is the mirror image
        let zc = z.conj();
        singular_integral(&g, zc, classify_branch(zc, config), config)?.conj()
    };
    Ok(1.0 - c / (k * k))
}

/// Initial data of the linearized problem for [`eval_forcing`].
pub struct InitialData<'a> {
    pub tau: C64,
    pub u: C64,
    pub f: Option<&'a dyn Integrand>,
}

struct TimesVelocity<'a>(&'a dyn Integrand);

impl Integrand for TimesVelocity<'_> {
    fn eval(&self, v: C64) -> Result<C64> {
        Ok(v * self.0.eval(v)?)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.0.breakpoints()
    }
    fn tail_scale(&self) -> Option<f64> {
        self.0.tail_scale()
    }
    fn extent(&self) -> f64 {
        self.0.extent()
    }
    fn resolution(&self) -> f64 {
        self.0.resolution()
    }
}

/// Right-hand side of the Laplace-transformed problem,
/// `(1/rho0)[rho0 tau - k u/omega + (kappa/alpha0) int f v/(v - omega/k) dv]`.
pub fn eval_forcing(params: &SprayParams, init: &InitialData, k: f64, omega: C64, config: &QuadratureConfig) -> Result<C64> {
    if omega.im <= 0.0 {
        return Err(Error::LaplaceDomain { im_omega: omega.im });
    }
    if k == 0.0 {
        return Err(Error::ZeroSigma);
    }
    let mut e = params.rho0 * init.tau - k * init.u / omega;
    if let Some(f) = init.f {
        let integral = plain_integral(&TimesVelocity(f), omega / k, config)?;
        e += params.kappa / params.alpha0 * integral;
    }
    Ok(e / params.rho0)
}

/// A located dispersion root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootReport {
    pub sigma: C64,
    pub residual: f64,
    pub branch: Branch,
    pub winding_evidence: usize,
    pub newton_iters: usize,
}

impl RootReport {
    /// Roots below the axis are decay rates of the continued function, not
    /// eigenvalues.
    pub fn is_decay_rate(&self) -> bool {
        self.branch == Branch::Lower
    }
}

/// Half-size of the excluded square around `sigma = u0`.
fn origin_guard(params: &SprayParams) -> f64 {
    1e-3 * params.c0
}

fn check_region(profile: &VelocityProfile, region: &SearchRegion) -> Result<()> {
    region.validate()?;
    let d = profile.strip_halfwidth();
    if region.im_max > d || region.im_min < -d {
        return Err(Error::InvalidRegion(format!(
            "imaginary range [{}, {}] leaves the strip |Im| <= {d}",
            region.im_min, region.im_max
        )));
    }
    Ok(())
}

fn pieces(params: &SprayParams, region: &SearchRegion) -> Vec<SearchRegion> {
    let shifted = SearchRegion {
        re_min: region.re_min - params.u0,
        re_max: region.re_max - params.u0,
        ..*region
    };
    shifted
        .without_origin(origin_guard(params))
        .into_iter()
        .map(|p| SearchRegion {
            re_min: p.re_min + params.u0,
            re_max: p.re_max + params.u0,
            ..p
        })
        .collect()
}

fn root_options(profile: &VelocityProfile, tol: f64) -> RootOptions {
    let d = profile.strip_halfwidth();
    RootOptions {
        tol,
        im_bounds: (-d, d),
        ..Default::default()
    }
}

/// Number of zeros of `D` in the region, counted with multiplicity.
pub fn count_roots(params: &SprayParams, profile: &VelocityProfile, region: &SearchRegion, config: &QuadratureConfig) -> Result<usize> {
    check_region(profile, region)?;
    let f = |s: C64| eval_d(params, profile, s, config);
    let opts = root_options(profile, 1e-12);
    let mut n = 0;
    for p in pieces(params, region) {
        n += roots::count_zeros(&f, &p, &opts)?.0;
    }
    Ok(n)
}

/// All roots of `D` in the region with `|D| <= tol`, sorted by `(Re, Im)`.
pub fn find_roots(
    params: &SprayParams,
    profile: &VelocityProfile,
    region: &SearchRegion,
    tol: f64,
    config: &QuadratureConfig,
) -> Result<Vec<RootReport>> {
    if !(tol >= 1e-12) {
        return Err(Error::InvalidParams(format!("root tolerance must be >= 1e-12, got {tol}")));
    }
    check_region(profile, region)?;
    let f = |s: C64| eval_d(params, profile, s, config);
    let opts = root_options(profile, tol);
    let mut zeros = Vec::new();
    for p in pieces(params, region) {
        zeros.extend(roots::find_zeros(&f, &p, &opts)?);
    }
    roots::sort_and_dedup(&mut zeros);
    Ok(zeros
        .into_iter()
        .map(|z| RootReport {
            sigma: z.z,
            residual: z.residual,
            branch: classify_branch(z.z, config),
            winding_evidence: z.evidence,
            newton_iters: z.iterations,
        })
        .collect())
}

/// First-order thin-spray prediction for one acoustic branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThinSpray {
    /// Spray sound speed (signed, includes `u0`).
    pub c_star: f64,
    /// Predicted `Im sigma` of the root near `c_star`.
    pub gamma: f64,
}

/// Thin-spray expansion on the branch `sign = +1` (near `u0 + c0`) or `-1`.
///
/// `c* = u0 + s c0 [1 + (K/2) P.V. int f0'(v + u0)/(v - s c0) dv]` and
/// `gamma = -D_i(c*) / D_r'(c*)` with `D_i = -pi K f0'(c*)`.
pub fn thin_spray_branch(params: &SprayParams, profile: &VelocityProfile, sign: f64, config: &QuadratureConfig) -> Result<ThinSpray> {
    let s = sign.signum() * params.c0;
    let g = shifted(params, profile, Weight::Unit);
    let pv = pv_integral(&g, s, config)?.re;
    let k = params.coupling();
    let c_star = params.u0 + s * (1.0 + 0.5 * k * pv);
    if params.kappa == 0.0 {
        return Ok(ThinSpray { c_star, gamma: 0.0 });
    }
    let di = -PI * k * profile.eval_df_real(c_star);
    let dr1 = eval_dr_derivative(params, profile, c_star, config)?;
    if dr1.abs() < 1e-8 {
        return Err(Error::DegenerateDerivative { value: dr1 });
    }
    Ok(ThinSpray {
        c_star,
        gamma: -di / dr1,
    })
}

/// Thin-spray expansion on the `+c0` branch.
pub fn thin_spray_expansion(params: &SprayParams, profile: &VelocityProfile, config: &QuadratureConfig) -> Result<ThinSpray> {
    thin_spray_branch(params, profile, 1.0, config)
}

/// Spectral stability verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    Unstable,
    Neutral,
}

/// Default verdict rectangle: `|Re sigma - u0| <= |drift| + 5 (c0 + width)`,
/// `0 < Im sigma <= strip/2`.
pub fn default_verdict_region(params: &SprayParams, profile: &VelocityProfile) -> SearchRegion {
    let span = profile.drift().abs() + 5.0 * (params.c0 + profile.width());
    SearchRegion {
        re_min: params.u0 - span,
        re_max: params.u0 + span,
        im_min: 0.0,
        im_max: 0.5 * profile.strip_halfwidth(),
    }
}

/// Unstable iff `D` has a root in the upper part of the region; stable if
/// none and both thin-spray rates are negative; neutral otherwise.
pub fn spectral_verdict(params: &SprayParams, profile: &VelocityProfile, region: &SearchRegion, config: &QuadratureConfig) -> Result<Verdict> {
    let upper = SearchRegion {
        im_min: region.im_min.max(1e-4 * params.c0),
        ..*region
    };
    if upper.im_min >= upper.im_max {
        return Err(Error::InvalidRegion("region has no upper part".into()));
    }
    if count_roots(params, profile, &upper, config)? > 0 {
        return Ok(Verdict::Unstable);
    }
    let plus = thin_spray_branch(params, profile, 1.0, config)?;
    let minus = thin_spray_branch(params, profile, -1.0, config)?;
    if plus.gamma < 0.0 && minus.gamma < 0.0 {
        Ok(Verdict::Stable)
    } else {
        Ok(Verdict::Neutral)
    }
}
