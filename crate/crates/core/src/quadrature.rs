//! Singular velocity integrals `int g(v) / (v - sigma) dv`.
//!
//! The Cauchy-type integral is holomorphic in `sigma` off the real axis. What
//! the dispersion functions need is its continuation from the upper half
//! plane, which is evaluated branch by branch:
//!
//! * upper: the plain integral,
//! * real axis: principal value plus `i pi g(sigma)`,
//! * lower: the plain integral plus `2 i pi g(sigma)`.
//!
//! All quadratures are composite 16-point Gauss-Legendre on `[-L, L]`.
//! Plain integrals close to the real axis use panels graded geometrically
//! towards `Re sigma` down to the scale `|Im sigma|`. Principal values
//! subtract `g(x0)` inside a window around the pole and add the exact
//! logarithm for the window.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::VelocityProfile;

/// Nodes per Gauss-Legendre panel.
pub const PANEL_NODES: usize = 16;

static GL16: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| gauss_legendre_rule(PANEL_NODES));

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Real integral over `[a, b]` split into `panels` equal Gauss-Legendre panels.
pub fn gauss_legendre_panels<F: Fn(f64) -> f64>(a: f64, b: f64, panels: usize, f: F) -> f64 {
    let (x, w) = &*GL16;
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let half = 0.5 * h;
        let s: f64 = x.iter().zip(w).map(|(xi, wi)| wi * f(mid + half * xi)).sum();
        total += half * s;
    }
    total
}

fn integrate_edges<F>(edges: &[f64], mut f: F) -> Result<C64>
where
    F: FnMut(f64, f64, f64) -> Result<C64>,
{
    let (x, w) = &*GL16;
    let mut total = C64::new(0.0, 0.0);
    for e in edges.windows(2) {
        let (lo, hi) = (e[0], e[1]);
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut s = C64::new(0.0, 0.0);
        for (xi, wi) in x.iter().zip(w) {
            s += f(mid + half * xi, lo, hi)? * *wi;
        }
        total += s * half;
    }
    Ok(total)
}

/// Numerical settings of the singular quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    /// Minimum truncation half-width `L` of the velocity integral.
    #[serde(rename = "L")]
    pub truncation_halfwidth: f64,
    /// Nodes on `[-L, L]` before breakpoints and grading are added.
    pub nodes: usize,
    /// `|Im sigma|` at or below this is the real axis.
    pub axis_tolerance: f64,
    /// Half-width of the singularity-subtraction window.
    #[serde(rename = "window")]
    pub subtraction_window: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            truncation_halfwidth: 10.0,
            nodes: 1024,
            axis_tolerance: 1e-12,
            subtraction_window: 0.5,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.truncation_halfwidth.is_finite() && self.truncation_halfwidth > 0.0) {
            return Err(Error::InvalidQuadrature(format!(
                "L must be > 0, got {}",
                self.truncation_halfwidth
            )));
        }
        if self.nodes < 64 || self.nodes % 2 != 0 {
            return Err(Error::InvalidQuadrature(format!(
                "nodes must be even and >= 64, got {}",
                self.nodes
            )));
        }
        if !(self.axis_tolerance > 0.0 && self.axis_tolerance <= 1e-10) {
            return Err(Error::InvalidQuadrature(format!(
                "axis_tolerance must lie in (0, 1e-10], got {}",
                self.axis_tolerance
            )));
        }
        if !(self.subtraction_window.is_finite() && self.subtraction_window > 0.0) {
            return Err(Error::InvalidQuadrature(format!(
                "window must be > 0, got {}",
                self.subtraction_window
            )));
        }
        Ok(())
    }

    /// Check the truncation against a profile: `L >= 8 (width + |drift|)`.
    pub fn validate_for(&self, profile: &VelocityProfile) -> Result<()> {
        self.validate()?;
        let need = 8.0 * (profile.width() + profile.drift().abs());
        if self.truncation_halfwidth < need {
            return Err(Error::InvalidQuadrature(format!(
                "L = {} is below 8 (width + |drift|) = {need}",
                self.truncation_halfwidth
            )));
        }
        Ok(())
    }

    /// Base panel length.
    fn panel_length(&self) -> f64 {
        let panels = (self.nodes / PANEL_NODES).max(1);
        2.0 * self.truncation_halfwidth / panels as f64
    }
}

/// Which continuation formula applies at `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Upper,
    RealAxis,
    Lower,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Upper => "upper",
            Branch::RealAxis => "real_axis",
            Branch::Lower => "lower",
        }
    }

    /// Multiplier of `i pi g(sigma)` in the continuation, `1 - sign(Im sigma)`.
    pub fn residue_factor(&self) -> f64 {
        match self {
            Branch::Upper => 0.0,
            Branch::RealAxis => 1.0,
            Branch::Lower => 2.0,
        }
    }
}

pub fn classify_branch(sigma: C64, config: &QuadratureConfig) -> Branch {
    if sigma.im > config.axis_tolerance {
        Branch::Upper
    } else if sigma.im >= -config.axis_tolerance {
        Branch::RealAxis
    } else {
        Branch::Lower
    }
}

/// An integrand `g(v)` analytic on a strip around the real axis.
pub trait Integrand: Sync {
    fn eval(&self, v: C64) -> Result<C64>;

    /// Real points where `g` is not analytic; panels break there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Decay length of the tails, used to estimate the truncation error.
    /// `None` means the integrand lives on the truncation interval only.
    fn tail_scale(&self) -> Option<f64> {
        None
    }

    /// Half-width of the velocity range the integrand occupies.
    fn extent(&self) -> f64 {
        0.0
    }

    /// Finest feature size; panels are kept below half of it.
    fn resolution(&self) -> f64 {
        f64::INFINITY
    }
}

/// Velocity weight multiplying `f0'` in a [`ProfileIntegrand`].
#[derive(Debug, Clone, Copy)]
pub enum Weight<'a> {
    /// `f0'(v)`
    Unit,
    /// `v f0'(v)`
    Velocity,
    /// `p(v) f0'(v)` with `p(v) = sum_j coeffs[j] v^j`
    Poly(&'a [f64]),
}

/// `w(v) f0'(v + shift)` for a profile `f0`.
#[derive(Debug, Clone, Copy)]
pub struct ProfileIntegrand<'a> {
    pub profile: &'a VelocityProfile,
    pub weight: Weight<'a>,
    pub shift: f64,
}

impl<'a> ProfileIntegrand<'a> {
    pub fn new(profile: &'a VelocityProfile, weight: Weight<'a>) -> Self {
        ProfileIntegrand {
            profile,
            weight,
            shift: 0.0,
        }
    }

    pub fn with_shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }
}

fn horner(coeffs: &[f64], v: C64) -> C64 {
    coeffs
        .iter()
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, &c| acc * v + c)
}

impl Integrand for ProfileIntegrand<'_> {
    fn eval(&self, v: C64) -> Result<C64> {
        let df = self.profile.eval_df(v + self.shift)?;
        Ok(match self.weight {
            Weight::Unit => df,
            Weight::Velocity => v * df,
            Weight::Poly(c) => horner(c, v) * df,
        })
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.profile
            .breakpoints()
            .into_iter()
            .map(|b| b - self.shift)
            .collect()
    }

    fn tail_scale(&self) -> Option<f64> {
        Some(self.profile.width())
    }

    fn extent(&self) -> f64 {
        self.profile.truncation_extent() + self.shift.abs()
    }

    fn resolution(&self) -> f64 {
        self.profile.finest_scale()
    }
}

/// Closure-backed integrand.
pub struct FnIntegrand<F> {
    f: F,
    tail_scale: Option<f64>,
    extent: f64,
}

impl<F> FnIntegrand<F>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    /// Integrand living on the truncation interval only.
    pub fn new(f: F) -> Self {
        FnIntegrand {
            f,
            tail_scale: None,
            extent: 0.0,
        }
    }

    /// Integrand with tails decaying on the scale `scale` beyond `extent`.
    pub fn decaying(f: F, extent: f64, scale: f64) -> Self {
        FnIntegrand {
            f,
            tail_scale: Some(scale),
            extent,
        }
    }
}

impl<F> Integrand for FnIntegrand<F>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    fn eval(&self, v: C64) -> Result<C64> {
        (self.f)(v)
    }

    fn tail_scale(&self) -> Option<f64> {
        self.tail_scale
    }

    fn extent(&self) -> f64 {
        self.extent
    }
}

fn truncation(g: &dyn Integrand, center: f64, config: &QuadratureConfig) -> f64 {
    config
        .truncation_halfwidth
        .max(g.extent() + center.abs())
}

/// Panel edges on `[-l, l]`: a uniform grid, the integrand breakpoints, any
/// `extra` points, and a geometric refinement towards `focus.0` down to the
/// scale `focus.1`.
fn panel_edges(
    l: f64,
    h: f64,
    breaks: &[f64],
    extra: &[f64],
    focus: Option<(f64, f64)>,
) -> Vec<f64> {
    let n = ((2.0 * l) / h).ceil().max(1.0) as usize;
    let step = 2.0 * l / n as f64;
    let mut pts: Vec<f64> = (0..=n).map(|i| -l + i as f64 * step).collect();
    pts.extend(breaks.iter().chain(extra).copied().filter(|b| b.abs() < l));
    if let Some((x, d)) = focus {
        if x.abs() < l {
            pts.push(x);
            let mut t = d.max(1e-300);
            while t < step {
                pts.push(x - t);
                pts.push(x + t);
                t *= 2.0;
            }
        }
    }
    pts.retain(|p| p.abs() <= l);
    pts.sort_by(f64::total_cmp);
    let tol = 1e-15 * l;
    pts.dedup_by(|b, a| (*b - *a).abs() <= tol);
    pts
}

fn panel_size(g: &dyn Integrand, config: &QuadratureConfig) -> f64 {
    config.panel_length().min(0.5 * g.resolution())
}

/// Plain quadrature of `g(v) / (v - z)` over the truncated real line, for
/// `z` off the real axis.
pub fn plain_integral(g: &dyn Integrand, z: C64, config: &QuadratureConfig) -> Result<C64> {
    let l = truncation(g, z.re, config);
    let edges = panel_edges(
        l,
        panel_size(g, config),
        &g.breakpoints(),
        &[],
        Some((z.re, z.im.abs())),
    );
    integrate_edges(&edges, |v, _, _| Ok(g.eval(C64::new(v, 0.0))? / (v - z)))
}

/// Principal value `P.V. int g(v) / (v - x0) dv` by singularity subtraction.
pub fn pv_integral(g: &dyn Integrand, x0: f64, config: &QuadratureConfig) -> Result<C64> {
    pv_integral_extended(g, C64::new(x0, 0.0), config)
}

/// Analytic extension of the principal-value integral to `z` slightly off
/// the axis: the subtraction formula is analytic in `z` and reduces to the
/// principal value on the real axis. Used for complex-step derivatives.
pub fn pv_integral_extended(g: &dyn Integrand, z: C64, config: &QuadratureConfig) -> Result<C64> {
    let x0 = z.re;
    let l = truncation(g, x0, config);
    let wa = (x0 - config.subtraction_window).max(-l);
    let wb = (x0 + config.subtraction_window).min(l);
    let edges = panel_edges(l, panel_size(g, config), &g.breakpoints(), &[x0, wa, wb], None);
    let gz = g.eval(z)?;
    let body = integrate_edges(&edges, |v, lo, hi| {
        let gv = g.eval(C64::new(v, 0.0))?;
        if lo >= wa && hi <= wb {
            Ok((gv - gz) / (v - z))
        } else {
            Ok(gv / (v - z))
        }
    })?;
    let log_term = if wb > x0 && x0 > wa {
        ((wb - z) / (z - wa)).ln()
    } else {
        C64::new(0.0, 0.0)
    };
    Ok(body + gz * log_term)
}

/// Continuation from the upper half plane of `sigma -> int g(v)/(v - sigma) dv`.
pub fn singular_integral(
    g: &dyn Integrand,
    sigma: C64,
    branch: Branch,
    config: &QuadratureConfig,
) -> Result<C64> {
    let i = C64::new(0.0, 1.0);
    let value = match branch {
        Branch::Upper => plain_integral(g, sigma, config)?,
        Branch::RealAxis => {
            let x = C64::new(sigma.re, 0.0);
            pv_integral(g, sigma.re, config)? + i * PI * g.eval(x)?
        }
        Branch::Lower => plain_integral(g, sigma, config)? + 2.0 * i * PI * g.eval(sigma)?,
    };
    if let Some(scale) = g.tail_scale() {
        let l = truncation(g, sigma.re, config);
        let a = C64::new(-l, 0.0);
        let b = C64::new(l, 0.0);
        let tail = scale * (g.eval(a)?.norm() / (a - sigma).norm() + g.eval(b)?.norm() / (b - sigma).norm());
        if tail > 1e-3 * value.norm() && tail > 1e-15 {
            return Err(Error::QuadratureDivergence {
                tail,
                value: value.norm(),
            });
        }
    }
    Ok(value)
}

/// `F(sigma) = (1/sigma) int v f0'(v) / (v - sigma) dv`, continued from the
/// upper half plane. On the real axis this is the principal value alone.
pub fn f_script(profile: &VelocityProfile, sigma: C64, config: &QuadratureConfig) -> Result<C64> {
    if sigma.norm() < 1e-14 {
        return Err(Error::ZeroSigma);
    }
    let g = ProfileIntegrand::new(profile, Weight::Velocity);
    let branch = classify_branch(sigma, config);
    let value = match branch {
        Branch::RealAxis => pv_integral(&g, sigma.re, config)?,
        _ => singular_integral(&g, sigma, branch, config)?,
    };
    Ok(value / sigma)
}

/// Large-`sigma` expansion of [`f_script`]: `m0/sigma^2`, plus `3 m2/sigma^4`
/// when `order >= 4`.
pub fn f_script_asymptotic(profile: &VelocityProfile, sigma: C64, order: u32) -> C64 {
    let s2 = sigma * sigma;
    let mut value = profile.moment(0) / s2;
    if order >= 4 {
        value += 3.0 * profile.moment(2) / (s2 * s2);
    }
    value
}
