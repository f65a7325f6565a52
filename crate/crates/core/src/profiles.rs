//! Equilibrium velocity distributions.
//!
//! A [`VelocityProfile`] is an equilibrium distribution `f0(v)` that extends
//! analytically to a strip `|Im v| <= strip_halfwidth` of the complex velocity
//! plane and is dominated there by `C0 exp(-C1 (Re v)^2)`. Three shapes are
//! supported:
//!
//! | kind | definition |
//! |---|---|
//! | `maxwellian` | `mass / (sqrt(2 pi) width) * exp(-(v - drift)^2 / (2 width^2))` |
//! | `bump_on_tail` | `(1 - eps) base(v) + eps / eta * g((v - c_star) / eta) * m0(base)` |
//! | `sum` | pointwise sum of components |
//!
//! The bump shape `g(x) = C (1 + x)^2 exp(-1 / (1 - x^2))` is smooth with
//! support `[-1, 1]`, unit integral and `g'(0) = 2 C / e > 0`. It is not
//! analytic at `x = +-1`; off the real axis it is evaluated with the closed
//! form inside the support, as zero outside, and rejected within
//! [`BUMP_EDGE_GUARD`] of the edges.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre_panels;

/// Half-width (in bump units) of the band around `x = +-1` where off-axis
/// evaluation of the bump is refused.
pub const BUMP_EDGE_GUARD: f64 = 0.05;

/// Imaginary parts below this are treated as on the real axis when
/// deciding which piece of the bump to evaluate.
const REAL_AXIS_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    Maxwellian {
        mass: f64,
        drift: f64,
        width: f64,
    },
    BumpOnTail {
        base: Box<VelocityProfile>,
        eps: f64,
        eta: f64,
        c_star: f64,
    },
    Sum(Vec<VelocityProfile>),
}

/// Analytic equilibrium distribution on a complex strip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileSpec", into = "ProfileSpec")]
pub struct VelocityProfile {
    kind: ProfileKind,
    strip_halfwidth: f64,
    bound_consts: (f64, f64),
}

/// Serialized description of a profile, as found under the `"profile"` key
/// of a run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSpec {
    Maxwellian {
        #[serde(default = "one")]
        mass: f64,
        #[serde(default)]
        drift: f64,
        #[serde(default = "one")]
        width: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        strip_halfwidth: Option<f64>,
    },
    BumpOnTail {
        eps: f64,
        eta: f64,
        c_star: f64,
        base: Box<ProfileSpec>,
    },
    Sum {
        components: Vec<ProfileSpec>,
    },
}

fn one() -> f64 {
    1.0
}

impl TryFrom<ProfileSpec> for VelocityProfile {
    type Error = Error;

    fn try_from(spec: ProfileSpec) -> Result<Self> {
        match spec {
            ProfileSpec::Maxwellian {
                mass,
                drift,
                width,
                strip_halfwidth,
            } => {
                let p = VelocityProfile::maxwellian(mass, drift, width)?;
                match strip_halfwidth {
                    Some(delta) => p.with_strip_halfwidth(delta),
                    None => Ok(p),
                }
            }
            ProfileSpec::BumpOnTail {
                eps,
                eta,
                c_star,
                base,
            } => {
                let base = VelocityProfile::try_from(*base)?;
                make_bump_on_tail(&base, eps, eta, c_star)
            }
            ProfileSpec::Sum { components } => {
                let comps = components
                    .into_iter()
                    .map(VelocityProfile::try_from)
                    .collect::<Result<Vec<_>>>()?;
                VelocityProfile::sum(comps)
            }
        }
    }
}

impl From<VelocityProfile> for ProfileSpec {
    fn from(p: VelocityProfile) -> Self {
        let strip = p.strip_halfwidth;
        match p.kind {
            ProfileKind::Maxwellian { mass, drift, width } => ProfileSpec::Maxwellian {
                mass,
                drift,
                width,
                strip_halfwidth: if (strip - 0.5 * width).abs() > 1e-15 * width {
                    Some(strip)
                } else {
                    None
                },
            },
            ProfileKind::BumpOnTail {
                base,
                eps,
                eta,
                c_star,
            } => ProfileSpec::BumpOnTail {
                eps,
                eta,
                c_star,
                base: Box::new(ProfileSpec::from(*base)),
            },
            ProfileKind::Sum(components) => ProfileSpec::Sum {
                components: components.into_iter().map(ProfileSpec::from).collect(),
            },
        }
    }
}

fn gaussian(mass: f64, drift: f64, width: f64, v: C64) -> C64 {
    let z = (v - drift) / width;
    (-0.5 * z * z).exp() * (mass / ((2.0 * PI).sqrt() * width))
}

/// `int_{-1}^{1} (1 + x)^2 exp(-1 / (1 - x^2)) dx`, so that `g` has unit mass.
static BUMP_NORM: Lazy<f64> = Lazy::new(|| {
    let raw = gauss_legendre_panels(-1.0, 1.0, 400, |x| {
        let e = (-1.0 / (1.0 - x * x)).exp();
        (1.0 + x) * (1.0 + x) * e
    });
    1.0 / raw
});

/// Normalization constant `C` of the bump shape.
pub fn bump_norm() -> f64 {
    *BUMP_NORM
}

enum BumpPiece {
    Inside,
    Outside,
}

fn bump_piece(x: C64) -> Result<BumpPiece> {
    let edge_dist = 1.0 - x.re.abs();
    if x.im.abs() <= REAL_AXIS_EPS {
        return Ok(if edge_dist > 0.0 {
            BumpPiece::Inside
        } else {
            BumpPiece::Outside
        });
    }
    if edge_dist >= BUMP_EDGE_GUARD {
        Ok(BumpPiece::Inside)
    } else if edge_dist <= -BUMP_EDGE_GUARD {
        Ok(BumpPiece::Outside)
    } else {
        Err(Error::BumpEdge { re: x.re, im: x.im })
    }
}

/// Bump shape `g(x)`.
pub fn bump_shape(x: C64) -> Result<C64> {
    Ok(match bump_piece(x)? {
        BumpPiece::Outside => C64::new(0.0, 0.0),
        BumpPiece::Inside => {
            let s = 1.0 - x * x;
            let e = (-s.inv()).exp();
            (1.0 + x) * (1.0 + x) * e * bump_norm()
        }
    })
}

/// Derivative `g'(x)` of the bump shape.
pub fn bump_shape_deriv(x: C64) -> Result<C64> {
    Ok(match bump_piece(x)? {
        BumpPiece::Outside => C64::new(0.0, 0.0),
        BumpPiece::Inside => {
            let s = 1.0 - x * x;
            let e = (-s.inv()).exp();
            let xp1 = 1.0 + x;
            // d/dx exp(-1/(1-x^2)) = -2x/(1-x^2)^2 exp(...)
            (2.0 * xp1 - xp1 * xp1 * 2.0 * x / (s * s)) * e * bump_norm()
        }
    })
}

impl VelocityProfile {
    /// Maxwellian with the default strip half-width `width / 2`.
    pub fn maxwellian(mass: f64, drift: f64, width: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidProfile(format!("mass must be > 0, got {mass}")));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidProfile(format!("width must be > 0, got {width}")));
        }
        if !drift.is_finite() {
            return Err(Error::InvalidProfile(format!("drift must be finite, got {drift}")));
        }
        let mut p = VelocityProfile {
            kind: ProfileKind::Maxwellian { mass, drift, width },
            strip_halfwidth: 0.5 * width,
            bound_consts: (0.0, 0.0),
        };
        p.bound_consts = p.compute_bound_consts();
        Ok(p)
    }

    /// Unit-mass, zero-drift, unit-width Maxwellian.
    pub fn standard_maxwellian() -> Self {
        Self::maxwellian(1.0, 0.0, 1.0).expect("valid parameters")
    }

    /// Sum of profiles; the strip is the narrowest component strip.
    pub fn sum(components: Vec<VelocityProfile>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidProfile("sum needs at least one component".into()));
        }
        let strip = components
            .iter()
            .map(|c| c.strip_halfwidth)
            .fold(f64::INFINITY, f64::min);
        let mut p = VelocityProfile {
            kind: ProfileKind::Sum(components),
            strip_halfwidth: strip,
            bound_consts: (0.0, 0.0),
        };
        p.bound_consts = p.compute_bound_consts();
        Ok(p)
    }

    /// Replace the strip half-width. Only narrowing is allowed for bump
    /// profiles, whose off-axis extension is limited.
    pub fn with_strip_halfwidth(mut self, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidProfile(format!(
                "strip_halfwidth must be > 0, got {delta}"
            )));
        }
        self.strip_halfwidth = delta;
        self.bound_consts = self.compute_bound_consts();
        Ok(self)
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ProfileKind::Maxwellian { .. } => "maxwellian",
            ProfileKind::BumpOnTail { .. } => "bump_on_tail",
            ProfileKind::Sum(_) => "sum",
        }
    }

    pub fn strip_halfwidth(&self) -> f64 {
        self.strip_halfwidth
    }

    /// Envelope constants `(C0, C1)` with `|f0(v)| <= C0 exp(-C1 (Re v)^2)`
    /// on the strip.
    pub fn bound_consts(&self) -> (f64, f64) {
        self.bound_consts
    }

    /// Nominal mass `m0` from the parameters (no quadrature).
    pub fn mass(&self) -> f64 {
        match &self.kind {
            ProfileKind::Maxwellian { mass, .. } => *mass,
            ProfileKind::BumpOnTail { base, .. } => base.mass(),
            ProfileKind::Sum(cs) => cs.iter().map(|c| c.mass()).sum(),
        }
    }

    /// Mass-weighted drift.
    pub fn drift(&self) -> f64 {
        match &self.kind {
            ProfileKind::Maxwellian { drift, .. } => *drift,
            ProfileKind::BumpOnTail { base, .. } => base.drift(),
            ProfileKind::Sum(cs) => {
                cs.iter().map(|c| c.mass() * c.drift()).sum::<f64>() / self.mass()
            }
        }
    }

    /// Largest thermal spread among the components.
    pub fn width(&self) -> f64 {
        match &self.kind {
            ProfileKind::Maxwellian { width, .. } => *width,
            ProfileKind::BumpOnTail { base, .. } => base.width(),
            ProfileKind::Sum(cs) => cs.iter().map(|c| c.width()).fold(0.0, f64::max),
        }
    }

    /// Half-width of a velocity interval outside which the profile is
    /// negligible at quadrature accuracy: `8 width + |drift|` per
    /// Maxwellian component, and the outer edge of any bump.
    pub fn truncation_extent(&self) -> f64 {
        match &self.kind {
            ProfileKind::Maxwellian { drift, width, .. } => 8.0 * width + drift.abs(),
            ProfileKind::BumpOnTail {
                base, eta, c_star, ..
            } => base.truncation_extent().max(c_star.abs() + eta),
            ProfileKind::Sum(cs) => cs.iter().map(|c| c.truncation_extent()).fold(0.0, f64::max),
        }
    }

    /// Points on the real axis where the profile is not analytic.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breakpoints(&mut out);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn collect_breakpoints(&self, out: &mut Vec<f64>) {
        match &self.kind {
            ProfileKind::Maxwellian { .. } => {}
            ProfileKind::BumpOnTail {
                base, eta, c_star, ..
            } => {
                base.collect_breakpoints(out);
                out.push(c_star - eta);
                out.push(c_star + eta);
            }
            ProfileKind::Sum(cs) => cs.iter().for_each(|c| c.collect_breakpoints(out)),
        }
    }

    /// Smallest bump half-width, used to size quadrature panels.
    pub fn finest_scale(&self) -> f64 {
        match &self.kind {
            ProfileKind::Maxwellian { width, .. } => *width,
            ProfileKind::BumpOnTail { base, eta, .. } => base.finest_scale().min(*eta),
            ProfileKind::Sum(cs) => cs.iter().map(|c| c.finest_scale()).fold(f64::INFINITY, f64::min),
        }
    }

    fn check_strip(&self, v: C64) -> Result<()> {
        if v.im.abs() > self.strip_halfwidth * (1.0 + 1e-12) {
            return Err(Error::StripViolation {
                im: v.im.abs(),
                halfwidth: self.strip_halfwidth,
            });
        }
        Ok(())
    }

    /// Analytic extension of `f0` at complex velocity `v`.
    pub fn eval_f(&self, v: C64) -> Result<C64> {
        self.check_strip(v)?;
        self.f_unchecked(v)
    }

    /// Analytic derivative `f0'(v)`.
    pub fn eval_df(&self, v: C64) -> Result<C64> {
        self.check_strip(v)?;
        self.df_unchecked(v)
    }

    pub fn eval_f_real(&self, v: f64) -> f64 {
        self.f_unchecked(C64::new(v, 0.0))
            .expect("real-axis evaluation is always defined")
            .re
    }

    pub fn eval_df_real(&self, v: f64) -> f64 {
        self.df_unchecked(C64::new(v, 0.0))
            .expect("real-axis evaluation is always defined")
            .re
    }

    fn f_unchecked(&self, v: C64) -> Result<C64> {
        match &self.kind {
            ProfileKind::Maxwellian { mass, drift, width } => Ok(gaussian(*mass, *drift, *width, v)),
            ProfileKind::BumpOnTail {
                base,
                eps,
                eta,
                c_star,
            } => {
                let x = (v - c_star) / eta;
                let b = base.f_unchecked(v)?;
                let g = bump_shape(x)?;
                Ok(b * (1.0 - eps) + g * (eps / eta * base.mass()))
            }
            ProfileKind::Sum(cs) => cs
                .iter()
                .try_fold(C64::new(0.0, 0.0), |acc, c| Ok(acc + c.f_unchecked(v)?)),
        }
    }

    fn df_unchecked(&self, v: C64) -> Result<C64> {
        match &self.kind {
            ProfileKind::Maxwellian { mass, drift, width } => {
                Ok(-(v - drift) / (width * width) * gaussian(*mass, *drift, *width, v))
            }
            ProfileKind::BumpOnTail {
                base,
                eps,
                eta,
                c_star,
            } => {
                let x = (v - c_star) / eta;
                let b = base.df_unchecked(v)?;
                let g = bump_shape_deriv(x)?;
                Ok(b * (1.0 - eps) + g * (eps / (eta * eta) * base.mass()))
            }
            ProfileKind::Sum(cs) => cs
                .iter()
                .try_fold(C64::new(0.0, 0.0), |acc, c| Ok(acc + c.df_unchecked(v)?)),
        }
    }

    /// Velocity moment `int f0(v) v^order dv` by panel quadrature.
    pub fn moment(&self, order: u32) -> f64 {
        let extent = self.truncation_extent() + 4.0 * self.width();
        let mut edges = vec![-extent, extent];
        edges.extend(self.breakpoints().into_iter().filter(|b| b.abs() < extent));
        edges.sort_by(f64::total_cmp);
        let h = 0.25 * self.finest_scale();
        edges
            .windows(2)
            .map(|w| {
                let n = ((w[1] - w[0]) / h).ceil().max(1.0) as usize;
                gauss_legendre_panels(w[0], w[1], n, |v| self.eval_f_real(v) * v.powi(order as i32))
            })
            .sum()
    }

    fn compute_bound_consts(&self) -> (f64, f64) {
        match &self.kind {
            ProfileKind::Maxwellian { mass, drift, width } => {
                // (x - d)^2 >= x^2 / 2 - d^2, and |exp(-z^2/2)| gains at most
                // exp(delta^2 / (2 w^2)) off the axis.
                let peak = mass / ((2.0 * PI).sqrt() * width);
                let delta = self.strip_halfwidth;
                let c0 = peak * ((delta * delta + drift * drift) / (2.0 * width * width)).exp();
                (c0, 1.0 / (4.0 * width * width))
            }
            ProfileKind::BumpOnTail {
                base,
                eps,
                eta,
                c_star,
            } => {
                let (c0b, c1) = base.bound_consts();
                let gmax = bump_sup_on_strip(self.strip_halfwidth / eta);
                let reach = c_star.abs() + eta;
                let c0 = (1.0 - eps) * c0b + eps / eta * base.mass() * gmax * (c1 * reach * reach).exp();
                (c0, c1)
            }
            ProfileKind::Sum(cs) => {
                let c0 = cs.iter().map(|c| c.bound_consts().0).sum();
                let c1 = cs.iter().map(|c| c.bound_consts().1).fold(f64::INFINITY, f64::min);
                (c0, c1)
            }
        }
    }
}

/// Upper estimate of `|g(x)|` over the evaluable part of `|Im x| <= h`.
fn bump_sup_on_strip(h: f64) -> f64 {
    let mut sup: f64 = 0.0;
    let n = 80;
    for i in 0..=n {
        let re = -1.0 + 2.0 * i as f64 / n as f64;
        for j in 0..=20 {
            let im = h * (j as f64 / 20.0);
            for sgn in [-1.0, 1.0] {
                if let Ok(g) = bump_shape(C64::new(re, sgn * im)) {
                    sup = sup.max(g.norm());
                }
            }
        }
    }
    2.0 * sup
}

/// Bump-on-tail perturbation of `base` with a bump of relative mass `eps`,
/// half-width `eta` and center `c_star`.
pub fn make_bump_on_tail(base: &VelocityProfile, eps: f64, eta: f64, c_star: f64) -> Result<VelocityProfile> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidBump(format!("eps must lie in (0, 1), got {eps}")));
    }
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::InvalidBump(format!("eta must be > 0, got {eta}")));
    }
    if !c_star.is_finite() {
        return Err(Error::InvalidBump(format!("c_star must be finite, got {c_star}")));
    }
    let mut p = VelocityProfile {
        kind: ProfileKind::BumpOnTail {
            base: Box::new(base.clone()),
            eps,
            eta,
            c_star,
        },
        strip_halfwidth: base.strip_halfwidth,
        bound_consts: (0.0, 0.0),
    };
    p.bound_consts = p.compute_bound_consts();
    Ok(p)
}

/// Fluid volume fraction `alpha0 = 1 - kappa m0` compatible with `profile`.
pub fn compatibility_alpha(profile: &VelocityProfile, kappa: f64) -> Result<f64> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::InvalidParams(format!("kappa must be >= 0, got {kappa}")));
    }
    let coverage = kappa * profile.moment(0);
    if coverage >= 1.0 {
        return Err(Error::VacuumViolation { coverage });
    }
    Ok(1.0 - coverage)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_max() -> VelocityProfile {
        VelocityProfile::standard_maxwellian()
    }

    fn bump() -> VelocityProfile {
        make_bump_on_tail(&std_max(), 0.05, 0.5, 5.0).unwrap()
    }

    #[test]
    fn maxwellian_peak_value() {
        let f = std_max().eval_f(C64::new(0.0, 0.0)).unwrap();
        assert!((f.re - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert_eq!(f.im, 0.0);
    }

    #[test]
    fn real_argument_gives_real_value() {
        for p in [std_max(), bump()] {
            for v in [-3.0, -0.3, 0.0, 1.7, 4.8, 5.2] {
                let f = p.eval_f(C64::new(v, 0.0)).unwrap();
                assert_eq!(f.im, 0.0);
                assert!(f.re >= 0.0);
            }
        }
    }

    #[test]
    fn maxwellian_slope() {
        let p = std_max();
        assert_eq!(p.eval_df(C64::new(0.0, 0.0)).unwrap().re, 0.0);
        let d1 = p.eval_df(C64::new(1.0, 0.0)).unwrap().re;
        assert!((d1 + 0.241_970_724_519_143_37).abs() < 1e-15);
    }

    #[test]
    fn strip_violation() {
        let p = std_max();
        let err = p.eval_f(C64::new(0.0, 0.6)).unwrap_err();
        assert!(matches!(err, Error::StripViolation { .. }));
        assert!(p.eval_df(C64::new(0.0, -0.6)).is_err());
        assert!(p.eval_f(C64::new(0.0, 0.5)).is_ok());
    }

    #[test]
    fn bump_edges_are_guarded_off_axis() {
        let p = bump();
        // edge at v = 5.5
        assert!(p.eval_df(C64::new(5.5, 0.1)).is_err());
        assert!(p.eval_df(C64::new(5.5, 0.0)).is_ok());
        assert!(p.eval_df(C64::new(5.2, 0.1)).is_ok());
        assert_eq!(p.eval_df(C64::new(7.0, 0.1)).unwrap().im.abs() < 1e-10, true);
    }

    #[test]
    fn maxwellian_moments() {
        let p = std_max();
        assert!((p.moment(0) - 1.0).abs() < 1e-12);
        assert!((p.moment(2) - 1.0).abs() < 1e-12);
        let q = VelocityProfile::maxwellian(2.0, 1.0, 3.0).unwrap();
        assert!((q.moment(0) - 2.0).abs() < 2e-10);
        assert!((q.moment(2) - 20.0).abs() < 20.0 * 1e-10);
    }

    #[test]
    fn bump_preserves_mass_and_has_positive_slope_at_center() {
        let p = bump();
        assert!((p.moment(0) - 1.0).abs() < 1e-10);
        assert!(p.eval_df_real(5.0) > 0.0);
    }

    #[test]
    fn bump_shape_properties() {
        let c = bump_norm();
        let g0p = bump_shape_deriv(C64::new(0.0, 0.0)).unwrap().re;
        assert!((g0p - 2.0 * c * (-1.0f64).exp()).abs() < 1e-14);
        assert_eq!(bump_shape(C64::new(1.0, 0.0)).unwrap().re, 0.0);
        assert_eq!(bump_shape(C64::new(-1.3, 0.0)).unwrap().re, 0.0);
        let mass = gauss_legendre_panels(-1.0, 1.0, 400, |x| bump_shape(C64::new(x, 0.0)).unwrap().re);
        assert!((mass - 1.0).abs() < 1e-13);
    }

    #[test]
    fn bump_tends_to_base_as_eps_vanishes() {
        let base = std_max();
        let gmax = (0..2000)
            .map(|i| bump_shape(C64::new(-1.0 + i as f64 * 1e-3, 0.0)).unwrap().re)
            .fold(0.0, f64::max);
        for eps in [1e-2, 1e-3, 1e-4] {
            let p = make_bump_on_tail(&base, eps, 0.5, 5.0).unwrap();
            for v in [-2.0, 0.0, 1.0, 4.9, 5.1] {
                let diff = (p.eval_f_real(v) - base.eval_f_real(v)).abs();
                // |f - f0| <= eps (f0 + m0 sup g / eta)
                assert!(diff <= eps * (base.eval_f_real(v) + gmax / 0.5) + 1e-16);
            }
        }
    }

    #[test]
    fn invalid_bumps_rejected() {
        let base = std_max();
        for (eps, eta) in [(0.0, 0.5), (1.0, 0.5), (-0.1, 0.5), (0.1, 0.0), (0.1, -1.0)] {
            assert!(matches!(
                make_bump_on_tail(&base, eps, eta, 5.0),
                Err(Error::InvalidBump(_))
            ));
        }
    }

    #[test]
    fn compatibility() {
        let p = std_max();
        assert_eq!(compatibility_alpha(&p, 0.0).unwrap(), 1.0);
        assert!((compatibility_alpha(&p, 0.1).unwrap() - 0.9).abs() < 1e-12);
        assert!(matches!(
            compatibility_alpha(&p, 1.5),
            Err(Error::VacuumViolation { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let p = bump();
        let s = serde_json::to_string(&p).unwrap();
        let q: VelocityProfile = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        let r: VelocityProfile =
            serde_json::from_str(r#"{"kind":"maxwellian","mass":2,"drift":1,"width":3}"#).unwrap();
        assert_eq!(r.mass(), 2.0);
        assert_eq!(r.strip_halfwidth(), 1.5);
    }

    #[test]
    fn sum_profile() {
        let a = VelocityProfile::maxwellian(0.5, -1.0, 1.0).unwrap();
        let b = VelocityProfile::maxwellian(0.5, 1.0, 0.5).unwrap();
        let s = VelocityProfile::sum(vec![a.clone(), b.clone()]).unwrap();
        assert_eq!(s.strip_halfwidth(), 0.25);
        let v = C64::new(0.3, 0.1);
        let lhs = s.eval_f(v).unwrap();
        let rhs = a.eval_f(v).unwrap() + b.eval_f(v).unwrap();
        assert!((lhs - rhs).norm() < 1e-15);
        assert!((s.moment(0) - 1.0).abs() < 1e-10);
    }
}
