//! Zeros of analytic functions in rectangles.
//!
//! Counting uses the argument principle: the phase of `f` is unwrapped along
//! the boundary, subdividing any step whose phase increment exceeds `pi/8`.
//! Location bisects the rectangle on winding counts until each piece holds
//! one zero, then polishes with Newton.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchRegion {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let r = SearchRegion {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.re_min, self.re_max, self.im_min, self.im_max];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidRegion("bounds must be finite".into()));
        }
        if self.re_min >= self.re_max || self.im_min >= self.im_max {
            return Err(Error::InvalidRegion(format!(
                "empty rectangle [{}, {}] x [{}, {}]",
                self.re_min, self.re_max, self.im_min, self.im_max
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> C64 {
        C64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    /// True when the closed rectangle meets the closed square of half-size `h`
    /// centred at the origin.
    pub fn meets_square(&self, h: f64) -> bool {
        self.re_min <= h && self.re_max >= -h && self.im_min <= h && self.im_max >= -h
    }

    /// Pieces of the rectangle outside the open square of half-size `h` about 0.
    pub fn without_origin(&self, h: f64) -> Vec<SearchRegion> {
        if !self.meets_square(h) {
            return vec![*self];
        }
        let mut out = Vec::new();
        let mut push = |a: f64, b: f64, c: f64, d: f64| {
            if b > a && d > c {
                out.push(SearchRegion {
                    re_min: a,
                    re_max: b,
                    im_min: c,
                    im_max: d,
                });
            }
        };
        push(self.re_min, -h, self.im_min, self.im_max);
        push(h, self.re_max, self.im_min, self.im_max);
        let (lo, hi) = (self.re_min.max(-h), self.re_max.min(h));
        push(lo, hi, self.im_min, -h);
        push(lo, hi, h, self.im_max);
        out
    }

    /// Grow by `frac` of the size on every side. Imaginary bounds keep their
    /// sign and stay inside `im_bounds`.
    pub fn dilate(&self, frac: f64, im_bounds: (f64, f64)) -> SearchRegion {
        let dw = frac * self.width();
        let dh = frac * self.height();
        let mut im_min = self.im_min - dh;
        if self.im_min > 0.0 && im_min <= 0.0 {
            im_min = 0.5 * self.im_min;
        }
        let mut im_max = self.im_max + dh;
        if self.im_max < 0.0 && im_max >= 0.0 {
            im_max = 0.5 * self.im_max;
        }
        SearchRegion {
            re_min: self.re_min - dw,
            re_max: self.re_max + dw,
            im_min: im_min.max(im_bounds.0),
            im_max: im_max.min(im_bounds.1),
        }
    }

    /// Split the longer side at fraction `t`.
    pub fn split(&self, t: f64) -> (SearchRegion, SearchRegion) {
        let mut a = *self;
        let mut b = *self;
        if self.width() >= self.height() {
            let x = self.re_min + t * self.width();
            a.re_max = x;
            b.re_min = x;
        } else {
            let y = self.im_min + t * self.height();
            a.im_max = y;
            b.im_min = y;
        }
        (a, b)
    }

    fn corners(&self) -> [C64; 4] {
        [
            C64::new(self.re_min, self.im_min),
            C64::new(self.re_max, self.im_min),
            C64::new(self.re_max, self.im_max),
            C64::new(self.re_min, self.im_max),
        ]
    }
}

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Required `|f|` at a reported zero.
    pub tol: f64,
    /// Rectangles below this diameter stop bisecting.
    pub min_diameter: f64,
    /// Dilation never moves the imaginary bounds outside this interval.
    pub im_bounds: (f64, f64),
    /// Relative step of the derivative stencil.
    pub deriv_step: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            tol: 1e-12,
            min_diameter: 1e-3,
            im_bounds: (f64::NEG_INFINITY, f64::INFINITY),
            deriv_step: 1e-5,
            max_iter: 50,
        }
    }
}

/// A located zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub z: C64,
    pub residual: f64,
    pub iterations: usize,
    /// Winding count of the last rectangle that contained the zero.
    pub evidence: usize,
}

const EDGE_SAMPLES: usize = 32;
const MAX_PHASE_STEP: f64 = PI / 8.0;

fn edge_phase<F>(f: &F, a: C64, b: C64, fa: C64, fb: C64, min_len: f64) -> Result<f64>
where
    F: Fn(C64) -> Result<C64>,
{
    if fa == C64::new(0.0, 0.0) || fb == C64::new(0.0, 0.0) {
        return Err(Error::BoundaryRoot { defect: 0.5 });
    }
    let d = (fb / fa).arg();
    if d.abs() <= MAX_PHASE_STEP {
        return Ok(d);
    }
    if (b - a).norm() < min_len {
        return Err(Error::BoundaryRoot { defect: 0.5 });
    }
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    Ok(edge_phase(f, a, m, fa, fm, min_len)? + edge_phase(f, m, b, fm, fb, min_len)?)
}

/// Winding number of `f` around the rectangle boundary, unrounded.
pub fn winding_number<F>(f: &F, region: &SearchRegion) -> Result<f64>
where
    F: Fn(C64) -> Result<C64>,
{
    let min_len = 1e-9 * region.diameter();
    let c = region.corners();
    let mut total = 0.0;
    for e in 0..4 {
        let (a, b) = (c[e], c[(e + 1) % 4]);
        let pts: Vec<C64> = (0..=EDGE_SAMPLES)
            .map(|i| a + (b - a) * (i as f64 / EDGE_SAMPLES as f64))
            .collect();
        let vals = pts.iter().map(|&z| f(z)).collect::<Result<Vec<_>>>()?;
        for i in 0..EDGE_SAMPLES {
            total += edge_phase(f, pts[i], pts[i + 1], vals[i], vals[i + 1], min_len)?;
        }
    }
    Ok(total / (2.0 * PI))
}

fn rounded_count<F>(f: &F, region: &SearchRegion) -> Result<usize>
where
    F: Fn(C64) -> Result<C64>,
{
    let n = winding_number(f, region)?;
    let r = n.round();
    let defect = (n - r).abs();
    if defect >= 0.25 || r < 0.0 {
        return Err(Error::BoundaryRoot { defect });
    }
    Ok(r as usize)
}

/// Number of zeros in the rectangle, dilating it by 1% up to three times when
/// a zero sits on the boundary. Returns the rectangle the count refers to.
pub fn count_zeros<F>(f: &F, region: &SearchRegion, opts: &RootOptions) -> Result<(usize, SearchRegion)>
where
    F: Fn(C64) -> Result<C64>,
{
    region.validate()?;
    let mut r = *region;
    let mut last = Error::BoundaryRoot { defect: 0.5 };
    for attempt in 0..=3 {
        if attempt > 0 {
            r = r.dilate(0.01, opts.im_bounds);
        }
        match rounded_count(f, &r) {
            Ok(n) => return Ok((n, r)),
            Err(e @ Error::BoundaryRoot { .. }) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Derivative of an analytic `f` from the four-point stencil
/// `[f(z+h) - f(z-h) - i (f(z+ih) - f(z-ih))] / 4h`, exact through cubic order.
pub fn complex_derivative<F>(f: &F, z: C64, h: f64) -> Result<C64>
where
    F: Fn(C64) -> Result<C64>,
{
    let i = C64::new(0.0, 1.0);
    let dr = f(z + h)? - f(z - h)?;
    let di = f(z + i * h)? - f(z - i * h)?;
    Ok((dr - i * di) / (4.0 * h))
}

/// Newton iteration from `z0`. Steps are capped at `max_step`.
pub fn newton<F>(f: &F, z0: C64, opts: &RootOptions, max_step: f64) -> Result<Zero>
where
    F: Fn(C64) -> Result<C64>,
{
    let mut z = z0;
    let mut fz = f(z)?;
    for it in 0..opts.max_iter {
        if fz.norm() <= opts.tol {
            return Ok(Zero {
                z,
                residual: fz.norm(),
                iterations: it,
                evidence: 0,
            });
        }
        let h = opts.deriv_step * z.norm().max(1.0);
        let d = complex_derivative(f, z, h)?;
        if d.norm() == 0.0 || !d.is_finite() {
            break;
        }
        let mut step = fz / d;
        if step.norm() > max_step {
            step *= max_step / step.norm();
        }
        z -= step;
        fz = f(z)?;
        if step.norm() <= 4.0 * f64::EPSILON * z.norm().max(1.0) {
            if fz.norm() <= opts.tol {
                return Ok(Zero {
                    z,
                    residual: fz.norm(),
                    iterations: it + 1,
                    evidence: 0,
                });
            }
            break;
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        residual: fz.norm(),
    })
}

const SPLITS: [f64; 5] = [0.5, 0.45, 0.55, 0.4, 0.6];

/// All zeros inside the rectangle, sorted by `(Re, Im)`.
pub fn find_zeros<F>(f: &F, region: &SearchRegion, opts: &RootOptions) -> Result<Vec<Zero>>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    let (count, r) = count_zeros(f, region, opts)?;
    let mut zeros = locate(f, &r, count, opts)?;
    sort_and_dedup(&mut zeros);
    Ok(zeros)
}

pub(crate) fn sort_and_dedup(zeros: &mut Vec<Zero>) {
    zeros.sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im)));
    zeros.dedup_by(|b, a| (a.z - b.z).norm() <= 1e-8 * a.z.norm().max(1.0));
}

fn locate<F>(f: &F, r: &SearchRegion, count: usize, opts: &RootOptions) -> Result<Vec<Zero>>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    if count == 0 {
        return Ok(Vec::new());
    }
    let slack = 1e-9 * r.diameter().max(1e-300);
    let inside = |z: C64| {
        z.re >= r.re_min - slack
            && z.re <= r.re_max + slack
            && z.im >= r.im_min - slack
            && z.im <= r.im_max + slack
    };
    if count == 1 {
        if let Ok(mut z) = newton(f, r.center(), opts, 0.5 * r.diameter()) {
            if inside(z.z) {
                z.evidence = 1;
                return Ok(vec![z]);
            }
        }
    }
    if r.diameter() < opts.min_diameter {
        return deflated_cluster(f, r, count, opts);
    }
    let mut last = Error::BoundaryRoot { defect: 0.5 };
    for t in SPLITS {
        let (a, b) = r.split(t);
        let counts = rayon::join(|| rounded_count(f, &a), || rounded_count(f, &b));
        let (ca, cb) = match counts {
            (Ok(ca), Ok(cb)) => (ca, cb),
            (Err(e @ Error::BoundaryRoot { .. }), _) | (_, Err(e @ Error::BoundaryRoot { .. })) => {
                last = e;
                continue;
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        if ca + cb != count {
            last = Error::BoundaryRoot { defect: 0.5 };
            continue;
        }
        let (za, zb) = rayon::join(|| locate(f, &a, ca, opts), || locate(f, &b, cb, opts));
        let mut out = za?;
        out.extend(zb?);
        return Ok(out);
    }
    Err(last)
}

fn deflated_cluster<F>(f: &F, r: &SearchRegion, count: usize, opts: &RootOptions) -> Result<Vec<Zero>>
where
    F: Fn(C64) -> Result<C64>,
{
    let mut found: Vec<Zero> = Vec::new();
    for _ in 0..count {
        let known: Vec<C64> = found.iter().map(|z| z.z).collect();
        let g = |z: C64| -> Result<C64> {
            let p = known.iter().fold(C64::new(1.0, 0.0), |acc, &k| acc * (z - k));
            Ok(f(z)? / p)
        };
        let start = r.center() + C64::new(0.1, 0.07) * r.diameter() * found.len() as f64;
        let mut z = newton(&g, start, opts, r.diameter())?;
        z.residual = f(z.z)?.norm();
        if z.residual > opts.tol {
            return Err(Error::NonConvergence {
                iterations: opts.max_iter,
                residual: z.residual,
            });
        }
        z.evidence = count;
        found.push(z);
    }
    Ok(found)
}

/// Track a zero of `f(p, .)` as `p` runs through `path`, each Newton solve
/// starting from the previous zero.
pub fn continue_zero<F>(f: &F, z0: C64, path: &[f64], opts: &RootOptions, max_step: f64) -> Result<Vec<Zero>>
where
    F: Fn(f64, C64) -> Result<C64>,
{
    let mut z = z0;
    let mut out = Vec::with_capacity(path.len());
    for &p in path {
        let g = |w: C64| f(p, w);
        let found = newton(&g, z, opts, max_step)?;
        z = found.z;
        out.push(found);
    }
    Ok(out)
}
