//! Hyperbolic conservation laws coupled to a kinetic phase.
//!
//! Scalar law: plane waves `e^{i(kx - omega t)}` exist iff
//! `G(omega) = omega - lambda0 + kappa C[v f0'](omega) = 0`.
//!
//! Symmetric systems: with `I(sigma) = C[phi f0'](sigma)` taken component-wise,
//! the eigenproblem `(A - sigma) r = kappa (grad_psi . r) I(sigma)` is a rank-one
//! perturbation of `A`, so its eigenvalues are the zeros of the secular
//! function `S(sigma) = 1 - kappa <grad_psi, (A - sigma)^{-1} I(sigma)>`.
//!
//! For small `kappa` the root leaving the eigenvalue `sigma_j` of `A` moves with
//! `(Im sigma_j)'(0) = -pi (grad_psi . r_j)(phi(sigma_j) . r_j) f0'(sigma_j)`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::RootReport;
use crate::error::{Error, Result};
use crate::profiles::VelocityProfile;
use crate::quadrature::{classify_branch, singular_integral, ProfileIntegrand, QuadratureConfig, Weight};
use crate::roots::{continue_zero, RootOptions, Zero};

/// Scalar law `u_t + lambda(u)_x` coupled through `kappa`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarCoupling {
    pub lambda0: f64,
    pub kappa: f64,
    pub profile: VelocityProfile,
}

pub fn scalar_dispersion(c: &ScalarCoupling, omega: C64, config: &QuadratureConfig) -> Result<C64> {
    let g = ProfileIntegrand::new(&c.profile, Weight::Velocity);
    let ci = singular_integral(&g, omega, classify_branch(omega, config), config)?;
    Ok(omega - c.lambda0 + c.kappa * ci)
}

/// Continuation of the root from `omega = lambda0` at `kappa = 0` in eight
/// equal `kappa` steps.
pub fn scalar_root(c: &ScalarCoupling, tol: f64, config: &QuadratureConfig) -> Result<RootReport> {
    let path: Vec<f64> = (1..=8).map(|i| c.kappa * i as f64 / 8.0).collect();
    let f = |kappa: f64, w: C64| {
        let ck = ScalarCoupling {
            kappa,
            ..c.clone()
        };
        scalar_dispersion(&ck, w, config)
    };
    let opts = RootOptions {
        tol,
        ..Default::default()
    };
    let max_step = 0.25 * c.profile.strip_halfwidth();
    let z = continue_zero(&f, C64::new(c.lambda0, 0.0), &path, &opts, max_step)?;
    let last = z.last().copied().unwrap_or(Zero {
        z: C64::new(c.lambda0, 0.0),
        residual: 0.0,
        iterations: 0,
        evidence: 0,
    });
    Ok(RootReport {
        sigma: last.z,
        residual: last.residual,
        branch: classify_branch(last.z, config),
        winding_evidence: 1,
        newton_iters: z.iter().map(|z| z.iterations).sum(),
    })
}

/// Leading-order `Im omega = -pi kappa lambda0 f0'(lambda0)`.
pub fn scalar_imag_leading(c: &ScalarCoupling) -> f64 {
    -PI * c.kappa * c.lambda0 * c.profile.eval_df_real(c.lambda0)
}

/// Eigenvalues (ascending) and unit eigenvectors of a symmetric matrix, by
/// cyclic Jacobi rotations. Each eigenvector's first non-negligible component
/// is positive.
pub fn symmetric_eigen(a: &[Vec<f64>]) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = a.len();
    if n == 0 || a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidCoupling("matrix must be square and non-empty".into()));
    }
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    for i in 0..n {
        for j in 0..i {
            if (a[i][j] - a[j][i]).abs() > 1e-12 * scale.max(1.0) {
                return Err(Error::InvalidCoupling(format!("matrix not symmetric at ({i}, {j})")));
            }
        }
    }
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as u8 as f64).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|j| {
            let mut r: Vec<f64> = (0..n).map(|i| v[i][j]).collect();
            let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            r.iter_mut().for_each(|x| *x /= norm);
            if let Some(first) = r.iter().find(|x| x.abs() > 1e-12) {
                if *first < 0.0 {
                    r.iter_mut().for_each(|x| *x = -*x);
                }
            }
            (m[j][j], r)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let gap = pairs
        .windows(2)
        .map(|w| w[1].0 - w[0].0)
        .fold(f64::INFINITY, f64::min);
    if gap <= 1e-8 {
        return Err(Error::DegenerateSpectrum { gap });
    }
    Ok(pairs)
}

/// Symmetric system coupled to the kinetic phase. `phi_coeffs[i][p]` is the
/// coefficient of `v^p` in the `i`-th component of `phi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemCoupling {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub grad_psi: Vec<f64>,
    pub phi_coeffs: Vec<Vec<f64>>,
    pub kappa: f64,
    pub profile: VelocityProfile,
}

impl SystemCoupling {
    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Build from a row-major matrix.
    pub fn from_row_major(
        a: &[f64],
        grad_psi: Vec<f64>,
        phi_coeffs: Vec<Vec<f64>>,
        kappa: f64,
        profile: VelocityProfile,
    ) -> Result<Self> {
        let n = grad_psi.len();
        if a.len() != n * n {
            return Err(Error::InvalidCoupling(format!(
                "matrix has {} entries, expected {}",
                a.len(),
                n * n
            )));
        }
        let s = SystemCoupling {
            a: a.chunks(n).map(|r| r.to_vec()).collect(),
            grad_psi,
            phi_coeffs,
            kappa,
            profile,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n == 0 || self.grad_psi.len() != n || self.phi_coeffs.len() != n {
            return Err(Error::InvalidCoupling(format!(
                "dimension mismatch: A is {n}x{n}, grad_psi has {}, phi has {} components",
                self.grad_psi.len(),
                self.phi_coeffs.len()
            )));
        }
        if !self.kappa.is_finite() || self.grad_psi.iter().chain(self.phi_coeffs.iter().flatten()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidCoupling("non-finite coefficient".into()));
        }
        symmetric_eigen(&self.a).map(|_| ())
    }

    pub fn with_kappa(&self, kappa: f64) -> Self {
        SystemCoupling {
            kappa,
            ..self.clone()
        }
    }

    /// `phi(v)` at real `v`.
    pub fn phi(&self, v: f64) -> Vec<f64> {
        self.phi_coeffs
            .iter()
            .map(|c| c.iter().rev().fold(0.0, |acc, &x| acc * v + x))
            .collect()
    }

    /// `I(sigma)` on the branch of `sigma`.
    fn kinetic_vector(&self, sigma: C64, config: &QuadratureConfig) -> Result<Vec<C64>> {
        let branch = classify_branch(sigma, config);
        self.phi_coeffs
            .iter()
            .map(|c| {
                let g = ProfileIntegrand::new(&self.profile, Weight::Poly(c));
                singular_integral(&g, sigma, branch, config)
            })
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solve `(A - sigma) x = b` by Gaussian elimination with partial pivoting.
fn solve_shifted(a: &[Vec<f64>], sigma: C64, b: &[C64]) -> Vec<C64> {
    let n = a.len();
    let mut m: Vec<Vec<C64>> = (0..n)
        .map(|i| {
            let mut row: Vec<C64> = a[i].iter().map(|&x| C64::new(x, 0.0)).collect();
            row[i] -= sigma;
            row.push(b[i]);
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .unwrap_or(col);
        m.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..=n {
                let t = m[col][k];
                m[row][k] -= f * t;
            }
        }
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let s: C64 = (i + 1..n).map(|k| m[i][k] * x[k]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    x
}

/// `S(sigma) = 1 - kappa <grad_psi, (A - sigma)^{-1} I(sigma)>`.
pub fn secular_function(s: &SystemCoupling, sigma: C64, config: &QuadratureConfig) -> Result<C64> {
    if s.kappa == 0.0 {
        return Ok(C64::new(1.0, 0.0));
    }
    let eig = symmetric_eigen(&s.a)?;
    let distance = eig.iter().map(|(l, _)| (sigma - l).norm()).fold(f64::INFINITY, f64::min);
    if distance < 1e-10 {
        return Err(Error::ResolventSingularity { distance });
    }
    let i = s.kinetic_vector(sigma, config)?;
    let x = solve_shifted(&s.a, sigma, &i);
    let proj: C64 = s.grad_psi.iter().zip(&x).map(|(g, x)| *g * x).sum();
    Ok(1.0 - s.kappa * proj)
}

/// `(sigma_j - sigma) S(sigma)` written in the eigenbasis, which stays regular
/// at `sigma = sigma_j`.
fn regularized_secular(
    s: &SystemCoupling,
    eig: &[(f64, Vec<f64>)],
    j: usize,
    sigma: C64,
    config: &QuadratureConfig,
) -> Result<C64> {
    let i = s.kinetic_vector(sigma, config)?;
    let sj = eig[j].0;
    let mut t = C64::new(sj, 0.0) - sigma;
    for (k, (sk, r)) in eig.iter().enumerate() {
        let ri: C64 = r.iter().zip(&i).map(|(a, b)| *a * b).sum();
        let w = dot(&s.grad_psi, r) * ri;
        if k == j {
            t -= s.kappa * w;
        } else {
            t -= s.kappa * w * (sj - sigma) / (sk - sigma);
        }
    }
    Ok(t)
}

/// `(Im sigma_j)'(0)` for the `j`-th eigenvalue (ascending order).
pub fn imag_derivative_at_zero(s: &SystemCoupling, j: usize) -> Result<f64> {
    let eig = symmetric_eigen(&s.a)?;
    let (sj, r) = eig
        .get(j)
        .ok_or_else(|| Error::InvalidCoupling(format!("mode index {j} out of range")))?;
    Ok(-PI * mode_product(s, *sj, r))
}

fn mode_product(s: &SystemCoupling, sj: f64, r: &[f64]) -> f64 {
    dot(&s.grad_psi, r) * dot(&s.phi(sj), r) * s.profile.eval_df_real(sj)
}

/// Secular root leaving `sigma_j` at `kappa = 0`, continued to `s.kappa` in
/// `steps` equal increments.
pub fn track_secular_root(s: &SystemCoupling, j: usize, steps: usize, config: &QuadratureConfig) -> Result<Zero> {
    let eig = symmetric_eigen(&s.a)?;
    if j >= eig.len() {
        return Err(Error::InvalidCoupling(format!("mode index {j} out of range")));
    }
    let steps = steps.max(1);
    let path: Vec<f64> = (1..=steps).map(|i| s.kappa * i as f64 / steps as f64).collect();
    let f = |kappa: f64, sigma: C64| regularized_secular(&s.with_kappa(kappa), &eig, j, sigma, config);
    let opts = RootOptions {
        tol: 1e-14,
        ..Default::default()
    };
    let z = continue_zero(&f, C64::new(eig[j].0, 0.0), &path, &opts, 0.25 * s.profile.strip_halfwidth())?;
    Ok(*z.last().expect("non-empty path"))
}

/// Secular roots leaving every eigenvalue, in ascending eigenvalue order.
pub fn track_all_secular_roots(s: &SystemCoupling, steps: usize, config: &QuadratureConfig) -> Result<Vec<Zero>> {
    (0..s.dim())
        .into_par_iter()
        .map(|j| track_secular_root(s, j, steps, config))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeClass {
    StableMode,
    UnstableMode,
    Decoupled,
}

/// Necessary-condition check for one eigenpair of `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeVerdict {
    pub j: usize,
    pub sigma_j: f64,
    pub r_j: Vec<f64>,
    pub q_j: f64,
    pub imag_rate: f64,
    pub verdict: ModeClass,
}

/// Classify every eigenpair by the sign of
/// `q_j = (grad_psi . r_j)(phi(sigma_j) . r_j) f0'(sigma_j)`.
pub fn prop1_check(s: &SystemCoupling) -> Result<Vec<ModeVerdict>> {
    s.validate()?;
    let eig = symmetric_eigen(&s.a)?;
    Ok(eig
        .into_iter()
        .enumerate()
        .map(|(j, (sj, r))| {
            let gp = dot(&s.grad_psi, &r);
            let pp = dot(&s.phi(sj), &r);
            let q = gp * pp * s.profile.eval_df_real(sj);
            let verdict = if gp.abs() <= 1e-12 || pp.abs() <= 1e-12 {
                ModeClass::Decoupled
            } else if q < -1e-12 {
                ModeClass::UnstableMode
            } else {
                ModeClass::StableMode
            };
            ModeVerdict {
                j,
                sigma_j: sj,
                r_j: r,
                q_j: q,
                imag_rate: -PI * q,
                verdict,
            }
        })
        .collect())
}

/// True when some mode violates the necessary condition for stability.
pub fn fails_necessary_condition(modes: &[ModeVerdict]) -> bool {
    modes.iter().any(|m| m.verdict == ModeClass::UnstableMode)
}
