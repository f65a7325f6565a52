use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("evaluation point outside the analytic strip: |Im v| = {im:e} > {halfwidth:e}")]
    StripViolation { im: f64, halfwidth: f64 },

    #[error("evaluation point {re:e} + {im:e}i too close to a non-analytic bump edge")]
    BumpEdge { re: f64, im: f64 },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid bump-on-tail parameters: {0}")]
    InvalidBump(String),

    #[error("vacuum violation: kappa * m0 = {coverage} >= 1 leaves no room for the fluid")]
    VacuumViolation { coverage: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid quadrature configuration: {0}")]
    InvalidQuadrature(String),

    #[error("truncated tail {tail:e} exceeds 1e-3 of the integral magnitude {value:e}")]
    QuadratureDivergence { tail: f64, value: f64 },

    #[error("phase velocity too close to zero")]
    ZeroSigma,

    #[error("forcing functional needs Im omega > 0, got {im_omega:e}")]
    LaplaceDomain { im_omega: f64 },

    #[error("invalid search region: {0}")]
    InvalidRegion(String),

    #[error("root on or near the contour: winding defect {defect:.3} after dilation")]
    BoundaryRoot { defect: f64 },

    #[error("Newton iteration did not converge after {iterations} steps (|f| = {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("derivative of the real part too small: {value:e}")]
    DegenerateDerivative { value: f64 },

    #[error("matrix spectrum is degenerate: minimum eigenvalue gap {gap:e}")]
    DegenerateSpectrum { gap: f64 },

    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),

    #[error("sigma is within {distance:e} of an eigenvalue of A")]
    ResolventSingularity { distance: f64 },

    #[error("grid too coarse for the eigenmode: |Im sigma| = {im_sigma:e} < 3 dv = {min:e}")]
    RefineGrid { im_sigma: f64, min: f64 },

    #[error("seed is not a dispersion root: |D(sigma)| = {residual:e}")]
    NotARoot { residual: f64 },

    #[error("time step {dt:e} exceeds the stability bound {limit:e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("t_final = {t_final} reaches the grid recurrence time {recurrence}")]
    Recurrence { t_final: f64, recurrence: f64 },

    #[error("invalid simulation configuration: {0}")]
    InvalidSim(String),

    #[error("growth-rate fit is degenerate: residual {residual:e} vs scale {scale:e}")]
    DegenerateFit { residual: f64, scale: f64 },

    #[error("no root with Im sigma > 0 was found")]
    NoUnstableRoot,
}

impl Error {
    /// True for errors caused by invalid inputs, as opposed to numerical
    /// failures on valid inputs.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidProfile(_)
                | Error::InvalidBump(_)
                | Error::VacuumViolation { .. }
                | Error::InvalidParams(_)
                | Error::InvalidQuadrature(_)
                | Error::InvalidRegion(_)
                | Error::InvalidCoupling(_)
                | Error::InvalidSim(_)
                | Error::CflViolation { .. }
                | Error::Recurrence { .. }
        )
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::StripViolation { .. } => "StripViolation",
            Error::BumpEdge { .. } => "StripViolation",
            Error::InvalidProfile(_) => "InvalidProfile",
            Error::InvalidBump(_) => "InvalidBump",
            Error::VacuumViolation { .. } => "VacuumViolation",
            Error::InvalidParams(_) => "InvalidParams",
            Error::InvalidQuadrature(_) => "InvalidQuadrature",
            Error::QuadratureDivergence { .. } => "QuadratureDivergence",
            Error::ZeroSigma => "ZeroSigma",
            Error::LaplaceDomain { .. } => "LaplaceDomain",
            Error::InvalidRegion(_) => "InvalidRegion",
            Error::BoundaryRoot { .. } => "BoundaryRoot",
            Error::NonConvergence { .. } => "NonConvergence",
            Error::DegenerateDerivative { .. } => "DegenerateDerivative",
            Error::DegenerateSpectrum { .. } => "DegenerateSpectrum",
            Error::InvalidCoupling(_) => "InvalidCoupling",
            Error::ResolventSingularity { .. } => "ResolventSingularity",
            Error::RefineGrid { .. } => "RefineGrid",
            Error::NotARoot { .. } => "NotARoot",
            Error::CflViolation { .. } => "CflViolation",
            Error::Recurrence { .. } => "Recurrence",
            Error::InvalidSim(_) => "InvalidSim",
            Error::DegenerateFit { .. } => "DegenerateFit",
            Error::NoUnstableRoot => "NoUnstableRoot",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
