use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no horizon: m = {m} is below the extremal mass {m_ext}")]
    NoHorizon { m: f64, m_ext: f64 },
    #[error("invalid horizon radii: {0}")]
    InvalidRoots(String),
    #[error("radius {r} lies inside the outer horizon r+ = {r_plus}")]
    OutsideExterior { r: f64, r_plus: f64 },
    #[error("{0} is outside the open domain of the coefficient")]
    DomainError(String),
    #[error("adaptive quadrature exceeded its budget on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64 },
    #[error("integrator stalled at t = {t} (step {h})")]
    IntegratorStall { t: f64, h: f64 },
    #[error("endpoint {0} is limit circle; pass a boundary parameter beta")]
    NotLimitPoint(String),
    #[error("window holds about {0} eigenvalues, more than the 1000 allowed")]
    WindowTooWide(usize),
    #[error("confining mass term vanishes (mu = {0})")]
    NotConfining(f64),
    #[error("|omega - phi_plus| = {0:e} is below 1e-6; use the phi_plus check")]
    TooCloseToPhiPlus(f64),
    #[error("extremal background is not supported here")]
    ExtremalUnsupported,
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("root search failed: {0}")]
    RootSearch(String),
}

impl Error {
    /// True for errors caused by bad input rather than by a solver.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_)
                | Error::NoHorizon { .. }
                | Error::InvalidRoots(_)
                | Error::OutsideExterior { .. }
                | Error::DomainError(_)
                | Error::NotLimitPoint(_)
                | Error::WindowTooWide(_)
                | Error::NotConfining(_)
                | Error::TooCloseToPhiPlus(_)
                | Error::ExtremalUnsupported
                | Error::GridTooCoarse(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
