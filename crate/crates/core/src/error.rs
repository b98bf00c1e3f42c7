use thiserror::Error;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("{func} did not converge: {detail}")]
    NoConvergence { func: &'static str, detail: String },

    #[error("pole of {func} at {at}")]
    Pole { func: &'static str, at: f64 },

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("no root found: {0}")]
    NoRoot(String),

    #[error("grid resolution too coarse: {0}")]
    Resolution(String),

    #[error("redraw limit exceeded in {0}")]
    RedrawLimit(&'static str),

    #[error("quadrilateral {index}: {source}")]
    Quadrilateral {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(func: &'static str, detail: impl Into<String>) -> Result<T> {
    Err(Error::Domain {
        func,
        detail: detail.into(),
    })
}
