use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Parameter outside the domain of the formula.
    Domain(&'static str),
    /// Point on (or within 1e-14 of) the cut `[-F, F]`.
    Cut,
    InvalidArgument(&'static str),
    /// A de-scaled value does not fit into an `f64`.
    Overflow,
    /// Successive quadrature refinements disagree beyond tolerance.
    Convergence { difference: f64 },
    /// Outside the validity region of an asymptotic formula.
    Validity(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(what) => write!(f, "domain error: {what}"),
            Error::Cut => write!(f, "point lies on the cut [-F, F]"),
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
            Error::Overflow => write!(f, "value overflows the native floating-point range"),
            Error::Convergence { difference } => {
                write!(f, "quadrature did not converge (refinement difference {difference:e})")
            }
            Error::Validity(what) => write!(f, "outside validity region: {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
