//! Pairings of matrix-valued Laurent series against renormalized Green-kernel
//! coefficients on model surfaces.
//!
//! The library is organized around one analytic object: for a surface with
//! scalar Green function `h(P, Q)`, the renormalized kernel
//! `K(z, t) = d_z d_tbar [h(z, t) - ln|z - t|]` expands near a chart origin as
//! a double series `K(z, t) = sum a_{n,m} z^n conj(t)^m`. The coefficients
//! `a_{n,m}` pair two matrix Laurent series `f1`, `f2` through
//!
//! ```text
//! omega(f1, f2) = (2 pi)^2 Re sum_{n,m} a_{n,m} tr(adj(f1_{n-1}) f2_{m-1})
//! ```
//!
//! Modules:
//! - [`mls`]: matrix Laurent series in canonical trimmed form.
//! - [`green`]: Green functions for the sphere, flat tori (Ewald summation)
//!   and synthetic coefficient tables; renormalization and kernel derivatives.
//! - [`coeffs`]: coefficient extraction on circles (FFT), synthesis, decay fits.
//! - [`pairing`]: the pairing itself, by coefficient sum and by double contour
//!   quadrature, plus cocycle reduction to harmonic one-forms.
//! - [`verify`]: self-check suites shared by the CLI and the acceptance tests.
//! - [`cli`]: command implementations behind the `loopform` binary.

pub mod cli;
pub mod coeffs;
pub mod green;
pub mod mls;
pub mod pairing;
pub mod verify;

pub use num_complex::Complex64;

/// Errors shared across modules. Variants map onto the CLI exit-code contract:
/// configuration and input-shape problems exit with 2, numeric failures with 1.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("matrix entry count {got} does not match rank {rank}")]
    BadMatrixShape { rank: usize, got: usize },
    #[error("coefficient list must not be empty")]
    EmptyCoefficients,
    #[error("series has a pole at the origin (lead {lead}); cannot evaluate at z = 0")]
    PoleAtOrigin { lead: i32 },
    #[error("points coincide; the Green function is singular on the diagonal")]
    CoincidentPoints,
    #[error("point {point} lies outside the open chart disc")]
    OutsideChart { point: Complex64 },
    #[error("{op} is not supported for the {kernel} kernel")]
    UnsupportedKernel {
        op: &'static str,
        kernel: &'static str,
    },
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("{what} requires at least {needed} {unit}, got {got}")]
    Insufficient {
        what: &'static str,
        unit: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("target point {point} lies inside the bump annulus [{r0}, {r1}]")]
    TargetInsideAnnulus { point: Complex64, r0: f64, r1: f64 },
    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit code for the CLI: 1 for numeric failures, 2 for bad input/config.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonFinite { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) mod jsonutil {
    //! Serde helpers: complex scalars travel as `[re, im]` pairs.

    use num_complex::Complex64;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &Complex64, ser: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeTuple;
        let mut t = ser.serialize_tuple(2)?;
        t.serialize_element(&c.re)?;
        t.serialize_element(&c.im)?;
        t.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Complex64, D::Error> {
        let v = <[f64; 2]>::deserialize(de)?;
        if !v[0].is_finite() || !v[1].is_finite() {
            return Err(D::Error::custom("complex components must be finite"));
        }
        Ok(Complex64::new(v[0], v[1]))
    }
}
