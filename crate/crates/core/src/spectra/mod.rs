//! Spectral data of opposition graphs: flag types, quotient matrices,
//! eigenvector families, intersection numbers, the point scheme, the
//! triangular criterion and smallest-eigenvalue multiplicities.

pub mod eigen;
pub mod multiplicity;
pub mod quotient;
pub mod scheme;
pub mod structure;
pub mod triangular;
pub mod types;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{GeometryError, GeometryInstance, GeometryKind};
use crate::linalg::LinalgError;
use crate::qpow::{big_to_i64, CountError};

pub use eigen::{
    chi_agreement, eigvec_family, eval_chi, eval_f, family_eigenvalue, lambda_min, sample_flags, valency,
    verify_flag_eigenvectors, ChiReport, EigenReport, EigvecFamily, LambdaMin, ModuleEigen, Sample, SignedQPower,
};
pub use multiplicity::{
    multiplicity, spanning_rank, table_value, MultiplicityMode, MultiplicityReport, SpanningReport, TableValue,
};
pub use quotient::{quotient_matrix, QuotientMatrixExact, QuotientMode};
pub use structure::{check_lift, check_spectrum, LiftReport, SpectrumReport};
pub use scheme::{intersection_numbers, point_scheme, IntersectionNumbers, PointScheme};
pub use triangular::{triangular_check, TriangularReport};
pub use types::{flag_type, size_of_type_class, type_profile, TypeProfile};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectraError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("{what}: representatives disagree ({detail})")]
    RepresentativeDisagreement { what: String, detail: String },
    #[error("family index {j} outside 1..={max}")]
    OutOfRangeIndex { j: usize, max: usize },
    #[error("even-rank type A is outside the supported range for {0}")]
    EvenRankTypeA(&'static str),
    #[error("{0} is not defined for this geometry kind")]
    Unsupported(&'static str),
    #[error("triangular criterion violated: {0}")]
    CriterionViolated(String),
    #[error("eigen identity violated at flag {flag}, j = {j}, point {point}: sum {lhs} != {rhs}")]
    EigenIdentityViolated { flag: usize, j: usize, point: usize, lhs: i64, rhs: i64 },
    #[error("{what}: size {size} exceeds the budget of {limit}")]
    ScaleTooLarge { what: &'static str, size: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, SpectraError>;

/// Whether a value comes from a published closed form, from an
/// independent computation, or holds by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Published,
    Derived,
    Trivial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// One verified claim in a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub expected: String,
    pub actual: String,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor: Option<String>,
}

impl Check {
    pub fn compare(
        name: impl Into<String>,
        expected: impl ToString,
        actual: impl ToString,
        provenance: Provenance,
        anchor: Option<&str>,
    ) -> Check {
        let (expected, actual) = (expected.to_string(), actual.to_string());
        Check {
            name: name.into(),
            status: Status::from_bool(expected == actual),
            expected,
            actual,
            provenance,
            anchor: anchor.map(str::to_string),
        }
    }

    pub fn flag(name: impl Into<String>, ok: bool, detail: impl ToString, provenance: Provenance) -> Check {
        Check {
            name: name.into(),
            status: Status::from_bool(ok),
            expected: "true".into(),
            actual: detail.to_string(),
            provenance,
            anchor: None,
        }
    }

    pub fn with_anchor(mut self, anchor: &str) -> Check {
        self.anchor = Some(anchor.to_string());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Rank `n` and `2e` of the polar space behind `g` (`2e = 0` for type D).
pub(crate) fn polar_params(g: &GeometryInstance) -> (usize, i64) {
    match g.kind {
        GeometryKind::OriflammeD => (g.n, 0),
        _ => (g.n, g.e2()),
    }
}

/// Number of eigenvector families: `m = (n+1)/2` for type A, `n` otherwise.
pub fn family_count(g: &GeometryInstance) -> Result<usize> {
    match g.kind {
        GeometryKind::ProjectiveA if g.n.is_multiple_of(2) => Err(SpectraError::EvenRankTypeA("eigenvector families")),
        GeometryKind::ProjectiveA => Ok(g.n.div_ceil(2)),
        _ => Ok(g.n),
    }
}

/// Positive coefficient of family `j`: `q^j` for type A, `q^(j+e-1)` otherwise.
pub(crate) fn family_weight(g: &GeometryInstance, j: usize) -> Result<i64> {
    let (_, e2) = polar_params(g);
    let x2 = match g.kind {
        GeometryKind::ProjectiveA => 2 * j as i64,
        _ => 2 * (j as i64 - 1) + e2,
    };
    Ok(crate::qpow::to_i64(&g.qorder.pow_half(x2)?, "family weight")?)
}

pub(crate) fn check_family_index(g: &GeometryInstance, j: usize) -> Result<usize> {
    let m = family_count(g)?;
    if j == 0 || j > m {
        return Err(SpectraError::OutOfRangeIndex { j, max: m });
    }
    Ok(m)
}

pub(crate) fn int(value: &BigInt, what: &str) -> Result<i64> {
    Ok(big_to_i64(value, what)?)
}

pub(crate) fn rat_int(value: &BigRational, what: &str) -> Result<i64> {
    Ok(crate::qpow::to_i64(value, what)?)
}
