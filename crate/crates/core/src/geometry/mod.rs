//! Projective spaces, classical polar spaces and the oriflamme geometry.

pub mod cache;
pub mod counts;
pub mod enumerate;
pub mod form;
pub mod opposition;
pub mod subspace;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::field::{Elem, Field, FieldError};
use crate::qpow::{CountError, QOrder};
pub use enumerate::{Enumeration, FlagId, Registry};
pub use form::{FormKind, FormSpec};
pub use subspace::Subspace;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("cannot parse descriptor {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("inadmissible parameters: {0}")]
    InadmissibleParameters(String),
    #[error("half-integer e needs a square field order, got q = {0}")]
    NonSquareFieldForHalfIntegerE(u64),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error("projective spaces carry no polarity")]
    TypeAHasNoPerp,
    #[error("projective spaces only distinguish equal and distinct points")]
    TypeAHasNoCollinearity,
    #[error("flags belong to different geometries")]
    MixedGeometries,
    #[error("generator classes exist only for hyperbolic quadrics")]
    NotHyperbolic,
    #[error("subspace of rank {rank} is not a generator (rank {n})")]
    NotAGenerator { rank: usize, n: usize },
    #[error("Witt index is {found}, expected {expected}")]
    WittIndex { found: usize, expected: usize },
    #[error("instance has {count} maximal flags, over the budget of {limit}")]
    TooManyFlags { count: u64, limit: u64 },
    #[error("{0}")]
    Cache(String),
}

/// Instance descriptor: `A:<n>:<q>`, `B:<n>:<2e>:<q>:<form>` or `D:<n>:<q>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Descriptor {
    A { n: usize, q: u64 },
    B { n: usize, e2: u32, q: u64, form: FormKind },
    D { n: usize, q: u64 },
}

impl Descriptor {
    pub fn q(&self) -> u64 {
        match *self {
            Descriptor::A { q, .. } | Descriptor::B { q, .. } | Descriptor::D { q, .. } => q,
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            Descriptor::A { n, .. } | Descriptor::B { n, .. } | Descriptor::D { n, .. } => n,
        }
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Descriptor::A { n, q } => write!(f, "A:{n}:{q}"),
            Descriptor::B { n, e2, q, form } => write!(f, "B:{n}:{e2}:{q}:{}", form.tag()),
            Descriptor::D { n, q } => write!(f, "D:{n}:{q}"),
        }
    }
}

impl Serialize for Descriptor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for Descriptor {
    type Err = GeometryError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let fail = |reason: &str| GeometryError::Parse { input: input.to_string(), reason: reason.to_string() };
        let parts: Vec<&str> = input.trim().split(':').collect();
        let num = |s: &str, what: &str| -> Result<u64, GeometryError> {
            s.parse::<u64>().map_err(|_| fail(&format!("{what} must be a non-negative integer, got {s:?}")))
        };
        match parts.as_slice() {
            ["A", n, q] => Ok(Descriptor::A { n: num(n, "n")? as usize, q: num(q, "q")? }),
            ["D", n, q] => Ok(Descriptor::D { n: num(n, "n")? as usize, q: num(q, "q")? }),
            ["B", n, e2, q, form] => {
                let form = FormKind::from_tag(form)
                    .ok_or_else(|| fail("form must be one of sp, par, hyp, ell, herm"))?;
                Ok(Descriptor::B { n: num(n, "n")? as usize, e2: num(e2, "2e")? as u32, q: num(q, "q")?, form })
            }
            _ => Err(fail("expected A:<n>:<q>, B:<n>:<2e>:<q>:<form> or D:<n>:<q>")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    ProjectiveA,
    Polar,
    OriflammeD,
}

/// A concrete finite geometry with its field and form.
#[derive(Debug, Clone)]
pub struct GeometryInstance {
    pub descriptor: Descriptor,
    pub field: Field,
    pub kind: GeometryKind,
    /// Rank: projective rank for type A, polar rank otherwise.
    pub n: usize,
    /// Twice the parameter e (zero for types A and D).
    pub e2: u32,
    pub ambient_dim: usize,
    pub form: Option<FormSpec>,
    pub qorder: QOrder,
}

fn expected_e2(form: FormKind) -> &'static [u32] {
    match form {
        FormKind::Symplectic | FormKind::Parabolic => &[2],
        FormKind::Hyperbolic => &[0],
        FormKind::Elliptic => &[4],
        FormKind::Hermitian => &[1, 3],
    }
}

impl GeometryInstance {
    pub fn parse(descriptor: &str) -> Result<GeometryInstance, GeometryError> {
        Self::build(descriptor.parse()?)
    }

    pub fn build(descriptor: Descriptor) -> Result<GeometryInstance, GeometryError> {
        if let Descriptor::D { n, .. } = descriptor {
            if n < 4 {
                return Err(GeometryError::InadmissibleParameters(format!(
                    "oriflamme geometries need n >= 4, got {n}; use B:{n}:0:<q>:hyp for the hyperbolic quadric"
                )));
            }
        }
        Self::build_unrestricted(descriptor)
    }

    /// Like [`GeometryInstance::build`] but also accepts `D` with `n = 3`,
    /// which is only used to test the oriflamme opposition predicate.
    pub fn build_unrestricted(descriptor: Descriptor) -> Result<GeometryInstance, GeometryError> {
        let q = descriptor.q();
        let n = descriptor.n();
        if n == 0 {
            return Err(GeometryError::InadmissibleParameters("rank must be at least 1".into()));
        }
        let field = Field::with_order(q)?;
        let (kind, e2, ambient_dim, form) = match descriptor {
            Descriptor::A { n, .. } => (GeometryKind::ProjectiveA, 0, n + 1, None),
            Descriptor::D { n, .. } => {
                if n < 3 {
                    return Err(GeometryError::InadmissibleParameters("oriflamme rank must be at least 3".into()));
                }
                let form = FormSpec::standard(&field, FormKind::Hyperbolic, n)?;
                (GeometryKind::OriflammeD, 0, 2 * n, Some(form))
            }
            Descriptor::B { n, e2, form: kind, .. } => {
                if !expected_e2(kind).contains(&e2) {
                    return Err(GeometryError::InadmissibleParameters(format!(
                        "form {} requires 2e in {:?}, got {e2}",
                        kind.tag(),
                        expected_e2(kind)
                    )));
                }
                let form = if kind == FormKind::Hermitian {
                    if field.k() % 2 != 0 {
                        return Err(GeometryError::NonSquareFieldForHalfIntegerE(q));
                    }
                    FormSpec::hermitian(&field, if e2 == 1 { 2 * n } else { 2 * n + 1 })?
                } else {
                    FormSpec::standard(&field, kind, n)?
                };
                (GeometryKind::Polar, e2, form.dim, Some(form))
            }
        };
        let g = GeometryInstance { descriptor, qorder: QOrder::new(q), field, kind, n, e2, ambient_dim, form };
        if let Some(form) = &g.form {
            form.check_nondegenerate(&g.field)?;
            let found = g.greedy_generator().rank();
            if found != n {
                return Err(GeometryError::WittIndex { found, expected: n });
            }
        }
        Ok(g)
    }

    pub fn is_polar(&self) -> bool {
        self.form.is_some()
    }

    pub fn form(&self) -> Result<&FormSpec, GeometryError> {
        self.form.as_ref().ok_or(GeometryError::TypeAHasNoPerp)
    }

    /// `e` as used in closed forms: zero for types A and D.
    pub fn e2(&self) -> i64 {
        self.e2 as i64
    }

    /// Every nonzero vector of the ambient space with leading entry one, in
    /// lexicographic order of element indices.
    pub fn normalized_vectors(&self) -> impl Iterator<Item = Vec<Elem>> + '_ {
        let d = self.ambient_dim;
        let q = self.field.order() as u64;
        let total = q.pow(d as u32);
        (1..total).filter_map(move |mut t| {
            let mut v = vec![Elem::ZERO; d];
            for i in (0..d).rev() {
                v[i] = Elem((t % q) as u16);
                t /= q;
            }
            (v.iter().find(|e| !e.is_zero()) == Some(&Elem::ONE)).then_some(v)
        })
    }

    /// Points of the geometry (singular points for polar spaces), sorted.
    pub fn point_vectors(&self) -> Vec<Vec<Elem>> {
        match &self.form {
            None => self.normalized_vectors().collect(),
            Some(form) => self.normalized_vectors().filter(|v| form.is_singular(&self.field, v)).collect(),
        }
    }

    /// A maximal totally isotropic subspace found greedily: repeatedly add the
    /// first singular point of `M^perp` outside `M` until none is left.
    pub fn greedy_generator(&self) -> Subspace {
        let form = self.form.as_ref().expect("polar geometry");
        let f = &self.field;
        let mut m = Subspace::zero(self.ambient_dim);
        loop {
            let perp = form.perp(f, &m);
            let next = self
                .normalized_vectors()
                .find(|v| form.is_singular(f, v) && perp.contains_vector(f, v) && !m.contains_vector(f, v));
            match next {
                Some(v) => m = m.extend(f, &v),
                None => return m,
            }
        }
    }

    /// Human-readable name of the geometry.
    pub fn name(&self) -> String {
        let q = self.descriptor.q();
        let n = self.n;
        match self.descriptor {
            Descriptor::A { .. } => format!("PG({n},{q})"),
            Descriptor::D { .. } => format!("D_{n}({q}) on Q+({},{q})", 2 * n - 1),
            Descriptor::B { form, e2, .. } => match form {
                FormKind::Symplectic => format!("W({},{q})", 2 * n - 1),
                FormKind::Parabolic => format!("Q({},{q})", 2 * n),
                FormKind::Hyperbolic => format!("Q+({},{q})", 2 * n - 1),
                FormKind::Elliptic => format!("Q-({},{q})", 2 * n + 1),
                FormKind::Hermitian => {
                    let d = if e2 == 1 { 2 * n - 1 } else { 2 * n };
                    format!("H({d},{q})")
                }
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_round_trip() {
        for s in ["A:3:2", "B:2:2:2:sp", "B:2:1:4:herm", "D:4:2", "B:2:0:2:hyp"] {
            let d: Descriptor = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert!("C:2:2".parse::<Descriptor>().is_err());
        assert!("B:2:2:2:xx".parse::<Descriptor>().is_err());
        assert!("A:x:2".parse::<Descriptor>().is_err());
    }

    #[test]
    fn admissibility() {
        assert!(matches!(GeometryInstance::parse("B:2:2:2:hyp"), Err(GeometryError::InadmissibleParameters(_))));
        assert!(matches!(GeometryInstance::parse("B:2:1:2:herm"), Err(GeometryError::NonSquareFieldForHalfIntegerE(2))));
        assert!(matches!(GeometryInstance::parse("D:3:2"), Err(GeometryError::InadmissibleParameters(_))));
        assert!(matches!(GeometryInstance::parse("A:2:6"), Err(GeometryError::Field(FieldError::NotPrimePower(6)))));
        assert!(GeometryInstance::build_unrestricted(Descriptor::D { n: 3, q: 2 }).is_ok());
    }

    #[test]
    fn witt_index_matches_rank() {
        for s in ["B:2:2:2:sp", "B:2:4:2:ell", "B:2:1:4:herm", "B:2:3:4:herm", "B:3:0:2:hyp", "B:2:2:3:par"] {
            let g = GeometryInstance::parse(s).unwrap();
            let m = g.greedy_generator();
            assert_eq!(m.rank(), g.n, "{s}");
            assert!(g.form.as_ref().unwrap().is_totally_isotropic(&g.field, &m));
        }
    }

    #[test]
    fn ambient_dimensions() {
        let dims = [("A:3:2", 4), ("B:2:2:2:sp", 4), ("B:2:2:3:par", 5), ("B:2:0:2:hyp", 4), ("B:2:4:2:ell", 6)];
        for (s, d) in dims {
            assert_eq!(GeometryInstance::parse(s).unwrap().ambient_dim, d, "{s}");
        }
        assert_eq!(GeometryInstance::parse("B:2:1:4:herm").unwrap().ambient_dim, 4);
        assert_eq!(GeometryInstance::parse("B:2:3:4:herm").unwrap().ambient_dim, 5);
    }
}
