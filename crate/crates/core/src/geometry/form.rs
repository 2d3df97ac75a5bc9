//! Standard reflexive and quadratic forms for the classical polar spaces.

use serde::Serialize;

use super::subspace::{dot, Subspace};
use super::GeometryError;
use crate::field::{Elem, Field};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    Symplectic,
    Parabolic,
    Hyperbolic,
    Elliptic,
    Hermitian,
}

impl FormKind {
    pub fn tag(self) -> &'static str {
        match self {
            FormKind::Symplectic => "sp",
            FormKind::Parabolic => "par",
            FormKind::Hyperbolic => "hyp",
            FormKind::Elliptic => "ell",
            FormKind::Hermitian => "herm",
        }
    }

    pub fn from_tag(tag: &str) -> Option<FormKind> {
        Some(match tag {
            "sp" => FormKind::Symplectic,
            "par" => FormKind::Parabolic,
            "hyp" => FormKind::Hyperbolic,
            "ell" => FormKind::Elliptic,
            "herm" => FormKind::Hermitian,
            _ => return None,
        })
    }

    pub fn is_quadratic(self) -> bool {
        matches!(self, FormKind::Parabolic | FormKind::Hyperbolic | FormKind::Elliptic)
    }
}

/// Gram matrix of the reflexive form plus, for quadratic kinds, the diagonal
/// coefficients of the quadratic form itself.
///
/// For quadratic kinds the Gram matrix is the polarization
/// `B(x, y) = Q(x + y) - Q(x) - Q(y)`, so `gram[i][i] = 2 * quad_diag[i]`
/// and `Q(x) = sum a_ii x_i^2 + sum_{i<j} G_ij x_i x_j` holds in every
/// characteristic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormSpec {
    pub kind: FormKind,
    pub dim: usize,
    pub gram: Vec<Elem>,
    pub quad_diag: Option<Vec<Elem>>,
}

/// Smallest `mu` (by index) with `t^2 + t + mu` irreducible over the field.
fn elliptic_mu(f: &Field) -> Elem {
    f.elements()
        .find(|&mu| f.elements().all(|t| !f.add(f.add(f.mul(t, t), t), mu).is_zero()))
        .expect("an irreducible quadratic exists over every finite field")
}

impl FormSpec {
    /// Standard form of the given kind and rank.
    pub fn standard(f: &Field, kind: FormKind, n: usize) -> Result<FormSpec, GeometryError> {
        let dim = match kind {
            FormKind::Symplectic | FormKind::Hyperbolic => 2 * n,
            FormKind::Parabolic => 2 * n + 1,
            FormKind::Elliptic => 2 * n + 2,
            FormKind::Hermitian => unreachable!("hermitian dimension depends on e"),
        };
        Self::standard_dim(f, kind, n, dim)
    }

    pub fn hermitian(f: &Field, dim: usize) -> Result<FormSpec, GeometryError> {
        if !f.k().is_multiple_of(2) {
            return Err(GeometryError::NonSquareFieldForHalfIntegerE(f.order() as u64));
        }
        let mut gram = vec![Elem::ZERO; dim * dim];
        for i in 0..dim {
            gram[i * dim + i] = Elem::ONE;
        }
        Ok(FormSpec { kind: FormKind::Hermitian, dim, gram, quad_diag: None })
    }

    fn standard_dim(f: &Field, kind: FormKind, n: usize, dim: usize) -> Result<FormSpec, GeometryError> {
        let mut gram = vec![Elem::ZERO; dim * dim];
        let mut diag = vec![Elem::ZERO; dim];
        let one = Elem::ONE;
        for i in 0..n {
            let (a, b) = (2 * i, 2 * i + 1);
            gram[a * dim + b] = one;
            gram[b * dim + a] = if kind == FormKind::Symplectic { f.neg(one) } else { one };
        }
        match kind {
            FormKind::Symplectic | FormKind::Hyperbolic => {}
            FormKind::Parabolic => {
                if f.p() == 2 {
                    return Err(GeometryError::InadmissibleParameters(
                        "parabolic quadrics need odd q here; in even characteristic use the isomorphic symplectic space (sp)"
                            .into(),
                    ));
                }
                let last = 2 * n;
                diag[last] = one;
                gram[last * dim + last] = f.add(one, one);
            }
            FormKind::Elliptic => {
                let (a, b) = (2 * n, 2 * n + 1);
                let mu = elliptic_mu(f);
                diag[a] = one;
                diag[b] = mu;
                gram[a * dim + b] = one;
                gram[b * dim + a] = one;
                gram[a * dim + a] = f.add(one, one);
                gram[b * dim + b] = f.add(mu, mu);
            }
            FormKind::Hermitian => unreachable!(),
        }
        let quad_diag = kind.is_quadratic().then_some(diag);
        Ok(FormSpec { kind, dim, gram, quad_diag })
    }

    #[inline]
    fn sigma(&self, f: &Field, x: Elem) -> Elem {
        if self.kind == FormKind::Hermitian {
            f.conj_unchecked(x)
        } else {
            x
        }
    }

    /// The functional `x -> B(x, u)`, as a coefficient vector.
    pub fn functional(&self, f: &Field, u: &[Elem]) -> Vec<Elem> {
        let su: Vec<Elem> = u.iter().map(|&x| self.sigma(f, x)).collect();
        (0..self.dim).map(|i| dot(f, &self.gram[i * self.dim..(i + 1) * self.dim], &su)).collect()
    }

    pub fn bilinear(&self, f: &Field, x: &[Elem], y: &[Elem]) -> Elem {
        dot(f, x, &self.functional(f, y))
    }

    /// `Q(x)` for quadratic kinds.
    pub fn quadratic(&self, f: &Field, x: &[Elem]) -> Option<Elem> {
        let diag = self.quad_diag.as_ref()?;
        let mut acc = Elem::ZERO;
        for i in 0..self.dim {
            if x[i].is_zero() {
                continue;
            }
            acc = f.add(acc, f.mul(diag[i], f.mul(x[i], x[i])));
            for j in i + 1..self.dim {
                let g = self.gram[i * self.dim + j];
                if !g.is_zero() {
                    acc = f.add(acc, f.mul(g, f.mul(x[i], x[j])));
                }
            }
        }
        Some(acc)
    }

    /// Singular (isotropic) vectors are the points of the polar space.
    pub fn is_singular(&self, f: &Field, x: &[Elem]) -> bool {
        match self.kind {
            FormKind::Symplectic => true,
            FormKind::Hermitian => self.bilinear(f, x, x).is_zero(),
            _ => self.quadratic(f, x).expect("quadratic kind").is_zero(),
        }
    }

    /// `U^perp` as a subspace of the ambient space.
    pub fn perp(&self, f: &Field, u: &Subspace) -> Subspace {
        let rows: Vec<Vec<Elem>> = u.rows().map(|r| self.functional(f, r)).collect();
        Subspace::span(f, self.dim, rows.iter().map(|r| r.as_slice())).annihilator(f)
    }

    pub fn is_totally_isotropic(&self, f: &Field, u: &Subspace) -> bool {
        let rows: Vec<&[Elem]> = u.rows().collect();
        rows.iter().all(|r| self.is_singular(f, r))
            && rows.iter().enumerate().all(|(i, a)| rows[i + 1..].iter().all(|b| self.bilinear(f, a, b).is_zero()))
    }

    /// Radical of the reflexive form.
    pub fn radical(&self, f: &Field) -> Subspace {
        self.perp(f, &Subspace::whole(self.dim))
    }

    /// The radical must contain no singular nonzero vector.
    pub fn check_nondegenerate(&self, f: &Field) -> Result<(), GeometryError> {
        let rad = self.radical(f);
        if rad.rank() == 0 {
            return Ok(());
        }
        let singular_in_radical = match self.kind {
            FormKind::Symplectic | FormKind::Hermitian => true,
            // a quadratic form restricted to its radical is semilinear, so one
            // singular basis vector already certifies degeneracy at rank one
            _ => rad.rows().any(|r| self.is_singular(f, r)) || rad.rank() > 1,
        };
        if singular_in_radical {
            Err(GeometryError::InadmissibleParameters(format!("{:?} form is degenerate", self.kind)))
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elliptic_mu_is_irreducible_choice() {
        assert_eq!(elliptic_mu(&Field::with_order(2).unwrap()), Elem(1));
        // over GF(3), t^2 + t + 2 has no roots while t^2 + t + 1 = (t - 1)^2
        assert_eq!(elliptic_mu(&Field::with_order(3).unwrap()), Elem(2));
    }

    #[test]
    fn polarization_matches_quadratic_form() {
        for q in [2u64, 3, 4] {
            let f = Field::with_order(q).unwrap();
            let form = FormSpec::standard(&f, FormKind::Elliptic, 1).unwrap();
            let vecs: Vec<Vec<Elem>> = (0..q.pow(4))
                .map(|mut t| {
                    (0..4)
                        .map(|_| {
                            let e = Elem((t % q) as u16);
                            t /= q;
                            e
                        })
                        .collect()
                })
                .collect();
            for x in vecs.iter().step_by(3) {
                for y in vecs.iter().step_by(5) {
                    let s: Vec<Elem> = x.iter().zip(y).map(|(&a, &b)| f.add(a, b)).collect();
                    let lhs = form.quadratic(&f, &s).unwrap();
                    let rhs = f.add(
                        f.add(form.quadratic(&f, x).unwrap(), form.quadratic(&f, y).unwrap()),
                        form.bilinear(&f, x, y),
                    );
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn even_parabolic_is_rejected() {
        let f = Field::with_order(2).unwrap();
        assert!(matches!(
            FormSpec::standard(&f, FormKind::Parabolic, 2),
            Err(GeometryError::InadmissibleParameters(_))
        ));
    }

    #[test]
    fn standard_forms_are_nondegenerate() {
        for q in [2u64, 3, 4, 5] {
            let f = Field::with_order(q).unwrap();
            for kind in [FormKind::Symplectic, FormKind::Hyperbolic, FormKind::Elliptic] {
                FormSpec::standard(&f, kind, 2).unwrap().check_nondegenerate(&f).unwrap();
            }
            if q % 2 == 1 {
                FormSpec::standard(&f, FormKind::Parabolic, 2).unwrap().check_nondegenerate(&f).unwrap();
            }
        }
        let f4 = Field::with_order(4).unwrap();
        FormSpec::hermitian(&f4, 5).unwrap().check_nondegenerate(&f4).unwrap();
    }
}
