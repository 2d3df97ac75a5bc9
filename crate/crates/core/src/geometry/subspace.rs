//! Subspaces of `GF(q)^d` in canonical reduced row-echelon form.

use crate::field::{Elem, Field};

/// Row-reduces `rows` (row-major, `ncols` wide) in place and returns the
/// pivot columns. Zero rows are dropped from the returned buffer.
pub fn rref(f: &Field, rows: &mut Vec<Elem>, ncols: usize) -> Vec<usize> {
    let nrows = if ncols == 0 { 0 } else { rows.len() / ncols };
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !rows[i * ncols + col].is_zero()) else {
            continue;
        };
        if p != r {
            for c in 0..ncols {
                rows.swap(p * ncols + c, r * ncols + c);
            }
        }
        let inv = f.inv(rows[r * ncols + col]).expect("pivot is nonzero");
        for c in col..ncols {
            rows[r * ncols + c] = f.mul(rows[r * ncols + c], inv);
        }
        for i in 0..nrows {
            if i == r {
                continue;
            }
            let factor = rows[i * ncols + col];
            if factor.is_zero() {
                continue;
            }
            let neg = f.neg(factor);
            for c in col..ncols {
                let v = f.mul(neg, rows[r * ncols + c]);
                rows[i * ncols + c] = f.add(rows[i * ncols + c], v);
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r * ncols);
    pivots
}

/// Dot product `sum x_i y_i`.
#[inline]
pub fn dot(f: &Field, x: &[Elem], y: &[Elem]) -> Elem {
    x.iter().zip(y).fold(Elem::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
}

/// A subspace, stored as its reduced row-echelon basis. Two subspaces are
/// equal exactly when their representations are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    rank: usize,
    dim: usize,
    basis: Vec<Elem>,
}

impl Subspace {
    pub fn zero(dim: usize) -> Subspace {
        Subspace { rank: 0, dim, basis: Vec::new() }
    }

    pub fn whole(dim: usize) -> Subspace {
        let mut basis = vec![Elem::ZERO; dim * dim];
        for i in 0..dim {
            basis[i * dim + i] = Elem::ONE;
        }
        Subspace { rank: dim, dim, basis }
    }

    /// Span of the given row vectors.
    pub fn span<'a>(f: &Field, dim: usize, vectors: impl IntoIterator<Item = &'a [Elem]>) -> Subspace {
        let mut rows = Vec::new();
        for v in vectors {
            assert_eq!(v.len(), dim, "vector length must match the ambient dimension");
            rows.extend_from_slice(v);
        }
        let pivots = rref(f, &mut rows, dim);
        Subspace { rank: pivots.len(), dim, basis: rows }
    }

    /// Already-reduced data, as produced by [`rref`]; checked in debug builds.
    pub(crate) fn from_rref(dim: usize, basis: Vec<Elem>) -> Subspace {
        let rank = if dim == 0 { 0 } else { basis.len() / dim };
        Subspace { rank, dim, basis }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Elem] {
        &self.basis
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.basis[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Elem]> {
        self.basis.chunks(self.dim.max(1)).take(self.rank)
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows().map(|r| r.iter().position(|e| !e.is_zero()).expect("nonzero row")).collect()
    }

    /// Membership test by reduction against the echelon basis.
    pub fn contains_vector(&self, f: &Field, v: &[Elem]) -> bool {
        let mut w = v.to_vec();
        for row in self.rows() {
            let pivot = row.iter().position(|e| !e.is_zero()).expect("nonzero row");
            let c = w[pivot];
            if c.is_zero() {
                continue;
            }
            let neg = f.neg(c);
            for (x, &r) in w.iter_mut().zip(row) {
                *x = f.add(*x, f.mul(neg, r));
            }
        }
        w.iter().all(|e| e.is_zero())
    }

    pub fn contains(&self, f: &Field, other: &Subspace) -> bool {
        other.rank <= self.rank && other.rows().all(|r| self.contains_vector(f, r))
    }

    pub fn join(&self, f: &Field, other: &Subspace) -> Subspace {
        Subspace::span(f, self.dim, self.rows().chain(other.rows()))
    }

    pub fn extend(&self, f: &Field, v: &[Elem]) -> Subspace {
        Subspace::span(f, self.dim, self.rows().chain(std::iter::once(v)))
    }

    /// Rank of the intersection, via `dim(U ∩ V) = dim U + dim V - dim(U + V)`.
    pub fn meet_rank(&self, f: &Field, other: &Subspace) -> usize {
        self.rank + other.rank - self.join(f, other).rank
    }

    /// `{x : b . x = 0 for every basis row b}`, the annihilator under the
    /// standard dot product.
    pub fn annihilator(&self, f: &Field) -> Subspace {
        let pivots = self.pivots();
        let mut out = Vec::new();
        for free in (0..self.dim).filter(|c| !pivots.contains(c)) {
            let mut v = vec![Elem::ZERO; self.dim];
            v[free] = Elem::ONE;
            for (row, &p) in self.rows().zip(&pivots) {
                v[p] = f.neg(row[free]);
            }
            out.extend(v);
        }
        Subspace::span(f, self.dim, out.chunks(self.dim.max(1)))
    }

    /// Flattened basis as `u16` indices, the canonical sort key.
    pub fn key(&self) -> Vec<u16> {
        self.basis.iter().map(|e| e.0).collect()
    }
}

/// Normalizes a nonzero vector so its first nonzero entry is one.
pub fn normalize(f: &Field, v: &mut [Elem]) {
    if let Some(&lead) = v.iter().find(|e| !e.is_zero()) {
        let inv = f.inv(lead).expect("nonzero lead");
        for x in v.iter_mut() {
            *x = f.mul(*x, inv);
        }
    }
}

/// Determinant of a square matrix over the field.
pub fn det(f: &Field, m: &mut [Elem], k: usize) -> Elem {
    let mut d = Elem::ONE;
    for col in 0..k {
        let Some(p) = (col..k).find(|&i| !m[i * k + col].is_zero()) else {
            return Elem::ZERO;
        };
        if p != col {
            for c in 0..k {
                m.swap(p * k + c, col * k + c);
            }
            d = f.neg(d);
        }
        let piv = m[col * k + col];
        d = f.mul(d, piv);
        let inv = f.inv(piv).expect("pivot is nonzero");
        for i in col + 1..k {
            let factor = f.mul(m[i * k + col], inv);
            if factor.is_zero() {
                continue;
            }
            let neg = f.neg(factor);
            for c in col..k {
                let v = f.mul(neg, m[col * k + c]);
                m[i * k + c] = f.add(m[i * k + c], v);
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(q: u64) -> Field {
        Field::with_order(q).unwrap()
    }

    #[test]
    fn span_and_membership() {
        let f = gf(3);
        let e = |v: &[u16]| v.iter().map(|&x| Elem(x)).collect::<Vec<_>>();
        let u = Subspace::span(&f, 3, [e(&[1, 2, 0]).as_slice(), e(&[2, 1, 0]).as_slice()]);
        assert_eq!(u.rank(), 1);
        assert!(u.contains_vector(&f, &e(&[2, 1, 0])));
        assert!(!u.contains_vector(&f, &e(&[0, 0, 1])));
        let ann = u.annihilator(&f);
        assert_eq!(ann.rank(), 2);
        for r in ann.rows() {
            assert_eq!(dot(&f, r, u.row(0)), Elem::ZERO);
        }
    }

    #[test]
    fn determinant_small() {
        let f = gf(5);
        let mut m = vec![Elem(1), Elem(2), Elem(3), Elem(4)];
        // 1*4 - 2*3 = -2 = 3 mod 5
        assert_eq!(det(&f, &mut m, 2), Elem(3));
    }

    /// Row i becomes row_i + sum_{j>i} c_ij row_j, which preserves the span.
    fn mix(f: &Field, rows: &[Vec<Elem>], coeffs: &[u16]) -> Vec<Vec<Elem>> {
        let k = rows.len();
        (0..k)
            .map(|i| {
                let mut out = rows[i].clone();
                for j in i + 1..k {
                    let c = Elem(coeffs[i * k + j] % f.order() as u16);
                    for (o, &x) in out.iter_mut().zip(&rows[j]) {
                        *o = f.add(*o, f.mul(c, x));
                    }
                }
                out
            })
            .collect()
    }

    proptest! {
        #[test]
        fn canonical_form_is_unique(q in prop::sample::select(vec![2u64, 3, 4, 5, 9]),
                                    raw in prop::collection::vec(0u16..1000, 12),
                                    coeffs in prop::collection::vec(0u16..1000, 9)) {
            let f = gf(q);
            let rows: Vec<Vec<Elem>> = raw.chunks(4).map(|c| c.iter().map(|&x| Elem(x % q as u16)).collect()).collect();
            let u = Subspace::span(&f, 4, rows.iter().map(|r| r.as_slice()));
            // upper unitriangular mixing preserves the row space
            let mixed = mix(&f, &rows, &coeffs);
            let v = Subspace::span(&f, 4, mixed.iter().map(|r| r.as_slice()));
            prop_assert_eq!(&u, &v);
            prop_assert!(u.contains(&f, &v) && v.contains(&f, &u));
            let ann = u.annihilator(&f);
            prop_assert_eq!(ann.rank() + u.rank(), 4);
            prop_assert_eq!(ann.annihilator(&f), u);
        }
    }
}
