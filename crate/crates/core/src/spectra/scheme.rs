//! Intersection numbers `t^k_ij = |C_i^X ∩ C_j^Y|` and the association
//! scheme on points (equal/distinct in type A; equal/collinear/opposite in
//! type B).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::eigen::reflection_degree;
use super::quotient::{spread, QuotientMode};
use super::types::{num_types, type_profile};
use super::{rat_int, Result, SpectraError};
use crate::geometry::counts::Counts;
use crate::geometry::opposition::{point_relation, PointRelation};
use crate::geometry::{Enumeration, GeometryInstance, GeometryKind};
use crate::linalg::{rank_exact, rank_modular, certification_primes, ExactMatrix, DEFAULT_EXACT_BUDGET};
use crate::qpow::fmt_rational;

/// Relation index between two points: 0 equal, then distinct (type A) or
/// collinear, opposite (type B).
pub fn relation(g: &GeometryInstance, en: &Enumeration, x: u32, y: u32) -> Result<usize> {
    match g.kind {
        GeometryKind::ProjectiveA => Ok(usize::from(x != y)),
        GeometryKind::Polar => Ok(match point_relation(g, en, x, y)? {
            PointRelation::Equal => 0,
            PointRelation::Collinear => 1,
            PointRelation::Opposite => 2,
        }),
        GeometryKind::OriflammeD => Err(SpectraError::Unsupported("point scheme")),
    }
}

pub fn relation_names(g: &GeometryInstance) -> Vec<&'static str> {
    match g.kind {
        GeometryKind::ProjectiveA => vec!["equal", "distinct"],
        _ => vec!["equal", "collinear", "opposite"],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntersectionNumbers {
    pub relations: Vec<&'static str>,
    pub num_types: usize,
    /// `t[k][i][j]` for types `i + 1`, `j + 1`; `None` where the closed
    /// form does not apply.
    pub t: Vec<Vec<Vec<Option<i64>>>>,
    pub provenance: QuotientMode,
}

impl IntersectionNumbers {
    pub fn get(&self, i: usize, j: usize, k: usize) -> Option<i64> {
        self.t[k][i - 1][j - 1]
    }

    /// Rows `i` where every entry is known and `sum_j t(i, j, k)` differs
    /// from `sizes[i]`, for relations realized by some pair.
    pub fn row_sum_failures(&self, sizes: &[i64]) -> Vec<(usize, usize)> {
        let mut bad = Vec::new();
        for (k, table) in self.t.iter().enumerate() {
            for (i, row) in table.iter().enumerate() {
                if let Some(sum) = row.iter().copied().sum::<Option<i64>>() {
                    if sum != sizes[i] {
                        bad.push((i + 1, k));
                    }
                }
            }
        }
        bad
    }
}

pub fn intersection_numbers(g: &GeometryInstance, en: &Enumeration, mode: QuotientMode) -> Result<IntersectionNumbers> {
    match mode {
        QuotientMode::ClosedForm => closed_form_intersections(g),
        QuotientMode::Empirical => empirical_intersections(g, en, 3),
    }
}

pub fn closed_form_intersections(g: &GeometryInstance) -> Result<IntersectionNumbers> {
    let ell = num_types(g)?;
    let relations = relation_names(g);
    let counts = Counts::of(g);
    let q = g.qorder;
    let n = g.n as i64;
    let one = BigRational::one();
    let c1 = counts.c_rat(n - 1)?;
    let c2 = counts.c_rat(n - 2)?;
    let mut t = vec![vec![vec![None; ell]; ell]; relations.len()];
    for i in 1..=ell as i64 {
        for j in 1..=ell as i64 {
            let delta = if i == j { one.clone() } else { BigRational::zero() };
            let values: Option<Vec<BigRational>> = if g.kind == GeometryKind::ProjectiveA {
                Some(vec![&delta * &c1 * q.pow(i - 1), &c2 * q.pow(i - 2) * (q.pow(j - 1) - &delta)])
            } else if i <= n && j <= n {
                Some(vec![&delta * &c1 * q.pow(i - 1), &c2 * q.pow(i - 2) * (q.pow(j - 1) - &delta), BigRational::zero()])
            } else if i <= n || j <= n {
                // the lemma covers i <= n < j; the other order follows by symmetry
                let (a, b) = if i <= n { (i, j) } else { (j, i) };
                let s = a + b;
                let collinear = match s.cmp(&(2 * n + 1)) {
                    std::cmp::Ordering::Less => &c2 * counts.qe(s - 4, 1)?,
                    std::cmp::Ordering::Equal => BigRational::zero(),
                    std::cmp::Ordering::Greater => &c2 * counts.qe(s - 5, 1)?,
                };
                let opposite = match s.cmp(&(2 * n + 1)) {
                    std::cmp::Ordering::Less => BigRational::zero(),
                    std::cmp::Ordering::Equal => c1.clone(),
                    std::cmp::Ordering::Greater => &c1 * (q.q_rat() - &one) * q.pow(s - 2 * n - 2),
                };
                Some(vec![BigRational::zero(), collinear, opposite])
            } else {
                None
            };
            if let Some(values) = values {
                for (k, v) in values.iter().enumerate() {
                    t[k][i as usize - 1][j as usize - 1] = Some(rat_int(v, "intersection number")?);
                }
            }
        }
    }
    Ok(IntersectionNumbers { relations, num_types: ell, t, provenance: QuotientMode::ClosedForm })
}

/// Counts `|C_i^X ∩ C_j^Y|` for up to `pairs` representative pairs per
/// relation and requires them to agree.
pub fn empirical_intersections(g: &GeometryInstance, en: &Enumeration, pairs: usize) -> Result<IntersectionNumbers> {
    let ell = num_types(g)?;
    let relations = relation_names(g);
    let np = en.num_points() as u32;
    let mut t = Vec::with_capacity(relations.len());
    for k in 0..relations.len() {
        let mut reps = Vec::new();
        for x in spread(np as usize, pairs) {
            let x = x as u32;
            let partners: Vec<u32> =
                (0..np).filter(|&y| relation(g, en, x, y).map(|r| r == k).unwrap_or(false)).collect();
            if let Some(&y) = partners.get(partners.len() / 2) {
                reps.push((x, y));
            }
        }
        if reps.is_empty() {
            t.push(vec![vec![None; ell]; ell]);
            continue;
        }
        let tables: Vec<Vec<Vec<i64>>> = reps
            .par_iter()
            .map(|&(x, y)| {
                let px = type_profile(g, en, x)?;
                let py = type_profile(g, en, y)?;
                let mut table = vec![vec![0i64; ell]; ell];
                for (a, b) in px.types.iter().zip(&py.types) {
                    table[*a as usize - 1][*b as usize - 1] += 1;
                }
                Ok(table)
            })
            .collect::<Result<_>>()?;
        for (idx, table) in tables.iter().enumerate().skip(1) {
            if *table != tables[0] {
                return Err(SpectraError::RepresentativeDisagreement {
                    what: "intersection numbers".into(),
                    detail: format!("relation {} pair {:?} differs from {:?}", relations[k], reps[idx], reps[0]),
                });
            }
        }
        t.push(tables[0].iter().map(|r| r.iter().map(|&v| Some(v)).collect()).collect());
    }
    Ok(IntersectionNumbers { relations, num_types: ell, t, provenance: QuotientMode::Empirical })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointScheme {
    pub relations: Vec<&'static str>,
    pub num_points: usize,
    /// `p_matrix[r][k] = p_k(r)`: row `r` an idempotent, column `k` a relation.
    #[serde(serialize_with = "ser_rational_matrix")]
    pub p_matrix: Vec<Vec<BigRational>>,
    pub idempotent_ranks: Vec<usize>,
    pub idempotent_traces: Vec<String>,
    /// Index of the idempotent of the reflection module.
    pub special: usize,
    #[serde(serialize_with = "super::eigen::ser_big")]
    pub generic_degree: BigInt,
    pub relations_partition: bool,
    pub eigen_relations_hold: bool,
    /// Relation valencies counted from the classifier.
    pub valencies: Vec<usize>,
}

impl PointScheme {
    pub fn passed(&self) -> bool {
        self.relations_partition
            && self.eigen_relations_hold
            && BigInt::from(self.idempotent_ranks[self.special]) == self.generic_degree
            && self.idempotent_ranks[0] == 1
            && self.valencies.iter().zip(&self.p_matrix[0]).all(|(&v, p)| BigRational::from_integer(v.into()) == *p)
    }

    /// Entry of `E_r` on pairs in relation `k`.
    pub fn idempotent_entry(&self, r: usize, k: usize) -> Result<BigRational> {
        let inv = invert(&self.p_matrix).ok_or(SpectraError::Unsupported("singular P-matrix"))?;
        Ok(inv[k][r].clone())
    }

    /// `E_r` scaled to an integer matrix: the entry on pairs in relation
    /// `k`, and the scale factor.
    pub(crate) fn scaled_idempotent(&self, r: usize) -> Result<(Vec<i64>, BigInt)> {
        let inv = invert(&self.p_matrix).ok_or(SpectraError::Unsupported("singular P-matrix"))?;
        scaled_column(&inv, r)
    }
}

fn ser_rational_matrix<S: serde::Serializer>(m: &[Vec<BigRational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for row in m {
        seq.serialize_element(&row.iter().map(fmt_rational).collect::<Vec<_>>())?;
    }
    seq.end()
}

/// Closed-form P-matrix. Type A: `[[1, v(n) - 1], [1, -1]]`. Type B:
/// rows `(1, q v(n-1,e), q^(2n+e-2))`, `(1, q^(n-1) - 1, -q^(n-1))`,
/// `(1, -q^(n+e-2) - 1, q^(n+e-2))`.
pub fn p_matrix(g: &GeometryInstance) -> Result<Vec<Vec<BigRational>>> {
    let counts = Counts::of(g);
    let q = g.qorder;
    let n = g.n as i64;
    let one = BigRational::one();
    match g.kind {
        GeometryKind::ProjectiveA => {
            Ok(vec![vec![one.clone(), counts.v_rat(n)? - &one], vec![one.clone(), -one.clone()]])
        }
        GeometryKind::Polar => {
            let mut lower = counts;
            lower.n = n - 1;
            let a = q.pow(n - 1);
            let b = counts.qe(n - 2, 1)?;
            Ok(vec![
                vec![one.clone(), q.q_rat() * lower.v_rat(n - 1)?, counts.qe(2 * n - 2, 1)?],
                vec![one.clone(), &a - &one, -a.clone()],
                vec![one.clone(), -&b - &one, b],
            ])
        }
        GeometryKind::OriflammeD => Err(SpectraError::Unsupported("point scheme")),
    }
}

/// Inverse of a small square rational matrix by Gauss-Jordan elimination.
pub fn invert(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let k = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..k).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for col in 0..k {
        let piv = (col..k).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = BigRational::one() / &a[col][col];
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * k {
                    let v = &f * &a[col][c];
                    a[r][c] -= v;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[k..].to_vec()).collect())
}

/// Column `r` of `P^-1` scaled to integers; entry `k` is the value of the
/// scaled `E_r` on pairs in relation `k`.
fn scaled_column(inv: &[Vec<BigRational>], r: usize) -> Result<(Vec<i64>, BigInt)> {
    let scale = inv.iter().fold(BigInt::one(), |acc, row| acc.lcm(row[r].denom()));
    let entries = inv
        .iter()
        .map(|row| rat_int(&(&row[r] * BigRational::from_integer(scale.clone())), "idempotent entry"))
        .collect::<Result<Vec<_>>>()?;
    Ok((entries, scale))
}

pub fn point_scheme(g: &GeometryInstance, en: &Enumeration) -> Result<PointScheme> {
    let p = p_matrix(g)?;
    let relations = relation_names(g);
    let d = relations.len();
    let np = en.num_points();
    let rel: Vec<Vec<u8>> = (0..np as u32)
        .into_par_iter()
        .map(|x| (0..np as u32).map(|y| relation(g, en, x, y).map(|r| r as u8)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let relations_partition = (0..np).all(|x| (0..np).all(|y| (rel[x][y] == 0) == (x == y)));
    let valencies: Vec<usize> = (0..d).map(|k| rel[0].iter().filter(|&&r| r as usize == k).count()).collect();

    let inv = invert(&p).ok_or(SpectraError::Unsupported("singular P-matrix"))?;
    let mut eigen_relations_hold = true;
    let mut ranks = Vec::with_capacity(d);
    let mut traces = Vec::with_capacity(d);
    for r in 0..d {
        let (vals, _) = scaled_column(&inv, r)?;
        let e: Vec<i64> = rel.iter().flat_map(|row| row.iter().map(|&k| vals[k as usize])).collect();
        // A_k E_r = p_k(r) E_r, on the integer scaling of E_r
        for (k, pk) in p[r].iter().enumerate() {
            let ok = (0..np).into_par_iter().all(|x| {
                (0..np).all(|y| {
                    let lhs: i64 = (0..np).filter(|&z| rel[x][z] as usize == k).map(|z| e[z * np + y]).sum();
                    BigRational::from_integer(lhs.into()) == pk * BigRational::from_integer(e[x * np + y].into())
                })
            });
            eigen_relations_hold &= ok;
        }
        let matrix = ExactMatrix::from_integers(np, np, &e)?;
        let rank = if np * np <= DEFAULT_EXACT_BUDGET {
            rank_exact(&matrix)?
        } else {
            let bound = vals.iter().map(|v| v.unsigned_abs()).max().unwrap_or(1) * 2 * np as u64;
            let modular = rank_modular(&matrix, &certification_primes(2), bound)?;
            if modular.per_prime.iter().any(|&(_, k)| k != modular.rank) {
                return Err(crate::linalg::LinalgError::PrimeDisagreement { values: modular.per_prime }.into());
            }
            modular.rank
        };
        ranks.push(rank);
        // trace of E_r = |X| (P^-1)[0][r]
        traces.push(fmt_rational(&(BigRational::from_integer((np as i64).into()) * &inv[0][r])));
    }
    Ok(PointScheme {
        relations,
        num_points: np,
        p_matrix: p,
        idempotent_ranks: ranks,
        idempotent_traces: traces,
        special: 1,
        generic_degree: reflection_degree(g)?,
        relations_partition,
        eigen_relations_hold,
        valencies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(s: &str) -> (GeometryInstance, Enumeration) {
        let g = GeometryInstance::parse(s).unwrap();
        let en = Enumeration::build(&g).unwrap();
        (g, en)
    }

    fn ints(m: &[Vec<BigRational>]) -> Vec<Vec<String>> {
        m.iter().map(|r| r.iter().map(fmt_rational).collect()).collect()
    }

    #[test]
    fn p_matrix_examples() {
        let a = GeometryInstance::parse("A:3:2").unwrap();
        assert_eq!(ints(&p_matrix(&a).unwrap()), vec![vec!["1", "14"], vec!["1", "-1"]]);
        let w = GeometryInstance::parse("B:2:2:2:sp").unwrap();
        assert_eq!(ints(&p_matrix(&w).unwrap()), vec![vec!["1", "6", "8"], vec!["1", "1", "-2"], vec!["1", "-3", "2"]]);
    }

    #[test]
    fn scheme_ranks() {
        let (a, en) = setup("A:3:2");
        let s = point_scheme(&a, &en).unwrap();
        assert_eq!(s.idempotent_ranks, vec![1, 14]);
        assert!(s.passed());
        let (w, en) = setup("B:2:2:2:sp");
        let s = point_scheme(&w, &en).unwrap();
        assert_eq!(s.idempotent_ranks, vec![1, 9, 5]);
        assert_eq!(s.idempotent_traces, vec!["1", "9", "5"]);
        assert!(s.passed());
    }

    #[test]
    fn inverse_round_trip() {
        let w = GeometryInstance::parse("B:2:4:2:ell").unwrap();
        let p = p_matrix(&w).unwrap();
        let inv = invert(&p).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v: BigRational = (0..3).map(|k| &p[i][k] * &inv[k][j]).sum();
                assert_eq!(v, if i == j { BigRational::one() } else { BigRational::zero() });
            }
        }
    }

    #[test]
    fn intersection_examples() {
        let (a, en) = setup("A:3:2");
        let closed = closed_form_intersections(&a).unwrap();
        assert_eq!(closed.get(1, 1, 1), Some(0));
        assert_eq!(closed.get(2, 3, 1), Some(12));
        let emp = empirical_intersections(&a, &en, 3).unwrap();
        assert_eq!(emp.t, closed.t);
        let (w, en) = setup("B:2:2:2:sp");
        let closed = closed_form_intersections(&w).unwrap();
        assert_eq!(closed.get(1, 4, 2), Some(3));
        let emp = empirical_intersections(&w, &en, 3).unwrap();
        for k in 0..3 {
            for i in 1..=4 {
                for j in 1..=4 {
                    if let Some(v) = closed.get(i, j, k) {
                        assert_eq!(emp.get(i, j, k), Some(v), "t({i},{j},{k})");
                    }
                }
            }
        }
    }
}
