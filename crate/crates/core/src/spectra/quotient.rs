//! Quotient matrices of the opposition graph for the partition of flags
//! by type relative to a base point.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::types::{num_types, type_profile};
use super::{polar_params, rat_int, Result, SpectraError};
use crate::geometry::opposition::Opposition;
use crate::geometry::{Enumeration, GeometryInstance, GeometryKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuotientMode {
    Empirical,
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientMatrixExact {
    /// `entries[i][j]` counts flags of type `j + 1` opposite a fixed flag
    /// of type `i + 1`.
    pub entries: Vec<Vec<i64>>,
    pub provenance: QuotientMode,
    /// Base points and representatives per type used in empirical mode.
    pub base_points: Vec<u32>,
    pub representatives_per_type: usize,
}

impl QuotientMatrixExact {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn row_sums(&self) -> Vec<i64> {
        self.entries.iter().map(|r| r.iter().sum()).collect()
    }

    /// `|C_i| Q_ij == |C_j| Q_ji` for all `i, j`.
    pub fn double_counting_holds(&self, sizes: &[i64]) -> bool {
        let l = self.size();
        (0..l).all(|i| (0..l).all(|j| sizes[i] as i128 * self.entries[i][j] as i128 == sizes[j] as i128 * self.entries[j][i] as i128))
    }

    /// `Q v` over the integers.
    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.entries.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }
}

pub fn quotient_matrix(g: &GeometryInstance, en: &Enumeration, mode: QuotientMode) -> Result<QuotientMatrixExact> {
    match mode {
        QuotientMode::ClosedForm => closed_form_quotient(g),
        QuotientMode::Empirical => empirical_quotient(g, en, 3, 3),
    }
}

/// Closed-form quotient matrix.
///
/// Type A: `Q_ij = 0` if `i + j < n + 2`, else
/// `(q - 1 + [i+j = n+2]) q^((n^2-n)/2 + j - 2)`.
///
/// Type B, with `s = q^(n(n+e-3)-e)`: `Q_ij = 0` if `i + j < 2n + 1`;
/// `(q - 1 + [i+j = 2n+1]) s q^j` for `j <= n`; and
/// `(q - 1 + [i+j = 2n+1]) s q^(j+e-1) + [i = j] s q^n (q^e - q)` for `j > n`.
pub fn closed_form_quotient(g: &GeometryInstance) -> Result<QuotientMatrixExact> {
    let ell = num_types(g)?;
    let n = g.n as i64;
    let qo = g.qorder;
    let q = qo.q_rat();
    let one = BigRational::one();
    let mut entries = vec![vec![0i64; ell]; ell];
    for i in 1..=ell as i64 {
        for j in 1..=ell as i64 {
            let value = if g.kind == GeometryKind::ProjectiveA {
                if i + j < n + 2 {
                    BigRational::zero()
                } else {
                    let delta = if i + j == n + 2 { one.clone() } else { BigRational::zero() };
                    (&q - &one + delta) * qo.pow((n * n - n) / 2 + j - 2)
                }
            } else {
                let (_, e2) = polar_params(g);
                if i + j < 2 * n + 1 {
                    BigRational::zero()
                } else {
                    // s = q^(n(n-3) + (n-1)e), in half units 2n(n-3) + (n-1)e2
                    let s = qo.pow_half(2 * n * (n - 3) + (n - 1) * e2)?;
                    let delta = if i + j == 2 * n + 1 { one.clone() } else { BigRational::zero() };
                    if j <= n {
                        (&q - &one + delta) * &s * qo.pow(j)
                    } else {
                        let mut v = (&q - &one + delta) * &s * qo.pow_half(2 * (j - 1) + e2)?;
                        if i == j {
                            v += &s * qo.pow(n) * (qo.pow_half(e2)? - &q);
                        }
                        v
                    }
                }
            };
            entries[i as usize - 1][j as usize - 1] = rat_int(&value, "quotient entry")?;
        }
    }
    Ok(QuotientMatrixExact { entries, provenance: QuotientMode::ClosedForm, base_points: Vec::new(), representatives_per_type: 0 })
}

/// Deterministic spread of up to `k` distinct indices in `0..len`.
pub fn spread(len: usize, k: usize) -> Vec<usize> {
    if len <= k {
        return (0..len).collect();
    }
    let mut out: Vec<usize> = (0..k).map(|t| t * (len - 1) / (k - 1).max(1)).collect();
    out.dedup();
    out
}

/// Empirical quotient matrix: for each of `points` base points and each
/// type, counts the opposite flags by type for `reps` representatives and
/// requires all of them to agree.
pub fn empirical_quotient(g: &GeometryInstance, en: &Enumeration, points: usize, reps: usize) -> Result<QuotientMatrixExact> {
    let ell = num_types(g)?;
    let opp = Opposition::new(g, en);
    let base_points: Vec<u32> = spread(en.num_points(), points).into_iter().map(|x| x as u32).collect();
    let mut reference: Option<Vec<Vec<i64>>> = None;
    for &x in &base_points {
        let profile = type_profile(g, en, x)?;
        let mut tasks = Vec::new();
        for i in 1..=ell {
            let class = profile.class(i);
            if class.is_empty() {
                return Err(SpectraError::RepresentativeDisagreement {
                    what: "quotient matrix".into(),
                    detail: format!("type {i} is empty for base point {x}"),
                });
            }
            for t in spread(class.len(), reps) {
                tasks.push((i, class[t]));
            }
        }
        let rows: Vec<(usize, usize, Vec<i64>)> = tasks
            .par_iter()
            .map(|&(i, c)| {
                let mut row = vec![0i64; ell];
                for d in opp.neighbors(c) {
                    row[profile.types[d as usize] as usize - 1] += 1;
                }
                (i, c, row)
            })
            .collect();
        let mut matrix: Vec<Option<Vec<i64>>> = vec![None; ell];
        for (i, c, row) in rows {
            match &matrix[i - 1] {
                None => matrix[i - 1] = Some(row),
                Some(prev) if *prev != row => {
                    return Err(SpectraError::RepresentativeDisagreement {
                        what: "quotient matrix".into(),
                        detail: format!("base point {x}, type {i}: flag {c} gives {row:?}, earlier {prev:?}"),
                    })
                }
                Some(_) => {}
            }
        }
        let matrix: Vec<Vec<i64>> = matrix.into_iter().map(|r| r.expect("every type has a representative")).collect();
        match &reference {
            None => reference = Some(matrix),
            Some(prev) if *prev != matrix => {
                return Err(SpectraError::RepresentativeDisagreement {
                    what: "quotient matrix".into(),
                    detail: format!("base point {x} differs from base point {}", base_points[0]),
                })
            }
            Some(_) => {}
        }
    }
    Ok(QuotientMatrixExact {
        entries: reference.expect("at least one base point"),
        provenance: QuotientMode::Empirical,
        base_points,
        representatives_per_type: reps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        let a = GeometryInstance::parse("A:3:2").unwrap();
        let q = closed_form_quotient(&a).unwrap();
        assert_eq!(q.entries, vec![vec![0, 0, 0, 64], vec![0, 0, 32, 32], vec![0, 16, 16, 32], vec![8, 8, 16, 32]]);
        let w = GeometryInstance::parse("B:2:2:2:sp").unwrap();
        let q = closed_form_quotient(&w).unwrap();
        assert_eq!(q.entries, vec![vec![0, 0, 0, 16], vec![0, 0, 8, 8], vec![0, 4, 4, 8], vec![2, 2, 4, 8]]);
    }

    #[test]
    fn spread_is_distinct_and_in_range() {
        assert_eq!(spread(2, 3), vec![0, 1]);
        assert_eq!(spread(10, 3), vec![0, 4, 9]);
        assert_eq!(spread(3, 3), vec![0, 1, 2]);
    }

    #[test]
    fn empirical_matches_closed_form_on_small_cases() {
        for s in ["A:3:2", "A:2:3", "B:2:2:2:sp", "B:2:0:2:hyp"] {
            let g = GeometryInstance::parse(s).unwrap();
            let en = Enumeration::build(&g).unwrap();
            let emp = quotient_matrix(&g, &en, QuotientMode::Empirical).unwrap();
            let closed = quotient_matrix(&g, &en, QuotientMode::ClosedForm).unwrap();
            assert_eq!(emp.entries, closed.entries, "{s}");
        }
    }
}
