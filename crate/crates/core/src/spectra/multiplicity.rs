//! Multiplicity of the smallest eigenvalue: closed forms per module, the
//! tabulated per-group formulas, the empirical nullity, and the rank of the
//! span of the lifted families.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use super::eigen::{coefficients, lambda_min, reflection_degree, ser_big, LambdaMin};
use super::types::Membership;
use super::{family_count, polar_params, Result, SpectraError};
use crate::geometry::form::FormKind;
use crate::geometry::opposition::Opposition;
use crate::geometry::{Descriptor, Enumeration, GeometryInstance, GeometryKind};
use crate::linalg::{
    certification_primes, nullity_for_eigenvalue, nullity_of_integer_matrix, rank_exact, ExactMatrix, LinalgError,
    ModularBasis, NullityReport, DEFAULT_DENSE_LIMIT, DEFAULT_EXACT_BUDGET,
};
use crate::qpow::{to_integer, QOrder};

/// Cap on `flags * columns` for the spanning-rank computation.
pub const SPANNING_BUDGET: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplicityMode {
    ClosedForm,
    Empirical,
}

/// Value of the tabulated multiplicity formula for the group of `g`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableValue {
    pub row: String,
    #[serde(serialize_with = "ser_big")]
    pub value: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Arbitration {
    pub theorem_equals_table: bool,
    /// Sources whose value equals the empirical nullity.
    pub matching: Vec<&'static str>,
    pub resolved: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplicityReport {
    pub instance: Descriptor,
    pub lambda_min: LambdaMin,
    #[serde(serialize_with = "ser_big")]
    pub total_multiplicity_closed: BigInt,
    /// Set when some attaining module has no tabulated generic degree.
    pub closed_derived: bool,
    pub table: Option<TableValue>,
    pub total_multiplicity_empirical: Option<usize>,
    /// `direct` for an integer eigenvalue; `squared` when the nullity of
    /// `A^2 - lambda^2 I` is halved over a pair of conjugate eigenvalues.
    pub empirical_method: Option<&'static str>,
    pub empirical_primes: Vec<(u64, usize)>,
    pub spanning_rank: Option<usize>,
    pub arbitration: Option<Arbitration>,
}

impl MultiplicityReport {
    /// Closed form and empirical value agree (when both exist).
    pub fn closed_matches_empirical(&self) -> Option<bool> {
        self.total_multiplicity_empirical.map(|e| BigInt::from(e) == self.total_multiplicity_closed)
    }
}

fn ratio(num: BigRational, den: BigRational) -> Result<BigInt> {
    Ok(to_integer(&(num / den), "tabulated multiplicity")?)
}

/// Tabulated multiplicity formula for the group attached to `g`. Unitary
/// groups are written over the square root of the field order.
pub fn table_value(g: &GeometryInstance) -> Result<Option<TableValue>> {
    let big_n = g.n as i64;
    let one = || BigRational::one();
    let row = |name: String, value: BigInt| Ok(Some(TableValue { row: name, value }));
    match g.descriptor {
        Descriptor::A { q, .. } => {
            let t = QOrder::new(q);
            let qr = t.q_rat();
            if big_n % 2 == 0 {
                let n = big_n / 2;
                let v = ratio(BigRational::from_integer(n.into()) * (t.pow(2 * n + 1) - &qr), &qr - one())?;
                row(format!("A_{{2n}} with n = {n}"), v)
            } else {
                let n = (big_n + 1) / 2;
                let v = ratio(BigRational::from_integer(n.into()) * (t.pow(2 * n) - &qr), &qr - one())?;
                row(format!("A_{{2n-1}} with n = {n}"), v)
            }
        }
        Descriptor::D { q, .. } => {
            if big_n % 2 == 1 {
                return Ok(None);
            }
            let n = big_n / 2;
            let t = QOrder::new(q);
            let qr = t.q_rat();
            let num = BigRational::from_integer((2 * n).into()) * (t.pow(2 * n + 1) - &qr) * (t.pow(2 * n - 2) + one());
            row(format!("D_{{2n}} with n = {n}"), ratio(num, &qr * &qr - one())?)
        }
        Descriptor::B { q, form, e2, .. } => match form {
            FormKind::Hyperbolic => Ok(None),
            FormKind::Elliptic => {
                let n = big_n;
                let t = QOrder::new(q);
                let qr = t.q_rat();
                let num = BigRational::from_integer(n.into()) * &qr * &qr * (t.pow(2 * n) - one());
                row(format!("2D_{{n+1}} with n = {n}"), ratio(num, &qr * &qr - one())?)
            }
            FormKind::Symplectic | FormKind::Parabolic => {
                let t = QOrder::new(q);
                let qr = t.q_rat();
                if big_n % 2 == 0 {
                    let n = big_n / 2;
                    let num = BigRational::from_integer((2 * n).into())
                        * &qr
                        * (t.pow(2 * n) - one())
                        * (t.pow(2 * n - 1) + one());
                    row(format!("B_{{2n}} with n = {n}"), ratio(num, &qr - one())?)
                } else {
                    let n = (big_n + 1) / 2;
                    let two = BigRational::from_integer(2.into());
                    let first = BigRational::from_integer((2 * n - 1).into())
                        * &qr
                        * (t.pow(2 * n - 1) - one())
                        * (t.pow(2 * n - 2) + one())
                        / (&two * (&qr - one()));
                    let second = &qr * (t.pow(2 * n - 1) + one()) * (t.pow(2 * n - 2) + one()) / (&two * (&qr + one()));
                    row(format!("B_{{2n-1}} with n = {n}"), to_integer(&(first + second), "tabulated multiplicity")?)
                }
            }
            FormKind::Hermitian => {
                let q0 = g.qorder.root.ok_or(SpectraError::Unsupported("hermitian form over a non-square field"))?;
                let t = QOrder::new(q0);
                let qr = t.q_rat();
                let q2m1 = &qr * &qr - one();
                if e2 == 3 {
                    let n = big_n;
                    let num = BigRational::from_integer(n.into())
                        * t.pow(3)
                        * (t.pow(2 * n) - one())
                        * (t.pow(2 * n - 1) + one());
                    row(format!("2A_{{2n}} with n = {n}"), ratio(num, q2m1 * (&qr + one()))?)
                } else if big_n % 2 == 0 {
                    let n = big_n / 2;
                    let num = BigRational::from_integer((2 * n).into())
                        * &qr
                        * &qr
                        * (t.pow(4 * n) - one())
                        * (t.pow(4 * n - 3) + one());
                    row(format!("2A_{{4n-1}} with n = {n}"), ratio(num, q2m1 * (&qr + one()))?)
                } else {
                    let n = (big_n + 1) / 2;
                    let num = &qr * (t.pow(4 * n - 3) + one());
                    row(format!("2A_{{4n-3}} with n = {n}"), ratio(num, &qr + one())?)
                }
            }
        },
    }
}

/// Adjacency lists of the opposition graph.
pub fn adjacency(g: &GeometryInstance, en: &Enumeration) -> Vec<Vec<u32>> {
    let opp = Opposition::new(g, en);
    (0..en.num_flags()).into_par_iter().map(|c| opp.neighbors(c)).collect()
}

fn scale_error(e: LinalgError) -> SpectraError {
    match e {
        LinalgError::BudgetExceeded { what, size, limit } => SpectraError::ScaleTooLarge { what, size, limit },
        other => SpectraError::Linalg(other),
    }
}

/// Multiplicity of the smallest eigenvalue as the nullity of
/// `A - lambda I`, or half the nullity of `A^2 - lambda^2 I` when `lambda`
/// is irrational.
pub fn empirical_multiplicity(
    g: &GeometryInstance,
    en: &Enumeration,
    lm: &LambdaMin,
) -> Result<(usize, &'static str, NullityReport)> {
    let dim = en.num_flags();
    if dim > DEFAULT_DENSE_LIMIT {
        return Err(SpectraError::ScaleTooLarge { what: "dense nullity", size: dim, limit: DEFAULT_DENSE_LIMIT });
    }
    let adj = adjacency(g, en);
    let primes = certification_primes(2);
    match lm.value_int {
        Some(lambda) => {
            let apply = |i: usize, emit: &mut dyn FnMut(usize)| adj[i].iter().for_each(|&d| emit(d as usize));
            let r = nullity_for_eigenvalue(&apply, dim, lambda, &primes).map_err(scale_error)?;
            Ok((r.nullity, "direct", r))
        }
        None => {
            let mu = lm.value.square_value(g.qorder).ok_or(SpectraError::Unsupported("eigenvalue square overflow"))?;
            let row_of = |i: usize, row: &mut [i64]| {
                for &d in &adj[i] {
                    for &e in &adj[d as usize] {
                        row[e as usize] += 1;
                    }
                }
            };
            let valency = adj.first().map_or(0, |a| a.len()) as u64;
            let r = nullity_of_integer_matrix(&row_of, dim, mu, valency, &primes).map_err(scale_error)?;
            Ok((r.nullity / 2, "squared", r))
        }
    }
}

pub fn multiplicity(g: &GeometryInstance, en: Option<&Enumeration>, mode: MultiplicityMode) -> Result<MultiplicityReport> {
    let lm = lambda_min(g)?;
    let total: BigInt = lm.modules.iter().map(|m| m.total()).sum();
    let closed_derived = lm.modules.iter().any(|m| m.derived) || g.kind == GeometryKind::OriflammeD && g.n % 2 == 1;
    let table = table_value(g)?;
    let mut report = MultiplicityReport {
        instance: g.descriptor,
        lambda_min: lm,
        total_multiplicity_closed: total,
        closed_derived,
        table,
        total_multiplicity_empirical: None,
        empirical_method: None,
        empirical_primes: Vec::new(),
        spanning_rank: None,
        arbitration: None,
    };
    if mode == MultiplicityMode::Empirical {
        let en = en.ok_or(SpectraError::Unsupported("empirical multiplicity without an enumeration"))?;
        let (nullity, method, r) = empirical_multiplicity(g, en, &report.lambda_min)?;
        report.total_multiplicity_empirical = Some(nullity);
        report.empirical_method = Some(method);
        report.empirical_primes = r.per_prime;
        let e = BigInt::from(nullity);
        let mut matching = Vec::new();
        if e == report.total_multiplicity_closed {
            matching.push("theorem");
        }
        if report.table.as_ref().is_some_and(|t| t.value == e) {
            matching.push("table");
        }
        report.arbitration = Some(Arbitration {
            theorem_equals_table: report.table.as_ref().is_none_or(|t| t.value == report.total_multiplicity_closed),
            resolved: !matching.is_empty(),
            matching,
        });
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BasisExtraction {
    /// Point whose column was dropped from every family.
    pub dropped_point: usize,
    pub rank_without: usize,
    pub columns_without: usize,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpanningReport {
    pub families: usize,
    pub rows: usize,
    pub columns: usize,
    pub rank: usize,
    /// Rank of each family on its own, at the first prime.
    pub family_ranks: Vec<usize>,
    #[serde(serialize_with = "ser_big")]
    pub expected: BigInt,
    pub exact_rank: Option<usize>,
    pub per_prime: Vec<(u64, usize)>,
    pub basis_extraction: Option<BasisExtraction>,
    /// Type D with even rank: the same ranks with every family evaluated
    /// at `c^+` alone. Diagnostic only; `rank` is what is certified.
    pub plus_component: Option<ComponentRank>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentRank {
    pub rank: usize,
    pub per_prime: Vec<(u64, usize)>,
    pub family_ranks: Vec<usize>,
}

impl SpanningReport {
    pub fn passed(&self) -> bool {
        BigInt::from(self.rank) == self.expected
            && self.exact_rank.is_none_or(|r| r == self.rank)
            && self.per_prime.iter().all(|&(_, r)| r == self.rank)
            && self.basis_extraction.as_ref().is_none_or(|b| b.ok)
    }
}

/// Rows of `[F_1 | ... | F_m]`, one flag at a time.
struct FamilyRows<'a> {
    en: &'a Enumeration,
    /// For oriflamme flags: evaluate at `c^+` only instead of summing over
    /// `c^-` and `c^+`.
    plus_only: bool,
    members: Vec<Membership>,
    coeffs: Vec<Vec<i64>>,
    np: usize,
}

impl FamilyRows<'_> {
    fn fill(&self, c: usize, families: &[usize], skip: Option<usize>, row: &mut Vec<i64>) {
        row.clear();
        let leaves: Vec<usize> = match &self.en.oriflamme {
            Some(o) if self.plus_only => vec![o.plus[c] as usize],
            Some(o) => vec![o.minus[c] as usize, o.plus[c] as usize],
            None => vec![c],
        };
        let types: Vec<Vec<usize>> = leaves
            .iter()
            .map(|&leaf| (0..self.np).map(|x| self.members[x].type_of(self.en.chain(leaf)) - 1).collect())
            .collect();
        for f in families.iter().map(|&k| &self.coeffs[k]) {
            for x in 0..self.np {
                if Some(x) == skip {
                    continue;
                }
                row.push(types.iter().map(|t| f[t[x]]).sum());
            }
        }
    }
}

fn modular_rank(
    rows: &FamilyRows<'_>,
    nrows: usize,
    families: &[usize],
    skip: Option<usize>,
    primes: &[u64],
) -> Result<Vec<(u64, usize)>> {
    let cols = families.len() * (rows.np - usize::from(skip.is_some()));
    primes
        .par_iter()
        .map(|&p| {
            let mut basis = ModularBasis::new(p, cols)?;
            let mut row = Vec::with_capacity(cols);
            for c in 0..nrows {
                rows.fill(c, families, skip, &mut row);
                basis.push_i64(&row);
            }
            Ok((p, basis.rank()))
        })
        .collect()
}

/// Rank of the concatenated columns of all lifted families.
pub fn spanning_rank(g: &GeometryInstance, en: &Enumeration) -> Result<SpanningReport> {
    let m = family_count(g)?;
    let (n, _) = polar_params(g);
    let np = en.num_points();
    let nrows = en.num_flags();
    let cols = m * np;
    if nrows * cols > SPANNING_BUDGET {
        return Err(SpectraError::ScaleTooLarge { what: "spanning rank", size: nrows * cols, limit: SPANNING_BUDGET });
    }
    let mut rows = FamilyRows {
        en,
        plus_only: false,
        members: (0..np).into_par_iter().map(|x| Membership::new(&en.registry, n, x)).collect(),
        coeffs: (1..=m).map(|j| coefficients(g, j)).collect::<Result<_>>()?,
        np,
    };
    let primes = certification_primes(2);
    let all: Vec<usize> = (0..m).collect();
    let per_prime = modular_rank(&rows, nrows, &all, None, &primes)?;
    let rank = per_prime.iter().map(|&(_, r)| r).max().unwrap_or(0);
    let exact_rank = if nrows * cols <= DEFAULT_EXACT_BUDGET {
        let mut data = Vec::with_capacity(nrows * cols);
        let mut row = Vec::with_capacity(cols);
        for c in 0..nrows {
            rows.fill(c, &all, None, &mut row);
            data.extend_from_slice(&row);
        }
        Some(rank_exact(&ExactMatrix::from_integers(nrows, cols, &data)?)?)
    } else {
        None
    };
    let basis_extraction = if g.kind == GeometryKind::ProjectiveA {
        let columns_without = cols - m;
        let without = modular_rank(&rows, nrows, &all, Some(0), &primes)?;
        let rank_without = without.iter().map(|&(_, r)| r).max().unwrap_or(0);
        let consistent = without.iter().all(|&(_, r)| r == rank_without);
        Some(BasisExtraction {
            dropped_point: 0,
            rank_without,
            columns_without,
            ok: consistent && rank_without == rank && rank_without == columns_without,
        })
    } else {
        None
    };
    let family_ranks = single_family_ranks(&rows, nrows, m, primes[0])?;
    // For even n, c -> c^+ is an isomorphism onto one component of the
    // polar graph, so the plus evaluations are eigenvectors too.
    let plus_component = if g.kind == GeometryKind::OriflammeD && g.n.is_multiple_of(2) {
        rows.plus_only = true;
        let per_prime = modular_rank(&rows, nrows, &all, None, &primes)?;
        let family_ranks = single_family_ranks(&rows, nrows, m, primes[0])?;
        rows.plus_only = false;
        Some(ComponentRank { rank: per_prime.iter().map(|&(_, r)| r).max().unwrap_or(0), per_prime, family_ranks })
    } else {
        None
    };
    Ok(SpanningReport {
        families: m,
        family_ranks,
        rows: nrows,
        columns: cols,
        rank,
        expected: reflection_degree(g)? * BigInt::from(m),
        exact_rank,
        per_prime,
        basis_extraction,
        plus_component,
    })
}

fn single_family_ranks(rows: &FamilyRows<'_>, nrows: usize, m: usize, p: u64) -> Result<Vec<usize>> {
    (0..m).map(|k| Ok(modular_rank(rows, nrows, &[k], None, &[p])?[0].1)).collect()
}
