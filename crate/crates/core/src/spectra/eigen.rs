//! Smallest eigenvalues, eigenvector families and their lifts to flags.
//!
//! Family `j` assigns a coefficient to every flag type. Its lift is the
//! flags-by-points matrix `F_j(c, X) = f_(type_X(c), j)`. Two independent
//! routes check the eigen identity `sum_(d opp c) F_j(d, X) = lambda F_j(c, X)`:
//! the direct route classifies every neighbor by type, the aggregated
//! route counts the subspaces of all neighbors and expands them through
//! the indicator form of `F_j` (for type B,
//! `F_j = (a + 1) 1_(V_n) - a 1_(V_(n-j)) - 1_(V_(n-j)^perp)` with
//! `a = q^(j+e-1)`).

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::quotient::QuotientMatrixExact;
use super::types::Membership;
use super::{check_family_index, family_count, family_weight, polar_params, Result, SpectraError};
use crate::geometry::counts::Counts;
use crate::geometry::opposition::Opposition;
use crate::geometry::{Enumeration, GeometryInstance, GeometryKind};
use crate::qpow::{to_integer, QOrder};

/// `-q^(exp2/2)` or `+q^(exp2/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignedQPower {
    pub negative: bool,
    pub exp2: i64,
}

impl SignedQPower {
    pub fn neg(exp2: i64) -> SignedQPower {
        SignedQPower { negative: true, exp2 }
    }

    /// Integer value, when `q^(exp2/2)` is an integer.
    pub fn value(&self, q: QOrder) -> Option<i64> {
        let v = q.pow_half(self.exp2).ok()?;
        let v = crate::qpow::to_i64(&v, "eigenvalue").ok()?;
        Some(if self.negative { -v } else { v })
    }

    pub fn square_value(&self, q: QOrder) -> Option<i64> {
        crate::qpow::to_i64(&q.pow(self.exp2), "squared eigenvalue").ok()
    }
}

impl fmt::Display for SignedQPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.negative { "-" } else { "" };
        if self.exp2 % 2 == 0 {
            write!(f, "{sign}q^{}", self.exp2 / 2)
        } else {
            write!(f, "{sign}q^({}/2)", self.exp2)
        }
    }
}

/// One irreducible module carrying a candidate smallest eigenvalue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuleEigen {
    pub label: String,
    pub eigenvalue: SignedQPower,
    pub eigenvalue_value: Option<i64>,
    pub within_module_multiplicity: u64,
    #[serde(serialize_with = "ser_big")]
    pub generic_degree: BigInt,
    /// True when the degree is not a tabulated closed form but follows
    /// from the module structure.
    pub derived: bool,
}

impl ModuleEigen {
    pub fn total(&self) -> BigInt {
        &self.generic_degree * BigInt::from(self.within_module_multiplicity)
    }
}

pub(crate) fn ser_big<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LambdaMin {
    pub value: SignedQPower,
    /// Integer value of the eigenvalue; `None` when it is irrational.
    pub value_int: Option<i64>,
    /// All modules attaining the minimum.
    pub modules: Vec<ModuleEigen>,
    /// Set for type A of even rank, where eigenvector work is unsupported.
    pub even_rank_type_a: bool,
}

fn degree_a(q: QOrder, n: i64) -> Result<BigInt> {
    let one = BigRational::one();
    Ok(to_integer(&((q.pow(n + 1) - q.q_rat()) / (q.q_rat() - one)), "generic degree")?)
}

/// `q^e (q^n - 1)(q^(n+e-2) + 1) / ((q - 1)(q^(e-1) + 1))`.
fn degree_b_reflection(q: QOrder, n: i64, e2: i64) -> Result<BigInt> {
    let one = BigRational::one();
    let num = q.pow_half(e2)? * (q.pow(n) - &one) * (q.pow_e(n - 2, 1, e2)? + &one);
    let den = (q.q_rat() - &one) * (q.pow_e(-1, 1, e2)? + &one);
    Ok(to_integer(&(num / den), "generic degree")?)
}

/// `q^e prod_(i=1)^(n-1) (q^(n+e-i) + 1) / (q^(n-e-i) + 1)`.
fn degree_b_generator(q: QOrder, n: i64, e2: i64) -> Result<BigInt> {
    let one = BigRational::one();
    let mut acc = q.pow_half(e2)?;
    for i in 1..n {
        acc *= q.pow_half(2 * (n - i) + e2)? + &one;
        acc /= q.pow_half(2 * (n - i) - e2)? + &one;
    }
    Ok(to_integer(&acc, "generic degree")?)
}

/// `(q^(n+1) - q)(q^(n-2) + 1) / ((q - 1)(q + 1))`.
fn degree_d(q: QOrder, n: i64) -> Result<BigInt> {
    let one = BigRational::one();
    let num = (q.pow(n + 1) - q.q_rat()) * (q.pow(n - 2) + &one);
    let den = (q.q_rat() - &one) * (q.q_rat() + &one);
    Ok(to_integer(&(num / den), "generic degree")?)
}

/// Generic degree of the module whose eigenspace the families span.
pub fn reflection_degree(g: &GeometryInstance) -> Result<BigInt> {
    let n = g.n as i64;
    match g.kind {
        GeometryKind::ProjectiveA => degree_a(g.qorder, n),
        GeometryKind::Polar => degree_b_reflection(g.qorder, n, g.e2()),
        GeometryKind::OriflammeD => degree_d(g.qorder, n),
    }
}

/// Candidate modules with their eigenvalues for the geometry.
pub fn module_eigenvalues(g: &GeometryInstance) -> Result<Vec<ModuleEigen>> {
    let n = g.n as i64;
    let q = g.qorder;
    let module = |label: String, eigenvalue: SignedQPower, mult: u64, degree: BigInt, derived: bool| ModuleEigen {
        label,
        eigenvalue,
        eigenvalue_value: eigenvalue.value(q),
        within_module_multiplicity: mult,
        generic_degree: degree,
        derived,
    };
    let mut out = Vec::new();
    match g.kind {
        GeometryKind::ProjectiveA => {
            out.push(module(
                format!("[{},1]", n - 1),
                SignedQPower::neg(n * n - 1),
                ((n + 1) / 2) as u64,
                degree_a(q, n)?,
                false,
            ));
        }
        GeometryKind::OriflammeD => {
            out.push(module(
                format!("([{}],[1])", n - 1),
                SignedQPower::neg(2 * (n - 1) * (n - 1)),
                n as u64,
                degree_d(q, n)?,
                n % 2 == 1,
            ));
        }
        GeometryKind::Polar => {
            let e2 = g.e2();
            let reflection = SignedQPower::neg((n - 1) * (2 * n - 2 + e2));
            if n % 2 == 0 || e2 >= 2 {
                out.push(module(
                    format!("([{}],[1])", n - 1),
                    reflection,
                    n as u64,
                    degree_b_reflection(q, n, e2)?,
                    false,
                ));
            }
            if n % 2 == 1 && e2 <= 2 {
                out.push(module(format!("(∅,[{n}])"), SignedQPower::neg(2 * n * (n - 1)), 1, degree_b_generator(q, n, e2)?, false));
            }
            if n % 2 == 0 && e2 == 0 && n > 2 {
                // swapped with ([n-1],[1]) by the graph automorphism exchanging
                // the generator classes, so it carries the same eigenvalue
                out.push(module(format!("([1],[{}])", n - 1), reflection, n as u64, degree_b_reflection(q, n, 0)?, true));
            }
        }
    }
    Ok(out)
}

/// Smallest eigenvalue of the opposition graph and every module attaining it.
pub fn lambda_min(g: &GeometryInstance) -> Result<LambdaMin> {
    let modules = module_eigenvalues(g)?;
    let largest = modules.iter().map(|m| m.eigenvalue.exp2).max().expect("at least one module");
    let attaining: Vec<ModuleEigen> = modules.into_iter().filter(|m| m.eigenvalue.exp2 == largest).collect();
    let value = attaining[0].eigenvalue;
    Ok(LambdaMin {
        value,
        value_int: value.value(g.qorder),
        modules: attaining,
        even_rank_type_a: g.kind == GeometryKind::ProjectiveA && g.n.is_multiple_of(2),
    })
}

/// Eigenvalue of the opposition graph on the span of the lifted families:
/// `-q^((n^2-1)/2)` (A), `-q^((n-1)(n+e-1))` (B), `-q^((n-1)^2)` (D).
pub fn family_eigenvalue(g: &GeometryInstance) -> Result<i64> {
    family_count(g)?;
    let n = g.n as i64;
    let (_, e2) = polar_params(g);
    let exp2 = match g.kind {
        GeometryKind::ProjectiveA => n * n - 1,
        _ => (n - 1) * (2 * n - 2 + e2),
    };
    SignedQPower::neg(exp2).value(g.qorder).ok_or(SpectraError::Unsupported("irrational family eigenvalue"))
}

/// Coefficients `(f_1j, ..., f_lj)` of family `j`, indexed by type.
pub(crate) fn coefficients(g: &GeometryInstance, j: usize) -> Result<Vec<i64>> {
    check_family_index(g, j)?;
    let a = family_weight(g, j)?;
    let (n, _) = polar_params(g);
    let (ell, start) = match g.kind {
        GeometryKind::ProjectiveA => (n + 1, n.div_ceil(2)),
        _ => (2 * n, n),
    };
    let mut v = vec![0i64; ell];
    for t in start - j + 1..=start {
        v[t - 1] = a;
    }
    for t in start + 1..=start + j {
        v[t - 1] = -1;
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EigvecFamily {
    pub j: usize,
    pub coeffs: Vec<i64>,
    /// Eigenvalue of the opposition graph the lifted family certifies.
    pub eigenvalue: i64,
}

impl EigvecFamily {
    /// The scalar `lambda_Q` with `Q v = lambda_Q v`, if one exists.
    pub fn quotient_eigenvalue(&self, q: &QuotientMatrixExact) -> Option<BigRational> {
        let qv = q.apply(&self.coeffs);
        let pivot = self.coeffs.iter().position(|&x| x != 0)?;
        let lambda = BigRational::new(qv[pivot].into(), self.coeffs[pivot].into());
        let consistent = qv
            .iter()
            .zip(&self.coeffs)
            .all(|(&a, &b)| BigRational::from_integer(a.into()) == &lambda * BigRational::from_integer(b.into()));
        consistent.then_some(lambda)
    }
}

pub fn eigvec_family(g: &GeometryInstance, j: usize) -> Result<EigvecFamily> {
    if g.kind == GeometryKind::OriflammeD {
        return Err(SpectraError::Unsupported("eigenvector families on the quotient"));
    }
    Ok(EigvecFamily { j, coeffs: coefficients(g, j)?, eigenvalue: family_eigenvalue(g)? })
}

/// Leaves making up a vertex: the flag itself, or both B-flags of an
/// oriflamme flag.
fn vertex_leaves(en: &Enumeration, c: usize) -> Vec<usize> {
    match &en.oriflamme {
        Some(o) => vec![o.minus[c] as usize, o.plus[c] as usize],
        None => vec![c],
    }
}

/// `F_j(c, X)`; for type D the sum over the two B-flags of `c`.
pub fn eval_f(g: &GeometryInstance, en: &Enumeration, j: usize, x: u32, c: usize) -> Result<i64> {
    let coeffs = coefficients(g, j)?;
    let m = Membership::new(&en.registry, g.n, x as usize);
    Ok(vertex_leaves(en, c).into_iter().map(|leaf| coeffs[m.type_of(en.chain(leaf)) - 1]).sum())
}

/// Case formula for `F_j(c, P)` by the position of `P` relative to
/// subspaces of `c`, evaluated with subspace arithmetic only.
///
/// Type A (`n = 2m - 1`): `0` on `U_(m-j)`, `q^j` on `U_m \ U_(m-j)`, `-1` on
/// `U_(m+j) \ U_m`, else `0`. Type B: `0` on `U_(n-j)`, `q^(j+e-1)` on
/// `U_n \ U_(n-j)`, `-1` on `U_(n-j)^perp \ U_n`, else `0`.
pub fn eval_chi(g: &GeometryInstance, en: &Enumeration, j: usize, p: u32, leaf: usize) -> Result<i64> {
    if g.kind == GeometryKind::OriflammeD {
        return Err(SpectraError::Unsupported("case evaluation"));
    }
    check_family_index(g, j)?;
    let f = &g.field;
    let reg = &en.registry;
    let chain = en.chain(leaf);
    let point = reg.point_vector(p);
    let within = |k: usize| k > 0 && reg.subspace(k, chain[k - 1]).contains_vector(f, point);
    let a = family_weight(g, j)?;
    let n = g.n;
    match &g.form {
        None => {
            let m = n.div_ceil(2);
            let within_upper = |k: usize| k == n + 1 || within(k);
            Ok(if within(m - j) {
                0
            } else if within(m) {
                a
            } else if within_upper(m + j) {
                -1
            } else {
                0
            })
        }
        Some(form) => {
            let in_perp = |k: usize| k == 0 || reg.subspace(k, chain[k - 1]).rows().all(|u| form.bilinear(f, point, u).is_zero());
            Ok(if within(n - j) {
                0
            } else if within(n) {
                a
            } else if in_perp(n - j) {
                -1
            } else {
                0
            })
        }
    }
}

/// Which flags the lifted identity is checked on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sample {
    All,
    Count(usize),
}

/// Direct points checked per flag when sampling.
const DIRECT_POINT_SAMPLE: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EigenReport {
    pub lambda: i64,
    pub families: usize,
    pub exhaustive: bool,
    pub seed: u64,
    pub flags_checked: usize,
    pub direct_points: usize,
    pub aggregated_points: usize,
    pub direct_evaluations: u64,
    pub aggregated_evaluations: u64,
    pub direct_mismatches: u64,
    pub aggregated_mismatches: u64,
    /// Per family, the number of checked `(flag, point)` pairs where the
    /// lifted family is nonzero. A zero entry makes the identity vacuous.
    pub nonzero_values: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<(usize, usize, usize, i64, i64)>,
}

impl EigenReport {
    pub fn passed(&self) -> bool {
        self.direct_mismatches == 0 && self.aggregated_mismatches == 0
    }

    /// Families (1-based) that vanished on every checked flag.
    pub fn vanishing_families(&self) -> Vec<usize> {
        self.nonzero_values.iter().enumerate().filter(|(_, &k)| k == 0).map(|(j, _)| j + 1).collect()
    }

    pub fn into_result(self) -> Result<EigenReport> {
        match self.first_failure {
            Some((flag, j, point, lhs, rhs)) => Err(SpectraError::EigenIdentityViolated { flag, j, point, lhs, rhs }),
            None => Ok(self),
        }
    }
}

/// Flags to check: all of them, or a seeded sample in increasing order.
pub fn sample_flags(total: usize, sample: Sample, seed: u64) -> Vec<usize> {
    match sample {
        Sample::All => (0..total).collect(),
        Sample::Count(k) if k >= total => (0..total).collect(),
        Sample::Count(k) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v = sample_indices(&mut rng, total, k).into_vec();
            v.sort_unstable();
            v
        }
    }
}

#[derive(Default)]
struct FlagOutcome {
    direct: u64,
    aggregated: u64,
    direct_bad: u64,
    aggregated_bad: u64,
    first: Option<(usize, usize, usize, i64, i64)>,
    nonzero: Vec<u64>,
}

/// Checks the lifted eigen identity for every family on the sampled flags.
pub fn verify_flag_eigenvectors(g: &GeometryInstance, en: &Enumeration, sample: Sample, seed: u64) -> Result<EigenReport> {
    let m = family_count(g)?;
    let lambda = family_eigenvalue(g)?;
    let (n, _) = polar_params(g);
    let np = en.num_points();
    let reg = &en.registry;
    let polar = reg.has_perp();
    let coeffs: Vec<Vec<i64>> = (1..=m).map(|j| coefficients(g, j)).collect::<Result<_>>()?;
    let weights: Vec<i64> = (1..=m).map(|j| family_weight(g, j)).collect::<Result<_>>()?;
    let flags = sample_flags(en.num_flags(), sample, seed);
    let exhaustive = flags.len() == en.num_flags();
    let direct_points: Vec<usize> = if exhaustive || np <= DIRECT_POINT_SAMPLE {
        (0..np).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let mut v = sample_indices(&mut rng, np, DIRECT_POINT_SAMPLE).into_vec();
        v.sort_unstable();
        v
    };
    let all_members: Vec<Membership> = (0..np).into_par_iter().map(|x| Membership::new(reg, n, x)).collect();
    let opp = Opposition::new(g, en);
    let ell = coeffs[0].len();

    let outcomes: Vec<FlagOutcome> = flags
        .par_iter()
        .map(|&c| {
            let mut out = FlagOutcome { nonzero: vec![0; m], ..FlagOutcome::default() };
            let record = |bad: &mut u64, j: usize, x: usize, lhs: i64, rhs: i64, first: &mut Option<_>| {
                *bad += 1;
                if first.is_none() {
                    *first = Some((c, j, x, lhs, rhs));
                }
            };
            let neighbors = opp.neighbors(c);
            let own = vertex_leaves(en, c);
            let leaves: Vec<usize> = neighbors.iter().flat_map(|&d| vertex_leaves(en, d as usize)).collect();
            // value of every family at c, from types
            let own_f = |x: usize, j: usize| -> i64 {
                own.iter().map(|&leaf| coeffs[j][all_members[x].type_of(en.chain(leaf)) - 1]).sum()
            };

            // direct route
            let mut hist = vec![0i64; ell];
            for &x in &direct_points {
                hist.iter_mut().for_each(|h| *h = 0);
                for &leaf in &leaves {
                    hist[all_members[x].type_of(en.chain(leaf)) - 1] += 1;
                }
                for j in 0..m {
                    let lhs: i64 = hist.iter().zip(&coeffs[j]).map(|(h, f)| h * f).sum();
                    let rhs = lambda * own_f(x, j);
                    out.direct += 1;
                    if lhs != rhs {
                        record(&mut out.direct_bad, j + 1, x, lhs, rhs, &mut out.first);
                    }
                }
            }

            // aggregated route: S_k(X) and P_k(X) over all neighbors
            let mut inside = vec![vec![0i64; np]; n + 1];
            let mut perp = vec![vec![0i64; np]; n];
            for k in 1..=n {
                let mut counts = vec![0u32; reg.count(k)];
                for &leaf in &leaves {
                    counts[en.chain(leaf)[k - 1] as usize] += 1;
                }
                for (id, &cnt) in counts.iter().enumerate() {
                    if cnt == 0 {
                        continue;
                    }
                    for x in reg.points_of(k, id as u32).ones() {
                        inside[k][x] += cnt as i64;
                    }
                    if polar && k < n {
                        for x in reg.perp_of(k, id as u32).ones() {
                            perp[k][x] += cnt as i64;
                        }
                    }
                }
            }
            let total = leaves.len() as i64;
            for x in 0..np {
                for j in 1..=m {
                    let a = weights[j - 1];
                    let lhs = if polar {
                        let low = inside[n - j][x];
                        let low_perp = if n == j { total } else { perp[n - j][x] };
                        (a + 1) * inside[n][x] - a * low - low_perp
                    } else {
                        let half = n.div_ceil(2);
                        let upper = if half + j == n + 1 { total } else { inside[half + j][x] };
                        (a + 1) * inside[half][x] - a * inside[half - j][x] - upper
                    };
                    let rhs = lambda * own_f(x, j - 1);
                    out.aggregated += 1;
                    out.nonzero[j - 1] += u64::from(rhs != 0);
                    if lhs != rhs {
                        record(&mut out.aggregated_bad, j, x, lhs, rhs, &mut out.first);
                    }
                }
            }
            out
        })
        .collect();

    let mut report = EigenReport {
        lambda,
        families: m,
        exhaustive,
        seed,
        flags_checked: flags.len(),
        direct_points: direct_points.len(),
        aggregated_points: np,
        direct_evaluations: 0,
        aggregated_evaluations: 0,
        direct_mismatches: 0,
        aggregated_mismatches: 0,
        nonzero_values: vec![0; m],
        first_failure: None,
    };
    for o in outcomes {
        report.direct_evaluations += o.direct;
        report.aggregated_evaluations += o.aggregated;
        report.direct_mismatches += o.direct_bad;
        report.aggregated_mismatches += o.aggregated_bad;
        for (total, k) in report.nonzero_values.iter_mut().zip(&o.nonzero) {
            *total += k;
        }
        if report.first_failure.is_none() {
            report.first_failure = o.first;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChiReport {
    pub flags_checked: usize,
    pub evaluations: u64,
    pub mismatches: u64,
    /// `(flag, j, point, case value, lifted value)` of the first mismatch.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<(usize, usize, u32, i64, i64)>,
}

impl ChiReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.evaluations > 0
    }
}

/// Compares [`eval_chi`] with [`eval_f`] on every point, every family and
/// the sampled flags.
pub fn chi_agreement(g: &GeometryInstance, en: &Enumeration, sample: Sample, seed: u64) -> Result<ChiReport> {
    let m = family_count(g)?;
    if g.kind == GeometryKind::OriflammeD {
        return Err(SpectraError::Unsupported("case evaluation"));
    }
    let flags = sample_flags(en.num_flags(), sample, seed);
    let np = en.num_points() as u32;
    let per_flag: Vec<(u64, Option<(usize, usize, u32, i64, i64)>)> = flags
        .par_iter()
        .map(|&c| {
            let mut bad = 0u64;
            let mut first = None;
            for j in 1..=m {
                for x in 0..np {
                    let chi = eval_chi(g, en, j, x, c)?;
                    let f = eval_f(g, en, j, x, c)?;
                    if chi != f {
                        bad += 1;
                        first.get_or_insert((c, j, x, chi, f));
                    }
                }
            }
            Ok((bad, first))
        })
        .collect::<Result<_>>()?;
    Ok(ChiReport {
        flags_checked: flags.len(),
        evaluations: flags.len() as u64 * m as u64 * np as u64,
        mismatches: per_flag.iter().map(|p| p.0).sum(),
        first_mismatch: per_flag.iter().find_map(|p| p.1),
    })
}

/// Valency of the opposition graph as an integer.
pub fn valency(g: &GeometryInstance) -> Result<i64> {
    super::int(&Counts::of(g).valency()?, "valency")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GeometryInstance {
        GeometryInstance::parse(s).unwrap()
    }

    #[test]
    fn lambda_min_examples() {
        let a = lambda_min(&g("A:3:2")).unwrap();
        assert_eq!(a.value_int, Some(-16));
        assert_eq!(a.modules.len(), 1);
        assert_eq!(a.modules[0].label, "[2,1]");

        let b = lambda_min(&g("B:3:2:2:sp")).unwrap();
        assert_eq!(b.value_int, Some(-64));
        let labels: Vec<&str> = b.modules.iter().map(|m| m.label.as_str()).collect();
        assert_eq!(labels, vec!["([2],[1])", "(∅,[3])"]);
        let totals: Vec<BigInt> = b.modules.iter().map(|m| m.total()).collect();
        assert_eq!(totals, vec![BigInt::from(105), BigInt::from(15)]);

        let d = lambda_min(&g("D:4:2")).unwrap();
        assert_eq!(d.value_int, Some(-512));
        assert_eq!(d.modules[0].label, "([3],[1])");
        assert_eq!(d.modules[0].total(), BigInt::from(200));

        let even = lambda_min(&g("A:2:2")).unwrap();
        assert!(even.even_rank_type_a);
        assert_eq!(even.value_int, None);
        assert_eq!(even.value.to_string(), "-q^(3/2)");
        assert_eq!(lambda_min(&g("A:2:4")).unwrap().value_int, Some(-8));
    }

    #[test]
    fn odd_rank_small_e_uses_the_generator_module() {
        let h = lambda_min(&g("B:3:1:4:herm")).unwrap();
        assert_eq!(h.modules.len(), 1);
        assert_eq!(h.modules[0].label, "(∅,[3])");
        assert_eq!(h.value_int, Some(-4096));
        let hyp = lambda_min(&g("B:3:0:2:hyp")).unwrap();
        assert_eq!(hyp.value_int, Some(-64));
        assert_eq!(hyp.modules[0].total(), BigInt::from(1));
    }

    #[test]
    fn generic_degrees() {
        assert_eq!(reflection_degree(&g("B:2:2:2:sp")).unwrap(), BigInt::from(9));
        assert_eq!(reflection_degree(&g("B:2:4:2:ell")).unwrap(), BigInt::from(20));
        assert_eq!(reflection_degree(&g("B:2:1:4:herm")).unwrap(), BigInt::from(20));
        assert_eq!(reflection_degree(&g("A:3:2")).unwrap(), BigInt::from(14));
        assert_eq!(reflection_degree(&g("D:4:2")).unwrap(), BigInt::from(50));
    }

    #[test]
    fn family_examples() {
        let a = g("A:3:2");
        assert_eq!(eigvec_family(&a, 1).unwrap().coeffs, vec![0, 2, -1, 0]);
        assert_eq!(eigvec_family(&a, 2).unwrap().coeffs, vec![4, 4, -1, -1]);
        assert!(matches!(eigvec_family(&a, 3), Err(SpectraError::OutOfRangeIndex { .. })));
        let w = g("B:2:2:2:sp");
        assert_eq!(eigvec_family(&w, 1).unwrap().coeffs, vec![0, 2, -1, 0]);
        assert_eq!(eigvec_family(&w, 1).unwrap().eigenvalue, -4);
        assert_eq!(eigvec_family(&g("B:2:1:4:herm"), 2).unwrap().coeffs, vec![8, 8, -1, -1]);
        assert!(matches!(eigvec_family(&g("A:2:2"), 1), Err(SpectraError::EvenRankTypeA(_))));
    }

    #[test]
    fn chi_equals_f_on_a_sample() {
        let w = g("B:2:4:2:ell");
        let en = Enumeration::build(&w).unwrap();
        for c in (0..en.num_flags()).step_by(13) {
            for x in 0..en.num_points() as u32 {
                for j in 1..=2 {
                    assert_eq!(eval_chi(&w, &en, j, x, c).unwrap(), eval_f(&w, &en, j, x, c).unwrap());
                }
            }
        }
    }

    #[test]
    fn lifted_identity_small() {
        let a = g("A:3:2");
        let en = Enumeration::build(&a).unwrap();
        let r = verify_flag_eigenvectors(&a, &en, Sample::All, 0).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.lambda, -16);
        assert_eq!(r.flags_checked, 315);
        assert_eq!(r.direct_evaluations, 315 * 15 * 2);
    }
}
