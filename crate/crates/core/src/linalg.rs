//! Exact rational and modular linear algebra.
//!
//! Exact ranks use fraction-free (Bareiss) elimination over big integers.
//! Modular ranks and nullities run an incremental echelon basis over
//! `u32` residues with `u64` accumulators: primes stay below `2^28`, so a
//! product fits in 56 bits and up to 255 row updates can be summed before
//! a reduction is needed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Default cap on `rows * cols` for exact rational elimination.
pub const DEFAULT_EXACT_BUDGET: usize = 400_000;
/// Default cap on the vertex count for dense modular nullity.
pub const DEFAULT_DENSE_LIMIT: usize = 4000;
/// Primes used for certification are drawn from just below this bound.
pub const PRIME_CEILING: u64 = 1 << 28;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("{what}: size {size} exceeds the budget of {limit}")]
    BudgetExceeded { what: &'static str, size: usize, limit: usize },
    #[error("prime {p} does not exceed the required bound {bound}")]
    PrimeTooSmall { p: u64, bound: u64 },
    #[error("modular results disagree across primes: {values:?}")]
    PrimeDisagreement { values: Vec<(u64, usize)> },
    #[error("prime {0} is outside the supported range [2, 2^28)")]
    UnsupportedPrime(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("expected a {expected} matrix")]
    Representation { expected: &'static str },
    #[error("shape mismatch: {rows}x{cols} needs {rows}*{cols} entries, got {len}")]
    Shape { rows: usize, cols: usize, len: usize },
    #[error("denominator divisible by {0}")]
    DenominatorVanishes(u64),
    #[error("at least one prime is required")]
    NoPrimes,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entries {
    Rational(Vec<BigRational>),
    Modular { p: u64, data: Vec<u64> },
}

/// Dense row-major matrix with a uniform representation tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Entries,
}

impl ExactMatrix {
    pub fn rational(rows: usize, cols: usize, data: Vec<BigRational>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Shape { rows, cols, len: data.len() });
        }
        Ok(ExactMatrix { rows, cols, entries: Entries::Rational(data) })
    }

    pub fn from_integers(rows: usize, cols: usize, data: &[i64]) -> Result<Self, LinalgError> {
        Self::rational(rows, cols, data.iter().map(|&x| BigRational::from_integer(x.into())).collect())
    }

    pub fn modular(p: u64, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self, LinalgError> {
        check_prime(p)?;
        if data.len() != rows * cols {
            return Err(LinalgError::Shape { rows, cols, len: data.len() });
        }
        Ok(ExactMatrix { rows, cols, entries: Entries::Modular { p, data: data.into_iter().map(|x| x % p).collect() } })
    }

    pub fn identity(k: usize) -> Self {
        let mut data = vec![BigRational::zero(); k * k];
        for i in 0..k {
            data[i * k + i] = BigRational::one();
        }
        ExactMatrix { rows: k, cols: k, entries: Entries::Rational(data) }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &Entries {
        &self.entries
    }

    pub fn prime(&self) -> Option<u64> {
        match self.entries {
            Entries::Modular { p, .. } => Some(p),
            Entries::Rational(_) => None,
        }
    }

    pub fn rational_entries(&self) -> Result<&[BigRational], LinalgError> {
        match &self.entries {
            Entries::Rational(d) => Ok(d),
            Entries::Modular { .. } => Err(LinalgError::Representation { expected: "rational" }),
        }
    }

    pub fn transpose(&self) -> Self {
        let (r, c) = (self.rows, self.cols);
        let entries = match &self.entries {
            Entries::Rational(d) => Entries::Rational((0..r * c).map(|k| d[(k % r) * c + k / r].clone()).collect()),
            Entries::Modular { p, data } => {
                Entries::Modular { p: *p, data: (0..r * c).map(|k| data[(k % r) * c + k / r]).collect() }
            }
        };
        ExactMatrix { rows: c, cols: r, entries }
    }

    /// Largest absolute value of an entry, for rational matrices.
    pub fn max_abs(&self) -> Result<BigRational, LinalgError> {
        Ok(self.rational_entries()?.iter().map(|x| x.abs()).max().unwrap_or_else(BigRational::zero))
    }

    /// Residues of a rational matrix modulo `p`.
    pub fn reduce_mod(&self, p: u64) -> Result<ExactMatrix, LinalgError> {
        check_prime(p)?;
        match &self.entries {
            Entries::Modular { p: q, .. } if *q == p => Ok(self.clone()),
            Entries::Modular { .. } => Err(LinalgError::Representation { expected: "rational" }),
            Entries::Rational(d) => {
                let data = d.iter().map(|x| rational_mod(x, p)).collect::<Result<Vec<_>, _>>()?;
                Ok(ExactMatrix { rows: self.rows, cols: self.cols, entries: Entries::Modular { p, data } })
            }
        }
    }
}

pub fn rational_mod(x: &BigRational, p: u64) -> Result<u64, LinalgError> {
    let pb = BigInt::from(p);
    let num = x.numer().mod_floor(&pb).to_u64().expect("residue fits");
    let den = x.denom().mod_floor(&pb).to_u64().expect("residue fits");
    if den == 0 {
        return Err(LinalgError::DenominatorVanishes(p));
    }
    Ok(mul_mod(num, inv_mod(den, p), p))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_prime(p: u64) -> Result<(), LinalgError> {
    if !(2..PRIME_CEILING).contains(&p) {
        return Err(LinalgError::UnsupportedPrime(p));
    }
    if !is_prime(p) {
        return Err(LinalgError::NotPrime(p));
    }
    Ok(())
}

/// The `count` largest primes below `2^28`, in decreasing order.
pub fn certification_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n = PRIME_CEILING - 1;
    while out.len() < count {
        if is_prime(n) {
            out.push(n);
        }
        n -= 2;
    }
    out
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut result, mut base, mut exp) = (1u64, a % p, p - 2);
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    result
}

/// Rank over the rationals by Bareiss elimination.
pub fn rank_exact(m: &ExactMatrix) -> Result<usize, LinalgError> {
    rank_exact_with_budget(m, DEFAULT_EXACT_BUDGET)
}

pub fn rank_exact_with_budget(m: &ExactMatrix, budget: usize) -> Result<usize, LinalgError> {
    let data = m.rational_entries()?;
    let size = m.rows * m.cols;
    if size > budget {
        return Err(LinalgError::BudgetExceeded { what: "exact rank", size, limit: budget });
    }
    // clear denominators row by row; this does not change the rank
    let mut a: Vec<Vec<BigInt>> = data
        .chunks(m.cols.max(1))
        .take(m.rows)
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..m.cols {
        let Some(piv) = (rank..m.rows).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(rank, piv);
        let (top, bottom) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let pv = &pivot_row[col];
        bottom.par_iter_mut().for_each(|row| {
            let factor = row[col].clone();
            for j in col + 1..m.cols {
                let v = &row[j] * pv - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[col] = BigInt::zero();
        });
        prev = a[rank][col].clone();
        rank += 1;
        if rank == m.rows {
            break;
        }
    }
    Ok(rank)
}

/// Incremental row-echelon basis over `GF(p)`.
pub struct ModularBasis {
    p: u64,
    cols: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
    work: Vec<u64>,
}

impl ModularBasis {
    pub fn new(p: u64, cols: usize) -> Result<Self, LinalgError> {
        check_prime(p)?;
        Ok(ModularBasis { p, cols, rows: Vec::new(), pivots: Vec::new(), work: vec![0; cols] })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Pivot columns in insertion order.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Adds a row of signed integers; returns whether the rank grew.
    pub fn push_i64(&mut self, row: &[i64]) -> bool {
        assert_eq!(row.len(), self.cols);
        let p = self.p as i64;
        for (w, &x) in self.work.iter_mut().zip(row) {
            *w = x.rem_euclid(p) as u64;
        }
        self.absorb()
    }

    /// Adds a row of residues already below `p`.
    pub fn push_residues(&mut self, row: &[u64]) -> bool {
        assert_eq!(row.len(), self.cols);
        self.work.copy_from_slice(row);
        self.absorb()
    }

    /// Adds the row held in the work buffer; `fill` writes residues into it.
    pub fn push_with(&mut self, fill: impl FnOnce(&mut [u64])) -> bool {
        self.work.iter_mut().for_each(|w| *w = 0);
        fill(&mut self.work);
        let p = self.p;
        self.work.iter_mut().for_each(|w| *w %= p);
        self.absorb()
    }

    fn absorb(&mut self) -> bool {
        if self.rows.len() == self.cols {
            return false;
        }
        let p = self.p;
        let w = &mut self.work;
        let mut pending = 0;
        for (b, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = w[pc] % p;
            if c == 0 {
                continue;
            }
            let factor = p - c;
            for (x, &y) in w.iter_mut().zip(b) {
                *x += factor * y as u64;
            }
            pending += 1;
            if pending == 255 {
                w.iter_mut().for_each(|x| *x %= p);
                pending = 0;
            }
        }
        w.iter_mut().for_each(|x| *x %= p);
        let Some(pc) = w.iter().position(|&x| x != 0) else { return false };
        let inv = inv_mod(w[pc], p);
        self.rows.push(w.iter().map(|&x| mul_mod(x, inv, p) as u32).collect());
        self.pivots.push(pc);
        true
    }
}

/// Per-prime ranks together with the caller-facing maximum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModularRank {
    pub rank: usize,
    pub per_prime: Vec<(u64, usize)>,
}

/// Rank of a rational matrix modulo each prime. `bound` is the smallest
/// admissible prime minus one; pass 0 when any prime is acceptable.
pub fn rank_modular(m: &ExactMatrix, primes: &[u64], bound: u64) -> Result<ModularRank, LinalgError> {
    if primes.is_empty() {
        return Err(LinalgError::NoPrimes);
    }
    for &p in primes {
        check_prime(p)?;
        if p <= bound {
            return Err(LinalgError::PrimeTooSmall { p, bound });
        }
    }
    let per_prime = primes
        .par_iter()
        .map(|&p| {
            let reduced = match m.prime() {
                Some(q) if q == p => m.clone(),
                Some(_) => return Err(LinalgError::Representation { expected: "rational" }),
                None => m.reduce_mod(p)?,
            };
            let Entries::Modular { data, .. } = &reduced.entries else { unreachable!() };
            let mut basis = ModularBasis::new(p, m.cols)?;
            for row in data.chunks(m.cols.max(1)).take(m.rows) {
                basis.push_residues(row);
            }
            Ok((p, basis.rank()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rank = per_prime.iter().map(|&(_, r)| r).max().unwrap_or(0);
    Ok(ModularRank { rank, per_prime })
}

/// Nullity of an integer operator certified by agreement across primes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NullityReport {
    pub nullity: usize,
    pub dim: usize,
    pub per_prime: Vec<(u64, usize)>,
}

/// Nullity of `A - lambda I` where row `i` of `A` has a one in every column
/// reported by `apply(i, emit)`.
pub fn nullity_for_eigenvalue(
    apply: &(dyn Fn(usize, &mut dyn FnMut(usize)) + Sync),
    dim: usize,
    lambda: i64,
    primes: &[u64],
) -> Result<NullityReport, LinalgError> {
    nullity_with_limit(apply, dim, lambda, primes, DEFAULT_DENSE_LIMIT)
}

pub fn nullity_with_limit(
    apply: &(dyn Fn(usize, &mut dyn FnMut(usize)) + Sync),
    dim: usize,
    lambda: i64,
    primes: &[u64],
    limit: usize,
) -> Result<NullityReport, LinalgError> {
    let bound = 2 * lambda.unsigned_abs().max(1) * dim as u64;
    shifted_nullity(dim, primes, limit, bound, &|i, p, row: &mut [u64]| {
        apply(i, &mut |j| row[j] += 1);
        row[i] += (lambda.rem_euclid(p as i64)) as u64 * (p - 1) % p;
    })
}

/// Nullity of `M - mu I` for a dense integer matrix given row by row.
/// `max_entry` bounds the absolute values of `M`.
pub fn nullity_of_integer_matrix(
    row_of: &(dyn Fn(usize, &mut [i64]) + Sync),
    dim: usize,
    mu: i64,
    max_entry: u64,
    primes: &[u64],
) -> Result<NullityReport, LinalgError> {
    let bound = 2 * max_entry.max(mu.unsigned_abs()).max(1) * dim as u64;
    shifted_nullity(dim, primes, DEFAULT_DENSE_LIMIT, bound, &|i, p, row: &mut [u64]| {
        let mut ints = vec![0i64; dim];
        row_of(i, &mut ints);
        ints[i] -= mu;
        for (r, x) in row.iter_mut().zip(&ints) {
            *r = x.rem_euclid(p as i64) as u64;
        }
    })
}

fn shifted_nullity(
    dim: usize,
    primes: &[u64],
    limit: usize,
    bound: u64,
    fill: &(dyn Fn(usize, u64, &mut [u64]) + Sync),
) -> Result<NullityReport, LinalgError> {
    if dim > limit {
        return Err(LinalgError::BudgetExceeded { what: "dense nullity", size: dim, limit });
    }
    if primes.is_empty() {
        return Err(LinalgError::NoPrimes);
    }
    for &p in primes {
        check_prime(p)?;
        if p <= bound {
            return Err(LinalgError::PrimeTooSmall { p, bound });
        }
    }
    let per_prime = primes
        .par_iter()
        .map(|&p| {
            let mut basis = ModularBasis::new(p, dim)?;
            for i in 0..dim {
                basis.push_with(|row| fill(i, p, row));
            }
            Ok((p, dim - basis.rank()))
        })
        .collect::<Result<Vec<_>, LinalgError>>()?;
    let first = per_prime[0].1;
    if per_prime.iter().any(|&(_, n)| n != first) {
        return Err(LinalgError::PrimeDisagreement { values: per_prime });
    }
    Ok(NullityReport { nullity: first, dim, per_prime })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(rows: usize, cols: usize, d: &[i64]) -> ExactMatrix {
        ExactMatrix::from_integers(rows, cols, d).unwrap()
    }

    #[test]
    fn identity_and_all_ones() {
        for k in [1, 4, 9] {
            assert_eq!(rank_exact(&ExactMatrix::identity(k)).unwrap(), k);
            assert_eq!(rank_exact(&ints(k, k, &vec![1; k * k])).unwrap(), 1);
        }
        assert_eq!(rank_exact(&ints(0, 0, &[])).unwrap(), 0);
        assert_eq!(rank_exact(&ints(2, 3, &[0; 6])).unwrap(), 0);
    }

    #[test]
    fn complement_of_uniform_projection() {
        // I - J/15 has the all-ones vector as its only kernel direction
        let v = 15;
        let data: Vec<BigRational> = (0..v * v)
            .map(|k| {
                let j = BigRational::new(1.into(), (v as i64).into());
                if k / v == k % v {
                    BigRational::one() - j
                } else {
                    -j
                }
            })
            .collect();
        let m = ExactMatrix::rational(v, v, data).unwrap();
        assert_eq!(rank_exact(&m).unwrap(), 14);
        let primes = certification_primes(2);
        assert_eq!(rank_modular(&m, &primes, 0).unwrap().rank, 14);
    }

    #[test]
    fn per_prime_ranks_of_a_diagonal() {
        let m = ints(2, 2, &[2, 0, 0, 4]);
        let r = rank_modular(&m, &[2, 5], 0).unwrap();
        assert_eq!(r.per_prime, vec![(2, 0), (5, 2)]);
        assert_eq!(r.rank, 2);
        assert!(matches!(rank_modular(&m, &[5], 7), Err(LinalgError::PrimeTooSmall { .. })));
        assert!(matches!(rank_modular(&m, &[9], 0), Err(LinalgError::NotPrime(9))));
    }

    #[test]
    fn budget_is_enforced() {
        let m = ExactMatrix::identity(10);
        assert!(matches!(rank_exact_with_budget(&m, 50), Err(LinalgError::BudgetExceeded { .. })));
    }

    #[test]
    fn modular_representation_is_tagged() {
        let m = ExactMatrix::modular(7, 2, 2, vec![8, 1, 0, 14]).unwrap();
        assert_eq!(m.prime(), Some(7));
        assert_eq!(m.entries(), &Entries::Modular { p: 7, data: vec![1, 1, 0, 0] });
        assert!(rank_exact(&m).is_err());
        assert_eq!(rank_modular(&m, &[7], 0).unwrap().rank, 1);
        assert!(rank_modular(&m, &[11], 0).is_err());
    }

    #[test]
    fn certification_primes_are_large_and_prime() {
        let ps = certification_primes(3);
        assert!(ps.windows(2).all(|w| w[0] > w[1]));
        assert!(ps.iter().all(|&p| is_prime(p) && p < PRIME_CEILING && p > PRIME_CEILING - 1000));
    }

    #[test]
    fn complete_graph_nullity() {
        let primes = certification_primes(2);
        for v in [5usize, 15] {
            let apply = |i: usize, emit: &mut dyn FnMut(usize)| (0..v).filter(|&j| j != i).for_each(emit);
            let r = nullity_for_eigenvalue(&apply, v, -1, &primes).unwrap();
            assert_eq!(r.nullity, v - 1);
            assert_eq!(nullity_for_eigenvalue(&apply, v, v as i64 - 1, &primes).unwrap().nullity, 1);
            assert_eq!(nullity_for_eigenvalue(&apply, v, 3, &primes).unwrap().nullity, 0);
        }
        let apply = |_: usize, _: &mut dyn FnMut(usize)| {};
        assert!(matches!(
            nullity_with_limit(&apply, 10, 0, &primes, 5),
            Err(LinalgError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn integer_matrix_nullity() {
        // square of the 5-cycle adjacency: eigenvalues 4 and (2cos(2pi k/5))^2
        let c5 = |i: usize, row: &mut [i64]| {
            for j in 0..5 {
                let d = (i + 5 - j) % 5;
                row[j] = match d {
                    0 => 2,
                    2 | 3 => 1,
                    _ => 0,
                };
            }
        };
        let primes = certification_primes(2);
        assert_eq!(nullity_of_integer_matrix(&c5, 5, 4, 2, &primes).unwrap().nullity, 1);
        assert_eq!(nullity_of_integer_matrix(&c5, 5, 2, 2, &primes).unwrap().nullity, 0);
    }

    #[test]
    fn delayed_reduction_survives_many_updates() {
        // 600 random rows of width 300 over a large prime: full column rank
        let p = certification_primes(1)[0];
        let mut basis = ModularBasis::new(p, 300).unwrap();
        let mut state = 12345u64;
        for _ in 0..600 {
            let row: Vec<u64> = (0..300)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (state >> 33) % p
                })
                .collect();
            basis.push_residues(&row);
        }
        assert_eq!(basis.rank(), 300);
        // rows in the span of the constant and index vectors
        let mut b = ModularBasis::new(p, 400).unwrap();
        for i in 0..400i64 {
            let row: Vec<i64> = (0..400i64).map(|j| i * 1000 + j - 7 * (i % 3)).collect();
            b.push_i64(&row);
        }
        assert_eq!(b.rank(), 2);
    }

    fn small_matrix() -> impl Strategy<Value = (usize, usize, Vec<i64>)> {
        (1usize..7, 1usize..7).prop_flat_map(|(r, c)| (Just(r), Just(c), prop::collection::vec(-3i64..4, r * c)))
    }

    proptest! {
        #[test]
        fn exact_and_modular_ranks_agree((r, c, d) in small_matrix()) {
            let m = ints(r, c, &d);
            let exact = rank_exact(&m).unwrap();
            let modular = rank_modular(&m, &certification_primes(2), 0).unwrap();
            prop_assert_eq!(exact, modular.rank);
            prop_assert!(modular.per_prime.iter().all(|&(_, k)| k == exact));
            prop_assert_eq!(rank_exact(&m.transpose()).unwrap(), exact);
        }

        #[test]
        fn rank_is_invariant_under_permutation_and_scaling((r, c, d) in small_matrix(), s in 1i64..5) {
            let m = ints(r, c, &d);
            let mut rows: Vec<Vec<i64>> = d.chunks(c).map(|x| x.to_vec()).collect();
            rows.reverse();
            for row in rows.iter_mut() {
                row.rotate_left(1 % c);
                row.iter_mut().for_each(|x| *x *= s);
            }
            let flat: Vec<i64> = rows.concat();
            prop_assert_eq!(rank_exact(&ints(r, c, &flat)).unwrap(), rank_exact(&m).unwrap());
        }
    }
}
