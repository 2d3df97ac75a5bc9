//! Relation between the oriflamme opposition graph and the opposition
//! graph on flags of the hyperbolic polar space it lives in.
//!
//! Every oriflamme flag `c` has two polar flags `c^-` and `c^+`. For even
//! `n` the polar flag `c^e` is opposite exactly the `d^e` with `d` opposite
//! `c`; for odd `n` it is opposite exactly the `d^(-e)`. So the polar graph
//! is two copies of the oriflamme graph for even `n` and its bipartite
//! double for odd `n`.

use rayon::prelude::*;
use serde::Serialize;

use super::eigen::sample_flags;
use super::{Result, Sample, SpectraError};
use crate::geometry::opposition::Opposition;
use crate::geometry::{Enumeration, GeometryInstance, GeometryKind};
use crate::linalg::{certification_primes, nullity_for_eigenvalue};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftReport {
    pub dflags_checked: usize,
    pub leaves_checked: usize,
    pub mismatches: usize,
    pub first_mismatch: Option<usize>,
}

impl LiftReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.leaves_checked > 0
    }
}

/// Compares the polar neighbors of `c^-` and `c^+` with the prediction
/// from the oriflamme neighbors of `c`, on sampled oriflamme flags.
pub fn check_lift(g: &GeometryInstance, en: &Enumeration, sample: Sample, seed: u64) -> Result<LiftReport> {
    if g.kind != GeometryKind::OriflammeD {
        return Err(SpectraError::Unsupported("lift check outside type D"));
    }
    let o = en.oriflamme.as_ref().ok_or(SpectraError::Unsupported("enumeration without oriflamme flags"))?;
    let opp = Opposition::new(g, en);
    let flags = sample_flags(en.num_flags(), sample, seed);
    let same_class = g.n.is_multiple_of(2);
    let bad: Vec<usize> = flags
        .par_iter()
        .filter_map(|&c| {
            let dn = opp.opposite_dflags(c);
            let ok = [(o.minus[c], false), (o.plus[c], true)].iter().all(|&(leaf, plus)| {
                let target_plus = if same_class { plus } else { !plus };
                let mut predicted: Vec<u32> =
                    dn.iter().map(|&d| if target_plus { o.plus[d as usize] } else { o.minus[d as usize] }).collect();
                predicted.sort_unstable();
                opp.opposite_leaves(leaf as usize) == predicted
            });
            (!ok).then_some(c)
        })
        .collect();
    Ok(LiftReport {
        dflags_checked: flags.len(),
        leaves_checked: 2 * flags.len(),
        mismatches: bad.len(),
        first_mismatch: bad.iter().min().copied(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectrumRow {
    pub lambda: i64,
    pub oriflamme: usize,
    /// Predicted polar nullity from the oriflamme nullities.
    pub predicted: usize,
    /// Computed polar nullity, only evaluated where the prediction is
    /// nonzero; the dimension count below covers the remaining values.
    pub polar: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectrumReport {
    pub oriflamme_dim: usize,
    pub polar_dim: usize,
    pub rows: Vec<SpectrumRow>,
    /// Sum of the oriflamme nullities over the candidate eigenvalues.
    pub oriflamme_total: usize,
    pub polar_total: usize,
}

impl SpectrumReport {
    pub fn passed(&self) -> bool {
        self.oriflamme_total == self.oriflamme_dim
            && self.polar_total == self.polar_dim
            && self.rows.iter().all(|r| r.polar.map_or(r.predicted == 0, |p| p == r.predicted))
    }
}

/// Compares the spectra of both graphs on the candidate eigenvalues
/// `0, +-1, +-q, ..., +-valency` (all powers of `q` up to the valency).
/// The candidate set is complete exactly when the oriflamme nullities sum
/// to the number of oriflamme flags.
pub fn check_spectrum(g: &GeometryInstance, en: &Enumeration) -> Result<SpectrumReport> {
    if g.kind != GeometryKind::OriflammeD {
        return Err(SpectraError::Unsupported("spectrum comparison outside type D"));
    }
    en.oriflamme.as_ref().ok_or(SpectraError::Unsupported("enumeration without oriflamme flags"))?;
    let opp = Opposition::new(g, en);
    let dn: Vec<Vec<u32>> = (0..en.num_flags()).into_par_iter().map(|c| opp.opposite_dflags(c)).collect();
    let bn: Vec<Vec<u32>> = (0..en.num_leaves()).into_par_iter().map(|c| opp.opposite_leaves(c)).collect();
    let valency = dn.first().map_or(0, |a| a.len()) as i64;
    let q = g.qorder.q as i64;
    let mut candidates = vec![0i64];
    let mut p = 1i64;
    while p <= valency {
        candidates.extend([p, -p]);
        p *= q;
    }
    let primes = certification_primes(2);
    let d_apply = |i: usize, emit: &mut dyn FnMut(usize)| dn[i].iter().for_each(|&d| emit(d as usize));
    let b_apply = |i: usize, emit: &mut dyn FnMut(usize)| bn[i].iter().for_each(|&d| emit(d as usize));
    let mut d_null = std::collections::BTreeMap::new();
    for &l in &candidates {
        d_null.insert(l, nullity_for_eigenvalue(&d_apply, dn.len(), l, &primes)?.nullity);
    }
    let mut rows = Vec::with_capacity(candidates.len());
    for &l in &candidates {
        let predicted = if g.n.is_multiple_of(2) {
            2 * d_null[&l]
        } else if l == 0 {
            2 * d_null[&0]
        } else {
            d_null[&l] + d_null[&-l]
        };
        let polar = if predicted > 0 { Some(nullity_for_eigenvalue(&b_apply, bn.len(), l, &primes)?.nullity) } else { None };
        rows.push(SpectrumRow { lambda: l, oriflamme: d_null[&l], predicted, polar });
    }
    Ok(SpectrumReport {
        oriflamme_dim: dn.len(),
        polar_dim: bn.len(),
        oriflamme_total: d_null.values().sum(),
        polar_total: rows.iter().filter_map(|r| r.polar).sum(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Descriptor;

    #[test]
    fn rank_three_lift_and_spectrum() {
        let g = GeometryInstance::build_unrestricted(Descriptor::D { n: 3, q: 2 }).unwrap();
        let en = Enumeration::build(&g).unwrap();
        assert_eq!(en.num_flags(), 315);
        let lift = check_lift(&g, &en, Sample::All, 0).unwrap();
        assert!(lift.passed(), "{lift:?}");
        let spectrum = check_spectrum(&g, &en).unwrap();
        assert!(spectrum.passed(), "{spectrum:?}");
    }

    #[test]
    fn lift_rejects_other_types() {
        let g = GeometryInstance::parse("B:2:0:2:hyp").unwrap();
        let en = Enumeration::build(&g).unwrap();
        assert!(check_lift(&g, &en, Sample::All, 0).is_err());
    }
}
